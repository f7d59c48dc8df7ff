"""Finite markets, claims, and information partitions.

A market is a finite list of atoms with strictly positive probabilities plus
the payoff vector of one limited-liability underlying.  Because every atom
carries mass, a sub-sigma-algebra (modulo null sets, of which there are none)
is the same thing as a partition of the atoms.  Information is therefore
represented by a ``Partition``: two states share a cell exactly when every
generating claim takes the same value on both, up to a relative tolerance
that keeps level sets stable under float noise in discretized inputs.

All types are immutable after construction (arrays are marked read-only), so
they can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidProbability,
    NegativeUnderlying,
    NonPositiveProbability,
)

# Two payoff values count as the same level when
# |a - b| <= VALUE_RTOL * max(1, |a|, |b|).
VALUE_RTOL = 1e-9


def _as_vector(values, name: str = "values") -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatch(
            f"{name} must be a one-dimensional vector, got shape {arr.shape}"
        )
    return arr


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


def values_equal(a: float, b: float) -> bool:
    """Level-set equality with relative tolerance against max(1, |a|, |b|)."""
    return abs(a - b) <= VALUE_RTOL * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class Claim:
    """A state-indexed payoff vector (element of the space of claims)."""

    payoffs: np.ndarray

    def __post_init__(self):
        arr = _as_vector(self.payoffs, "payoffs")
        if not np.all(np.isfinite(arr)):
            raise ValueError("claim payoffs must be finite")
        object.__setattr__(self, "payoffs", _readonly(arr))

    def __len__(self) -> int:
        return len(self.payoffs)


@dataclass(frozen=True)
class FiniteMarket:
    """Weighted atoms plus the underlying payoff vector.

    Use :func:`build_market` to construct one; it validates and normalizes
    the inputs.  State order is canonical (input order) and every vector in
    the package indexes against it.
    """

    probs: np.ndarray
    underlying: np.ndarray
    labels: tuple[str, ...]

    @property
    def n_states(self) -> int:
        return len(self.probs)

    def underlying_claim(self) -> Claim:
        return Claim(self.underlying)

    def ones(self) -> Claim:
        """The riskless claim paying one in every state."""
        return Claim(np.ones(self.n_states))


def build_market(
    probs, underlying, labels: Sequence[str] | None = None
) -> FiniteMarket:
    """Validate market data and return an immutable market.

    Probabilities must be finite, strictly positive, and sum to one within
    1e-6; they are renormalized to sum to one exactly.  Zero-probability
    states are rejected rather than quotiented away, which keeps almost-sure
    equality identical to plain vector equality everywhere downstream.
    Underlying payoffs must be finite and nonnegative (limited liability).
    """
    p = _as_vector(probs, "probs")
    f = _as_vector(underlying, "underlying")
    if len(p) != len(f):
        raise DimensionMismatch(
            f"probs has {len(p)} entries but underlying has {len(f)}"
        )
    if len(p) == 0:
        raise DimensionMismatch("a market needs at least one state")
    if not np.all(np.isfinite(p)) or np.any(p <= 0.0):
        raise NonPositiveProbability(
            "every state probability must be finite and strictly positive"
        )
    total = float(p.sum())
    if abs(total - 1.0) > 1e-6:
        raise InvalidProbability(
            f"probabilities sum to {total!r}; expected 1 within 1e-6"
        )
    if not np.all(np.isfinite(f)) or np.any(f < 0.0):
        raise NegativeUnderlying("underlying payoffs must be finite and >= 0")
    if labels is None:
        label_tuple = tuple(f"s{i}" for i in range(len(p)))
    else:
        label_tuple = tuple(str(x) for x in labels)
        if len(label_tuple) != len(p):
            raise DimensionMismatch(
                f"{len(label_tuple)} labels supplied for {len(p)} states"
            )
    return FiniteMarket(
        probs=_readonly(p / total), underlying=_readonly(f), labels=label_tuple
    )


def check_claim(claim: Claim, market: FiniteMarket) -> np.ndarray:
    """Return the claim's payoff vector after checking its dimension."""
    x = claim.payoffs
    if len(x) != market.n_states:
        raise DimensionMismatch(
            f"claim has {len(x)} entries for a market with {market.n_states} states"
        )
    return x


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty cells covering states 0..N-1.

    ``cell_of[i]`` is the index of the cell containing state ``i``.  Cells
    are ordered by their smallest member, so partitions built from the same
    data compare equal.
    """

    cells: tuple[tuple[int, ...], ...]
    cell_of: tuple[int, ...]

    @property
    def n_states(self) -> int:
        return len(self.cell_of)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def indicator(self, cell_index: int) -> np.ndarray:
        out = np.zeros(self.n_states)
        out[list(self.cells[cell_index])] = 1.0
        return out

    @staticmethod
    def from_cell_ids(ids: Sequence[int]) -> "Partition":
        seen: dict[int, int] = {}
        cells: list[list[int]] = []
        cell_of: list[int] = []
        for state, raw in enumerate(ids):
            ci = seen.get(raw)
            if ci is None:
                ci = len(cells)
                seen[raw] = ci
                cells.append([])
            cells[ci].append(state)
            cell_of.append(ci)
        return Partition(tuple(tuple(c) for c in cells), tuple(cell_of))


def level_ids(values) -> np.ndarray:
    """Assign a level id to every entry, chaining values within tolerance.

    Sorting first and grouping consecutive entries keeps the grouping stable:
    a cloud of nearly equal floats lands in one level even if the extreme
    members differ by slightly more than the pairwise tolerance.
    """
    arr = _as_vector(values)
    order = np.argsort(arr, kind="stable")
    ids = np.empty(len(arr), dtype=int)
    prev = None
    lid = -1
    for idx in order:
        v = float(arr[idx])
        if prev is None or (v - prev) > VALUE_RTOL * max(1.0, abs(v), abs(prev)):
            lid += 1
        ids[idx] = lid
        prev = v
    return ids


def sigma_of(
    market: FiniteMarket, generators: Sequence[Claim] | None = None
) -> Partition:
    """Partition of states generated by a family of claims.

    Two states land in the same cell iff every generator takes the same value
    (within the level tolerance) on both.  With the default generator set,
    the underlying itself, this is its level-set partition.
    """
    if generators is None:
        generators = [market.underlying_claim()]
    gens = list(generators)
    if not gens:
        return Partition((tuple(range(market.n_states)),), (0,) * market.n_states)
    rows = []
    for g in gens:
        rows.append(level_ids(check_claim(g, market)))
    key_rows = np.stack(rows, axis=1)
    seen: dict[tuple[int, ...], int] = {}
    cells: list[list[int]] = []
    cell_of: list[int] = []
    for i in range(market.n_states):
        key = tuple(int(v) for v in key_rows[i])
        ci = seen.get(key)
        if ci is None:
            ci = len(cells)
            seen[key] = ci
            cells.append([])
        cells[ci].append(i)
        cell_of.append(ci)
    return Partition(tuple(tuple(c) for c in cells), tuple(cell_of))


def is_measurable(claim: Claim, part: Partition) -> bool:
    """True iff the claim is constant (within tolerance) on every cell."""
    x = claim.payoffs
    if len(x) != part.n_states:
        raise DimensionMismatch(
            f"claim has {len(x)} entries for a partition of {part.n_states} states"
        )
    for cell in part.cells:
        vals = x[list(cell)]
        if not values_equal(float(vals.min()), float(vals.max())):
            return False
    return True


def conditional_expectation(
    claim: Claim, part: Partition, market: FiniteMarket
) -> Claim:
    """Probability-weighted cell averages of the claim.

    The result is measurable with respect to ``part``, the projection is
    idempotent, linear, positive, and preserves the expectation.
    """
    x = check_claim(claim, market)
    if part.n_states != market.n_states:
        raise DimensionMismatch(
            f"partition covers {part.n_states} states, market has {market.n_states}"
        )
    out = np.empty(market.n_states)
    for cell in part.cells:
        idx = list(cell)
        w = market.probs[idx]
        out[idx] = float(np.dot(w, x[idx]) / w.sum())
    return Claim(out)


def market_to_dict(market: FiniteMarket) -> dict:
    return {
        "probs": [float(v) for v in market.probs],
        "underlying": [float(v) for v in market.underlying],
        "labels": list(market.labels),
    }


def market_from_dict(data: dict) -> FiniteMarket:
    """Build a market from the JSON schema {probs, underlying, labels?}."""
    return build_market(
        data["probs"], data["underlying"], labels=data.get("labels")
    )
