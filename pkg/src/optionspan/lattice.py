"""Order-closure harnesses for sublattices of claims containing the constants.

On a finite market the order-closed sublattice generated by a family of
claims (with the constant one among them) consists exactly of the claims
constant on the joint level-set partition of the generators.  The harnesses
here verify that characterization constructively: cell indicators are built
by thresholding generators with saturating lattice expressions, and random
monotone or order-convergent sequences inside the closure are checked to
have their limits inside it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MissingOne
from .market import (
    Claim,
    FiniteMarket,
    Partition,
    check_claim,
    is_measurable,
    level_ids,
    sigma_of,
)
from .reports import VerificationReport


@dataclass(frozen=True)
class SublatticeSpec:
    """Generators of a sublattice of claims; the constant one is required."""

    generators: tuple[Claim, ...]
    market: FiniteMarket

    def __post_init__(self):
        gens = tuple(self.generators)
        for g in gens:
            check_claim(g, self.market)
        if not any(np.allclose(g.payoffs, 1.0, atol=1e-12) for g in gens):
            raise MissingOne("the constant-one claim must be among the generators")
        object.__setattr__(self, "generators", gens)


def sublattice_closure_partition(spec: SublatticeSpec) -> Partition:
    """Partition describing the order closure of the generated sublattice.

    The closure equals the claims constant on the joint level sets of the
    generators, so the partition is a complete description of it.
    """
    return sigma_of(spec.market, spec.generators)


def _threshold_indicator(values: np.ndarray, threshold: float, sharpness: float) -> np.ndarray:
    """Lattice expression min(sharpness * max(g - threshold, 0), 1).

    With sharpness at least 2 / (next level - threshold) the expression
    saturates: it is exactly 0.0 on levels at or below the threshold and
    exactly 1.0 above it, because the min against 1.0 absorbs any float
    slack in the product.
    """
    return np.minimum(sharpness * np.maximum(values - threshold, 0.0), 1.0)


def _generator_level_indicators(g: np.ndarray) -> tuple[np.ndarray, list[np.ndarray], list[dict]]:
    """Per-level indicators chi_{g = level} built from threshold expressions."""
    ids = level_ids(g)
    n_levels = int(ids.max()) + 1
    reps = np.full(n_levels, np.inf)
    np.minimum.at(reps, ids, g)
    above = [np.ones(len(g))]
    recipes = []
    for lvl in range(n_levels - 1):
        lo, hi = float(reps[lvl]), float(reps[lvl + 1])
        r = 0.5 * (lo + hi)
        if r <= lo:
            r = np.nextafter(lo, hi)
        if r >= hi:
            r = np.nextafter(hi, lo)
        sharp = 2.0 / (hi - r)
        above.append(_threshold_indicator(g, r, sharp))
        recipes.append({"threshold": r, "sharpness": sharp})
    above.append(np.zeros(len(g)))
    per_level = [above[lvl] - above[lvl + 1] for lvl in range(n_levels)]
    return ids, per_level, recipes


def build_cell_indicators(spec: SublatticeSpec) -> tuple[list[np.ndarray], list[dict]]:
    """Construct every closure-cell indicator from the generators.

    Each generator is thresholded into its level indicators and the cell
    indicator is the pointwise min across generators, mirroring the
    intersection of level sets.  Returns the indicator vectors plus a
    witness per cell recording the expression that produced it.
    """
    part = sublattice_closure_partition(spec)
    per_gen = []
    for g in spec.generators:
        per_gen.append(_generator_level_indicators(g.payoffs))
    indicators = []
    witnesses = []
    for ci, cell in enumerate(part.cells):
        state = cell[0]
        stack = []
        terms = []
        for gi, (ids, per_level, recipes) in enumerate(per_gen):
            lvl = int(ids[state])
            stack.append(per_level[lvl])
            term = {
                "generator": gi,
                "level_value": float(spec.generators[gi].payoffs[state]),
                "lower_threshold": recipes[lvl - 1]["threshold"] if lvl > 0 else None,
                "upper_threshold": (
                    recipes[lvl]["threshold"] if lvl < len(recipes) else None
                ),
            }
            terms.append(term)
        ind = np.minimum.reduce(stack)
        indicators.append(ind)
        witnesses.append(
            {
                "cell": [int(s) for s in cell],
                "terms": terms,
                "exact": bool(np.array_equal(ind, part.indicator(ci))),
            }
        )
    return indicators, witnesses


def verify_green_jarrow(
    spec: SublatticeSpec, n_reconstruct: int = 20, seed: int = 0
) -> VerificationReport:
    """Constructive check of the closure characterization.

    Both inclusions are exercised: every cell indicator must be reached
    exactly by saturated lattice expressions over the generators, and every
    claim constant on the cells must be recovered exactly as a linear
    combination of those indicators.
    """
    part = sublattice_closure_partition(spec)
    indicators, witnesses = build_cell_indicators(spec)
    counterexample = None
    for ci, wit in enumerate(witnesses):
        if not wit["exact"]:
            counterexample = {
                "kind": "indicator",
                "cell": wit["cell"],
                "built": [float(v) for v in indicators[ci]],
            }
            break
    rng = np.random.default_rng(seed)
    recon_checks = []
    if counterexample is None:
        for trial in range(n_reconstruct):
            coeffs = rng.uniform(-3.0, 3.0, part.n_cells)
            direct = np.empty(part.n_states)
            for ci, cell in enumerate(part.cells):
                direct[list(cell)] = coeffs[ci]
            recon = np.zeros(part.n_states)
            for ci in range(part.n_cells):
                recon = recon + coeffs[ci] * indicators[ci]
            ok = bool(np.array_equal(recon, direct))
            recon_checks.append({"trial": trial, "ok": ok})
            if not ok and counterexample is None:
                counterexample = {
                    "kind": "reconstruction",
                    "trial": trial,
                    "coefficients": [float(c) for c in coeffs],
                }
    return VerificationReport(
        lemma="green-jarrow",
        trials=n_reconstruct,
        passed=counterexample is None,
        counterexample=counterexample,
        witnesses=witnesses + recon_checks,
        seed=seed,
    )


def verify_order_closed_iff_sequential(
    spec: SublatticeSpec,
    trials: int = 100,
    seed: int = 0,
    mutate: bool = False,
) -> VerificationReport:
    """Sequential order-closure check on random sequences in the closure.

    Each trial draws a cell-constant limit and a nonnegative cell-constant
    direction, forms an increasing order-bounded sequence and an oscillating
    order-convergent one, and verifies that every element and the limit stay
    constant on the closure cells.  With ``mutate`` set, one coordinate of a
    limit is perturbed; the harness must catch the fault and report the
    violated cell, which serves as a self-test of the detector.
    """
    part = sublattice_closure_partition(spec)
    market = spec.market
    rng = np.random.default_rng(seed)
    witnesses = []
    counterexample = None

    def cell_constant(lo: float, hi: float) -> np.ndarray:
        vals = rng.uniform(lo, hi, part.n_cells)
        out = np.empty(part.n_states)
        for ci, cell in enumerate(part.cells):
            out[list(cell)] = vals[ci]
        return out

    def first_violation(vec: np.ndarray):
        for ci, cell in enumerate(part.cells):
            vals = vec[list(cell)]
            if float(vals.max()) - float(vals.min()) > 1e-12 * max(
                1.0, float(np.max(np.abs(vals)))
            ):
                lo = int(np.argmin(vals))
                hi = int(np.argmax(vals))
                return {
                    "cell": [int(s) for s in cell],
                    "states": [int(cell[lo]), int(cell[hi])],
                    "values": [float(vals[lo]), float(vals[hi])],
                }
        return None

    mutate_done = False
    for trial in range(trials):
        x = cell_constant(-4.0, 4.0)
        d = cell_constant(0.0, 3.0)
        checks_ok = True
        for k in range(1, 13):
            increasing = x - d / k
            oscillating = x + ((-1.0) ** k / k) * d
            if first_violation(increasing) or first_violation(oscillating):
                checks_ok = False
                break
        limit = x
        if mutate and not mutate_done:
            wide = [c for c in part.cells if len(c) >= 2]
            if not wide:
                raise ValueError(
                    "mutation self-test needs a closure cell with at least two states"
                )
            limit = x.copy()
            limit[wide[0][1]] += 0.5
            mutate_done = True
        violation = first_violation(limit)
        ok = checks_ok and violation is None
        witnesses.append(
            {
                "trial": trial,
                "sequence_ok": bool(checks_ok),
                "limit_ok": violation is None,
            }
        )
        if not ok and counterexample is None:
            counterexample = {"trial": trial}
            if violation is not None:
                counterexample.update(violation)
    passed = counterexample is None
    return VerificationReport(
        lemma="o-closed",
        trials=trials,
        passed=passed,
        counterexample=counterexample,
        witnesses=witnesses,
        seed=seed,
    )


def closure_contains(spec: SublatticeSpec, claim: Claim) -> bool:
    """Membership in the order closure of the generated sublattice."""
    return is_measurable(claim, sublattice_closure_partition(spec))
