"""Convergence gauges: weighted norms, density pairings, and reports.

Three ways a sequence of claims can approach a target are monitored side by
side.  The sup gauge stands in for pointwise convergence (every atom carries
mass), ``norm`` covers the Lp, Linf, and Orlicz families (the latter through
the Luxemburg gauge), and pairing against a bank of state-price densities
probes convergence against linear pricing functionals.  On a finite market
with strictly positive probabilities these gauges agree about whether a
sequence converges, and ``convergence_report`` makes the agreement visible
row by row.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, EmptySequence
from .market import Claim, FiniteMarket, _as_vector, _readonly, check_claim
from .reports import ConvergenceReport, ConvergenceRow, VerificationReport

# A mode counts as converged when its final error drops below this.
CONVERGED_TOL = 1e-8

# Relative bracket width for the Luxemburg bisection.
_LUX_REL_WIDTH = 1e-13

_YOUNG_KINDS = ("pow", "exp", "log")


@dataclass(frozen=True)
class YoungFunction:
    """Convex increasing gauge with value 0 at 0.

    Built-ins: ``pow`` is t**p with p >= 1, ``exp`` is exp(t) - 1, and
    ``log`` is t * log(1 + t).
    """

    kind: str
    p: float | None = None

    def __post_init__(self):
        if self.kind not in _YOUNG_KINDS:
            raise ValueError(
                f"unknown Young function {self.kind!r}; choose from {_YOUNG_KINDS}"
            )
        if self.kind == "pow":
            if self.p is None or not self.p >= 1.0:
                raise ValueError("pow Young function needs an exponent p >= 1")

    @property
    def name(self) -> str:
        return f"pow:{self.p:g}" if self.kind == "pow" else self.kind

    def __call__(self, t: np.ndarray) -> np.ndarray:
        if self.kind == "pow":
            return np.power(t, self.p)
        if self.kind == "exp":
            return np.expm1(t)
        return t * np.log1p(t)


@dataclass(frozen=True)
class NormSpec:
    """One of the supported claim norms: Lp(p >= 1), Linf, or Orlicz."""

    kind: str
    p: float | None = None
    young: YoungFunction | None = None

    def __post_init__(self):
        if self.kind not in ("lp", "linf", "orlicz"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind == "lp" and (self.p is None or not self.p >= 1.0):
            raise ValueError("Lp norms need p >= 1")
        if self.kind == "orlicz" and self.young is None:
            raise ValueError("Orlicz norms need a Young function")

    @classmethod
    def lp(cls, p: float) -> "NormSpec":
        return cls("lp", p=float(p))

    @classmethod
    def linf(cls) -> "NormSpec":
        return cls("linf")

    @classmethod
    def orlicz(cls, young: YoungFunction) -> "NormSpec":
        return cls("orlicz", young=young)

    @property
    def name(self) -> str:
        if self.kind == "linf":
            return "Linf"
        if self.kind == "lp":
            if self.p == 1.0:
                return "L1"
            if self.p == 2.0:
                return "L2"
            return f"Lp:{self.p:g}"
        return f"Orlicz:{self.young.name}"


def parse_norm_spec(text: str) -> NormSpec:
    """Parse a norm spec string: L1, L2, Lp:2.5, Linf, Orlicz:exp,
    Orlicz:pow:3, Orlicz:log."""
    s = text.strip()
    low = s.lower()
    if low == "linf":
        return NormSpec.linf()
    if low.startswith("orlicz:"):
        parts = s.split(":")
        name = parts[1].lower()
        if name == "exp":
            return NormSpec.orlicz(YoungFunction("exp"))
        if name in ("log", "xlog"):
            return NormSpec.orlicz(YoungFunction("log"))
        if name == "pow" and len(parts) == 3:
            return NormSpec.orlicz(YoungFunction("pow", float(parts[2])))
        raise ValueError(f"unknown Orlicz spec {text!r}")
    if low.startswith("lp:"):
        return NormSpec.lp(float(s[3:]))
    if low.startswith("l"):
        try:
            return NormSpec.lp(float(s[1:]))
        except ValueError:
            pass
    raise ValueError(f"unknown norm spec {text!r}")


def _luxemburg(x_abs: np.ndarray, probs: np.ndarray, young: YoungFunction) -> float:
    mask = x_abs > 0.0
    if not mask.any():
        return 0.0
    xs = x_abs[mask]
    ps = probs[mask]

    def gauge(lam: float) -> float:
        with np.errstate(over="ignore", divide="ignore"):
            return float(np.dot(ps, young(xs / lam)))

    hi = float(xs.max())
    for _ in range(600):
        if gauge(hi) <= 1.0:
            break
        hi *= 2.0
    lo = hi / 2.0
    for _ in range(600):
        if gauge(lo) > 1.0:
            break
        hi = lo
        lo /= 2.0
    else:
        return 0.0
    for _ in range(300):
        if hi - lo <= _LUX_REL_WIDTH * hi:
            break
        mid = 0.5 * (lo + hi)
        if gauge(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def norm(claim: Claim, market: FiniteMarket, spec: NormSpec) -> float:
    """Evaluate a claim norm on the market.

    Lp is the probability-weighted p-mean, Linf the max absolute payoff
    (identical to the essential sup because all atoms have positive mass),
    and Orlicz the Luxemburg gauge inf{lam > 0 : E phi(|x|/lam) <= 1}
    computed by bisection.
    """
    x = np.abs(check_claim(claim, market))
    if spec.kind == "linf":
        return float(x.max())
    if spec.kind == "lp":
        return float(np.dot(market.probs, x**spec.p) ** (1.0 / spec.p))
    return _luxemburg(x, market.probs, spec.young)


@dataclass(frozen=True)
class StatePriceDensity:
    """Nonnegative pricing kernel; ``strict`` means every weight is > 0."""

    weights: np.ndarray
    strict: bool = field(init=False)

    def __post_init__(self):
        w = _as_vector(self.weights, "weights")
        if not np.all(np.isfinite(w)) or np.any(w < 0.0):
            raise ValueError("density weights must be finite and nonnegative")
        object.__setattr__(self, "weights", _readonly(w))
        object.__setattr__(self, "strict", bool(np.all(w > 0.0)))


@dataclass(frozen=True)
class PairingBank:
    """A finite family of densities standing in for the pricing dual."""

    densities: tuple[StatePriceDensity, ...]

    def __post_init__(self):
        ds = tuple(self.densities)
        if not any(d.strict for d in ds):
            raise ValueError("a pairing bank needs at least one strictly positive density")
        object.__setattr__(self, "densities", ds)

    @property
    def strict_indices(self) -> tuple[int, ...]:
        return tuple(i for i, d in enumerate(self.densities) if d.strict)


def default_bank(
    market: FiniteMarket, seed: int = 0, n_random: int = 8, n_sparse: int = 4
) -> PairingBank:
    """Constant density, random strictly positive ones, sparse nonneg ones.

    A single strictly positive density already separates claims on a finite
    market; the extra members make the weak-versus-norm distinction visible
    in reports.
    """
    rng = np.random.default_rng(seed)
    n = market.n_states
    densities = [StatePriceDensity(np.ones(n))]
    for _ in range(n_random):
        densities.append(StatePriceDensity(rng.uniform(0.2, 2.0, n)))
    for _ in range(n_sparse):
        mask = rng.random(n) < 0.5
        w = rng.uniform(0.5, 1.5, n) * mask
        if not w.any():
            w[int(rng.integers(n))] = 1.0
        densities.append(StatePriceDensity(w))
    return PairingBank(tuple(densities))


def pair(claim: Claim, density: StatePriceDensity, market: FiniteMarket) -> float:
    """Evaluate the pricing functional: sum of payoff * weight * prob."""
    x = check_claim(claim, market)
    if len(density.weights) != market.n_states:
        raise DimensionMismatch(
            f"density has {len(density.weights)} weights for {market.n_states} states"
        )
    return float(np.dot(x * density.weights, market.probs))


def convergence_report(
    sequence: Sequence[Claim],
    target: Claim,
    market: FiniteMarket,
    norms: Sequence[NormSpec],
    bank: PairingBank,
    include_absolute: bool = True,
    steps: Sequence[int] | None = None,
    meta: dict | None = None,
) -> ConvergenceReport:
    """Per-step error table for a sequence against a target.

    Each row reports the sup error, each requested norm error, and the
    pairing error against every bank density.  A mode is flagged converged
    when its final error is below ``CONVERGED_TOL``; pairing flags consider
    only the strictly positive densities, since a sparse density can vanish
    on differences it does not see.
    """
    if len(sequence) == 0:
        raise EmptySequence("convergence report needs at least one element")
    t = check_claim(target, market)
    step_list = list(steps) if steps is not None else list(range(1, len(sequence) + 1))
    if len(step_list) != len(sequence):
        raise DimensionMismatch(
            f"{len(step_list)} step labels for {len(sequence)} sequence elements"
        )
    rows = []
    for step, gk in zip(step_list, sequence):
        d = check_claim(gk, market) - t
        dclaim = Claim(d)
        abs_claim = Claim(np.abs(d))
        nerr = {spec.name: norm(dclaim, market, spec) for spec in norms}
        perr = tuple(abs(pair(dclaim, y, market)) for y in bank.densities)
        aerr = (
            tuple(pair(abs_claim, y, market) for y in bank.densities)
            if include_absolute
            else None
        )
        rows.append(
            ConvergenceRow(int(step), float(np.max(np.abs(d))), nerr, perr, aerr)
        )
    last = rows[-1]
    strict = [i for i, d in enumerate(bank.densities) if d.strict]
    converged: dict[str, bool] = {"sup": last.sup_err < CONVERGED_TOL}
    for name in last.norm_errs:
        converged[name] = last.norm_errs[name] < CONVERGED_TOL
    converged["pairing"] = all(last.pairing_errs[i] < CONVERGED_TOL for i in strict)
    if include_absolute:
        converged["abs_pairing"] = all(
            last.abs_pairing_errs[i] < CONVERGED_TOL for i in strict
        )
    report_meta = {"converged_tol": CONVERGED_TOL}
    if meta:
        report_meta.update(meta)
    return ConvergenceReport(
        tuple(rows), converged, tuple(spec.name for spec in norms), report_meta
    )


def verify_mode_agreement(
    market: FiniteMarket,
    trials: int = 50,
    seed: int = 0,
    norms: Sequence[NormSpec] | None = None,
    bank: PairingBank | None = None,
) -> VerificationReport:
    """Check that the sup, norm, and pairing verdicts coincide.

    Every trial builds either a sequence that converges to its target or one
    that plateaus at a fixed offset, then asserts that all converged flags
    agree.  Deterministic given the seed.
    """
    if norms is None:
        norms = [NormSpec.lp(1), NormSpec.lp(2), NormSpec.linf()]
    if bank is None:
        bank = default_bank(market, seed)
    rng = np.random.default_rng(seed)
    n = market.n_states
    witnesses = []
    counterexample = None
    for trial in range(trials):
        target = rng.uniform(-3.0, 3.0, n)
        direction = rng.uniform(0.5, 2.0, n) * rng.choice([-1.0, 1.0], n)
        converging = trial % 2 == 0
        seq = []
        for k in range(1, 31):
            if converging:
                seq.append(Claim(target + direction * 0.5**k))
            else:
                seq.append(Claim(target + direction + direction * 0.5**k))
        report = convergence_report(seq, Claim(target), market, norms, bank)
        flags = set(report.converged.values())
        agree = len(flags) == 1 and (True in flags) == converging
        witnesses.append(
            {
                "trial": trial,
                "kind": "converging" if converging else "plateau",
                "flags": {k: bool(v) for k, v in report.converged.items()},
                "ok": bool(agree),
            }
        )
        if not agree and counterexample is None:
            counterexample = {
                "trial": trial,
                "kind": "converging" if converging else "plateau",
                "flags": {k: bool(v) for k, v in report.converged.items()},
            }
    return VerificationReport(
        lemma="mode-agreement",
        trials=trials,
        passed=counterexample is None,
        counterexample=counterexample,
        witnesses=witnesses,
        seed=seed,
    )
