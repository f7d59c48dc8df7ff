"""Portfolios of calls on one underlying plus a riskless cash position.

The payoff of a portfolio at state i is cash + sum of w * max(f_i - k, 0)
over the strike legs.  With a nonnegative underlying this family contains
the underlying itself (the strike-zero call), puts via parity, saturating
indicators via call spreads, and every piecewise-linear function of the
underlying, so exact membership can be decided by a level-set check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .market import (
    Claim,
    FiniteMarket,
    check_claim,
    is_measurable,
    sigma_of,
    values_equal,
)
from .reports import VerificationReport


@dataclass(frozen=True)
class OptionPortfolio:
    """Cash plus a ladder of (strike, weight) call legs.

    Construction canonicalizes: legs with the same strike are merged by
    summing weights, zero-weight legs are dropped, and legs are sorted by
    strike.  Portfolio equality is therefore decidable.
    """

    cash: float = 0.0
    legs: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        cash = float(self.cash)
        if not np.isfinite(cash):
            raise ValueError("portfolio cash must be finite")
        merged: dict[float, float] = {}
        for strike, weight in self.legs:
            k = float(strike)
            w = float(weight)
            if not (np.isfinite(k) and np.isfinite(w)):
                raise ValueError("strikes and weights must be finite")
            merged[k] = merged.get(k, 0.0) + w
        legs = tuple((k, w) for k, w in sorted(merged.items()) if w != 0.0)
        object.__setattr__(self, "cash", cash)
        object.__setattr__(self, "legs", legs)

    @property
    def n_legs(self) -> int:
        return len(self.legs)


def scale(port: OptionPortfolio, factor: float) -> OptionPortfolio:
    return OptionPortfolio(
        port.cash * factor, tuple((k, w * factor) for k, w in port.legs)
    )


def combine(*ports: OptionPortfolio) -> OptionPortfolio:
    cash = sum(p.cash for p in ports)
    legs: list[tuple[float, float]] = []
    for p in ports:
        legs.extend(p.legs)
    return OptionPortfolio(cash, tuple(legs))


def payoff(port: OptionPortfolio, market: FiniteMarket) -> Claim:
    """Evaluate the portfolio payoff at every state."""
    f = market.underlying
    total = np.full(market.n_states, port.cash, dtype=float)
    for strike, weight in port.legs:
        total += weight * np.maximum(f - strike, 0.0)
    return Claim(total)


def call(strike: float) -> OptionPortfolio:
    return OptionPortfolio(0.0, ((float(strike), 1.0),))


def put(strike: float) -> OptionPortfolio:
    """Put payoff max(k - f, 0) realized by parity.

    k - f + (f - k)^+ equals (k - f)^+ whenever f >= 0, so the portfolio is
    cash k, short one strike-zero call, long one strike-k call.
    """
    k = float(strike)
    return OptionPortfolio(k, ((0.0, -1.0), (k, 1.0)))


def portfolio_to_dict(port: OptionPortfolio) -> dict:
    return {
        "cash": port.cash,
        "legs": [{"strike": k, "weight": w} for k, w in port.legs],
    }


def portfolio_from_dict(data: dict) -> OptionPortfolio:
    return OptionPortfolio(
        float(data.get("cash", 0.0)),
        tuple((leg["strike"], leg["weight"]) for leg in data.get("legs", [])),
    )


@dataclass(frozen=True)
class MembershipResult:
    """Span-membership verdict with a checkable certificate either way.

    ``portfolio`` replicates the claim exactly when ``member`` is true;
    otherwise ``certificate`` names two states in the same underlying level
    set where the claim takes different values.
    """

    member: bool
    portfolio: OptionPortfolio | None = None
    certificate: tuple[int, int] | None = None
    cell: tuple[int, ...] | None = None


def is_in_span(claim: Claim, market: FiniteMarket) -> MembershipResult:
    """Exact membership test for the span of cash and calls on f.

    On a finite market the span is closed, so membership is equivalent to
    being constant on every level set of the underlying.  Members come back
    with an exact replicating portfolio, non-members with a violating state
    pair.
    """
    x = check_claim(claim, market)
    part = sigma_of(market)
    if is_measurable(claim, part):
        from .replication import exact_replicate

        return MembershipResult(True, portfolio=exact_replicate(claim, market))
    for cell in part.cells:
        vals = x[list(cell)]
        lo = int(np.argmin(vals))
        hi = int(np.argmax(vals))
        if not values_equal(float(vals[lo]), float(vals[hi])):
            return MembershipResult(
                False, certificate=(cell[lo], cell[hi]), cell=cell
            )
    raise AssertionError("measurability check disagreed with the cell scan")


def z_identity_report(
    market: FiniteMarket, strikes: Sequence[float], tol: float = 1e-12
) -> VerificationReport:
    """Check the exchange-option identity behind the sublattice argument.

    With b = f + 1 and s = f, the payoff max(s - k*b, 0) must vanish for
    k >= 1 and equal (1 - k) * max(f - k/(1-k), 0) for k < 1; both sides are
    evaluated per state and compared within ``tol``.
    """
    f = market.underlying
    b = f + 1.0
    witnesses = []
    counterexample = None
    for strike in strikes:
        k = float(strike)
        lhs = np.maximum(f - k * b, 0.0)
        if k >= 1.0:
            rhs = np.zeros_like(f)
            case = "vanishes"
        else:
            rhs = (1.0 - k) * np.maximum(f - k / (1.0 - k), 0.0)
            case = "scaled-call"
        err = float(np.max(np.abs(lhs - rhs)))
        bound = tol * max(1.0, float(np.max(np.abs(lhs))))
        ok = err <= bound
        witnesses.append(
            {"k": k, "case": case, "max_error": err, "ok": bool(ok)}
        )
        if not ok and counterexample is None:
            state = int(np.argmax(np.abs(lhs - rhs)))
            counterexample = {
                "k": k,
                "state": state,
                "lhs": float(lhs[state]),
                "rhs": float(rhs[state]),
            }
    return VerificationReport(
        lemma="z-identity",
        trials=len(witnesses),
        passed=counterexample is None,
        counterexample=counterexample,
        witnesses=witnesses,
    )


def z_identity_check(
    market: FiniteMarket, strikes: Sequence[float], tol: float = 1e-12
) -> bool:
    return z_identity_report(market, strikes, tol).passed
