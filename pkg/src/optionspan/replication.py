"""Constructive spanning: ladders that realize claims as call portfolios.

``indicator_ladder`` is the saturating call spread whose payoff climbs to
the indicator of {f > r} as the sharpness grows.  ``simple_ladder`` stacks
such spreads into the dyadic staircase of a nonnegative target, reproducing
the monotone simple-function approximation step by step.  ``exact_replicate``
skips the limit entirely: on a finite market it solves the strike ladder
whose piecewise-linear payoff interpolates the target at the distinct
underlying levels, so the replication error is zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidN, NegativeTarget, NotMeasurable
from .market import (
    Claim,
    FiniteMarket,
    Partition,
    check_claim,
    conditional_expectation,
    is_measurable,
    sigma_of,
)
from .norms import NormSpec, PairingBank, convergence_report, default_bank
from .options import MembershipResult, OptionPortfolio, combine, is_in_span, payoff, scale
from .reports import ConvergenceReport

# Beyond this sharpness the dyadic round-down is the identity at double
# precision for any payoff of sane magnitude.
_MAX_DYADIC_LEVEL = 120


def indicator_ladder(r: float, n: float) -> OptionPortfolio:
    """Call spread approximating the indicator of {f > r}.

    Long n calls at r, short n calls at r + 1/n: the payoff equals
    min(n * max(f - r, 0), 1), which is 0 at or below r, 1 at or above
    r + 1/n, and increases pointwise in n.
    """
    if not n >= 1:
        raise InvalidN(f"ladder sharpness must be >= 1, got {n!r}")
    r = float(r)
    n = float(n)
    return OptionPortfolio(0.0, ((r, n), (r + 1.0 / n, -n)))


def underlying_levels(market: FiniteMarket) -> tuple[np.ndarray, list[tuple[int, ...]], Partition]:
    """Distinct underlying values in ascending order with their state cells."""
    part = sigma_of(market)
    f = market.underlying
    pairs = sorted(
        ((float(f[cell[0]]), cell) for cell in part.cells), key=lambda t: t[0]
    )
    values = np.array([v for v, _ in pairs])
    cells = [c for _, c in pairs]
    return values, cells, part


def _target_levels(target: Claim, market: FiniteMarket) -> tuple[np.ndarray, np.ndarray]:
    x = check_claim(target, market)
    values, cells, part = underlying_levels(market)
    if not is_measurable(target, part):
        raise NotMeasurable("target varies inside a level set of the underlying")
    h = np.array([float(x[cell[0]]) for cell in cells])
    return values, h


def simple_ladder(target: Claim, market: FiniteMarket, n: int) -> OptionPortfolio:
    """Step n of the monotone staircase converging to a nonnegative target.

    The target value on each underlying level is rounded down to the dyadic
    grid of resolution 2**-n and the staircase is assembled from saturating
    call spreads, one pair of legs per level boundary.  The spread width is
    min(1/n, gap/2) with gap the smallest spacing of distinct underlying
    values, snapped down to a power of two, so every spread saturates at
    every finite n (the remaining sup error is the dyadic rounding alone, at
    most 2**-n) and saturated spreads evaluate exactly when the underlying
    sits on a binary-fraction grid.
    """
    if not n >= 1:
        raise InvalidN(f"ladder step must be >= 1, got {n!r}")
    n = int(n)
    values, h = _target_levels(target, market)
    if np.any(h < 0.0):
        raise NegativeTarget("staircase targets must be nonnegative")
    if n >= _MAX_DYADIC_LEVEL:
        q = h.copy()
    else:
        q = np.ldexp(np.floor(np.ldexp(h, n)), -n)
    cash = float(q[0])
    legs: list[tuple[float, float]] = []
    if len(values) > 1:
        gap = float(np.min(np.diff(values)))
        width = math.ldexp(1.0, math.frexp(min(1.0 / n, gap / 2.0))[1] - 1)
        for j in range(1, len(values)):
            dq = float(q[j] - q[j - 1])
            if dq != 0.0:
                s = dq / width
                legs.append((float(values[j]) - width, s))
                legs.append((float(values[j]), -s))
    return OptionPortfolio(cash, tuple(legs))


def exact_replicate(target: Claim, market: FiniteMarket) -> OptionPortfolio:
    """Exact strike-ladder replication of a measurable claim.

    With distinct underlying values v_1 < ... < v_m and target values
    h_1, ..., h_m on those levels, the portfolio holds cash h_1, a call at
    v_1 with weight equal to the first interpolation slope, and a call at
    each interior v_j weighted by the slope second difference.  Its payoff
    is the piecewise-linear interpolant through (v_j, h_j), which agrees
    with the target at every state.
    """
    values, h = _target_levels(target, market)
    m = len(values)
    cash = float(h[0])
    legs: list[tuple[float, float]] = []
    if m >= 2:
        slopes = np.diff(h) / np.diff(values)
        legs.append((float(values[0]), float(slopes[0])))
        for j in range(1, m - 1):
            legs.append((float(values[j]), float(slopes[j] - slopes[j - 1])))
    return OptionPortfolio(cash, tuple(legs))


def ladder_sequence(
    target: Claim, market: FiniteMarket, n_values: Sequence[int]
) -> list[OptionPortfolio]:
    """Staircase portfolios for a signed measurable target.

    The target is split into positive and negative parts, each part gets its
    own monotone staircase, and the portfolios are subtracted.
    """
    x = check_claim(target, market)
    if not is_measurable(target, sigma_of(market)):
        raise NotMeasurable("target varies inside a level set of the underlying")
    pos = Claim(np.maximum(x, 0.0))
    neg = Claim(np.maximum(-x, 0.0))
    out = []
    for n in n_values:
        out.append(
            combine(simple_ladder(pos, market, n), scale(simple_ladder(neg, market, n), -1.0))
        )
    return out


@dataclass(frozen=True)
class CompletionEntry:
    """Replication outcome for one target in :func:`completion_demo`."""

    index: int
    replicable: bool
    portfolio: OptionPortfolio
    report: ConvergenceReport
    membership: MembershipResult
    projection: Claim | None = None


def completion_demo(
    market: FiniteMarket,
    targets: Sequence[Claim],
    norms: Sequence[NormSpec] | None = None,
    bank: PairingBank | None = None,
    n_values: Sequence[int] | None = None,
) -> list[CompletionEntry]:
    """Run the spanning experiment for a list of targets.

    Measurable targets get their staircase convergence report plus the exact
    portfolio.  Non-measurable targets are flagged with a violating state
    pair; their report tracks the staircase toward the conditional
    expectation, measured against the original target, so the error plateau
    equals the distance to the span.  Entries are ordered by input index.
    """
    if norms is None:
        norms = [NormSpec.lp(1), NormSpec.lp(2), NormSpec.linf()]
    if bank is None:
        bank = default_bank(market)
    if n_values is None:
        n_values = list(range(1, 33))
    n_values = list(n_values)
    entries = []
    part = sigma_of(market)
    for idx, target in enumerate(targets):
        mem = is_in_span(target, market)
        if mem.member:
            ladder_target = target
            portfolio = mem.portfolio
            projection = None
        else:
            projection = conditional_expectation(target, part, market)
            ladder_target = projection
            portfolio = exact_replicate(projection, market)
        ports = ladder_sequence(ladder_target, market, n_values)
        seq = [payoff(p, market) for p in ports]
        report = convergence_report(seq, target, market, norms, bank, steps=n_values)
        entries.append(
            CompletionEntry(
                index=idx,
                replicable=mem.member,
                portfolio=portfolio,
                report=report,
                membership=mem,
                projection=projection,
            )
        )
    return entries
