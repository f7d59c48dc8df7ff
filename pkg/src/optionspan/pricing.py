"""Pricing functionals on the option space: positivity, no-free-lunch
separation, and arbitrage price bounds.

A pricing functional is quoted the way desks see it: a bond price (the
constant payoff) and a call-price curve on a finite strike set, which pins
the functional down on the span of those instruments.  Every verdict
returned here carries a machine-checkable certificate: a strictly positive
density repricing the whole curve, a zero-price portfolio with nonnegative
nonzero payoff, or a pair of LP-optimal densities bracketing a claim's
consistent prices.

Densities are reported probability-reweighted, meaning the weights y satisfy
sum(y_i * p_i) = 1, and the scalar ``scale`` (the bond price) converts
pairings into prices: price(x) = scale * sum(x_i * y_i * p_i).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegeneratePi,
    FreeLunchPresent,
    InvalidPricing,
    NotDeterminedByArbitrage,
    NotMeasurable,
    NumericalDegeneracy,
)
from .lp import LinearProgram, solve
from .market import Claim, FiniteMarket, check_claim, is_measurable, sigma_of
from .norms import StatePriceDensity
from .options import OptionPortfolio, combine, payoff, scale as scale_portfolio

REPRICE_TOL = 1e-8
UNIQUE_RTOL = 1e-8
STRICT_MARGIN_TOL = 1e-10
CERT_TOL = 1e-10
DEFAULT_DELTA_SCALE = 1e-7


@dataclass(frozen=True)
class PricingFunctional:
    """Bond price plus a call-price curve on strictly increasing strikes."""

    bond_price: float
    call_curve: tuple[tuple[float, float], ...]

    def __post_init__(self):
        bond = float(self.bond_price)
        if not np.isfinite(bond):
            raise InvalidPricing("bond price must be finite")
        curve = tuple((float(k), float(c)) for k, c in self.call_curve)
        if not curve:
            raise InvalidPricing("the call curve needs at least one quote")
        for k, c in curve:
            if not (np.isfinite(k) and np.isfinite(c)):
                raise InvalidPricing("strikes and call prices must be finite")
        ks = [k for k, _ in curve]
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise InvalidPricing("strikes must be strictly increasing")
        object.__setattr__(self, "bond_price", bond)
        object.__setattr__(self, "call_curve", curve)

    @property
    def strikes(self) -> tuple[float, ...]:
        return tuple(k for k, _ in self.call_curve)

    @property
    def call_prices(self) -> tuple[float, ...]:
        return tuple(c for _, c in self.call_curve)


def pricing_to_dict(pi: PricingFunctional) -> dict:
    return {
        "bond": pi.bond_price,
        "calls": [{"k": k, "price": c} for k, c in pi.call_curve],
    }


def pricing_from_dict(data: dict) -> PricingFunctional:
    """Build from the JSON schema {bond, calls: [{k, price}, ...]}."""
    return PricingFunctional(
        float(data["bond"]),
        tuple((q["k"], q["price"]) for q in data["calls"]),
    )


def _instruments(pi: PricingFunctional, market: FiniteMarket) -> tuple[np.ndarray, np.ndarray]:
    """Payoff matrix (bond row first, then calls) and the price vector."""
    f = market.underlying
    rows = [np.ones(market.n_states)]
    for k in pi.strikes:
        rows.append(np.maximum(f - k, 0.0))
    return np.vstack(rows), np.array([pi.bond_price, *pi.call_prices])


def _portfolio_from_weights(
    pi: PricingFunctional, z: np.ndarray, drop_tol: float = 1e-12
) -> OptionPortfolio:
    cash = float(z[0])
    legs = tuple(
        (k, float(w)) for k, w in zip(pi.strikes, z[1:]) if abs(w) > drop_tol
    )
    if abs(cash) <= drop_tol:
        cash = 0.0
    return OptionPortfolio(cash, legs)


def portfolio_price(pi: PricingFunctional, port: OptionPortfolio) -> float:
    """Price of a portfolio whose strikes all lie in the quoted set."""
    quotes = dict(pi.call_curve)
    total = port.cash * pi.bond_price
    for k, w in port.legs:
        if k not in quotes:
            raise InvalidPricing(f"no quote for strike {k!r}")
        total += w * quotes[k]
    return float(total)


@dataclass(frozen=True)
class PositivityResult:
    positive: bool
    violator: OptionPortfolio | None = None
    violator_price: float | None = None


def check_positivity(pi: PricingFunctional, market: FiniteMarket) -> PositivityResult:
    """Search for a nonnegative-payoff portfolio with negative price.

    Portfolios range over cash plus legs at the quoted strikes, boxed to
    [-1, 1] per position so the scale-invariant search stays bounded.  A
    violating portfolio is returned as the certificate.
    """
    B, prices = _instruments(pi, market)
    m, n = B.shape
    A_pay = np.hstack([B.T, -np.eye(n), np.zeros((n, m))])
    A_box = np.hstack([np.eye(m), np.zeros((m, n)), np.eye(m)])
    A = np.vstack([A_pay, A_box])
    b = np.concatenate([np.zeros(n), np.ones(m)])
    c = np.concatenate([prices, np.zeros(n + m)])
    lb = np.concatenate([np.full(m, -1.0), np.zeros(n + m)])
    res = solve(LinearProgram(c, A, b, lb, maximize=False))
    if res.status != "optimal":
        raise NumericalDegeneracy(f"positivity search returned {res.status}")
    price_scale = max(1.0, float(np.max(np.abs(prices))))
    if res.value < -1e-9 * price_scale:
        port = _portfolio_from_weights(pi, res.x[:m])
        return PositivityResult(False, port, portfolio_price(pi, port))
    return PositivityResult(True)


@dataclass(frozen=True)
class FreeLunchCertificate:
    """An element of (zero-price portfolios minus nonnegative claims) that is
    itself nonnegative and nonzero.

    ``portfolio`` has price ~0 (or negative in the unconverted corner case),
    ``claim`` is its nonnegative payoff, and ``slack`` the nonnegative claim
    subtracted from the portfolio payoff (zero here, since the payoff itself
    is already nonnegative).
    """

    portfolio: OptionPortfolio
    price: float
    claim: Claim
    slack: Claim
    kind: str


@dataclass(frozen=True)
class NFLResult:
    """no-free-lunch verdict.

    ``nfl`` true comes with a strictly positive witness density and the
    scalar that reproduces the quotes; false comes with a free-lunch
    certificate.  ``margin`` is the maximized strict-positivity slack of the
    separating LP.
    """

    nfl: bool
    witness: StatePriceDensity | None
    scale: float | None
    margin: float
    certificate: FreeLunchCertificate | None


def _free_lunch_certificate(
    pi: PricingFunctional, market: FiniteMarket, B: np.ndarray, prices: np.ndarray
) -> FreeLunchCertificate:
    m, n = B.shape
    payoff_scale = max(1.0, float(np.max(market.underlying)))
    # First look for a zero-price portfolio with nonnegative, nonzero payoff.
    A_pay = np.hstack([B.T, -np.eye(n), np.zeros((n, m))])
    A_box = np.hstack([np.eye(m), np.zeros((m, n)), np.eye(m)])
    A_price = np.hstack([prices.reshape(1, -1), np.zeros((1, n + m))])
    A = np.vstack([A_pay, A_box, A_price])
    b = np.concatenate([np.zeros(n), np.ones(m), [0.0]])
    c = np.concatenate([np.zeros(m), np.ones(n), np.zeros(m)])
    lb = np.concatenate([np.full(m, -1.0), np.zeros(n + m)])
    res = solve(LinearProgram(c, A, b, lb, maximize=True))
    zeros = Claim(np.zeros(n))
    if res.status == "optimal" and res.value > CERT_TOL * payoff_scale:
        port = _portfolio_from_weights(pi, res.x[:m])
        pay = payoff(port, market)
        return FreeLunchCertificate(
            portfolio=port,
            price=portfolio_price(pi, port),
            claim=Claim(np.maximum(pay.payoffs, 0.0)),
            slack=zeros,
            kind="zero-price",
        )
    # Otherwise hunt for a negative-price nonnegative payoff and shift it
    # into the zero-price kernel with a positively priced instrument.
    pos = check_positivity(pi, market)
    if not pos.positive:
        port = pos.violator
        port_price = pos.violator_price
        convert_idx = -1
        fmax = float(np.max(market.underlying))
        for idx in range(m):
            if prices[idx] > 1e-12 and (idx == 0 or pi.strikes[idx - 1] < fmax):
                convert_idx = idx
                break
        if convert_idx >= 0:
            if convert_idx == 0:
                instrument = OptionPortfolio(1.0, ())
            else:
                instrument = OptionPortfolio(
                    0.0, ((pi.strikes[convert_idx - 1], 1.0),)
                )
            mult = -port_price / float(prices[convert_idx])
            port = combine(port, scale_portfolio(instrument, mult))
            pay = payoff(port, market)
            return FreeLunchCertificate(
                portfolio=port,
                price=portfolio_price(pi, port),
                claim=Claim(np.maximum(pay.payoffs, 0.0)),
                slack=zeros,
                kind="negative-price",
            )
        pay = payoff(port, market)
        return FreeLunchCertificate(
            portfolio=port,
            price=port_price,
            claim=Claim(np.maximum(pay.payoffs, 0.0)),
            slack=zeros,
            kind="negative-price-unconverted",
        )
    raise NumericalDegeneracy(
        "no strictly positive consistent density exists, yet no arbitrage "
        "portfolio was found; the inputs sit on a degenerate boundary"
    )


def no_free_lunch(pi: PricingFunctional, market: FiniteMarket) -> NFLResult:
    """Decide no-free-lunch by maximizing the strict-positivity margin.

    In mass coordinates u_i = scale * y_i * p_i the consistency requirement
    is linear: instrument payoffs dotted with u must equal their prices.
    The LP maximizes eps subject to u_i >= p_i * eps, so a positive optimum
    yields a strictly positive density repricing the curve, and a
    nonpositive one is turned into an explicit free-lunch certificate.
    """
    B, prices = _instruments(pi, market)
    m, n = B.shape
    price_scale = float(np.max(np.abs(prices)))
    if price_scale == 0.0:
        raise DegeneratePi(
            "every quoted price is zero; the functional vanishes on the option space"
        )
    p = market.probs
    A_ins = np.hstack([B, np.zeros((m, 1)), np.zeros((m, n))])
    A_strict = np.hstack([np.eye(n), -p.reshape(-1, 1), -np.eye(n)])
    A = np.vstack([A_ins, A_strict])
    b = np.concatenate([prices, np.zeros(n)])
    c = np.zeros(2 * n + 1)
    c[n] = 1.0
    lb = np.concatenate([np.zeros(n), [-np.inf], np.zeros(n)])
    res = solve(LinearProgram(c, A, b, lb, maximize=True))
    threshold = STRICT_MARGIN_TOL * max(1.0, price_scale)
    if res.status == "optimal" and res.value > threshold:
        u = np.maximum(res.x[:n], 0.0)
        bond = pi.bond_price
        witness = StatePriceDensity(u / (p * bond))
        return NFLResult(True, witness, float(bond), float(res.value), None)
    margin = float(res.value) if res.status == "optimal" else float("-inf")
    certificate = _free_lunch_certificate(pi, market, B, prices)
    return NFLResult(False, None, None, margin, certificate)


@dataclass(frozen=True)
class PriceBounds:
    """Consistent-price interval for a claim.

    ``p_min`` and ``p_max`` are the closed-set LP values (densities >= 0),
    which carry the limits of the strictly positive regime; the delta bounds
    re-solve over densities >= delta and supply the strictly positive
    certificates.  ``unique`` is judged on the closed bounds.
    """

    p_min: float
    p_max: float
    lower_certificate: StatePriceDensity
    upper_certificate: StatePriceDensity
    unique: bool
    delta: float
    delta_p_min: float
    delta_p_max: float
    scale: float
    lp_status: str = "optimal"


def price_bounds(
    g: Claim,
    pi: PricingFunctional,
    market: FiniteMarket,
    nfl: NFLResult | None = None,
    delta: float | None = None,
) -> PriceBounds:
    """Extremal consistent prices of a claim via two linear programs."""
    x = check_claim(g, market)
    if nfl is None:
        nfl = no_free_lunch(pi, market)
    if not nfl.nfl:
        raise FreeLunchPresent(
            "the pricing inputs admit a free lunch; consistent prices do not exist"
        )
    B, prices = _instruments(pi, market)
    m, n = B.shape
    p = market.probs
    bond = pi.bond_price
    closed_lb = np.zeros(n)
    lo = solve(LinearProgram(x, B, prices, closed_lb, maximize=False))
    hi = solve(LinearProgram(x, B, prices, closed_lb, maximize=True))
    if lo.status != "optimal" or hi.status != "optimal":
        raise NumericalDegeneracy(
            f"price-bound solves returned {lo.status}/{hi.status}"
        )
    p_min, p_max = float(lo.value), float(hi.value)
    y_margin = float(np.min(nfl.witness.weights))
    if delta is None:
        delta = DEFAULT_DELTA_SCALE / float(np.min(p))
    delta_eff = min(float(delta), 0.5 * y_margin)
    strict_lb = delta_eff * bond * p
    dlo = solve(LinearProgram(x, B, prices, strict_lb, maximize=False))
    dhi = solve(LinearProgram(x, B, prices, strict_lb, maximize=True))
    if dlo.status != "optimal" or dhi.status != "optimal":
        # Fall back to the witness itself; it is strictly positive and
        # consistent, so it certifies one interior price.
        u_w = nfl.witness.weights * p * bond
        wprice = float(np.dot(x, u_w))
        lower_cert = upper_cert = nfl.witness
        delta_p_min = delta_p_max = wprice
        lp_status = "optimal;delta-fallback"
    else:
        lower_cert = StatePriceDensity(np.maximum(dlo.x, strict_lb) / (p * bond))
        upper_cert = StatePriceDensity(np.maximum(dhi.x, strict_lb) / (p * bond))
        delta_p_min, delta_p_max = float(dlo.value), float(dhi.value)
        lp_status = "optimal"
    unique = (p_max - p_min) < UNIQUE_RTOL * max(1.0, abs(p_max))
    return PriceBounds(
        p_min=p_min,
        p_max=p_max,
        lower_certificate=lower_cert,
        upper_certificate=upper_cert,
        unique=unique,
        delta=delta_eff,
        delta_p_min=delta_p_min,
        delta_p_max=delta_p_max,
        scale=float(bond),
        lp_status=lp_status,
    )


def extend_by_arbitrage(
    g: Claim, pi: PricingFunctional, market: FiniteMarket
) -> float:
    """The single consistent price of a claim written on the underlying.

    Requires no free lunch and a claim measurable with respect to the
    underlying's level sets; raises when the consistent prices span a gap,
    which happens when the quoted strikes do not pin the density down on
    every level set the claim charges.
    """
    x = check_claim(g, market)
    nfl = no_free_lunch(pi, market)
    if not nfl.nfl:
        raise FreeLunchPresent("cannot extend prices in the presence of a free lunch")
    if not is_measurable(g, sigma_of(market)):
        raise NotMeasurable("the claim is not a function of the underlying")
    bounds = price_bounds(g, pi, market, nfl=nfl)
    if not bounds.unique:
        gap = bounds.p_max - bounds.p_min
        raise NotDeterminedByArbitrage(
            f"consistent prices span [{bounds.p_min!r}, {bounds.p_max!r}] "
            f"(gap {gap:.3e}); the quoted strikes leave a free density direction"
        )
    u_w = nfl.witness.weights * market.probs * nfl.scale
    return float(np.dot(x, u_w))
