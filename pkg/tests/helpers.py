"""Shared random generators for the test suite.

Markets come in two flavors.  Dyadic markets place the underlying on a
binary-fraction grid so saturated call spreads evaluate exactly in floating
point; they back the tests that assert exact equalities.  Grid markets snap
continuous draws to a coarse decimal grid, which keeps level gaps bounded
away from zero so ladder weights stay well conditioned.
"""

from __future__ import annotations

import numpy as np

from optionspan import Claim, build_market, sigma_of


def random_probs(rng, n):
    p = rng.uniform(0.5, 1.5, n)
    return p / p.sum()


def dyadic_market(rng, n_min=2, n_max=64, denom_exp=3, max_value=16, force_tie=False):
    n = int(rng.integers(n_min, n_max + 1))
    denom = 2**denom_exp
    vals = rng.integers(0, max_value * denom + 1, size=n).astype(float) / denom
    vals = _apply_tie(rng, vals, force_tie)
    return build_market(random_probs(rng, n), vals)


def grid_market(rng, n_min=2, n_max=64, step=1e-3, max_value=16.0, force_tie=False):
    n = int(rng.integers(n_min, n_max + 1))
    vals = np.round(rng.uniform(0.0, max_value, n) / step) * step
    vals = _apply_tie(rng, vals, force_tie)
    return build_market(random_probs(rng, n), vals)


def _apply_tie(rng, vals, force_tie):
    n = len(vals)
    if force_tie and n >= 2 and len(np.unique(vals)) == n:
        i, j = rng.choice(n, size=2, replace=False)
        vals[i] = vals[j]
    return vals


def measurable_claim(rng, market, lo=-4.0, hi=4.0, dyadic=False, nonnegative=False):
    """Random claim constant on the underlying's level sets."""
    part = sigma_of(market)
    if dyadic:
        cell_vals = rng.integers(0 if nonnegative else -32, 33, part.n_cells) / 8.0
    else:
        cell_vals = rng.uniform(0.0 if nonnegative else lo, hi, part.n_cells)
    out = np.empty(market.n_states)
    for ci, cell in enumerate(part.cells):
        out[list(cell)] = cell_vals[ci]
    return Claim(out)


def nonmeasurable_claim(rng, market, bump=1.0):
    """Random claim that varies on some multi-state level set.

    The market must have a tie in the underlying.
    """
    part = sigma_of(market)
    wide = [c for c in part.cells if len(c) >= 2]
    assert wide, "market has no tied level set"
    base = measurable_claim(rng, market)
    out = base.payoffs.copy()
    cell = wide[int(rng.integers(len(wide)))]
    out[cell[1]] += bump * float(rng.uniform(0.5, 1.5))
    return Claim(out)


def consistent_pricing(rng, market, strikes, scale=1.0):
    """Prices generated from a strictly positive density (so NFL holds).

    Returns (pricing dict values, density) with bond and call prices equal
    to expectations under the density.
    """
    from optionspan import PricingFunctional

    n = market.n_states
    y = rng.uniform(0.1, 3.0, n) * scale
    p = market.probs
    f = market.underlying
    bond = float(np.dot(y * p, np.ones(n)))
    calls = []
    for k in strikes:
        calls.append((float(k), float(np.dot(y * p, np.maximum(f - k, 0.0)))))
    return PricingFunctional(bond, tuple(calls)), y


def interior_strikes(market):
    """All distinct underlying values except the largest."""
    values = np.unique(market.underlying)
    return [float(v) for v in values[:-1]]
