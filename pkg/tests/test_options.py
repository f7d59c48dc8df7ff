import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from optionspan import (
    Claim,
    OptionPortfolio,
    build_market,
    call,
    combine,
    is_in_span,
    is_measurable,
    payoff,
    portfolio_from_dict,
    portfolio_to_dict,
    put,
    sigma_of,
    z_identity_check,
    z_identity_report,
)

from helpers import grid_market


def demo_market():
    return build_market([1 / 3] * 3, [0, 1, 2])


def test_payoff_underlying_leg():
    m = demo_market()
    port = OptionPortfolio(0.0, ((0.0, 1.0),))
    assert np.array_equal(payoff(port, m).payoffs, [0, 1, 2])


def test_payoff_abs_deviation():
    m = demo_market()
    port = OptionPortfolio(1.0, ((0.0, -1.0), (1.0, 2.0)))
    assert np.array_equal(payoff(port, m).payoffs, [1, 0, 1])


def test_payoff_cash_only():
    m = demo_market()
    assert np.array_equal(payoff(OptionPortfolio(2.5), m).payoffs, [2.5] * 3)


def test_duplicate_strikes_merge():
    port = OptionPortfolio(0.0, ((1.0, 2.0), (1.0, 3.0), (0.5, 1.0)))
    assert port.legs == ((0.5, 1.0), (1.0, 5.0))


def test_zero_weight_legs_drop():
    port = OptionPortfolio(1.0, ((1.0, 2.0), (1.0, -2.0)))
    assert port.legs == ()


def test_put_parity_values():
    m = demo_market()
    assert np.array_equal(payoff(put(1.0), m).payoffs, [1, 0, 0])
    assert np.array_equal(payoff(put(0.0), m).payoffs, [0, 0, 0])
    assert np.array_equal(payoff(put(3.0), m).payoffs, [3, 2, 1])


def test_put_parity_random_markets():
    rng = np.random.default_rng(2)
    for _ in range(20):
        m = grid_market(rng, n_max=16)
        k = float(rng.uniform(-1, np.max(m.underlying) + 1))
        lhs = payoff(put(k), m).payoffs
        rhs = np.maximum(k - m.underlying, 0.0)
        assert np.allclose(lhs, rhs, atol=1e-12)
        # parity: put + underlying - call = k * ones
        parity = (
            payoff(put(k), m).payoffs
            + m.underlying
            - payoff(call(k), m).payoffs
        )
        assert np.allclose(parity, k, atol=1e-12)


def test_is_in_span_with_portfolio():
    m = demo_market()
    res = is_in_span(Claim([0, 1, 4]), m)
    assert res.member
    assert np.array_equal(payoff(res.portfolio, m).payoffs, [0, 1, 4])


def test_is_in_span_certificate():
    m = build_market([0.25] * 4, [0, 1, 1, 2])
    res = is_in_span(Claim([0, 1, 2, 2]), m)
    assert not res.member
    i, j = res.certificate
    assert {i, j} <= set(res.cell)
    assert m.underlying[i] == m.underlying[j]
    assert Claim([0, 1, 2, 2]).payoffs[i] != Claim([0, 1, 2, 2]).payoffs[j]


def test_is_in_span_ones():
    m = demo_market()
    res = is_in_span(m.ones(), m)
    assert res.member
    assert res.portfolio.cash == 1.0
    assert res.portfolio.legs == ()


def test_is_in_span_agrees_with_measurability():
    rng = np.random.default_rng(3)
    for _ in range(40):
        m = grid_market(rng, n_max=12, force_tie=True)
        g = Claim(rng.uniform(-3, 3, m.n_states))
        assert is_in_span(g, m).member == is_measurable(g, sigma_of(m))


def test_z_identity_default_strikes():
    m = demo_market()
    assert z_identity_check(m, [-1.0, 0.0, 0.5, 1.0, 2.0])


def test_z_identity_half_strike_value():
    m = demo_market()
    f = m.underlying
    lhs = np.maximum(f - 0.5 * (f + 1.0), 0.0)
    assert np.array_equal(lhs, [0, 0, 0.5])
    report = z_identity_report(m, [0.5])
    assert report.passed
    assert report.witnesses[0]["max_error"] == 0.0


def test_z_identity_k_at_least_one_vanishes():
    rng = np.random.default_rng(4)
    for _ in range(10):
        m = grid_market(rng, n_max=16)
        report = z_identity_report(m, [1.0, 1.5, 7.0])
        assert report.passed
        for wit in report.witnesses:
            assert wit["case"] == "vanishes"


def test_z_identity_k_zero_is_underlying():
    m = demo_market()
    f = m.underlying
    assert np.array_equal(np.maximum(f - 0.0 * (f + 1.0), 0.0), f)
    assert z_identity_check(m, [0.0])


def test_random_portfolio_payoffs_measurable():
    rng = np.random.default_rng(5)
    for _ in range(30):
        m = grid_market(rng, n_max=12, force_tie=True)
        legs = tuple(
            (float(rng.uniform(-1, np.max(m.underlying))), float(rng.uniform(-2, 2)))
            for _ in range(int(rng.integers(0, 5)))
        )
        port = OptionPortfolio(float(rng.uniform(-2, 2)), legs)
        pay = payoff(port, m)
        assert is_measurable(pay, sigma_of(m))
        assert is_in_span(pay, m).member


def test_butterfly_payoff_nonnegative():
    rng = np.random.default_rng(6)
    for _ in range(30):
        m = grid_market(rng, n_max=16)
        k1 = float(rng.uniform(0, np.max(m.underlying)))
        half = float(rng.uniform(0.1, 2.0))
        k2, k3 = k1 + half, k1 + 2 * half
        butterfly = OptionPortfolio(0.0, ((k1, 1.0), (k2, -2.0), (k3, 1.0)))
        assert np.all(payoff(butterfly, m).payoffs >= -1e-12)


def test_lattice_min_max_of_payoffs_stay_in_span():
    rng = np.random.default_rng(7)
    for _ in range(20):
        m = grid_market(rng, n_max=10, force_tie=True)
        ports = []
        for _ in range(2):
            legs = tuple(
                (float(rng.uniform(0, np.max(m.underlying))), float(rng.uniform(-2, 2)))
                for _ in range(2)
            )
            ports.append(OptionPortfolio(float(rng.uniform(-1, 1)), legs))
        a = payoff(ports[0], m).payoffs
        b = payoff(ports[1], m).payoffs
        for vec in (np.minimum(a, b), np.maximum(a, b)):
            claim = Claim(vec)
            assert is_measurable(claim, sigma_of(m))
            assert is_in_span(claim, m).member


def test_combine_and_scale():
    m = demo_market()
    p1 = call(0.0)
    p2 = put(1.0)
    both = combine(p1, p2)
    assert np.allclose(
        payoff(both, m).payoffs,
        payoff(p1, m).payoffs + payoff(p2, m).payoffs,
        atol=1e-15,
    )


def test_portfolio_json_round_trip():
    port = OptionPortfolio(1.5, ((0.0, -1.0), (2.0, 3.0)))
    d = portfolio_to_dict(port)
    assert d == {
        "cash": 1.5,
        "legs": [
            {"strike": 0.0, "weight": -1.0},
            {"strike": 2.0, "weight": 3.0},
        ],
    }
    assert portfolio_from_dict(d) == port


@settings(deadline=None, max_examples=50)
@given(
    st.lists(st.floats(min_value=0, max_value=8), min_size=2, max_size=6),
    st.floats(min_value=-1, max_value=9),
)
def test_call_spread_dominates_indicator(values, r):
    n = len(values)
    m = build_market(np.full(n, 1.0 / n), values)
    spread = OptionPortfolio(0.0, ((r, 4.0), (r + 0.25, -4.0)))
    pay = payoff(spread, m).payoffs
    indicator = (m.underlying >= r + 0.25).astype(float)
    assert np.all(pay >= indicator - 1e-12)
    assert np.all(pay <= 1.0 + 1e-12)
