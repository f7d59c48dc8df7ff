import numpy as np
import pytest

from optionspan import (
    Claim,
    InvalidN,
    NegativeTarget,
    NormSpec,
    NotMeasurable,
    build_market,
    completion_demo,
    conditional_expectation,
    default_bank,
    exact_replicate,
    indicator_ladder,
    is_measurable,
    ladder_sequence,
    payoff,
    sigma_of,
    simple_ladder,
)
from optionspan.replication import underlying_levels

from helpers import dyadic_market, grid_market, measurable_claim, nonmeasurable_claim


def demo_market():
    return build_market([1 / 3] * 3, [0, 1, 2])


def test_indicator_ladder_examples():
    m = demo_market()
    assert np.array_equal(payoff(indicator_ladder(0.5, 2), m).payoffs, [0, 1, 1])
    assert np.array_equal(payoff(indicator_ladder(0.5, 1), m).payoffs, [0, 0.5, 1])
    assert np.array_equal(payoff(indicator_ladder(5.0, 4), m).payoffs, [0, 0, 0])


def test_indicator_ladder_rejects_small_n():
    with pytest.raises(InvalidN):
        indicator_ladder(0.5, 0)


def test_indicator_ladder_monotone_and_saturating():
    rng = np.random.default_rng(0)
    for _ in range(25):
        m = dyadic_market(rng, n_max=24, force_tie=True)
        f = m.underlying
        r = float(rng.integers(-2, 18 * 8) / 8.0)
        above = f[f > r]
        chi = (f > r).astype(float)
        prev = None
        for exp in range(0, 13):
            n = 2**exp
            pay = payoff(indicator_ladder(r, n), m).payoffs
            if prev is not None:
                assert np.all(pay >= prev)
            prev = pay
            if len(above) and n > 1.0 / (above.min() - r):
                assert np.array_equal(pay, chi)
            if not len(above):
                assert np.array_equal(pay, np.zeros_like(f))


def test_call_spread_min_identity():
    rng = np.random.default_rng(1)
    for _ in range(25):
        m = grid_market(rng, n_max=24)
        f = m.underlying
        r = float(rng.uniform(-1, np.max(f)))
        for n in (1, 3, 7, 16):
            spread = payoff(indicator_ladder(r, n), m).payoffs
            direct = np.minimum(n * np.maximum(f - r, 0.0), 1.0)
            assert np.max(np.abs(spread - direct)) <= 1e-12


def test_simple_ladder_indicator_target_exact():
    m = demo_market()
    target = Claim([0, 1, 1])
    for n in (1, 2, 3, 4):
        pay = payoff(simple_ladder(target, m, n), m).payoffs
        assert np.array_equal(pay, target.payoffs)


def test_simple_ladder_zero_target():
    m = demo_market()
    port = simple_ladder(Claim([0, 0, 0]), m, 3)
    assert port.cash == 0.0 and port.legs == ()


def test_simple_ladder_identity_staircase():
    # Dyadic staircase under h(t) = t: error <= 2^-n, zero once the grid
    # resolves the values exactly.
    m = build_market([0.25] * 4, [0.0, 0.75, 1.5, 3.25])
    target = m.underlying_claim()
    prev_err = np.inf
    for n in range(1, 8):
        pay = payoff(simple_ladder(target, m, n), m).payoffs
        err = float(np.max(np.abs(pay - target.payoffs)))
        assert err <= 2.0**-n + 1e-12
        assert err <= prev_err + 1e-15
        prev_err = err
    assert prev_err == 0.0  # values are quarter multiples, resolved at n=2


def test_simple_ladder_payoffs_increase_with_n():
    rng = np.random.default_rng(2)
    for _ in range(15):
        m = dyadic_market(rng, n_max=16, force_tie=True)
        target = measurable_claim(rng, m, dyadic=True, nonnegative=True)
        prev = None
        for n in (1, 2, 4, 8, 16, 32):
            pay = payoff(simple_ladder(target, m, n), m).payoffs
            assert np.all(pay <= target.payoffs + 1e-12)
            if prev is not None:
                assert np.all(pay >= prev - 1e-12)
            prev = pay


def test_simple_ladder_requires_measurable_nonnegative():
    m = build_market([0.25] * 4, [0, 1, 1, 2])
    with pytest.raises(NotMeasurable):
        simple_ladder(Claim([0, 1, 2, 2]), m, 2)
    with pytest.raises(NegativeTarget):
        simple_ladder(Claim([0, -1, -1, 2]), m, 2)
    with pytest.raises(InvalidN):
        simple_ladder(Claim([0, 1, 1, 2]), m, 0)


def test_exact_replicate_square():
    m = demo_market()
    port = exact_replicate(Claim([0, 1, 4]), m)
    assert port.cash == 0.0
    assert port.legs == ((0.0, 1.0), (1.0, 2.0))
    assert np.array_equal(payoff(port, m).payoffs, [0, 1, 4])


def test_exact_replicate_ones():
    m = demo_market()
    port = exact_replicate(m.ones(), m)
    assert port.cash == 1.0 and port.legs == ()


def test_exact_replicate_with_ties():
    m = build_market([0.25] * 4, [0, 1, 1, 2])
    port = exact_replicate(Claim([5, 3, 3, 9]), m)
    assert port.cash == 5.0
    assert port.legs == ((0.0, -2.0), (1.0, 8.0))
    assert np.array_equal(payoff(port, m).payoffs, [5, 3, 3, 9])


def test_exact_replicate_strikes_subset_of_levels():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = grid_market(rng, n_max=24, force_tie=True)
        target = measurable_claim(rng, m)
        port = exact_replicate(target, m)
        values, _, _ = underlying_levels(m)
        for k, _w in port.legs:
            assert k in values[:-1] if len(values) > 1 else False
        err = np.max(np.abs(payoff(port, m).payoffs - target.payoffs))
        assert err <= 1e-10


def test_exact_replicate_rejects_nonmeasurable():
    m = build_market([0.25] * 4, [0, 1, 1, 2])
    with pytest.raises(NotMeasurable):
        exact_replicate(Claim([0, 1, 2, 2]), m)


def test_ladder_sequence_signed_target():
    rng = np.random.default_rng(4)
    m = dyadic_market(rng, n_max=12, force_tie=True)
    target = measurable_claim(rng, m, dyadic=True)  # signed values
    ports = ladder_sequence(target, m, range(1, 41))
    final = payoff(ports[-1], m).payoffs
    assert np.max(np.abs(final - target.payoffs)) <= 1e-9


def test_completion_demo_injective_underlying():
    m = build_market([1 / 3] * 3, [0, 1, 2])
    rng = np.random.default_rng(5)
    targets = [Claim(rng.uniform(-2, 2, 3)) for _ in range(3)]
    entries = completion_demo(m, targets, n_values=range(1, 45))
    for entry in entries:
        assert entry.replicable
        assert entry.report.converged["sup"]


def test_completion_demo_constant_underlying():
    m = build_market([0.5, 0.5], [2, 2])
    entries = completion_demo(m, [m.ones(), Claim([1, 2])], n_values=range(1, 10))
    assert entries[0].replicable
    assert not entries[1].replicable


def test_completion_demo_projection():
    m = build_market([0.25] * 4, [0, 1, 1, 2])
    target = Claim([0, 1, 2, 2])
    entries = completion_demo(m, [target], n_values=range(1, 30))
    entry = entries[0]
    assert not entry.replicable
    assert np.allclose(entry.projection.payoffs, [0, 1.5, 1.5, 2], atol=1e-12)
    # The report measures distance to the original target, so it plateaus.
    assert not entry.report.converged["sup"]
    assert entry.report.rows[-1].sup_err == pytest.approx(0.5, abs=1e-9)


def test_ladder_report_errors_nonincreasing():
    rng = np.random.default_rng(6)
    m = dyadic_market(rng, n_max=12, force_tie=True)
    target = measurable_claim(rng, m, dyadic=True, nonnegative=True)
    ns = list(range(1, 25))
    ports = ladder_sequence(target, m, ns)
    bank = default_bank(m)
    sups = [float(np.max(np.abs(payoff(p, m).payoffs - target.payoffs))) for p in ports]
    cap = float(np.max(target.payoffs)) if np.max(target.payoffs) > 0 else 1.0
    for n, err in zip(ns, sups):
        assert err <= 2.0**-n * max(1.0, cap) + 1e-12
    for a, b in zip(sups, sups[1:]):
        assert b <= a + 1e-15
    assert bank is not None


def test_equivalence_triad_random_claims():
    rng = np.random.default_rng(7)
    norms = [NormSpec.lp(1), NormSpec.linf()]
    for _ in range(25):
        m = grid_market(rng, n_max=10, force_tie=True)
        bank = default_bank(m, seed=11)
        part = sigma_of(m)
        g = measurable_claim(rng, m) if rng.random() < 0.5 else nonmeasurable_claim(rng, m)
        measurable = is_measurable(g, part)
        ladder_target = g if measurable else conditional_expectation(g, part, m)
        ns = list(range(1, 36))
        seq = [payoff(p, m) for p in ladder_sequence(ladder_target, m, ns)]
        from optionspan import convergence_report

        report = convergence_report(seq, g, m, norms, bank, steps=ns)
        assert report.converged["sup"] == measurable
        assert report.converged["pairing"] == measurable
        assert report.converged["L1"] == measurable
