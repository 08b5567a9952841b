"""
Tests for the model core service
"""
import numpy as np
import pytest
from pydantic import ValidationError

from stabilab.exceptions import EmptyHorizon, InvalidParameters, NonStationary, Uncontrollable
from stabilab.schemas import (
    CobwebParams,
    CobwebRegime,
    FeedbackClass,
    PegRule,
    PIDRule,
    PrivateCase,
    PrivateSector,
    ProportionalRule,
    StabilityClass,
    Transmission,
)
from stabilab.services.model_core import (
    ar1_variance,
    classify,
    cobweb_regime,
    cobweb_simulate,
    compose_private,
    discretion_condition,
    negative_feedback_interval,
    private_sector_case,
    rules_condition,
    simulate_trajectory,
    stability_of,
)


# ============================================
# Composition
# ============================================

def test_compose_private_without_feedback():
    ps = PrivateSector(a_prime=0.5, b_prime=0.4, f_prime=0.0)
    assert compose_private(ps) == 0.5
    assert private_sector_case(ps) is PrivateCase.STATIONARY_PERSISTENCE


def test_compose_private_cancelling_feedback():
    ps = PrivateSector(a_prime=0.9, b_prime=1.0, f_prime=-0.9)
    assert compose_private(ps) == 0.0
    assert private_sector_case(ps) is PrivateCase.ZERO_PERSISTENCE


def test_compose_private_amplifying_feedback():
    ps = PrivateSector(a_prime=0.5, b_prime=0.4, f_prime=1.5)
    assert compose_private(ps) == pytest.approx(1.1)
    assert private_sector_case(ps) is PrivateCase.NON_STATIONARY


def test_private_sector_rejects_zero_slope():
    with pytest.raises(ValidationError):
        PrivateSector(a_prime=0.5, b_prime=0.0, f_prime=1.0)


# ============================================
# Classification
# ============================================

def test_classify_negative_feedback():
    loop = classify(Transmission(a=0.8, b=-0.5), ProportionalRule(f=0.4))
    assert loop.lam == pytest.approx(0.6)
    assert loop.feedback_class is FeedbackClass.NEGATIVE
    assert loop.stability_class is StabilityClass.STATIONARY
    assert loop.stabilizing_negative_feedback


def test_classify_peg():
    loop = classify(Transmission(a=0.8, b=-0.5), PegRule())
    assert loop.lam == 0.8
    assert loop.feedback_class is FeedbackClass.NONE
    assert loop.stability_class is StabilityClass.STATIONARY
    assert not loop.stabilizing_negative_feedback


def test_classify_negative_feedback_can_still_explode():
    loop = classify(Transmission(a=2.0, b=-0.5), ProportionalRule(f=1.6))
    assert loop.lam == pytest.approx(1.2)
    assert loop.feedback_class is FeedbackClass.NEGATIVE
    assert loop.stability_class is StabilityClass.EXPLOSIVE
    assert not loop.stabilizing_negative_feedback


def test_classify_positive_feedback():
    loop = classify(Transmission(a=0.3, b=0.5), ProportionalRule(f=0.4))
    assert loop.lam == pytest.approx(0.5)
    assert loop.feedback_class is FeedbackClass.POSITIVE
    assert loop.stability_class is StabilityClass.STATIONARY


def test_classify_overshooting():
    loop = classify(Transmission(a=0.8, b=-0.5), ProportionalRule(f=4.0))
    assert loop.lam == pytest.approx(-1.2)
    assert loop.feedback_class is FeedbackClass.OVERSHOOTING
    assert loop.stability_class is StabilityClass.EXPLOSIVE


def test_classify_rejects_pid():
    with pytest.raises(InvalidParameters):
        classify(Transmission(a=0.8, b=-0.5), PIDRule(fp=0.4, fi=0.1))


def test_stability_of_knife_edges():
    assert stability_of(0.0) is StabilityClass.ZERO_PERSISTENCE
    assert stability_of(1.0) is StabilityClass.UNIT_ROOT
    assert stability_of(-1.0) is StabilityClass.UNIT_ROOT
    assert stability_of(0.999) is StabilityClass.STATIONARY
    assert stability_of(-1.001) is StabilityClass.EXPLOSIVE


def test_rules_and_discretion_conditions():
    assert rules_condition(Transmission(a=0.8, b=-0.5))
    assert not rules_condition(Transmission(a=1.2, b=-0.5))
    # a static economy gains nothing from feedback
    assert not discretion_condition(Transmission(a=0.0, b=-0.5), 1.0)
    assert discretion_condition(Transmission(a=1.2, b=-0.5), 0.8)
    assert not discretion_condition(Transmission(a=1.2, b=-0.5), 0.2)


def test_negative_feedback_interval_stationary_open_loop():
    interval = negative_feedback_interval(Transmission(a=0.8, b=-0.5))
    assert interval.low == pytest.approx(0.0)
    assert interval.high == pytest.approx(1.6)
    assert interval.contains(0.4)
    assert interval.contains(1.6)
    assert not interval.contains(0.0)
    assert not interval.contains(1.7)


def test_negative_feedback_interval_explosive_open_loop():
    tr = Transmission(a=1.2, b=-0.5)
    interval = negative_feedback_interval(tr)
    assert interval.low == pytest.approx(0.4)
    assert interval.high == pytest.approx(2.4)
    for f in np.linspace(0.41, 2.39, 25):
        assert interval.contains(f)
        assert discretion_condition(tr, f)


def test_negative_feedback_interval_edge_cases():
    assert negative_feedback_interval(Transmission(a=0.0, b=-0.5)).empty
    with pytest.raises(Uncontrollable):
        negative_feedback_interval(Transmission(a=0.8, b=0.0))


# ============================================
# Simulation
# ============================================

def test_simulate_noise_free_proportional():
    traj = simulate_trajectory(Transmission(a=0.8, b=-0.5), ProportionalRule(f=0.4), pi0=1.0, horizon=3)
    np.testing.assert_allclose(traj.pi, [1.0, 0.6, 0.36, 0.216], rtol=1e-12)
    np.testing.assert_allclose(traj.i, 0.4 * traj.pi, rtol=1e-12)
    assert traj.horizon == 3


def test_simulate_noise_free_follows_closed_loop_power():
    traj = simulate_trajectory(Transmission(a=0.8, b=-0.5), ProportionalRule(f=0.4), pi0=2.0, horizon=100)
    np.testing.assert_allclose(traj.pi, 2.0 * 0.6 ** np.arange(101), rtol=1e-12, atol=1e-300)


def test_simulate_peg_at_rest_stays_at_rest():
    traj = simulate_trajectory(Transmission(a=0.8, b=-0.5), PegRule(), pi0=0.0, horizon=10)
    assert np.all(traj.pi == 0.0)
    assert np.all(traj.i == 0.0)


def test_simulate_rejects_empty_horizon():
    with pytest.raises(EmptyHorizon):
        simulate_trajectory(Transmission(a=0.8, b=-0.5), PegRule(), pi0=1.0, horizon=0)


def test_simulate_reproducible_by_seed():
    tr = Transmission(a=0.8, b=-0.5, sigma_eps=1.0)
    rule = ProportionalRule(f=0.4)
    first = simulate_trajectory(tr, rule, 0.0, 200, sigma_eta=0.5, seed=42)
    second = simulate_trajectory(tr, rule, 0.0, 200, sigma_eta=0.5, seed=42)
    other = simulate_trajectory(tr, rule, 0.0, 200, sigma_eta=0.5, seed=43)
    assert np.array_equal(first.pi, second.pi)
    assert np.array_equal(first.eta, second.eta)
    assert not np.array_equal(first.pi, other.pi)


def test_simulate_satisfies_law_of_motion():
    tr = Transmission(a=0.8, b=-0.5, sigma_eps=1.0)
    traj = simulate_trajectory(tr, ProportionalRule(f=0.4), 1.0, 500, sigma_eta=0.3, seed=9)
    np.testing.assert_allclose(traj.pi[1:], tr.a * traj.pi[:-1] + tr.b * traj.i[:-1] + traj.eps[:-1])
    np.testing.assert_allclose(traj.i, 0.4 * traj.pi + traj.eta)


def test_simulated_trajectory_is_read_only():
    traj = simulate_trajectory(Transmission(a=0.8, b=-0.5), PegRule(), pi0=1.0, horizon=5)
    with pytest.raises(ValueError):
        traj.pi[0] = 3.0


def test_sample_variance_matches_ar1_variance():
    tr = Transmission(a=0.8, b=-0.5, sigma_eps=1.0)
    traj = simulate_trajectory(tr, ProportionalRule(f=0.4), 0.0, 100_000, seed=2024)
    expected = ar1_variance(0.6, 1.0)
    assert np.var(traj.pi) == pytest.approx(expected, rel=0.03)


# ============================================
# AR(1) variance and cobweb
# ============================================

def test_ar1_variance_values():
    assert ar1_variance(0.0, 1.0) == 1.0
    assert ar1_variance(0.6, 1.0) == pytest.approx(1.5625)
    assert ar1_variance(-0.6, 2.0) == pytest.approx(6.25)


@pytest.mark.parametrize("lam", [1.0, -1.0, 1.5])
def test_ar1_variance_rejects_non_stationary(lam):
    with pytest.raises(NonStationary):
        ar1_variance(lam, 1.0)


@pytest.mark.parametrize(
    "b_supply, regime",
    [
        (0.5, CobwebRegime.DAMPED),
        (1.0, CobwebRegime.PERPETUAL),
        (1.5, CobwebRegime.DIVERGENT),
    ],
)
def test_cobweb_regimes(b_supply, regime):
    cw = CobwebParams(f_demand=-1.0, b_supply=b_supply, e0=1.0, p_star=10.0)
    excess, price, found = cobweb_simulate(cw, 20)
    assert found is regime
    bf = -b_supply
    np.testing.assert_allclose(excess, bf ** np.arange(21))
    np.testing.assert_allclose(price, 10.0 - excess)


def test_cobweb_damped_alternates_and_shrinks():
    excess, _, _ = cobweb_simulate(CobwebParams(f_demand=-1.0, b_supply=0.5), 10)
    assert np.all(np.sign(excess[1:]) == -np.sign(excess[:-1]))
    assert np.all(np.abs(excess[1:]) < np.abs(excess[:-1]))


def test_cobweb_regime_edge_cases():
    assert cobweb_regime(0.0) is CobwebRegime.ONE_STEP
    with pytest.raises(InvalidParameters):
        cobweb_regime(0.5)
    with pytest.raises(EmptyHorizon):
        cobweb_simulate(CobwebParams(f_demand=-1.0, b_supply=0.5), 0)
