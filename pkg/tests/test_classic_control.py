"""
Tests for the classic control service
"""
import math

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from stabilab.exceptions import DegenerateOpenLoop, Uncontrollable
from stabilab.schemas import (
    FeedbackClass,
    InertialRule,
    ISPhillips,
    PIDRule,
    ProportionalRule,
    StabilityClass,
    StaticFriedman,
    Transmission,
)
from stabilab.services.classic_control import (
    friedman_static_check,
    inertial_simulate,
    pid_companion,
    pid_simulate,
    pole_placement_gain,
    rule_spectral_radius,
    taylor_principle_bounds,
    taylor_rule_eval,
    taylor_rule_residuals,
    taylor_transmission,
)
from stabilab.services.model_core import classify, simulate_trajectory
from stabilab.utils.random import make_rng


# ============================================
# Pole placement
# ============================================

@pytest.mark.parametrize(
    "a, b, target, expected",
    [
        (1.2, -0.5, 0.8, 0.8),
        (0.7, -0.5, 0.7, 0.0),
        (0.9, -0.3, 0.0, 3.0),
    ],
)
def test_pole_placement_gain(a, b, target, expected):
    tr = Transmission(a=a, b=b)
    f = pole_placement_gain(tr, target)
    assert f == pytest.approx(expected, abs=1e-12)
    assert classify(tr, ProportionalRule(f=f)).lam == pytest.approx(target, abs=1e-12)


def test_pole_placement_needs_instrument():
    with pytest.raises(Uncontrollable):
        pole_placement_gain(Transmission(a=0.9, b=0.0), 0.5)


# ============================================
# Taylor principle
# ============================================

def test_taylor_transmission():
    tr = taylor_transmission(ISPhillips(a_slope=0.5, b_is=1.0))
    assert (tr.a, tr.b) == (1.5, -0.5)

    tr = taylor_transmission(ISPhillips(a_slope=0.25, b_is=0.8))
    assert tr.a == pytest.approx(1.2)
    assert tr.b == pytest.approx(-0.2)


def test_taylor_transmission_without_phillips_slope():
    with pytest.raises(Uncontrollable):
        taylor_transmission(ISPhillips(a_slope=0.0, b_is=1.0))


def test_isphillips_rejects_negative_slope():
    with pytest.raises(ValidationError):
        ISPhillips(a_slope=-1.0, b_is=1.0)


def test_taylor_principle_bounds():
    isp = ISPhillips(a_slope=0.5, b_is=1.0)
    bounds = taylor_principle_bounds(isp)
    assert (bounds.low, bounds.high) == (1.0, 3.0)

    tr = taylor_transmission(isp)
    inside = classify(tr, ProportionalRule(f=1.5))
    assert inside.lam == pytest.approx(0.75)
    assert inside.feedback_class is FeedbackClass.NEGATIVE
    assert inside.stability_class is StabilityClass.STATIONARY
    assert classify(tr, ProportionalRule(f=1.0)).stability_class is StabilityClass.UNIT_ROOT
    assert classify(tr, ProportionalRule(f=3.0)).stability_class is StabilityClass.ZERO_PERSISTENCE


@pytest.mark.parametrize("a_slope", [0.1, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("b_is", [0.1, 0.5, 1.0, 2.0])
def test_taylor_principle_separates_stable_gains(a_slope, b_is):
    isp = ISPhillips(a_slope=a_slope, b_is=b_is)
    tr = taylor_transmission(isp)
    bounds = taylor_principle_bounds(isp)
    rng = make_rng(17)

    for f in rng.uniform(bounds.low, bounds.high, size=1000):
        loop = classify(tr, ProportionalRule(f=f))
        assert loop.is_stationary
        assert loop.feedback_class is FeedbackClass.NEGATIVE

    for f in rng.uniform(0.0, bounds.low, size=100):
        assert classify(tr, ProportionalRule(f=f)).stability_class is StabilityClass.EXPLOSIVE
    for f in rng.uniform(bounds.high * 1.001, bounds.high * 2.0, size=100):
        assert classify(tr, ProportionalRule(f=f)).feedback_class is FeedbackClass.OVERSHOOTING


# ============================================
# PID and inertial rules
# ============================================

def test_pure_proportional_pid_matches_proportional_rule():
    tr = Transmission(a=0.8, b=-0.5, sigma_eps=1.0)
    pid, radius = pid_simulate(tr, PIDRule(fp=0.4), pi0=1.0, horizon=100, seed=5)
    proportional = simulate_trajectory(tr, ProportionalRule(f=0.4), pi0=1.0, horizon=100, seed=5)
    assert np.array_equal(pid.pi, proportional.pi)
    assert np.array_equal(pid.i, proportional.i)
    assert radius == pytest.approx(0.6)
    assert pid_companion(tr, PIDRule(fp=0.4)).shape == (1, 1)


def test_pid_with_integral_term_is_stable():
    tr = Transmission(a=0.8, b=-0.5)
    trajectory, radius = pid_simulate(tr, PIDRule(fp=0.4, fi=0.1), pi0=1.0, horizon=200)
    assert radius == pytest.approx(0.8)
    assert abs(trajectory.pi[-1]) < 1e-6


def test_pid_with_large_integral_term_diverges():
    tr = Transmission(a=0.8, b=-0.5)
    trajectory, radius = pid_simulate(tr, PIDRule(fp=0.4, fi=10.0), pi0=1.0, horizon=50)
    assert radius > 1.0
    assert abs(trajectory.pi[-1]) > 1e6


def test_pid_derivative_term_radius():
    tr = Transmission(a=0.8, b=-0.5)
    rule = PIDRule(fp=0.4, fd=0.2)
    assert rule_spectral_radius(tr, rule) == pytest.approx((0.5 + math.sqrt(0.65)) / 2)
    trajectory, _ = pid_simulate(tr, rule, pi0=1.0, horizon=200)
    assert abs(trajectory.pi[-1]) < 1e-6


def test_pid_spectral_verdict_matches_trajectory_boundedness():
    rng = make_rng(31)
    checked = 0
    while checked < 200:
        tr = Transmission(a=rng.uniform(0.0, 1.5), b=rng.uniform(-1.0, -0.2))
        rule = PIDRule(fp=rng.uniform(-1.0, 3.0), fi=rng.uniform(-0.5, 0.5), fd=rng.uniform(-0.5, 0.5))
        trajectory, radius = pid_simulate(tr, rule, pi0=1.0, horizon=200)
        # too close to the unit circle for 200 steps to tell
        if 0.9 <= radius <= 1.1:
            continue
        checked += 1
        if radius < 0.9:
            assert np.max(np.abs(trajectory.pi[-20:])) < 1e-3
        else:
            assert np.max(np.abs(trajectory.pi)) > 1e3


def test_inertial_rule_radius_and_convergence():
    tr = Transmission(a=0.8, b=-0.5)
    trajectory, radius = inertial_simulate(tr, InertialRule(rho_i=0.5, f_x=0.4), pi0=1.0, horizon=200)
    assert radius == pytest.approx(math.sqrt(0.4))
    assert abs(trajectory.pi[-1]) < 1e-6
    np.testing.assert_allclose(trajectory.i[1:], 0.5 * trajectory.i[:-1] + 0.4 * trajectory.pi[1:])


# ============================================
# Taylor rule and static condition
# ============================================

def test_taylor_rule_eval():
    assert taylor_rule_eval(2.0, 0.0) == 4.0
    assert taylor_rule_eval(0.0, 0.0) == 1.0
    assert taylor_rule_eval(3.0, -2.0) == 4.5


def test_taylor_rule_residuals_on_bundled_data(taylor_data):
    frame = pd.read_csv(taylor_data)
    residuals, share = taylor_rule_residuals(frame)
    assert len(residuals) == len(frame)
    np.testing.assert_allclose(np.abs(residuals), 0.1, atol=1e-9)
    assert 0.0 < share < 1.0


def test_taylor_rule_residuals_vanish_on_the_rule():
    frame = pd.DataFrame({"pi": [1.0, 2.0, 3.0], "x": [0.0, -1.0, 1.0]})
    frame["i"] = [taylor_rule_eval(p, x) for p, x in zip(frame["pi"], frame["x"])]
    residuals, share = taylor_rule_residuals(frame)
    assert np.all(residuals == 0.0)
    assert share == 0.0


def test_friedman_perfect_offset():
    variance, stabilizing = friedman_static_check(StaticFriedman(sigma_ol=2.0, sigma_i=2.0, rho=-1.0))
    assert variance == 0.0
    assert stabilizing


def test_friedman_offset_too_weak():
    variance, stabilizing = friedman_static_check(StaticFriedman(sigma_ol=2.0, sigma_i=2.0, rho=-0.5))
    assert variance == 4.0
    assert not stabilizing


def test_friedman_uncorrelated_policy_adds_variance():
    variance, stabilizing = friedman_static_check(StaticFriedman(sigma_ol=2.0, sigma_i=1.0, rho=0.0))
    assert variance == 5.0
    assert not stabilizing


def test_friedman_degenerate_open_loop():
    with pytest.raises(DegenerateOpenLoop):
        friedman_static_check(StaticFriedman(sigma_ol=0.0, sigma_i=1.0, rho=-1.0))
