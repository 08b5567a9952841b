"""
Tests for the policy games service
"""
import math

import numpy as np
import pytest

from stabilab.config import get_settings
from stabilab.exceptions import InvalidParameters, NoConvergence, NoStablePlan, Uncontrollable
from stabilab.schemas import LossSpec, MisperceptionMode, MisperceptionVerdict, StackelbergModel, Transmission
from stabilab.services.optimal_control import riccati_solve, solve_lqr
from stabilab.services.policy_games import (
    RULE_GAIN_GRID,
    barro_gordon_equilibrium,
    best_rule_loss,
    commitment_losses,
    kp_misperception_iterate,
    misperception_regime_search,
    stackelberg_commit,
    stackelberg_concatenated_loss,
    stackelberg_reoptimize,
    stackelberg_rule_loss,
)

HORIZON = 200


# ============================================
# Barro-Gordon
# ============================================

def test_barro_gordon_inflation_bias():
    eq = barro_gordon_equilibrium(-1.0, LossSpec(q=1.0, r=1.0, pi_bias=2.0))
    assert eq.pi_star == 1.0
    assert eq.i_star == -1.0
    assert eq.loss_discretion == 1.0
    assert eq.loss_rules == 0.0
    assert eq.loss_discretion > eq.loss_rules


def test_barro_gordon_without_bias_matches_rules():
    eq = barro_gordon_equilibrium(-1.0, LossSpec(q=1.0, r=1.0, pi_bias=0.0))
    assert eq.pi_star == 0.0
    assert eq.i_star == 0.0
    assert eq.loss_discretion == eq.loss_rules


def test_barro_gordon_ignoring_inflation_removes_bias():
    assert barro_gordon_equilibrium(-1.0, LossSpec(q=0.0, r=1.0, pi_bias=2.0)).pi_star == 0.0


def test_barro_gordon_comparative_statics():
    def pi_star(q=1.0, r=1.0, bias=2.0):
        return barro_gordon_equilibrium(-1.0, LossSpec(q=q, r=r, pi_bias=bias)).pi_star

    assert pi_star(q=0.5) < pi_star(q=1.0) < pi_star(q=2.0)
    assert pi_star(r=0.5) > pi_star(r=1.0) > pi_star(r=2.0)
    assert pi_star(r=1e9) < 1e-8
    assert pi_star(bias=4.0) == pytest.approx(2.0 * pi_star(bias=2.0))


def test_barro_gordon_needs_instrument():
    with pytest.raises(Uncontrollable):
        barro_gordon_equilibrium(0.0, LossSpec(q=1.0, r=1.0, pi_bias=2.0))


# ============================================
# Misperception
# ============================================

@pytest.mark.parametrize("mode", list(MisperceptionMode))
def test_misperception_starts_from_the_optimal_gain(mode, explosive_tr, unit_loss):
    run = kp_misperception_iterate(explosive_tr, unit_loss, 5, mode=mode)
    assert run.f_path[0] == riccati_solve(explosive_tr, unit_loss).f_star
    assert run.perceived_a_path[0] == explosive_tr.a
    for k in range(1, len(run.f_path)):
        assert run.perceived_a_path[k] == pytest.approx(explosive_tr.a + explosive_tr.b * run.f_path[k - 1])


def test_misperception_replace_mode_diverges():
    run = kp_misperception_iterate(
        Transmission(a=1.2, b=-0.5), LossSpec(q=1.0, r=0.01), 10, mode=MisperceptionMode.REPLACE,
    )
    assert run.verdict is MisperceptionVerdict.DIVERGED
    # the run stops at the first unstable gain
    assert len(run.f_path) == 2
    assert run.true_lambda_path[-1] >= 1.0


def test_misperception_layer_mode_deteriorates():
    run = kp_misperception_iterate(
        Transmission(a=0.8, b=-0.5), LossSpec(q=1.0, r=10.0), 10, mode=MisperceptionMode.LAYER,
    )
    assert run.verdict is MisperceptionVerdict.DETERIORATED
    assert run.loss_path[0] < run.rules_loss
    assert max(run.loss_path) > run.rules_loss
    assert all(abs(lam) < 1.0 for lam in run.true_lambda_path)


def test_misperception_default_run_drifts_monotonically():
    run = kp_misperception_iterate(Transmission(a=0.8, b=-0.5), LossSpec(q=1.0, r=0.1), 10)
    assert run.mode is MisperceptionMode.LAYER
    assert len(run.f_path) == 10
    assert np.all(np.diff(run.perceived_a_path) < 0.0)
    assert np.all(np.diff(run.f_path) > 0.0)


def test_misperception_replace_mode_alternates():
    run = kp_misperception_iterate(
        Transmission(a=0.8, b=-0.5), LossSpec(q=1.0, r=0.1), 10, mode=MisperceptionMode.REPLACE,
    )
    drift = np.diff(run.perceived_a_path)
    assert len(drift) == 9
    # each gain undoes part of the previous one
    assert np.all(drift[:-1] * drift[1:] < 0.0)


def test_misperception_layer_mode_drifts_monotonically():
    run = kp_misperception_iterate(
        Transmission(a=0.8, b=-0.5), LossSpec(q=1.0, r=10.0), 10, mode=MisperceptionMode.LAYER,
    )
    drift = np.diff(run.perceived_a_path)
    assert len(drift) == 9
    assert np.all(drift < 0.0)


def test_misperception_layer_mode_adds_gains(stable_tr, unit_loss):
    run = kp_misperception_iterate(stable_tr, unit_loss, 3, mode=MisperceptionMode.LAYER)
    for k in range(1, len(run.f_path)):
        step = solve_lqr(run.perceived_a_path[k], stable_tr.b, unit_loss).f_star
        assert run.f_path[k] == pytest.approx(run.f_path[k - 1] + step)


def test_misperception_rejects_empty_run(stable_tr, unit_loss):
    with pytest.raises(InvalidParameters):
        kp_misperception_iterate(stable_tr, unit_loss, 0)


def test_misperception_regime_search():
    frame = misperception_regime_search(
        [Transmission(a=0.8, b=-0.5), Transmission(a=1.2, b=-0.5)], [0.01, 10.0],
    )
    assert len(frame) == 2 * 2 * len(MisperceptionMode)
    assert list(frame.columns) == ["a", "b", "ratio", "mode", "verdict", "iterations", "final_f", "max_loss"]
    verdicts = set(frame["verdict"])
    assert MisperceptionVerdict.DIVERGED.value in verdicts
    assert MisperceptionVerdict.DETERIORATED.value in verdicts


# ============================================
# Commitment
# ============================================

def test_commitment_plan_shape(canonical_model, canonical_loss):
    plan = stackelberg_commit(canonical_model, canonical_loss, 1.0, HORIZON)
    assert len(plan.pi_path) == HORIZON + 1
    assert plan.gamma_path[0] == 0.0
    assert abs(plan.gamma_path[1]) > 1e-6
    assert plan.pi_path[-1] == pytest.approx(0.0, abs=1e-12)


def test_commitment_plan_satisfies_follower_condition(canonical_model, canonical_loss):
    plan = stackelberg_commit(canonical_model, canonical_loss, 1.0, HORIZON)
    m = canonical_model
    implied = m.delta * plan.pi_path[1:] + m.kappa * plan.z_path[:-1] + m.b * plan.i_path[:-1]
    np.testing.assert_allclose(plan.pi_path[:-1], implied, atol=1e-10)


def test_commitment_at_rest(canonical_model, canonical_loss):
    plan = stackelberg_commit(canonical_model, canonical_loss, 0.0, HORIZON)
    assert np.all(plan.pi_path == 0.0)
    assert np.all(plan.i_path == 0.0)
    assert plan.loss == 0.0


def test_commitment_scales_with_initial_state(canonical_model, canonical_loss):
    unit = stackelberg_commit(canonical_model, canonical_loss, 1.0, HORIZON)
    double = stackelberg_commit(canonical_model, canonical_loss, 2.0, HORIZON)
    np.testing.assert_allclose(double.pi_path, 2.0 * unit.pi_path, atol=1e-12)
    assert double.loss == pytest.approx(4.0 * unit.loss)


def test_commitment_beats_every_proportional_rule(canonical_model, canonical_loss):
    plan = stackelberg_commit(canonical_model, canonical_loss, 1.0, HORIZON)
    gain, rule_loss = best_rule_loss(canonical_model, canonical_loss, 1.0, HORIZON)
    assert 0.0 < gain < 20.0
    assert plan.loss < rule_loss


def test_rule_loss_is_infinite_for_indeterminate_rules(canonical_model, canonical_loss):
    # |1 - b*F| <= delta
    for f in (-0.1, -0.5, -1.5):
        assert stackelberg_rule_loss(canonical_model, canonical_loss, 1.0, f, HORIZON) == math.inf
    assert math.isfinite(stackelberg_rule_loss(canonical_model, canonical_loss, 1.0, -5.0, HORIZON))


def test_rule_grid_covers_both_signs():
    assert len(RULE_GAIN_GRID) == 401
    assert RULE_GAIN_GRID[0] < 0.0 < RULE_GAIN_GRID[-1]


def test_rule_loss_of_the_peg(canonical_model, canonical_loss):
    persistence = 1.0 / (1.0 - canonical_model.delta * canonical_model.rho)
    decay = canonical_loss.beta * canonical_model.rho ** 2
    expected = 0.5 * persistence ** 2 * (1.0 - decay ** HORIZON) / (1.0 - decay)
    assert stackelberg_rule_loss(canonical_model, canonical_loss, 1.0, 0.0, HORIZON) == pytest.approx(expected)


@pytest.mark.parametrize(
    "model",
    [
        StackelbergModel(delta=1.0),
        StackelbergModel(rho=1.0),
        StackelbergModel(b=0.0),
    ],
)
def test_commitment_without_stable_plan(model, canonical_loss):
    with pytest.raises(NoStablePlan):
        stackelberg_commit(model, canonical_loss, 1.0, HORIZON)


def test_commitment_rejects_short_horizon(canonical_model, canonical_loss):
    with pytest.raises(InvalidParameters):
        stackelberg_commit(canonical_model, canonical_loss, 1.0, 1)


def test_commitment_horizon_grows_until_the_loss_settles(canonical_model):
    ls = LossSpec(q=1.0, r=1e3, beta=0.99)
    short = stackelberg_commit(canonical_model, ls, 1.0, HORIZON, extend_horizon=False)
    plan = stackelberg_commit(canonical_model, ls, 1.0, HORIZON)
    longer = stackelberg_commit(canonical_model, ls, 1.0, 2 * plan.horizon, extend_horizon=False)

    assert short.horizon == HORIZON
    assert plan.horizon > HORIZON
    assert abs(longer.loss - plan.loss) < 1e-8
    assert abs(short.loss - plan.loss) > 1e-8


def test_commitment_horizon_is_kept_once_settled(canonical_model, canonical_loss):
    assert stackelberg_commit(canonical_model, canonical_loss, 1.0, HORIZON).horizon == HORIZON


def test_commitment_horizon_limit(canonical_model, monkeypatch):
    monkeypatch.setattr(get_settings(), "stackelberg_max_horizon", 2 * HORIZON)
    with pytest.raises(NoConvergence):
        stackelberg_commit(canonical_model, LossSpec(q=1.0, r=1e5, beta=0.99), 1.0, HORIZON)


# ============================================
# Re-optimization
# ============================================

def test_reoptimizing_at_the_start_changes_nothing(canonical_model, canonical_loss):
    plan = stackelberg_commit(canonical_model, canonical_loss, 1.0, HORIZON)
    new_plan, deviation = stackelberg_reoptimize(plan, 0)
    assert deviation == pytest.approx(0.0, abs=1e-12)
    assert new_plan.reoptimized_at == 0


def test_reoptimizing_later_deviates(canonical_model, canonical_loss):
    plan = stackelberg_commit(canonical_model, canonical_loss, 1.0, HORIZON)
    new_plan, deviation = stackelberg_reoptimize(plan, 5)
    assert deviation > 1e-6
    assert new_plan.start == 5
    assert new_plan.gamma_path[0] == 0.0
    assert stackelberg_concatenated_loss(plan, new_plan) >= plan.loss - 1e-12


def test_reoptimization_deviation_shrinks_with_the_state(canonical_model, canonical_loss):
    deviations = []
    for z0 in (1.0, 0.1, 0.01):
        plan = stackelberg_commit(canonical_model, canonical_loss, z0, HORIZON)
        deviations.append(stackelberg_reoptimize(plan, 5)[1])
    assert deviations[0] > deviations[1] > deviations[2]


def closed_form_deviation(model: StackelbergModel, ls: LossSpec, z0: float, s: int) -> float:
    """Infinite-horizon gap between the date-0 plan and the plan re-chosen at s, at date s"""
    c = model.delta / ls.beta
    middle = 1.0 + model.delta * c + ls.q * model.b ** 2 / ls.r
    root = (middle - math.sqrt(middle ** 2 - 4.0 * model.delta * c)) / (2.0 * model.delta)
    level = ls.q * model.kappa / (c / model.rho - middle + model.delta * model.rho)
    return abs(level * z0 / model.rho * (model.rho ** s - root ** s) * (c - root) / ls.q)


@pytest.mark.parametrize("r", [1e-3, 1.0, 1e3])
@pytest.mark.parametrize("s", [5, 20])
def test_reoptimization_deviation_matches_closed_form(canonical_model, r, s):
    ls = LossSpec(q=1.0, r=r, beta=0.99)
    plan = stackelberg_commit(canonical_model, ls, 1.0, HORIZON)
    _, deviation = stackelberg_reoptimize(plan, s)
    assert deviation == pytest.approx(closed_form_deviation(canonical_model, ls, 1.0, s), rel=1e-5)


def test_reoptimization_deviation_small_at_extreme_weights(canonical_model):
    def worst_deviation(r):
        plan = stackelberg_commit(canonical_model, LossSpec(q=1.0, r=r, beta=0.99), 1.0, HORIZON)
        return max(stackelberg_reoptimize(plan, s)[1] for s in range(1, 11))

    balanced = worst_deviation(1.0)
    assert worst_deviation(1e-3) < 0.01 * balanced
    # with delta = 0.99 a promise about the whole future path keeps paying
    # off until the instrument is very dear
    assert worst_deviation(1e5) < 0.1 * balanced


def test_reoptimize_rejects_dates_past_the_horizon(canonical_model, canonical_loss):
    plan = stackelberg_commit(canonical_model, canonical_loss, 1.0, HORIZON)
    with pytest.raises(InvalidParameters):
        stackelberg_reoptimize(plan, HORIZON)


def test_commitment_losses_table(canonical_model, canonical_loss):
    plan = stackelberg_commit(canonical_model, canonical_loss, 1.0, HORIZON)
    rows = commitment_losses(plan, [0, 5, 10])
    assert [row[0] for row in rows] == [0, 5, 10]
    assert rows[0][1] == pytest.approx(0.0, abs=1e-12)
    assert all(loss >= plan.loss - 1e-12 for _, _, loss in rows)
