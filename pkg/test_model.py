"""
Tests for the model primitives: parameter validation, payoffs, Bayes
posteriors and D1 off-path beliefs.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.closed_form import DEFAULT_THEORY_PARAMS
from app.model import (
    Action,
    Belief,
    BeliefSource,
    BeliefSystem,
    Decision,
    ImageTarget,
    LatentType,
    MissingDonationError,
    ModelParams,
    OnPathActionError,
    StrategyProfile,
    Treatment,
    bayes_posterior,
    complete_beliefs,
    d1_belief,
    entry_payoff,
    material_payoff,
    message_masses,
    posterior_beliefs,
    validate_params,
)

P = DEFAULT_THEORY_PARAMS


def _beliefs(enter: float, stay: float) -> BeliefSystem:
    return BeliefSystem(
        mu_enter=Belief(value=enter, source=BeliefSource.BAYES),
        mu_stay=Belief(value=stay, source=BeliefSource.BAYES),
    )


# ============================================================================
# Validation
# ============================================================================

@pytest.mark.parametrize("treatment", list(Treatment))
def test_default_params_valid_for_every_treatment(treatment):
    assert validate_params(P, treatment).passed


def test_prosocial_needs_altruism_above_cost():
    params = P.model_copy(update={"theta_f": 0.5})
    report = validate_params(params, Treatment.PROSOCIAL)
    assert not report.passed
    assert "θ_f − c_f > 0 violated" in report.violations


def test_prosocial_needs_donation_gap_above_cost():
    params = ModelParams(
        b_T=5.8784, b_P=0.8937, w=0.4104, c_f=2.5528, theta_f=2.8573, theta_m=-1.1616, q=0.7035, lam=7.27
    )
    report = validate_params(params, Treatment.PROSOCIAL)
    assert report.violations == ["c_f < w·(θ_f − θ_m) violated"]
    assert validate_params(params.model_copy(update={"c_f": 1.6}), Treatment.PROSOCIAL).passed


def test_baseline_needs_cost_above_gain():
    params = P.model_copy(update={"c_f": 0.4})
    report = validate_params(params, Treatment.BASELINE)
    assert report.violations == ["w·b_T − b_P < c_f violated"]
    # the preferential chain only needs c_f below the advantaged gain
    assert validate_params(params, Treatment.PREFERENTIAL).passed


def test_preferential_reports_missing_field():
    params = P.model_copy(update={"w_A": None})
    report = validate_params(params, Treatment.PREFERENTIAL)
    assert "w_A is required for the preferential treatment" in report.violations


def test_range_and_finiteness_violations_are_all_reported():
    params = P.model_copy(update={"q": 1.0, "lam": -1.0, "b_T": math.nan})
    violations = validate_params(params, Treatment.BASELINE).violations
    assert "0 < q < 1 violated" in violations
    assert "lambda ≥ 0 violated" in violations
    assert "b_T is not finite" in violations


def test_params_json_uses_lambda_key_and_rejects_unknown_keys():
    params = P.with_lambda(0.75)
    text = params.to_json()
    assert '"lambda":0.75' in text
    assert ModelParams.from_json(text) == params

    with pytest.raises(ValidationError):
        ModelParams.model_validate({"b_T": 3, "b_P": 1, "c_f": 0.6, "q": 0.5, "lambda": 0, "colour": 1})


# ============================================================================
# Payoffs
# ============================================================================

def test_m_type_indifferent_at_interior_baseline_beliefs():
    params = P.with_lambda(0.75)
    beliefs = _beliefs(enter=0.0, stay=2.0 / 3.0)
    enter = entry_payoff(LatentType.M, Decision.ENTER, None, beliefs, params, Treatment.BASELINE)
    stay = entry_payoff(LatentType.M, Decision.STAY, None, beliefs, params, Treatment.BASELINE)
    assert enter == pytest.approx(1.5)
    assert stay == pytest.approx(1.5)


def test_preferential_uses_advantaged_win_probability():
    assert material_payoff(LatentType.M, Action.ENTER, P, Treatment.PREFERENTIAL) == pytest.approx(1.8)
    assert material_payoff(LatentType.F, Action.ENTER, P, Treatment.BASELINE) == pytest.approx(0.9)


def test_prosocial_entry_requires_donation_choice():
    beliefs = complete_beliefs(StrategyProfile(r=1, rho=1, r_T=1, rho_T=0), P, Treatment.PROSOCIAL)
    with pytest.raises(MissingDonationError):
        entry_payoff(LatentType.F, Decision.ENTER, None, beliefs, P, Treatment.PROSOCIAL)

    donate = entry_payoff(LatentType.F, Decision.ENTER, True, beliefs, P, Treatment.PROSOCIAL)
    assert donate == pytest.approx(0.5 * (3 + 1) - 0.6)


def test_male_image_mirrors_belief():
    params = P.with_lambda(1.0)
    beliefs = _beliefs(enter=0.25, stay=0.5)
    female = entry_payoff(LatentType.M, Decision.ENTER, None, beliefs, params, Treatment.BASELINE)
    male = entry_payoff(LatentType.M, Decision.ENTER, None, beliefs, params, Treatment.BASELINE, ImageTarget.MALE)
    assert female == pytest.approx(1.5 + 0.25)
    assert male == pytest.approx(1.5 + 0.75)


@pytest.mark.parametrize("treatment", [Treatment.BASELINE, Treatment.PREFERENTIAL])
def test_entry_payoff_increases_with_entry_belief(treatment):
    params = P.with_lambda(0.75)
    grid = np.linspace(0.0, 1.0, 21)
    for latent_type in LatentType:
        values = [
            entry_payoff(latent_type, Decision.ENTER, None, _beliefs(enter=mu, stay=0.5), params, treatment)
            for mu in grid
        ]
        assert all(b > a for a, b in zip(values, values[1:]))


def test_entry_payoff_ignores_beliefs_without_image_weight():
    values = [
        entry_payoff(LatentType.F, Decision.ENTER, None, _beliefs(enter=mu, stay=0.5), P, Treatment.BASELINE)
        for mu in np.linspace(0.0, 1.0, 21)
    ]
    assert values == pytest.approx([0.9] * len(values))


# ============================================================================
# Beliefs
# ============================================================================

def test_bayes_posterior_and_zero_mass():
    assert bayes_posterior(1.0, 0.5, 0.5) == pytest.approx(2.0 / 3.0)
    assert bayes_posterior(0.0, 0.0, 0.5) is None


@pytest.mark.parametrize("q", [0.1, 0.5, 0.9])
def test_bayes_posterior_reproduces_f_mass(q):
    grid = np.linspace(0.0, 1.0, 11)
    for r in grid:
        for rho in grid:
            mu = bayes_posterior(r, rho, q)
            if mu is None:
                assert r == rho == 0.0
                continue
            assert abs(mu * ((1 - q) * r + q * rho) - (1 - q) * r) <= 1e-12


@pytest.mark.parametrize("share", [0.2, 0.5, 0.9])
def test_equal_entry_rates_leave_prior_unchanged(share):
    beliefs = posterior_beliefs(StrategyProfile(r=share, rho=share), P.q, Treatment.BASELINE)
    assert beliefs.mu_enter.value == pytest.approx(1 - P.q, abs=1e-12)
    assert beliefs.mu_stay.value == pytest.approx(1 - P.q, abs=1e-12)


def test_message_masses_accept_arrays():
    r = np.array([0.0, 0.5, 1.0])
    masses = message_masses(r, 1.0, None, None, Treatment.BASELINE)
    np.testing.assert_allclose(masses[Action.STAY][0], [1.0, 0.5, 0.0])
    np.testing.assert_allclose(masses[Action.ENTER][0], r)


def test_posterior_beliefs_leave_off_path_unresolved():
    beliefs = posterior_beliefs(StrategyProfile(r=0, rho=0), 0.5, Treatment.BASELINE)
    assert beliefs.mu_stay.value == pytest.approx(0.5)
    assert beliefs.mu_enter.source is BeliefSource.UNRESOLVED
    assert not beliefs.mu_enter.resolved


def test_d1_assigns_entry_to_m_type_when_nobody_enters():
    params = P.with_lambda(2.0)
    assert d1_belief(StrategyProfile(r=0, rho=0), Action.ENTER, params, Treatment.BASELINE) == 0.0


def test_d1_assigns_staying_to_f_type_under_pooling_entry():
    params = P.with_lambda(0.3)
    assert d1_belief(StrategyProfile(r=1, rho=1), Action.STAY, params, Treatment.PREFERENTIAL) == 1.0


def test_d1_on_male_image_game():
    params = P.with_lambda(2.0)
    belief = d1_belief(StrategyProfile(r=0, rho=0), Action.ENTER, params, Treatment.BASELINE, ImageTarget.MALE)
    assert belief == 0.0


def test_d1_rejects_on_path_message():
    with pytest.raises(OnPathActionError):
        d1_belief(StrategyProfile(r=0, rho=0.5), Action.ENTER, P.with_lambda(0.75), Treatment.BASELINE)


def test_zero_lambda_off_path_belief_is_prior():
    beliefs = complete_beliefs(StrategyProfile(r=0, rho=0), P, Treatment.BASELINE)
    assert beliefs.mu_enter.value == pytest.approx(1 - P.q)
    assert beliefs.mu_enter.source is BeliefSource.PRIOR


def test_prosocial_beliefs_are_total():
    params = P.with_lambda(0.5)
    beliefs = complete_beliefs(StrategyProfile(r=1, rho=1, r_T=1, rho_T=0), params, Treatment.PROSOCIAL)
    assert beliefs.value(Action.ENTER_DONATE) == pytest.approx(1.0)
    assert beliefs.value(Action.ENTER_KEEP) == pytest.approx(0.0)
    assert beliefs.mu_stay.source in (BeliefSource.D1, BeliefSource.PRIOR)
    assert beliefs.mu_enter.value == pytest.approx(0.5)


def test_profile_rejects_probabilities_outside_unit_interval():
    with pytest.raises(ValidationError):
        StrategyProfile(r=1.2, rho=0.0)
