#!/usr/bin/env python
"""
End-to-end checks of the simulated experiment.

Women are homogeneous (14 mazes) so every woman shares one calibrated
parameter set; the entry cost sits between the baseline and the
preferential entry gain and the image weight is set for a public baseline
entry rate of about 0.24. Men have no image concern.
"""

import math

import pytest

from app.analysis import entry_rates, pairwise_tests, records_to_frame, two_proportion_test
from app.closed_form import solve
from app.model import Treatment, validate_params
from app.simulator import (
    AbilitySpec,
    Condition,
    ExperimentConfig,
    SimulationContext,
    calibrate_params,
    simulate_experiment,
)

SEED = 2024
SESSIONS = 1000
Q = 0.46
WOMEN_SCORE = 14


def calibrated_config() -> ExperimentConfig:
    base = ExperimentConfig(
        sessions=SESSIONS,
        q=Q,
        lambda_women=0.0,
        ability_women=AbilitySpec(mean=WOMEN_SCORE, sd=0),
        ability_men=AbilitySpec(mean=12, sd=2),
        c_f=0.0,
        theta_f=0.0,
        theta_m=-500.0,
        seed=SEED,
    )
    params = calibrate_params(base, WOMEN_SCORE, context=SimulationContext(base, SEED))
    gain = params.w * params.b_T - params.b_P
    gain_A = params.w_A * params.b_T - params.b_P

    c_f = gain + 0.8 * (gain_A - gain)
    lam = gain * (1 - 0.24) / (1 - Q)
    return base.model_copy(update={"c_f": c_f, "lambda_women": lam, "theta_f": c_f + 1000.0})


@pytest.fixture(scope="module")
def config() -> ExperimentConfig:
    return calibrated_config()


@pytest.fixture(scope="module")
def table(config):
    records = []
    for condition in Condition:
        records += simulate_experiment(config.model_copy(update={"condition": condition}), seed=SEED)
    return entry_rates(records_to_frame(records))


def rate(table, gender, treatment, condition):
    return table.get(gender=gender, treatment=treatment, condition=condition)


def test_calibration_preconditions(config):
    params = calibrate_params(config, WOMEN_SCORE, context=SimulationContext(config, SEED))
    assert params.w > 1.0 / 3.0
    assert params.w_A > params.w
    for treatment in Treatment:
        assert validate_params(params, treatment).passed, treatment

    # public preferential lies beyond the pooling region
    margin = params.w_A * params.b_T - params.b_P - params.c_f
    assert params.lam > margin / params.q
    assert [result.branch for result in solve(params, Treatment.BASELINE)] == ["ii"]


@pytest.mark.slow
def test_private_baseline_entry_near_type_share(table):
    assert rate(table, "female", "baseline", "private").rate == pytest.approx(0.46, abs=0.05)


@pytest.mark.slow
def test_public_baseline_entry_drops(table):
    private = rate(table, "female", "baseline", "private").rate
    public = rate(table, "female", "baseline", "public").rate
    assert private - public >= 0.15
    assert public == pytest.approx(0.24, abs=0.03)


@pytest.mark.slow
def test_preferential_entry_drops_but_exceeds_baseline(table):
    private = rate(table, "female", "preferential", "private").rate
    public = rate(table, "female", "preferential", "public").rate
    assert public < private
    assert private > rate(table, "female", "baseline", "private").rate
    assert public > rate(table, "female", "baseline", "public").rate


@pytest.mark.slow
def test_prosocial_entry_unaffected_by_publicity(table):
    private = rate(table, "female", "prosocial", "private").rate
    public = rate(table, "female", "prosocial", "public").rate
    assert abs(public - private) <= 0.05


@pytest.mark.slow
@pytest.mark.parametrize("treatment", ["baseline", "preferential", "prosocial"])
def test_men_unaffected_by_publicity(table, treatment):
    private = rate(table, "male", treatment, "private")
    public = rate(table, "male", treatment, "public")
    pooled = (private.entrants + public.entrants) / (private.n + public.n)
    se = math.sqrt(pooled * (1 - pooled) * (1 / private.n + 1 / public.n))
    assert abs(public.rate - private.rate) <= 3 * se + 1e-12


@pytest.mark.slow
def test_public_baseline_drop_is_significant(table):
    tests = {(test.group_a, test.group_b): test for test in pairwise_tests(table)}
    drop = tests[("female/baseline/private", "female/baseline/public")]
    assert drop.p < 0.01


def test_headline_counts_anchor():
    result = two_proportion_test(21, 46, 11, 45)
    assert 0.01 <= result.p <= 0.06
