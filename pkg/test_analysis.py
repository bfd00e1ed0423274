"""
Tests for entry-rate tables, proportion tests and donation summaries.
"""

import math

import pandas as pd
import pytest

from app.analysis import (
    RATES_HEADER,
    DonationRow,
    entry_rates,
    donation_summary,
    load_dataset,
    pairwise_tests,
    records_to_frame,
    two_proportion_test,
    write_report,
)
from app.closed_form import solve_prosocial
from app.simulator import (
    DATASET_HEADER,
    AbilitySpec,
    Condition,
    ExperimentConfig,
    SimulationContext,
    calibrate_params,
    simulate_experiment,
    write_dataset,
)


def make_frame(rows) -> pd.DataFrame:
    """rows: (gender, treatment, condition, latent_type, entered, won, donation_share)"""
    records = []
    for i, (gender, treatment, condition, latent_type, entered, won, share) in enumerate(rows):
        records.append(
            dict(
                session_id=0,
                subject_id=i,
                gender=gender,
                latent_type=latent_type,
                condition=condition,
                treatment=treatment,
                round_order=3,
                entered=entered,
                score=10,
                won=won,
                donation_share=share,
                payment=0,
            )
        )
    return pd.DataFrame(records, columns=list(DATASET_HEADER))


def women_baseline(entered: int, total: int, condition: str = "private") -> list:
    return [
        ("female", "baseline", condition, "m", int(i < entered), 0, 0.0)
        for i in range(total)
    ]


# ============================================================================
# Entry rates
# ============================================================================

def test_counting_matches_headline_scale():
    table = entry_rates(make_frame(women_baseline(21, 46)))
    row = table.get(gender="female", treatment="baseline", condition="private")
    assert (row.n, row.entrants) == (46, 21)
    assert row.rate == pytest.approx(21 / 46)


def test_everyone_entering_gives_rate_one():
    table = entry_rates(make_frame(women_baseline(10, 10)))
    assert table.get(gender="female", treatment="baseline", condition="private").rate == 1.0


def test_empty_groups_are_flagged():
    table = entry_rates(make_frame(women_baseline(3, 5)))
    row = table.get(gender="male", treatment="prosocial", condition="public")
    assert row.empty and row.n == 0 and row.rate is None
    assert len(table.rows) == 2 * 3 * 2


def test_totals_reconcile_with_rows():
    frame = make_frame(women_baseline(3, 5) + women_baseline(1, 4, "public"))
    table = entry_rates(frame)
    assert sum(row.n for row in table.rows) == len(frame)
    assert sum(row.entrants for row in table.rows) == int(frame["entered"].sum())


def test_unknown_grouping_key():
    with pytest.raises(ValueError, match="Unknown grouping key"):
        entry_rates(make_frame(women_baseline(1, 2)), keys=("gender", "colour"))


def test_other_rounds_are_excluded():
    rows = women_baseline(1, 2) + [("female", "tournament", "private", "m", 1, 0, 0.0)]
    table = entry_rates(make_frame(rows))
    assert sum(row.n for row in table.rows) == 2


# ============================================================================
# Proportion tests
# ============================================================================

def test_identical_proportions():
    result = two_proportion_test(50, 100, 50, 100)
    assert result.z == pytest.approx(0.0)
    assert result.p == pytest.approx(1.0)
    assert not result.degenerate


def test_headline_drop_anchor():
    result = two_proportion_test(21, 46, 11, 45)
    assert result.z == pytest.approx(2.11835, abs=1e-4)
    assert result.p == pytest.approx(0.0341, abs=5e-4)
    assert 0.01 <= result.p <= 0.06


def test_symmetry():
    forward = two_proportion_test(21, 46, 11, 45)
    backward = two_proportion_test(11, 45, 21, 46)
    assert backward.z == pytest.approx(-forward.z)
    assert backward.p == pytest.approx(forward.p)


def test_maximal_separation():
    result = two_proportion_test(46, 46, 0, 45)
    assert result.z > 9
    assert result.p < 1e-10


def test_zero_pooled_variance():
    result = two_proportion_test(10, 10, 5, 5)
    assert (result.z, result.p, result.degenerate) == (0.0, 1.0, True)
    with pytest.raises(ValueError):
        two_proportion_test(0, 0, 1, 2)


def test_pairwise_tests_cover_conditions_and_treatments():
    rows = []
    for gender in ("female", "male"):
        for treatment in ("baseline", "preferential", "prosocial"):
            for condition in ("private", "public"):
                rows += [(gender, treatment, condition, "m", int(i % 2 == 0), 0, 0.0) for i in range(10)]
    tests = pairwise_tests(entry_rates(make_frame(rows)))
    assert len(tests) == 2 * 3 + 2 * 2 * 2
    assert tests[0].group_a == "male/baseline/private"
    assert tests[0].group_b == "male/baseline/public"


# ============================================================================
# Donations
# ============================================================================

def test_donation_summary_means_over_winners():
    rows = [
        ("female", "prosocial", "public", "f", 1, 1, 1.0),
        ("female", "prosocial", "public", "f", 1, 1, 1.0),
        ("female", "prosocial", "public", "f", 1, 0, 0.0),
        ("female", "prosocial", "private", "m", 1, 1, 0.0),
    ]
    summary = {(row.gender, row.condition, row.latent_type): row for row in donation_summary(make_frame(rows))}

    f_public = summary[("female", "public", "f")]
    assert (f_public.entrants, f_public.winners, f_public.mean_share) == (3, 2, 1.0)
    assert summary[("female", "private", "m")].mean_share == 0.0
    assert summary[("male", "public", "m")].empty


def middle_interval_config(position: float, sessions: int) -> ExperimentConfig:
    """Homogeneous women whose m-types mix over donating in public."""
    base = ExperimentConfig(
        sessions=sessions,
        q=0.46,
        lambda_women=0.0,
        ability_women=AbilitySpec(mean=14, sd=0),
        ability_men=AbilitySpec(mean=12, sd=2),
        c_f=450.0,
        theta_f=1450.0,
        theta_m=-500.0,
        condition=Condition.PUBLIC,
        reference_pool_size=60,
        win_prob_draws=20_000,
        seed=5,
    )
    params = calibrate_params(base, 14, context=SimulationContext(base, base.seed))
    low = -params.w * params.theta_m
    high = low / (1 - params.q)
    return base.model_copy(update={"lambda_women": low + position * (high - low)})


def m_type_public_donations(config: ExperimentConfig) -> DonationRow:
    rows = donation_summary(records_to_frame(simulate_experiment(config)))
    return [row for row in rows if (row.gender, row.condition, row.latent_type) == ("female", "public", "m")][0]


@pytest.mark.slow
def test_m_type_donations_track_mixing_probability():
    config = middle_interval_config(0.5, sessions=300)
    params = calibrate_params(config, 14, context=SimulationContext(config, config.seed))
    rho_T = solve_prosocial(params, classify_stability=False).profile.rho_T
    assert 0.0 < rho_T < 1.0

    row = m_type_public_donations(config)
    se = math.sqrt(rho_T * (1 - rho_T) / row.winners)
    assert abs(row.mean_share - rho_T) <= 3 * se


def test_m_type_donations_rise_with_image_weight():
    low = m_type_public_donations(middle_interval_config(0.2, sessions=40))
    high = m_type_public_donations(middle_interval_config(0.8, sessions=40))
    assert low.winners == high.winners > 0
    assert high.mean_share >= low.mean_share


# ============================================================================
# Files
# ============================================================================

def test_dataset_round_trip_and_report(tmp_path):
    config = ExperimentConfig(
        sessions=2,
        q=0.5,
        lambda_women=100.0,
        ability_women=AbilitySpec(mean=12, sd=0),
        ability_men=AbilitySpec(mean=12, sd=2),
        c_f=400.0,
        theta_f=1400.0,
        theta_m=-500.0,
        reference_pool_size=30,
        win_prob_draws=5_000,
    )
    records = simulate_experiment(config, seed=1)
    path = tmp_path / "data.csv"
    write_dataset(records, path)

    frame = load_dataset(path)
    pd.testing.assert_frame_equal(frame, records_to_frame(records))

    rates, tests = tmp_path / "rates.csv", tmp_path / "tests.csv"
    write_report(frame, rates, tests, tmp_path / "donations.csv")
    assert rates.read_text().splitlines()[0] == ",".join(RATES_HEADER)
    assert tests.read_text().splitlines()[0] == "group_a,group_b,rate_a,rate_b,z,p"
    assert (tmp_path / "donations.csv").exists()


def test_load_dataset_rejects_other_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        load_dataset(path)
    with pytest.raises(FileNotFoundError):
        load_dataset(tmp_path / "missing.csv")
