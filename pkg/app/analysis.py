"""
Entry-Rate Analysis

Aggregates simulated (or recorded) entry datasets into rate tables, pooled
two-proportion z-tests and donation summaries.
"""

import itertools
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator
from statsmodels.stats.proportion import proportions_ztest

from app.simulator import DATASET_HEADER, EntryRecord
from app.utils import format_flag, format_probability, logger, write_csv

TREATMENT_ROUNDS = ("baseline", "preferential", "prosocial")
RATES_HEADER = ("gender", "treatment", "condition", "n", "entrants", "rate")
TESTS_HEADER = ("group_a", "group_b", "rate_a", "rate_b", "z", "p")
DONATIONS_HEADER = ("gender", "condition", "latent_type", "entrants", "winners", "mean_share", "empty")

GROUPING_KEYS = ("gender", "treatment", "condition", "latent_type", "round_order", "session_id")

_DEFAULT_LEVELS = {
    "gender": ("male", "female"),
    "treatment": TREATMENT_ROUNDS,
    "condition": ("private", "public"),
    "latent_type": ("f", "m"),
}

_DTYPES = {
    "session_id": int,
    "subject_id": int,
    "gender": str,
    "latent_type": str,
    "condition": str,
    "treatment": str,
    "round_order": int,
    "entered": int,
    "score": int,
    "won": int,
    "donation_share": float,
    "payment": int,
}


# ============================================================================
# Types
# ============================================================================

class RateRow(BaseModel):
    key: Dict[str, str]
    n: int = Field(ge=0)
    entrants: int = Field(ge=0)
    rate: Optional[float] = None

    @property
    def empty(self) -> bool:
        return self.n == 0

    @model_validator(mode="after")
    def _consistent(self) -> "RateRow":
        if self.entrants > self.n:
            raise ValueError(f"entrants ({self.entrants}) exceed n ({self.n})")
        return self


class RateTable(BaseModel):
    """Entry counts per group; empty groups are kept with n = 0 and no rate."""

    keys: Tuple[str, ...]
    rows: List[RateRow]

    def get(self, **key: str) -> RateRow:
        wanted = {name: str(value) for name, value in key.items()}
        for row in self.rows:
            if row.key == wanted:
                return row
        raise KeyError(f"No rate row for {wanted}")

    def to_rows(self) -> List[List[str]]:
        return [
            [row.key[name] for name in self.keys]
            + [str(row.n), str(row.entrants), format_probability(row.rate)]
            for row in self.rows
        ]


class ProportionTest(BaseModel):
    z: float
    p: float
    degenerate: bool = False


class PairwiseTest(BaseModel):
    group_a: str
    group_b: str
    rate_a: float
    rate_b: float
    z: float
    p: float
    degenerate: bool = False

    def to_row(self) -> List[str]:
        return [
            self.group_a,
            self.group_b,
            format_probability(self.rate_a),
            format_probability(self.rate_b),
            f"{self.z:.6f}",
            f"{self.p:.6f}",
        ]


class DonationRow(BaseModel):
    gender: str
    condition: str
    latent_type: str
    entrants: int
    winners: int
    mean_share: Optional[float] = None

    @property
    def empty(self) -> bool:
        return self.winners == 0

    def to_row(self) -> List[str]:
        return [
            self.gender,
            self.condition,
            self.latent_type,
            str(self.entrants),
            str(self.winners),
            format_probability(self.mean_share),
            format_flag(self.empty),
        ]


# ============================================================================
# Loading
# ============================================================================

def records_to_frame(records: Sequence[EntryRecord]) -> pd.DataFrame:
    rows = [record.model_dump(mode="json", include=set(DATASET_HEADER)) for record in records]
    return pd.DataFrame(rows, columns=list(DATASET_HEADER)).astype(_DTYPES)


def load_dataset(path: Union[str, Path]) -> pd.DataFrame:
    """
    Read an entry dataset CSV.

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: If the header is not the dataset header
    """
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"Dataset not found: {file_path}")

    frame = pd.read_csv(file_path, dtype=_DTYPES, keep_default_na=False)
    if tuple(frame.columns) != DATASET_HEADER:
        raise ValueError(f"{file_path} does not have the dataset header {','.join(DATASET_HEADER)}")

    logger.info(f"Loaded {len(frame)} records from {file_path}")
    return frame


# ============================================================================
# Entry rates
# ============================================================================

def entry_rates(
    frame: pd.DataFrame,
    keys: Sequence[str] = ("gender", "treatment", "condition"),
    levels: Optional[Dict[str, Sequence[str]]] = None,
    treatment_rounds_only: bool = True,
) -> RateTable:
    """
    Count entrants per group.

    Every combination of the key levels gets a row; groups without
    observations are reported with n = 0 and an undefined rate.

    Args:
        frame: Dataset as produced by load_dataset / records_to_frame
        keys: Grouping columns, a subset of GROUPING_KEYS
        levels: Values to report per key; observed values when omitted
        treatment_rounds_only: Drop the piece-rate and compulsory rounds

    Returns:
        RateTable: exact counts

    Raises:
        ValueError: If a grouping key is unknown
    """
    unknown = [key for key in keys if key not in GROUPING_KEYS]
    if unknown:
        raise ValueError(f"Unknown grouping key(s): {', '.join(unknown)}")

    data = frame[frame["treatment"].isin(TREATMENT_ROUNDS)] if treatment_rounds_only else frame

    levels = dict(levels or {})
    for key in keys:
        if key not in levels:
            observed = sorted(str(value) for value in data[key].unique())
            default = _DEFAULT_LEVELS.get(key, ())
            levels[key] = list(default) + [value for value in observed if value not in default]

    counts: Dict[Tuple[str, ...], Tuple[int, int]] = {}
    if len(data):
        for values, group in data.groupby(list(keys)):
            if not isinstance(values, tuple):
                values = (values,)
            counts[tuple(str(value) for value in values)] = (len(group), int(group["entered"].sum()))

    rows = []
    for combo in itertools.product(*(levels[key] for key in keys)):
        combo = tuple(str(value) for value in combo)
        n, entrants = counts.get(combo, (0, 0))
        rows.append(
            RateRow(key=dict(zip(keys, combo)), n=n, entrants=entrants, rate=entrants / n if n else None)
        )

    empty = sum(row.empty for row in rows)
    if empty:
        logger.warning(f"{empty} of {len(rows)} rate groups have no observations")
    return RateTable(keys=tuple(keys), rows=rows)


# ============================================================================
# Tests
# ============================================================================

def two_proportion_test(count_a: int, n_a: int, count_b: int, n_b: int) -> ProportionTest:
    """
    Pooled-variance two-sided z-test for equal proportions.

    When every observation has the same outcome the pooled variance is zero;
    the test then reports z = 0 and p = 1 and sets the degenerate flag.
    """
    if n_a < 1 or n_b < 1:
        raise ValueError("Both samples need at least one observation")
    if not (0 <= count_a <= n_a and 0 <= count_b <= n_b):
        raise ValueError("Counts must lie between 0 and the sample size")

    pooled = (count_a + count_b) / (n_a + n_b)
    if pooled in (0.0, 1.0):
        return ProportionTest(z=0.0, p=1.0, degenerate=True)

    z, p = proportions_ztest(np.array([count_a, count_b]), np.array([n_a, n_b]), alternative="two-sided")
    return ProportionTest(z=float(z), p=float(p))


def _label(row: RateRow, keys: Sequence[str]) -> str:
    return "/".join(row.key[key] for key in keys)


def _compare(table: RateTable, a: RateRow, b: RateRow) -> Optional[PairwiseTest]:
    if a.empty or b.empty:
        logger.warning(f"Skipping test {_label(a, table.keys)} vs {_label(b, table.keys)}: empty group")
        return None
    result = two_proportion_test(a.entrants, a.n, b.entrants, b.n)
    return PairwiseTest(
        group_a=_label(a, table.keys),
        group_b=_label(b, table.keys),
        rate_a=a.rate,
        rate_b=b.rate,
        z=result.z,
        p=result.p,
        degenerate=result.degenerate,
    )


def pairwise_tests(table: RateTable) -> List[PairwiseTest]:
    """
    Private vs public for each (gender, treatment), then each incentive
    treatment vs baseline for each (gender, condition).
    """
    if tuple(table.keys) != ("gender", "treatment", "condition"):
        raise ValueError("pairwise_tests needs a table keyed by gender, treatment, condition")

    genders = list(dict.fromkeys(row.key["gender"] for row in table.rows))
    tests = []
    for gender in genders:
        for treatment in TREATMENT_ROUNDS:
            tests.append(
                _compare(
                    table,
                    table.get(gender=gender, treatment=treatment, condition="private"),
                    table.get(gender=gender, treatment=treatment, condition="public"),
                )
            )
    for gender in genders:
        for condition in ("private", "public"):
            baseline = table.get(gender=gender, treatment="baseline", condition=condition)
            for treatment in ("preferential", "prosocial"):
                tests.append(
                    _compare(table, baseline, table.get(gender=gender, treatment=treatment, condition=condition))
                )
    return [test for test in tests if test is not None]


def donation_summary(frame: pd.DataFrame) -> List[DonationRow]:
    """
    Mean donation share of prosocial entrants who won, by gender, condition and type.

    Only winners realise a donation, so the mean runs over winners while the
    entrant count is reported alongside. Groups without winners are flagged
    empty.
    """
    prosocial = frame[(frame["treatment"] == "prosocial") & (frame["entered"] == 1)]
    if prosocial.empty:
        logger.warning("No prosocial entrants in dataset")

    rows = []
    for gender, condition, latent_type in itertools.product(
        _DEFAULT_LEVELS["gender"], _DEFAULT_LEVELS["condition"], _DEFAULT_LEVELS["latent_type"]
    ):
        group = prosocial[
            (prosocial["gender"] == gender)
            & (prosocial["condition"] == condition)
            & (prosocial["latent_type"] == latent_type)
        ]
        winners = group[group["won"] == 1]
        rows.append(
            DonationRow(
                gender=gender,
                condition=condition,
                latent_type=latent_type,
                entrants=len(group),
                winners=len(winners),
                mean_share=float(winners["donation_share"].mean()) if len(winners) else None,
            )
        )
    return rows


def write_report(
    frame: pd.DataFrame,
    rates_path: Union[str, Path],
    tests_path: Union[str, Path],
    donations_path: Optional[Union[str, Path]] = None,
) -> Tuple[RateTable, List[PairwiseTest]]:
    table = entry_rates(frame)
    tests = pairwise_tests(table)
    write_csv(rates_path, RATES_HEADER, table.to_rows())
    write_csv(tests_path, TESTS_HEADER, (test.to_row() for test in tests))
    if donations_path is not None:
        write_csv(donations_path, DONATIONS_HEADER, (row.to_row() for row in donation_summary(frame)))
    return table, tests
