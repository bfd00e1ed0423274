"""
Tournament Entry Experiment Simulator

Monte Carlo replication of the lab protocol: sessions of men and women
split into groups of 3 + 3, a piece-rate round, a compulsory tournament and
three treatment rounds (baseline, preferential, prosocial) in random order,
played under a public or private condition.

Women decide by the equilibrium of the signaling model at their calibrated
parameters; men use the mirrored image game.
"""

import itertools
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.closed_form import select_max_participation_stable, solve
from app.config import WINPROB_SIM_DRAWS
from app.model import (
    Action,
    Belief,
    BeliefSource,
    BeliefSystem,
    ImageTarget,
    LatentType,
    ModelParams,
    StrategyProfile,
    Treatment,
    action_payoff,
    messages,
    validate_params,
)
from app.oracle import EquilibriumNotFoundError, enumerate_equilibria
from app.utils import derive_seed, format_probability, logger, write_csv

DATASET_HEADER = (
    "session_id",
    "subject_id",
    "gender",
    "latent_type",
    "condition",
    "treatment",
    "round_order",
    "entered",
    "score",
    "won",
    "donation_share",
    "payment",
)

GROUP_SIZE = 3  # per gender
WINNERS = 2
_CHUNK = 250_000


# ============================================================================
# Enumerations
# ============================================================================

class Gender(str, Enum):
    MALE = "male"
    FEMALE = "female"


class Condition(str, Enum):
    PUBLIC = "public"
    PRIVATE = "private"


class DecisionMode(str, Enum):
    EQUILIBRIUM = "equilibrium"
    PAYOFF = "payoff"


class DonationShareMode(str, Enum):
    BINARY = "binary"
    CONTINUOUS = "continuous"


class RoundKind(str, Enum):
    PIECE_RATE = "piece_rate"
    TOURNAMENT = "tournament"
    BASELINE = "baseline"
    PREFERENTIAL = "preferential"
    PROSOCIAL = "prosocial"


class PaymentScheme(str, Enum):
    PIECE = "piece"
    TOURNAMENT = "tournament"


# ============================================================================
# Configuration and records
# ============================================================================

class AbilitySpec(BaseModel):
    """Normal maze-count distribution; draws are rounded and clipped at zero."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mean: float
    sd: float = Field(ge=0.0)


class PayoffBeliefs(BaseModel):
    """Fixed receiver beliefs used by the payoff decision mode."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    enter: float = Field(default=0.5, ge=0.0, le=1.0)
    stay: float = Field(default=0.5, ge=0.0, le=1.0)
    enter_donate: float = Field(default=0.5, ge=0.0, le=1.0)
    enter_keep: float = Field(default=0.5, ge=0.0, le=1.0)


class ExperimentConfig(BaseModel):
    """
    Experiment protocol and the model primitives shared by every subject.

    Payoff quantities (lambda_women, lambda_men, c_f, theta_f, theta_m) are
    in yen, like b_P and b_T after calibration.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    sessions: int = Field(ge=0)
    subjects_per_gender: int = Field(default=6, ge=GROUP_SIZE)
    q: float = Field(gt=0.0, lt=1.0)
    q_men: float = Field(default=0.5, gt=0.0, lt=1.0)
    lambda_women: float = Field(ge=0.0)
    lambda_men: float = Field(default=0.0, ge=0.0)
    ability_women: AbilitySpec
    ability_men: AbilitySpec = AbilitySpec(mean=9.6, sd=2.9)
    c_f: float
    theta_f: float
    theta_m: float
    piece_rate: float = Field(default=50.0, gt=0.0)
    tournament_rate: float = Field(default=150.0, gt=0.0)
    preferential_bonus: float = Field(default=1.0, ge=0.0)
    condition: Condition = Condition.PUBLIC
    decision_mode: DecisionMode = DecisionMode.EQUILIBRIUM
    payoff_beliefs: PayoffBeliefs = PayoffBeliefs()
    score_noise_sd: float = Field(default=0.0, ge=0.0)
    donation_share_mode: DonationShareMode = DonationShareMode.BINARY
    donation_beta: Tuple[float, float] = (2.0, 2.0)
    reference_pool_size: int = Field(default=200, ge=1)
    win_prob_draws: int = Field(default=WINPROB_SIM_DRAWS, ge=1)
    seed: int = 0

    @field_validator("subjects_per_gender")
    @classmethod
    def _whole_groups(cls, value: int) -> int:
        if value % GROUP_SIZE:
            raise ValueError(f"subjects_per_gender must be a multiple of {GROUP_SIZE}, got {value}")
        return value

    @field_validator("donation_beta")
    @classmethod
    def _positive_beta(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        if min(value) <= 0.0:
            raise ValueError("donation_beta parameters must be positive")
        return value


class EntryRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    session_id: int
    subject_id: int
    gender: Gender
    latent_type: LatentType
    condition: Condition
    treatment: RoundKind
    round_order: int = Field(ge=1, le=5)
    entered: int = Field(ge=0, le=1)
    score: int = Field(ge=0)
    won: int = Field(ge=0, le=1)
    donation_share: float = Field(default=0.0, ge=0.0, le=1.0)
    payment: int
    calibration_warning: bool = False

    @model_validator(mode="after")
    def _donation_only_on_prosocial_wins(self) -> "EntryRecord":
        if self.donation_share > 0.0 and not (
            self.treatment is RoundKind.PROSOCIAL and self.entered and self.won
        ):
            raise ValueError("donation_share must be 0 unless a prosocial entrant won")
        return self

    def to_row(self) -> List[str]:
        return [
            str(self.session_id),
            str(self.subject_id),
            self.gender.value,
            self.latent_type.value,
            self.condition.value,
            self.treatment.value,
            str(self.round_order),
            str(self.entered),
            str(self.score),
            str(self.won),
            format_probability(self.donation_share),
            str(self.payment),
        ]


class SessionOutcome(BaseModel):
    session_id: int
    treatment_order: List[Treatment]
    records: List[EntryRecord]

    @field_validator("treatment_order")
    @classmethod
    def _is_permutation(cls, value: List[Treatment]) -> List[Treatment]:
        if sorted(t.value for t in value) != sorted(t.value for t in Treatment):
            raise ValueError("treatment_order must be a permutation of the three treatments")
        return value


# ============================================================================
# Payments and win probabilities
# ============================================================================

def payment(
    scheme: PaymentScheme,
    score: int,
    won: bool = False,
    piece_rate: float = 50.0,
    tournament_rate: float = 150.0,
) -> int:
    """Gross payment in yen for one round."""
    if score < 0:
        raise ValueError(f"score must be non-negative, got {score}")
    if scheme is PaymentScheme.PIECE:
        return int(round(piece_rate * score))
    return int(round(tournament_rate * score)) if won else 0


def _split_pools(
    gender: Gender,
    men_pool: Sequence[float],
    women_pool: Sequence[float],
) -> Tuple[np.ndarray, np.ndarray]:
    men = np.asarray(men_pool, dtype=float)
    women = np.asarray(women_pool, dtype=float)
    if men.size == 0 or women.size == 0:
        raise ValueError("Reference pools must be non-empty")
    return (women, men) if gender is Gender.FEMALE else (men, women)


def estimate_win_prob(
    score: float,
    gender: Gender,
    men_pool: Sequence[float],
    women_pool: Sequence[float],
    treatment: Treatment,
    n_draws: int = WINPROB_SIM_DRAWS,
    seed: int = 0,
    bonus: float = 1.0,
) -> float:
    """
    Resampling estimate of the chance of finishing in the top two of six.

    Each draw completes the focal subject's group with 2 same-gender and 3
    other-gender scores sampled with replacement. Under the preferential
    treatment every woman, the focal subject included, gets the bonus. Ties
    are broken uniformly at random.

    The random draws do not depend on the focal score, so for a fixed seed
    the estimate is non-decreasing in the score.

    Args:
        score: Focal subject's score
        gender: Focal subject's gender
        men_pool: Men's reference scores
        women_pool: Women's reference scores
        treatment: Treatment whose ranking rule applies
        n_draws: Number of simulated groups
        seed: Generator seed
        bonus: Preferential bonus in mazes

    Returns:
        float: Estimated win probability

    Raises:
        ValueError: empty pool or n_draws < 1
    """
    if n_draws < 1:
        raise ValueError(f"n_draws must be >= 1, got {n_draws}")
    same, other = _split_pools(gender, men_pool, women_pool)

    added = bonus if treatment is Treatment.PREFERENTIAL else 0.0
    focal = score + (added if gender is Gender.FEMALE else 0.0)
    same_added = added if gender is Gender.FEMALE else 0.0
    other_added = 0.0 if gender is Gender.FEMALE else added

    rng = np.random.default_rng(seed)
    wins, remaining = 0, n_draws
    while remaining:
        size = min(_CHUNK, remaining)
        same_draw = rng.choice(same, size=(size, 2)) + same_added
        other_draw = rng.choice(other, size=(size, 3)) + other_added
        keys = rng.random((size, 6))

        others = np.concatenate([same_draw, other_draw], axis=1)
        above = (others > focal) | ((others == focal) & (keys[:, 1:] > keys[:, :1]))
        wins += int(np.count_nonzero(above.sum(axis=1) < WINNERS))
        remaining -= size

    return wins / n_draws


def exact_win_prob(
    score: float,
    gender: Gender,
    men_pool: Sequence[float],
    women_pool: Sequence[float],
    treatment: Treatment,
    bonus: float = 1.0,
) -> float:
    """Exhaustive counterpart of estimate_win_prob over the pools' distinct values."""
    same, other = _split_pools(gender, men_pool, women_pool)
    added = bonus if treatment is Treatment.PREFERENTIAL else 0.0
    focal = score + (added if gender is Gender.FEMALE else 0.0)
    same_added = added if gender is Gender.FEMALE else 0.0
    other_added = 0.0 if gender is Gender.FEMALE else added

    def distribution(pool: np.ndarray, shift: float) -> List[Tuple[float, float]]:
        counts = Counter(pool.tolist())
        return [(value + shift, count / pool.size) for value, count in counts.items()]

    same_values = distribution(same, same_added)
    other_values = distribution(other, other_added)

    total = 0.0
    for combo in itertools.product(same_values, same_values, other_values, other_values, other_values):
        weight = float(np.prod([probability for _, probability in combo]))
        above = sum(value > focal for value, _ in combo)
        tied = sum(value == focal for value, _ in combo)
        if above < WINNERS:
            total += weight * min(1.0, (WINNERS - above) / (tied + 1))
    return total


# ============================================================================
# Decisions
# ============================================================================

def equilibrium_profile(params: ModelParams, treatment: Treatment, image: ImageTarget) -> StrategyProfile:
    """
    Max-participation stable equilibrium at the given primitives.

    Women with parameters inside the characterized region use the closed
    form; everyone else goes through the oracle.
    """
    if image is ImageTarget.FEMALE and validate_params(params, treatment).passed:
        results = solve(params, treatment)
    else:
        results = enumerate_equilibria(params, treatment, image=image)
    return select_max_participation_stable(results, params.q).profile


def _payoff_profile(
    params: ModelParams,
    treatment: Treatment,
    image: ImageTarget,
    beliefs: PayoffBeliefs,
) -> StrategyProfile:
    """Pure choices maximizing utility at fixed beliefs; ties go to staying and keeping."""
    def fixed(value: float) -> Belief:
        return Belief(value=value, source=BeliefSource.PRIOR)

    prosocial = treatment is Treatment.PROSOCIAL
    system = BeliefSystem(
        mu_enter=fixed(beliefs.enter),
        mu_stay=fixed(beliefs.stay),
        mu_enter_donate=fixed(beliefs.enter_donate) if prosocial else None,
        mu_enter_keep=fixed(beliefs.enter_keep) if prosocial else None,
    )

    cautious = (Action.STAY, Action.ENTER_KEEP)
    choices = {}
    for latent_type in LatentType:
        utilities = {
            action: action_payoff(latent_type, action, system, params, treatment, image)
            for action in messages(treatment)
        }
        choices[latent_type] = max(utilities, key=lambda action: (utilities[action], action in cautious))

    def entry(action: Action) -> float:
        return 0.0 if action is Action.STAY else 1.0

    def donation(action: Action) -> float:
        return 1.0 if action is Action.ENTER_DONATE else 0.0

    f_choice, m_choice = choices[LatentType.F], choices[LatentType.M]
    if treatment is Treatment.PROSOCIAL:
        return StrategyProfile(
            r=entry(f_choice), rho=entry(m_choice), r_T=donation(f_choice), rho_T=donation(m_choice)
        )
    return StrategyProfile(r=entry(f_choice), rho=entry(m_choice))


class SimulationContext:
    """
    Shared state of one simulated experiment.

    Holds the reference ability pools behind every win-probability estimate
    and caches calibrated parameters per (gender, score, condition) along
    with the equilibrium each calibrated parameter set selects.
    """

    def __init__(self, config: ExperimentConfig, seed: int):
        self.config = config
        self.seed = seed
        self.logger = logger

        rng = np.random.default_rng(derive_seed(seed, "reference-pools"))
        size = config.reference_pool_size
        self.men_pool = _draw_scores(rng, config.ability_men, size)
        self.women_pool = _draw_scores(rng, config.ability_women, size)
        self._win_seed = derive_seed(seed, "winprob")
        self._win_cache: Dict[Tuple[Gender, int, Treatment], float] = {}
        self._params_cache: Dict[Tuple[Gender, int, Condition], Tuple[ModelParams, bool]] = {}
        self._profile_cache: Dict[Tuple[ModelParams, Treatment, ImageTarget], StrategyProfile] = {}

        self.logger.info(
            f"Reference pools drawn: men mean {self.men_pool.mean():.2f}, women mean {self.women_pool.mean():.2f}"
        )

    def win_probability(self, gender: Gender, score: int, treatment: Treatment) -> float:
        key = (gender, score, treatment)
        if key not in self._win_cache:
            self._win_cache[key] = estimate_win_prob(
                score,
                gender,
                self.men_pool,
                self.women_pool,
                treatment,
                n_draws=self.config.win_prob_draws,
                seed=self._win_seed,
                bonus=self.config.preferential_bonus,
            )
        return self._win_cache[key]

    def calibrated(self, gender: Gender, score: int, condition: Condition) -> Tuple[ModelParams, bool]:
        """Calibrated primitives and whether any treatment's assumptions failed."""
        key = (gender, score, condition)
        if key not in self._params_cache:
            params = calibrate_params(self.config, score, gender=gender, condition=condition, context=self)
            failed = gender is Gender.FEMALE and not all(
                validate_params(params, treatment).passed for treatment in Treatment
            )
            self._params_cache[key] = (params, failed)
        return self._params_cache[key]

    def decision(
        self,
        gender: Gender,
        score: int,
        condition: Condition,
        treatment: Treatment,
    ) -> Tuple[StrategyProfile, bool]:
        params, failed = self.calibrated(gender, score, condition)
        image = ImageTarget.FEMALE if gender is Gender.FEMALE else ImageTarget.MALE

        if self.config.decision_mode is DecisionMode.PAYOFF:
            return _payoff_profile(params, treatment, image, self.config.payoff_beliefs), failed

        key = (params, treatment, image)
        try:
            if key not in self._profile_cache:
                self._profile_cache[key] = equilibrium_profile(params, treatment, image)
            return self._profile_cache[key], failed
        except EquilibriumNotFoundError as e:
            self.logger.warning(f"{e}; falling back to payoff decisions at the prior")
            prior = 1.0 - params.q
            beliefs = PayoffBeliefs(enter=prior, stay=prior, enter_donate=prior, enter_keep=prior)
            return _payoff_profile(params, treatment, image, beliefs), True


def _draw_scores(rng: np.random.Generator, ability: AbilitySpec, size: int) -> np.ndarray:
    return np.clip(np.rint(rng.normal(ability.mean, ability.sd, size=size)), 0, None)


def calibrate_params(
    config: ExperimentConfig,
    score: int,
    gender: Gender = Gender.FEMALE,
    condition: Optional[Condition] = None,
    context: Optional[SimulationContext] = None,
) -> ModelParams:
    """
    Map a subject's compulsory-tournament score into model primitives.

    b_P and b_T are the piece-rate and tournament earnings at that score, w
    and w_A the estimated win probabilities without and with the bonus.
    The image weight is zero in private sessions.

    Args:
        config: Experiment configuration
        score: Round-2 score
        gender: Subject gender (men use q_men and lambda_men)
        condition: Defaults to config.condition
        context: Supplies reference pools; built from config.seed when omitted

    Returns:
        ModelParams: calibrated primitives (warnings logged, never raised)
    """
    context = context or SimulationContext(config, config.seed)
    condition = condition or config.condition

    if gender is Gender.FEMALE:
        q, lam = config.q, config.lambda_women
    else:
        q, lam = config.q_men, config.lambda_men
    if condition is Condition.PRIVATE:
        lam = 0.0

    params = ModelParams(
        b_T=config.tournament_rate * score,
        b_P=config.piece_rate * score,
        w=context.win_probability(gender, score, Treatment.BASELINE),
        w_A=context.win_probability(gender, score, Treatment.PREFERENTIAL),
        c_f=config.c_f,
        theta_f=config.theta_f,
        theta_m=config.theta_m,
        q=q,
        lam=lam,
    )

    if gender is Gender.FEMALE:
        for treatment in Treatment:
            report = validate_params(params, treatment)
            if not report.passed:
                logger.warning(
                    f"Calibration at score {score} breaks {treatment.value} assumptions: "
                    + "; ".join(report.violations)
                )
    return params


# ============================================================================
# Sessions
# ============================================================================

def _group_ranks_round2(
    scores: np.ndarray,
    keys: np.ndarray,
    groups: List[np.ndarray],
) -> np.ndarray:
    won = np.zeros(scores.size, dtype=int)
    for members in groups:
        order = sorted(members, key=lambda i: (-scores[i], keys[i]))
        won[order[:WINNERS]] = 1
    return won


def run_session(
    config: ExperimentConfig,
    session_seed: int,
    session_id: int = 0,
    context: Optional[SimulationContext] = None,
) -> SessionOutcome:
    """
    Simulate one session of five rounds.

    Random numbers are drawn in a fixed order whatever the decisions and
    condition. With lambda_women = 0 a public and a private run of the same
    seed therefore match record for record apart from the condition column.

    Args:
        config: Experiment configuration
        session_seed: Seed of this session's generator
        session_id: Identifier written on every record
        context: Shared pools and caches

    Returns:
        SessionOutcome: records ordered by (subject_id, round_order)
    """
    context = context or SimulationContext(config, config.seed)
    rng = np.random.default_rng(session_seed)
    n = config.subjects_per_gender
    size = 2 * n
    genders = [Gender.MALE] * n + [Gender.FEMALE] * n
    female = np.arange(size) >= n

    type_draws = rng.random(size)
    ability_draws = rng.standard_normal(size)
    men_order = rng.permutation(n)
    women_order = rng.permutation(n) + n
    treatment_order = [list(Treatment)[i] for i in rng.permutation(3)]
    noise = rng.standard_normal((5, size))
    round2_keys = rng.random(size)

    shares = np.where(female, config.q, config.q_men)
    latent = [LatentType.M if u < share else LatentType.F for u, share in zip(type_draws, shares)]
    mean = np.where(female, config.ability_women.mean, config.ability_men.mean)
    sd = np.where(female, config.ability_women.sd, config.ability_men.sd)
    ability = mean + sd * ability_draws

    def round_scores(index: int) -> np.ndarray:
        return np.clip(np.rint(ability + config.score_noise_sd * noise[index]), 0, None).astype(int)

    groups = [
        np.concatenate([men_order[g : g + GROUP_SIZE], women_order[g : g + GROUP_SIZE]])
        for g in range(0, n, GROUP_SIZE)
    ]
    group_of = np.empty(size, dtype=int)
    for g, members in enumerate(groups):
        group_of[members] = g

    records: List[EntryRecord] = []

    def record(subject: int, kind: RoundKind, order: int, entered: int, score: int, won: int,
               share: float, pay: int, warned: bool = False) -> None:
        records.append(
            EntryRecord(
                session_id=session_id,
                subject_id=subject,
                gender=genders[subject],
                latent_type=latent[subject],
                condition=config.condition,
                treatment=kind,
                round_order=order,
                entered=entered,
                score=score,
                won=won,
                donation_share=share,
                payment=pay,
                calibration_warning=warned,
            )
        )

    piece_scores = round_scores(0)
    for subject in range(size):
        score = int(piece_scores[subject])
        record(subject, RoundKind.PIECE_RATE, 1, 0, score, 0, 0.0,
               payment(PaymentScheme.PIECE, score, piece_rate=config.piece_rate))

    round2 = round_scores(1)
    round2_won = _group_ranks_round2(round2, round2_keys, groups)
    for subject in range(size):
        score, won = int(round2[subject]), int(round2_won[subject])
        record(subject, RoundKind.TOURNAMENT, 2, 1, score, won, 0.0,
               payment(PaymentScheme.TOURNAMENT, score, bool(won), tournament_rate=config.tournament_rate))

    for offset, treatment in enumerate(treatment_order):
        order = 3 + offset
        entry_draws = rng.random(size)
        donation_draws = rng.random(size)
        tie_keys = rng.random((size, 6))
        beta_draws = (
            rng.beta(*config.donation_beta, size=size)
            if config.donation_share_mode is DonationShareMode.CONTINUOUS
            else None
        )
        scores = round_scores(order - 1)
        bonus = config.preferential_bonus if treatment is Treatment.PREFERENTIAL else 0.0
        benchmark = round2 + np.where(female, bonus, 0.0)

        for subject in range(size):
            score = int(scores[subject])
            profile, warned = context.decision(genders[subject], int(round2[subject]), config.condition, treatment)
            is_f = latent[subject] is LatentType.F
            entered = int(entry_draws[subject] < (profile.r if is_f else profile.rho))

            won, share = 0, 0.0
            if entered:
                focal = score + (bonus if female[subject] else 0.0)
                others = [i for i in groups[group_of[subject]] if i != subject]
                ahead = sum(
                    benchmark[i] > focal or (benchmark[i] == focal and tie_keys[subject, k + 1] > tie_keys[subject, 0])
                    for k, i in enumerate(others)
                )
                won = int(ahead < WINNERS)
                if treatment is Treatment.PROSOCIAL and won:
                    donate_probability = profile.r_T if is_f else profile.rho_T
                    if donation_draws[subject] < donate_probability:
                        share = 1.0 if beta_draws is None else float(beta_draws[subject])

            scheme = PaymentScheme.TOURNAMENT if entered else PaymentScheme.PIECE
            pay = payment(scheme, score, bool(won), config.piece_rate, config.tournament_rate)
            record(subject, RoundKind(treatment.value), order, entered, score, won, share, pay, warned)

    records.sort(key=lambda item: (item.subject_id, item.round_order))
    return SessionOutcome(session_id=session_id, treatment_order=treatment_order, records=records)


def _simulate_range(task: Tuple[ExperimentConfig, int, int, int]) -> List[EntryRecord]:
    config, seed, start, stop = task
    context = SimulationContext(config, seed)
    records: List[EntryRecord] = []
    for session_id in range(start, stop):
        outcome = run_session(config, derive_seed(seed, session_id), session_id, context)
        records.extend(outcome.records)
    return records


def simulate_experiment(
    config: ExperimentConfig,
    seed: Optional[int] = None,
    workers: int = 1,
) -> List[EntryRecord]:
    """
    Run every session of the experiment.

    Session i uses derive_seed(seed, i), so the dataset is the same for any
    worker count.

    Returns:
        List[EntryRecord]: ordered by (session_id, subject_id, round_order)
    """
    seed = config.seed if seed is None else seed
    if config.sessions == 0:
        return []

    workers = max(1, min(workers, config.sessions))
    bounds = np.linspace(0, config.sessions, workers + 1).astype(int)
    tasks = [(config, seed, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]

    logger.info(f"Simulating {config.sessions} {config.condition.value} sessions with {workers} worker(s)")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            batches = list(executor.map(_simulate_range, tasks))
    else:
        batches = [_simulate_range(task) for task in tasks]

    records = [item for batch in batches for item in batch]
    logger.info(f"Simulated {len(records)} records")
    return records


def write_dataset(records: Sequence[EntryRecord], path: Optional[Union[str, Path]]) -> str:
    return write_csv(path, DATASET_HEADER, (item.to_row() for item in records))
