"""
Numeric Equilibrium Oracle

Brute-force ground truth for the closed-form solvers: best responses,
equilibrium checks with Bayes/D1 beliefs, enumeration of equilibria over
profiles with at most one mixing probability, best-response stability and
the randomized closed-form cross-check behind the `verify` command.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy.optimize import brentq

from app.config import (
    DEFAULT_GRID_STEP,
    DEFAULT_MAX_ITER,
    DEFAULT_PERTURBATION,
    DEFAULT_TOL,
    MATCH_TOL,
    ORACLE_DEDUP_TOL,
)
from app.model import (
    Action,
    BeliefSource,
    BeliefSystem,
    Coords,
    EquilibriumResult,
    ImageTarget,
    LatentType,
    ModelParams,
    StrategyProfile,
    Treatment,
    action_payoff,
    complete_beliefs,
    image_value,
    material_payoff,
    message_masses,
    messages,
    resolve_beliefs,
    validate_params,
)
from app.utils import derive_seed, format_flag, format_probability, logger

# Interior end points of every mixing scan
_EDGE = 1e-12


class EquilibriumNotFoundError(RuntimeError):
    """Enumeration found no equilibrium, which the model rules out."""


# ============================================================================
# Reports
# ============================================================================

class BestResponse(BaseModel):
    actions: List[Action]
    indifferent: bool
    utility_gap: float  # best minus runner-up
    utilities: Dict[Action, float]


class TypeReport(BaseModel):
    best: BestResponse
    played: List[Action]
    violation: float = Field(ge=0.0)


class Diagnostics(BaseModel):
    """Per-type best responses, belief provenance and the largest incentive violation."""

    types: Dict[LatentType, TypeReport]
    belief_sources: Dict[str, BeliefSource]
    max_violation: float = Field(ge=0.0)
    notes: List[str] = Field(default_factory=list)


class StabilityReport(BaseModel):
    stable: bool
    oscillation: bool = False
    iterations: int = 0
    max_distance: float = 0.0


class LambdaPerturbationReport(BaseModel):
    persists: bool
    slope: Optional[float] = None
    stable: bool


# ============================================================================
# Best responses and equilibrium checks
# ============================================================================

def best_response(
    latent_type: LatentType,
    beliefs: BeliefSystem,
    params: ModelParams,
    treatment: Treatment,
    tol: float = DEFAULT_TOL,
    image: ImageTarget = ImageTarget.FEMALE,
) -> BestResponse:
    """
    Optimal messages for a type given complete beliefs.

    Every message within tol of the best utility is returned; the response
    is flagged indifferent when more than one survives.
    """
    utilities = {
        action: action_payoff(latent_type, action, beliefs, params, treatment, image)
        for action in messages(treatment)
    }
    ranked = sorted(utilities.values(), reverse=True)
    best = ranked[0]
    actions = [action for action, utility in utilities.items() if best - utility <= tol]
    return BestResponse(
        actions=actions,
        indifferent=len(actions) > 1,
        utility_gap=best - ranked[1],
        utilities=utilities,
    )


def _material_table(params: ModelParams, treatment: Treatment) -> Dict[Tuple[LatentType, Action], float]:
    return {
        (latent_type, action): material_payoff(latent_type, action, params, treatment)
        for latent_type in LatentType
        for action in messages(treatment)
    }


def _violation(
    coords: Coords,
    params: ModelParams,
    treatment: Treatment,
    image: ImageTarget,
    material: Dict[Tuple[LatentType, Action], float],
) -> float:
    """Largest utility shortfall of a played message; float-only path for enumeration."""
    beliefs = resolve_beliefs(coords, params, treatment, image)
    masses = message_masses(*coords, treatment)
    violation = 0.0
    for index, latent_type in enumerate(LatentType):
        utilities = {
            action: material[(latent_type, action)] + params.lam * image_value(beliefs[action][0], image)
            for action in masses
        }
        best = max(utilities.values())
        for action, pair in masses.items():
            if pair[index] > 0.0:
                violation = max(violation, best - utilities[action])
    return violation


def check_equilibrium(
    profile: StrategyProfile,
    params: ModelParams,
    treatment: Treatment,
    tol: float = DEFAULT_TOL,
    image: ImageTarget = ImageTarget.FEMALE,
) -> Tuple[bool, Diagnostics]:
    """
    Verify that a profile is a D1-refined perfect Bayesian equilibrium.

    Every message a type sends with positive probability must be within tol
    of that type's best utility; for a mixing type this is the indifference
    condition.

    Args:
        profile: Candidate strategy profile
        params: Model primitives
        treatment: Active treatment
        tol: Utility tolerance
        image: Perception the sender values

    Returns:
        Tuple of the verdict and the diagnostics
    """
    beliefs = complete_beliefs(profile, params, treatment, image)
    masses = message_masses(*profile.coords(), treatment)

    reports: Dict[LatentType, TypeReport] = {}
    notes: List[str] = []
    for index, latent_type in enumerate(LatentType):
        best = best_response(latent_type, beliefs, params, treatment, tol, image)
        top = max(best.utilities.values())
        played = [action for action, pair in masses.items() if pair[index] > 0.0]
        violation = max(top - best.utilities[action] for action in played)
        reports[latent_type] = TypeReport(best=best, played=played, violation=max(0.0, violation))
        if violation > tol:
            preferred = ", ".join(action.value for action in best.actions)
            notes.append(f"type {latent_type.value} strictly prefers {preferred} (gap {violation:.6g})")

    max_violation = max(report.violation for report in reports.values())
    diagnostics = Diagnostics(
        types=reports,
        belief_sources=beliefs.sources(),
        max_violation=max_violation,
        notes=notes,
    )
    return max_violation <= tol, diagnostics


# ============================================================================
# Enumeration
# ============================================================================

@dataclass(frozen=True)
class _Scan:
    """One mixing coordinate swept over (0, 1) with the other coordinates pure."""

    label: str
    index: int
    fixed: Tuple[float, float, float, float]
    latent_type: LatentType
    message: Action
    alternative: Action


def _pure_candidates(treatment: Treatment) -> List[Coords]:
    if treatment is not Treatment.PROSOCIAL:
        return [(r, rho, 0.0, 0.0) for r in (0.0, 1.0) for rho in (0.0, 1.0)]

    candidates = []
    for r in (0.0, 1.0):
        for rho in (0.0, 1.0):
            for r_T in ((0.0, 1.0) if r else (0.0,)):
                for rho_T in ((0.0, 1.0) if rho else (0.0,)):
                    candidates.append((r, rho, r_T, rho_T))
    return candidates


def _scans(treatment: Treatment) -> List[_Scan]:
    if treatment is not Treatment.PROSOCIAL:
        scans = [
            _Scan("mix:r", 0, (0.0, rho, 0.0, 0.0), LatentType.F, Action.ENTER, Action.STAY)
            for rho in (0.0, 1.0)
        ]
        scans += [
            _Scan("mix:rho", 1, (r, 0.0, 0.0, 0.0), LatentType.M, Action.ENTER, Action.STAY)
            for r in (0.0, 1.0)
        ]
        return scans

    scans = []
    # Entry mixing: the mixer's pure donation choice decides which entry message she compares to staying
    for label, index, latent_type in (("mix:r", 0, LatentType.F), ("mix:rho", 1, LatentType.M)):
        other = 1 - index
        for own_donation in (0.0, 1.0):
            for other_entry in (0.0, 1.0):
                for other_donation in ((0.0, 1.0) if other_entry else (0.0,)):
                    fixed = [0.0, 0.0, 0.0, 0.0]
                    fixed[other] = other_entry
                    fixed[index + 2] = own_donation
                    fixed[other + 2] = other_donation
                    message = Action.ENTER_DONATE if own_donation else Action.ENTER_KEEP
                    scans.append(_Scan(label, index, tuple(fixed), latent_type, message, Action.STAY))

    # Donation mixing: the mixer enters for sure
    for label, index, latent_type in (("mix:r_T", 2, LatentType.F), ("mix:rho_T", 3, LatentType.M)):
        own_entry, other_entry_index = index - 2, 3 - index
        for other_entry in (0.0, 1.0):
            for other_donation in ((0.0, 1.0) if other_entry else (0.0,)):
                fixed = [0.0, 0.0, 0.0, 0.0]
                fixed[own_entry] = 1.0
                fixed[other_entry_index] = other_entry
                fixed[other_entry_index + 2] = other_donation
                scans.append(
                    _Scan(label, index, tuple(fixed), latent_type, Action.ENTER_DONATE, Action.ENTER_KEEP)
                )
    return scans


def _scan_gap(
    scan: _Scan,
    x: np.ndarray,
    params: ModelParams,
    treatment: Treatment,
    image: ImageTarget,
    material: Dict[Tuple[LatentType, Action], float],
) -> np.ndarray:
    """Mixer's utility of scan.message minus scan.alternative; both are on path for interior x."""
    coords = [x if i == scan.index else np.full_like(x, value) for i, value in enumerate(scan.fixed)]
    masses = message_masses(*coords, treatment)
    q = params.q

    def posterior(action: Action) -> np.ndarray:
        f_mass, m_mass = masses[action]
        numerator = (1.0 - q) * f_mass
        return numerator / (numerator + q * m_mass)

    material_gap = material[(scan.latent_type, scan.message)] - material[(scan.latent_type, scan.alternative)]
    image_gap = image_value(posterior(scan.message), image) - image_value(posterior(scan.alternative), image)
    return material_gap + params.lam * image_gap


def _scan_grid(grid_step: float) -> np.ndarray:
    count = int(round(1.0 / grid_step))
    return np.concatenate(([_EDGE], np.arange(1, count) * grid_step, [1.0 - _EDGE]))


def _scan_roots(
    scan: _Scan,
    grid: np.ndarray,
    params: ModelParams,
    treatment: Treatment,
    tol: float,
    image: ImageTarget,
    material: Dict[Tuple[LatentType, Action], float],
) -> List[float]:
    gaps = _scan_gap(scan, grid, params, treatment, image, material)
    if np.all(np.abs(gaps) <= tol):
        logger.debug(f"Skipping {scan.label} scan at {scan.fixed}: indifferent on the whole interval")
        return []

    def gap(value: float) -> float:
        return float(_scan_gap(scan, np.asarray(value), params, treatment, image, material))

    roots = [float(value) for value in grid[np.abs(gaps) <= tol]]
    for i in np.nonzero(gaps[:-1] * gaps[1:] < 0.0)[0]:
        roots.append(brentq(gap, grid[i], grid[i + 1], xtol=1e-14))
    return roots


def _to_profile(coords: Coords, treatment: Treatment) -> StrategyProfile:
    if treatment is Treatment.PROSOCIAL:
        return StrategyProfile(r=coords[0], rho=coords[1], r_T=coords[2], rho_T=coords[3])
    return StrategyProfile(r=coords[0], rho=coords[1])


def enumerate_equilibria(
    params: ModelParams,
    treatment: Treatment,
    grid_step: float = DEFAULT_GRID_STEP,
    tol: float = DEFAULT_TOL,
    image: ImageTarget = ImageTarget.FEMALE,
    classify: bool = True,
) -> List[EquilibriumResult]:
    """
    Find every equilibrium with at most one interior probability.

    Pure profiles are checked directly. Each mixing coordinate is then
    swept over a grid of step grid_step; sign changes of the mixer's
    indifference gap are refined with Brent's method and every candidate is
    re-checked with complete beliefs.

    Args:
        params: Model primitives (no treatment-specific validation required)
        treatment: Active treatment
        grid_step: Scan resolution, 0 < grid_step <= 0.01
        tol: Utility tolerance for the equilibrium check
        image: Perception the sender values
        classify: Fill the stable flag with best-response dynamics

    Returns:
        List[EquilibriumResult]: sorted by (r, rho, r_T, rho_T)

    Raises:
        EquilibriumNotFoundError: If nothing survives verification
    """
    if not 0.0 < grid_step <= 0.01:
        raise ValueError(f"grid_step must lie in (0, 0.01], got {grid_step}")

    material = _material_table(params, treatment)
    candidates: List[Tuple[str, Coords]] = [("pure", coords) for coords in _pure_candidates(treatment)]

    grid = _scan_grid(grid_step)
    for scan in _scans(treatment):
        for root in _scan_roots(scan, grid, params, treatment, tol, image, material):
            coords = list(scan.fixed)
            coords[scan.index] = root
            candidates.append((scan.label, tuple(coords)))

    found: List[Tuple[str, Coords]] = []
    for label, coords in candidates:
        if _violation(coords, params, treatment, image, material) > tol:
            continue
        if any(max(abs(a - b) for a, b in zip(coords, other)) <= ORACLE_DEDUP_TOL for _, other in found):
            continue
        found.append((label, coords))

    if not found:
        raise EquilibriumNotFoundError(
            f"No equilibrium found for {treatment.value} at lambda={params.lam} ({len(candidates)} candidates)"
        )

    found.sort(key=lambda item: item[1])
    results = []
    for label, coords in found:
        profile = _to_profile(coords, treatment)
        result = EquilibriumResult(
            profile=profile,
            beliefs=complete_beliefs(profile, params, treatment, image),
            branch=label,
            stable=True,
            treatment=treatment,
        )
        if classify:
            stable = classify_stability(result, params, treatment, image=image).stable
            result = result.model_copy(update={"stable": stable})
        results.append(result)

    logger.debug(f"Oracle found {len(results)} equilibria for {treatment.value} at lambda={params.lam}")
    return results


# ============================================================================
# Stability
# ============================================================================

def _targets(
    x: Sequence[float],
    params: ModelParams,
    treatment: Treatment,
    tol: float,
    image: ImageTarget,
    material: Dict[Tuple[LatentType, Action], float],
) -> List[float]:
    beliefs = resolve_beliefs(tuple(x), params, treatment, image)

    def utility(latent_type: LatentType, action: Action) -> float:
        return material[(latent_type, action)] + params.lam * image_value(beliefs[action][0], image)

    def aim(gap: float, current: float) -> float:
        if gap > tol:
            return 1.0
        if gap < -tol:
            return 0.0
        return current

    if treatment is not Treatment.PROSOCIAL:
        return [
            aim(utility(LatentType.F, Action.ENTER) - utility(LatentType.F, Action.STAY), x[0]),
            aim(utility(LatentType.M, Action.ENTER) - utility(LatentType.M, Action.STAY), x[1]),
            x[2],
            x[3],
        ]

    targets = list(x)
    for latent_type, entry_index in ((LatentType.F, 0), (LatentType.M, 1)):
        share = x[entry_index + 2]
        donate = utility(latent_type, Action.ENTER_DONATE)
        keep = utility(latent_type, Action.ENTER_KEEP)
        enter = share * donate + (1.0 - share) * keep
        targets[entry_index] = aim(enter - utility(latent_type, Action.STAY), x[entry_index])
        targets[entry_index + 2] = aim(donate - keep, share)
    return targets


def _iterate(
    start: Coords,
    params: ModelParams,
    treatment: Treatment,
    step: float,
    max_iter: int,
    tol: float,
    image: ImageTarget,
    material: Dict[Tuple[LatentType, Action], float],
) -> Tuple[List[float], int, bool]:
    """Damped best-response path x <- x + step * (target - x); stops at a fixed point."""
    x = list(start)
    for iteration in range(1, max_iter + 1):
        targets = _targets(x, params, treatment, tol, image, material)
        moves = [step * (target - value) for target, value in zip(targets, x)]
        if max(abs(move) for move in moves) <= 1e-15:
            return x, iteration, True
        x = [min(1.0, max(0.0, value + move)) for value, move in zip(x, moves)]
    return x, max_iter, False


def classify_stability(
    result: EquilibriumResult,
    params: ModelParams,
    treatment: Treatment,
    delta: float = DEFAULT_PERTURBATION,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    image: ImageTarget = ImageTarget.FEMALE,
) -> StabilityReport:
    """
    Best-response stability of an equilibrium.

    Each mixing probability is pushed by +delta and -delta and the damped
    best-response path is followed for max_iter steps with beliefs
    recomputed at every step. Pure equilibria are iterated from the profile
    itself. The equilibrium is stable when every path ends within
    10 * delta of it; an unstable path that never settled is flagged as an
    oscillation.
    """
    origin = result.profile.coords()
    active = 4 if treatment is Treatment.PROSOCIAL else 2
    interior = [i for i in range(active) if 0.0 < origin[i] < 1.0]

    starts: List[Coords] = []
    for i in interior:
        for sign in (1.0, -1.0):
            moved = list(origin)
            moved[i] = min(1.0, max(0.0, moved[i] + sign * delta))
            starts.append(tuple(moved))
    if not starts:
        starts.append(origin)

    material = _material_table(params, treatment)
    stable, settled, iterations, max_distance = True, False, 0, 0.0
    for start in starts:
        final, used, fixed = _iterate(start, params, treatment, delta, max_iter, tol, image, material)
        distance = max(abs(a - b) for a, b in zip(final, origin))
        iterations = max(iterations, used)
        max_distance = max(max_distance, distance)
        settled = settled or fixed
        if distance > 10.0 * delta:
            stable = False

    report = StabilityReport(
        stable=stable,
        oscillation=not stable and not settled,
        iterations=iterations,
        max_distance=max_distance,
    )
    logger.debug(f"Stability of {result.branch} {origin}: {report}")
    return report


def _support(coords: Sequence[float]) -> Tuple[int, ...]:
    return tuple(0 if value == 0.0 else 2 if value == 1.0 else 1 for value in coords)


def lambda_perturbation(
    result: EquilibriumResult,
    params: ModelParams,
    treatment: Treatment,
    epsilon: float = 1e-4,
    image: ImageTarget = ImageTarget.FEMALE,
) -> LambdaPerturbationReport:
    """
    Does the equilibrium survive a small change in lambda without raising participation?

    The oracle set is recomputed at lambda +/- epsilon (the lower side only
    when it stays non-negative). The equilibrium persists when each side
    holds a profile with the same support; the slope is the change in
    expected entry across the continuation.
    """
    origin = result.profile.coords()
    support = _support(origin)
    sides = [params.lam + epsilon]
    if params.lam - epsilon >= 0.0:
        sides.insert(0, params.lam - epsilon)

    continuation: Dict[float, StrategyProfile] = {}
    for lam in sides:
        shifted = enumerate_equilibria(params.with_lambda(lam), treatment, image=image, classify=False)
        matches = [other.profile for other in shifted if _support(other.profile.coords()) == support]
        if matches:
            continuation[lam] = min(matches, key=lambda profile: profile.distance(result.profile))

    if len(continuation) < len(sides):
        return LambdaPerturbationReport(persists=False, stable=False)

    low = min(continuation) if len(sides) == 2 else params.lam
    low_rate = continuation[low].participation(params.q) if len(sides) == 2 else result.profile.participation(params.q)
    high = max(continuation)
    slope = (continuation[high].participation(params.q) - low_rate) / (high - low)
    return LambdaPerturbationReport(persists=True, slope=slope, stable=slope <= 1e-6)


# ============================================================================
# Randomized cross-check against the closed form
# ============================================================================

VERIFY_HEADER = ("draw", "treatment", "lambda", "closed_form", "oracle", "match", "max_violation")

# Draws whose strict inequalities hold by less than this are rejected, so breakpoints stay apart
MIN_MARGIN = 0.02


class VerifyRow(BaseModel):
    draw: int
    treatment: Treatment
    lam: float
    closed_form: int
    oracle: int
    match: bool
    max_violation: float

    def to_row(self) -> List[str]:
        return [
            str(self.draw),
            self.treatment.value,
            format_probability(self.lam),
            str(self.closed_form),
            str(self.oracle),
            format_flag(self.match),
            f"{self.max_violation:.3e}",
        ]


def draw_valid_params(rng: np.random.Generator) -> ModelParams:
    """
    Rejection-sample primitives valid for all three treatments at once.

    Candidates come from a fixed box; every attempt consumes the same number
    of draws, so the sequence is a pure function of the generator state.
    """
    attempts = 0
    while True:
        attempts += 1
        q, b_P, b_T, w, w_A, c_f, theta_f, theta_m = rng.uniform(
            low=[0.1, 0.5, 1.0, 0.05, 0.05, 0.0, 0.0, -4.0],
            high=[0.9, 2.0, 6.0, 0.95, 0.95, 3.0, 4.0, 0.0],
        )
        params = ModelParams(
            b_T=b_T, b_P=b_P, w=w, w_A=w_A, c_f=c_f, theta_f=theta_f, theta_m=theta_m, q=q, lam=0.0
        )
        if not all(validate_params(params, treatment).passed for treatment in Treatment):
            continue

        gain, gain_A = w * b_T - b_P, w_A * b_T - b_P
        margins = (
            gain, c_f - gain, gain_A - c_f, theta_f - c_f, w * (b_T + theta_f) - c_f - b_P,
            w * (theta_f - theta_m) - c_f, -w * theta_m,
        )
        if min(margins) < MIN_MARGIN:
            continue

        logger.debug(f"Accepted parameter draw after {attempts} attempts")
        return params


def breakpoints(params: ModelParams) -> List[float]:
    """Lambda values where some closed-form solver changes branch."""
    gain = params.w * params.b_T - params.b_P
    gain_A = params.w_A * params.b_T - params.b_P
    margin = gain_A - params.c_f
    donation = -params.w * params.theta_m
    q = params.q
    values = (gain, gain / (1 - q), margin, margin / q, gain_A, gain_A / (1 - q), donation, donation / (1 - q))
    return sorted(set(values))


def lambda_grid(params: ModelParams, count: int = 11) -> List[float]:
    """
    Lambda values covering every branch of every treatment.

    Zero, the midpoints between consecutive breakpoints and 1.25 times the
    largest one, padded with evenly spaced values away from breakpoints.
    """
    points = breakpoints(params)
    top = 1.25 * points[-1]
    values = [0.0] + [(a + b) / 2.0 for a, b in zip(points, points[1:])] + [top]

    gap = 1e-3 * top
    for candidate in np.linspace(0.0, top, 4 * count + 1)[1:-1]:
        if len(values) >= count:
            break
        if min(abs(candidate - other) for other in points + values) > gap:
            values.append(float(candidate))
    return sorted(values)[:count]


def _matches(a: Sequence[EquilibriumResult], b: Sequence[EquilibriumResult]) -> bool:
    return all(any(x.profile.distance(y.profile) <= MATCH_TOL for y in b) for x in a)


def verify_case(draw: int, params: ModelParams, treatment: Treatment) -> VerifyRow:
    """Closed form against the oracle for one parameter set."""
    closed = _solve(params, treatment)
    try:
        found = enumerate_equilibria(params, treatment, classify=False)
    except EquilibriumNotFoundError as e:
        logger.error(f"Draw {draw}: {e}")
        found = []

    violation = 0.0
    for result in closed:
        violation = max(violation, check_equilibrium(result.profile, params, treatment)[1].max_violation)

    match = bool(found) and _matches(closed, found) and _matches(found, closed)
    if not match:
        logger.warning(
            f"Mismatch at draw {draw}, {treatment.value}, lambda={params.lam}: "
            f"closed form {[r.profile.coords() for r in closed]} vs oracle {[r.profile.coords() for r in found]}"
        )
    return VerifyRow(
        draw=draw,
        treatment=treatment,
        lam=params.lam,
        closed_form=len(closed),
        oracle=len(found),
        match=match,
        max_violation=violation,
    )


def _solve(params: ModelParams, treatment: Treatment) -> List[EquilibriumResult]:
    from app.closed_form import solve

    return solve(params, treatment, classify_stability=False)


def verify_draw(task: Tuple[int, ModelParams]) -> List[VerifyRow]:
    draw, params = task
    rows = []
    for lam in lambda_grid(params):
        shifted = params.with_lambda(lam)
        for treatment in Treatment:
            rows.append(verify_case(draw, shifted, treatment))
    return rows


def run_verification(draws: int, seed: int, workers: int = 1) -> List[VerifyRow]:
    """
    Cross-check the closed form against the oracle on random parameter draws.

    Draws are generated in the calling process, so the rows do not depend
    on the number of workers.

    Returns:
        List[VerifyRow]: ordered by (draw, lambda, treatment)
    """
    rng = np.random.default_rng(derive_seed(seed, "verify"))
    tasks = [(draw, draw_valid_params(rng)) for draw in range(draws)]
    logger.info(f"Verifying {draws} parameter draws with {workers} worker(s)")

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            batches = list(executor.map(verify_draw, tasks, chunksize=max(1, draws // (4 * workers))))
    else:
        batches = [verify_draw(task) for task in tasks]

    rows = [row for batch in batches for row in batch]
    mismatches = sum(not row.match for row in rows)
    logger.info(f"Verification finished: {len(rows)} cases, {mismatches} mismatches")
    return rows
