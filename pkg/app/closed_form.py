"""
Closed-Form Equilibria

Piecewise characterizations of the women's entry equilibria for the
baseline, preferential and prosocial treatments. Each solver returns the
profile(s) whose lambda-condition holds, with Bayes/D1 beliefs attached.
"""

from typing import List, Optional, Sequence

from app.config import DEDUP_TOL
from app.model import (
    EquilibriumResult,
    InvalidParamsError,
    ModelParams,
    StrategyProfile,
    Treatment,
    complete_beliefs,
    validate_params,
)
from app.utils import format_flag, format_probability, logger

# Worked-example primitives in abstract units
DEFAULT_THEORY_PARAMS = ModelParams(
    b_T=3.0,
    b_P=1.0,
    w=0.5,
    w_A=0.6,
    c_f=0.6,
    theta_f=1.0,
    theta_m=-2.0,
    q=0.5,
    lam=0.0,
)

RESULT_HEADER = (
    "treatment",
    "branch",
    "lambda",
    "r",
    "rho",
    "r_T",
    "rho_T",
    "stable",
    "mu_enter",
    "mu_stay",
)

# Preferential branches in the order used for deduplication and tie-breaking
BRANCH_PRIORITY = ("i", "iii", "iv", "v", "ii")


# ============================================================================
# Helpers
# ============================================================================

def _require_valid(params: ModelParams, treatment: Treatment) -> None:
    report = validate_params(params, treatment)
    if not report.passed:
        raise InvalidParamsError(f"{treatment.value}: " + "; ".join(report.violations))


def _clip(value: float) -> float:
    return min(1.0, max(0.0, value))


def _entry_gain(params: ModelParams, treatment: Treatment) -> float:
    return params.win_probability(treatment) * params.b_T - params.b_P


def _build(
    profile: StrategyProfile,
    branch: str,
    params: ModelParams,
    treatment: Treatment,
    stable: Optional[bool],
    classify_stability: bool,
) -> EquilibriumResult:
    result = EquilibriumResult(
        profile=profile,
        beliefs=complete_beliefs(profile, params, treatment),
        branch=branch,
        stable=True if stable is None else stable,
        treatment=treatment,
    )
    if stable is None and classify_stability:
        # Imported here: the oracle checks its enumeration against this module
        from app.oracle import classify_stability as classify

        report = classify(result, params, treatment)
        result = result.model_copy(update={"stable": report.stable})
    return result


# ============================================================================
# Solvers
# ============================================================================

def solve_baseline(params: ModelParams, classify_stability: bool = True) -> EquilibriumResult:
    """
    Unique baseline equilibrium.

    Only m-types ever enter; as the image weight grows they first mix and
    then stay out entirely.

    Args:
        params: Model primitives (w, b_T, b_P, c_f, q, lambda)
        classify_stability: Run best-response dynamics to fill the stable flag

    Returns:
        EquilibriumResult: branch "i", "ii" or "iii"

    Raises:
        InvalidParamsError: If the baseline assumptions fail
    """
    treatment = Treatment.BASELINE
    _require_valid(params, treatment)

    gain = _entry_gain(params, treatment)
    lam, q = params.lam, params.q

    if lam <= gain:
        branch, rho = "i", 1.0
    elif lam >= gain / (1.0 - q):
        branch, rho = "iii", 0.0
    else:
        branch, rho = "ii", _clip((1.0 / q) * (1.0 - lam * (1.0 - q) / gain))

    logger.debug(f"Baseline branch {branch} at lambda={lam}: rho={rho}")
    return _build(StrategyProfile(r=0.0, rho=rho), branch, params, treatment, None, classify_stability)


def solve_preferential(params: ModelParams, classify_stability: bool = True) -> List[EquilibriumResult]:
    """
    All preferential-treatment equilibria at the given lambda.

    The branch conditions overlap, so up to three equilibria coexist. The
    partially separating branch "ii" is always unstable. Profiles equal
    within DEDUP_TOL are reported once, under the first branch in
    BRANCH_PRIORITY; the output is sorted by (r, rho).

    Raises:
        InvalidParamsError: If the preferential assumptions fail
    """
    treatment = Treatment.PREFERENTIAL
    _require_valid(params, treatment)

    gain = _entry_gain(params, treatment)
    margin = gain - params.c_f
    lam, q = params.lam, params.q

    candidates = []
    if lam <= margin / q:
        candidates.append(("i", StrategyProfile(r=1.0, rho=1.0)))
    if margin <= lam <= gain:
        candidates.append(("iii", StrategyProfile(r=0.0, rho=1.0)))
    if gain <= lam <= gain / (1.0 - q):
        rho = _clip((1.0 / q) * (1.0 - lam * (1.0 - q) / gain))
        candidates.append(("iv", StrategyProfile(r=0.0, rho=rho)))
    if lam >= gain / (1.0 - q):
        candidates.append(("v", StrategyProfile(r=0.0, rho=0.0)))
    if margin <= lam <= margin / q:
        r = _clip((q / (1.0 - q)) * (lam - margin) / margin)
        candidates.append(("ii", StrategyProfile(r=r, rho=1.0)))

    kept = []
    for branch, profile in candidates:
        if any(profile.distance(other) <= DEDUP_TOL for _, other in kept):
            continue
        kept.append((branch, profile))

    results = [
        _build(profile, branch, params, treatment, False if branch == "ii" else None, classify_stability)
        for branch, profile in kept
    ]
    results.sort(key=lambda result: (result.profile.r, result.profile.rho))
    logger.debug(f"Preferential at lambda={lam}: branches {[result.branch for result in results]}")
    return results


def solve_prosocial(params: ModelParams, classify_stability: bool = True) -> EquilibriumResult:
    """
    Unique prosocial equilibrium: everyone enters, f-types always donate.

    m-types keep the prize at low lambda, mix over donating in the middle
    range and donate once the image weight is large enough.

    Raises:
        InvalidParamsError: If the prosocial assumptions fail
    """
    treatment = Treatment.PROSOCIAL
    _require_valid(params, treatment)

    threshold = -params.w * params.theta_m
    lam, q = params.lam, params.q

    if lam <= threshold:
        branch, rho_T = "i", 0.0
    elif lam >= threshold / (1.0 - q):
        branch, rho_T = "iii", 1.0
    else:
        branch = "ii"
        rho_T = _clip(1.0 - (1.0 / q) * (1.0 + lam * (1.0 - q) / (params.w * params.theta_m)))

    profile = StrategyProfile(r=1.0, rho=1.0, r_T=1.0, rho_T=rho_T)
    logger.debug(f"Prosocial branch {branch} at lambda={lam}: rho_T={rho_T}")
    return _build(profile, branch, params, treatment, None, classify_stability)


def solve(
    params: ModelParams,
    treatment: Treatment,
    classify_stability: bool = True,
) -> List[EquilibriumResult]:
    """Dispatch to the treatment's solver; always returns a list."""
    if treatment is Treatment.BASELINE:
        return [solve_baseline(params, classify_stability)]
    if treatment is Treatment.PREFERENTIAL:
        return solve_preferential(params, classify_stability)
    return [solve_prosocial(params, classify_stability)]


# ============================================================================
# Selection and serialization
# ============================================================================

def participation(result: EquilibriumResult, q: float) -> float:
    return result.profile.participation(q)


def _branch_rank(branch: str) -> int:
    return BRANCH_PRIORITY.index(branch) if branch in BRANCH_PRIORITY else len(BRANCH_PRIORITY)


def select_max_participation_stable(
    results: Sequence[EquilibriumResult],
    q: float,
) -> Optional[EquilibriumResult]:
    """
    Pick the stable equilibrium with the highest expected entry rate.

    Ties go to the earlier branch in BRANCH_PRIORITY. If no result is
    stable the rule is applied to all of them.
    """
    if not results:
        return None

    pool = [result for result in results if result.stable]
    if not pool:
        logger.warning("No stable equilibrium among candidates; selecting over all of them")
        pool = list(results)

    return min(pool, key=lambda result: (-round(participation(result, q), 12), _branch_rank(result.branch)))


def result_row(result: EquilibriumResult, lam: float) -> List[str]:
    profile = result.profile
    return [
        result.treatment.value,
        result.branch,
        format_probability(lam),
        format_probability(profile.r),
        format_probability(profile.rho),
        format_probability(profile.r_T),
        format_probability(profile.rho_T),
        format_flag(result.stable),
        format_probability(result.beliefs.mu_enter.value),
        format_probability(result.beliefs.mu_stay.value),
    ]
