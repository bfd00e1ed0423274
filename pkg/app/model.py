"""
Signaling Model of Tournament Entry under Social Image Concerns

Domain types, payoff evaluation, Bayes posteriors and the D1 off-path
belief rule shared by every solver.

A woman of latent type f (female-stereotypical: entry cost c_f, altruism
theta_f) or m (male-stereotypical: zero entry cost, theta_m < 0) chooses to
stay (safe payoff b_P) or enter a tournament (prize b_T won with probability
w). Her choice is observed, and she values the receiver's posterior that she
is of type f with weight lambda. Under the prosocial treatment an entrant also
picks whether to donate the prize, which is observed as well.
"""

import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from app.utils import logger


# ============================================================================
# Errors
# ============================================================================

class InvalidParamsError(ValueError):
    """Parameters violate the inequalities a solver relies on."""


class OnPathActionError(ValueError):
    """An off-path belief was requested for a message played on path."""


class MissingDonationError(ValueError):
    """A prosocial entry was evaluated without its donation choice."""


# ============================================================================
# Enumerations
# ============================================================================

class Treatment(str, Enum):
    BASELINE = "baseline"
    PREFERENTIAL = "preferential"
    PROSOCIAL = "prosocial"


class LatentType(str, Enum):
    F = "f"
    M = "m"


class Decision(str, Enum):
    ENTER = "enter"
    STAY = "stay"


class Action(str, Enum):
    """Receiver-observable messages."""

    STAY = "stay"
    ENTER = "enter"
    ENTER_DONATE = "enter_donate"
    ENTER_KEEP = "enter_keep"


class ImageTarget(str, Enum):
    """Which perception the sender values: women want to look f, men want to look m."""

    FEMALE = "female"
    MALE = "male"


class BeliefSource(str, Enum):
    BAYES = "bayes"
    D1 = "d1"
    PRIOR = "prior"
    UNRESOLVED = "unresolved"


def messages(treatment: Treatment) -> Tuple[Action, ...]:
    """Messages available to the sender under a treatment."""
    if treatment is Treatment.PROSOCIAL:
        return (Action.STAY, Action.ENTER_DONATE, Action.ENTER_KEEP)
    return (Action.STAY, Action.ENTER)


# ============================================================================
# Domain Types
# ============================================================================

class ModelParams(BaseModel):
    """
    Primitives of the signaling model.

    Serialized as a flat JSON document; the image weight uses the key "lambda".
    Range checks are deliberately left to validate_params so that every
    violation can be reported individually.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    b_T: float
    b_P: float
    w: Optional[float] = None
    w_A: Optional[float] = None
    c_f: float
    c_m: float = 0.0
    theta_f: Optional[float] = None
    theta_m: Optional[float] = None
    q: float
    lam: float = Field(alias="lambda")

    def win_probability(self, treatment: Treatment) -> float:
        value = self.w_A if treatment is Treatment.PREFERENTIAL else self.w
        if value is None:
            name = "w_A" if treatment is Treatment.PREFERENTIAL else "w"
            raise InvalidParamsError(f"{name} is required for the {treatment.value} treatment")
        return value

    def cost(self, latent_type: LatentType) -> float:
        return self.c_f if latent_type is LatentType.F else self.c_m

    def altruism(self, latent_type: LatentType) -> float:
        value = self.theta_f if latent_type is LatentType.F else self.theta_m
        if value is None:
            raise InvalidParamsError("theta_f and theta_m are required for the prosocial treatment")
        return value

    def with_lambda(self, lam: float) -> "ModelParams":
        return self.model_copy(update={"lam": float(lam)})

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, exclude_none=True)

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        return cls.model_validate_json(text)


class StrategyProfile(BaseModel):
    """Women's mixed strategies: entry (r, rho) and, for prosocial, donation given entry."""

    model_config = ConfigDict(frozen=True)

    r: float = Field(ge=0.0, le=1.0)
    rho: float = Field(ge=0.0, le=1.0)
    r_T: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    rho_T: Optional[float] = Field(default=None, ge=0.0, le=1.0)

    @property
    def is_prosocial(self) -> bool:
        return self.r_T is not None and self.rho_T is not None

    def coords(self) -> Tuple[float, float, float, float]:
        return (self.r, self.rho, self.r_T or 0.0, self.rho_T or 0.0)

    def distance(self, other: "StrategyProfile") -> float:
        return max(abs(a - b) for a, b in zip(self.coords(), other.coords()))

    def participation(self, q: float) -> float:
        """Expected entry rate (1 - q) r + q rho."""
        return (1.0 - q) * self.r + q * self.rho


class Belief(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: Optional[float] = None
    source: BeliefSource = BeliefSource.UNRESOLVED

    @property
    def resolved(self) -> bool:
        return self.value is not None


class BeliefSystem(BaseModel):
    """Receiver posteriors Pr(f | message), each tagged with where it came from."""

    model_config = ConfigDict(frozen=True)

    mu_enter: Belief
    mu_stay: Belief
    mu_enter_donate: Optional[Belief] = None
    mu_enter_keep: Optional[Belief] = None

    def for_action(self, action: Action) -> Belief:
        belief = {
            Action.STAY: self.mu_stay,
            Action.ENTER: self.mu_enter,
            Action.ENTER_DONATE: self.mu_enter_donate,
            Action.ENTER_KEEP: self.mu_enter_keep,
        }[action]
        if belief is None:
            raise ValueError(f"No belief for message {action.value} in this belief system")
        return belief

    def value(self, action: Action) -> float:
        belief = self.for_action(action)
        if belief.value is None:
            raise ValueError(f"Belief after {action.value} is unresolved")
        return belief.value

    def sources(self) -> Dict[str, BeliefSource]:
        out = {"stay": self.mu_stay.source, "enter": self.mu_enter.source}
        if self.mu_enter_donate is not None:
            out["enter_donate"] = self.mu_enter_donate.source
        if self.mu_enter_keep is not None:
            out["enter_keep"] = self.mu_enter_keep.source
        return out


class EquilibriumResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    profile: StrategyProfile
    beliefs: BeliefSystem
    branch: str
    stable: bool
    treatment: Treatment


class ValidationReport(BaseModel):
    treatment: Treatment
    violations: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


# ============================================================================
# Parameter validation
# ============================================================================

_REQUIRED = {
    Treatment.BASELINE: ("w",),
    Treatment.PREFERENTIAL: ("w_A",),
    Treatment.PROSOCIAL: ("w", "theta_f", "theta_m"),
}


def validate_params(params: ModelParams, treatment: Treatment) -> ValidationReport:
    """
    Check the assumptions a treatment's characterization relies on.

    Args:
        params: Model primitives
        treatment: Treatment whose inequality chain is checked

    Returns:
        ValidationReport: empty violations list when every inequality holds
    """
    violations: List[str] = []

    for name in _REQUIRED[treatment]:
        if getattr(params, name) is None:
            violations.append(f"{name} is required for the {treatment.value} treatment")

    values: Dict[str, Optional[float]] = {}
    for name in ModelParams.model_fields:
        value = getattr(params, name)
        if value is not None and not math.isfinite(value):
            label = "lambda" if name == "lam" else name
            violations.append(f"{label} is not finite")
            value = None
        values[name] = value

    for name in ("w", "w_A", "q"):
        value = values[name]
        if value is not None and not 0.0 < value < 1.0:
            violations.append(f"0 < {name} < 1 violated")
    if values["lam"] is not None and values["lam"] < 0.0:
        violations.append("lambda ≥ 0 violated")
    if values["c_m"] is not None and values["c_m"] != 0.0:
        violations.append("c_m = 0 violated")

    needed = ("b_T", "b_P", "c_f") + _REQUIRED[treatment]
    if any(values[name] is None for name in needed):
        return ValidationReport(treatment=treatment, violations=violations)

    b_T, b_P, c_f = values["b_T"], values["b_P"], values["c_f"]

    if treatment is Treatment.BASELINE:
        gain = values["w"] * b_T - b_P
        if not gain > 0.0:
            violations.append("w·b_T − b_P > 0 violated")
        if not gain < c_f:
            violations.append("w·b_T − b_P < c_f violated")
    elif treatment is Treatment.PREFERENTIAL:
        if not c_f > 0.0:
            violations.append("c_f > 0 violated")
        if not c_f < values["w_A"] * b_T - b_P:
            violations.append("c_f < w_A·b_T − b_P violated")
    else:
        w, theta_f, theta_m = values["w"], values["theta_f"], values["theta_m"]
        if not theta_m < 0.0:
            violations.append("θ_m < 0 violated")
        if not theta_f - c_f > 0.0:
            violations.append("θ_f − c_f > 0 violated")
        if not w * b_T - b_P > 0.0:
            violations.append("w·b_T − b_P > 0 violated")
        if not w * (b_T + theta_f) - c_f > b_P:
            violations.append("w·(b_T + θ_f) − c_f > b_P violated")
        # D1 sends an off-path stay to the m-type only while f gains more from donating
        if not c_f < w * (theta_f - theta_m):
            violations.append("c_f < w·(θ_f − θ_m) violated")

    return ValidationReport(treatment=treatment, violations=violations)


# ============================================================================
# Payoffs
# ============================================================================

def material_payoff(
    latent_type: LatentType,
    action: Action,
    params: ModelParams,
    treatment: Treatment,
) -> float:
    """Payoff of a message without the image term."""
    if action is Action.STAY:
        return params.b_P

    win = params.win_probability(treatment)
    cost = params.cost(latent_type)
    if action is Action.ENTER_DONATE:
        return win * (params.b_T + params.altruism(latent_type)) - cost
    return win * params.b_T - cost


def image_value(mu: float, image: ImageTarget = ImageTarget.FEMALE) -> float:
    """Image benefit per unit of lambda given the posterior Pr(f | message)."""
    return mu if image is ImageTarget.FEMALE else 1.0 - mu


def action_payoff(
    latent_type: LatentType,
    action: Action,
    beliefs: BeliefSystem,
    params: ModelParams,
    treatment: Treatment,
    image: ImageTarget = ImageTarget.FEMALE,
) -> float:
    return material_payoff(latent_type, action, params, treatment) + params.lam * image_value(
        beliefs.value(action), image
    )


def _action_for(decision: Decision, donate: Optional[bool], treatment: Treatment) -> Action:
    if decision is Decision.STAY:
        if donate is not None:
            raise ValueError("A donation choice only exists after entering")
        return Action.STAY

    if treatment is Treatment.PROSOCIAL:
        if donate is None:
            raise MissingDonationError("Prosocial entry needs a donation choice")
        return Action.ENTER_DONATE if donate else Action.ENTER_KEEP

    if donate is not None:
        raise ValueError(f"No donation option under the {treatment.value} treatment")
    return Action.ENTER


def entry_payoff(
    latent_type: LatentType,
    decision: Decision,
    donate: Optional[bool],
    beliefs: BeliefSystem,
    params: ModelParams,
    treatment: Treatment,
    image: ImageTarget = ImageTarget.FEMALE,
) -> float:
    """
    Money-equivalent utility of a choice given the receiver's beliefs.

    Args:
        latent_type: Sender type
        decision: enter or stay
        donate: donation choice, required exactly for prosocial entry
        beliefs: Receiver posteriors
        params: Model primitives
        treatment: Active treatment (preferential substitutes w_A)
        image: Perception the sender values

    Returns:
        float: utility

    Raises:
        MissingDonationError: prosocial entry without a donation flag
    """
    action = _action_for(decision, donate, treatment)
    return action_payoff(latent_type, action, beliefs, params, treatment, image)


# ============================================================================
# Beliefs
# ============================================================================

Coords = Tuple[float, float, float, float]


def message_masses(r, rho, r_T, rho_T, treatment: Treatment) -> Dict[Action, tuple]:
    """
    Probability each type sends each message.

    Plain arithmetic only, so numpy arrays work as well as floats.
    """
    masses = {Action.STAY: (1.0 - r, 1.0 - rho)}
    if treatment is Treatment.PROSOCIAL:
        masses[Action.ENTER_DONATE] = (r * r_T, rho * rho_T)
        masses[Action.ENTER_KEEP] = (r * (1.0 - r_T), rho * (1.0 - rho_T))
    else:
        masses[Action.ENTER] = (r, rho)
    return masses


def bayes_posterior(f_mass: float, m_mass: float, q: float) -> Optional[float]:
    """Pr(f | message); None when the message has zero probability."""
    numerator = (1.0 - q) * f_mass
    denominator = numerator + q * m_mass
    if denominator <= 0.0:
        return None
    return min(1.0, max(0.0, numerator / denominator))


def _on_path(coords: Coords, q: float, treatment: Treatment):
    masses = message_masses(*coords, treatment)
    on_path = {action: bayes_posterior(f, m, q) for action, (f, m) in masses.items()}
    return masses, on_path


def _equilibrium_utility(
    latent_type: LatentType,
    masses: Dict[Action, tuple],
    on_path: Dict[Action, Optional[float]],
    params: ModelParams,
    treatment: Treatment,
    image: ImageTarget,
) -> float:
    index = 0 if latent_type is LatentType.F else 1
    best = -math.inf
    for action, pair in masses.items():
        mu = on_path[action]
        if pair[index] > 0.0 and mu is not None:
            utility = material_payoff(latent_type, action, params, treatment)
            best = max(best, utility + params.lam * image_value(mu, image))
    return best


def d1_thresholds(
    action: Action,
    masses: Dict[Action, tuple],
    on_path: Dict[Action, Optional[float]],
    params: ModelParams,
    treatment: Treatment,
    image: ImageTarget,
) -> Dict[LatentType, float]:
    """
    Image value each type needs before deviating to an off-path message pays.

    A type whose threshold is strictly higher is rationalized by a strictly
    smaller set of receiver responses and is eliminated.
    """
    thresholds = {}
    for latent_type in LatentType:
        equilibrium = _equilibrium_utility(latent_type, masses, on_path, params, treatment, image)
        deviation = material_payoff(latent_type, action, params, treatment)
        thresholds[latent_type] = (equilibrium - deviation) / params.lam
    return thresholds


def _d1_value(
    action: Action,
    masses: Dict[Action, tuple],
    on_path: Dict[Action, Optional[float]],
    params: ModelParams,
    treatment: Treatment,
    image: ImageTarget,
) -> Tuple[float, BeliefSource]:
    prior = 1.0 - params.q
    if params.lam == 0.0:
        return prior, BeliefSource.PRIOR

    thresholds = d1_thresholds(action, masses, on_path, params, treatment, image)
    f_threshold, m_threshold = thresholds[LatentType.F], thresholds[LatentType.M]
    if math.isclose(f_threshold, m_threshold, rel_tol=1e-12, abs_tol=1e-12):
        return prior, BeliefSource.PRIOR
    if f_threshold > m_threshold:
        return 0.0, BeliefSource.D1
    return 1.0, BeliefSource.D1


def resolve_beliefs(
    coords: Coords,
    params: ModelParams,
    treatment: Treatment,
    image: ImageTarget = ImageTarget.FEMALE,
) -> Dict[Action, Tuple[float, BeliefSource]]:
    """Complete beliefs on raw coordinates; the fast path used by the oracle."""
    masses, on_path = _on_path(coords, params.q, treatment)
    resolved = {}
    for action, mu in on_path.items():
        if mu is not None:
            resolved[action] = (mu, BeliefSource.BAYES)
        else:
            resolved[action] = _d1_value(action, masses, on_path, params, treatment, image)
    return resolved


def _coords(profile: StrategyProfile, treatment: Treatment) -> Coords:
    if treatment is Treatment.PROSOCIAL and not profile.is_prosocial:
        raise ValueError("Prosocial profiles need r_T and rho_T")
    if treatment is not Treatment.PROSOCIAL and (profile.r_T is not None or profile.rho_T is not None):
        raise ValueError(f"r_T/rho_T only apply to the prosocial treatment, not {treatment.value}")
    return profile.coords()


def _aggregate_entry(coords: Coords, q: float) -> Optional[float]:
    return bayes_posterior(coords[0], coords[1], q)


def _belief_system(
    treatment: Treatment,
    per_action: Dict[Action, Belief],
    entry: Belief,
) -> BeliefSystem:
    if treatment is Treatment.PROSOCIAL:
        return BeliefSystem(
            mu_enter=entry,
            mu_stay=per_action[Action.STAY],
            mu_enter_donate=per_action[Action.ENTER_DONATE],
            mu_enter_keep=per_action[Action.ENTER_KEEP],
        )
    return BeliefSystem(mu_enter=per_action[Action.ENTER], mu_stay=per_action[Action.STAY])


def posterior_beliefs(profile: StrategyProfile, q: float, treatment: Treatment) -> BeliefSystem:
    """
    Bayes posteriors for every message played with positive probability.

    Off-path messages are returned with source UNRESOLVED.
    """
    coords = _coords(profile, treatment)
    _, on_path = _on_path(coords, q, treatment)
    per_action = {
        action: Belief(value=mu, source=BeliefSource.BAYES) if mu is not None else Belief()
        for action, mu in on_path.items()
    }
    entry = per_action.get(Action.ENTER)
    if entry is None:
        mu = _aggregate_entry(coords, q)
        entry = Belief(value=mu, source=BeliefSource.BAYES) if mu is not None else Belief()
    return _belief_system(treatment, per_action, entry)


def d1_belief(
    profile: StrategyProfile,
    offpath_action: Action,
    params: ModelParams,
    treatment: Treatment,
    image: ImageTarget = ImageTarget.FEMALE,
) -> float:
    """
    D1-refined belief after an off-path message.

    Returns the degenerate belief on the surviving type, or the prior 1 - q
    when lambda is zero or neither type is eliminated.

    Raises:
        OnPathActionError: the message is sent with positive probability
    """
    if offpath_action not in messages(treatment):
        raise ValueError(f"{offpath_action.value} is not a message of the {treatment.value} treatment")

    coords = _coords(profile, treatment)
    masses, on_path = _on_path(coords, params.q, treatment)
    if on_path[offpath_action] is not None:
        raise OnPathActionError(f"{offpath_action.value} is on path under {coords}")

    value, source = _d1_value(offpath_action, masses, on_path, params, treatment, image)
    logger.debug(f"D1 belief after {offpath_action.value}: {value} ({source.value})")
    return value


def complete_beliefs(
    profile: StrategyProfile,
    params: ModelParams,
    treatment: Treatment,
    image: ImageTarget = ImageTarget.FEMALE,
) -> BeliefSystem:
    """Bayes on path, D1 (or prior) off path."""
    coords = _coords(profile, treatment)
    resolved = resolve_beliefs(coords, params, treatment, image)
    per_action = {action: Belief(value=value, source=source) for action, (value, source) in resolved.items()}

    entry = per_action.get(Action.ENTER)
    if entry is None:
        mu = _aggregate_entry(coords, params.q)
        if mu is None:
            entry = Belief(value=1.0 - params.q, source=BeliefSource.PRIOR)
        else:
            entry = Belief(value=mu, source=BeliefSource.BAYES)
    return _belief_system(treatment, per_action, entry)
