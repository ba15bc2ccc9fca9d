"""Attack taxonomy, risk scoring and mitigation coverage for model cards.

The scoring tables below are a transparent ordinal sum. They are
non-normative: they exist so that gap analysis can be gated on an auditable
risk level, not to quantify attack probability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping

from .doc_model import Answer, DocType, Document, TriState
from .errors import InvariantError, WrongDocTypeError


class AttackClass(str, Enum):
    EXPLOITATIVE = "exploitative"
    EXPLORATORY = "exploratory"


class Attack(str, Enum):
    POISONING = "poisoning"
    BACKDOOR = "backdoor"
    EVASION = "evasion"
    SPONGE = "sponge"
    MODEL_STEALING = "model_stealing"
    MEMBERSHIP_INFERENCE = "membership_inference"
    ATTRIBUTE_INFERENCE = "attribute_inference"

    @property
    def attack_class(self) -> AttackClass:
        return _ATTACK_CLASSES[self]


_ATTACK_CLASSES = {
    Attack.POISONING: AttackClass.EXPLOITATIVE,
    Attack.BACKDOOR: AttackClass.EXPLOITATIVE,
    Attack.EVASION: AttackClass.EXPLOITATIVE,
    Attack.SPONGE: AttackClass.EXPLOITATIVE,
    Attack.MODEL_STEALING: AttackClass.EXPLORATORY,
    Attack.MEMBERSHIP_INFERENCE: AttackClass.EXPLORATORY,
    Attack.ATTRIBUTE_INFERENCE: AttackClass.EXPLORATORY,
}


def attack_taxonomy() -> list[Attack]:
    return list(Attack)


class Knowledge(str, Enum):
    BLACK_BOX = "black_box"
    GRAY_BOX = "gray_box"
    WHITE_BOX = "white_box"


class Goal(str, Enum):
    AVAILABILITY = "availability"
    INTEGRITY = "integrity"
    CONFIDENTIALITY = "confidentiality"


@dataclass(frozen=True)
class ThreatModel:
    """Attacker characterization. ``capabilities`` is free text and is not scored."""

    knowledge: Knowledge
    goals: frozenset[Goal]
    capabilities: str = ""

    def __post_init__(self):
        object.__setattr__(self, "knowledge", Knowledge(self.knowledge))
        object.__setattr__(self, "goals", frozenset(Goal(g) for g in self.goals))
        if not self.goals:
            raise InvariantError("a threat model needs at least one goal")


# --- risk scoring ---------------------------------------------------------

class RiskLevel(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"

    @property
    def rank(self) -> int:
        return _LEVEL_ORDER.index(self)

    def __ge__(self, other):
        if isinstance(other, RiskLevel):
            return self.rank >= other.rank
        return NotImplemented

    def __gt__(self, other):
        if isinstance(other, RiskLevel):
            return self.rank > other.rank
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, RiskLevel):
            return self.rank <= other.rank
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, RiskLevel):
            return self.rank < other.rank
        return NotImplemented


_LEVEL_ORDER = (RiskLevel.LOW, RiskLevel.MEDIUM, RiskLevel.HIGH, RiskLevel.CRITICAL)

SENSITIVITY_SCORES = {"none": 0, "low": 1, "moderate": 2, "high": 3}
DEPLOYMENT_SCORES = {"internal": 0, "restricted": 1, "public": 3}
# (upper bound inclusive, score); anything above the last bound scores 3
ACCESS_BANDS = ((10, 0), (100, 1), (10_000, 2))

RISK_FACTORS = ("data_sensitivity", "deployment_breadth", "access_count",
                "attacker_incentives", "monetary_use")


def level_for_total(total: int) -> RiskLevel:
    if not 0 <= total <= 12:
        raise ValueError(f"risk total out of range: {total}")
    if total <= 2:
        return RiskLevel.LOW
    if total <= 5:
        return RiskLevel.MEDIUM
    if total <= 8:
        return RiskLevel.HIGH
    return RiskLevel.CRITICAL


def access_score(count: int) -> int:
    for bound, score in ACCESS_BANDS:
        if count <= bound:
            return score
    return 3


def incentive_score(incentives: Iterable[str], monetary_use: TriState | None) -> int:
    incentives = set(incentives)
    monetary_gain = "monetary_gain" in incentives
    used_for_money = monetary_use is TriState.YES
    if monetary_gain and used_for_money:
        return 3
    if monetary_gain or used_for_money:
        return 2
    return 1 if incentives else 0


@dataclass(frozen=True)
class RiskProfile:
    sensitivity: int
    deployment: int
    access: int
    incentives: int
    unknowns: tuple[str, ...] = ()
    total: int = field(init=False)
    level: RiskLevel = field(init=False)

    def __post_init__(self):
        for name in ("sensitivity", "deployment", "access", "incentives"):
            if not 0 <= getattr(self, name) <= 3:
                raise InvariantError(f"{name} score must be within 0..3")
        total = self.sensitivity + self.deployment + self.access + self.incentives
        object.__setattr__(self, "total", total)
        object.__setattr__(self, "level", level_for_total(total))

    def factors(self) -> dict[str, int]:
        return {
            "sensitivity": self.sensitivity,
            "deployment": self.deployment,
            "access": self.access,
            "incentives": self.incentives,
        }


def _risk_answers(source: Document | Mapping[str, Any]) -> dict[str, Answer]:
    if isinstance(source, Document):
        if source.doc_type is not DocType.MODEL_CARD:
            raise WrongDocTypeError("risk assessment applies to model cards only")
        prefix = "security.risk_analysis."
        return {p[len(prefix):]: a for p, a in source.answers.items() if p.startswith(prefix)}
    return {k: Answer.of(v) for k, v in source.items()}


def assess_risk(source: Document | Mapping[str, Any]) -> RiskProfile:
    """Score the risk-analysis answers of a model card.

    ``source`` is either a model card or a mapping of risk-analysis field
    names to answers/raw values. Unanswered factors score 0 and are listed in
    ``unknowns``.
    """
    answers = _risk_answers(source)
    unknowns: list[str] = []

    def value(name: str) -> Any:
        answer = answers.get(name, Answer())
        if not answer.is_value:
            unknowns.append(name)
            return None
        return answer.value

    sens = value("data_sensitivity")
    depl = value("deployment_breadth")
    count = value("access_count")
    incentives = value("attacker_incentives")
    monetary = value("monetary_use")
    if monetary is not None:
        monetary = TriState(monetary)
        if monetary is TriState.UNKNOWN:
            unknowns.append("monetary_use")

    return RiskProfile(
        sensitivity=SENSITIVITY_SCORES[sens] if sens is not None else 0,
        deployment=DEPLOYMENT_SCORES[depl] if depl is not None else 0,
        access=access_score(count) if count is not None else 0,
        incentives=incentive_score(incentives or (), monetary),
        unknowns=tuple(unknowns),
    )


# --- mitigations ----------------------------------------------------------

_ALL = frozenset(Attack)

MITIGATION_MAP: Mapping[str, frozenset[Attack]] = {
    "data_sanitization": frozenset({Attack.POISONING, Attack.BACKDOOR}),
    "adversarial_training": frozenset({Attack.EVASION, Attack.POISONING}),
    "model_pruning": frozenset({Attack.BACKDOOR}),
    "inspection_sanitization": frozenset({Attack.BACKDOOR}),
    "ensemble_methods": frozenset({Attack.EVASION}),
    "watermarking": frozenset({Attack.MODEL_STEALING}),
    "query_limit": frozenset({Attack.MODEL_STEALING, Attack.MEMBERSHIP_INFERENCE,
                              Attack.ATTRIBUTE_INFERENCE, Attack.SPONGE}),
    "behavior_analysis": frozenset({Attack.MODEL_STEALING, Attack.MEMBERSHIP_INFERENCE,
                                    Attack.ATTRIBUTE_INFERENCE}),
    "user_authentication": _ALL,
    "secure_data_storage": frozenset({Attack.POISONING, Attack.BACKDOOR,
                                      Attack.MEMBERSHIP_INFERENCE, Attack.ATTRIBUTE_INFERENCE}),
}

MITIGATION_PATHS: Mapping[str, str] = {
    "data_sanitization": "security.data_security.data_sanitization",
    "adversarial_training": "security.data_security.adversarial_training",
    "model_pruning": "security.model_security.model_pruning",
    "inspection_sanitization": "security.model_security.inspection_sanitization",
    "ensemble_methods": "security.model_security.ensemble_methods",
    "watermarking": "security.model_security.watermarking",
    "query_limit": "security.stealing_inference_mitigations.query_limit",
    "behavior_analysis": "security.stealing_inference_mitigations.behavior_analysis",
    "user_authentication": "security.stealing_inference_mitigations.user_authentication",
    "secure_data_storage": "security.stealing_inference_mitigations.secure_data_storage",
}


def mitigation_map() -> dict[str, frozenset[Attack]]:
    return dict(MITIGATION_MAP)


def active_mitigations(doc: Document) -> set[str]:
    """Mitigations the card declares as in place (query_limit counts when present)."""
    active = set()
    for name, path in MITIGATION_PATHS.items():
        answer = doc.answers[path]
        if name == "query_limit":
            if answer.is_value:
                active.add(name)
        elif answer.tristate() is TriState.YES:
            active.add(name)
    return active


def uncovered_attacks(active: Iterable[str]) -> list[Attack]:
    covered: set[Attack] = set()
    for name in active:
        covered |= MITIGATION_MAP[name]
    return [a for a in Attack if a not in covered]


@dataclass(frozen=True)
class Gap:
    attack: Attack
    reason: str


def coverage_gaps(doc: Document, profile: RiskProfile | None = None) -> list[Gap]:
    """Attack types with no declared mitigation, for high/critical-risk cards only."""
    if doc.doc_type is not DocType.MODEL_CARD:
        raise WrongDocTypeError("coverage gaps apply to model cards only")
    profile = profile or assess_risk(doc)
    if profile.level < RiskLevel.HIGH:
        return []
    gaps = []
    for attack in uncovered_attacks(active_mitigations(doc)):
        options = sorted(n for n, covered in MITIGATION_MAP.items() if attack in covered)
        gaps.append(Gap(attack, f"{attack.value} ({attack.attack_class.value}) is not covered; "
                                f"consider: {', '.join(options)}"))
    return gaps


def risk_report(doc: Document) -> dict[str, Any]:
    """JSON-ready risk report: factors, unknowns, total, level and gaps."""
    profile = assess_risk(doc)
    gaps = coverage_gaps(doc, profile)
    return {
        "factors": profile.factors(),
        "unknowns": list(profile.unknowns),
        "total": profile.total,
        "level": profile.level.value,
        "gaps": [{"attack": g.attack.value, "class": g.attack.attack_class.value,
                  "reason": g.reason} for g in gaps],
        "scoring": "non-normative",
    }
