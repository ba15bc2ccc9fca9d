"""Completeness and security-documentation scores."""

from __future__ import annotations

from dataclasses import dataclass

from .doc_model import (
    DocType,
    Document,
    Profile,
    SECTIONS,
    applicable_fields,
    security_paths,
)


@dataclass(frozen=True)
class ScoreReport:
    per_section: dict[str, float]
    overall: float
    security_score: float
    answered_count: int
    applicable_count: int

    def summary(self) -> str:
        return (f"overall {self.overall:.1%} ({self.answered_count}/{self.applicable_count} fields), "
                f"security {self.security_score:.1%}")

    def to_dict(self) -> dict:
        return {
            "per_section": dict(self.per_section),
            "overall": self.overall,
            "security_score": self.security_score,
            "answered_count": self.answered_count,
            "applicable_count": self.applicable_count,
        }


def _ratio(answered: int, applicable: int, empty: float) -> float:
    return answered / applicable if applicable else empty


def score(doc: Document) -> ScoreReport:
    """Fraction of applicable fields answered, per section and overall.

    Every leaf (including each sub-answer of a compound) is one unit. The
    security score covers the security section of a model card or the
    security-added questions of a datasheet, whatever the profile, and is 0.0
    when none of those fields is applicable.
    """
    applicable = applicable_fields(doc)
    sections = list(SECTIONS[doc.doc_type])
    if doc.doc_type is DocType.MODEL_CARD and doc.profile is Profile.LEGACY:
        sections.remove("security")

    per_section = {}
    for key in sections:
        prefix = key + "."
        paths = [p for p in applicable if p.startswith(prefix)]
        answered = sum(doc.answers[p].is_value for p in paths)
        per_section[key] = _ratio(answered, len(paths), 1.0)

    answered_total = sum(doc.answers[p].is_value for p in applicable)

    sec = [p for p in security_paths(doc.doc_type) if not doc.answers[p].is_not_applicable]
    sec_answered = sum(doc.answers[p].is_value for p in sec)

    return ScoreReport(
        per_section=per_section,
        overall=_ratio(answered_total, len(applicable), 1.0),
        security_score=_ratio(sec_answered, len(sec), 0.0),
        answered_count=answered_total,
        applicable_count=len(applicable),
    )
