"""Rule engine that lints a document against a documentation profile."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Callable, Iterator

from .doc_model import (
    DATASHEET_SECURITY_FIELDS,
    DocType,
    Document,
    Profile,
    TriState,
    field_specs,
    group_paths,
    security_paths,
)
from .risk_engine import RiskLevel, assess_risk, coverage_gaps


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass(frozen=True)
class Rule:
    rule_id: str
    severity: Severity
    description: str


@dataclass(frozen=True, order=True)
class Diagnostic:
    path: str
    rule_id: str
    severity: Severity
    message: str

    def to_line(self) -> str:
        return f"{self.severity.value} {self.rule_id} {self.path}: {self.message}"

    def to_dict(self) -> dict[str, str]:
        return {"rule_id": self.rule_id, "severity": self.severity.value,
                "path": self.path, "message": self.message}


_CATALOG = (
    Rule("STR001", Severity.ERROR,
         "Security-extended model card whose security section is entirely unanswered."),
    Rule("STR002", Severity.ERROR,
         "Security-extended datasheet with all four security questions unanswered."),
    Rule("CON001", Severity.ERROR,
         "Dataset relates to people but a people-specific question is unanswered."),
    Rule("CON002", Severity.WARNING,
         "Dataset is not marked as relating to people but a people-specific question is answered."),
    Rule("SEC001", Severity.ERROR,
         "Security updates are planned but their frequency or communication is unanswered."),
    Rule("SEC002", Severity.WARNING,
         "User behavior analysis is in place but no query limit is documented."),
    Rule("SEC003", Severity.WARNING,
         "A security question is answered 'unknown'."),
    Rule("SEC004", Severity.WARNING,
         "Penetration testing took place but its results are unanswered."),
    Rule("SEC005", Severity.INFO,
         "No security testing is documented; consider referencing an open-source ML security testing toolkit."),
    Rule("GAP001", Severity.WARNING,
         "High or critical risk card with an attack type not covered by any declared mitigation."),
)
_BY_ID = {r.rule_id: r for r in _CATALOG}


def rule_catalog() -> list[Rule]:
    return list(_CATALOG)


def _diag(rule_id: str, path: str, message: str) -> Diagnostic:
    return Diagnostic(path, rule_id, _BY_ID[rule_id].severity, message)


Check = Callable[[Document], Iterator[Diagnostic]]


def _str001(doc: Document) -> Iterator[Diagnostic]:
    if doc.doc_type is DocType.MODEL_CARD:
        if all(doc.answers[p].is_unanswered for p in security_paths(doc.doc_type)):
            yield _diag("STR001", "security", "security section is entirely unanswered")


def _str002(doc: Document) -> Iterator[Diagnostic]:
    if doc.doc_type is not DocType.DATASHEET:
        return
    leaves = [p for key in DATASHEET_SECURITY_FIELDS
              for p in (group_paths(doc.doc_type, key) or [key])]
    if all(doc.answers[p].is_unanswered for p in leaves):
        yield _diag("STR002", DATASHEET_SECURITY_FIELDS[0],
                    "none of the four security questions is answered")


def _con001(doc: Document) -> Iterator[Diagnostic]:
    if doc.doc_type is not DocType.DATASHEET or not doc.people_related():
        return
    for spec in field_specs(doc.doc_type):
        if spec.people_conditional and doc.answers[spec.path].is_unanswered:
            yield _diag("CON001", spec.path, "dataset relates to people; this question needs an answer")


def _con002(doc: Document) -> Iterator[Diagnostic]:
    if doc.doc_type is not DocType.DATASHEET:
        return
    if doc.relates_to_people.tristate() not in (TriState.NO, TriState.UNKNOWN):
        return
    for spec in field_specs(doc.doc_type):
        if spec.people_conditional and doc.answers[spec.path].is_value:
            yield _diag("CON002", spec.path,
                        "answered although relates_to_people is "
                        f"{doc.relates_to_people.value.value}")


def _sec001(doc: Document) -> Iterator[Diagnostic]:
    if doc.doc_type is not DocType.DATASHEET:
        return
    base = "maintenance.security_updates"
    if doc.answers[f"{base}.planned"].tristate() is not TriState.YES:
        return
    for sub in ("frequency", "communication"):
        if doc.answers[f"{base}.{sub}"].is_unanswered:
            yield _diag("SEC001", f"{base}.{sub}", f"security updates are planned; state the {sub}")


def _sec002(doc: Document) -> Iterator[Diagnostic]:
    if doc.doc_type is not DocType.MODEL_CARD:
        return
    base = "security.stealing_inference_mitigations"
    if (doc.answers[f"{base}.behavior_analysis"].tristate() is TriState.YES
            and not doc.answers[f"{base}.query_limit"].is_value):
        yield _diag("SEC002", f"{base}.query_limit",
                    "behavior analysis is in place but no query limit is documented")


def _sec003(doc: Document) -> Iterator[Diagnostic]:
    for path in security_paths(doc.doc_type):
        if doc.answers[path].tristate() is TriState.UNKNOWN:
            yield _diag("SEC003", path, "answered 'unknown'; document this once it is known")


def _sec004(doc: Document) -> Iterator[Diagnostic]:
    if doc.doc_type is not DocType.MODEL_CARD:
        return
    base = "security.security_testing"
    if (doc.answers[f"{base}.penetration_testing"].tristate() is TriState.YES
            and doc.answers[f"{base}.results"].is_unanswered):
        yield _diag("SEC004", f"{base}.results", "penetration testing took place; record its results")


def _sec005(doc: Document) -> Iterator[Diagnostic]:
    if doc.doc_type is not DocType.MODEL_CARD:
        return
    base = "security.security_testing"
    if (doc.answers[f"{base}.penetration_testing"].tristate() in (TriState.NO, TriState.UNKNOWN)
            and doc.answers[f"{base}.toolkit_reference"].is_unanswered):
        yield _diag("SEC005", f"{base}.toolkit_reference",
                    "no penetration testing documented; link an open-source ML security testing toolkit")


def _gap001(doc: Document) -> Iterator[Diagnostic]:
    if doc.doc_type is not DocType.MODEL_CARD:
        return
    profile = assess_risk(doc)
    if profile.level < RiskLevel.HIGH:
        return
    for gap in coverage_gaps(doc, profile):
        yield _diag("GAP001", "security", f"risk level {profile.level.value}: {gap.reason}")


# Legacy documents are only checked for internal consistency.
_LEGACY_CHECKS: tuple[Check, ...] = (_con001, _con002)
_EXTENDED_CHECKS: tuple[Check, ...] = (
    _str001, _str002, _con001, _con002, _sec001, _sec002, _sec003, _sec004, _sec005, _gap001,
)


def validate(doc: Document, profile: Profile | str | None = None) -> list[Diagnostic]:
    """Lint ``doc`` under ``profile`` (default: the document's own profile).

    Diagnostics are sorted by (path, rule_id); findings sharing both keep
    their emission order.
    """
    profile = Profile(profile) if profile is not None else doc.profile
    checks = _EXTENDED_CHECKS if profile is Profile.SECURITY_EXTENDED else _LEGACY_CHECKS
    found = [d for check in checks for d in check(doc)]
    return sorted(found, key=lambda d: (d.path, d.rule_id))


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)


def format_text(diagnostics: list[Diagnostic]) -> str:
    return "".join(d.to_line() + "\n" for d in diagnostics)


def format_json(diagnostics: list[Diagnostic]) -> str:
    return json.dumps([d.to_dict() for d in diagnostics], indent=2) + "\n"


def catalog_as_dicts() -> list[dict[str, str]]:
    return [{**asdict(r), "severity": r.severity.value} for r in _CATALOG]
