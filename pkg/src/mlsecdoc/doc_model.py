"""Typed data model for security-extended Model Cards and Datasheets.

A document is a fixed tree of sections. Every leaf of the tree is addressed by
a dotted path (``section.field`` or ``section.group.field`` for compound
answers) and holds an :class:`Answer`. The set of paths is closed: it is fully
determined by the document type, so documents can be compared, diffed and
counted without schema branching.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Any, Iterable, Iterator, Mapping

from .errors import FieldTypeError, InvalidArgumentError, InvariantError, PathError

STANDARD_VERSION = "1.0"
NA_TOKEN = "N/A"


class DocType(str, Enum):
    MODEL_CARD = "model_card"
    DATASHEET = "datasheet"


class Profile(str, Enum):
    LEGACY = "legacy"
    SECURITY_EXTENDED = "security_extended"


class TriState(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class Kind(str, Enum):
    """Value space of a leaf field."""

    TEXT = "text"
    TRISTATE = "tristate"
    TRI_DETAIL = "tri_detail"
    ENUM = "enum"
    ENUM_LIST = "enum_list"
    TEXT_LIST = "text_list"
    COUNT = "count"
    QUERY_LIMIT = "query_limit"


@dataclass(frozen=True)
class TriDetail:
    """A yes/no/unknown answer with an optional free-text detail."""

    answer: TriState
    detail: str | None = None

    def __post_init__(self):
        if not isinstance(self.answer, TriState):
            try:
                object.__setattr__(self, "answer", TriState(self.answer))
            except ValueError:
                raise FieldTypeError(f"not a tri-state answer: {self.answer!r}") from None
        if self.detail == "":
            object.__setattr__(self, "detail", None)


@dataclass(frozen=True)
class QueryLimit:
    max_queries: int
    window_seconds: int


class AnswerState(str, Enum):
    UNANSWERED = "unanswered"
    NOT_APPLICABLE = "not_applicable"
    VALUE = "value"


@dataclass(frozen=True)
class Answer:
    state: AnswerState = AnswerState.UNANSWERED
    value: Any = None

    def __post_init__(self):
        if self.state is not AnswerState.VALUE and self.value is not None:
            raise InvariantError(f"{self.state.value} answers carry no value")
        if self.state is AnswerState.VALUE:
            if self.value is None:
                raise InvariantError("value answers need a payload")
            if self.value == NA_TOKEN:
                raise InvariantError(f"{NA_TOKEN!r} is reserved for not-applicable answers")
            if isinstance(self.value, list):
                object.__setattr__(self, "value", tuple(self.value))

    @classmethod
    def of(cls, value: Any) -> "Answer":
        """Wrap a raw value; ``None`` and ``"N/A"`` map to the two empty states."""
        if isinstance(value, Answer):
            return value
        if value is None:
            return UNANSWERED
        if isinstance(value, str) and value == NA_TOKEN:
            return NOT_APPLICABLE
        return cls(AnswerState.VALUE, value)

    @property
    def is_value(self) -> bool:
        return self.state is AnswerState.VALUE

    @property
    def is_unanswered(self) -> bool:
        return self.state is AnswerState.UNANSWERED

    @property
    def is_not_applicable(self) -> bool:
        return self.state is AnswerState.NOT_APPLICABLE

    def tristate(self) -> TriState | None:
        """The tri-state posture of a TRISTATE or TRI_DETAIL answer, if any."""
        if not self.is_value:
            return None
        if isinstance(self.value, TriDetail):
            return self.value.answer
        if isinstance(self.value, TriState):
            return self.value
        return None


UNANSWERED = Answer()
NOT_APPLICABLE = Answer(AnswerState.NOT_APPLICABLE)


# --- schema ---------------------------------------------------------------

SENSITIVITY_LEVELS = ("none", "low", "moderate", "high")
DEPLOYMENT_BREADTHS = ("internal", "restricted", "public")
ACCESS_LEVELS = ("end_user", "api_consumer", "developer", "administrator")
ATTACKER_INCENTIVES = ("monetary_gain", "espionage", "sabotage", "reputation", "other")


@dataclass(frozen=True)
class FieldSpec:
    path: str
    kind: Kind
    choices: tuple[str, ...] = ()
    people_conditional: bool = False
    security: bool = False

    @property
    def section(self) -> str:
        return self.path.split(".", 1)[0]

    @property
    def key(self) -> str:
        """Path relative to the section."""
        return self.path.split(".", 1)[1]

    @property
    def group(self) -> str | None:
        parts = self.path.split(".")
        return ".".join(parts[:2]) if len(parts) == 3 else None


def _text_fields(section: str, keys: Iterable[str], **flags) -> list[FieldSpec]:
    return [FieldSpec(f"{section}.{k}", Kind.TEXT, **flags) for k in keys]


def _updates_group(section: str, name: str, security: bool) -> list[FieldSpec]:
    base = f"{section}.{name}"
    return [
        FieldSpec(f"{base}.planned", Kind.TRISTATE, security=security),
        FieldSpec(f"{base}.frequency", Kind.TEXT, security=security),
        FieldSpec(f"{base}.by_whom", Kind.TEXT, security=security),
        FieldSpec(f"{base}.communication", Kind.TEXT, security=security),
    ]


def _build_model_card() -> list[FieldSpec]:
    specs: list[FieldSpec] = []
    legacy = {
        "model_details": (
            "developers", "date", "version", "version_differences", "architecture",
            "model_type", "training_algorithms", "training_parameters",
            "training_features", "paper_resources", "citation", "license", "contact",
        ),
        "intended_use": (
            "primary_uses", "primary_users", "out_of_scope_uses",
            "similar_model_recommendations",
        ),
        "factors": ("relevant_factors", "evaluation_factors"),
        "metrics": ("performance_measures", "decision_thresholds", "variation_approaches"),
        "evaluation_data": ("datasets", "motivation", "preprocessing"),
        "training_data": ("datasets", "motivation", "preprocessing"),
        "quantitative_analyses": ("unitary_results", "intersectional_results"),
        "ethical_considerations": (
            "risks_harms_mitigations", "human_impact", "sensitive_data",
            "challenging_use_cases",
        ),
        "caveats_recommendations": ("caveats",),
    }
    for section, keys in legacy.items():
        specs += _text_fields(section, keys)

    def sec(group: str, name: str, kind: Kind, choices: tuple[str, ...] = ()) -> FieldSpec:
        return FieldSpec(f"security.{group}.{name}", kind, choices, security=True)

    specs += [
        sec("risk_analysis", "data_sensitivity", Kind.ENUM, SENSITIVITY_LEVELS),
        sec("risk_analysis", "deployment_breadth", Kind.ENUM, DEPLOYMENT_BREADTHS),
        sec("risk_analysis", "access_count", Kind.COUNT),
        sec("risk_analysis", "access_levels", Kind.ENUM_LIST, ACCESS_LEVELS),
        sec("risk_analysis", "attacker_incentives", Kind.ENUM_LIST, ATTACKER_INCENTIVES),
        sec("risk_analysis", "monetary_use", Kind.TRISTATE),
        sec("data_security", "training_data_sources", Kind.TEXT_LIST),
        sec("data_security", "evaluation_data_sources", Kind.TEXT_LIST),
        sec("data_security", "data_sanitization", Kind.TRI_DETAIL),
        sec("data_security", "adversarial_training", Kind.TRI_DETAIL),
        sec("model_security", "model_pruning", Kind.TRI_DETAIL),
        sec("model_security", "ensemble_methods", Kind.TRI_DETAIL),
        sec("model_security", "inspection_sanitization", Kind.TRI_DETAIL),
        sec("model_security", "watermarking", Kind.TRI_DETAIL),
        sec("stealing_inference_mitigations", "query_limit", Kind.QUERY_LIMIT),
        sec("stealing_inference_mitigations", "behavior_analysis", Kind.TRISTATE),
        sec("stealing_inference_mitigations", "user_authentication", Kind.TRISTATE),
        sec("stealing_inference_mitigations", "secure_data_storage", Kind.TRISTATE),
        sec("security_testing", "penetration_testing", Kind.TRISTATE),
        sec("security_testing", "results", Kind.TEXT),
        sec("security_testing", "toolkit_reference", Kind.TEXT),
    ]
    return specs


def _build_datasheet() -> list[FieldSpec]:
    specs: list[FieldSpec] = []
    specs += _text_fields("motivation", ("purpose", "creators", "funding", "comments"))
    specs.append(FieldSpec("motivation.attack_risk_purpose", Kind.TRI_DETAIL, security=True))
    specs += _text_fields("composition", (
        "instance_types", "sample_or_complete", "raw_or_processed", "labels_targets",
        "missing_info", "instance_relationships", "data_splits",
        "errors_noise_redundancies", "self_contained", "confidential_data",
        "offensive_content",
    ))
    specs += _text_fields("composition", (
        "identifies_subpopulations", "individuals_identifiable",
        "sensitive_personal_data", "people_comments",
    ), people_conditional=True)
    specs += _text_fields("collection", (
        "acquisition_method", "mechanisms_validation", "sampling_strategy",
        "personnel_compensation", "timeframe", "ethical_review",
    ))
    specs += _text_fields("collection", (
        "obtained_directly_or_third_party", "individuals_notified", "consent_obtained",
        "consent_revocation_mechanism", "impact_analysis", "collection_comments",
    ), people_conditional=True)
    specs += _text_fields("preprocessing", (
        "processing_done", "raw_data_available", "processing_software_available", "comments",
    ))
    specs.append(FieldSpec("preprocessing.adversarial_mitigations", Kind.TRI_DETAIL, security=True))
    specs += _text_fields("uses", (
        "prior_tasks", "usage_repository", "other_possible_tasks",
        "composition_impact_future_uses", "prohibited_tasks", "comments",
    ))
    specs.append(FieldSpec("uses.known_attacks_record", Kind.TRI_DETAIL, security=True))
    specs += _text_fields("distribution", (
        "external_distribution", "method_and_timing", "license_terms", "export_controls",
        "comments",
    ))
    specs += _text_fields("maintenance", ("maintainer_contact", "erratum"))
    specs += _updates_group("maintenance", "updates_planned", security=False)
    specs += _text_fields("maintenance", (
        "retention_limits", "older_versions_supported", "contribution_mechanism", "comments",
    ))
    specs += _updates_group("maintenance", "security_updates", security=True)
    return specs


SECTIONS: Mapping[DocType, tuple[str, ...]] = MappingProxyType({
    DocType.MODEL_CARD: (
        "model_details", "intended_use", "factors", "metrics", "evaluation_data",
        "training_data", "quantitative_analyses", "ethical_considerations",
        "caveats_recommendations", "security",
    ),
    DocType.DATASHEET: (
        "motivation", "composition", "collection", "preprocessing", "uses",
        "distribution", "maintenance",
    ),
})

SECTION_TITLES: Mapping[str, str] = MappingProxyType({
    "model_details": "Model Details",
    "intended_use": "Intended Use",
    "factors": "Factors",
    "metrics": "Metrics",
    "evaluation_data": "Evaluation Data",
    "training_data": "Training Data",
    "quantitative_analyses": "Quantitative Analyses",
    "ethical_considerations": "Ethical Considerations",
    "caveats_recommendations": "Caveats and Recommendations",
    "security": "Security",
    "motivation": "Motivation",
    "composition": "Composition",
    "collection": "Collection Process",
    "preprocessing": "Preprocessing/Cleaning/Labeling",
    "uses": "Uses",
    "distribution": "Distribution",
    "maintenance": "Maintenance",
})

SECURITY_SUBSECTIONS: tuple[str, ...] = (
    "risk_analysis", "data_security", "model_security",
    "stealing_inference_mitigations", "security_testing",
)
SECURITY_SUBSECTION_TITLES: Mapping[str, str] = MappingProxyType({
    "risk_analysis": "Risk Analysis",
    "data_security": "Training and Evaluation Data",
    "model_security": "Model Security",
    "stealing_inference_mitigations": "Stealing and Inference Attack Mitigations",
    "security_testing": "Security Testing",
})

DOC_TITLE_PREFIX: Mapping[DocType, str] = MappingProxyType({
    DocType.MODEL_CARD: "Model Card",
    DocType.DATASHEET: "Datasheet",
})

FIELDS: Mapping[DocType, tuple[FieldSpec, ...]] = MappingProxyType({
    DocType.MODEL_CARD: tuple(_build_model_card()),
    DocType.DATASHEET: tuple(_build_datasheet()),
})
_FIELD_INDEX = {dt: {s.path: s for s in specs} for dt, specs in FIELDS.items()}

# Security-added datasheet questions, each addressed by its field or group path.
DATASHEET_SECURITY_FIELDS: tuple[str, ...] = (
    "motivation.attack_risk_purpose",
    "preprocessing.adversarial_mitigations",
    "uses.known_attacks_record",
    "maintenance.security_updates",
)

RELATES_TO_PEOPLE = "relates_to_people"


def field_specs(doc_type: DocType | str) -> tuple[FieldSpec, ...]:
    return FIELDS[DocType(doc_type)]


def field_spec(doc_type: DocType | str, path: str) -> FieldSpec:
    try:
        return _FIELD_INDEX[DocType(doc_type)][path]
    except KeyError:
        raise PathError(f"unknown field path for {DocType(doc_type).value}: {path!r}") from None


def group_paths(doc_type: DocType | str, prefix: str) -> list[str]:
    """Leaf paths below ``prefix`` (a section or compound group), in schema order."""
    dotted = prefix + "."
    return [s.path for s in field_specs(doc_type) if s.path.startswith(dotted)]


def security_paths(doc_type: DocType | str) -> list[str]:
    return [s.path for s in field_specs(doc_type) if s.security]


# --- value checks ---------------------------------------------------------

def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def coerce_value(spec: FieldSpec, raw: Any) -> Any:
    """Convert a raw Python/JSON value into the canonical value for ``spec``.

    Raises FieldTypeError when the value cannot belong to the field and
    InvariantError when it fits the type but breaks a field rule.
    """
    kind = spec.kind
    where = spec.path
    if kind is Kind.TEXT:
        if not isinstance(raw, str):
            raise FieldTypeError(f"{where}: expected text, got {type(raw).__name__}")
        return raw
    if kind is Kind.TRISTATE:
        try:
            return TriState(raw)
        except ValueError:
            raise FieldTypeError(f"{where}: expected yes/no/unknown, got {raw!r}") from None
    if kind is Kind.TRI_DETAIL:
        if isinstance(raw, TriDetail):
            value = raw
        elif isinstance(raw, Mapping):
            extra = set(raw) - {"answer", "detail"}
            if extra or "answer" not in raw:
                raise FieldTypeError(f"{where}: expected {{answer, detail}}, got keys {sorted(raw)}")
            detail = raw.get("detail")
            if detail is not None and not isinstance(detail, str):
                raise FieldTypeError(f"{where}: detail must be text")
            value = TriDetail(_tri(where, raw["answer"]), detail)
        elif isinstance(raw, tuple) and len(raw) == 2:
            if raw[1] is not None and not isinstance(raw[1], str):
                raise FieldTypeError(f"{where}: detail must be text")
            value = TriDetail(_tri(where, raw[0]), raw[1])
        else:
            value = TriDetail(_tri(where, raw))
        if value.detail is not None and value.answer is not TriState.YES:
            raise InvariantError(f"{where}: a detail is only allowed when the answer is yes")
        return value
    if kind is Kind.ENUM:
        if not isinstance(raw, str) or raw not in spec.choices:
            raise FieldTypeError(f"{where}: expected one of {', '.join(spec.choices)}, got {raw!r}")
        return raw
    if kind is Kind.ENUM_LIST:
        items = _as_list(where, raw)
        bad = [i for i in items if not isinstance(i, str) or i not in spec.choices]
        if bad:
            raise FieldTypeError(f"{where}: {bad[0]!r} is not one of {', '.join(spec.choices)}")
        return tuple(items)
    if kind is Kind.TEXT_LIST:
        items = _as_list(where, raw)
        if not all(isinstance(i, str) for i in items):
            raise FieldTypeError(f"{where}: list items must be text")
        return tuple(items)
    if kind is Kind.COUNT:
        if not _is_int(raw):
            raise FieldTypeError(f"{where}: expected a non-negative integer, got {raw!r}")
        if raw < 0:
            raise InvariantError(f"{where}: count must be >= 0")
        return raw
    if kind is Kind.QUERY_LIMIT:
        if isinstance(raw, QueryLimit):
            mq, ws = raw.max_queries, raw.window_seconds
        elif isinstance(raw, Mapping):
            if set(raw) != {"max_queries", "window_seconds"}:
                raise FieldTypeError(f"{where}: expected {{max_queries, window_seconds}}")
            mq, ws = raw["max_queries"], raw["window_seconds"]
        else:
            raise FieldTypeError(f"{where}: expected a query limit, got {type(raw).__name__}")
        if not (_is_int(mq) and _is_int(ws)):
            raise FieldTypeError(f"{where}: max_queries and window_seconds must be integers")
        if mq < 1 or ws < 1:
            raise InvariantError(f"{where}: max_queries and window_seconds must be positive")
        return QueryLimit(mq, ws)
    raise AssertionError(kind)


def _tri(where: str, raw: Any) -> TriState:
    try:
        return TriState(raw)
    except ValueError:
        raise FieldTypeError(f"{where}: expected yes/no/unknown, got {raw!r}") from None


def _as_list(where: str, raw: Any) -> list:
    if isinstance(raw, (list, tuple)):
        return list(raw)
    raise FieldTypeError(f"{where}: expected a list, got {type(raw).__name__}")


def check_answer(spec: FieldSpec, answer: Any) -> Answer:
    """Normalize ``answer`` (an Answer or a raw value) for the field ``spec``."""
    answer = Answer.of(answer)
    if not answer.is_value:
        return answer
    return Answer(AnswerState.VALUE, coerce_value(spec, answer.value))


# --- documents ------------------------------------------------------------

@dataclass(frozen=True)
class DocumentMeta:
    doc_type: DocType
    title: str
    profile: Profile = Profile.SECURITY_EXTENDED
    standard_version: str = STANDARD_VERSION

    def __post_init__(self):
        object.__setattr__(self, "doc_type", DocType(self.doc_type))
        object.__setattr__(self, "profile", Profile(self.profile))
        if not isinstance(self.title, str) or not self.title.strip():
            raise InvalidArgumentError("title must be non-empty")
        if self.title != self.title.strip() or "\n" in self.title or "\r" in self.title:
            raise InvalidArgumentError("title must be a single stripped line")
        if self.standard_version != STANDARD_VERSION:
            raise InvalidArgumentError(
                f"unsupported standard_version {self.standard_version!r}, expected {STANDARD_VERSION!r}"
            )


@dataclass(frozen=True)
class Document:
    """An immutable model card or datasheet.

    ``answers`` maps every leaf path of the document type to its Answer, in
    schema order. ``relates_to_people`` is only meaningful for datasheets and
    is ``None`` for model cards.
    """

    meta: DocumentMeta
    answers: Mapping[str, Answer]
    relates_to_people: Answer | None = None

    def __post_init__(self):
        specs = field_specs(self.meta.doc_type)
        given = dict(self.answers)
        unknown = set(given) - {s.path for s in specs}
        if unknown:
            raise PathError(f"unknown field paths: {', '.join(sorted(unknown))}")
        ordered = {s.path: check_answer(s, given.get(s.path, UNANSWERED)) for s in specs}
        object.__setattr__(self, "answers", MappingProxyType(ordered))
        if self.meta.doc_type is DocType.DATASHEET:
            rtp = Answer.of(self.relates_to_people)
            if rtp.is_value:
                rtp = Answer(AnswerState.VALUE, _tri(RELATES_TO_PEOPLE, rtp.value))
            object.__setattr__(self, "relates_to_people", rtp)
        elif self.relates_to_people is not None:
            raise PathError("relates_to_people only exists on datasheets")

    @property
    def doc_type(self) -> DocType:
        return self.meta.doc_type

    @property
    def profile(self) -> Profile:
        return self.meta.profile

    def get(self, path: str) -> Answer:
        if path == RELATES_TO_PEOPLE and self.doc_type is DocType.DATASHEET:
            return self.relates_to_people
        try:
            return self.answers[path]
        except KeyError:
            raise PathError(f"unknown field path: {path!r}") from None

    def __getitem__(self, path: str) -> Answer:
        return self.get(path)

    def section(self, key: str) -> dict[str, Answer]:
        """Answers of one section keyed by their section-relative path."""
        if key not in SECTIONS[self.doc_type]:
            raise PathError(f"unknown section: {key!r}")
        prefix = key + "."
        return {p[len(prefix):]: a for p, a in self.answers.items() if p.startswith(prefix)}

    @property
    def sections(self) -> dict[str, dict[str, Answer]]:
        return {key: self.section(key) for key in SECTIONS[self.doc_type]}

    def people_related(self) -> bool:
        return self.relates_to_people is not None and self.relates_to_people.tristate() is TriState.YES

    def __iter__(self) -> Iterator[tuple[str, Answer]]:
        return iter(self.answers.items())


def new_empty(doc_type: DocType | str, profile: Profile | str, title: str) -> Document:
    if not isinstance(title, str) or not title.strip():
        raise InvalidArgumentError("title must be non-empty")
    meta = DocumentMeta(DocType(doc_type), title.strip(), Profile(profile))
    rtp = UNANSWERED if meta.doc_type is DocType.DATASHEET else None
    return Document(meta, {}, rtp)


def set_field(doc: Document, path: str, answer: Any) -> Document:
    """Return a copy of ``doc`` with ``path`` set to ``answer``.

    ``path`` may also name a compound group (e.g. ``maintenance.security_updates``);
    the answer is then a mapping of sub-keys, or an empty state applied to all
    of them.
    """
    if path == RELATES_TO_PEOPLE:
        if doc.doc_type is not DocType.DATASHEET:
            raise PathError("relates_to_people only exists on datasheets")
        rtp = Answer.of(answer)
        if rtp.is_not_applicable:
            raise FieldTypeError("relates_to_people cannot be N/A")
        if rtp.is_value:
            rtp = Answer(AnswerState.VALUE, _tri(RELATES_TO_PEOPLE, rtp.value))
        return Document(doc.meta, doc.answers, rtp)

    updates: dict[str, Answer] = {}
    if path in _FIELD_INDEX[doc.doc_type]:
        updates[path] = check_answer(field_spec(doc.doc_type, path), answer)
    else:
        leaves = group_paths(doc.doc_type, path) if path.count(".") == 1 else []
        if not leaves:
            raise PathError(f"unknown field path for {doc.doc_type.value}: {path!r}")
        wrapped = Answer.of(answer) if not isinstance(answer, Mapping) else None
        if wrapped is not None and wrapped.is_value:
            raise FieldTypeError(f"{path}: a compound answer needs a mapping of sub-answers")
        sub = {} if wrapped is not None else dict(answer)
        known = {p.rsplit(".", 1)[1] for p in leaves}
        extra = set(sub) - known
        if extra:
            raise PathError(f"{path}: unknown sub-keys {', '.join(sorted(extra))}")
        for leaf in leaves:
            name = leaf.rsplit(".", 1)[1]
            value = wrapped if wrapped is not None else sub.get(name, UNANSWERED)
            updates[leaf] = check_answer(field_spec(doc.doc_type, leaf), value)

    merged = dict(doc.answers)
    merged.update(updates)
    return Document(doc.meta, merged, doc.relates_to_people)


def is_excluded_by_profile(spec: FieldSpec, profile: Profile) -> bool:
    return profile is Profile.LEGACY and spec.security


def applicable_fields(doc: Document) -> list[str]:
    """Field paths whose answers count toward completeness, in schema order."""
    people = doc.people_related()
    out = []
    for spec in field_specs(doc.doc_type):
        if spec.people_conditional and not people:
            continue
        if is_excluded_by_profile(spec, doc.profile):
            continue
        if doc.answers[spec.path].is_not_applicable:
            continue
        out.append(spec.path)
    return out


def with_meta(doc: Document, **changes: Any) -> Document:
    """Copy of ``doc`` with selected DocumentMeta fields replaced."""
    values = {f: getattr(doc.meta, f) for f in ("doc_type", "title", "profile", "standard_version")}
    values.update(changes)
    if DocType(values["doc_type"]) is not doc.doc_type:
        raise InvalidArgumentError("doc_type cannot be changed")
    return Document(DocumentMeta(**values), doc.answers, doc.relates_to_people)
