"""Security-extended Model Cards and Datasheets for Datasets.

Parse, validate, score and render ML documentation that carries a dedicated
security section (model cards) or security questions (datasheets).
"""

__version__ = "0.1.0"

from .doc_model import (  # noqa: E402
    NOT_APPLICABLE,
    UNANSWERED,
    Answer,
    DocType,
    Document,
    Profile,
    QueryLimit,
    TriDetail,
    TriState,
    applicable_fields,
    new_empty,
    set_field,
)
from .risk_engine import assess_risk, attack_taxonomy, coverage_gaps, mitigation_map  # noqa: E402
from .scorer import score  # noqa: E402
from .serialization import (  # noqa: E402
    parse_canonical,
    parse_markdown,
    render_markdown,
    serialize_canonical,
)
from .validator import rule_catalog, validate  # noqa: E402

__all__ = [
    "NOT_APPLICABLE", "UNANSWERED", "Answer", "DocType", "Document", "Profile",
    "QueryLimit", "TriDetail", "TriState", "applicable_fields", "new_empty", "set_field",
    "assess_risk", "attack_taxonomy", "coverage_gaps", "mitigation_map", "score",
    "parse_canonical", "parse_markdown", "render_markdown", "serialize_canonical",
    "rule_catalog", "validate",
]
