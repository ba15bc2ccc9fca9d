import difflib
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from docgen import full_model_card, random_document
from mlsecdoc.doc_model import NOT_APPLICABLE, applicable_fields, new_empty, set_field
from mlsecdoc.errors import DocEncodingError, ParseError
from mlsecdoc.scorer import score
from mlsecdoc.serialization import (
    REDACTED,
    IssueKind,
    load_document,
    parse_canonical,
    parse_markdown,
    render_markdown,
    serialize_canonical,
)

SECURITY_H3 = ["Risk Analysis", "Training and Evaluation Data", "Model Security",
               "Stealing and Inference Attack Mitigations", "Security Testing"]


def test_empty_card_roundtrip():
    doc = new_empty("model_card", "security_extended", "t")
    assert parse_canonical(serialize_canonical(doc)) == doc


def test_empty_card_lists_all_sections():
    data = json.loads(serialize_canonical(new_empty("model_card", "security_extended", "t")))
    assert list(data) == ["meta", "sections"]
    assert list(data["sections"]) == [
        "model_details", "intended_use", "factors", "metrics", "evaluation_data",
        "training_data", "quantitative_analyses", "ethical_considerations",
        "caveats_recommendations", "security",
    ]


def test_datasheet_has_relates_to_people_key():
    data = json.loads(serialize_canonical(new_empty("datasheet", "legacy", "t")))
    assert list(data) == ["meta", "relates_to_people", "sections"]


def test_misspelled_section_is_single_unknown_key():
    data = json.loads(serialize_canonical(new_empty("model_card", "security_extended", "t")))
    data["sections"]["securty"] = data["sections"].pop("security")
    with pytest.raises(ParseError) as info:
        parse_canonical(json.dumps(data))
    issues = info.value.issues
    assert len(issues) == 1
    assert issues[0].kind is IssueKind.UNKNOWN_KEY
    assert "securty" in issues[0].message


def test_unknown_field_key_rejected():
    data = json.loads(serialize_canonical(new_empty("model_card", "legacy", "t")))
    data["sections"]["metrics"]["accuracy"] = "0.9"
    with pytest.raises(ParseError) as info:
        parse_canonical(json.dumps(data))
    assert [i.kind for i in info.value.issues] == [IssueKind.UNKNOWN_KEY]
    assert "accuracy" in info.value.issues[0].message


def test_missing_section_materializes_unanswered():
    doc = set_field(new_empty("datasheet", "security_extended", "t"), "relates_to_people", "no")
    data = json.loads(serialize_canonical(doc))
    del data["sections"]["maintenance"]
    parsed = parse_canonical(json.dumps(data))
    assert all(a.is_unanswered for a in parsed.section("maintenance").values())
    assert parsed == doc
    assert sum(p.startswith("maintenance.") for p in applicable_fields(parsed)) == 14
    assert score(parsed).per_section["maintenance"] == 0.0


def test_type_mismatch_reported():
    data = json.loads(serialize_canonical(new_empty("model_card", "security_extended", "t")))
    data["sections"]["security"]["risk_analysis"]["access_count"] = "many"
    data["sections"]["security"]["model_security"]["watermarking"] = {"answer": "no", "detail": "x"}
    with pytest.raises(ParseError) as info:
        parse_canonical(json.dumps(data))
    assert [i.kind for i in info.value.issues] == [IssueKind.TYPE_MISMATCH] * 2


@pytest.mark.parametrize("text,kind", [
    ("[1, 2]", IssueKind.MALFORMED),
    ("{not json", IssueKind.MALFORMED),
    ('{"sections": {}}', IssueKind.MISSING_SECTION),
])
def test_structural_failures(text, kind):
    with pytest.raises(ParseError) as info:
        parse_canonical(text)
    assert info.value.issues[0].kind is kind


def test_non_utf8_is_encoding_error():
    with pytest.raises(DocEncodingError):
        parse_canonical(b"\xff\xfe{}")
    with pytest.raises(DocEncodingError):
        parse_markdown(b"# Model Card: \xff")


def test_na_encoding():
    doc = set_field(new_empty("model_card", "legacy", "t"), "metrics.decision_thresholds", NOT_APPLICABLE)
    data = json.loads(serialize_canonical(doc))
    assert data["sections"]["metrics"]["decision_thresholds"] == "N/A"
    assert data["sections"]["metrics"]["performance_measures"] is None


def test_serialize_deterministic():
    doc = full_model_card()
    assert serialize_canonical(doc) == serialize_canonical(doc)


@given(st.integers(0, 2**32))
@settings(max_examples=300)
def test_canonical_roundtrip_property(seed):
    doc = random_document(random.Random(seed))
    assert parse_canonical(serialize_canonical(doc)) == doc


@given(st.integers(0, 2**32))
@settings(max_examples=300)
def test_markdown_roundtrip_property(seed):
    doc = random_document(random.Random(seed))
    parsed, issues = parse_markdown(render_markdown(doc))
    assert issues == []
    assert parsed == doc


def test_render_headings_exact():
    md = render_markdown(new_empty("model_card", "security_extended", "demo"))
    lines = md.splitlines()
    assert lines[0] == "# Model Card: demo"
    for heading in SECURITY_H3:
        assert f"### {heading}" in lines
    assert "## Caveats and Recommendations" in lines
    ds = render_markdown(new_empty("datasheet", "security_extended", "d")).splitlines()
    assert ds[0] == "# Datasheet: d"
    assert [l for l in ds if l.startswith("## ")] == [
        "## Motivation", "## Composition", "## Collection Process",
        "## Preprocessing/Cleaning/Labeling", "## Uses", "## Distribution", "## Maintenance"]


def test_redaction_hides_query_limit_numbers():
    doc = set_field(new_empty("model_card", "security_extended", "demo"),
                    "security.stealing_inference_mitigations.query_limit",
                    {"max_queries": 1000, "window_seconds": 3600})
    out = render_markdown(doc, redact=True)
    assert REDACTED in out and "1000" not in out and "3600" not in out


def test_redaction_only_touches_security_section():
    doc = full_model_card()
    plain = render_markdown(doc).splitlines()
    redacted = render_markdown(doc, redact=True).splitlines()
    start = plain.index("## Security")
    assert plain[:start] == redacted[:start]
    changed = [l for l in difflib.ndiff(plain, redacted) if l[:1] in "+-"]
    assert changed
    assert redacted.index("## Security") == start


def test_redaction_keeps_tristate_posture():
    out = render_markdown(full_model_card(), redact=True)
    assert "**watermarking:** `yes` [REDACTED]" in out
    assert "**behavior_analysis:** `yes`" in out
    assert "**penetration_testing:** `yes`" in out


def test_markdown_misspelled_heading():
    text = ("# Model Card: x\n\n## Model Details\n\n**license:** MIT\n\n"
            "## Securty\n\n**results:** hidden\n\n## Metrics\n\n**performance_measures:** F1\n")
    doc, issues = parse_markdown(text)
    assert [i.kind for i in issues] == [IssueKind.UNKNOWN_KEY]
    assert "Securty" in issues[0].message
    assert doc["model_details.license"].value == "MIT"
    assert doc["metrics.performance_measures"].value == "F1"


def test_markdown_minimal():
    doc, issues = parse_markdown("# Model Card: x\n")
    assert issues == []
    assert doc == new_empty("model_card", "security_extended", "x")


def test_markdown_heading_matching_is_lenient():
    text = "#   model   card:   x\n\n##   ethical  CONSIDERATIONS  \n\n**human_impact:** low\n"
    doc, issues = parse_markdown(text)
    assert issues == []
    assert doc.meta.title == "x"
    assert doc["ethical_considerations.human_impact"].value == "low"


def test_markdown_without_title_is_malformed():
    with pytest.raises(ParseError) as info:
        parse_markdown("## Model Details\n\n**license:** MIT\n")
    assert info.value.issues[0].kind is IssueKind.MALFORMED


def test_markdown_handwritten_typed_fields():
    text = ("# Model Card: hand\n\n## Security\n\n### Risk Analysis\n\n"
            "**data_sensitivity:** high\n**access_count:** 250\n"
            "**attacker_incentives:** espionage, other\n\n"
            "### Model Security\n\n**watermarking:** yes we embed a trigger set\n")
    doc, issues = parse_markdown(text)
    assert issues == []
    assert doc["security.risk_analysis.data_sensitivity"].value == "high"
    assert doc["security.risk_analysis.access_count"].value == 250
    assert doc["security.risk_analysis.attacker_incentives"].value == ("espionage", "other")
    wm = doc["security.model_security.watermarking"].value
    assert (wm.answer.value, wm.detail) == ("yes", "we embed a trigger set")


def test_markdown_type_mismatch_is_soft():
    text = "# Model Card: t\n\n## Security\n\n### Risk Analysis\n\n**access_count:** lots\n"
    doc, issues = parse_markdown(text)
    assert [i.kind for i in issues] == [IssueKind.TYPE_MISMATCH]
    assert doc["security.risk_analysis.access_count"].is_unanswered


def test_markdown_unknown_marker():
    doc, issues = parse_markdown("# Datasheet: d\n\n## Uses\n\n**favourite_task:** x\n")
    assert [i.kind for i in issues] == [IssueKind.UNKNOWN_KEY]
    assert "favourite_task" in issues[0].message


def test_load_document_checks_extension(tmp_path):
    path = tmp_path / "wrong.dsheet.json"
    path.write_bytes(serialize_canonical(new_empty("model_card", "legacy", "t")))
    with pytest.raises(ParseError):
        load_document(path)
    md = tmp_path / "card.md"
    md.write_text(render_markdown(full_model_card()), encoding="utf-8")
    doc, issues = load_document(md)
    assert doc == full_model_card() and issues == []
