import random

from hypothesis import given, settings
from hypothesis import strategies as st

from docgen import full_datasheet, full_model_card, random_document, random_value
from mlsecdoc.doc_model import (
    NOT_APPLICABLE,
    applicable_fields,
    field_spec,
    field_specs,
    new_empty,
    set_field,
)
from mlsecdoc.scorer import score

# 35 legacy leaves + 21 security leaves, counted from the field lists
MODEL_CARD_APPLICABLE = 56


def test_empty_doc_scores_zero():
    for doc_type in ("model_card", "datasheet"):
        for profile in ("legacy", "security_extended"):
            report = score(new_empty(doc_type, profile, "t"))
            assert report.overall == 0.0 and report.answered_count == 0
            assert set(report.per_section.values()) == {0.0}
            assert report.security_score == 0.0


def test_full_docs_score_one():
    for doc in (full_model_card(), full_datasheet()):
        report = score(doc)
        assert report.overall == 1.0
        assert report.security_score == 1.0
        assert set(report.per_section.values()) == {1.0}


def test_model_details_only():
    doc = new_empty("model_card", "security_extended", "t")
    for spec in field_specs("model_card"):
        if spec.section == "model_details":
            doc = set_field(doc, spec.path, "x")
    report = score(doc)
    assert report.per_section["model_details"] == 1.0
    assert report.applicable_count == MODEL_CARD_APPLICABLE
    assert report.overall == 13 / 56


def test_legacy_card_omits_security_section():
    report = score(new_empty("model_card", "legacy", "t"))
    assert "security" not in report.per_section
    assert report.applicable_count == 35


def test_unknown_counts_as_answered():
    doc = set_field(new_empty("model_card", "security_extended", "t"),
                    "security.stealing_inference_mitigations.user_authentication", "unknown")
    assert score(doc).answered_count == 1


def test_section_of_only_na_scores_one():
    doc = set_field(new_empty("model_card", "legacy", "t"), "factors.relevant_factors", NOT_APPLICABLE)
    doc = set_field(doc, "factors.evaluation_factors", NOT_APPLICABLE)
    assert score(doc).per_section["factors"] == 1.0


def test_one_line_summary():
    assert "\n" not in score(full_model_card()).summary()


@given(st.integers(0, 2**32))
@settings(max_examples=300)
def test_answering_is_monotone(seed):
    rng = random.Random(seed)
    doc = random_document(rng)
    applicable = set(applicable_fields(doc))
    candidates = [p for p, a in doc.answers.items() if a.is_unanswered and p in applicable]
    if not candidates:
        return
    path = rng.choice(candidates)
    before = score(doc)
    after = score(set_field(doc, path, random_value(rng, field_spec(doc.doc_type, path))))
    assert after.overall >= before.overall
    assert after.security_score >= before.security_score
    for key, ratio in before.per_section.items():
        assert after.per_section[key] >= ratio


@given(st.integers(0, 2**32))
@settings(max_examples=300)
def test_not_applicable_neutrality(seed):
    rng = random.Random(seed)
    doc = random_document(rng)
    path = rng.choice(list(doc.answers))
    if doc.answers[path].is_value:
        return
    assert score(set_field(doc, path, NOT_APPLICABLE)).overall >= score(doc).overall


@given(st.integers(0, 2**32))
@settings(max_examples=300)
def test_bounds_and_agreement(seed):
    doc = random_document(random.Random(seed))
    report = score(doc)
    ratios = [report.overall, report.security_score, *report.per_section.values()]
    assert all(0.0 <= r <= 1.0 for r in ratios)
    applicable = applicable_fields(doc)
    assert report.applicable_count == len(applicable)
    assert report.answered_count == sum(doc.answers[p].is_value for p in applicable)
