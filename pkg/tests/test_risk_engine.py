import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from docgen import FULL_RISK, full_model_card
from mlsecdoc.doc_model import (
    ATTACKER_INCENTIVES,
    DEPLOYMENT_BREADTHS,
    SENSITIVITY_LEVELS,
    new_empty,
    set_field,
)
from mlsecdoc.errors import InvariantError, WrongDocTypeError
from mlsecdoc.risk_engine import (
    MITIGATION_PATHS,
    Attack,
    AttackClass,
    RiskLevel,
    RiskProfile,
    ThreatModel,
    assess_risk,
    attack_taxonomy,
    coverage_gaps,
    level_for_total,
    mitigation_map,
    risk_report,
)


def test_taxonomy_classes():
    taxonomy = attack_taxonomy()
    assert len(taxonomy) == 7
    by_class = {c: {a.value for a in taxonomy if a.attack_class is c} for c in AttackClass}
    assert by_class[AttackClass.EXPLOITATIVE] == {"poisoning", "backdoor", "evasion", "sponge"}
    assert by_class[AttackClass.EXPLORATORY] == {
        "model_stealing", "membership_inference", "attribute_inference"}
    assert Attack.EVASION.attack_class is AttackClass.EXPLOITATIVE
    assert Attack.MEMBERSHIP_INFERENCE.attack_class is AttackClass.EXPLORATORY


def test_threat_model_needs_goal():
    tm = ThreatModel("gray_box", {"integrity"}, "can alter 5% of labels")
    assert tm.knowledge.value == "gray_box"
    with pytest.raises(InvariantError):
        ThreatModel("black_box", set())


def test_zero_case():
    profile = assess_risk({"data_sensitivity": "none", "deployment_breadth": "internal",
                           "access_count": 0, "attacker_incentives": [], "monetary_use": "no"})
    assert (profile.total, profile.level) == (0, RiskLevel.LOW)
    assert profile.unknowns == ()


def test_critical_example():
    # 3 (high) + 3 (public) + 3 (50000 > 10000) + 3 (monetary_gain and used for money)
    profile = assess_risk(FULL_RISK)
    assert profile.factors() == {"sensitivity": 3, "deployment": 3, "access": 3, "incentives": 3}
    assert (profile.total, profile.level) == (12, RiskLevel.CRITICAL)


def test_high_example():
    # 2 (moderate) + 1 (restricted) + 2 (500 <= 10000) + 1 (non-monetary incentive)
    profile = assess_risk({"data_sensitivity": "moderate", "deployment_breadth": "restricted",
                           "access_count": 500, "attacker_incentives": ["reputation"],
                           "monetary_use": "no"})
    assert (profile.total, profile.level) == (6, RiskLevel.HIGH)


@pytest.mark.parametrize("count,expected", [(0, 0), (10, 0), (11, 1), (100, 1), (101, 2),
                                            (10_000, 2), (10_001, 3)])
def test_access_bands(count, expected):
    assert assess_risk({"access_count": count}).access == expected


@pytest.mark.parametrize("incentives,monetary,expected", [
    ([], "no", 0), ([], None, 0), (["sabotage"], "no", 1), ([], "yes", 2),
    (["monetary_gain"], "no", 2), (["monetary_gain", "other"], "unknown", 2),
    (["monetary_gain"], "yes", 3),
])
def test_incentive_table(incentives, monetary, expected):
    assert assess_risk({"attacker_incentives": incentives, "monetary_use": monetary}).incentives == expected


def test_unanswered_factors_are_reported():
    profile = assess_risk(new_empty("model_card", "security_extended", "t"))
    assert profile.total == 0
    assert set(profile.unknowns) == {"data_sensitivity", "deployment_breadth", "access_count",
                                     "attacker_incentives", "monetary_use"}


def test_level_thresholds_partition():
    expected = ["low"] * 3 + ["medium"] * 3 + ["high"] * 3 + ["critical"] * 4
    assert [level_for_total(t).value for t in range(13)] == expected
    with pytest.raises(ValueError):
        level_for_total(13)


def test_risk_profile_invariants():
    with pytest.raises(InvariantError):
        RiskProfile(4, 0, 0, 0)
    assert RiskProfile(1, 1, 1, 1).total == 4


@given(
    st.sampled_from(SENSITIVITY_LEVELS), st.sampled_from(DEPLOYMENT_BREADTHS),
    st.integers(0, 10**6), st.sets(st.sampled_from(ATTACKER_INCENTIVES)),
    st.sampled_from(["no", "unknown", "yes"]),
    st.sampled_from(["sens", "depl", "count", "incent", "money"]),
)
def test_monotone_single_factor(sens, depl, count, incentives, money, which):
    base = {"data_sensitivity": sens, "deployment_breadth": depl, "access_count": count,
            "attacker_incentives": sorted(incentives), "monetary_use": money}
    bumped = dict(base)
    if which == "sens":
        bumped["data_sensitivity"] = SENSITIVITY_LEVELS[min(SENSITIVITY_LEVELS.index(sens) + 1, 3)]
    elif which == "depl":
        bumped["deployment_breadth"] = DEPLOYMENT_BREADTHS[min(DEPLOYMENT_BREADTHS.index(depl) + 1, 2)]
    elif which == "count":
        bumped["access_count"] = count * 10 + 1
    elif which == "incent":
        bumped["attacker_incentives"] = sorted(incentives | {"monetary_gain"})
    else:
        bumped["monetary_use"] = "yes"
    a, b = assess_risk(base), assess_risk(bumped)
    assert b.total >= a.total and b.level >= a.level


def test_mitigation_map_table():
    m = mitigation_map()
    assert len(m) == 10
    assert m["watermarking"] == {Attack.MODEL_STEALING}
    assert Attack.SPONGE in m["query_limit"]
    assert m["user_authentication"] == set(Attack)
    # union by hand: poisoning, backdoor (data_sanitization); evasion (adversarial_training);
    # model_stealing (watermarking); sponge, membership/attribute inference (query_limit)
    assert set().union(*m.values()) == set(Attack)
    assert set(m) == set(MITIGATION_PATHS)


def test_all_mitigations_no_gaps():
    assert coverage_gaps(full_model_card()) == []


def _critical_card():
    return set_field(new_empty("model_card", "security_extended", "t"),
                     "security.risk_analysis", FULL_RISK)


def test_watermarking_only_gaps():
    doc = set_field(_critical_card(), "security.model_security.watermarking", "yes")
    gaps = {g.attack.value for g in coverage_gaps(doc)}
    assert gaps == {"poisoning", "backdoor", "evasion", "sponge",
                    "membership_inference", "attribute_inference"}


def test_low_risk_has_no_gaps():
    doc = new_empty("model_card", "security_extended", "t")
    assert assess_risk(doc).level is RiskLevel.LOW
    assert coverage_gaps(doc) == []


def test_medium_risk_has_no_gaps():
    doc = set_field(new_empty("model_card", "security_extended", "t"),
                    "security.risk_analysis.data_sensitivity", "high")
    doc = set_field(doc, "security.risk_analysis.deployment_breadth", "restricted")
    assert assess_risk(doc).level is RiskLevel.MEDIUM
    assert coverage_gaps(doc) == []


def test_datasheet_rejected():
    with pytest.raises(WrongDocTypeError):
        coverage_gaps(new_empty("datasheet", "security_extended", "t"))
    with pytest.raises(WrongDocTypeError):
        assess_risk(new_empty("datasheet", "security_extended", "t"))


def test_mitigation_no_or_unknown_does_not_cover():
    doc = _critical_card()
    doc = set_field(doc, "security.stealing_inference_mitigations.user_authentication", "unknown")
    doc = set_field(doc, "security.model_security.watermarking", "no")
    assert len(coverage_gaps(doc)) == 7


def test_gap_subset_exhaustive_sample():
    # every on/off combination of three mitigations, compared against a hand table
    rng = random.Random(0)
    names = rng.sample(sorted(MITIGATION_PATHS), 3)
    for bits in itertools.product([False, True], repeat=3):
        doc = _critical_card()
        covered = set()
        for name, on in zip(names, bits):
            if on:
                covered |= mitigation_map()[name]
                value = ({"max_queries": 1, "window_seconds": 1} if name == "query_limit" else "yes")
                doc = set_field(doc, MITIGATION_PATHS[name], value)
        assert {g.attack for g in coverage_gaps(doc)} == set(Attack) - covered


def test_risk_report_shape():
    report = risk_report(_critical_card())
    assert set(report) == {"factors", "unknowns", "total", "level", "gaps", "scoring"}
    assert report["total"] == 12 and report["level"] == "critical"
    assert len(report["gaps"]) == 7
