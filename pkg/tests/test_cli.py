import io
import json

import pytest

from docgen import full_datasheet, full_model_card, scripted_card_session, write_ten_card_corpus
from mlsecdoc.cli import main
from mlsecdoc.doc_model import new_empty
from mlsecdoc.serialization import parse_canonical, serialize_canonical


def run(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), io.StringIO(stdin), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    paths = {
        "empty": tmp_path / "empty_extended_card.mcard.json",
        "full": tmp_path / "full.mcard.json",
        "sheet": tmp_path / "sheet.dsheet.json",
        "bad": tmp_path / "bad.mcard.json",
        "legacy": tmp_path / "legacy.mcard.json",
    }
    paths["empty"].write_bytes(serialize_canonical(new_empty("model_card", "security_extended", "e")))
    paths["full"].write_bytes(serialize_canonical(full_model_card()))
    paths["sheet"].write_bytes(serialize_canonical(full_datasheet()))
    paths["bad"].write_text('{"meta": {"doc_type": "model_card", "title": "x"}, "sections": {"securty": {}}}')
    paths["legacy"].write_bytes(serialize_canonical(new_empty("model_card", "legacy", "l")))
    return paths


def test_validate_empty_extended_card_exits_1(files):
    code, out, _ = run("validate", str(files["empty"]), "--profile", "extended")
    assert code == 1
    assert out.startswith("error STR001 security: ")


def test_validate_clean_card_exits_0(files):
    code, out, _ = run("validate", str(files["full"]))
    assert (code, out) == (0, "")


def test_validate_default_profile_is_extended(files):
    assert run("validate", str(files["legacy"]))[0] == 1
    assert run("validate", str(files["legacy"]), "--profile", "legacy")[0] == 0


def test_validate_json(files):
    code, out, _ = run("validate", str(files["empty"]), "--format", "json")
    assert code == 1
    assert json.loads(out) == [{"rule_id": "STR001", "severity": "error", "path": "security",
                                "message": "security section is entirely unanswered"}]


def test_parse_failure_exits_2(files):
    code, out, err = run("validate", str(files["bad"]))
    assert code == 2 and out == ""
    assert err.count("\n") == 1 and err.startswith("error: parse: ")
    assert "securty" in err


def test_missing_file_exits_2(tmp_path):
    code, _, err = run("score", str(tmp_path / "nope.mcard.json"))
    assert code == 2 and err.startswith("error: io: ")


def test_usage_error_exits_2():
    code, _, err = run("validate")
    assert code == 2 and err.startswith("error: usage: ") and err.count("\n") == 1
    assert run("new", "model-card", "--title", "t", "--profile", "strict")[0] == 2
    assert run("frobnicate")[0] == 2


def test_render_redact(files):
    code, out, _ = run("render", str(files["full"]), "--redact")
    assert code == 0 and "[REDACTED]" in out and "no critical findings" not in out


def test_render_to_file(files, tmp_path):
    target = tmp_path / "card.md"
    assert run("render", str(files["full"]), "-o", str(target))[0] == 0
    assert target.read_text(encoding="utf-8").startswith("# Model Card: full card\n")


def test_score_and_risk(files):
    code, out, _ = run("score", str(files["full"]), "--format", "json")
    assert code == 0 and json.loads(out)["overall"] == 1.0
    code, out, _ = run("risk", str(files["full"]), "--format", "json")
    report = json.loads(out)
    assert code == 0 and (report["total"], report["level"], report["gaps"]) == (12, "critical", [])
    code, out, _ = run("risk", str(files["empty"]))
    assert code == 0 and out.startswith("risk low (total 0/12;")


def test_risk_rejects_datasheet(files):
    code, _, err = run("risk", str(files["sheet"]))
    assert code == 2 and err.startswith("error: wrong-doc-type: ")


def test_rules():
    code, out, _ = run("rules")
    assert code == 0 and len(out.splitlines()) == 10 and out.startswith("STR001 error: ")
    code, out, _ = run("rules", "--format", "json")
    assert {r["rule_id"] for r in json.loads(out)} >= {"STR001", "GAP001"}


def test_corpus_csv(tmp_path):
    write_ten_card_corpus(tmp_path / "fixtures")
    code, out, _ = run("corpus", str(tmp_path / "fixtures"), "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "path,doc_type,overall,security_score,errors"
    assert len(lines) == 11


def test_corpus_json_and_missing_dir(tmp_path):
    write_ten_card_corpus(tmp_path / "fixtures")
    code, out, _ = run("corpus", str(tmp_path / "fixtures"), "--jobs", "4")
    assert code == 0 and json.loads(out)["section_fill_rate"]["ethical_considerations"] == 0.2
    assert run("corpus", str(tmp_path / "absent"))[0] == 2


def test_new_writes_canonical(tmp_path):
    target = tmp_path / "m.mcard.json"
    code, out, _ = run("new", "model-card", "--title", "demo", "-o", str(target))
    assert (code, out) == (0, "")
    assert parse_canonical(target.read_bytes()) == new_empty("model_card", "security_extended", "demo")
    code, out, _ = run("new", "datasheet", "--title", "d", "--profile", "legacy")
    assert parse_canonical(out) == new_empty("datasheet", "legacy", "d")


def test_new_with_prompts(tmp_path):
    target = tmp_path / "d.dsheet.json"
    code, out, _ = run("new", "datasheet", "--title", "d", "--prompts", "-o", str(target))
    assert code == 0 and "Will there be security updates to the dataset?" in out
    assert target.exists()


def test_new_empty_title_fails():
    code, _, err = run("new", "model-card", "--title", "  ")
    assert code == 2 and err.count("\n") == 1


def test_interactive_matches_set_field_sequence(tmp_path):
    script, expected = scripted_card_session()
    target = tmp_path / "i.mcard.json"
    code, _, err = run("new", "model-card", "--title", "interactive", "--interactive",
                       "-o", str(target), stdin=script)
    assert code == 0
    assert target.read_bytes() == serialize_canonical(expected)
    assert err.count("invalid answer") == 3


def test_interactive_datasheet_people_questions():
    script = "yes\n" + "\n" * 200
    code, out, err = run("new", "datasheet", "--title", "d", "--interactive", stdin=script)
    assert code == 0
    assert "collection.consent_obtained" in err
    assert parse_canonical(out).people_related()
    code, out, err = run("new", "datasheet", "--title", "d", "--interactive", stdin="no\n" + "\n" * 200)
    assert "collection.consent_obtained" not in err


def test_interactive_legacy_skips_security():
    code, out, err = run("new", "model-card", "--title", "m", "--profile", "legacy",
                         "--interactive", stdin="\n" * 100)
    assert code == 0 and "security." not in err


def test_no_color_plain_output(files, monkeypatch):
    monkeypatch.setenv("NO_COLOR", "1")
    _, out, _ = run("validate", str(files["empty"]))
    assert "\x1b[" not in out
