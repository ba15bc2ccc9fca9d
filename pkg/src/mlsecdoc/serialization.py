"""Canonical JSON interchange and Markdown rendering/parsing of documents."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Any

from .doc_model import (
    DOC_TITLE_PREFIX,
    NA_TOKEN,
    NOT_APPLICABLE,
    RELATES_TO_PEOPLE,
    SECTION_TITLES,
    SECTIONS,
    SECURITY_SUBSECTION_TITLES,
    SECURITY_SUBSECTIONS,
    STANDARD_VERSION,
    UNANSWERED,
    Answer,
    AnswerState,
    DocType,
    Document,
    DocumentMeta,
    FieldSpec,
    Kind,
    Profile,
    QueryLimit,
    TriDetail,
    TriState,
    check_answer,
    field_specs,
)
from .errors import DocEncodingError, DocError, ParseError

REDACTED = "[REDACTED]"

CANONICAL_SUFFIXES = {
    ".mcard.json": DocType.MODEL_CARD,
    ".dsheet.json": DocType.DATASHEET,
}


class IssueKind(str, Enum):
    UNKNOWN_KEY = "unknown_key"
    TYPE_MISMATCH = "type_mismatch"
    MISSING_SECTION = "missing_section"
    MALFORMED = "malformed"


@dataclass(frozen=True)
class ParseIssue:
    location: str
    kind: IssueKind
    message: str

    def __str__(self) -> str:
        return f"{self.location}: {self.kind.value}: {self.message}"


def _decode(data: bytes | str) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DocEncodingError(f"input is not valid UTF-8: {exc}") from None


# --- canonical JSON -------------------------------------------------------

def _encode_value(value: Any) -> Any:
    if isinstance(value, TriState):
        return value.value
    if isinstance(value, TriDetail):
        return {"answer": value.answer.value, "detail": value.detail}
    if isinstance(value, QueryLimit):
        return {"max_queries": value.max_queries, "window_seconds": value.window_seconds}
    if isinstance(value, tuple):
        return list(value)
    return value


def encode_answer(answer: Answer) -> Any:
    if answer.is_unanswered:
        return None
    if answer.is_not_applicable:
        return NA_TOKEN
    return _encode_value(answer.value)


def to_canonical_dict(doc: Document) -> dict[str, Any]:
    meta = doc.meta
    out: dict[str, Any] = {
        "meta": {
            "doc_type": meta.doc_type.value,
            "title": meta.title,
            "standard_version": meta.standard_version,
            "profile": meta.profile.value,
        }
    }
    if doc.doc_type is DocType.DATASHEET:
        out[RELATES_TO_PEOPLE] = encode_answer(doc.relates_to_people)
    sections: dict[str, Any] = {key: {} for key in SECTIONS[doc.doc_type]}
    for spec in field_specs(doc.doc_type):
        node = sections[spec.section]
        parts = spec.key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = encode_answer(doc.answers[spec.path])
    out["sections"] = sections
    return out


def serialize_canonical(doc: Document) -> bytes:
    text = json.dumps(to_canonical_dict(doc), indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def parse_canonical(data: bytes | str, expected_type: DocType | None = None) -> Document:
    """Parse canonical JSON into a Document.

    Raises DocEncodingError for non-UTF-8 input and ParseError carrying every
    structural issue found.
    """
    text = _decode(data)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError([ParseIssue(f"line {exc.lineno}, column {exc.colno}",
                                     IssueKind.MALFORMED, exc.msg)]) from None
    return from_canonical_dict(raw, expected_type)


def from_canonical_dict(raw: Any, expected_type: DocType | None = None) -> Document:
    issues: list[ParseIssue] = []
    if not isinstance(raw, dict):
        raise ParseError([ParseIssue("$", IssueKind.MALFORMED, "top level must be an object")])

    meta = _parse_meta(raw.get("meta"), issues)
    if meta is None:
        raise ParseError(issues)
    doc_type = meta.doc_type
    if expected_type is not None and doc_type is not DocType(expected_type):
        issues.append(ParseIssue("meta.doc_type", IssueKind.TYPE_MISMATCH,
                                 f"expected {DocType(expected_type).value}, found {doc_type.value}"))

    allowed_top = {"meta", "sections"}
    if doc_type is DocType.DATASHEET:
        allowed_top.add(RELATES_TO_PEOPLE)
    for key in raw:
        if key not in allowed_top:
            issues.append(ParseIssue(key, IssueKind.UNKNOWN_KEY, f"unknown key {key!r}"))

    rtp = None
    if doc_type is DocType.DATASHEET:
        rtp = UNANSWERED
        value = raw.get(RELATES_TO_PEOPLE)
        if value is not None:
            try:
                rtp = Answer(AnswerState.VALUE, TriState(value))
            except (ValueError, TypeError):
                issues.append(ParseIssue(RELATES_TO_PEOPLE, IssueKind.TYPE_MISMATCH,
                                         f"expected yes/no/unknown or null, got {value!r}"))

    answers: dict[str, Answer] = {}
    sections = raw.get("sections", {})
    if sections is None:
        sections = {}
    if not isinstance(sections, dict):
        issues.append(ParseIssue("sections", IssueKind.MALFORMED, "sections must be an object"))
        sections = {}

    specs = field_specs(doc_type)
    tree = _schema_tree(specs)
    for section_key, body in sections.items():
        loc = f"sections.{section_key}"
        if section_key not in tree:
            issues.append(ParseIssue(loc, IssueKind.UNKNOWN_KEY, f"unknown section {section_key!r}"))
            continue
        _walk(tree[section_key], body, loc, section_key, answers, issues, doc_type)

    if issues:
        raise ParseError(issues)
    return Document(meta, answers, rtp)


def _parse_meta(meta: Any, issues: list[ParseIssue]) -> DocumentMeta | None:
    if meta is None:
        issues.append(ParseIssue("meta", IssueKind.MISSING_SECTION, "meta is required"))
        return None
    if not isinstance(meta, dict):
        issues.append(ParseIssue("meta", IssueKind.MALFORMED, "meta must be an object"))
        return None
    known = {"doc_type", "title", "standard_version", "profile"}
    for key in meta:
        if key not in known:
            issues.append(ParseIssue(f"meta.{key}", IssueKind.UNKNOWN_KEY, f"unknown key {key!r}"))
    try:
        doc_type = DocType(meta.get("doc_type"))
    except ValueError:
        issues.append(ParseIssue("meta.doc_type", IssueKind.TYPE_MISMATCH,
                                 f"expected model_card or datasheet, got {meta.get('doc_type')!r}"))
        return None
    try:
        profile = Profile(meta.get("profile", Profile.SECURITY_EXTENDED.value))
    except ValueError:
        issues.append(ParseIssue("meta.profile", IssueKind.TYPE_MISMATCH,
                                 f"expected legacy or security_extended, got {meta.get('profile')!r}"))
        return None
    try:
        return DocumentMeta(doc_type, meta.get("title"), profile,
                            meta.get("standard_version", STANDARD_VERSION))
    except DocError as exc:
        issues.append(ParseIssue("meta", IssueKind.MALFORMED, str(exc)))
        return None


def _schema_tree(specs: tuple[FieldSpec, ...]) -> dict[str, Any]:
    """Nested dict of section -> field -> (FieldSpec | sub-dict)."""
    tree: dict[str, Any] = {}
    for spec in specs:
        node = tree.setdefault(spec.section, {})
        parts = spec.key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = spec
    return tree


def _walk(schema: dict[str, Any], body: Any, loc: str, prefix: str,
          answers: dict[str, Answer], issues: list[ParseIssue], doc_type: DocType) -> None:
    if body is None:
        return
    if body == NA_TOKEN:
        for path in _leaves(schema, prefix):
            answers[path] = NOT_APPLICABLE
        return
    if not isinstance(body, dict):
        issues.append(ParseIssue(loc, IssueKind.TYPE_MISMATCH, "expected an object"))
        return
    for key, value in body.items():
        sub_loc = f"{loc}.{key}"
        if key not in schema:
            issues.append(ParseIssue(sub_loc, IssueKind.UNKNOWN_KEY, f"unknown key {key!r}"))
            continue
        node = schema[key]
        if isinstance(node, dict):
            _walk(node, value, sub_loc, f"{prefix}.{key}", answers, issues, doc_type)
            continue
        try:
            answers[node.path] = check_answer(node, value)
        except DocError as exc:
            issues.append(ParseIssue(sub_loc, IssueKind.TYPE_MISMATCH, str(exc)))


def _leaves(schema: dict[str, Any], prefix: str) -> list[str]:
    out = []
    for key, node in schema.items():
        if isinstance(node, dict):
            out += _leaves(node, f"{prefix}.{key}")
        else:
            out.append(node.path)
    return out


# --- Markdown -------------------------------------------------------------

META_COMMENT = "<!-- mlsecdoc: doc_type={doc_type} profile={profile} standard_version={version} -->"
_META_RE = re.compile(r"<!--\s*mlsecdoc:(?P<body>.*?)-->")
_MARKER_RE = re.compile(r"^\*\*(?P<key>[A-Za-z0-9_.]+):\*\*(?P<rest>.*)$")
_HEADING_RE = re.compile(r"^(?P<hashes>#{1,6})\s+(?P<title>.*?)(?:\s+#+)?\s*$")

# Redacted in public renderings: operational specifics an attacker could use.
_REDACTED_LEAVES = {
    "security.risk_analysis.access_count",
    "security.stealing_inference_mitigations.query_limit",
    "security.security_testing.results",
}


def _is_plain_text(text: str) -> bool:
    """Whether ``text`` survives the plain Markdown body encoding unchanged."""
    if not text or text != text.strip() or "\r" in text or text == NA_TOKEN:
        return False
    if text.startswith("`") or text == REDACTED:
        return False
    for line in text.split("\n"):
        stripped = line.lstrip()
        if stripped.startswith(("#", "**", "<!--")):
            return False
    return True


def _text_body(text: str) -> str:
    return text if _is_plain_text(text) else "`" + json.dumps(text, ensure_ascii=False) + "`"


def _is_redacted(spec: FieldSpec) -> bool:
    return spec.path in _REDACTED_LEAVES


def _render_value(spec: FieldSpec, answer: Answer, redact: bool) -> str:
    if answer.is_not_applicable:
        return NA_TOKEN
    value = answer.value
    if redact and _is_redacted(spec):
        return REDACTED
    kind = spec.kind
    if kind is Kind.TEXT:
        return _text_body(value)
    if kind in (Kind.TRISTATE, Kind.ENUM):
        return f"`{_encode_value(value)}`"
    if kind is Kind.TRI_DETAIL:
        head = f"`{value.answer.value}`"
        if value.detail is None:
            return head
        if redact and spec.security:
            return f"{head} {REDACTED}"
        return f"{head} {_text_body(value.detail)}"
    if kind is Kind.ENUM_LIST:
        return "`[" + ", ".join(value) + "]`"
    if kind is Kind.TEXT_LIST:
        return "`" + json.dumps(list(value), ensure_ascii=False) + "`"
    if kind is Kind.COUNT:
        return f"`{value}`"
    if kind is Kind.QUERY_LIMIT:
        return f"`max_queries={value.max_queries} window_seconds={value.window_seconds}`"
    raise AssertionError(kind)


def _marker(name: str, body: str) -> str:
    return f"**{name}:** {body}"


def render_markdown(doc: Document, redact: bool = False) -> str:
    """Render ``doc`` as Markdown.

    Unanswered fields are omitted. With ``redact`` the tri-state posture of
    every security field stays visible but details, counts, query limits and
    test results become ``[REDACTED]``.
    """
    dt = doc.doc_type
    lines = [
        f"# {DOC_TITLE_PREFIX[dt]}: {doc.meta.title}",
        "",
        META_COMMENT.format(doc_type=dt.value, profile=doc.profile.value,
                            version=doc.meta.standard_version),
        "",
    ]
    if dt is DocType.DATASHEET and not doc.relates_to_people.is_unanswered:
        lines += [_marker(RELATES_TO_PEOPLE, f"`{doc.relates_to_people.value.value}`"), ""]

    specs = field_specs(dt)
    for section in SECTIONS[dt]:
        lines += [f"## {SECTION_TITLES[section]}", ""]
        members = [s for s in specs if s.section == section]
        if section == "security":
            for sub in SECURITY_SUBSECTIONS:
                lines += [f"### {SECURITY_SUBSECTION_TITLES[sub]}", ""]
                for spec in members:
                    if spec.key.split(".")[0] == sub:
                        lines += _field_lines(spec, spec.key.split(".", 1)[1], doc, redact)
        else:
            for spec in members:
                lines += _field_lines(spec, spec.key, doc, redact)
    return "\n".join(lines).rstrip("\n") + "\n"


def _field_lines(spec: FieldSpec, name: str, doc: Document, redact: bool) -> list[str]:
    answer = doc.answers[spec.path]
    if answer.is_unanswered:
        return []
    return [_marker(name, _render_value(spec, answer, redact)), ""]


def _norm(title: str) -> str:
    return " ".join(title.split()).casefold()


_SECTION_BY_TITLE = {
    dt: {_norm(SECTION_TITLES[k]): k for k in keys} for dt, keys in SECTIONS.items()
}
_SUBSECTION_BY_TITLE = {_norm(t): k for k, t in SECURITY_SUBSECTION_TITLES.items()}
_DOCTYPE_BY_PREFIX = {_norm(p): dt for dt, p in DOC_TITLE_PREFIX.items()}


def _strip_ticks(body: str) -> str | None:
    if len(body) >= 2 and body.startswith("`") and body.endswith("`"):
        return body[1:-1]
    return None


def _parse_text(body: str) -> str:
    inner = _strip_ticks(body)
    if inner is not None and inner.startswith('"'):
        try:
            decoded = json.loads(inner)
        except json.JSONDecodeError:
            return body
        if isinstance(decoded, str):
            return decoded
    return body


def _parse_value(spec: FieldSpec, body: str) -> Any:
    """Decode a Markdown field body into a raw value for ``check_answer``."""
    kind = spec.kind
    if kind is Kind.TEXT:
        return _parse_text(body)
    if kind is Kind.TRI_DETAIL:
        m = re.match(r"^`?(yes|no|unknown)`?(?:\s+(.*))?$", body, re.DOTALL | re.IGNORECASE)
        if not m:
            raise ValueError(f"expected yes/no/unknown, got {body!r}")
        detail = m.group(2)
        return (m.group(1).lower(), _parse_text(detail.strip()) if detail else None)
    inner = _strip_ticks(body)
    token = (inner if inner is not None else body).strip()
    if kind is Kind.TRISTATE:
        return token.lower()
    if kind is Kind.ENUM:
        return token
    if kind is Kind.ENUM_LIST:
        if token.startswith("[") and token.endswith("]"):
            token = token[1:-1]
        return [t.strip() for t in token.split(",") if t.strip()]
    if kind is Kind.TEXT_LIST:
        if token.startswith("["):
            decoded = json.loads(token)
            if not isinstance(decoded, list):
                raise ValueError("expected a list")
            return decoded
        items = [ln.strip()[2:].strip() for ln in body.splitlines() if ln.strip().startswith(("- ", "* "))]
        return items if items else [t.strip() for t in token.split(",") if t.strip()]
    if kind is Kind.COUNT:
        if not re.fullmatch(r"\d+", token):
            raise ValueError(f"expected a non-negative integer, got {token!r}")
        return int(token)
    if kind is Kind.QUERY_LIMIT:
        m = re.fullmatch(r"max_queries\s*=\s*(\d+)\s+window_seconds\s*=\s*(\d+)", token)
        if not m:
            raise ValueError(f"expected 'max_queries=N window_seconds=S', got {token!r}")
        return {"max_queries": int(m.group(1)), "window_seconds": int(m.group(2))}
    raise AssertionError(kind)


def parse_markdown(text: bytes | str) -> tuple[Document, list[ParseIssue]]:
    """Best-effort parse of a Markdown document.

    Returns the document together with the non-fatal issues encountered.
    Raises ParseError when no recognizable level-1 heading exists.
    """
    text = _decode(text).replace("\r\n", "\n")
    lines = text.split("\n")
    issues: list[ParseIssue] = []

    doc_type = title = None
    start = 0
    for i, line in enumerate(lines):
        m = _HEADING_RE.match(line)
        if m and len(m.group("hashes")) == 1:
            prefix, sep, rest = m.group("title").partition(":")
            dt = _DOCTYPE_BY_PREFIX.get(_norm(prefix))
            if sep and dt is not None and rest.strip():
                doc_type, title, start = dt, rest.strip(), i + 1
                break
    if doc_type is None:
        raise ParseError([ParseIssue("line 1", IssueKind.MALFORMED,
                                     "no '# Model Card: ...' or '# Datasheet: ...' heading found")])

    profile = Profile.SECURITY_EXTENDED
    version = STANDARD_VERSION
    meta_match = _META_RE.search(text)
    if meta_match:
        attrs = dict(kv.split("=", 1) for kv in meta_match.group("body").split() if "=" in kv)
        try:
            profile = Profile(attrs.get("profile", profile.value))
        except ValueError:
            issues.append(ParseIssue("meta", IssueKind.TYPE_MISMATCH,
                                     f"unknown profile {attrs.get('profile')!r}"))
        version = attrs.get("standard_version", version)
    try:
        meta = DocumentMeta(doc_type, title, profile, version)
    except DocError as exc:
        raise ParseError([ParseIssue("line 1", IssueKind.MALFORMED, str(exc))]) from None

    specs = {s.path: s for s in field_specs(doc_type)}
    section: str | None = None
    subsection: str | None = None
    skipping = False
    raw_fields: list[tuple[int, str | None, str | None, str, list[str]]] = []
    current: list[str] | None = None

    for lineno, line in enumerate(lines[start:], start=start + 1):
        heading = _HEADING_RE.match(line)
        if heading:
            level = len(heading.group("hashes"))
            name = _norm(heading.group("title"))
            current = None
            if level == 2:
                subsection = None
                section = _SECTION_BY_TITLE[doc_type].get(name)
                skipping = section is None
                if skipping:
                    issues.append(ParseIssue(f"line {lineno}", IssueKind.UNKNOWN_KEY,
                                             f"unknown section heading {heading.group('title')!r}"))
            elif level == 3 and section == "security":
                subsection = _SUBSECTION_BY_TITLE.get(name)
                skipping = subsection is None
                if skipping:
                    issues.append(ParseIssue(f"line {lineno}", IssueKind.UNKNOWN_KEY,
                                             f"unknown security subsection {heading.group('title')!r}"))
            continue
        if skipping:
            continue
        marker = _MARKER_RE.match(line)
        if marker:
            current = [marker.group("rest")]
            raw_fields.append((lineno, section, subsection, marker.group("key"), current))
            continue
        if current is not None:
            if line.lstrip().startswith("<!--"):
                current = None
            else:
                current.append(line)

    answers: dict[str, Answer] = {}
    rtp = UNANSWERED if doc_type is DocType.DATASHEET else None
    for lineno, sec, sub, key, body_lines in raw_fields:
        body = "\n".join(body_lines).strip()
        loc = f"line {lineno}"
        if sec is None:
            if key == RELATES_TO_PEOPLE and doc_type is DocType.DATASHEET:
                token = (_strip_ticks(body) or body).strip().lower()
                try:
                    rtp = Answer(AnswerState.VALUE, TriState(token)) if body else UNANSWERED
                except ValueError:
                    issues.append(ParseIssue(loc, IssueKind.TYPE_MISMATCH,
                                             f"relates_to_people: expected yes/no/unknown, got {body!r}"))
            else:
                issues.append(ParseIssue(loc, IssueKind.UNKNOWN_KEY,
                                         f"field {key!r} appears outside any section"))
            continue
        if sec == "security":
            path = f"security.{sub}.{key}" if sub else f"security.{key}"
        else:
            path = f"{sec}.{key}"
        spec = specs.get(path)
        if spec is None:
            issues.append(ParseIssue(loc, IssueKind.UNKNOWN_KEY, f"unknown field {key!r} in {path.rsplit('.', 1)[0]}"))
            continue
        if not body:
            continue
        if body == NA_TOKEN:
            answers[path] = NOT_APPLICABLE
            continue
        try:
            answers[path] = check_answer(spec, _parse_value(spec, body))
        except (DocError, ValueError) as exc:
            issues.append(ParseIssue(loc, IssueKind.TYPE_MISMATCH, f"{path}: {exc}"))

    return Document(meta, answers, rtp), issues


def doc_type_for_path(name: str) -> DocType | None:
    """Document type implied by a canonical file name, if any."""
    lowered = name.lower()
    for suffix, dt in CANONICAL_SUFFIXES.items():
        if lowered.endswith(suffix):
            return dt
    return None


def load_document(path, data: bytes | None = None) -> tuple[Document, list[ParseIssue]]:
    """Read a document from ``path``, choosing the format by file extension.

    ``.md`` files go through the Markdown parser; anything else is canonical
    JSON. Canonical files named ``*.mcard.json``/``*.dsheet.json`` must hold
    the matching document type.
    """
    from pathlib import Path

    p = Path(path)
    if data is None:
        data = p.read_bytes()
    if p.suffix.lower() == ".md":
        return parse_markdown(data)
    return parse_canonical(data, expected_type=doc_type_for_path(p.name)), []
