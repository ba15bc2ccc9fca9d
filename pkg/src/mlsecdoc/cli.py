"""Command-line front end.

Exit codes: 0 success, 1 error-severity diagnostics found, 2 usage, parse or
I/O failure. Every failure prints one ``error: <kind>: <message>`` line to
stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path
from typing import Any, Sequence, TextIO

from . import __version__
from .corpus import export_report, scan
from .doc_model import (
    RELATES_TO_PEOPLE,
    DocType,
    Document,
    Kind,
    Profile,
    field_specs,
    is_excluded_by_profile,
    set_field,
)
from .errors import DocEncodingError, DocError, ParseError, WrongDocTypeError
from .risk_engine import risk_report
from .scorer import score
from .serialization import load_document, render_markdown, serialize_canonical
from .template import PROMPTS, RELATES_TO_PEOPLE_PROMPT, scaffold
from .validator import Severity, catalog_as_dicts, format_json, has_errors, rule_catalog, validate

EXIT_OK, EXIT_FINDINGS, EXIT_FAILURE = 0, 1, 2

PROFILE_NAMES = {
    "legacy": Profile.LEGACY,
    "extended": Profile.SECURITY_EXTENDED,
    "security_extended": Profile.SECURITY_EXTENDED,
}
DOC_TYPE_NAMES = {"model-card": DocType.MODEL_CARD, "datasheet": DocType.DATASHEET}


class CliFailure(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliFailure("usage", message)


def _profile(value: str) -> Profile:
    try:
        return PROFILE_NAMES[value]
    except KeyError:
        raise argparse.ArgumentTypeError(f"unknown profile {value!r} (use legacy or extended)") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mlsecdoc", description="Security-extended model cards and datasheets.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("new", help="create an empty document")
    p.add_argument("doc_type", choices=sorted(DOC_TYPE_NAMES))
    p.add_argument("--title", required=True)
    p.add_argument("--profile", type=_profile, default=Profile.SECURITY_EXTENDED)
    p.add_argument("--prompts", action="store_true", help="print a Markdown authoring sheet")
    p.add_argument("-o", "--output")
    p.add_argument("--interactive", action="store_true", help="answer each question on the terminal")

    p = sub.add_parser("validate", help="lint a document")
    p.add_argument("file")
    p.add_argument("--profile", type=_profile, default=Profile.SECURITY_EXTENDED)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("score", help="completeness scores")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("risk", help="risk level and mitigation gaps (model cards)")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("render", help="render Markdown")
    p.add_argument("file")
    p.add_argument("--redact", action="store_true")
    p.add_argument("-o", "--output")

    p = sub.add_parser("corpus", help="statistics over a directory of documents")
    p.add_argument("dir")
    p.add_argument("--profile", type=_profile, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--output")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("rules", help="list validator rules")
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


# --- interactive answers --------------------------------------------------

def parse_interactive(kind: Kind, line: str) -> Any:
    """Raw value for one typed terminal answer. Raises ValueError on bad input."""
    if kind in (Kind.TEXT, Kind.ENUM):
        return line
    if kind is Kind.TRISTATE:
        return line.lower()
    if kind is Kind.TRI_DETAIL:
        answer, _, detail = line.partition(":")
        return (answer.strip().lower(), detail.strip() or None)
    if kind in (Kind.ENUM_LIST, Kind.TEXT_LIST):
        return [item.strip() for item in line.split(",") if item.strip()]
    if kind is Kind.COUNT:
        if not line.isdigit():
            raise ValueError("expected a whole number")
        return int(line)
    if kind is Kind.QUERY_LIMIT:
        m = re.fullmatch(r"(\d+)\s*/\s*(\d+)", line) or re.fullmatch(
            r"max_queries\s*=\s*(\d+)\s+window_seconds\s*=\s*(\d+)", line)
        if not m:
            raise ValueError("expected MAX_QUERIES/WINDOW_SECONDS, e.g. 1000/3600")
        return {"max_queries": int(m.group(1)), "window_seconds": int(m.group(2))}
    raise AssertionError(kind)


_INPUT_HINTS = {
    Kind.TRISTATE: "yes/no/unknown",
    Kind.TRI_DETAIL: "yes[: details]/no/unknown",
    Kind.ENUM_LIST: "comma-separated",
    Kind.TEXT_LIST: "comma-separated",
    Kind.COUNT: "number",
    Kind.QUERY_LIMIT: "queries/seconds",
}


def interactive_fill(doc: Document, stdin: TextIO, out: TextIO) -> Document:
    """Ask every applicable question in order; blank skips, ``N/A`` marks not applicable.

    Invalid answers are re-asked. End of input leaves the rest unanswered.
    """

    def ask(path: str, prompt: str, hint: str | None, apply):
        nonlocal doc
        while True:
            suffix = f" [{hint}]" if hint else ""
            out.write(f"{path}: {prompt}{suffix}\n> ")
            out.flush()
            line = stdin.readline()
            if not line:
                raise EOFError
            line = line.strip()
            if not line:
                return
            try:
                doc = apply(line)
                return
            except (DocError, ValueError) as exc:
                out.write(f"invalid answer: {exc}\n")

    try:
        if doc.doc_type is DocType.DATASHEET:
            ask(RELATES_TO_PEOPLE, RELATES_TO_PEOPLE_PROMPT, "yes/no/unknown",
                lambda line: set_field(doc, RELATES_TO_PEOPLE, line.lower()))
        for spec in field_specs(doc.doc_type):
            if is_excluded_by_profile(spec, doc.profile):
                continue
            if spec.people_conditional and not doc.people_related():
                continue
            hint = "|".join(spec.choices) if spec.choices else _INPUT_HINTS.get(spec.kind)

            def apply(line, spec=spec):
                value = "N/A" if line == "N/A" else parse_interactive(spec.kind, line)
                return set_field(doc, spec.path, value)

            ask(spec.path, PROMPTS[spec.path], hint, apply)
    except EOFError:
        out.write("\n")
    return doc


# --- commands -------------------------------------------------------------

def _load(path: str, stderr: TextIO) -> Document:
    try:
        doc, issues = load_document(path)
    except FileNotFoundError:
        raise CliFailure("io", f"{path}: no such file") from None
    except OSError as exc:
        raise CliFailure("io", f"{path}: {exc.strerror or exc}") from None
    except DocEncodingError as exc:
        raise CliFailure("encoding", f"{path}: {exc}") from None
    except ParseError as exc:
        raise CliFailure("parse", f"{path}: {exc}") from None
    for issue in issues:
        stderr.write(f"warning: parse: {path}: {issue}\n")
    return doc


def _write(data: str | bytes, output: str | None, stdout: TextIO) -> None:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    if output:
        try:
            Path(output).write_text(data, encoding="utf-8", newline="\n")
        except OSError as exc:
            raise CliFailure("io", f"{output}: {exc.strerror or exc}") from None
    else:
        stdout.write(data)


def _use_color(stream: TextIO) -> bool:
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


_COLORS = {Severity.ERROR: "31", Severity.WARNING: "33", Severity.INFO: "36"}


def cmd_new(args, stdin, stdout, stderr) -> int:
    doc, sheet = scaffold(DOC_TYPE_NAMES[args.doc_type], args.profile, args.title, args.prompts)
    if args.interactive:
        doc = interactive_fill(doc, stdin, stderr)
    if sheet is not None:
        stdout.write(sheet)
        if args.output:
            _write(serialize_canonical(doc), args.output, stdout)
        return EXIT_OK
    _write(serialize_canonical(doc), args.output, stdout)
    return EXIT_OK


def cmd_validate(args, stdin, stdout, stderr) -> int:
    doc = _load(args.file, stderr)
    diagnostics = validate(doc, args.profile)
    if args.format == "json":
        stdout.write(format_json(diagnostics))
    else:
        color = _use_color(stdout)
        for d in diagnostics:
            line = d.to_line()
            if color:
                line = f"\x1b[{_COLORS[d.severity]}m{line}\x1b[0m"
            stdout.write(line + "\n")
    return EXIT_FINDINGS if has_errors(diagnostics) else EXIT_OK


def cmd_score(args, stdin, stdout, stderr) -> int:
    report = score(_load(args.file, stderr))
    if args.format == "json":
        stdout.write(json.dumps(report.to_dict(), indent=2) + "\n")
    else:
        stdout.write(report.summary() + "\n")
    return EXIT_OK


def cmd_risk(args, stdin, stdout, stderr) -> int:
    doc = _load(args.file, stderr)
    try:
        report = risk_report(doc)
    except WrongDocTypeError as exc:
        raise CliFailure("wrong-doc-type", f"{args.file}: {exc}") from None
    if args.format == "json":
        stdout.write(json.dumps(report, indent=2) + "\n")
        return EXIT_OK
    factors = " ".join(f"{k}={v}" for k, v in report["factors"].items())
    stdout.write(f"risk {report['level']} (total {report['total']}/12; {factors})\n")
    if report["unknowns"]:
        stdout.write(f"unanswered factors: {', '.join(report['unknowns'])}\n")
    for gap in report["gaps"]:
        stdout.write(f"gap {gap['attack']}: {gap['reason']}\n")
    return EXIT_OK


def cmd_render(args, stdin, stdout, stderr) -> int:
    doc = _load(args.file, stderr)
    _write(render_markdown(doc, redact=args.redact), args.output, stdout)
    return EXIT_OK


def cmd_corpus(args, stdin, stdout, stderr) -> int:
    try:
        report = scan(args.dir, args.profile, workers=args.jobs)
    except OSError as exc:
        raise CliFailure("io", str(exc)) from None
    fmt = "canonical" if args.format == "json" else "csv"
    _write(export_report(report, fmt), args.output, stdout)
    return EXIT_OK


def cmd_rules(args, stdin, stdout, stderr) -> int:
    if args.format == "json":
        stdout.write(json.dumps(catalog_as_dicts(), indent=2) + "\n")
    else:
        for rule in rule_catalog():
            stdout.write(f"{rule.rule_id} {rule.severity.value}: {rule.description}\n")
    return EXIT_OK


COMMANDS = {
    "new": cmd_new,
    "validate": cmd_validate,
    "score": cmd_score,
    "risk": cmd_risk,
    "render": cmd_render,
    "corpus": cmd_corpus,
    "rules": cmd_rules,
}


def main(argv: Sequence[str] | None = None, stdin: TextIO | None = None,
         stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as exc:  # --help / --version
            return exc.code if isinstance(exc.code, int) else EXIT_OK
        return COMMANDS[args.command](args, stdin, stdout, stderr)
    except CliFailure as exc:
        stderr.write(f"error: {exc.kind}: {exc}\n")
        return EXIT_FAILURE
    except DocError as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_FAILURE


def run() -> None:
    sys.exit(main())
