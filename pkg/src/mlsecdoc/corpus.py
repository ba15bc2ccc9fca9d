"""Batch analysis of a directory of model cards and datasheets."""

from __future__ import annotations

import csv
import io
import json
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .doc_model import SECTIONS, Document, Profile
from .errors import DocError, InvalidArgumentError
from .scorer import score
from .serialization import CANONICAL_SUFFIXES, load_document
from .validator import Severity, validate

DOC_SUFFIXES = tuple(CANONICAL_SUFFIXES) + (".md",)
CSV_HEADER = ("path", "doc_type", "overall", "security_score", "errors")
ALL_SECTIONS = tuple(dict.fromkeys(k for keys in SECTIONS.values() for k in keys))


@dataclass(frozen=True)
class FileResult:
    path: str
    doc_type: str
    overall: float
    security_score: float
    errors: int


@dataclass(frozen=True)
class FileFailure:
    path: str
    reason: str


@dataclass(frozen=True)
class CorpusReport:
    n_files: int
    n_parsed: int
    n_failed: int
    section_fill_rate: dict[str, float | None]
    security_adoption_rate: float | None
    mean_overall: float | None
    median_overall: float | None
    per_file: list[FileResult] = field(default_factory=list)
    failures: list[FileFailure] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n_files": self.n_files,
            "n_parsed": self.n_parsed,
            "n_failed": self.n_failed,
            "section_fill_rate": dict(self.section_fill_rate),
            "security_adoption_rate": self.security_adoption_rate,
            "mean_overall": self.mean_overall,
            "median_overall": self.median_overall,
            "per_file": [vars(r) for r in self.per_file],
            "failures": [vars(f) for f in self.failures],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusReport":
        return cls(
            n_files=data["n_files"],
            n_parsed=data["n_parsed"],
            n_failed=data["n_failed"],
            section_fill_rate=dict(data["section_fill_rate"]),
            security_adoption_rate=data["security_adoption_rate"],
            mean_overall=data["mean_overall"],
            median_overall=data["median_overall"],
            per_file=[FileResult(**r) for r in data["per_file"]],
            failures=[FileFailure(**f) for f in data["failures"]],
        )


def discover(root: Path) -> list[Path]:
    return sorted(
        (p for p in root.rglob("*") if p.is_file() and p.name.lower().endswith(DOC_SUFFIXES)),
        key=lambda p: p.relative_to(root).as_posix(),
    )


@dataclass(frozen=True)
class _Outcome:
    path: str
    doc: Document | None = None
    result: FileResult | None = None
    failure: FileFailure | None = None
    ratios: dict[str, float] | None = None


def _analyze(root: Path, path: Path, profile: Profile | None) -> _Outcome:
    rel = path.relative_to(root).as_posix()
    try:
        doc, _issues = load_document(path)
    except (DocError, OSError) as exc:
        return _Outcome(rel, failure=FileFailure(rel, f"{type(exc).__name__}: {exc}"))
    report = score(doc)
    diagnostics = validate(doc, profile)
    errors = sum(d.severity is Severity.ERROR for d in diagnostics)
    return _Outcome(rel, doc, FileResult(rel, doc.doc_type.value, report.overall,
                                         report.security_score, errors), ratios=report.per_section)


def _section_filled(doc: Document, section: str, ratios: dict[str, float]) -> bool:
    if section in ratios:
        return ratios[section] > 0
    return any(a.is_value for a in doc.section(section).values())


def analyze_files(root: Path | str, paths: Iterable[Path], profile: Profile | str | None = None,
                  workers: int | None = None) -> CorpusReport:
    """Analyze ``paths`` (files under ``root``); their order does not matter."""
    root = Path(root)
    profile = Profile(profile) if profile is not None else None
    ordered = sorted(paths, key=lambda p: Path(p).relative_to(root).as_posix())
    if workers and workers > 1 and len(ordered) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda p: _analyze(root, Path(p), profile), ordered))
    else:
        outcomes = [_analyze(root, Path(p), profile) for p in ordered]

    parsed = [o for o in outcomes if o.doc is not None]
    failures = [o.failure for o in outcomes if o.failure is not None]

    fill: dict[str, float | None] = {}
    for section in ALL_SECTIONS:
        having = [o for o in parsed if section in SECTIONS[o.doc.doc_type]]
        if not having:
            fill[section] = None
            continue
        filled = sum(_section_filled(o.doc, section, o.ratios) for o in having)
        fill[section] = filled / len(having)

    overall = [o.result.overall for o in parsed]
    return CorpusReport(
        n_files=len(outcomes),
        n_parsed=len(parsed),
        n_failed=len(failures),
        section_fill_rate=fill,
        security_adoption_rate=(sum(o.result.security_score > 0 for o in parsed) / len(parsed)
                                if parsed else None),
        mean_overall=statistics.fmean(overall) if overall else None,
        median_overall=statistics.median(overall) if overall else None,
        per_file=[o.result for o in parsed],
        failures=failures,
    )


def scan(root: Path | str, profile: Profile | str | None = None,
         workers: int | None = None) -> CorpusReport:
    """Recursively analyze every ``.mcard.json``, ``.dsheet.json`` and ``.md`` file.

    ``profile`` overrides the validation profile of each document; by default
    each document is validated under its own profile.
    """
    root = Path(root)
    if not root.is_dir():
        raise OSError(f"not a readable directory: {root}")
    return analyze_files(root, discover(root), profile, workers)


def export_report(report: CorpusReport, fmt: str = "canonical") -> bytes:
    if fmt in ("canonical", "json"):
        return (json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in report.per_file:
            writer.writerow((r.path, r.doc_type, f"{r.overall:.4f}", f"{r.security_score:.4f}", r.errors))
        return buf.getvalue().encode("utf-8")
    raise InvalidArgumentError(f"unknown report format {fmt!r}; expected canonical or csv")


def load_report(data: bytes | str) -> CorpusReport:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return CorpusReport.from_dict(json.loads(data))

