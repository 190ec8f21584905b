"""Corpus scanning and the JSON report."""

from __future__ import annotations

import fnmatch
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Sequence, Tuple

from sescan.lexer import ScanError, tokenize
from sescan.scanner import CLASSES, Finding, Note, ScanConfig, hardcoded_receivers, scan_source

SCHEMA_VERSION = "sescan-report/1"


@dataclass
class Report:
    schema_version: str = SCHEMA_VERSION
    scanned_files: int = 0
    findings: List[dict] = field(default_factory=list)
    notes: List[dict] = field(default_factory=list)
    per_class_counts: Dict[str, int] = field(default_factory=lambda: {c: 0 for c in CLASSES})
    errors: List[dict] = field(default_factory=list)
    config_echo: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls(**json.loads(text))


def finding_record(path: str, f: Finding) -> dict:
    return {
        "file": path,
        "attack_class": f.attack_class,
        "severity": f.severity,
        "span": asdict(f.span),
        "message": f.message,
        "evidence": f.evidence,
    }


def note_record(path: str, n: Note) -> dict:
    return {
        "file": path,
        "severity": n.severity,
        "span": asdict(n.span),
        "message": n.message,
        "evidence": n.evidence,
    }


def collect_files(paths: Sequence[str], pattern: str = "*.sol") -> Tuple[List[str], List[dict]]:
    """Expand directories recursively; explicit files are taken as given."""
    files, errors = [], []
    for p in paths:
        if os.path.isdir(p):
            for root, dirs, names in os.walk(p):
                dirs.sort()
                for name in sorted(names):
                    if fnmatch.fnmatch(name, pattern):
                        files.append(os.path.join(root, name))
        elif os.path.isfile(p):
            files.append(p)
        else:
            errors.append({"file": p, "error": "no such file or directory"})
    norm = sorted({f.replace(os.sep, "/") for f in files})
    return norm, errors


def _read(path: str) -> bytes:
    with open(path, "rb") as f:
        return f.read()


def _scan_one(args):
    path, config = args
    try:
        result = scan_source(_read(path), config)
    except (OSError, ScanError) as e:
        return path, None, str(e)
    return path, result, None


def receivers_in(files: Sequence[str]):
    out = []
    for path in files:
        try:
            out.extend(hardcoded_receivers(tokenize(_read(path))))
        except (OSError, ScanError):
            continue
    return out


def scan_files(files: Sequence[str], config: ScanConfig, jobs: int = 1) -> Report:
    report = Report()
    work = [(p, config) for p in files]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            outcomes = list(pool.map(_scan_one, work))
    else:
        outcomes = [_scan_one(w) for w in work]
    for path, result, error in outcomes:
        if error is not None:
            report.errors.append({"file": path, "error": error})
            continue
        report.scanned_files += 1
        report.findings.extend(finding_record(path, f) for f in result.findings)
        report.notes.extend(note_record(path, n) for n in result.notes)
    for r in report.findings:
        report.per_class_counts[r["attack_class"]] += 1
    return report


def exit_code(report: Report) -> int:
    if report.scanned_files == 0:
        return 2
    return 1 if report.findings else 0
