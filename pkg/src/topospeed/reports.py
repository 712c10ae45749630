"""Deterministic text reports with a machine-readable block."""

import hashlib
import json

from . import __version__


def sha256(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class Report:
    """Sections of text, status lines, expectation checks and a JSON block."""

    def __init__(self, command):
        self.command = command
        self.inputs = []
        self.budgets = {}
        self.sections = []
        self.status = []
        self.checks = []
        self.data = {}

    def add_input(self, label, text):
        self.inputs.append((label, sha256(text)))

    def section(self, title, text):
        self.sections.append((title, text.rstrip("\n")))

    def set_status(self, key, value):
        self.status.append((key, str(value)))
        self.data.setdefault("status", {})[key] = str(value)

    def expect(self, name, expected, actual):
        ok = expected == actual
        self.checks.append((name, str(expected), str(actual), ok))
        return ok

    @property
    def ok(self):
        return all(c[3] for c in self.checks)


def emit_report(report):
    """Render a report; equal inputs give byte-identical text."""
    lines = [f"topospeed {__version__}", f"command: {report.command}"]
    for label, digest in report.inputs:
        lines.append(f"input {label} sha256={digest}")
    for key in sorted(report.budgets):
        lines.append(f"budget {key}={report.budgets[key]}")
    for title, text in report.sections:
        lines.append(f"== {title} ==")
        if text:
            lines.append(text)
    for key, value in report.status:
        lines.append(f"STATUS {key} {value}")
    for name, exp, act, ok in report.checks:
        lines.append(f"CHECK {name} expected={exp} actual={act} {'OK' if ok else 'MISMATCH'}")
    if report.checks:
        lines.append("RESULT " + ("OK" if report.ok else "MISMATCH"))
    block = {"command": report.command,
             "inputs": {label: digest for label, digest in report.inputs},
             "budgets": report.budgets,
             "checks": [{"name": n, "expected": e, "actual": a, "ok": ok}
                        for n, e, a, ok in report.checks],
             "data": report.data}
    lines.append("JSON")
    lines.append(json.dumps(block, sort_keys=True, default=str))
    return "\n".join(lines) + "\n"
