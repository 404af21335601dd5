"""Line-oriented text reports.

A report is a sequence of ``key value`` lines in insertion order followed
by ``check <name> <lhs> <rhs> <tol> <pass|fail>`` lines.  Floats are
written with 17 significant digits so reports round-trip exactly.
"""

from __future__ import annotations

from pathlib import Path

from .fields import atomic_write_text
from .variation import Check

__all__ = ["Report", "format_value", "parse_report"]


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v).replace("\n", " ")


class Report:
    def __init__(self, command: str) -> None:
        self.items: list[tuple[str, str]] = [("command", command)]
        self.checks: list[Check] = []

    def add(self, key: str, value) -> None:
        if " " in key:
            raise ValueError("report keys must not contain spaces")
        self.items.append((key, format_value(value)))

    def check(self, c: Check) -> None:
        self.checks.append(c)

    def extend(self, checks) -> None:
        self.checks.extend(checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self) -> str:
        lines = [f"{k} {v}" for k, v in self.items]
        lines.extend(c.line() for c in self.checks)
        lines.append(f"status {'pass' if self.passed else 'fail'}")
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path | None) -> str:
        text = self.render()
        if path is not None:
            atomic_write_text(path, text)
        return text


def parse_report(text: str) -> tuple[dict[str, str], list[tuple[str, float, float, float, bool]]]:
    """Inverse of :meth:`Report.render` (keys to strings, checks to tuples)."""
    items: dict[str, str] = {}
    checks = []
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, rest = line.partition(" ")
        if key == "check":
            name, lhs, rhs, tol, status = rest.split()
            checks.append((name, float(lhs), float(rhs), float(tol), status == "pass"))
        else:
            items[key] = rest
    return items, checks
