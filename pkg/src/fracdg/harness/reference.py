"""Published convergence tables and comparison of fresh reports against them."""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .study import ConvergenceReport, ReportRow

__all__ = [
    "Comparison",
    "ReferenceRow",
    "compare_reference",
    "load_reference",
    "reference_rows",
    "report_from_reference",
]

PASS, FAIL, SKIP, MISSING = "PASS", "FAIL", "SKIP", "MISSING"


@dataclass(frozen=True)
class ReferenceRow:
    table: int
    mu: float
    gamma: float | None  # None for space tables
    key: int
    error: float | None  # None marks a blank published cell
    rate: float | None

    @property
    def kind(self) -> str:
        return "M" if self.gamma is None else "N"


def _num(text: str) -> float | None:
    text = text.strip()
    return None if text == "" else float(Fraction(text))


def load_reference(path=None) -> list[ReferenceRow]:
    """Read a reference table CSV; the bundled tables when ``path`` is None.

    Columns are ``table,mu,gamma,key,error,rate``. Lines starting with
    ``#`` are comments, ``mu`` may be a fraction such as ``2/3`` and empty
    cells mean "not published".
    """
    if path is None:
        text = resources.files("fracdg.data").joinpath("reference_tables.csv").read_text()
    else:
        with open(path, newline="") as fh:
            text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    rows = []
    for rec in csv.DictReader(lines):
        rows.append(
            ReferenceRow(
                table=int(rec["table"]),
                mu=_num(rec["mu"]),
                gamma=_num(rec["gamma"]),
                key=int(rec["key"]),
                error=_num(rec["error"]),
                rate=_num(rec["rate"]),
            )
        )
    return rows


def reference_rows(rows, kind: str, mu: float, gamma: float | None = None) -> dict[int, ReferenceRow]:
    """Rows of one refinement sequence keyed by ``N`` or ``M``."""
    out = {}
    for r in rows:
        if r.kind != kind or not math.isclose(r.mu, mu, rel_tol=0.0, abs_tol=1e-9):
            continue
        if kind == "N" and not math.isclose(r.gamma, gamma, rel_tol=0.0, abs_tol=1e-9):
            continue
        out[r.key] = r
    return out


@dataclass
class Comparison:
    """A report annotated with reference values and per-row verdicts."""

    report: ConvergenceReport
    missing: list[int]

    @property
    def verdicts(self) -> list[tuple[int, str]]:
        return [(r.key, r.verdict) for r in self.report.rows] + [(k, MISSING) for k in self.missing]

    @property
    def failures(self) -> list[tuple[int, str]]:
        return [(k, v) for k, v in self.verdicts if v in (FAIL, MISSING)]

    @property
    def passed(self) -> bool:
        return not self.failures

    def format(self) -> str:
        lines = [f"{self.report.kind:>6} {'error':>12} {'ref':>12} {'rate':>8} {'ref':>8}  verdict"]
        for r in self.report.rows:
            lines.append(
                f"{r.key:>6} {r.error:12.4e} {_fmt(r.ref_error, '12.4e')} "
                f"{_fmt(r.rate, '8.4f')} {_fmt(r.ref_rate, '8.4f')}  {r.verdict}"
            )
        for k in self.missing:
            lines.append(f"{k:>6} {'':>12} {'':>12} {'':>8} {'':>8}  {MISSING}")
        return "\n".join(lines)


def _fmt(v, spec):
    width = int(spec.split(".")[0])
    return " " * width if v is None else format(v, spec)


def compare_reference(
    report: ConvergenceReport,
    reference=None,
    error_rel: float = 0.05,
    rate_abs: float = 0.05,
) -> Comparison:
    """Compare against the matching reference sequence.

    A row passes when ``|error - ref| / ref <= error_rel`` and, where both
    rates exist, ``|rate - ref_rate| <= rate_abs``. Blank reference cells
    give ``SKIP``; report rows without a reference row and reference rows
    absent from the report are both reported as missing.
    ``reference`` is a path, a list of :class:`ReferenceRow`, or None for
    the bundled tables.
    """
    rows = reference if isinstance(reference, list) else load_reference(reference)
    ref = reference_rows(rows, report.kind, report.mu, report.gamma)
    out_rows = []
    missing = []
    for r in report.rows:
        rr = ref.get(r.key)
        if rr is None:
            out_rows.append(dataclasses.replace(r, ref_error=None, ref_rate=None, verdict=MISSING))
            continue
        if rr.error is None:
            out_rows.append(dataclasses.replace(r, ref_error=None, ref_rate=None, verdict=SKIP))
            continue
        ok = abs(r.error - rr.error) / rr.error <= error_rel
        if rr.rate is not None and r.rate is not None:
            ok = ok and abs(r.rate - rr.rate) <= rate_abs
        out_rows.append(dataclasses.replace(r, ref_error=rr.error, ref_rate=rr.rate, verdict=PASS if ok else FAIL))
    have = {r.key for r in report.rows}
    missing = sorted(k for k in ref if k not in have)
    annotated = ConvergenceReport(report.kind, report.mu, report.gamma, out_rows)
    return Comparison(annotated, missing)


def report_from_reference(rows, kind: str, mu: float, gamma: float | None = None) -> ConvergenceReport:
    """The reference sequence itself as a report (blank cells dropped)."""
    ref = reference_rows(rows, kind, mu, gamma)
    out = [ReportRow(k, r.error, r.rate) for k, r in sorted(ref.items()) if r.error is not None]
    return ConvergenceReport(kind, mu, gamma, out)
