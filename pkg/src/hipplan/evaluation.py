"""Observational-vs-digital templating comparison.

Differences are stored signed as digital minus observational and
displayed as magnitudes with a leading plus-minus sign, matching how
paired size tables are usually reported. Statistics over integer sizes
are exact rationals; rendering quantizes, the values never do.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .errors import EmptyDatasetError, ParseError, ValidationError

__all__ = [
    "ComparisonRow",
    "AgreementReport",
    "build_rows",
    "compare",
    "load_pairs",
    "format_fraction",
    "render_table",
    "render_summary_block",
    "render_summary_line",
]

Pair = tuple[str, int, int]


@dataclass(frozen=True)
class ComparisonRow:
    patient_label: str
    size_observational: int
    size_digital: int
    difference: int  # digital - observational

    @property
    def difference_display(self) -> str:
        return "0" if self.difference == 0 else f"±{abs(self.difference)}"


@dataclass(frozen=True)
class AgreementReport:
    n: int
    within_tolerance_count: int
    within_tolerance_rate: Fraction
    tolerance_mm: int
    outliers: tuple[ComparisonRow, ...]
    mean_abs_difference: Fraction


def _check_size(label: str, name: str, value: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValidationError(f"{name} for {label!r} must be an integer, got {value!r}")
    if value <= 0:
        raise ValidationError(f"{name} for {label!r} must be positive, got {value}")
    if value % 2:
        raise ValidationError(f"{name} for {label!r} must be even, got {value}")
    return value


def build_rows(pairs: Iterable[Pair]) -> tuple[ComparisonRow, ...]:
    rows = []
    for label, obs, dig in pairs:
        _check_size(label, "observational size", obs)
        _check_size(label, "digital size", dig)
        rows.append(ComparisonRow(label, obs, dig, dig - obs))
    return tuple(rows)


def compare(pairs: Sequence[Pair], tolerance_mm: int) -> AgreementReport:
    """Count agreements within tolerance; everything else is an outlier."""
    if not pairs:
        raise EmptyDatasetError("no measurement pairs to compare")
    if not isinstance(tolerance_mm, int) or tolerance_mm < 0:
        raise ValidationError(f"tolerance must be a non-negative integer, got {tolerance_mm!r}")
    rows = build_rows(pairs)
    outliers = tuple(r for r in rows if abs(r.difference) > tolerance_mm)
    n = len(rows)
    within = n - len(outliers)
    return AgreementReport(
        n=n,
        within_tolerance_count=within,
        within_tolerance_rate=Fraction(within, n),
        tolerance_mm=tolerance_mm,
        outliers=outliers,
        mean_abs_difference=Fraction(sum(abs(r.difference) for r in rows), n),
    )


_HEADER = ["label", "observational_mm", "digital_mm"]


def load_pairs(path: str | Path) -> list[Pair]:
    """Read a comparison CSV, preserving row order."""
    path = Path(path)
    pairs: list[Pair] = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file, expected header {','.join(_HEADER)}", line=1) from None
        if header != _HEADER:
            raise ParseError(
                f"{path}:1: expected header {','.join(_HEADER)}, got {','.join(header)}", line=1
            )
        for row in reader:
            lineno = reader.line_num
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"{path}:{lineno}: expected 3 fields, got {len(row)}", line=lineno)
            label, obs_text, dig_text = row
            try:
                obs = int(obs_text)
                dig = int(dig_text)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: sizes must be integers", line=lineno) from None
            pairs.append((label, obs, dig))
    return pairs


def format_fraction(value: Fraction, places: int) -> str:
    """Render an exact rational with fixed decimals, no float round-trip."""
    scaled = round(value * 10**places)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**places)
    if places == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{places}d}"


def render_table(rows: Sequence[ComparisonRow]) -> str:
    headers = ["patient", "observational_mm", "digital_mm", "difference"]
    cells = [[r.patient_label, str(r.size_observational), str(r.size_digital), r.difference_display] for r in rows]
    widths = [max(len(headers[i]), *(len(row[i]) for row in cells)) if cells else len(headers[i]) for i in range(4)]
    out = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip()]
    for row in cells:
        out.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(out)


def render_summary_block(report: AgreementReport) -> str:
    """Machine-readable key-value summary."""
    lines = [
        f"n: {report.n}",
        f"tolerance_mm: {report.tolerance_mm}",
        f"within_tolerance_count: {report.within_tolerance_count}",
        f"within_tolerance_rate: {format_fraction(report.within_tolerance_rate, 6)}",
        f"mean_abs_difference_mm: {format_fraction(report.mean_abs_difference, 6)}",
        f"outlier_labels: {','.join(r.patient_label for r in report.outliers)}",
    ]
    return "\n".join(lines)


def render_summary_line(report: AgreementReport) -> str:
    pct = format_fraction(report.within_tolerance_rate * 100, 1)
    if report.outliers:
        outliers = "outliers: " + ", ".join(
            f"patient {r.patient_label} (|diff| {abs(r.difference)})" for r in report.outliers
        )
    else:
        outliers = "no outliers"
    mean = format_fraction(report.mean_abs_difference, 1)
    return (
        f"{report.within_tolerance_count}/{report.n} ({pct}%) within ±{report.tolerance_mm}; "
        f"{outliers}; mean |diff| {mean} mm"
    )
