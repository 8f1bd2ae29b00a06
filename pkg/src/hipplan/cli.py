"""Batch command line tools: sizing from CSV, agreement reports, catalog checks.

Output is deterministic: identical inputs produce byte-identical text in
both the aligned table format and the csv format.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import click

from .catalog import default_catalog_path, load_catalog
from .errors import InvalidMeasurementError, ParseError, TemplatingError, ValidationError
from .evaluation import (
    build_rows,
    compare as run_compare,
    load_pairs,
    render_summary_block,
    render_summary_line,
    render_table,
)
from .geometry import Calibration, PointPx, SegmentPx
from .sizing import ImplantCatalog, measure_and_size

MEASUREMENT_HEADER = ["label", "ax", "ay", "bx", "by", "mm_per_px"]


def _load_measurements(path: Path) -> list[tuple[str, SegmentPx, Calibration]]:
    rows: list[tuple[str, SegmentPx, Calibration]] = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file, expected header {','.join(MEASUREMENT_HEADER)}", line=1) from None
        if header != MEASUREMENT_HEADER:
            raise ParseError(
                f"{path}:1: expected header {','.join(MEASUREMENT_HEADER)}, got {','.join(header)}",
                line=1,
            )
        for row in reader:
            lineno = reader.line_num
            if not row:
                continue
            if len(row) != 6:
                raise ParseError(f"{path}:{lineno}: expected 6 fields, got {len(row)}", line=lineno)
            label = row[0]
            try:
                ax, ay, bx, by, mm_per_px = (float(v) for v in row[1:])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-numeric value", line=lineno) from None
            if mm_per_px <= 0:
                raise ParseError(f"{path}:{lineno}: mm_per_px must be positive, got {mm_per_px}", line=lineno)
            rows.append((label, SegmentPx(PointPx(ax, ay), PointPx(bx, by)), Calibration(mm_per_px)))
    return rows


def _load_catalog_arg(catalog_path: str | None) -> ImplantCatalog:
    return load_catalog(Path(catalog_path) if catalog_path else default_catalog_path())


@click.group()
def main():
    """Acetabular templating batch tools."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--catalog", "catalog_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Catalog file; defaults to the bundled Versys catalog.")
@click.option("--format", "fmt", type=click.Choice(["table", "csv"]), default="table", show_default=True)
def size(input_path: str, catalog_path: str | None, fmt: str):
    """Size each measurement row of a CSV file.

    Rows outside the catalog range are reported as REJECTED, which is a
    valid clinical answer: the command still exits 0. Parse errors and
    degenerate segments exit nonzero.
    """
    try:
        catalog = _load_catalog_arg(catalog_path)
        measurements = _load_measurements(Path(input_path))
        results = []
        for lineno, (label, segment, calibration) in enumerate(measurements, start=2):
            try:
                results.append((label, measure_and_size(segment, calibration, catalog)))
            except InvalidMeasurementError as exc:
                raise ParseError(f"{input_path}:{lineno}: {exc}", line=lineno) from exc
    except TemplatingError as exc:
        raise click.ClickException(str(exc)) from exc

    def cell(result):
        if result.accepted:
            return str(result.snapped_size_mm)
        return f"REJECTED({result.rejected_reason.value})"

    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["label", "measured_mm", "size_mm", "rejected_reason"])
        for label, result in results:
            writer.writerow(
                [
                    label,
                    f"{result.measured_mm:.2f}",
                    result.snapped_size_mm if result.accepted else "",
                    "" if result.accepted else result.rejected_reason.value,
                ]
            )
        click.echo(buf.getvalue(), nl=False)
        return
    headers = ["label", "measured_mm", "size"]
    cells = [[label, f"{r.measured_mm:.2f}", cell(r)] for label, r in results]
    widths = [
        max(len(headers[i]), *(len(row[i]) for row in cells)) if cells else len(headers[i])
        for i in range(3)
    ]
    click.echo("  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip())
    for row in cells:
        click.echo("  ".join(c.ljust(widths[i]) for i, c in enumerate(row)).rstrip())


@main.command()
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--tolerance", default=2, show_default=True, type=int,
              help="Clinically acceptable size difference in mm.")
@click.option("--format", "fmt", type=click.Choice(["table", "csv"]), default="table", show_default=True)
def compare(pairs_path: str, tolerance: int, fmt: str):
    """Report observational-vs-digital agreement for paired sizes."""
    try:
        pairs = load_pairs(pairs_path)
        report = run_compare(pairs, tolerance_mm=tolerance)
        rows = build_rows(pairs)
    except TemplatingError as exc:
        raise click.ClickException(str(exc)) from exc
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["label", "observational_mm", "digital_mm", "difference"])
        for row in rows:
            writer.writerow([row.patient_label, row.size_observational, row.size_digital, row.difference])
        buf.write("\n")
        writer.writerow(["key", "value"])
        for line in render_summary_block(report).splitlines():
            key, value = line.split(": ", 1)
            writer.writerow([key, value])
        click.echo(buf.getvalue(), nl=False)
        return
    click.echo(render_table(rows))
    click.echo()
    click.echo(render_summary_block(report))
    click.echo()
    click.echo(render_summary_line(report))


@main.command("catalog-check")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def catalog_check(path: str):
    """Validate a catalog file: parity, range, contiguity, outlines."""
    try:
        catalog = load_catalog(Path(path))
    except (ParseError, ValidationError) as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"catalog OK: brand {catalog.brand}, sizes {catalog.min_size}-{catalog.max_size} "
               f"step 2, {len(catalog)} entries, both sides present")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--plan-dir", default="plans", show_default=True,
              help="Directory where saved plans are stored.")
@click.option("--ui-dir", default=None, type=click.Path(file_okay=False),
              help="Built browser UI to mount at /ui; defaults to ./frontend when it has an index.html.")
def serve(host: str, port: int, plan_dir: str, ui_dir: str | None):
    """Run the planning HTTP service (serves the browser UI when built)."""
    import uvicorn

    from .service import create_app

    frontend = Path(ui_dir) if ui_dir else Path("frontend")
    frontend_dir = frontend if (frontend / "index.html").is_file() else None
    if frontend_dir:
        click.echo(f"serving UI from {frontend_dir} at /ui")
    uvicorn.run(create_app(plan_dir=plan_dir, frontend_dir=frontend_dir), host=host, port=port)


if __name__ == "__main__":
    main()
