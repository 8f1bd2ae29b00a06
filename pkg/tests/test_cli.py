import pytest
from click.testing import CliRunner

from hipplan.catalog import default_catalog_path, load_default_catalog
from hipplan.cli import main
from hipplan.geometry import Calibration, PointPx, SegmentPx
from hipplan.sizing import measure_and_size

TABLE1_GOLDEN = """\
label  measured_mm  size
1      48.58        48
2      57.45        56
3      58.15        58
4      53.36        52
5      66.45        66
6      69.13        68
7      72.78        72
8      77.67        76
"""

TABLE1_GOLDEN_CSV = """\
label,measured_mm,size_mm,rejected_reason
1,48.58,48,
2,57.45,56,
3,58.15,58,
4,53.36,52,
5,66.45,66,
6,69.13,68,
7,72.78,72,
8,77.67,76,
"""

COMPARE_GOLDEN = """\
patient  observational_mm  digital_mm  difference
1        48                48          0
2        54                52          ±2
3        50                50          0
4        52                52          0
5        46                46          0
6        48                46          ±2
7        52                52          0
8        58                54          ±4
9        56                54          ±2
10       54                54          0

n: 10
tolerance_mm: 2
within_tolerance_count: 9
within_tolerance_rate: 0.900000
mean_abs_difference_mm: 1.000000
outlier_labels: 8

9/10 (90.0%) within ±2; outliers: patient 8 (|diff| 4); mean |diff| 1.0 mm
"""

COMPARE_GOLDEN_CSV = """\
label,observational_mm,digital_mm,difference
1,48,48,0
2,54,52,-2
3,50,50,0
4,52,52,0
5,46,46,0
6,48,46,-2
7,52,52,0
8,58,54,-4
9,56,54,-2
10,54,54,0

key,value
n,10
tolerance_mm,2
within_tolerance_count,9
within_tolerance_rate,0.900000
mean_abs_difference_mm,1.000000
outlier_labels,8
"""


@pytest.fixture
def runner():
    return CliRunner()


class TestSizeCommand:
    def test_table1_golden(self, runner, fixtures_dir):
        result = runner.invoke(main, ["size", "--input", str(fixtures_dir / "table1_measurements.csv")])
        assert result.exit_code == 0, result.output
        assert result.output == TABLE1_GOLDEN

    def test_table1_golden_csv(self, runner, fixtures_dir):
        result = runner.invoke(
            main,
            ["size", "--input", str(fixtures_dir / "table1_measurements.csv"), "--format", "csv"],
        )
        assert result.exit_code == 0
        assert result.output == TABLE1_GOLDEN_CSV

    def test_deterministic(self, runner, fixtures_dir):
        args = ["size", "--input", str(fixtures_dir / "table1_measurements.csv")]
        assert runner.invoke(main, args).output == runner.invoke(main, args).output

    def test_matches_library(self, runner, fixtures_dir):
        result = runner.invoke(
            main,
            ["size", "--input", str(fixtures_dir / "table1_measurements.csv"), "--format", "csv"],
        )
        catalog = load_default_catalog()
        lines = result.output.splitlines()[1:]
        import csv as _csv
        from pathlib import Path

        rows = list(_csv.reader(Path(fixtures_dir / "table1_measurements.csv").open()))[1:]
        assert len(lines) == len(rows)
        for out_line, row in zip(lines, rows):
            label, ax, ay, bx, by, mm_per_px = row
            sizing = measure_and_size(
                SegmentPx(PointPx(float(ax), float(ay)), PointPx(float(bx), float(by))),
                Calibration(float(mm_per_px)),
                catalog,
            )
            assert out_line == f"{label},{sizing.measured_mm:.2f},{sizing.snapped_size_mm},"

    def test_rejection_reported_not_failed(self, runner, tmp_path):
        csv_path = tmp_path / "m.csv"
        csv_path.write_text(
            "label,ax,ay,bx,by,mm_per_px\nsmall,0,0,30,0,1\nbig,0,0,90,0,1\n", encoding="utf-8"
        )
        result = runner.invoke(main, ["size", "--input", str(csv_path)])
        assert result.exit_code == 0
        assert "REJECTED(below_min)" in result.output
        assert "REJECTED(above_max)" in result.output

    def test_empty_input(self, runner, tmp_path):
        csv_path = tmp_path / "m.csv"
        csv_path.write_text("label,ax,ay,bx,by,mm_per_px\n", encoding="utf-8")
        result = runner.invoke(main, ["size", "--input", str(csv_path)])
        assert result.exit_code == 0
        assert result.output == "label  measured_mm  size\n"

    def test_degenerate_row_is_line_numbered_failure(self, runner, tmp_path):
        csv_path = tmp_path / "m.csv"
        csv_path.write_text(
            "label,ax,ay,bx,by,mm_per_px\nok,0,0,50,0,1\nbad,7,7,7,7,1\n", encoding="utf-8"
        )
        result = runner.invoke(main, ["size", "--input", str(csv_path)])
        assert result.exit_code != 0
        assert ":3:" in result.output

    def test_bad_mm_per_px(self, runner, tmp_path):
        csv_path = tmp_path / "m.csv"
        csv_path.write_text("label,ax,ay,bx,by,mm_per_px\nx,0,0,50,0,-1\n", encoding="utf-8")
        result = runner.invoke(main, ["size", "--input", str(csv_path)])
        assert result.exit_code != 0
        assert ":2:" in result.output

    def test_missing_file(self, runner, tmp_path):
        result = runner.invoke(main, ["size", "--input", str(tmp_path / "none.csv")])
        assert result.exit_code != 0


class TestCompareCommand:
    def test_table2_golden(self, runner, fixtures_dir):
        result = runner.invoke(main, ["compare", "--pairs", str(fixtures_dir / "table2.csv"), "--tolerance", "2"])
        assert result.exit_code == 0, result.output
        assert result.output == COMPARE_GOLDEN

    def test_table2_golden_csv(self, runner, fixtures_dir):
        result = runner.invoke(
            main,
            ["compare", "--pairs", str(fixtures_dir / "table2.csv"), "--tolerance", "2", "--format", "csv"],
        )
        assert result.exit_code == 0
        assert result.output == COMPARE_GOLDEN_CSV

    def test_identical_columns_hundred_percent(self, runner, tmp_path):
        p = tmp_path / "same.csv"
        p.write_text(
            "label,observational_mm,digital_mm\n1,50,50\n2,48,48\n", encoding="utf-8"
        )
        result = runner.invoke(main, ["compare", "--pairs", str(p), "--tolerance", "0"])
        assert result.exit_code == 0
        assert "2/2 (100.0%)" in result.output
        assert "no outliers" in result.output

    def test_tolerance_4_all_within(self, runner, fixtures_dir):
        result = runner.invoke(main, ["compare", "--pairs", str(fixtures_dir / "table2.csv"), "--tolerance", "4"])
        assert result.exit_code == 0
        assert "10/10 (100.0%)" in result.output

    def test_outliers_do_not_fail(self, runner, fixtures_dir):
        result = runner.invoke(main, ["compare", "--pairs", str(fixtures_dir / "table2.csv"), "--tolerance", "0"])
        assert result.exit_code == 0

    def test_parse_error_fails(self, runner, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("label,observational_mm,digital_mm\n1,48,x\n", encoding="utf-8")
        result = runner.invoke(main, ["compare", "--pairs", str(p)])
        assert result.exit_code != 0
        assert ":2:" in result.output


class TestCatalogCheckCommand:
    def test_bundled_catalog_ok(self, runner):
        result = runner.invoke(main, ["catalog-check", str(default_catalog_path())])
        assert result.exit_code == 0
        assert "catalog OK" in result.output
        assert "36-80" in result.output

    def test_odd_size_violation(self, runner, tmp_path):
        (tmp_path / "c.outlines").write_text("tri_l 3 0 0 4 0 0 4\ntri_r 3 0 0 -4 0 0 4\n", encoding="utf-8")
        (tmp_path / "c.catalog").write_text(
            "Acme left 36 tri_l\nAcme right 36 tri_r\nAcme left 57 tri_l\n", encoding="utf-8"
        )
        result = runner.invoke(main, ["catalog-check", str(tmp_path / "c.catalog")])
        assert result.exit_code != 0
        assert ":3:" in result.output

    def test_contiguity_violation(self, runner, tmp_path):
        src = default_catalog_path()
        kept = [l for l in src.read_text(encoding="utf-8").splitlines() if " 44 " not in l]
        (tmp_path / "gap.catalog").write_text("\n".join(kept) + "\n", encoding="utf-8")
        (tmp_path / "gap.outlines").write_text(
            src.with_suffix(".outlines").read_text(encoding="utf-8"), encoding="utf-8"
        )
        result = runner.invoke(main, ["catalog-check", str(tmp_path / "gap.catalog")])
        assert result.exit_code != 0
        assert "44" in result.output
