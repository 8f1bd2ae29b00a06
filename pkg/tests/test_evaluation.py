from fractions import Fraction

import pytest

from hipplan.errors import EmptyDatasetError, ParseError, ValidationError
from hipplan.evaluation import (
    build_rows,
    compare,
    format_fraction,
    load_pairs,
    render_summary_block,
    render_summary_line,
    render_table,
)


@pytest.fixture(scope="module")
def table2(fixtures_dir):
    return load_pairs(fixtures_dir / "table2.csv")


class TestLoadPairs:
    def test_fixture_rows(self, table2):
        assert len(table2) == 10
        assert table2[0] == ("1", 48, 48)
        assert table2[7] == ("8", 58, 54)
        assert [obs for _, obs, _ in table2] == [48, 54, 50, 52, 46, 48, 52, 58, 56, 54]
        assert [dig for _, _, dig in table2] == [48, 52, 50, 52, 46, 46, 52, 54, 54, 54]

    def test_empty_after_header(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("label,observational_mm,digital_mm\n", encoding="utf-8")
        assert load_pairs(p) == []

    def test_non_integer_size(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("label,observational_mm,digital_mm\n1,48,48\n2,fifty,50\n", encoding="utf-8")
        with pytest.raises(ParseError) as exc:
            load_pairs(p)
        assert exc.value.line == 3

    def test_wrong_header(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a,b,c\n", encoding="utf-8")
        with pytest.raises(ParseError) as exc:
            load_pairs(p)
        assert exc.value.line == 1


class TestCompare:
    def test_table2_agreement(self, table2):
        report = compare(table2, tolerance_mm=2)
        assert report.n == 10
        assert report.within_tolerance_count == 9
        assert report.within_tolerance_rate == Fraction(9, 10)
        assert len(report.outliers) == 1
        outlier = report.outliers[0]
        assert outlier.patient_label == "8"
        assert abs(outlier.difference) == 4
        # (0 + 2 + 0 + 0 + 0 + 2 + 0 + 4 + 2 + 0) / 10, summed by hand
        assert report.mean_abs_difference == Fraction(1)

    def test_identical_columns(self):
        pairs = [(str(i), 50, 50) for i in range(5)]
        report = compare(pairs, tolerance_mm=0)
        assert report.within_tolerance_rate == 1
        assert report.outliers == ()

    def test_empty_dataset(self):
        with pytest.raises(EmptyDatasetError):
            compare([], tolerance_mm=2)

    def test_odd_size_rejected(self):
        with pytest.raises(ValidationError):
            compare([("1", 47, 48)], tolerance_mm=2)

    def test_negative_tolerance_rejected(self, table2):
        with pytest.raises(ValidationError):
            compare(table2, tolerance_mm=-1)

    def test_tolerance_monotonicity(self, table2):
        counts = [compare(table2, tolerance_mm=t).within_tolerance_count for t in range(0, 7)]
        assert counts == sorted(counts)
        assert compare(table2, tolerance_mm=4).within_tolerance_count == 10

    def test_symmetry_under_column_swap(self, table2):
        swapped = [(label, dig, obs) for label, obs, dig in table2]
        a = compare(table2, tolerance_mm=2)
        b = compare(swapped, tolerance_mm=2)
        assert a.within_tolerance_rate == b.within_tolerance_rate
        assert a.mean_abs_difference == b.mean_abs_difference
        for ra, rb in zip(build_rows(table2), build_rows(swapped)):
            assert ra.difference == -rb.difference


class TestRendering:
    def test_format_fraction_exact(self):
        assert format_fraction(Fraction(9, 10), 6) == "0.900000"
        assert format_fraction(Fraction(1), 6) == "1.000000"
        assert format_fraction(Fraction(90), 1) == "90.0"
        assert format_fraction(Fraction(1, 3), 4) == "0.3333"
        assert format_fraction(Fraction(-1, 2), 2) == "-0.50"

    def test_difference_display(self, table2):
        rows = build_rows(table2)
        assert rows[0].difference_display == "0"
        assert rows[1].difference_display == "±2"
        assert rows[7].difference_display == "±4"

    def test_summary_line(self, table2):
        line = render_summary_line(compare(table2, tolerance_mm=2))
        assert line == "9/10 (90.0%) within ±2; outliers: patient 8 (|diff| 4); mean |diff| 1.0 mm"

    def test_summary_block(self, table2):
        block = render_summary_block(compare(table2, tolerance_mm=2))
        assert "n: 10" in block
        assert "within_tolerance_count: 9" in block
        assert "within_tolerance_rate: 0.900000" in block
        assert "mean_abs_difference_mm: 1.000000" in block
        assert "outlier_labels: 8" in block

    def test_table_alignment_stable(self, table2):
        text = render_table(build_rows(table2))
        assert text.splitlines()[0].startswith("patient")
        assert len(text.splitlines()) == 11
        # deterministic output
        assert text == render_table(build_rows(table2))
