import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hipplan.errors import InvalidMeasurementError, NotFoundError
from hipplan.geometry import Calibration, PointPx, SegmentPx
from hipplan.sizing import (
    RejectionReason,
    Side,
    measure_and_size,
    snap_to_size,
    lookup_template,
)


def oracle_snap(measured_mm, catalog):
    """Brute-force reference: scan downward from floor(measured) for the
    first even integer, then classify it against the catalog size list.

    Returns ("error", None), ("accepted", size), or ("rejected", reason).
    """
    if not math.isfinite(measured_mm) or measured_mm <= 0:
        return ("error", None)
    k = math.floor(round(measured_mm, 6))
    while k % 2 != 0:
        k -= 1
    sizes = catalog.sizes
    if k in sizes:
        return ("accepted", k)
    if k < min(sizes):
        return ("rejected", RejectionReason.BELOW_MIN)
    return ("rejected", RejectionReason.ABOVE_MAX)


def run_snap(measured_mm, catalog):
    try:
        result = snap_to_size(measured_mm, catalog)
    except InvalidMeasurementError:
        return ("error", None)
    if result.accepted:
        return ("accepted", result.snapped_size_mm)
    return ("rejected", result.rejected_reason)


class TestSnapToSize:
    @pytest.mark.parametrize(
        "measured,expected",
        [
            (64.15, 64),
            (58.28, 58),
            (59.25, 58),
            # rows matching the table1_measurements fixture
            (48.58, 48),
            (57.45, 56),
            (58.15, 58),
            (53.36, 52),
            (66.45, 66),
            (69.13, 68),
            (72.78, 72),
            (77.67, 76),
        ],
    )
    def test_worked_examples(self, default_catalog, measured, expected):
        result = snap_to_size(measured, default_catalog)
        assert result.accepted
        assert result.snapped_size_mm == expected
        assert result.measured_mm == measured

    def test_boundaries(self, default_catalog):
        assert snap_to_size(36.0, default_catalog).snapped_size_mm == 36
        below = snap_to_size(35.99, default_catalog)
        assert not below.accepted
        assert below.rejected_reason is RejectionReason.BELOW_MIN
        # snapping happens before the range gate
        assert snap_to_size(81.7, default_catalog).snapped_size_mm == 80
        above = snap_to_size(82.0, default_catalog)
        assert not above.accepted
        assert above.rejected_reason is RejectionReason.ABOVE_MAX

    def test_exact_integers(self, default_catalog):
        assert snap_to_size(58.0, default_catalog).snapped_size_mm == 58
        assert snap_to_size(59.0, default_catalog).snapped_size_mm == 58

    def test_float_noise_guard(self, default_catalog):
        assert snap_to_size(58 - 1e-13, default_catalog).snapped_size_mm == 58

    def test_invalid_measurements(self, default_catalog):
        for bad in (0.0, -3.0, float("nan"), float("inf")):
            with pytest.raises(InvalidMeasurementError):
                snap_to_size(bad, default_catalog)

    def test_matches_oracle_on_grid(self, default_catalog):
        for i in range(0, 12001):
            measured = i / 100
            assert run_snap(measured, default_catalog) == oracle_snap(measured, default_catalog), measured

    @given(st.floats(min_value=36, max_value=80.999, allow_nan=False))
    def test_never_rounds_up(self, default_catalog, measured):
        result = snap_to_size(measured, default_catalog)
        assert result.accepted
        assert result.snapped_size_mm <= measured + 1e-6
        assert result.snapped_size_mm % 2 == 0
        assert 36 <= result.snapped_size_mm <= 80

    @given(
        st.floats(min_value=0.01, max_value=120, allow_nan=False),
        st.floats(min_value=0.01, max_value=120, allow_nan=False),
    )
    def test_monotone(self, default_catalog, m1, m2):
        if m1 > m2:
            m1, m2 = m2, m1
        r1 = snap_to_size(m1, default_catalog)
        r2 = snap_to_size(m2, default_catalog)
        if r1.accepted and r2.accepted:
            assert r1.snapped_size_mm <= r2.snapped_size_mm

    def test_idempotent_on_catalog_sizes(self, default_catalog):
        for size in default_catalog.sizes:
            assert snap_to_size(float(size), default_catalog).snapped_size_mm == size


class TestMeasureAndSize:
    def test_half_mm_per_px_construction(self, default_catalog):
        s = SegmentPx(PointPx(0, 0), PointPx(116.56, 0))
        result = measure_and_size(s, Calibration(0.5), default_catalog)
        assert result.measured_mm == pytest.approx(58.28, abs=1e-12)
        assert result.snapped_size_mm == 58

    def test_degenerate_segment(self, default_catalog):
        with pytest.raises(InvalidMeasurementError):
            measure_and_size(SegmentPx(PointPx(0, 0), PointPx(0, 0)), Calibration(0.5), default_catalog)

    def test_exact_vertical(self, default_catalog):
        s = SegmentPx(PointPx(10, 10), PointPx(10, 170))
        result = measure_and_size(s, Calibration(0.3), default_catalog)
        assert result.measured_mm == pytest.approx(48.0, abs=1e-9)
        assert result.snapped_size_mm == 48

    @given(
        st.floats(min_value=50, max_value=400, allow_nan=False),
        st.floats(min_value=0.05, max_value=2.0, allow_nan=False),
        st.floats(min_value=0.1, max_value=10.0, allow_nan=False),
    )
    def test_scale_consistency(self, default_catalog, length_px, mm_per_px, factor):
        s1 = SegmentPx(PointPx(0, 0), PointPx(length_px, 0))
        s2 = SegmentPx(PointPx(0, 0), PointPx(length_px * factor, 0))
        r1 = measure_and_size(s1, Calibration(mm_per_px), default_catalog)
        r2 = measure_and_size(s2, Calibration(mm_per_px / factor), default_catalog)
        assert r1.measured_mm == pytest.approx(r2.measured_mm, abs=1e-9)


class TestLookup:
    def test_direct_hit(self, default_catalog):
        spec = lookup_template(default_catalog, Side.LEFT, 58)
        assert spec.size_mm == 58
        assert spec.side is Side.LEFT

    def test_odd_size_never_present(self, default_catalog):
        with pytest.raises(NotFoundError):
            lookup_template(default_catalog, Side.RIGHT, 57)

    def test_below_range_absent(self, default_catalog):
        with pytest.raises(NotFoundError):
            lookup_template(default_catalog, Side.LEFT, 34)
