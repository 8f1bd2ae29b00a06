"""Acetabulum diameter to catalog cup size.

The selection rule: floor the millimetre measurement to an integer, step
down one when the floor is odd (cups come only in even sizes), then gate
the result against the catalog range. The rule never rounds up, so the
chosen cup never exceeds the measured socket.

Snapping happens before the range gate: a measurement of 81.7 mm floors
to 81, steps down to 80 and is accepted, while 35.99 mm lands on 34 and
is rejected as below the minimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import InvalidMeasurementError, NotFoundError, ValidationError
from .geometry import Calibration, Outline, SegmentPx, distance_px, px_to_mm

__all__ = [
    "Side",
    "RejectionReason",
    "ImplantSpec",
    "ImplantCatalog",
    "SizingResult",
    "floor_to_even_mm",
    "snap_to_size",
    "measure_and_size",
    "lookup_template",
]


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class RejectionReason(str, Enum):
    BELOW_MIN = "below_min"
    ABOVE_MAX = "above_max"


@dataclass(frozen=True)
class ImplantSpec:
    """One catalog entry: a cup of a given brand, side, and outer diameter.

    The outline is the silhouette at unit scale (1 px per mm), centred on
    the cup circle centre with the opening along the local x axis.
    """

    brand: str
    side: Side
    size_mm: int
    outline: Outline

    def __post_init__(self):
        if not isinstance(self.size_mm, int) or self.size_mm <= 0:
            raise ValidationError(f"size_mm must be a positive integer, got {self.size_mm!r}")
        if self.size_mm % 2:
            raise ValidationError(f"size_mm must be even, got {self.size_mm}")
        if not self.brand:
            raise ValidationError("brand must be non-empty")


class ImplantCatalog:
    """All cup sizes for one brand: even, contiguous in steps of 2, both sides.

    Immutable after construction; safe to share between threads.
    """

    def __init__(self, brand: str, specs: Iterable[ImplantSpec]):
        specs = tuple(specs)
        if not specs:
            raise ValidationError("catalog must contain at least one entry")
        by_key: dict[tuple[Side, int], ImplantSpec] = {}
        for spec in specs:
            if spec.brand != brand:
                raise ValidationError(
                    f"catalog brand {brand!r} does not match entry brand {spec.brand!r}"
                )
            key = (spec.side, spec.size_mm)
            if key in by_key:
                raise ValidationError(f"duplicate catalog entry for {spec.side.value} {spec.size_mm}")
            by_key[key] = spec
        sizes = sorted({size for _, size in by_key})
        expected = list(range(sizes[0], sizes[-1] + 2, 2))
        if sizes != expected:
            missing = sorted(set(expected) - set(sizes))
            raise ValidationError(
                f"catalog sizes are not contiguous in steps of 2: missing {missing}"
            )
        for size in sizes:
            for side in Side:
                if (side, size) not in by_key:
                    raise ValidationError(f"catalog is missing {side.value} side for size {size}")
        self.brand = brand
        self._by_key = by_key
        self._sizes = tuple(sizes)

    @property
    def sizes(self) -> tuple[int, ...]:
        return self._sizes

    @property
    def min_size(self) -> int:
        return self._sizes[0]

    @property
    def max_size(self) -> int:
        return self._sizes[-1]

    def get(self, side: Side, size_mm: int) -> ImplantSpec | None:
        return self._by_key.get((Side(side), size_mm))

    def __len__(self) -> int:
        return len(self._by_key)

    def __iter__(self):
        return iter(sorted(self._by_key.values(), key=lambda s: (s.size_mm, s.side.value)))


@dataclass(frozen=True)
class SizingResult:
    """Outcome of sizing one measurement.

    Exactly one of snapped_size_mm / rejected_reason is set. measured_mm
    keeps the full-precision pre-snap value for display.
    """

    measured_mm: float
    snapped_size_mm: int | None = None
    rejected_reason: RejectionReason | None = None

    def __post_init__(self):
        if (self.snapped_size_mm is None) == (self.rejected_reason is None):
            raise ValueError("exactly one of snapped_size_mm / rejected_reason must be set")
        if self.snapped_size_mm is not None and self.snapped_size_mm % 2:
            raise ValueError(f"snapped size must be even, got {self.snapped_size_mm}")

    @property
    def accepted(self) -> bool:
        return self.snapped_size_mm is not None


def _require_positive_measurement(measured_mm: float) -> float:
    if not isinstance(measured_mm, (int, float)) or not math.isfinite(measured_mm) or measured_mm <= 0:
        raise InvalidMeasurementError(f"measured diameter must be positive and finite, got {measured_mm!r}")
    return float(measured_mm)


def floor_to_even_mm(measured_mm: float) -> int:
    """Largest even integer not exceeding the measurement.

    The measurement is rounded to 6 decimal places first so that pixel
    arithmetic noise (58 - 1e-13 and the like) cannot flip a size.
    """
    measured_mm = _require_positive_measurement(measured_mm)
    k = math.floor(round(measured_mm, 6))
    if k % 2:
        k -= 1
    return k


def snap_to_size(measured_mm: float, catalog: ImplantCatalog) -> SizingResult:
    """Apply the floor-then-even-down rule, then gate on the catalog range."""
    measured_mm = _require_positive_measurement(measured_mm)
    k = floor_to_even_mm(measured_mm)
    if k < catalog.min_size:
        return SizingResult(measured_mm, rejected_reason=RejectionReason.BELOW_MIN)
    if k > catalog.max_size:
        return SizingResult(measured_mm, rejected_reason=RejectionReason.ABOVE_MAX)
    return SizingResult(measured_mm, snapped_size_mm=k)


def measure_and_size(s: SegmentPx, c: Calibration, catalog: ImplantCatalog) -> SizingResult:
    """Size the diameter drawn as a pixel segment on a calibrated image."""
    d = distance_px(s)
    if d == 0.0:
        raise InvalidMeasurementError("measurement segment has zero length")
    return snap_to_size(px_to_mm(d, c), catalog)


def lookup_template(catalog: ImplantCatalog, side: Side, size_mm: int) -> ImplantSpec:
    """Fetch the template spec for a side and size, or raise not-found."""
    spec = catalog.get(side, size_mm)
    if spec is None:
        raise NotFoundError(f"no {catalog.brand} implant for side={Side(side).value} size={size_mm}")
    return spec
