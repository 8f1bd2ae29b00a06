"""2D measurement geometry in image pixel space.

Frame convention: origin at the top-left corner of the image, x grows to
the right, y grows downward. Positive rotation angles therefore turn
clockwise on screen. Angles are stored in degrees and converted to
radians only inside the trigonometry.

Everything here is a pure function over immutable values and is safe to
call from any number of threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CalibrationError, InvalidGeometryError

__all__ = [
    "PointPx",
    "SegmentPx",
    "Calibration",
    "RigidTransform",
    "Outline",
    "distance_px",
    "midpoint",
    "segment_angle_deg",
    "px_to_mm",
    "mm_to_px",
    "calibrate_from_reference",
    "identity_transform",
    "apply_transform",
    "compose",
    "inverse",
    "hit_test",
    "point_on_boundary",
    "point_in_polygon_raycast",
    "point_in_polygon_winding",
]

BOUNDARY_TOLERANCE_PX = 1e-9


def _require_finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise InvalidGeometryError(f"{what} must be finite, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class PointPx:
    """A point in image pixel coordinates."""

    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", _require_finite(self.x, "x"))
        object.__setattr__(self, "y", _require_finite(self.y, "y"))


@dataclass(frozen=True)
class SegmentPx:
    """A directed segment between two pixel points.

    Zero-length segments are representable; they are rejected only when
    used as a diameter measurement.
    """

    a: PointPx
    b: PointPx


@dataclass(frozen=True)
class Calibration:
    """Isotropic pixel-to-millimetre scale for one radiograph."""

    mm_per_px: float

    def __post_init__(self):
        v = self.mm_per_px
        if not isinstance(v, (int, float)) or not math.isfinite(v) or v <= 0:
            raise CalibrationError(f"mm_per_px must be positive and finite, got {v!r}")
        object.__setattr__(self, "mm_per_px", float(v))


@dataclass(frozen=True)
class RigidTransform:
    """A rotation about a pivot point followed by a translation."""

    rotation_deg: float
    pivot: PointPx
    translation: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "rotation_deg", _require_finite(self.rotation_deg, "rotation_deg"))
        dx, dy = self.translation
        object.__setattr__(
            self,
            "translation",
            (_require_finite(dx, "translation dx"), _require_finite(dy, "translation dy")),
        )


_ORIGIN = PointPx(0.0, 0.0)


def identity_transform() -> RigidTransform:
    return RigidTransform(0.0, _ORIGIN, (0.0, 0.0))


def distance_px(s: SegmentPx) -> float:
    """Euclidean length of a segment, in pixels."""
    return math.hypot(s.b.x - s.a.x, s.b.y - s.a.y)


def midpoint(s: SegmentPx) -> PointPx:
    return PointPx((s.a.x + s.b.x) / 2.0, (s.a.y + s.b.y) / 2.0)


def segment_angle_deg(s: SegmentPx) -> float:
    """Angle of the segment's direction, degrees, y-down frame."""
    return math.degrees(math.atan2(s.b.y - s.a.y, s.b.x - s.a.x))


def px_to_mm(d: float, c: Calibration) -> float:
    """Convert a pixel distance to millimetres."""
    return d * c.mm_per_px


def mm_to_px(d: float, c: Calibration) -> float:
    """Convert a millimetre distance back to pixels (inverse scaling)."""
    return d / c.mm_per_px


def calibrate_from_reference(marker_px: float, marker_mm: float) -> Calibration:
    """Derive the scale from a marker of known physical length.

    Standard radiograph practice: lay a ruler or ball of known size in the
    image plane, measure it in pixels, and divide. Magnification
    correction, if any, is up to the operator's choice of marker.
    """
    if not math.isfinite(marker_px) or marker_px <= 0:
        raise CalibrationError(f"marker length in px must be positive, got {marker_px!r}")
    if not math.isfinite(marker_mm) or marker_mm <= 0:
        raise CalibrationError(f"marker length in mm must be positive, got {marker_mm!r}")
    return Calibration(marker_mm / marker_px)


def apply_transform(t: RigidTransform, p: PointPx) -> PointPx:
    """Rotate p about the pivot, then translate."""
    rad = math.radians(t.rotation_deg)
    cos_t = math.cos(rad)
    sin_t = math.sin(rad)
    x = p.x - t.pivot.x
    y = p.y - t.pivot.y
    dx, dy = t.translation
    return PointPx(
        x * cos_t - y * sin_t + t.pivot.x + dx,
        x * sin_t + y * cos_t + t.pivot.y + dy,
    )


def compose(t1: RigidTransform, t2: RigidTransform) -> RigidTransform:
    """The transform equivalent to applying t2 first, then t1.

    The result is expressed with pivot at the origin; only the combined
    rotation and offset are kept.
    """
    # A(p) = R p + b with b = A(origin); composing gives R1 R2 p + (R1 b2 + b1).
    b2 = apply_transform(t2, _ORIGIN)
    b = apply_transform(t1, b2)
    return RigidTransform(t1.rotation_deg + t2.rotation_deg, _ORIGIN, (b.x, b.y))


def inverse(t: RigidTransform) -> RigidTransform:
    """The transform undoing t: compose(t, inverse(t)) is the identity."""
    b = apply_transform(t, _ORIGIN)
    rad = math.radians(-t.rotation_deg)
    cos_t = math.cos(rad)
    sin_t = math.sin(rad)
    return RigidTransform(
        -t.rotation_deg,
        _ORIGIN,
        (-(b.x * cos_t - b.y * sin_t), -(b.x * sin_t + b.y * cos_t)),
    )


def _orient(a: PointPx, b: PointPx, c: PointPx) -> float:
    """Twice the signed area of triangle abc; 0 when collinear."""
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _on_segment(a: PointPx, b: PointPx, c: PointPx) -> bool:
    # c is assumed collinear with a-b
    return min(a.x, b.x) <= c.x <= max(a.x, b.x) and min(a.y, b.y) <= c.y <= max(a.y, b.y)


def _segments_intersect(p1: PointPx, p2: PointPx, q1: PointPx, q2: PointPx) -> bool:
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    if d1 == 0 and _on_segment(q1, q2, p1):
        return True
    if d2 == 0 and _on_segment(q1, q2, p2):
        return True
    if d3 == 0 and _on_segment(p1, p2, q1):
        return True
    if d4 == 0 and _on_segment(p1, p2, q2):
        return True
    return False


def _signed_area(vertices: tuple[PointPx, ...]) -> float:
    total = 0.0
    n = len(vertices)
    for i in range(n):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        total += a.x * b.y - b.x * a.y
    return total / 2.0


def _self_intersects(vertices: tuple[PointPx, ...]) -> bool:
    n = len(vertices)
    for i in range(n):
        if vertices[i] == vertices[(i + 1) % n]:
            return True  # zero-length edge
    for i in range(n):
        # adjacent edges folding back onto each other (a spike)
        prev_v = vertices[i - 1]
        v = vertices[i]
        next_v = vertices[(i + 1) % n]
        ux, uy = v.x - prev_v.x, v.y - prev_v.y
        wx, wy = next_v.x - v.x, next_v.y - v.y
        if ux * wy - uy * wx == 0 and ux * wx + uy * wy < 0:
            return True
    for i in range(n):
        for j in range(i + 1, n):
            if (i + 1) % n == j or (j + 1) % n == i:
                continue
            if _segments_intersect(
                vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]
            ):
                return True
    return False


@dataclass(frozen=True)
class Outline:
    """A simple closed polygon approximating an implant silhouette.

    Vertices are ordered; the closing edge from the last vertex back to
    the first is implicit. Must be non-self-intersecting with nonzero
    area.
    """

    vertices: tuple[PointPx, ...]

    def __post_init__(self):
        verts = tuple(self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise InvalidGeometryError(f"outline needs at least 3 vertices, got {len(verts)}")
        if _signed_area(verts) == 0.0:
            raise InvalidGeometryError("outline has zero area")
        if _self_intersects(verts):
            raise InvalidGeometryError("outline is self-intersecting")


def _point_segment_distance(p: PointPx, a: PointPx, b: PointPx) -> float:
    abx, aby = b.x - a.x, b.y - a.y
    apx, apy = p.x - a.x, p.y - a.y
    denom = abx * abx + aby * aby
    if denom == 0.0:
        return math.hypot(apx, apy)
    t = (apx * abx + apy * aby) / denom
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return math.hypot(apx - t * abx, apy - t * aby)


def point_on_boundary(p: PointPx, o: Outline, tol: float = BOUNDARY_TOLERANCE_PX) -> bool:
    """True when p lies within tol pixels of any outline edge."""
    verts = o.vertices
    n = len(verts)
    return any(_point_segment_distance(p, verts[i], verts[(i + 1) % n]) <= tol for i in range(n))


def point_in_polygon_raycast(p: PointPx, o: Outline) -> bool:
    """Interior test by parity of crossings of a leftward horizontal ray.

    Uses the half-open edge rule so rays through vertices are counted
    consistently. Behaviour exactly on the boundary is unspecified; use
    hit_test for the boundary-inclusive predicate.
    """
    verts = o.vertices
    n = len(verts)
    inside = False
    j = n - 1
    for i in range(n):
        vi, vj = verts[i], verts[j]
        if (vi.y > p.y) != (vj.y > p.y):
            x_cross = vj.x + (vi.x - vj.x) * (p.y - vj.y) / (vi.y - vj.y)
            if p.x < x_cross:
                inside = not inside
        j = i
    return inside


def point_in_polygon_winding(p: PointPx, o: Outline) -> bool:
    """Interior test via the winding number; independent of ray casting."""
    verts = o.vertices
    n = len(verts)
    wn = 0
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        if a.y <= p.y:
            if b.y > p.y and _orient(a, b, p) > 0:
                wn += 1
        elif b.y <= p.y and _orient(a, b, p) < 0:
            wn -= 1
    return wn != 0


def hit_test(p: PointPx, o: Outline) -> bool:
    """True when p is strictly inside the outline or on its boundary.

    Boundary points count as hits so pointer selection stays forgiving.
    """
    return point_on_boundary(p, o) or point_in_polygon_raycast(p, o)
