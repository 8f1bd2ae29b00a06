"""Planning sessions, implant placement, and plan persistence.

A session walks one radiograph through the workflow in order:
calibration, diameter measurement (which auto-selects the implant and
places it), pose adjustments, then a saved plan record. Out-of-order
operations raise StateError instead of being silently reordered.

Plan file format (UTF-8, documented with a golden fixture in-repo):
one record of ``key: value`` lines terminated by a blank line, keys
exactly the PlanRecord field names in declaration order. Floats are
written with Python's shortest round-trip representation, which keeps
every significant digit and makes save -> load -> save byte-identical.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import NamedTuple

from .errors import (
    CalibrationMissingError,
    ConsistencyError,
    InvalidMeasurementError,
    NotFoundError,
    ParseError,
    StateError,
    StorageError,
)
from .geometry import (
    Calibration,
    Outline,
    PointPx,
    RigidTransform,
    SegmentPx,
    apply_transform,
    compose,
    distance_px,
    midpoint,
    px_to_mm,
    segment_angle_deg,
)
from .sizing import (
    ImplantCatalog,
    ImplantSpec,
    Side,
    SizingResult,
    floor_to_even_mm,
    lookup_template,
    measure_and_size,
)

__all__ = [
    "Gender",
    "ImplantRef",
    "Placement",
    "PlanRecord",
    "Session",
    "PlanStore",
    "default_placement",
    "adjust_placement",
    "placed_outline",
    "format_plan",
    "parse_plan",
]


class Gender(str, Enum):
    M = "M"
    F = "F"


class ImplantRef(NamedTuple):
    """Identity of a catalog implant, without its geometry."""

    brand: str
    side: Side
    size_mm: int


@dataclass(frozen=True)
class Placement:
    """A rigid pose of one implant template over the image.

    ``pose`` accumulates every adjustment applied since the default
    placement; ``anchor`` is the current cup circle centre in image
    space (the pose applied to the original anchor).
    """

    implant: ImplantRef
    pose: RigidTransform
    anchor: PointPx


def default_placement(m: SegmentPx, spec: ImplantSpec, c: Calibration) -> Placement:
    """Initial overlay pose right after size recognition.

    The cup centre sits on the midpoint of the drawn diameter and the
    opening is rotated to align with it. The spec must be the one the
    measurement selects; a rejected or mismatched sizing gets no
    placement.
    """
    d = distance_px(m)
    if d == 0.0:
        raise InvalidMeasurementError("measurement segment has zero length")
    selected = floor_to_even_mm(px_to_mm(d, c))
    if selected != spec.size_mm:
        raise StateError(
            f"measurement selects size {selected}, cannot place a size {spec.size_mm} template"
        )
    anchor = midpoint(m)
    pose = RigidTransform(segment_angle_deg(m), anchor, (0.0, 0.0))
    return Placement(ImplantRef(spec.brand, spec.side, spec.size_mm), pose, anchor)


def adjust_placement(p: Placement, delta: RigidTransform) -> Placement:
    """Apply one translate/rotate edit on top of the current pose."""
    return Placement(p.implant, compose(delta, p.pose), apply_transform(delta, p.anchor))


def placed_outline(p: Placement, outline: Outline, c: Calibration) -> tuple[PointPx, ...]:
    """Outline vertices in image pixel space under the current pose.

    The unit-scale silhouette (1 px per mm) is scaled by 1/mm_per_px so
    the rendered cup diameter is size_mm / mm_per_px pixels, then rotated
    by the accumulated pose angle about the current anchor.
    """
    scale = 1.0 / c.mm_per_px
    rot = RigidTransform(p.pose.rotation_deg, p.anchor, (0.0, 0.0))
    return tuple(
        apply_transform(rot, PointPx(p.anchor.x + v.x * scale, p.anchor.y + v.y * scale))
        for v in outline.vertices
    )


@dataclass(frozen=True)
class PlanRecord:
    """The durable artifact: patient identity plus the final plan."""

    patient_name: str
    gender: Gender
    patient_id: str
    dob: str  # kept verbatim; the source format is ambiguous, never parsed
    acetabular_size: int
    acetabular_brand: str
    measurement: SegmentPx
    calibration: Calibration
    placement: Placement


def validate_plan_consistency(record: PlanRecord) -> None:
    """Check the recorded size against the record's own measurement."""
    derived = floor_to_even_mm(px_to_mm(distance_px(record.measurement), record.calibration))
    if derived != record.acetabular_size:
        raise ConsistencyError(
            f"recorded acetabular size {record.acetabular_size} does not match "
            f"measurement-derived size {derived}"
        )
    if record.placement.implant.size_mm != record.acetabular_size:
        raise ConsistencyError(
            f"placement implant size {record.placement.implant.size_mm} does not match "
            f"recorded acetabular size {record.acetabular_size}"
        )


class Session:
    """One planning workflow over a single stored radiograph.

    Single-writer: one planner drives a session at a time. The service
    layer enforces that with per-session locks.
    """

    def __init__(self, session_id: str, image_ref: str, catalog: ImplantCatalog):
        self.session_id = session_id
        self.image_ref = image_ref
        self.catalog = catalog
        self.calibration: Calibration | None = None
        self.measurement: SegmentPx | None = None
        self.sizing: SizingResult | None = None
        self.placement: Placement | None = None
        self._side = Side.LEFT

    def set_calibration(self, c: Calibration) -> None:
        """Set or replace calibration; downstream sizing is invalidated."""
        self.calibration = c
        self.sizing = None
        self.placement = None

    def set_measurement(self, s: SegmentPx, side: Side = Side.LEFT) -> SizingResult:
        """Record the diameter line; on acceptance the template is placed."""
        if self.calibration is None:
            raise CalibrationMissingError("calibration must be set before measuring")
        sizing = measure_and_size(s, self.calibration, self.catalog)
        self.measurement = s
        self.sizing = sizing
        self.placement = None
        self._side = Side(side)
        if sizing.accepted:
            spec = lookup_template(self.catalog, self._side, sizing.snapped_size_mm)
            self.placement = default_placement(s, spec, self.calibration)
        return sizing

    def adjust(self, delta: RigidTransform) -> Placement:
        if self.placement is None:
            raise StateError("no placement to adjust; submit an accepted measurement first")
        self.placement = adjust_placement(self.placement, delta)
        return self.placement

    def implant_spec(self) -> ImplantSpec:
        if self.placement is None:
            raise StateError("no implant selected")
        ref = self.placement.implant
        return lookup_template(self.catalog, ref.side, ref.size_mm)

    def rendered_outline(self) -> tuple[PointPx, ...]:
        if self.placement is None or self.calibration is None:
            raise StateError("no placement to render")
        return placed_outline(self.placement, self.implant_spec().outline, self.calibration)

    def build_plan_record(self, patient_name: str, gender: Gender, patient_id: str, dob: str) -> PlanRecord:
        if self.placement is None or self.sizing is None or not self.sizing.accepted:
            raise StateError("no accepted placement; cannot build a plan record")
        assert self.measurement is not None and self.calibration is not None
        return PlanRecord(
            patient_name=patient_name,
            gender=Gender(gender),
            patient_id=patient_id,
            dob=dob,
            acetabular_size=self.sizing.snapped_size_mm,
            acetabular_brand=self.placement.implant.brand,
            measurement=self.measurement,
            calibration=self.calibration,
            placement=self.placement,
        )


_PLAN_FIELDS = (
    "patient_name",
    "gender",
    "patient_id",
    "dob",
    "acetabular_size",
    "acetabular_brand",
    "measurement",
    "calibration",
    "placement",
)


def _fmt(value: float) -> str:
    return repr(float(value))


def format_plan(record: PlanRecord) -> str:
    """Serialize one record in the documented key-value format."""
    for token in (record.acetabular_brand, record.placement.implant.brand):
        if re.search(r"\s", token):
            raise ValueError(f"brand {token!r} must not contain whitespace")
    m = record.measurement
    pl = record.placement
    values = {
        "patient_name": record.patient_name,
        "gender": record.gender.value,
        "patient_id": record.patient_id,
        "dob": record.dob,
        "acetabular_size": str(record.acetabular_size),
        "acetabular_brand": record.acetabular_brand,
        "measurement": f"{_fmt(m.a.x)} {_fmt(m.a.y)} {_fmt(m.b.x)} {_fmt(m.b.y)}",
        "calibration": _fmt(record.calibration.mm_per_px),
        "placement": " ".join(
            [
                pl.implant.brand,
                pl.implant.side.value,
                str(pl.implant.size_mm),
                _fmt(pl.pose.rotation_deg),
                _fmt(pl.pose.pivot.x),
                _fmt(pl.pose.pivot.y),
                _fmt(pl.pose.translation[0]),
                _fmt(pl.pose.translation[1]),
                _fmt(pl.anchor.x),
                _fmt(pl.anchor.y),
            ]
        ),
    }
    lines = [f"{key}: {values[key]}" for key in _PLAN_FIELDS]
    return "\n".join(lines) + "\n\n"


def _parse_floats(text: str, count: int, field: str, line: int) -> list[float]:
    tokens = text.split()
    if len(tokens) != count:
        raise ParseError(
            f"field {field!r} expects {count} values, got {len(tokens)}", line=line, field=field
        )
    try:
        return [float(tok) for tok in tokens]
    except ValueError:
        raise ParseError(f"field {field!r} has a non-numeric value", line=line, field=field) from None


def parse_plan(text: str) -> PlanRecord:
    """Parse one plan record, naming the offending line or missing field."""
    raw: dict[str, str] = {}
    lines = text.splitlines()
    lineno = 0
    for lineno, line in enumerate(lines, start=1):
        if line == "":
            break
        if ": " not in line:
            raise ParseError(f"line is not 'key: value': {line!r}", line=lineno)
        key, value = line.split(": ", 1)
        if key not in _PLAN_FIELDS:
            raise ParseError(f"unknown field {key!r}", line=lineno, field=key)
        if key in raw:
            raise ParseError(f"duplicate field {key!r}", line=lineno, field=key)
        raw[key] = value
    for field in _PLAN_FIELDS:
        if field not in raw:
            raise ParseError(f"missing field {field!r}", line=lineno, field=field)

    def line_of(field: str) -> int:
        return _PLAN_FIELDS.index(field) + 1

    try:
        gender = Gender(raw["gender"])
    except ValueError:
        raise ParseError(
            f"gender must be M or F, got {raw['gender']!r}", line=line_of("gender"), field="gender"
        ) from None
    try:
        size = int(raw["acetabular_size"])
    except ValueError:
        raise ParseError(
            f"acetabular_size must be an integer, got {raw['acetabular_size']!r}",
            line=line_of("acetabular_size"),
            field="acetabular_size",
        ) from None
    ax, ay, bx, by = _parse_floats(raw["measurement"], 4, "measurement", line_of("measurement"))
    (mm_per_px,) = _parse_floats(raw["calibration"], 1, "calibration", line_of("calibration"))
    pl_tokens = raw["placement"].split()
    if len(pl_tokens) != 10:
        raise ParseError(
            f"field 'placement' expects 10 values, got {len(pl_tokens)}",
            line=line_of("placement"),
            field="placement",
        )
    try:
        pl_side = Side(pl_tokens[1])
        pl_size = int(pl_tokens[2])
        rot, px_, py_, dx, dy, anchor_x, anchor_y = [float(tok) for tok in pl_tokens[3:]]
    except ValueError:
        raise ParseError(
            "field 'placement' has a malformed value", line=line_of("placement"), field="placement"
        ) from None
    return PlanRecord(
        patient_name=raw["patient_name"],
        gender=gender,
        patient_id=raw["patient_id"],
        dob=raw["dob"],
        acetabular_size=size,
        acetabular_brand=raw["acetabular_brand"],
        measurement=SegmentPx(PointPx(ax, ay), PointPx(bx, by)),
        calibration=Calibration(mm_per_px),
        placement=Placement(
            ImplantRef(pl_tokens[0], pl_side, pl_size),
            RigidTransform(rot, PointPx(px_, py_), (dx, dy)),
            PointPx(anchor_x, anchor_y),
        ),
    )


def _sanitize_id(text: str) -> str:
    cleaned = re.sub(r"[^A-Za-z0-9._-]", "_", text)
    return cleaned or "plan"


class PlanStore:
    """Directory of one-record plan files, one file per plan id.

    Writes to the same id are serialized with per-id locks; saves to
    different ids proceed independently.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageError(f"cannot create plan store at {self.root}: {exc}") from exc
        self._locks: dict[str, threading.Lock] = {}
        self._registry = threading.Lock()

    def _lock_for(self, plan_id: str) -> threading.Lock:
        with self._registry:
            return self._locks.setdefault(plan_id, threading.Lock())

    def path_for(self, plan_id: str) -> Path:
        return self.root / f"{plan_id}.plan"

    def _generate_id(self, record: PlanRecord) -> str:
        stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
        base = f"{_sanitize_id(record.patient_id)}-{stamp}"
        candidate = base
        suffix = 2
        while self.path_for(candidate).exists():
            candidate = f"{base}-{suffix}"
            suffix += 1
        return candidate

    def save(self, record: PlanRecord, plan_id: str | None = None, *, overwrite: bool = False) -> str:
        """Validate, then durably write the record; returns its id."""
        validate_plan_consistency(record)
        text = format_plan(record)
        with self._registry:
            if plan_id is None:
                plan_id = self._generate_id(record)
            lock = self._locks.setdefault(plan_id, threading.Lock())
        with lock:
            path = self.path_for(plan_id)
            if path.exists() and not overwrite:
                raise StorageError(f"plan {plan_id!r} already exists; pass overwrite=True to replace it")
            tmp = path.with_suffix(".plan.tmp")
            try:
                tmp.write_text(text, encoding="utf-8")
                tmp.replace(path)
            except OSError as exc:
                raise StorageError(f"cannot write plan {plan_id!r}: {exc}") from exc
        return plan_id

    def load(self, plan_id: str) -> PlanRecord:
        path = self.path_for(plan_id)
        if not path.exists():
            raise NotFoundError(f"no stored plan with id {plan_id!r}")
        with self._lock_for(plan_id):
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as exc:
                raise StorageError(f"cannot read plan {plan_id!r}: {exc}") from exc
        return parse_plan(text)

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.plan"))
