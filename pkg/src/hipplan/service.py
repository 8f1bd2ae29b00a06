"""HTTP facade over planning sessions.

All sizing happens server-side; the browser renders what it is given and
never re-implements the snapping rule. Sessions live in memory, saved
plans go to a PlanStore directory; restarting the server drops unsaved
sessions by design.

Every error body carries one code from the closed set: invalid_measurement,
calibration_missing, size_out_of_range, not_found, state_error,
parse_error, io_error. See docs/api.md for request/response fixtures.
"""

from __future__ import annotations

import io
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from PIL import Image, UnidentifiedImageError
from pydantic import BaseModel

from .catalog import load_catalog, load_default_catalog
from .errors import (
    CalibrationError,
    CalibrationMissingError,
    ConsistencyError,
    InvalidGeometryError,
    InvalidMeasurementError,
    NotFoundError,
    ParseError,
    StateError,
    StorageError,
)
from .geometry import Calibration, PointPx, RigidTransform, SegmentPx
from .planning import Gender, Placement, PlanRecord, PlanStore, Session
from .sizing import Side, SizingResult

_ERROR_MAP: list[tuple[type, int, str]] = [
    (CalibrationMissingError, 409, "calibration_missing"),
    (ConsistencyError, 409, "state_error"),
    (StateError, 409, "state_error"),
    (InvalidMeasurementError, 422, "invalid_measurement"),
    (InvalidGeometryError, 422, "invalid_measurement"),
    (NotFoundError, 404, "not_found"),
    (ParseError, 400, "parse_error"),
    (CalibrationError, 400, "parse_error"),
    (StorageError, 500, "io_error"),
]


def _error_response(status: int, code: str, message: str, detail: dict | None = None) -> JSONResponse:
    body: dict = {"code": code, "message": message}
    if detail:
        body["detail"] = detail
    return JSONResponse(status_code=status, content=body)


class CalibrationBody(BaseModel):
    mm_per_px: float


class MeasurementBody(BaseModel):
    ax: float
    ay: float
    bx: float
    by: float
    side: Literal["left", "right"] = "left"


class PointBody(BaseModel):
    x: float = 0.0
    y: float = 0.0


class DeltaBody(BaseModel):
    rotation_deg: float = 0.0
    pivot: PointBody = PointBody()
    dx: float = 0.0
    dy: float = 0.0


class PlacementBody(BaseModel):
    delta: DeltaBody


class PlanBody(BaseModel):
    patient_name: str
    gender: Literal["M", "F"]
    patient_id: str
    dob: str
    acetabular_size: int | None = None


@dataclass
class _SessionEntry:
    session: Session
    image_bytes: bytes
    media_type: str
    lock: threading.Lock


def _point_json(p: PointPx) -> dict:
    return {"x": p.x, "y": p.y}


def _pose_json(t: RigidTransform) -> dict:
    return {
        "rotation_deg": t.rotation_deg,
        "pivot": _point_json(t.pivot),
        "dx": t.translation[0],
        "dy": t.translation[1],
    }


def _placement_json(entry: _SessionEntry) -> dict:
    session = entry.session
    placement = session.placement
    assert placement is not None
    return {
        "implant": {
            "brand": placement.implant.brand,
            "side": placement.implant.side.value,
            "size_mm": placement.implant.size_mm,
        },
        "pose": _pose_json(placement.pose),
        "anchor": _point_json(placement.anchor),
        "outline_px": [[p.x, p.y] for p in session.rendered_outline()],
    }


def _sizing_json(sizing: SizingResult) -> dict:
    return {"measured_mm": round(sizing.measured_mm, 2), "size_mm": sizing.snapped_size_mm}


def _plan_json(plan_id: str, record: PlanRecord) -> dict:
    m = record.measurement
    pl = record.placement
    return {
        "plan_id": plan_id,
        "patient_name": record.patient_name,
        "gender": record.gender.value,
        "patient_id": record.patient_id,
        "dob": record.dob,
        "acetabular_size": record.acetabular_size,
        "acetabular_brand": record.acetabular_brand,
        "measurement": {"ax": m.a.x, "ay": m.a.y, "bx": m.b.x, "by": m.b.y},
        "calibration": {"mm_per_px": record.calibration.mm_per_px},
        "placement": {
            "implant": {
                "brand": pl.implant.brand,
                "side": pl.implant.side.value,
                "size_mm": pl.implant.size_mm,
            },
            "pose": _pose_json(pl.pose),
            "anchor": _point_json(pl.anchor),
        },
    }


def create_app(
    plan_dir: str | Path = "plans",
    catalog_path: str | Path | None = None,
    frontend_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service with its own session registry and plan store."""
    catalog = load_catalog(catalog_path) if catalog_path else load_default_catalog()
    store = PlanStore(plan_dir)
    sessions: dict[str, _SessionEntry] = {}
    registry_lock = threading.Lock()

    app = FastAPI(title="hipplan service", version="0.1.0", docs_url=None, redoc_url=None)

    for exc_type, status, code in _ERROR_MAP:
        def handler(request: Request, exc: Exception, status=status, code=code):
            return _error_response(status, code, str(exc))

        app.add_exception_handler(exc_type, handler)

    @app.exception_handler(RequestValidationError)
    def validation_handler(request: Request, exc: RequestValidationError):
        return _error_response(400, "parse_error", "malformed request body")

    def get_entry(session_id: str) -> _SessionEntry:
        with registry_lock:
            entry = sessions.get(session_id)
        if entry is None:
            raise NotFoundError(f"no session with id {session_id!r}")
        return entry

    class write_lock:
        """Per-session write serialization: a second concurrent writer is
        rejected with state_error rather than silently reordered."""

        def __init__(self, entry: _SessionEntry):
            self.entry = entry

        def __enter__(self):
            if not self.entry.lock.acquire(blocking=False):
                raise StateError("another request is modifying this session")
            return self.entry

        def __exit__(self, *exc_info):
            self.entry.lock.release()

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        raw = await request.body()
        if not raw:
            raise ParseError("empty image body")
        declared = request.headers.get("content-type", "").split(";")[0].strip().lower()
        if declared and declared not in ("image/jpeg", "image/png"):
            raise ParseError(f"unsupported content type {declared!r}; use image/jpeg or image/png")
        try:
            with Image.open(io.BytesIO(raw)) as img:
                fmt = img.format
                img.verify()
        except (UnidentifiedImageError, OSError) as exc:
            raise ParseError(f"body is not a decodable image: {exc}") from exc
        if fmt not in ("JPEG", "PNG"):
            raise ParseError(f"unsupported image format {fmt}; use JPEG or PNG")
        session_id = uuid.uuid4().hex
        media_type = "image/jpeg" if fmt == "JPEG" else "image/png"
        entry = _SessionEntry(
            session=Session(session_id, f"upload:{session_id}", catalog),
            image_bytes=raw,
            media_type=media_type,
            lock=threading.Lock(),
        )
        with registry_lock:
            sessions[session_id] = entry
        return {"session_id": session_id}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        entry = get_entry(session_id)
        with entry.lock:
            s = entry.session
            m = s.measurement
            return {
                "session_id": session_id,
                "media_type": entry.media_type,
                "calibration": {"mm_per_px": s.calibration.mm_per_px} if s.calibration else None,
                "measurement": {"ax": m.a.x, "ay": m.a.y, "bx": m.b.x, "by": m.b.y} if m else None,
                "sizing": _sizing_json(s.sizing) if s.sizing and s.sizing.accepted else None,
                "placement": _placement_json(entry) if s.placement else None,
            }

    @app.get("/sessions/{session_id}/image")
    def get_image(session_id: str):
        entry = get_entry(session_id)
        with entry.lock:
            return Response(content=entry.image_bytes, media_type=entry.media_type)

    @app.put("/sessions/{session_id}/calibration")
    def put_calibration(session_id: str, body: CalibrationBody):
        entry = get_entry(session_id)
        try:
            calibration = Calibration(body.mm_per_px)
        except CalibrationError as exc:
            raise ParseError(str(exc)) from exc
        with write_lock(entry):
            entry.session.set_calibration(calibration)
        return {"ok": True}

    @app.put("/sessions/{session_id}/measurement")
    def put_measurement(session_id: str, body: MeasurementBody):
        entry = get_entry(session_id)
        segment = SegmentPx(PointPx(body.ax, body.ay), PointPx(body.bx, body.by))
        with write_lock(entry):
            sizing = entry.session.set_measurement(segment, Side(body.side))
            if not sizing.accepted:
                return _error_response(
                    422,
                    "size_out_of_range",
                    f"measured {sizing.measured_mm:.2f} mm is outside the catalog range "
                    f"{catalog.min_size}-{catalog.max_size} mm",
                    detail={
                        "rejected_reason": sizing.rejected_reason.value,
                        "measured_mm": round(sizing.measured_mm, 2),
                    },
                )
            payload = _sizing_json(sizing)
            payload["placement"] = _placement_json(entry)
            return payload

    @app.put("/sessions/{session_id}/placement")
    def put_placement(session_id: str, body: PlacementBody):
        entry = get_entry(session_id)
        d = body.delta
        delta = RigidTransform(d.rotation_deg, PointPx(d.pivot.x, d.pivot.y), (d.dx, d.dy))
        with write_lock(entry):
            entry.session.adjust(delta)
            return _placement_json(entry)

    @app.post("/sessions/{session_id}/plan", status_code=201)
    def post_plan(session_id: str, body: PlanBody):
        entry = get_entry(session_id)
        with write_lock(entry):
            record = entry.session.build_plan_record(
                body.patient_name, Gender(body.gender), body.patient_id, body.dob
            )
            if body.acetabular_size is not None and body.acetabular_size != record.acetabular_size:
                raise ConsistencyError(
                    f"submitted acetabular size {body.acetabular_size} does not match "
                    f"the session's recognized size {record.acetabular_size}"
                )
            plan_id = store.save(record)
        return {"plan_id": plan_id}

    @app.get("/plans/{plan_id}")
    def get_plan(plan_id: str):
        return _plan_json(plan_id, store.load(plan_id))

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app
