"""Digital preoperative templating toolkit for total hip replacement.

Measures the acetabulum diameter drawn on a calibrated radiograph,
snaps it to a catalog cup size, places an adjustable template overlay,
and persists the resulting plan.
"""

from .catalog import (
    cup_outline,
    default_catalog_path,
    load_catalog,
    load_default_catalog,
    load_outlines,
    write_catalog,
)
from .errors import (
    CalibrationError,
    CalibrationMissingError,
    ConsistencyError,
    EmptyDatasetError,
    InvalidGeometryError,
    InvalidMeasurementError,
    NotFoundError,
    ParseError,
    StateError,
    StorageError,
    TemplatingError,
    ValidationError,
)
from .evaluation import AgreementReport, ComparisonRow, build_rows, compare, load_pairs
from .geometry import (
    Calibration,
    Outline,
    PointPx,
    RigidTransform,
    SegmentPx,
    apply_transform,
    calibrate_from_reference,
    compose,
    distance_px,
    hit_test,
    identity_transform,
    inverse,
    midpoint,
    mm_to_px,
    px_to_mm,
    segment_angle_deg,
)
from .planning import (
    Gender,
    ImplantRef,
    Placement,
    PlanRecord,
    PlanStore,
    Session,
    adjust_placement,
    default_placement,
    format_plan,
    parse_plan,
    placed_outline,
)
from .sizing import (
    ImplantCatalog,
    ImplantSpec,
    RejectionReason,
    Side,
    SizingResult,
    floor_to_even_mm,
    lookup_template,
    measure_and_size,
    snap_to_size,
)

__version__ = "0.1.0"
