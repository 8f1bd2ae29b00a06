"""Catalog and outline files.

Catalog file grammar, one entry per line, whitespace separated:

    brand side size_mm outline_id

Blank lines and lines starting with ``#`` are skipped. ``side`` is
``left`` or ``right``; ``size_mm`` must be an even integer inside the
allowed range (36-80 by default, override per call for other product
lines). ``brand`` and ``outline_id`` are single tokens without
whitespace.

The companion outline file is a whitespace-separated token stream:

    outline_id vertex_count x1 y1 ... xn yn

repeated once per outline; by convention it sits next to the catalog
file with the ``.outlines`` extension. Coordinates are at unit scale
(1 px per mm) with the cup circle centre at the origin.
"""

from __future__ import annotations

import math
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import ParseError
from .geometry import Outline, PointPx
from .sizing import ImplantCatalog, ImplantSpec, Side

__all__ = [
    "cup_outline",
    "load_outlines",
    "load_catalog",
    "write_catalog",
    "default_catalog_path",
    "load_default_catalog",
]

DEFAULT_MIN_SIZE = 36
DEFAULT_MAX_SIZE = 80

# Lateral rim flat: the dome arc starts this many degrees above the
# opening plane, mirrored between sides so left and right cups differ.
_RIM_CUT_DEG = 18.0
_ARC_POINTS = 30


def cup_outline(size_mm: int, side: Side) -> Outline:
    """Cup silhouette polygon at unit scale (1 px = 1 mm).

    Local frame: circle centre at the origin, opening (the diameter the
    surgeon draws) along the x axis, dome toward negative y. The lateral
    rim carries a flat cut so the two sides are mirror images rather
    than identical.
    """
    r = size_mm / 2.0
    phi = math.radians(_RIM_CUT_DEG)
    pts = [(r * math.cos(phi), 0.0), (r * math.cos(phi), -r * math.sin(phi))]
    for k in range(1, _ARC_POINTS + 1):
        theta = phi + (math.pi - phi) * k / _ARC_POINTS
        pts.append((r * math.cos(theta), -r * math.sin(theta)))
    if Side(side) is Side.LEFT:
        pts = [(-x, y) for x, y in pts]
    return Outline(tuple(PointPx(round(x, 6), round(y, 6)) for x, y in pts))


def load_outlines(path: str | Path) -> dict[str, Outline]:
    """Parse an outline file into a mapping of id to polygon."""
    path = Path(path)
    tokens: list[str] = []
    token_lines: list[int] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            for tok in stripped.split():
                tokens.append(tok)
                token_lines.append(lineno)
    outlines: dict[str, Outline] = {}
    i = 0
    while i < len(tokens):
        outline_id = tokens[i]
        line = token_lines[i]
        if i + 1 >= len(tokens):
            raise ParseError(f"{path}:{line}: outline {outline_id!r} missing vertex count", line=line)
        try:
            count = int(tokens[i + 1])
        except ValueError:
            raise ParseError(
                f"{path}:{token_lines[i + 1]}: bad vertex count {tokens[i + 1]!r} for outline {outline_id!r}",
                line=token_lines[i + 1],
            ) from None
        if count < 3:
            raise ParseError(f"{path}:{line}: outline {outline_id!r} has fewer than 3 vertices", line=line)
        needed = 2 * count
        coords = tokens[i + 2 : i + 2 + needed]
        if len(coords) < needed:
            raise ParseError(f"{path}:{line}: outline {outline_id!r} is truncated", line=line)
        try:
            values = [float(tok) for tok in coords]
        except ValueError:
            raise ParseError(f"{path}:{line}: non-numeric coordinate in outline {outline_id!r}", line=line) from None
        if outline_id in outlines:
            raise ParseError(f"{path}:{line}: duplicate outline id {outline_id!r}", line=line)
        vertices = tuple(PointPx(values[2 * k], values[2 * k + 1]) for k in range(count))
        outlines[outline_id] = Outline(vertices)
        i += 2 + needed
    return outlines


def _default_outlines_path(catalog_path: Path) -> Path:
    return catalog_path.with_suffix(".outlines")


def load_catalog(
    path: str | Path,
    outlines_path: str | Path | None = None,
    *,
    min_size: int = DEFAULT_MIN_SIZE,
    max_size: int = DEFAULT_MAX_SIZE,
) -> ImplantCatalog:
    """Load and validate a catalog file with its companion outlines.

    Per-line violations (odd sizes, out-of-range sizes, unknown outline
    ids) raise ParseError carrying the line number; catalog-level
    violations (gaps, missing sides) raise ValidationError.
    """
    path = Path(path)
    outlines = load_outlines(_default_outlines_path(path) if outlines_path is None else outlines_path)
    specs: list[ImplantSpec] = []
    brand: str | None = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            fields = stripped.split()
            if len(fields) != 4:
                raise ParseError(
                    f"{path}:{lineno}: expected 'brand side size_mm outline_id', got {len(fields)} fields",
                    line=lineno,
                )
            entry_brand, side_text, size_text, outline_id = fields
            try:
                side = Side(side_text)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: side must be left or right, got {side_text!r}", line=lineno) from None
            try:
                size_mm = int(size_text)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: size must be an integer, got {size_text!r}", line=lineno) from None
            if size_mm % 2:
                raise ParseError(f"{path}:{lineno}: odd size {size_mm} not allowed", line=lineno)
            if not min_size <= size_mm <= max_size:
                raise ParseError(
                    f"{path}:{lineno}: size {size_mm} outside allowed range {min_size}-{max_size}",
                    line=lineno,
                )
            if outline_id not in outlines:
                raise ParseError(f"{path}:{lineno}: unknown outline id {outline_id!r}", line=lineno)
            if brand is None:
                brand = entry_brand
            specs.append(ImplantSpec(entry_brand, side, size_mm, outlines[outline_id]))
    if brand is None:
        raise ParseError(f"{path}: catalog file has no entries")
    return ImplantCatalog(brand, specs)


def write_catalog(catalog: ImplantCatalog, path: str | Path, outlines_path: str | Path | None = None) -> None:
    """Write a catalog and its outlines in the documented format."""
    path = Path(path)
    outlines_path = _default_outlines_path(path) if outlines_path is None else Path(outlines_path)
    entry_lines = []
    outline_lines = []
    for spec in catalog:
        outline_id = f"{spec.brand.lower()}_{spec.side.value[0]}_{spec.size_mm}"
        entry_lines.append(f"{spec.brand} {spec.side.value} {spec.size_mm} {outline_id}")
        coords = " ".join(f"{v.x:g} {v.y:g}" for v in spec.outline.vertices)
        outline_lines.append(f"{outline_id} {len(spec.outline.vertices)} {coords}")
    path.write_text("\n".join(entry_lines) + "\n", encoding="utf-8")
    outlines_path.write_text("\n".join(outline_lines) + "\n", encoding="utf-8")


def default_catalog_path() -> Path:
    """Path of the bundled catalog (Versys brand, even sizes 36-80)."""
    return Path(str(resources.files("hipplan").joinpath("data/versys.catalog")))


@lru_cache(maxsize=1)
def load_default_catalog() -> ImplantCatalog:
    return load_catalog(default_catalog_path())
