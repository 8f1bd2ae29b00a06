#!/usr/bin/env python3
"""Regenerate the bundled Versys catalog data files.

Writes src/hipplan/data/versys.catalog and versys.outlines: even cup
sizes 36-80, both sides, silhouettes from hipplan.catalog.cup_outline.
Run from the repository root after changing the outline shape.
"""

from pathlib import Path

from hipplan.catalog import cup_outline, write_catalog
from hipplan.sizing import ImplantCatalog, ImplantSpec, Side

BRAND = "Versys"
SIZES = range(36, 82, 2)


def main() -> None:
    specs = [
        ImplantSpec(BRAND, side, size, cup_outline(size, side))
        for size in SIZES
        for side in (Side.LEFT, Side.RIGHT)
    ]
    data_dir = Path(__file__).resolve().parents[1] / "src" / "hipplan" / "data"
    data_dir.mkdir(parents=True, exist_ok=True)
    write_catalog(ImplantCatalog(BRAND, specs), data_dir / "versys.catalog")
    print(f"wrote {len(specs)} entries to {data_dir}")


if __name__ == "__main__":
    main()
