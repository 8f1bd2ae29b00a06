#!/usr/bin/env python3
"""Regenerate fixtures/synthetic_pelvis.png.

A deterministic stand-in for a pelvis radiograph: dark background, two
bright femoral-head circles with matching acetabular arcs, and a 100 px
calibration marker bar. Not anatomy, just enough structure to exercise
upload, display, and measurement end to end.
"""

from pathlib import Path

from PIL import Image, ImageDraw


def main() -> None:
    size = (512, 400)
    img = Image.new("L", size, color=24)
    draw = ImageDraw.Draw(img)

    # iliac wings
    draw.arc([40, 30, 240, 230], start=180, end=330, fill=120, width=10)
    draw.arc([272, 30, 472, 230], start=210, end=360, fill=120, width=10)
    # femoral heads
    for cx in (150, 362):
        draw.ellipse([cx - 42, 198, cx + 42, 282], outline=170, fill=80, width=6)
        # acetabular roof arc above each head
        draw.arc([cx - 58, 182, cx + 58, 298], start=180, end=360, fill=200, width=8)
    # femoral shafts
    draw.line([138, 280, 110, 390], fill=150, width=26)
    draw.line([374, 280, 402, 390], fill=150, width=26)
    # 100 px calibration marker bar, bottom left
    draw.line([30, 370, 130, 370], fill=255, width=4)
    draw.line([30, 362, 30, 378], fill=255, width=3)
    draw.line([130, 362, 130, 378], fill=255, width=3)

    out = Path(__file__).resolve().parents[1] / "fixtures" / "synthetic_pelvis.png"
    img.save(out, format="PNG")
    print(f"wrote {out} ({out.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
