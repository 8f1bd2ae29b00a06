#!/usr/bin/env python3
"""Record real service responses as JSON fixtures for the frontend tests.

The browser tests must compare client-side optimistic math against what
the server actually returns, so these fixtures are captured from a live
in-process service rather than written by hand. Re-run after changing
the service or the catalog data.
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from hipplan.service import create_app

REPO = Path(__file__).resolve().parents[1]
OUT = REPO / "frontend" / "tests" / "fixtures"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    png = (REPO / "fixtures" / "synthetic_pelvis.png").read_bytes()
    with tempfile.TemporaryDirectory() as plan_dir:
        app = create_app(plan_dir=plan_dir)
        with TestClient(app) as client:
            r = client.post("/sessions", content=png, headers={"content-type": "image/png"})
            sid = r.json()["session_id"]
            client.put(f"/sessions/{sid}/calibration", json={"mm_per_px": 0.5})

            r = client.put(
                f"/sessions/{sid}/measurement",
                json={"ax": 100.0, "ay": 200.0, "bx": 216.56, "by": 200.0, "side": "left"},
            )
            measurement = r.json()
            (OUT / "measurement_58.json").write_text(json.dumps(measurement, indent=2) + "\n")

            anchor = measurement["placement"]["anchor"]
            r = client.put(
                f"/sessions/{sid}/placement",
                json={"delta": {"rotation_deg": 90.0, "pivot": anchor, "dx": 0.0, "dy": 0.0}},
            )
            (OUT / "placement_rot90.json").write_text(json.dumps(r.json(), indent=2) + "\n")

            r = client.put(
                f"/sessions/{sid}/measurement",
                json={"ax": 0.0, "ay": 0.0, "bx": 30.0, "by": 0.0, "side": "left"},
            )
            (OUT / "rejection_below_min.json").write_text(json.dumps(r.json(), indent=2) + "\n")
    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
