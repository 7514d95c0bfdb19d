"""Drive the HTTP API in-process: post edits, list history, fetch a diff."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "tests"))

from fastapi.testclient import TestClient

from factories import bottleneck_dataset
from prodplan.service import create_app
from prodplan.store import PlanStore

import tempfile

with tempfile.TemporaryDirectory() as tmp:
    app = create_app(dataset=bottleneck_dataset(), store=PlanStore(tmp))
    with TestClient(app) as api:
        summary = api.get("/api/dataset").json()
        print("dataset:", summary["counts"])

        base = api.post("/api/plans", json={"config_edits": [], "label": "baseline"}).json()
        tuned = api.post("/api/plans", json={
            "base_plan_id": base["id"],
            "label": "+50% capacity",
            "config_edits": [{
                "kind": "scale_capacity", "capacity_set": "f1_main",
                "percent": 50, "day_range": [0, 29],
            }],
        }).json()

        print("\nhistory:")
        for entry in api.get("/api/plans").json():
            totals = entry["kpi_totals"]
            print(f"  {entry['label'] or entry['id'][:8]:16s} "
                  f"delay={totals['delay_rate']:.3f} cost={totals['production_cost']:.0f}")

        diff = api.get(f"/api/diff/{base['id']}/{tuned['id']}?level=plan").json()
        print("\ncapacity change:", diff["config_delta"]["capacity"]["net"])
        print("delay delta:", diff["kpi_delta"]["delay_rate"]["delta"])
