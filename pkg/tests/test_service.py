"""HTTP API contract tests over the in-process test client."""

import math

import pytest
from fastapi.testclient import TestClient

from prodplan.service import create_app
from prodplan.store import PlanStore
from factories import make_dataset, shared_material_dataset


def small_dataset(horizon=6):
    return make_dataset(
        products=[
            ("widget", "finished", 1, {"f1": 2.0}, 0.1),
            ("gadget", "finished", 2, {"f1": 3.0}, 0.1),
        ],
        capacity_sets=[("cs1", "f1", [10.0] * horizon)],
        usage=[("widget", "cs1", 1.0), ("gadget", "cs1", 1.0)],
        demand={"widget": [3] * horizon, "gadget": [2] * horizon},
        initial_inventory={},
        horizon=horizon,
    )


@pytest.fixture
def client(tmp_path):
    app = create_app(dataset=small_dataset(), store=PlanStore(tmp_path / "store"))
    with TestClient(app) as c:
        yield c


def test_dataset_summary_counts(client):
    r = client.get("/api/dataset")
    assert r.status_code == 200
    body = r.json()
    assert body["counts"]["products"] == 2
    assert body["counts"]["capacity_sets"] == 1
    assert body["default_config"]["horizon"] == 6
    assert {p["id"] for p in body["products"]} == {"widget", "gadget"}


def test_service_503_before_dataset_load(tmp_path):
    app = create_app(dataset=None, store=PlanStore(tmp_path / "s"))
    with TestClient(app) as c:
        assert c.get("/api/dataset").status_code == 503


def test_post_plan_then_list_and_fetch(client):
    r = client.post("/api/plans", json={"config_edits": [], "label": "baseline"})
    assert r.status_code == 201
    summary = r.json()
    assert summary["label"] == "baseline"
    assert summary["parent_id"] is None
    assert set(summary["kpi_totals"]) == {
        "delay_rate",
        "production_cost",
        "inventory_cost",
        "smoothing_rate",
    }
    listing = client.get("/api/plans").json()
    assert [s["id"] for s in listing] == [summary["id"]]
    full = client.get(f"/api/plans/{summary['id']}")
    assert full.status_code == 200
    body = full.json()
    assert body["id"] == summary["id"]
    assert "production" in body and "kpis" in body


def test_parent_links_across_posts(client):
    base = client.post("/api/plans", json={"config_edits": []}).json()
    child = client.post(
        "/api/plans",
        json={
            "base_plan_id": base["id"],
            "config_edits": [
                {"kind": "set_demand_point", "product": "widget", "day": 0, "value": 5}
            ],
        },
    ).json()
    grand = client.post(
        "/api/plans", json={"base_plan_id": child["id"], "config_edits": []}
    ).json()
    listing = client.get("/api/plans").json()
    assert [s["parent_id"] for s in listing] == [None, base["id"], child["id"]]
    assert grand["parent_id"] == child["id"]


def test_scale_capacity_edit(client):
    base = client.post("/api/plans", json={"config_edits": []}).json()
    r = client.post(
        "/api/plans",
        json={
            "base_plan_id": base["id"],
            "config_edits": [
                {
                    "kind": "scale_capacity",
                    "capacity_set": "cs1",
                    "percent": 50,
                    "day_range": [0, 5],
                }
            ],
        },
    )
    assert r.status_code == 201
    body = client.get(f"/api/plans/{r.json()['id']}").json()
    series = body["config"]["capacity_sets"][0]["daily_capacity"]
    assert series == [15.0] * 6


def test_toggle_holiday_is_an_involution(client):
    base = client.post("/api/plans", json={"config_edits": []}).json()
    twice = client.post(
        "/api/plans",
        json={
            "base_plan_id": base["id"],
            "config_edits": [
                {"kind": "toggle_holiday", "factory": "f1", "day": 2},
                {"kind": "toggle_holiday", "factory": "f1", "day": 2},
            ],
        },
    ).json()
    a = client.get(f"/api/plans/{base['id']}").json()["config"]
    b = client.get(f"/api/plans/{twice['id']}").json()["config"]
    assert a == b


def test_same_edits_same_production(client):
    edits = [{"kind": "set_demand_point", "product": "widget", "day": 1, "value": 9}]
    first = client.post("/api/plans", json={"config_edits": edits}).json()
    second = client.post("/api/plans", json={"config_edits": edits}).json()
    assert first["id"] != second["id"]
    pa = client.get(f"/api/plans/{first['id']}").json()["production"]
    pb = client.get(f"/api/plans/{second['id']}").json()["production"]
    assert pa == pb


def test_invalid_edits_return_400(client):
    cases = [
        [{"kind": "set_demand_point", "product": "ghost", "day": 0, "value": 1}],
        [{"kind": "set_demand_point", "product": "widget", "day": 99, "value": 1}],
        [{"kind": "set_demand_point", "product": "widget", "day": 0, "value": -4}],
        [{"kind": "set_capacity_point", "capacity_set": "nope", "day": 0, "value": 1}],
        [{"kind": "toggle_holiday", "factory": "ghost", "day": 0}],
        [{"kind": "remove_fixed_constraint", "component": "widget"}],
        [{"kind": "mystery"}],
        ["not-an-object"],
    ]
    for edits in cases:
        r = client.post("/api/plans", json={"config_edits": edits})
        assert r.status_code == 400, edits
        assert r.json()["detail"]


def test_unknown_base_plan_404(client):
    r = client.post("/api/plans", json={"base_plan_id": "nope", "config_edits": []})
    assert r.status_code == 404


def test_delete_then_get_404(client):
    plan_id = client.post("/api/plans", json={"config_edits": []}).json()["id"]
    assert client.delete(f"/api/plans/{plan_id}").status_code == 200
    assert client.get(f"/api/plans/{plan_id}").status_code == 404
    assert client.delete(f"/api/plans/{plan_id}").status_code == 404


def test_diff_endpoint_levels(client):
    a = client.post("/api/plans", json={"config_edits": []}).json()["id"]
    b = client.post(
        "/api/plans",
        json={
            "base_plan_id": a,
            "config_edits": [
                {"kind": "toggle_holiday", "factory": "f1", "day": 3},
            ],
        },
    ).json()["id"]

    plan_level = client.get(f"/api/diff/{a}/{b}?level=plan").json()
    assert plan_level["config_delta"]["holidays"]["net"] == 1
    assert not plan_level["config_delta"]["holidays"]["unchanged"]
    assert "product_deltas" not in plan_level

    zero = client.get(f"/api/diff/{a}/{a}?level=plan").json()
    assert all(d["unchanged"] for d in zero["config_delta"].values())
    for d in zero["kpi_delta"].values():
        assert d["delta"] in (0.0, None)

    product_level = client.get(f"/api/diff/{a}/{b}?level=product").json()
    assert "widget" in product_level["product_deltas"]
    entry = product_level["product_deltas"]["widget"]["delay_rate"]
    assert {"delta", "value_a", "value_b", "was_sentinel_in_a", "is_sentinel_in_b"} <= set(entry)

    detail = client.get(f"/api/diff/{a}/{b}?level=detail&product=widget").json()
    assert detail["detail_slice"]["product"] == "widget"
    assert "production_delta" in detail

    assert client.get(f"/api/diff/{a}/{b}?level=detail").status_code == 400
    assert client.get(f"/api/diff/{a}/{b}?level=bogus").status_code == 400
    assert client.get(f"/api/diff/{a}/nope?level=plan").status_code == 404


def test_remove_fixed_constraint_frees_banned_parent(tmp_path):
    ds = shared_material_dataset(horizon=6, chip_stock=720)
    app = create_app(dataset=ds, store=PlanStore(tmp_path / "store"))
    with TestClient(app) as client:
        base = client.post("/api/plans", json={"config_edits": []}).json()
        base_full = client.get(f"/api/plans/{base['id']}").json()
        assert sum(sum(s) for s in base_full["production"].get("adapter_z", {}).values()) == 0
        freed = client.post(
            "/api/plans",
            json={
                "base_plan_id": base["id"],
                "config_edits": [{"kind": "remove_fixed_constraint", "component": "chip"}],
            },
        ).json()
        freed_full = client.get(f"/api/plans/{freed['id']}").json()
        produced = sum(sum(s) for s in freed_full["production"].get("adapter_z", {}).values())
        assert produced > 0


def test_set_capacity_point_accepts_null_as_infinite(client):
    r = client.post(
        "/api/plans",
        json={
            "config_edits": [
                {"kind": "set_capacity_point", "capacity_set": "cs1", "day": 0, "value": None}
            ]
        },
    )
    assert r.status_code == 201
    body = client.get(f"/api/plans/{r.json()['id']}").json()
    assert body["config"]["capacity_sets"][0]["daily_capacity"][0] is None


# --- wire-format schema validation (docs/api.md) -------------------------

def _check(value, schema, path="$"):
    """Minimal structural validator: dict schemas, [t] lists, type tuples."""
    if isinstance(schema, dict):
        assert isinstance(value, dict), f"{path}: expected object"
        for key, sub in schema.items():
            assert key in value, f"{path}.{key} missing"
            _check(value[key], sub, f"{path}.{key}")
    elif isinstance(schema, list):
        assert isinstance(value, list), f"{path}: expected array"
        for i, item in enumerate(value):
            _check(item, schema[0], f"{path}[{i}]")
    else:
        assert isinstance(value, schema), f"{path}: {type(value)} != {schema}"


NUMBER = (int, float)
SUMMARY_SCHEMA = {
    "id": str,
    "label": str,
    "created_at": str,
    "config_magnitudes": {
        "demand_total": NUMBER,
        "initial_inventory_total": NUMBER,
        "capacity_total": NUMBER,
        "capacity_has_infinite": bool,
        "holiday_count": int,
    },
    "kpi_totals": {
        "delay_rate": NUMBER,
        "production_cost": NUMBER,
        "inventory_cost": NUMBER,
        "smoothing_rate": NUMBER,
    },
}
DELTA_SCHEMA = {
    "value_a": NUMBER,
    "value_b": NUMBER,
    "was_sentinel_in_a": bool,
    "is_sentinel_in_b": bool,
}


def test_responses_match_published_schema(client):
    _check(
        client.get("/api/dataset").json(),
        {
            "counts": {"products": int, "factories": int, "capacity_sets": int},
            "products": [{"id": str, "kind": str, "priority": int, "factories": [str]}],
            "default_config": {"horizon": int, "demand": dict, "holidays": dict},
        },
    )
    a = client.post("/api/plans", json={"config_edits": []}).json()
    _check(a, SUMMARY_SCHEMA)
    b = client.post(
        "/api/plans",
        json={
            "base_plan_id": a["id"],
            "config_edits": [{"kind": "toggle_holiday", "factory": "f1", "day": 1}],
        },
    ).json()
    _check(client.get("/api/plans").json(), [SUMMARY_SCHEMA])
    _check(
        client.get(f"/api/plans/{a['id']}").json(),
        {"id": str, "config": dict, "production": dict, "inventory": dict,
         "backlog": dict, "kpis": {"products": dict, "totals": dict}},
    )
    diff = client.get(f"/api/diff/{a['id']}/{b['id']}?level=detail&product=widget").json()
    _check(
        diff,
        {
            "plan_a": str,
            "plan_b": str,
            "config_delta": {
                "demand": {"l1": NUMBER, "net": NUMBER, "unchanged": bool,
                           "infinite_transitions": int},
            },
            "kpi_delta": {"delay_rate": DELTA_SCHEMA},
            "product_deltas": dict,
            "inventory_delta": dict,
            "detail_slice": {"product": str, "horizon": int, "subtree": list, "plans": dict},
        },
    )


def test_infeasible_config_maps_to_422(tmp_path, monkeypatch):
    from prodplan import service as service_module
    from prodplan.planner import InfeasibleConfigError

    def boom(*args, **kwargs):
        raise InfeasibleConfigError("contradictory config")

    monkeypatch.setattr(service_module, "plan", boom)
    app = create_app(dataset=small_dataset(), store=PlanStore(tmp_path / "s"))
    with TestClient(app) as c:
        r = c.post("/api/plans", json={"config_edits": []})
    assert r.status_code == 422
    assert "contradictory" in r.json()["detail"]


def test_fifo_gate_admits_in_arrival_order():
    import threading
    import time

    from prodplan.service import _FifoGate

    gate = _FifoGate(1)
    order: list[int] = []
    gate.acquire()  # occupy the only slot

    def worker(k: int):
        gate.acquire()
        order.append(k)
        time.sleep(0.01)
        gate.release()

    threads = []
    for k in range(4):
        t = threading.Thread(target=worker, args=(k,))
        t.start()
        time.sleep(0.05)  # fix arrival order
        threads.append(t)
    gate.release()
    for t in threads:
        t.join(timeout=5)
    assert order == [0, 1, 2, 3]
