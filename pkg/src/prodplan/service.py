"""HTTP API exposing the what-if loop.

Endpoints (request/response schemas in docs/api.md):

    GET    /api/dataset                    dataset summary + default config
    GET    /api/plans                      creation-ordered plan summaries
    POST   /api/plans                      apply config edits, plan, persist
    GET    /api/plans/{id}                 full plan
    DELETE /api/plans/{id}                 tombstone a plan
    GET    /api/diff/{a}/{b}               three-level diff (level, product)

Plan runs are synchronous with a server-side timeout; at most
``max_concurrent_runs`` solve at a time, later requests waiting their turn
in FIFO order. CORS is open so the browser UI can run from another origin.
A built UI (frontend/dist) is served at ``/`` when present.
"""

from __future__ import annotations

import math
import threading
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .dataset_io import config_to_dict
from .diffing import detail_slice, diff_plans, diff_to_dict
from .model import CapacitySet, Dataset, PlanConfig, validate_config
from .planner import HybridParams, InfeasibleConfigError, plan
from .serialize import plan_summary, plan_to_dict
from .store import PlanStore, UnknownPlanError


class EditError(ValueError):
    """A config edit referencing unknown entities or malformed fields."""


class _FifoGate:
    """Bounded concurrency with strict FIFO admission."""

    def __init__(self, slots: int):
        self._slots = slots
        self._busy = 0
        self._queue: deque[threading.Event] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        with self._lock:
            if self._busy < self._slots and not self._queue:
                self._busy += 1
                return
            ticket = threading.Event()
            self._queue.append(ticket)
        ticket.wait()

    def release(self) -> None:
        with self._lock:
            if self._queue:
                self._queue.popleft().set()
            else:
                self._busy -= 1


def apply_edits(
    dataset: Dataset, base: PlanConfig, edits: list[dict[str, Any]]
) -> tuple[PlanConfig, frozenset[str]]:
    """Apply control-panel edits to a config.

    Returns the new config plus the components whose fixed-component
    constraints were removed. Edit kinds: set_demand_point,
    set_initial_inventory, set_capacity_point, scale_capacity,
    toggle_holiday, remove_fixed_constraint. Raises EditError on unknown
    kinds, unknown entities, or out-of-range fields.
    """
    horizon = base.horizon
    demand = {p: list(s) for p, s in base.demand.items()}
    inventory = dict(base.initial_inventory)
    capacity = {cs.id: list(cs.daily_capacity) for cs in base.capacity_sets}
    cs_factory = {cs.id: cs.factory for cs in base.capacity_sets}
    holidays = {f: set(days) for f, days in base.holidays.items()}
    removed_constraints: set[str] = set()

    def check_day(day: Any) -> int:
        if not isinstance(day, int) or not 0 <= day < horizon:
            raise EditError(f"day {day!r} outside horizon [0, {horizon})")
        return day

    def check_product(pid: Any) -> str:
        if pid not in dataset.products:
            raise EditError(f"unknown product {pid!r}")
        return pid

    for edit in edits:
        if not isinstance(edit, dict) or "kind" not in edit:
            raise EditError("each edit must be an object with a 'kind'")
        kind = edit["kind"]
        try:
            if kind == "set_demand_point":
                pid = check_product(edit["product"])
                day = check_day(edit["day"])
                value = int(edit["value"])
                if value < 0:
                    raise EditError("demand must be non-negative")
                series = demand.setdefault(pid, [0] * horizon)
                series[day] = value
            elif kind == "set_initial_inventory":
                pid = check_product(edit["product"])
                value = int(edit["value"])
                if value < 0:
                    raise EditError("inventory must be non-negative")
                inventory[pid] = value
            elif kind == "set_capacity_point":
                cs_id = edit["capacity_set"]
                if cs_id not in capacity:
                    raise EditError(f"unknown capacity set {cs_id!r}")
                day = check_day(edit["day"])
                raw = edit["value"]
                value = math.inf if raw is None else float(raw)
                if value < 0:
                    raise EditError("capacity must be non-negative")
                capacity[cs_id][day] = value
            elif kind == "scale_capacity":
                cs_id = edit["capacity_set"]
                if cs_id not in capacity:
                    raise EditError(f"unknown capacity set {cs_id!r}")
                percent = float(edit["percent"])
                factor = 1.0 + percent / 100.0
                if factor < 0:
                    raise EditError("scale below -100% is not meaningful")
                day_range = edit.get("day_range", [0, horizon - 1])
                lo, hi = int(day_range[0]), int(day_range[1])
                check_day(lo)
                check_day(hi)
                if lo > hi:
                    raise EditError("day_range start after end")
                for day in range(lo, hi + 1):
                    v = capacity[cs_id][day]
                    capacity[cs_id][day] = v if math.isinf(v) else round(v * factor, 6)
            elif kind == "toggle_holiday":
                fid = edit["factory"]
                if fid not in dataset.factories:
                    raise EditError(f"unknown factory {fid!r}")
                day = check_day(edit["day"])
                days = holidays.setdefault(fid, set())
                if day in days:
                    days.remove(day)
                else:
                    days.add(day)
            elif kind == "remove_fixed_constraint":
                component = edit["component"]
                if component not in {fc.component for fc in dataset.fixed_component_constraints}:
                    raise EditError(f"no fixed-component constraint on {component!r}")
                removed_constraints.add(component)
            else:
                raise EditError(f"unknown edit kind {kind!r}")
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, EditError):
                raise
            raise EditError(f"malformed {kind} edit: {exc}") from exc

    new_config = PlanConfig(
        horizon=horizon,
        start_date=base.start_date,
        demand={p: tuple(s) for p, s in demand.items()},
        initial_inventory=inventory,
        capacity_sets=tuple(
            CapacitySet(id=cid, factory=cs_factory[cid], daily_capacity=tuple(series))
            for cid, series in sorted(capacity.items())
        ),
        holidays={f: frozenset(d) for f, d in holidays.items() if d},
        objective_weights=base.objective_weights,
    )
    report = validate_config(dataset, new_config)
    if not report.ok:
        raise EditError(str(report))
    return new_config, frozenset(removed_constraints)


def _restrict_dataset(dataset: Dataset, removed: frozenset[str]) -> Dataset:
    if not removed:
        return dataset
    return Dataset(
        products=dataset.products,
        bom_edges=dataset.bom_edges,
        factories=dataset.factories,
        capacity_sets=dataset.capacity_sets,
        usage_rates=dataset.usage_rates,
        fixed_component_constraints=tuple(
            fc for fc in dataset.fixed_component_constraints if fc.component not in removed
        ),
        default_config=dataset.default_config,
    )


def dataset_summary(dataset: Dataset) -> dict[str, Any]:
    return {
        "counts": {
            "products": len(dataset.products),
            "bom_edges": len(dataset.bom_edges),
            "factories": len(dataset.factories),
            "capacity_sets": len(dataset.capacity_sets),
            "usage_rates": len(dataset.usage_rates),
            "fixed_component_constraints": len(dataset.fixed_component_constraints),
        },
        "products": [
            {
                "id": p.id,
                "name": p.name,
                "kind": p.kind.value,
                "priority": p.priority,
                "factories": sorted(p.unit_production_cost),
            }
            for p in sorted(dataset.products.values(), key=lambda p: p.id)
        ],
        "factories": [
            {"id": f.id, "name": f.name}
            for f in sorted(dataset.factories.values(), key=lambda f: f.id)
        ],
        "capacity_sets": [
            {"id": cs.id, "factory": cs.factory}
            for cs in sorted(dataset.capacity_sets.values(), key=lambda c: c.id)
        ],
        "fixed_component_constraints": [
            {"component": fc.component, "allowed_parents": sorted(fc.allowed_parents)}
            for fc in sorted(dataset.fixed_component_constraints, key=lambda f: f.component)
        ],
        "default_config": config_to_dict(dataset.default_config),
    }


def create_app(
    dataset: Dataset | None = None,
    store: PlanStore | None = None,
    max_concurrent_runs: int = 2,
    run_timeout: float = 120.0,
    params: HybridParams | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="production planning what-if service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.dataset = dataset
    app.state.store = store
    app.state.gate = _FifoGate(max_concurrent_runs)
    app.state.pool = ThreadPoolExecutor(max_workers=max_concurrent_runs + 2)
    app.state.run_timeout = run_timeout
    app.state.params = params or HybridParams()

    def need_dataset() -> Dataset:
        ds = app.state.dataset
        if ds is None:
            raise HTTPException(status_code=503, detail="dataset not loaded")
        return ds

    def need_store() -> PlanStore:
        st = app.state.store
        if st is None:
            raise HTTPException(status_code=503, detail="store not ready")
        return st

    def load_plan(plan_id: str):
        try:
            return need_store().get(plan_id)
        except UnknownPlanError:
            raise HTTPException(status_code=404, detail=f"unknown plan {plan_id!r}")

    @app.get("/api/dataset")
    def get_dataset():
        return dataset_summary(need_dataset())

    @app.get("/api/plans")
    def list_plans():
        return need_store().list()

    @app.post("/api/plans", status_code=201)
    def create_plan(body: dict):
        ds = need_dataset()
        store = need_store()
        base_plan_id = body.get("base_plan_id")
        label = str(body.get("label", ""))
        edits = body.get("config_edits", [])
        if not isinstance(edits, list):
            raise HTTPException(status_code=400, detail="config_edits must be a list")
        base_config = load_plan(base_plan_id).config if base_plan_id else ds.default_config
        try:
            config, removed = apply_edits(ds, base_config, edits)
        except EditError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        effective = _restrict_dataset(ds, removed)

        gate: _FifoGate = app.state.gate
        gate.acquire()
        try:
            future = app.state.pool.submit(
                plan, effective, config, app.state.params, base_plan_id, label
            )
            result = future.result(timeout=app.state.run_timeout)
        except FutureTimeout:
            raise HTTPException(status_code=504, detail="plan run timed out")
        except InfeasibleConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        finally:
            gate.release()
        store.put(result)
        return plan_summary(result)

    @app.get("/api/plans/{plan_id}")
    def get_plan(plan_id: str):
        return plan_to_dict(load_plan(plan_id))

    @app.delete("/api/plans/{plan_id}")
    def delete_plan(plan_id: str):
        try:
            need_store().delete(plan_id)
        except UnknownPlanError:
            raise HTTPException(status_code=404, detail=f"unknown plan {plan_id!r}")
        return JSONResponse({"deleted": plan_id})

    @app.get("/api/diff/{plan_a}/{plan_b}")
    def get_diff(
        plan_a: str,
        plan_b: str,
        level: str = Query("plan"),
        product: str | None = Query(None),
    ):
        if level not in ("plan", "product", "detail"):
            raise HTTPException(status_code=400, detail=f"unknown level {level!r}")
        ds = need_dataset()
        a = load_plan(plan_a)
        b = load_plan(plan_b)
        try:
            diff = diff_plans(a, b, ds)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        payload = diff_to_dict(diff, level=level)
        if level == "detail":
            if not product:
                raise HTTPException(
                    status_code=400, detail="detail level requires a product parameter"
                )
            if product not in ds.products:
                raise HTTPException(status_code=404, detail=f"unknown product {product!r}")
            payload["detail_slice"] = detail_slice(ds, a, b, product)
        return payload

    ui_path = Path(ui_dir) if ui_dir else Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if ui_path.is_dir():
        app.mount("/", StaticFiles(directory=str(ui_path), html=True), name="ui")

    return app
