"""Plan and KPI JSON (de)serialization.

Canonical form (sorted keys, compact separators) so a round trip is
byte-identical. Integral values are emitted as ints to keep payloads small
and diffs exact; sentinels travel as their negative codes.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .dataset_io import canonical_dumps, config_from_dict, config_to_dict
from .model import INDICATORS, IndicatorSummary, KpiSet, Plan, ProductKpis


def _num(v: float) -> float | int:
    f = float(v)
    return int(f) if f.is_integer() else f


def _series(values) -> list:
    return [_num(v) for v in values]


def _summary_to_dict(s: IndicatorSummary) -> dict[str, Any]:
    return {"value": _num(s.value), "mean": _num(s.mean), "variance": _num(s.variance)}


def _summary_from_dict(d: Mapping[str, Any]) -> IndicatorSummary:
    return IndicatorSummary(
        value=float(d["value"]), mean=float(d["mean"]), variance=float(d["variance"])
    )


def kpis_to_dict(k: KpiSet) -> dict[str, Any]:
    return {
        "products": {
            pid: {
                "delay_rate": _series(pk.delay_rate),
                "production_cost": _series(pk.production_cost),
                "inventory_cost": _series(pk.inventory_cost),
                "smoothing_rate": _series(pk.smoothing_rate),
                "summary": {key: _summary_to_dict(pk.summary[key]) for key in INDICATORS},
            }
            for pid, pk in sorted(k.products.items())
        },
        "capacity_daily_use": {c: _series(v) for c, v in sorted(k.capacity_daily_use.items())},
        "capacity_weekly_use": {c: _series(v) for c, v in sorted(k.capacity_weekly_use.items())},
        "capacity_smoothing": {c: _series(v) for c, v in sorted(k.capacity_smoothing.items())},
        "capacity_utilization": {c: _series(v) for c, v in sorted(k.capacity_utilization.items())},
        "totals": {key: _num(k.totals[key]) for key in INDICATORS},
    }


def kpis_from_dict(d: Mapping[str, Any]) -> KpiSet:
    return KpiSet(
        products={
            pid: ProductKpis(
                delay_rate=tuple(float(v) for v in pk["delay_rate"]),
                production_cost=tuple(float(v) for v in pk["production_cost"]),
                inventory_cost=tuple(float(v) for v in pk["inventory_cost"]),
                smoothing_rate=tuple(float(v) for v in pk["smoothing_rate"]),
                summary={key: _summary_from_dict(pk["summary"][key]) for key in INDICATORS},
            )
            for pid, pk in d["products"].items()
        },
        capacity_daily_use={c: tuple(map(float, v)) for c, v in d["capacity_daily_use"].items()},
        capacity_weekly_use={c: tuple(map(float, v)) for c, v in d["capacity_weekly_use"].items()},
        capacity_smoothing={c: tuple(map(float, v)) for c, v in d["capacity_smoothing"].items()},
        capacity_utilization={c: tuple(map(float, v)) for c, v in d["capacity_utilization"].items()},
        totals={key: float(v) for key, v in d["totals"].items()},
    )


def plan_to_dict(plan: Plan) -> dict[str, Any]:
    return {
        "id": plan.id,
        "parent_id": plan.parent_id,
        "label": plan.label,
        "created_at": plan.created_at,
        "config": config_to_dict(plan.config),
        "production": {
            pid: {fid: _series(s) for fid, s in sorted(by_f.items())}
            for pid, by_f in sorted(plan.production.items())
        },
        "inventory": {pid: _series(s) for pid, s in sorted(plan.inventory.items())},
        "backlog": {pid: _series(s) for pid, s in sorted(plan.backlog.items())},
        "kpis": kpis_to_dict(plan.kpis),
    }


def plan_from_dict(d: Mapping[str, Any]) -> Plan:
    return Plan(
        id=str(d["id"]),
        parent_id=d.get("parent_id"),
        label=str(d.get("label", "")),
        created_at=str(d["created_at"]),
        config=config_from_dict(d["config"]),
        production={
            pid: {fid: tuple(int(v) for v in s) for fid, s in by_f.items()}
            for pid, by_f in d["production"].items()
        },
        inventory={pid: tuple(float(v) for v in s) for pid, s in d["inventory"].items()},
        backlog={pid: tuple(float(v) for v in s) for pid, s in d["backlog"].items()},
        kpis=kpis_from_dict(d["kpis"]),
    )


def dumps_plan(plan: Plan) -> str:
    return canonical_dumps(plan_to_dict(plan))


def loads_plan(text: str) -> Plan:
    return plan_from_dict(json.loads(text))


def plan_summary(plan: Plan) -> dict[str, Any]:
    """Denormalized listing entry: config magnitudes plus KPI totals."""
    cfg = plan.config
    demand_total = sum(sum(s) for s in cfg.demand.values())
    inventory_total = sum(cfg.initial_inventory.values())
    capacity_total = 0.0
    has_infinite = False
    for cs in cfg.capacity_sets:
        for v in cs.daily_capacity:
            if v == float("inf"):
                has_infinite = True
            else:
                capacity_total += v
    return {
        "id": plan.id,
        "parent_id": plan.parent_id,
        "label": plan.label,
        "created_at": plan.created_at,
        "config_magnitudes": {
            "demand_total": _num(demand_total),
            "initial_inventory_total": _num(inventory_total),
            "capacity_total": _num(capacity_total),
            "capacity_has_infinite": has_infinite,
            "holiday_count": cfg.holiday_count(),
        },
        "kpi_totals": {key: _num(plan.kpis.totals[key]) for key in INDICATORS},
    }
