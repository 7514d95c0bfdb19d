"""Three-level differences between two plans.

Plan level: per-category config change magnitudes plus the four KPI-total
deltas. Product level: signed change of each summary indicator, with
sentinel transitions surfaced as flags instead of numbers. Detail level:
per-cell production/inventory/backlog/capacity-use changes.

All numeric deltas are B minus A; diff(A, B) is the exact negation of
diff(B, A), and diff(A, A) is all-zero with every unchanged flag set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

from .model import INDICATORS, Dataset, Plan, ProductKind, bom_closure, is_sentinel

CONFIG_CATEGORIES = ("demand", "inventory", "capacity", "holidays")


@dataclass(frozen=True)
class CategoryDelta:
    l1: float  # sum of |change| (glyph-link triangle size)
    net: float  # signed sum (triangle orientation)
    unchanged: bool
    infinite_transitions: int = 0  # INFINITE<->finite capacity switches


@dataclass(frozen=True)
class IndicatorDelta:
    delta: float | None  # absent when either side is a sentinel
    value_a: float
    value_b: float
    was_sentinel_in_a: bool
    is_sentinel_in_b: bool


@dataclass(frozen=True)
class PlanDiff:
    plan_a: str
    plan_b: str
    config_delta: Mapping[str, CategoryDelta]
    kpi_delta: Mapping[str, IndicatorDelta]
    product_deltas: Mapping[str, Mapping[str, IndicatorDelta]]
    production_delta: Mapping[str, Mapping[str, tuple[float, ...]]]
    inventory_delta: Mapping[str, tuple[float, ...]]
    backlog_delta: Mapping[str, tuple[float, ...]]
    capacity_use_delta: Mapping[str, tuple[float, ...]]


def _indicator_delta(va: float, vb: float) -> IndicatorDelta:
    sa, sb = is_sentinel(va), is_sentinel(vb)
    return IndicatorDelta(
        delta=None if (sa or sb) else vb - va,
        value_a=va,
        value_b=vb,
        was_sentinel_in_a=sa,
        is_sentinel_in_b=sb,
    )


def _series_delta(a, b, horizon: int) -> tuple[float, ...]:
    sa = list(a) if a is not None else [0.0] * horizon
    sb = list(b) if b is not None else [0.0] * horizon
    return tuple(float(y) - float(x) for x, y in zip(sa, sb))


def diff_plans(a: Plan, b: Plan, dataset: Dataset | None = None) -> PlanDiff:
    """Compute the full three-level diff of two plans over one dataset.

    When the dataset is provided, the inventory category is restricted to
    raw materials (the only stock the control panel edits); otherwise every
    initial-inventory entry counts.
    """
    if a.config.horizon != b.config.horizon:
        raise ValueError("plans have different horizons")
    if set(a.inventory) != set(b.inventory):
        raise ValueError("plans cover different product sets")
    horizon = a.config.horizon

    # Demand.
    products = sorted(set(a.config.demand) | set(b.config.demand))
    zero = (0,) * horizon
    d_l1 = d_net = 0.0
    for pid in products:
        for x, y in zip(a.config.demand.get(pid, zero), b.config.demand.get(pid, zero)):
            d_l1 += abs(y - x)
            d_net += y - x

    # Raw-material inventory.
    inv_ids = sorted(set(a.config.initial_inventory) | set(b.config.initial_inventory))
    if dataset is not None:
        inv_ids = [
            pid
            for pid in inv_ids
            if dataset.products.get(pid) is not None
            and dataset.products[pid].kind is ProductKind.RAW_MATERIAL
        ]
    i_l1 = i_net = 0.0
    for pid in inv_ids:
        x = a.config.initial_inventory.get(pid, 0)
        y = b.config.initial_inventory.get(pid, 0)
        i_l1 += abs(y - x)
        i_net += y - x

    # Capacity, with INFINITE<->finite transitions kept categorical.
    cs_a = {cs.id: cs for cs in a.config.capacity_sets}
    cs_b = {cs.id: cs for cs in b.config.capacity_sets}
    if set(cs_a) != set(cs_b):
        raise ValueError("plans have different capacity sets")
    c_l1 = c_net = 0.0
    transitions = 0
    for cid in sorted(cs_a):
        for x, y in zip(cs_a[cid].daily_capacity, cs_b[cid].daily_capacity):
            xi, yi = math.isinf(x), math.isinf(y)
            if xi != yi:
                transitions += 1
            elif not xi:
                c_l1 += abs(y - x)
                c_net += y - x

    # Holidays.
    factories = sorted(set(a.config.holidays) | set(b.config.holidays))
    h_l1 = h_net = 0.0
    for fid in factories:
        na = len(a.config.holidays.get(fid, frozenset()))
        nb = len(b.config.holidays.get(fid, frozenset()))
        h_l1 += abs(nb - na)
        h_net += nb - na

    config_delta = {
        "demand": CategoryDelta(d_l1, d_net, d_l1 == 0),
        "inventory": CategoryDelta(i_l1, i_net, i_l1 == 0),
        "capacity": CategoryDelta(c_l1, c_net, c_l1 == 0 and transitions == 0, transitions),
        "holidays": CategoryDelta(h_l1, h_net, h_l1 == 0),
    }

    kpi_delta = {
        key: _indicator_delta(a.kpis.totals[key], b.kpis.totals[key]) for key in INDICATORS
    }

    product_deltas: dict[str, dict[str, IndicatorDelta]] = {}
    for pid in sorted(a.kpis.products):
        pa = a.kpis.products[pid].summary
        pb = b.kpis.products[pid].summary
        product_deltas[pid] = {
            key: _indicator_delta(pa[key].value, pb[key].value) for key in INDICATORS
        }

    production_delta: dict[str, dict[str, tuple[float, ...]]] = {}
    for pid in sorted(set(a.production) | set(b.production)):
        fa = a.production.get(pid, {})
        fb = b.production.get(pid, {})
        per_factory = {
            fid: _series_delta(fa.get(fid), fb.get(fid), horizon)
            for fid in sorted(set(fa) | set(fb))
        }
        production_delta[pid] = per_factory

    inventory_delta = {
        pid: _series_delta(a.inventory.get(pid), b.inventory.get(pid), horizon)
        for pid in sorted(a.inventory)
    }
    backlog_delta = {
        pid: _series_delta(a.backlog.get(pid), b.backlog.get(pid), horizon)
        for pid in sorted(a.backlog)
    }
    capacity_use_delta = {
        cid: _series_delta(
            a.kpis.capacity_daily_use.get(cid), b.kpis.capacity_daily_use.get(cid), horizon
        )
        for cid in sorted(a.kpis.capacity_daily_use)
    }

    return PlanDiff(
        plan_a=a.id,
        plan_b=b.id,
        config_delta=config_delta,
        kpi_delta=kpi_delta,
        product_deltas=product_deltas,
        production_delta=production_delta,
        inventory_delta=inventory_delta,
        backlog_delta=backlog_delta,
        capacity_use_delta=capacity_use_delta,
    )


def product_filter(
    diff: PlanDiff,
    delta_ranges: Mapping[str, tuple[float | None, float | None]] | None = None,
    value_ranges: Mapping[str, tuple[float | None, float | None]] | None = None,
) -> list[str]:
    """Products whose indicator deltas/values fall inside all given ranges.

    With no predicate, returns every product that has at least one
    non-sentinel indicator in the current plan. Stable order: |delay delta|
    descending, then product id; products without a delay delta sort last.
    """

    def in_range(v: float | None, rng: tuple[float | None, float | None]) -> bool:
        if v is None:
            return False
        lo, hi = rng
        return (lo is None or v >= lo) and (hi is None or v <= hi)

    out = []
    for pid, per_ind in diff.product_deltas.items():
        if delta_ranges or value_ranges:
            ok = True
            for key, rng in (delta_ranges or {}).items():
                if not in_range(per_ind[key].delta, rng):
                    ok = False
                    break
            if ok:
                for key, rng in (value_ranges or {}).items():
                    vb = per_ind[key].value_b
                    if is_sentinel(vb) or not in_range(vb, rng):
                        ok = False
                        break
            if not ok:
                continue
        else:
            if all(per_ind[key].is_sentinel_in_b for key in INDICATORS):
                continue
        out.append(pid)

    def sort_key(pid: str):
        delta = diff.product_deltas[pid]["delay_rate"].delta
        magnitude = abs(delta) if delta is not None else -1.0
        return (-magnitude, pid)

    out.sort(key=sort_key)
    return out


def detail_slice(dataset: Dataset, a: Plan, b: Plan, product: str) -> dict[str, Any]:
    """Production-detail comparison record for one product.

    Covers the product's BOM neighbourhood (direct parents, itself, and its
    transitive children), daily indicator series for both plans, per-factory
    production, and the daily use/utilization of every capacity set the
    product consumes.
    """
    if product not in dataset.products:
        raise KeyError(f"unknown product: {product}")
    horizon = a.config.horizon
    zero = (0.0,) * horizon

    closure = bom_closure(dataset, product)
    parents = sorted(q for q, _ in dataset.parents.get(product, ()))
    nodes = [
        {"id": q, "relation": "parent", "depth": -1, "quantity_per_root": None}
        for q in parents
    ]
    nodes.append({"id": product, "relation": "self", "depth": 0, "quantity_per_root": 1.0})
    depth_of = {product: 0}
    frontier = [product]
    while frontier:
        nxt = []
        for node in frontier:
            for child, _q in dataset.children.get(node, ()):
                if child not in depth_of:
                    depth_of[child] = depth_of[node] + 1
                    nxt.append(child)
        frontier = nxt
    for pid, qty in closure:
        nodes.append(
            {
                "id": pid,
                "relation": "child",
                "depth": depth_of.get(pid, 1),
                "quantity_per_root": qty,
            }
        )
    for node in nodes:
        pid = node["id"]
        node["inventory"] = {
            "a": list(a.inventory.get(pid, zero)),
            "b": list(b.inventory.get(pid, zero)),
        }
        node["backlog"] = {
            "a": list(a.backlog.get(pid, zero)),
            "b": list(b.backlog.get(pid, zero)),
        }

    def plan_side(plan: Plan) -> dict[str, Any]:
        pk = plan.kpis.products[product]
        rates = {r.capacity_set for r in dataset.usage_rates if r.product == product}
        return {
            "indicators": {
                "delay_rate": list(pk.delay_rate),
                "production_cost": list(pk.production_cost),
                "inventory_cost": list(pk.inventory_cost),
                "smoothing_rate": list(pk.smoothing_rate),
            },
            "production": {
                fid: list(series)
                for fid, series in sorted(plan.production.get(product, {}).items())
            },
            "capacity": {
                cid: {
                    "use": list(plan.kpis.capacity_daily_use.get(cid, zero)),
                    "utilization": list(plan.kpis.capacity_utilization.get(cid, zero)),
                }
                for cid in sorted(rates)
            },
        }

    return {
        "product": product,
        "horizon": horizon,
        "subtree": nodes,
        "plans": {"a": plan_side(a), "b": plan_side(b)},
    }


def diff_to_dict(diff: PlanDiff, level: str = "detail") -> dict[str, Any]:
    """JSON-ready rendering of a PlanDiff at the requested level of detail."""
    out: dict[str, Any] = {
        "plan_a": diff.plan_a,
        "plan_b": diff.plan_b,
        "config_delta": {
            cat: {
                "l1": cd.l1,
                "net": cd.net,
                "unchanged": cd.unchanged,
                "infinite_transitions": cd.infinite_transitions,
            }
            for cat, cd in diff.config_delta.items()
        },
        "kpi_delta": {
            key: {
                "delta": d.delta,
                "value_a": d.value_a,
                "value_b": d.value_b,
                "was_sentinel_in_a": d.was_sentinel_in_a,
                "is_sentinel_in_b": d.is_sentinel_in_b,
            }
            for key, d in diff.kpi_delta.items()
        },
    }
    if level in ("product", "detail"):
        out["product_deltas"] = {
            pid: {
                key: {
                    "delta": d.delta,
                    "value_a": d.value_a,
                    "value_b": d.value_b,
                    "was_sentinel_in_a": d.was_sentinel_in_a,
                    "is_sentinel_in_b": d.is_sentinel_in_b,
                }
                for key, d in per_ind.items()
            }
            for pid, per_ind in diff.product_deltas.items()
        }
    if level == "detail":
        out["production_delta"] = {
            pid: {fid: list(s) for fid, s in per_f.items()}
            for pid, per_f in diff.production_delta.items()
        }
        out["inventory_delta"] = {pid: list(s) for pid, s in diff.inventory_delta.items()}
        out["backlog_delta"] = {pid: list(s) for pid, s in diff.backlog_delta.items()}
        out["capacity_use_delta"] = {
            cid: list(s) for cid, s in diff.capacity_use_delta.items()
        }
    return out
