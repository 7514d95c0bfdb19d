"""The four performance indicators with anomaly handling.

Missing data gets sentinel codes (see model.Sentinel); infinite smoothing
ratios (capacity use appearing out of nowhere week over week) are replaced
by a finite cap that is large enough to be noticed but too small to distort
aggregates. Aggregation always skips sentinels.

Weekly bucketing: floor(H / week_length) buckets anchored at day 0, with any
trailing partial week folded into the last bucket (30 days -> 4 buckets of
7, 7, 7, 9 days). The smoothing series carries one entry per bucket; the
first entry is 0.0 since there is no predecessor week.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .model import (
    INDICATORS,
    Dataset,
    IndicatorSummary,
    KpiSet,
    PlanConfig,
    ProductKpis,
    Sentinel,
    is_sentinel,
)


@dataclass(frozen=True)
class IndicatorConfig:
    infinity_cap: float = 10.0
    week_length: int = 7
    epsilon: float = 1e-9


DEFAULT_INDICATOR_CONFIG = IndicatorConfig()


def week_buckets(horizon: int, week_length: int = 7) -> list[range]:
    """Day ranges per week bucket; trailing days fold into the last bucket."""
    count = horizon // week_length
    if count == 0:
        return []
    buckets = [range(w * week_length, (w + 1) * week_length) for w in range(count)]
    buckets[-1] = range((count - 1) * week_length, horizon)
    return buckets


def delay_rate(
    demand: Sequence[float], served_on_time: Sequence[float]
) -> tuple[list[float], float]:
    """Daily delay-rate series plus the horizon-level rate.

    Days with zero demand yield Sentinel.NO_DEMAND; the horizon rate is
    delayed demand over total demand, NO_DEMAND when nothing was ordered.
    """
    if len(demand) != len(served_on_time):
        raise ValueError("series lengths differ")
    series: list[float] = []
    total_d = 0.0
    total_delayed = 0.0
    for d, s in zip(demand, served_on_time):
        if d < 0 or s < 0:
            raise ValueError("negative demand/served input")
        if s > d:
            raise ValueError("served_on_time exceeds demand")
        if d > 0:
            series.append((d - s) / d)
            total_d += d
            total_delayed += d - s
        else:
            series.append(float(Sentinel.NO_DEMAND))
    summary = total_delayed / total_d if total_d > 0 else float(Sentinel.NO_DEMAND)
    return series, summary


def smoothing_rate(
    weekly_use: Sequence[float], cfg: IndicatorConfig = DEFAULT_INDICATOR_CONFIG
) -> list[float]:
    """Relative change of weekly capacity use, capped at cfg.infinity_cap.

    Entry 0 is 0.0 (no predecessor week). A jump from ~zero use to positive
    use is an infinite ratio and reports the cap itself.
    """
    eps = cfg.epsilon
    out: list[float] = []
    for w, use in enumerate(weekly_use):
        if use < 0:
            raise ValueError("negative capacity use")
        if w == 0:
            out.append(0.0)
            continue
        prev = weekly_use[w - 1]
        if prev > eps:
            out.append(min(abs(use - prev) / prev, cfg.infinity_cap))
        elif use > eps:
            out.append(cfg.infinity_cap)
        else:
            out.append(0.0)
    return out


def cost_series(
    production: Mapping[str, Mapping[str, Sequence[float]]],
    inventory: Mapping[str, Sequence[float]],
    dataset: Dataset,
    horizon: int,
) -> tuple[dict[str, list[float]], dict[str, list[float]]]:
    """Per-product daily production cost and inventory (holding) cost."""
    prod_cost: dict[str, list[float]] = {}
    inv_cost: dict[str, list[float]] = {}
    for pid, product in dataset.products.items():
        pc = [0.0] * horizon
        for fid, series in production.get(pid, {}).items():
            cost = product.unit_production_cost[fid]
            for t, x in enumerate(series):
                pc[t] += cost * x
        prod_cost[pid] = pc
        inv = inventory.get(pid, (0,) * horizon)
        inv_cost[pid] = [product.unit_holding_cost * v for v in inv]
    return prod_cost, inv_cost


def _stats(values: Sequence[float]) -> tuple[float, float]:
    """Mean and population variance over non-sentinel entries."""
    clean = [v for v in values if not is_sentinel(v)]
    if not clean:
        return float(Sentinel.NO_DEMAND), float(Sentinel.NO_DEMAND)
    arr = np.asarray(clean)
    return float(arr.mean()), float(arr.var())


def compute_kpis(
    dataset: Dataset,
    config: PlanConfig,
    production: Mapping[str, Mapping[str, Sequence[int]]],
    inventory: Mapping[str, Sequence[int]],
    backlog: Mapping[str, Sequence[int]],
    cfg: IndicatorConfig = DEFAULT_INDICATOR_CONFIG,
) -> KpiSet:
    """Assemble the full KpiSet for one plan.

    A pure function: identical inputs produce identical outputs. Trajectories
    must come from the forward simulation (they pin down how much demand was
    served on time).
    """
    horizon = config.horizon
    buckets = week_buckets(horizon, cfg.week_length)

    # Same-day component consumption per product.
    consumption: dict[str, np.ndarray] = {p: np.zeros(horizon) for p in dataset.products}
    prod_total: dict[str, np.ndarray] = {p: np.zeros(horizon) for p in dataset.products}
    for pid, by_factory in production.items():
        for series in by_factory.values():
            prod_total[pid] += np.asarray(series, dtype=float)
    for parent, pairs in dataset.children.items():
        for child, qper in pairs:
            consumption[child] += qper * prod_total[parent]

    # Capacity-set daily use, weekly use, utilization, smoothing.
    cs_use: dict[str, np.ndarray] = {}
    for cs in config.capacity_sets:
        cs_use[cs.id] = np.zeros(horizon)
    for rate in dataset.usage_rates:
        cs = next((c for c in config.capacity_sets if c.id == rate.capacity_set), None)
        if cs is None:
            continue
        series = production.get(rate.product, {}).get(cs.factory)
        if series is not None:
            cs_use[cs.id] += rate.rate * np.asarray(series, dtype=float)
    weekly_use = {
        cid: [float(use[list(b)].sum()) for b in buckets] for cid, use in cs_use.items()
    }
    cs_smoothing = {cid: smoothing_rate(wu, cfg) for cid, wu in weekly_use.items()}
    utilization: dict[str, list[float]] = {}
    for cs in config.capacity_sets:
        holidays = config.holidays.get(cs.factory, frozenset())
        rates: list[float] = []
        for t in range(horizon):
            cap = 0.0 if t in holidays else cs.daily_capacity[t]
            use = float(cs_use[cs.id][t])
            if np.isinf(cap):
                rates.append(float(Sentinel.NO_CAPACITY_USE))
            elif cap <= 0:
                rates.append(0.0)
            else:
                rates.append(use / cap)
        utilization[cs.id] = rates

    prod_cost, inv_cost = cost_series(production, inventory, dataset, horizon)

    # Product usage weights per capacity set (for product-level smoothing).
    usage_by_product: dict[str, list[tuple[str, float]]] = {p: [] for p in dataset.products}
    for rate in dataset.usage_rates:
        cs = next((c for c in config.capacity_sets if c.id == rate.capacity_set), None)
        if cs is None:
            continue
        series = production.get(rate.product, {}).get(cs.factory)
        total = float(rate.rate * np.asarray(series, dtype=float).sum()) if series is not None else 0.0
        usage_by_product[rate.product].append((rate.capacity_set, total))

    per_product: dict[str, ProductKpis] = {}
    plan_demand = 0.0
    plan_delayed = 0.0
    plan_prod_cost = 0.0
    plan_inv_cost = 0.0
    for pid in dataset.products:
        demand = config.demand.get(pid, (0,) * horizon)
        inv = np.asarray(inventory.get(pid, (0,) * horizon), dtype=float)
        bl = np.asarray(backlog.get(pid, (0,) * horizon), dtype=float)
        prod = prod_total[pid]
        cons = consumption[pid]

        # Served-on-time derivation from the balance trajectories.
        on_time: list[float] = []
        prev_b = 0.0
        prev_i = float(config.initial_inventory.get(pid, 0))
        for t in range(horizon):
            avail = prev_i + prod[t] - cons[t]
            serve_total = prev_b + demand[t] - bl[t]
            serve_backlog = min(avail, prev_b)
            on_time.append(max(0.0, serve_total - serve_backlog))
            prev_b = bl[t]
            prev_i = inv[t]

        delay_series, delay_value = delay_rate(list(map(float, demand)), on_time)

        sets = usage_by_product[pid]
        if sets:
            weight_total = sum(w for _, w in sets)
            smooth_series = []
            for w in range(len(buckets)):
                if weight_total > 0:
                    val = sum(wgt * cs_smoothing[cid][w] for cid, wgt in sets) / weight_total
                else:
                    val = float(np.mean([cs_smoothing[cid][w] for cid, _ in sets]))
                smooth_series.append(val)
            if smooth_series:
                s_mean, s_var = _stats(smooth_series)
                smooth_summary = IndicatorSummary(s_mean, s_mean, s_var)
            else:
                smooth_summary = IndicatorSummary(0.0, 0.0, 0.0)
        else:
            smooth_series = [float(Sentinel.NO_CAPACITY_USE)] * len(buckets)
            s = float(Sentinel.NO_CAPACITY_USE)
            smooth_summary = IndicatorSummary(s, s, s)

        uninvolved = (
            not any(demand)
            and not prod.any()
            and not cons.any()
            and not inv.any()
            and config.initial_inventory.get(pid, 0) == 0
        )
        if uninvolved:
            s = float(Sentinel.NOT_INVOLVED)
            summary = {k: IndicatorSummary(s, s, s) for k in INDICATORS}
        else:
            d_mean, d_var = _stats(delay_series)
            pc_total = float(sum(prod_cost[pid]))
            ic_total = float(sum(inv_cost[pid]))
            summary = {
                "delay_rate": IndicatorSummary(delay_value, d_mean, d_var),
                "production_cost": IndicatorSummary(
                    pc_total, *(float(np.mean(prod_cost[pid])), float(np.var(prod_cost[pid])))
                ),
                "inventory_cost": IndicatorSummary(
                    ic_total, *(float(np.mean(inv_cost[pid])), float(np.var(inv_cost[pid])))
                ),
                "smoothing_rate": smooth_summary,
            }
            plan_prod_cost += pc_total
            plan_inv_cost += ic_total
        plan_demand += float(sum(demand))
        if not is_sentinel(delay_value):
            plan_delayed += delay_value * float(sum(demand))

        per_product[pid] = ProductKpis(
            delay_rate=tuple(delay_series),
            production_cost=tuple(prod_cost[pid]),
            inventory_cost=tuple(inv_cost[pid]),
            smoothing_rate=tuple(smooth_series),
            summary=summary,
        )

    # Plan totals: demand-weighted delay, cost sums, use-weighted smoothing.
    totals: dict[str, float] = {}
    totals["delay_rate"] = (
        plan_delayed / plan_demand if plan_demand > 0 else float(Sentinel.NO_DEMAND)
    )
    totals["production_cost"] = plan_prod_cost
    totals["inventory_cost"] = plan_inv_cost
    weight_sum = 0.0
    weighted = 0.0
    for cid, series in cs_smoothing.items():
        if not series:
            continue
        w = float(sum(weekly_use[cid]))
        weight_sum += w
        weighted += w * float(np.mean(series))
    totals["smoothing_rate"] = weighted / weight_sum if weight_sum > 0 else 0.0

    return KpiSet(
        products=per_product,
        capacity_daily_use={c: tuple(float(x) for x in u) for c, u in cs_use.items()},
        capacity_weekly_use={c: tuple(v) for c, v in weekly_use.items()},
        capacity_smoothing={c: tuple(v) for c, v in cs_smoothing.items()},
        capacity_utilization={c: tuple(v) for c, v in utilization.items()},
        totals=totals,
    )
