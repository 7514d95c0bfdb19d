"""Domain types shared by every other module.

All values here are immutable after construction (frozen dataclasses, tuple
series) and safe to share across threads. Series are dense arrays indexed
0..H-1. Infinite capacity is represented as ``math.inf`` in memory and JSON
``null`` on disk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Iterable, Mapping

INFINITE = math.inf

#: Default planning horizon in days.
DEFAULT_HORIZON = 30


class Sentinel(IntEnum):
    """Reserved negative codes marking missing/inapplicable indicator data.

    Sentinels never participate in arithmetic aggregation; aggregates skip
    them. All codes are strictly negative so they are distinguishable from
    every legal indicator value (rates live in [0, cap], costs are >= 0).
    """

    NO_DEMAND = -1
    NO_CAPACITY_USE = -2
    NOT_INVOLVED = -3


SENTINEL_VALUES = frozenset(int(s) for s in Sentinel)


def is_sentinel(value: float) -> bool:
    return value in SENTINEL_VALUES


class ProductKind(str, Enum):
    FINISHED = "finished"
    INTERMEDIATE = "intermediate"
    RAW_MATERIAL = "raw_material"


@dataclass(frozen=True)
class Product:
    id: str
    name: str
    kind: ProductKind
    priority: int  # 1 = highest, unique within a dataset
    unit_production_cost: Mapping[str, float]  # factory id -> money per piece
    unit_holding_cost: float  # money per piece per day


@dataclass(frozen=True)
class BomEdge:
    parent: str
    child: str
    quantity_per: float  # units of child consumed per unit of parent, > 0


@dataclass(frozen=True)
class Factory:
    id: str
    name: str


@dataclass(frozen=True)
class CapacitySet:
    id: str
    factory: str
    daily_capacity: tuple[float, ...]  # length H; math.inf marks INFINITE

    def is_infinite(self, day: int) -> bool:
        return math.isinf(self.daily_capacity[day])


@dataclass(frozen=True)
class CapacityUsageRate:
    product: str
    capacity_set: str
    rate: float  # capacity units consumed per piece produced, > 0


@dataclass(frozen=True)
class FixedComponentConstraint:
    component: str
    allowed_parents: frozenset[str]


@dataclass(frozen=True)
class PlanConfig:
    """One plan's editable inputs.

    ``demand`` holds real orders and predicted demand pre-summed into one
    series per product. Raw materials receive supply only through
    ``initial_inventory``; there is no in-horizon replenishment.
    """

    horizon: int
    start_date: str  # ISO date of day 0
    demand: Mapping[str, tuple[int, ...]]
    initial_inventory: Mapping[str, int]
    capacity_sets: tuple[CapacitySet, ...]
    holidays: Mapping[str, frozenset[int]]  # factory id -> day indices
    objective_weights: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)

    def capacity_set(self, cs_id: str) -> CapacitySet:
        for cs in self.capacity_sets:
            if cs.id == cs_id:
                return cs
        raise KeyError(cs_id)

    def holiday_count(self) -> int:
        return sum(len(days) for days in self.holidays.values())


@dataclass(frozen=True)
class IndicatorSummary:
    """Horizon-level aggregate plus mean/variance of the underlying series.

    ``value`` is the aggregate (delay: delayed/demand ratio; costs: horizon
    totals; smoothing: usage-weighted mean), or a sentinel. ``mean`` and
    ``variance`` are computed over non-sentinel series entries (population
    variance), or sentinels when no entry qualifies.
    """

    value: float
    mean: float
    variance: float


#: Indicator keys, in canonical display order.
INDICATORS = ("delay_rate", "production_cost", "inventory_cost", "smoothing_rate")


@dataclass(frozen=True)
class ProductKpis:
    delay_rate: tuple[float, ...]  # length H, sentinel-coded
    production_cost: tuple[float, ...]  # length H
    inventory_cost: tuple[float, ...]  # length H
    smoothing_rate: tuple[float, ...]  # length floor(H/7), sentinel-coded
    summary: Mapping[str, IndicatorSummary]  # keyed by INDICATORS


@dataclass(frozen=True)
class KpiSet:
    products: Mapping[str, ProductKpis]
    capacity_daily_use: Mapping[str, tuple[float, ...]]  # cs id -> daily totals
    capacity_weekly_use: Mapping[str, tuple[float, ...]]  # cs id -> weekly totals
    capacity_smoothing: Mapping[str, tuple[float, ...]]  # cs id -> weekly rates
    capacity_utilization: Mapping[str, tuple[float, ...]]  # cs id -> daily rates
    totals: Mapping[str, float]  # keyed by INDICATORS, sentinel-coded


@dataclass(frozen=True)
class Plan:
    """Solver output; immutable after creation.

    production maps product -> factory -> series of pieces; inventory and
    backlog are end-of-day series per product and satisfy the simulate
    balance equations exactly.
    """

    id: str
    parent_id: str | None
    config: PlanConfig
    production: Mapping[str, Mapping[str, tuple[int, ...]]]
    inventory: Mapping[str, tuple[int, ...]]
    backlog: Mapping[str, tuple[int, ...]]
    kpis: KpiSet
    created_at: str
    label: str = ""


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    subjects: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    def __str__(self) -> str:
        if self.ok:
            return "dataset OK"
        lines = [f"{len(self.violations)} violation(s):"]
        lines += [f"  [{v.code}] {v.message}" for v in self.violations]
        return "\n".join(lines)


@dataclass(frozen=True)
class Dataset:
    """The immutable world description.

    Derived adjacency maps are precomputed on construction; the BOM graph is
    expected to be acyclic (checked by ``validate_dataset``; ``bom_closure``
    refuses to run on cyclic data).
    """

    products: Mapping[str, Product]
    bom_edges: tuple[BomEdge, ...]
    factories: Mapping[str, Factory]
    capacity_sets: Mapping[str, CapacitySet]
    usage_rates: tuple[CapacityUsageRate, ...]
    fixed_component_constraints: tuple[FixedComponentConstraint, ...]
    default_config: PlanConfig
    # derived, filled in __post_init__
    children: Mapping[str, tuple[tuple[str, float], ...]] = field(default=None, repr=False)  # type: ignore[assignment]
    parents: Mapping[str, tuple[tuple[str, float], ...]] = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        children: dict[str, list[tuple[str, float]]] = {p: [] for p in self.products}
        parents: dict[str, list[tuple[str, float]]] = {p: [] for p in self.products}
        for e in self.bom_edges:
            if e.parent in children:
                children[e.parent].append((e.child, e.quantity_per))
            if e.child in parents:
                parents[e.child].append((e.parent, e.quantity_per))
        object.__setattr__(
            self, "children", {p: tuple(sorted(v)) for p, v in children.items()}
        )
        object.__setattr__(
            self, "parents", {p: tuple(sorted(v)) for p, v in parents.items()}
        )

    def production_factories(self, product_id: str) -> tuple[str, ...]:
        """Factories that can produce the product, sorted by id."""
        return tuple(sorted(self.products[product_id].unit_production_cost))

    def usage_of_product(self, product_id: str) -> tuple[CapacityUsageRate, ...]:
        return tuple(
            r for r in self.usage_rates if r.product == product_id
        )

    def banned_parents(self) -> frozenset[str]:
        """Products whose production is forbidden by fixed-component constraints."""
        banned: set[str] = set()
        for fc in self.fixed_component_constraints:
            for parent, _q in self.parents.get(fc.component, ()):
                if parent not in fc.allowed_parents:
                    banned.add(parent)
        return frozenset(banned)


def topological_order(dataset: Dataset) -> list[str]:
    """Product ids ordered parents-before-children (Kahn, id tiebreak).

    Raises ValueError if the BOM graph has a cycle.
    """
    indeg = {p: 0 for p in dataset.products}
    for e in dataset.bom_edges:
        if e.child in indeg and e.parent in indeg:
            indeg[e.child] += 1
    ready = sorted(p for p, d in indeg.items() if d == 0)
    order: list[str] = []
    while ready:
        p = ready.pop(0)
        order.append(p)
        touched = False
        for child, _q in dataset.children.get(p, ()):
            indeg[child] -= 1
            if indeg[child] == 0:
                ready.append(child)
                touched = True
        if touched:
            ready.sort()
    if len(order) != len(dataset.products):
        raise ValueError("BOM graph contains a cycle")
    return order


def find_bom_cycle(dataset: Dataset) -> list[str]:
    """Return the products on one BOM cycle, or [] when acyclic."""
    color: dict[str, int] = {}
    stack: list[str] = []

    def visit(node: str) -> list[str] | None:
        color[node] = 1
        stack.append(node)
        for child, _q in dataset.children.get(node, ()):
            c = color.get(child, 0)
            if c == 1:
                return stack[stack.index(child):]
            if c == 0:
                found = visit(child)
                if found is not None:
                    return found
        stack.pop()
        color[node] = 2
        return None

    for start in sorted(dataset.products):
        if color.get(start, 0) == 0:
            cycle = visit(start)
            if cycle:
                return cycle
    return []


def bom_closure(dataset: Dataset, product_id: str) -> list[tuple[str, float]]:
    """All transitive children with cumulative per-unit quantities.

    The cumulative quantity of a component is the product of edge quantities
    along each path from ``product_id``, summed over all paths. Ordered by
    depth (shortest hop distance), then product id.
    """
    if product_id not in dataset.products:
        raise KeyError(f"unknown product: {product_id}")
    if find_bom_cycle(dataset):
        raise ValueError("BOM graph contains a cycle")

    # BFS depths from the root.
    depth = {product_id: 0}
    frontier = [product_id]
    while frontier:
        nxt: list[str] = []
        for node in frontier:
            for child, _q in dataset.children.get(node, ()):
                if child not in depth:
                    depth[child] = depth[node] + 1
                    nxt.append(child)
        frontier = nxt

    # Accumulate path products in topological order restricted to the cone.
    cum: dict[str, float] = {product_id: 1.0}
    for node in topological_order(dataset):
        if node not in depth or node not in cum:
            continue
        for child, q in dataset.children.get(node, ()):
            cum[child] = cum.get(child, 0.0) + cum[node] * q

    members = [p for p in depth if p != product_id]
    members.sort(key=lambda p: (depth[p], p))
    return [(p, cum[p]) for p in members]


def validate_dataset(dataset: Dataset) -> ValidationReport:
    """Check every dataset invariant; violations are data, not exceptions."""
    out: list[Violation] = []
    products = dataset.products
    cfg = dataset.default_config
    horizon = cfg.horizon

    def bad(code: str, message: str, *subjects: str) -> None:
        out.append(Violation(code=code, message=message, subjects=tuple(subjects)))

    # Reference integrity.
    for e in dataset.bom_edges:
        for endpoint in (e.parent, e.child):
            if endpoint not in products:
                bad("unknown_product", f"BOM edge {e.parent}->{e.child} references unknown product {endpoint!r}", endpoint)
        if e.quantity_per <= 0:
            bad("nonpositive_quantity", f"BOM edge {e.parent}->{e.child} has quantity_per {e.quantity_per}", e.parent, e.child)
    for cs in dataset.capacity_sets.values():
        if cs.factory not in dataset.factories:
            bad("unknown_factory", f"capacity set {cs.id!r} references unknown factory {cs.factory!r}", cs.id)
        if len(cs.daily_capacity) != horizon:
            bad("length_mismatch", f"capacity set {cs.id!r} series has length {len(cs.daily_capacity)}, expected {horizon}", cs.id)
        for v in cs.daily_capacity:
            if not math.isinf(v) and (v < 0 or math.isnan(v)):
                bad("negative_capacity", f"capacity set {cs.id!r} has capacity {v}", cs.id)
                break
    seen_usage: set[tuple[str, str]] = set()
    for r in dataset.usage_rates:
        if r.product not in products:
            bad("unknown_product", f"usage rate references unknown product {r.product!r}", r.product)
        if r.capacity_set not in dataset.capacity_sets:
            bad("unknown_capacity_set", f"usage rate references unknown capacity set {r.capacity_set!r}", r.capacity_set)
        if r.rate <= 0:
            bad("nonpositive_rate", f"usage rate ({r.product}, {r.capacity_set}) has rate {r.rate}", r.product)
        key = (r.product, r.capacity_set)
        if key in seen_usage:
            bad("duplicate_usage", f"duplicate usage rate for ({r.product}, {r.capacity_set})", r.product)
        seen_usage.add(key)
    for p in products.values():
        for f in p.unit_production_cost:
            if f not in dataset.factories:
                bad("unknown_factory", f"product {p.id!r} has production cost at unknown factory {f!r}", p.id, f)

    # Product invariants.
    prios = sorted(p.priority for p in products.values())
    if prios != list(range(1, len(products) + 1)):
        dupes = {x for x in prios if prios.count(x) > 1}
        if dupes:
            bad("duplicate_priority", f"priorities are not unique: {sorted(dupes)}")
        else:
            bad("priority_gap", "priorities do not form a permutation of 1..N")
    for p in products.values():
        if p.kind is ProductKind.RAW_MATERIAL and dataset.children.get(p.id):
            bad("raw_material_with_children", f"raw material {p.id!r} has BOM children", p.id)
        if p.kind is not ProductKind.RAW_MATERIAL and not p.unit_production_cost:
            bad("no_production_factory", f"product {p.id!r} has no factory with a production cost", p.id)
        if p.unit_holding_cost < 0:
            bad("negative_holding_cost", f"product {p.id!r} has holding cost {p.unit_holding_cost}", p.id)

    cycle = find_bom_cycle(dataset)
    if cycle:
        bad("bom_cycle", "BOM cycle: " + " -> ".join(cycle + cycle[:1]), *cycle)

    # Fixed-component constraints.
    for fc in dataset.fixed_component_constraints:
        if fc.component not in products:
            bad("unknown_product", f"fixed-component constraint references unknown product {fc.component!r}", fc.component)
            continue
        if not fc.allowed_parents:
            bad("empty_allowed_parents", f"fixed-component constraint on {fc.component!r} allows no parents", fc.component)
        actual_parents = {q for q, _ in dataset.parents.get(fc.component, ())}
        for q in sorted(fc.allowed_parents):
            if q not in actual_parents:
                bad("not_a_parent", f"allowed parent {q!r} is not a BOM parent of {fc.component!r}", fc.component, q)

    # Config invariants.
    out.extend(validate_config(dataset, cfg).violations)
    return ValidationReport(violations=tuple(out))


def validate_config(dataset: Dataset, cfg: PlanConfig) -> ValidationReport:
    """Check a PlanConfig against its dataset."""
    out: list[Violation] = []

    def bad(code: str, message: str, *subjects: str) -> None:
        out.append(Violation(code=code, message=message, subjects=tuple(subjects)))

    if cfg.horizon < 1:
        bad("bad_horizon", f"horizon must be >= 1, got {cfg.horizon}")
    for pid, series in cfg.demand.items():
        if pid not in dataset.products:
            bad("unknown_product", f"demand for unknown product {pid!r}", pid)
        if len(series) != cfg.horizon:
            bad("length_mismatch", f"demand series for {pid!r} has length {len(series)}, expected {cfg.horizon}", pid)
        if any(d < 0 for d in series):
            bad("negative_demand", f"demand series for {pid!r} has negative entries", pid)
    for pid, inv in cfg.initial_inventory.items():
        if pid not in dataset.products:
            bad("unknown_product", f"initial inventory for unknown product {pid!r}", pid)
        if inv < 0:
            bad("negative_inventory", f"initial inventory for {pid!r} is {inv}", pid)
    seen_cs: set[str] = set()
    for cs in cfg.capacity_sets:
        if cs.id in seen_cs:
            bad("duplicate_capacity_set", f"capacity set {cs.id!r} appears twice in config", cs.id)
        seen_cs.add(cs.id)
        if cs.id not in dataset.capacity_sets:
            bad("unknown_capacity_set", f"config capacity set {cs.id!r} not in dataset", cs.id)
        if cs.factory not in dataset.factories:
            bad("unknown_factory", f"capacity set {cs.id!r} references unknown factory {cs.factory!r}", cs.id)
        if len(cs.daily_capacity) != cfg.horizon:
            bad("length_mismatch", f"capacity set {cs.id!r} series has length {len(cs.daily_capacity)}, expected {cfg.horizon}", cs.id)
        if any((not math.isinf(v)) and v < 0 for v in cs.daily_capacity):
            bad("negative_capacity", f"capacity set {cs.id!r} has negative capacity", cs.id)
    for fid, days in cfg.holidays.items():
        if fid not in dataset.factories:
            bad("unknown_factory", f"holidays for unknown factory {fid!r}", fid)
        if any(d < 0 or d >= cfg.horizon for d in days):
            bad("holiday_out_of_range", f"holiday outside [0, {cfg.horizon}) for factory {fid!r}", fid)
    w = cfg.objective_weights
    if len(w) != 4 or any((not math.isfinite(x)) or x < 0 for x in w):
        bad("bad_weights", f"objective weights must be four finite non-negative numbers, got {w}")
    elif all(x == 0 for x in w):
        bad("bad_weights", "objective weights must not all be zero")
    return ValidationReport(violations=tuple(out))
