"""Dataset and PlanConfig JSON (de)serialization.

One dataset is one JSON document with top-level keys ``products``,
``bom_edges``, ``factories``, ``capacity_sets``, ``usage_rates``,
``fixed_component_constraints``, ``default_config``. All ids are strings,
all series are arrays of numbers, INFINITE capacity is encoded as JSON
``null``. Serialization is canonical (entities sorted by id, keys sorted,
compact separators) so serialize -> parse -> serialize is byte-identical.
See docs/dataset-schema.md.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from .model import (
    BomEdge,
    CapacitySet,
    CapacityUsageRate,
    Dataset,
    Factory,
    FixedComponentConstraint,
    PlanConfig,
    Product,
    ProductKind,
)


class DatasetFormatError(ValueError):
    """Raised when a dataset/config document is structurally unreadable."""


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _capacity_to_json(series: tuple[float, ...]) -> list[float | None]:
    return [None if math.isinf(v) else v for v in series]


def _capacity_from_json(series: list[Any]) -> tuple[float, ...]:
    return tuple(math.inf if v is None else float(v) for v in series)


def config_to_dict(cfg: PlanConfig) -> dict[str, Any]:
    return {
        "horizon": cfg.horizon,
        "start_date": cfg.start_date,
        "demand": {p: list(s) for p, s in sorted(cfg.demand.items())},
        "initial_inventory": dict(sorted(cfg.initial_inventory.items())),
        "capacity_sets": [
            {
                "id": cs.id,
                "factory": cs.factory,
                "daily_capacity": _capacity_to_json(cs.daily_capacity),
            }
            for cs in sorted(cfg.capacity_sets, key=lambda c: c.id)
        ],
        "holidays": {f: sorted(days) for f, days in sorted(cfg.holidays.items())},
        "objective_weights": list(cfg.objective_weights),
    }


def config_from_dict(doc: dict[str, Any]) -> PlanConfig:
    try:
        return PlanConfig(
            horizon=int(doc["horizon"]),
            start_date=str(doc.get("start_date", "2018-09-12")),
            demand={str(p): tuple(int(x) for x in s) for p, s in doc.get("demand", {}).items()},
            initial_inventory={str(p): int(v) for p, v in doc.get("initial_inventory", {}).items()},
            capacity_sets=tuple(
                CapacitySet(
                    id=str(cs["id"]),
                    factory=str(cs["factory"]),
                    daily_capacity=_capacity_from_json(cs["daily_capacity"]),
                )
                for cs in doc.get("capacity_sets", [])
            ),
            holidays={
                str(f): frozenset(int(d) for d in days)
                for f, days in doc.get("holidays", {}).items()
            },
            objective_weights=tuple(float(w) for w in doc.get("objective_weights", (1.0, 1.0, 1.0, 1.0))),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetFormatError(f"malformed plan config: {exc}") from exc


def dataset_to_dict(ds: Dataset) -> dict[str, Any]:
    return {
        "products": [
            {
                "id": p.id,
                "name": p.name,
                "kind": p.kind.value,
                "priority": p.priority,
                "unit_production_cost": dict(sorted(p.unit_production_cost.items())),
                "unit_holding_cost": p.unit_holding_cost,
            }
            for p in sorted(ds.products.values(), key=lambda p: p.id)
        ],
        "bom_edges": [
            {"parent": e.parent, "child": e.child, "quantity_per": e.quantity_per}
            for e in sorted(ds.bom_edges, key=lambda e: (e.parent, e.child))
        ],
        "factories": [
            {"id": f.id, "name": f.name}
            for f in sorted(ds.factories.values(), key=lambda f: f.id)
        ],
        "capacity_sets": [
            {
                "id": cs.id,
                "factory": cs.factory,
                "daily_capacity": _capacity_to_json(cs.daily_capacity),
            }
            for cs in sorted(ds.capacity_sets.values(), key=lambda c: c.id)
        ],
        "usage_rates": [
            {"product": r.product, "capacity_set": r.capacity_set, "rate": r.rate}
            for r in sorted(ds.usage_rates, key=lambda r: (r.product, r.capacity_set))
        ],
        "fixed_component_constraints": [
            {"component": fc.component, "allowed_parents": sorted(fc.allowed_parents)}
            for fc in sorted(ds.fixed_component_constraints, key=lambda f: f.component)
        ],
        "default_config": config_to_dict(ds.default_config),
    }


def dataset_from_dict(doc: dict[str, Any]) -> Dataset:
    try:
        products = {}
        for p in doc["products"]:
            prod = Product(
                id=str(p["id"]),
                name=str(p.get("name", p["id"])),
                kind=ProductKind(p["kind"]),
                priority=int(p["priority"]),
                unit_production_cost={str(f): float(c) for f, c in p.get("unit_production_cost", {}).items()},
                unit_holding_cost=float(p.get("unit_holding_cost", 0.0)),
            )
            if prod.id in products:
                raise DatasetFormatError(f"duplicate product id {prod.id!r}")
            products[prod.id] = prod
        factories = {}
        for f in doc["factories"]:
            fac = Factory(id=str(f["id"]), name=str(f.get("name", f["id"])))
            if fac.id in factories:
                raise DatasetFormatError(f"duplicate factory id {fac.id!r}")
            factories[fac.id] = fac
        capacity_sets = {}
        for cs in doc["capacity_sets"]:
            c = CapacitySet(
                id=str(cs["id"]),
                factory=str(cs["factory"]),
                daily_capacity=_capacity_from_json(cs["daily_capacity"]),
            )
            if c.id in capacity_sets:
                raise DatasetFormatError(f"duplicate capacity set id {c.id!r}")
            capacity_sets[c.id] = c
        return Dataset(
            products=products,
            bom_edges=tuple(
                BomEdge(parent=str(e["parent"]), child=str(e["child"]), quantity_per=float(e["quantity_per"]))
                for e in doc.get("bom_edges", [])
            ),
            factories=factories,
            capacity_sets=capacity_sets,
            usage_rates=tuple(
                CapacityUsageRate(
                    product=str(r["product"]),
                    capacity_set=str(r["capacity_set"]),
                    rate=float(r["rate"]),
                )
                for r in doc.get("usage_rates", [])
            ),
            fixed_component_constraints=tuple(
                FixedComponentConstraint(
                    component=str(fc["component"]),
                    allowed_parents=frozenset(str(q) for q in fc["allowed_parents"]),
                )
                for fc in doc.get("fixed_component_constraints", [])
            ),
            default_config=config_from_dict(doc["default_config"]),
        )
    except DatasetFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetFormatError(f"malformed dataset: {exc}") from exc


def dumps_dataset(ds: Dataset) -> str:
    return canonical_dumps(dataset_to_dict(ds))


def loads_dataset(text: str) -> Dataset:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DatasetFormatError("dataset document must be a JSON object")
    return dataset_from_dict(doc)


def save_dataset(ds: Dataset, path: str | Path) -> None:
    Path(path).write_text(dumps_dataset(ds) + "\n", encoding="utf-8")


def load_dataset(path: str | Path) -> Dataset:
    return loads_dataset(Path(path).read_text(encoding="utf-8"))
