"""Domain-type invariants, dataset validation, BOM closure, serialization."""

import math

import pytest

from prodplan.dataset_io import dumps_dataset, loads_dataset
from prodplan.model import Sentinel, bom_closure, validate_dataset
from factories import make_dataset


def chain_dataset(horizon=30):
    return make_dataset(
        products=[
            ("a", "finished", 1, {"f1": 1.0}, 0.1),
            ("b", "intermediate", 2, {"f1": 1.0}, 0.1),
            ("c", "raw", 3, {}, 0.1),
        ],
        edges=[("a", "b", 2.0), ("b", "c", 3.0)],
        capacity_sets=[("cs1", "f1", [10.0] * horizon)],
        usage=[("a", "cs1", 1.0), ("b", "cs1", 1.0)],
        demand={"a": [1] * horizon},
        initial_inventory={"c": 100},
        horizon=horizon,
    )


def test_wellformed_chain_validates_clean():
    report = validate_dataset(chain_dataset())
    assert report.ok, str(report)


def test_two_cycle_is_reported_once_naming_both():
    ds = make_dataset(
        products=[
            ("a", "finished", 1, {"f1": 1.0}, 0.0),
            ("b", "intermediate", 2, {"f1": 1.0}, 0.0),
        ],
        edges=[("a", "b", 1.0), ("b", "a", 1.0)],
        horizon=3,
    )
    report = validate_dataset(ds)
    cycles = [v for v in report.violations if v.code == "bom_cycle"]
    assert len(cycles) == 1
    assert set(cycles[0].subjects) == {"a", "b"}


def test_demand_length_mismatch_flagged():
    ds = make_dataset(
        products=[("a", "finished", 1, {"f1": 1.0}, 0.0)],
        demand={"a": [1] * 29},
        horizon=30,
    )
    report = validate_dataset(ds)
    assert report.codes().count("length_mismatch") == 1


def test_duplicate_priority_flagged():
    ds = make_dataset(
        products=[
            ("a", "finished", 1, {"f1": 1.0}, 0.0),
            ("b", "finished", 1, {"f1": 1.0}, 0.0),
        ],
        horizon=3,
    )
    assert "duplicate_priority" in validate_dataset(ds).codes()


def test_unknown_reference_flagged():
    ds = make_dataset(
        products=[("a", "finished", 1, {"f1": 1.0}, 0.0)],
        edges=[("a", "ghost", 1.0)],
        horizon=3,
    )
    assert "unknown_product" in validate_dataset(ds).codes()


def test_raw_material_with_children_flagged():
    ds = make_dataset(
        products=[
            ("a", "raw", 1, {}, 0.0),
            ("b", "raw", 2, {}, 0.0),
        ],
        edges=[("a", "b", 1.0)],
        horizon=3,
    )
    assert "raw_material_with_children" in validate_dataset(ds).codes()


def test_fixed_constraint_parent_must_be_real_parent():
    ds = make_dataset(
        products=[
            ("a", "finished", 1, {"f1": 1.0}, 0.0),
            ("r", "raw", 2, {}, 0.0),
        ],
        edges=[("a", "r", 1.0)],
        fixed=[("r", {"a", "stranger"})],
        horizon=3,
    )
    assert "not_a_parent" in validate_dataset(ds).codes()


def test_closure_multiplies_along_chain():
    ds = chain_dataset(horizon=5)
    assert bom_closure(ds, "a") == [("b", 2.0), ("c", 6.0)]


def test_closure_of_leaf_is_empty():
    ds = chain_dataset(horizon=5)
    assert bom_closure(ds, "c") == []


def test_closure_diamond_sums_paths():
    # Hand enumeration: a->b->d contributes 1*2, a->c->d contributes 1*1.
    ds = make_dataset(
        products=[
            ("a", "finished", 1, {"f1": 1.0}, 0.0),
            ("b", "intermediate", 2, {"f1": 1.0}, 0.0),
            ("c", "intermediate", 3, {"f1": 1.0}, 0.0),
            ("d", "raw", 4, {}, 0.0),
        ],
        edges=[("a", "b", 1.0), ("a", "c", 1.0), ("b", "d", 2.0), ("c", "d", 1.0)],
        horizon=3,
    )
    assert bom_closure(ds, "a") == [("b", 1.0), ("c", 1.0), ("d", 3.0)]


def test_closure_unknown_product_raises():
    with pytest.raises(KeyError):
        bom_closure(chain_dataset(), "nope")


def test_serialize_parse_serialize_is_byte_identical():
    ds = make_dataset(
        products=[
            ("a", "finished", 1, {"f1": 1.5, "f2": 2.0}, 0.25),
            ("r", "raw", 2, {}, 0.05),
        ],
        edges=[("a", "r", 2.0)],
        factories=("f1", "f2"),
        capacity_sets=[("cs1", "f1", [5.0, math.inf, 5.0])],
        usage=[("a", "cs1", 1.0)],
        fixed=[("r", {"a"})],
        demand={"a": [1, 2, 3]},
        initial_inventory={"r": 10},
        horizon=3,
        holidays={"f1": {1}},
    )
    text = dumps_dataset(ds)
    assert dumps_dataset(loads_dataset(text)) == text
    # Infinite capacity crosses the JSON boundary as null.
    assert "null" in text
    reparsed = loads_dataset(text)
    assert math.isinf(reparsed.capacity_sets["cs1"].daily_capacity[1])


def test_sentinel_codes_are_fixed_and_negative():
    assert Sentinel.NO_DEMAND == -1
    assert Sentinel.NO_CAPACITY_USE == -2
    assert Sentinel.NOT_INVOLVED == -3
    assert all(s < 0 for s in Sentinel)
