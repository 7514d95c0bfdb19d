"""Append-log persistence: durability, tombstones, crash recovery."""

import random

import pytest

from prodplan.serialize import dumps_plan
from prodplan.store import PlanStore, UnknownPlanError
from factories import make_dataset, random_plan


def tiny_dataset():
    return make_dataset(
        products=[("a", "finished", 1, {"f1": 1.0}, 0.1)],
        capacity_sets=[("cs1", "f1", [5.0] * 3)],
        usage=[("a", "cs1", 1.0)],
        demand={"a": [1, 2, 1]},
        horizon=3,
    )


@pytest.fixture
def store(tmp_path):
    return PlanStore(tmp_path / "store")


def test_put_then_get_is_byte_equal(store):
    ds = tiny_dataset()
    plan = random_plan(ds, random.Random(1))
    store.put(plan)
    assert dumps_plan(store.get(plan.id)) == dumps_plan(plan)


def test_same_content_two_ids(store):
    ds = tiny_dataset()
    rng = random.Random(2)
    a = random_plan(ds, rng)
    b = random_plan(ds, rng)
    store.put(a)
    store.put(b)
    assert a.id != b.id
    assert len(store.list()) == 2


def test_duplicate_id_rejected(store):
    ds = tiny_dataset()
    plan = random_plan(ds, random.Random(3))
    store.put(plan)
    with pytest.raises(Exception):
        store.put(plan)


def test_list_keeps_creation_order(store):
    ds = tiny_dataset()
    rng = random.Random(4)
    plans = [random_plan(ds, rng) for _ in range(3)]
    for p in plans:
        store.put(p)
    assert [s["id"] for s in store.list()] == [p.id for p in plans]


def test_list_never_loads_plan_bodies(tmp_path):
    ds = tiny_dataset()
    rng = random.Random(5)
    store = PlanStore(tmp_path / "s")
    for _ in range(3):
        store.put(random_plan(ds, rng))
    reopened = PlanStore(tmp_path / "s")
    reopened.list()
    assert reopened.full_loads == 0
    reopened.get(store.list()[0]["id"])
    assert reopened.full_loads == 1


def test_delete_tombstones_and_children_dangle(store):
    ds = tiny_dataset()
    rng = random.Random(6)
    parent = random_plan(ds, rng)
    child = random_plan(ds, rng, parent_id=parent.id)
    store.put(parent)
    store.put(child)
    store.delete(parent.id)
    summaries = store.list()
    assert [s["id"] for s in summaries] == [child.id]
    assert summaries[0]["parent_id"] == parent.id
    assert summaries[0]["dangling_parent"] is True
    with pytest.raises(UnknownPlanError):
        store.get(parent.id)
    with pytest.raises(UnknownPlanError):
        store.delete(parent.id)


def test_delete_middle_preserves_links(store):
    ds = tiny_dataset()
    rng = random.Random(7)
    a = random_plan(ds, rng)
    b = random_plan(ds, rng, parent_id=a.id)
    c = random_plan(ds, rng, parent_id=b.id)
    for p in (a, b, c):
        store.put(p)
    store.delete(b.id)
    summaries = store.list()
    assert [s["id"] for s in summaries] == [a.id, c.id]
    assert summaries[1]["parent_id"] == b.id


def test_crash_torn_tail_is_ignored(tmp_path):
    ds = tiny_dataset()
    rng = random.Random(8)
    store = PlanStore(tmp_path / "s")
    first = random_plan(ds, rng)
    second = random_plan(ds, rng)
    store.put(first)
    store.put(second)
    log = store.log_path
    # Simulate a crash mid-append: a torn record with no newline.
    with log.open("ab") as fh:
        fh.write(b'{"op":"put","summary":{"id":"torn"')
    reopened = PlanStore(tmp_path / "s")
    assert [s["id"] for s in reopened.list()] == [first.id, second.id]
    assert dumps_plan(reopened.get(second.id)) == dumps_plan(second)
    # The torn bytes were truncated away, so new appends stay readable.
    third = random_plan(ds, rng)
    reopened.put(third)
    again = PlanStore(tmp_path / "s")
    assert [s["id"] for s in again.list()] == [first.id, second.id, third.id]


def test_reopen_after_delete_sees_tombstone(tmp_path):
    ds = tiny_dataset()
    rng = random.Random(9)
    store = PlanStore(tmp_path / "s")
    a = random_plan(ds, rng)
    b = random_plan(ds, rng)
    store.put(a)
    store.put(b)
    store.delete(a.id)
    reopened = PlanStore(tmp_path / "s")
    assert [s["id"] for s in reopened.list()] == [b.id]


def test_compaction_drops_tombstones(tmp_path):
    ds = tiny_dataset()
    rng = random.Random(10)
    store = PlanStore(tmp_path / "s")
    plans = [random_plan(ds, rng) for _ in range(4)]
    for p in plans:
        store.put(p)
    store.delete(plans[1].id)
    size_before = store.log_path.stat().st_size
    store.compact()
    assert store.log_path.stat().st_size < size_before
    assert [s["id"] for s in store.list()] == [plans[0].id, plans[2].id, plans[3].id]
    assert dumps_plan(store.get(plans[2].id)) == dumps_plan(plans[2])
    reopened = PlanStore(tmp_path / "s")
    assert [s["id"] for s in reopened.list()] == [plans[0].id, plans[2].id, plans[3].id]


def test_store_path_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("PRODPLAN_STORE", str(tmp_path / "env-store"))
    store = PlanStore()
    assert store.directory == tmp_path / "env-store"
    assert store.log_path.exists()
