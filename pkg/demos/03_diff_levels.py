"""Walk the three diff levels: plan, product, production detail."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "tests"))

from factories import shared_material_dataset
from prodplan import detail_slice, diff_plans, plan, product_filter
from prodplan.service import apply_edits

dataset = shared_material_dataset(chip_stock=1000)
before = plan(dataset, dataset.default_config, label="chip=1000")
edited, _ = apply_edits(dataset, dataset.default_config, [
    {"kind": "set_initial_inventory", "product": "chip", "value": 8000},
])
after = plan(dataset, edited, parent_id=before.id, label="chip=8000")

diff = diff_plans(before, after, dataset)

print("plan level")
for cat, d in diff.config_delta.items():
    print(f"  {cat:10s} |change|={d.l1:8.0f} net={d.net:8.0f} unchanged={d.unchanged}")

print("\nproduct level: products whose delay dropped")
improved = product_filter(diff, delta_ranges={"delay_rate": (None, -1e-9)})
for pid in improved:
    d = diff.product_deltas[pid]["delay_rate"]
    print(f"  {pid}: {d.value_a:.3f} -> {d.value_b:.3f}")

print("\ndetail level: adapter_x and its component")
record = detail_slice(dataset, before, after, "adapter_x")
for node in record["subtree"]:
    tail_before = sum(node["backlog"]["a"][-5:])
    tail_after = sum(node["backlog"]["b"][-5:])
    print(f"  {node['relation']:7s} {node['id']:10s} "
          f"late-order tail {tail_before:.0f} -> {tail_after:.0f}")
