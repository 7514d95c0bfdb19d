"""Replay a capacity what-if: find the bottleneck, raise it 50%, compare."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "tests"))

from factories import bottleneck_dataset
from prodplan import diff_plans, plan
from prodplan.service import apply_edits

dataset = bottleneck_dataset()
baseline = plan(dataset, dataset.default_config, label="baseline")
print(f"baseline delay rate: {baseline.kpis.totals['delay_rate']:.4f}")

# The main pool runs hot; its utilization sits at 1.0 all month.
print("f1_main utilization, week 1:",
      [round(u, 2) for u in baseline.kpis.capacity_utilization["f1_main"][:7]])

edited, _ = apply_edits(dataset, dataset.default_config, [
    {"kind": "scale_capacity", "capacity_set": "f1_main", "percent": 50,
     "day_range": [0, 29]},
])
upgraded = plan(dataset, edited, parent_id=baseline.id, label="+50% f1_main")
print(f"upgraded delay rate: {upgraded.kpis.totals['delay_rate']:.4f}")

diff = diff_plans(baseline, upgraded, dataset)
print("\nconfig change (capacity):", diff.config_delta["capacity"].net)
for key, d in diff.kpi_delta.items():
    arrow = "down" if (d.delta or 0) < 0 else "up"
    print(f"  {key:18s} {d.value_a:12.2f} -> {d.value_b:12.2f}  ({arrow})")
