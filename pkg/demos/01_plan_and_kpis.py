"""Generate a mid-size dataset, plan it, and read the four indicators."""

from prodplan import generate_dataset, plan

dataset = generate_dataset(products=120, factories=3, depth=3, horizon=30, seed=42)
print(f"{len(dataset.products)} products, {len(dataset.bom_edges)} BOM edges,")
print(f"{len(dataset.capacity_sets)} capacity sets across {len(dataset.factories)} factories")

result = plan(dataset, dataset.default_config, label="baseline")

totals = result.kpis.totals
print("\nplan totals")
print(f"  order delay rate     {totals['delay_rate']:.4f}")
print(f"  production cost      {totals['production_cost']:.0f}")
print(f"  inventory cost       {totals['inventory_cost']:.0f}")
print(f"  weekly smoothing     {totals['smoothing_rate']:.4f}")

# The five worst products by delay, with their daily series.
worst = sorted(
    (
        (pk.summary["delay_rate"].value, pid)
        for pid, pk in result.kpis.products.items()
        if pk.summary["delay_rate"].value >= 0
    ),
    reverse=True,
)[:5]
print("\nworst delay rates")
for value, pid in worst:
    print(f"  {pid}: {value:.3f}")

cs_id = sorted(result.kpis.capacity_utilization)[0]
print(f"\nutilization of {cs_id} (first 10 days):")
print("  " + " ".join(f"{u:.2f}" for u in result.kpis.capacity_utilization[cs_id][:10]))
