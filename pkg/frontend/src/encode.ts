/** Pure visual-encoding rules shared by the views and their tests.
 *
 * The UI never recomputes planning numbers: everything here maps fetched
 * values to geometry or class names, and `shownValue` is the single way a
 * number reaches the DOM (verbatim JSON rendering, so what is displayed is
 * byte-equal to the payload).
 */

import type { CategoryDelta, IndicatorDelta, KpiKey, PlanSummary } from "./api";

export const KPI_COLORS: Record<KpiKey, string> = {
  delay_rate: "#d62728", // red
  production_cost: "#1f77b4", // blue
  inventory_cost: "#2ca02c", // green
  smoothing_rate: "#9467bd", // purple
};

export const CONFIG_CATEGORIES = ["demand", "inventory", "capacity", "holidays"] as const;
export type ConfigCategory = (typeof CONFIG_CATEGORIES)[number];

export function isSentinel(value: number): boolean {
  return value === -1 || value === -2 || value === -3;
}

/** Render a payload number exactly as JSON would (byte-equal display). */
export function shownValue(value: number | null): string {
  return JSON.stringify(value);
}

export interface TriangleMark {
  size: number; // 0..1 relative size
  direction: "up" | "down" | "flat";
  dashed: boolean; // no change in this category
  categorical: boolean; // INFINITE<->finite switches present
}

/** Link triangle for one config category (size ~ |change|, dashed = none). */
export function configTriangle(delta: CategoryDelta, scaleMax: number): TriangleMark {
  const magnitude = scaleMax > 0 ? Math.sqrt(delta.l1 / scaleMax) : 0;
  return {
    size: Math.max(0, Math.min(1, magnitude)),
    direction: delta.net > 0 ? "up" : delta.net < 0 ? "down" : "flat",
    dashed: delta.unchanged,
    categorical: delta.infinite_transitions > 0,
  };
}

export interface KpiLine {
  width: number; // 0..1 relative width
  increased: boolean; // gray when the value went up
  sentinel: boolean;
}

/** Link line for one KPI delta (width ~ |delta|, gray = got worse). */
export function kpiLink(delta: IndicatorDelta, scaleMax: number): KpiLine {
  if (delta.delta === null) {
    return { width: 0, increased: false, sentinel: true };
  }
  const width = scaleMax > 0 ? Math.min(1, Math.abs(delta.delta) / scaleMax) : 0;
  return { width, increased: delta.delta > 0, sentinel: false };
}

export interface GlyphBar {
  key: KpiKey;
  height: number; // 0..1 against the max across all plans
  background: number; // always 1 (gray max backdrop)
  sentinel: boolean;
}

/** Plan-glyph KPI bars, scaled so the gray backdrop is the max over plans. */
export function glyphBars(
  totals: Record<KpiKey, number>,
  maxTotals: Record<KpiKey, number>,
): GlyphBar[] {
  const keys: KpiKey[] = ["delay_rate", "production_cost", "inventory_cost", "smoothing_rate"];
  return keys.map((key) => {
    const value = totals[key];
    const max = maxTotals[key];
    return {
      key,
      height: isSentinel(value) || max <= 0 ? 0 : Math.min(1, value / max),
      background: 1,
      sentinel: isSentinel(value),
    };
  });
}

export function maxTotals(plans: PlanSummary[]): Record<KpiKey, number> {
  const out: Record<KpiKey, number> = {
    delay_rate: 0,
    production_cost: 0,
    inventory_cost: 0,
    smoothing_rate: 0,
  };
  for (const plan of plans) {
    for (const key of Object.keys(out) as KpiKey[]) {
      const v = plan.kpi_totals[key];
      if (!isSentinel(v)) out[key] = Math.max(out[key], v);
    }
  }
  return out;
}

export interface ConfigCircle {
  category: ConfigCategory;
  radius: number; // 0..1
  infinite: boolean; // brown circle for INFINITE capacity configs
}

/** The four light-orange config circles under the KPI bars. */
export function configCircles(
  plan: PlanSummary,
  allPlans: PlanSummary[],
): ConfigCircle[] {
  const magnitudes = (p: PlanSummary): Record<ConfigCategory, number> => ({
    demand: p.config_magnitudes.demand_total,
    inventory: p.config_magnitudes.initial_inventory_total,
    capacity: p.config_magnitudes.capacity_total,
    holidays: p.config_magnitudes.holiday_count,
  });
  const mine = magnitudes(plan);
  return CONFIG_CATEGORIES.map((category) => {
    const max = Math.max(1e-9, ...allPlans.map((p) => magnitudes(p)[category]));
    return {
      category,
      radius: Math.sqrt(Math.max(0, mine[category]) / max),
      infinite: category === "capacity" && plan.config_magnitudes.capacity_has_infinite,
    };
  });
}

/** Segmented parallel-coordinates partition: sentinels go to the lower box. */
export function partitionAxis(values: { id: string; value: number }[]): {
  normal: { id: string; value: number }[];
  abnormal: { id: string; value: number }[];
} {
  const normal = values.filter((v) => !isSentinel(v.value));
  const abnormal = values.filter((v) => isSentinel(v.value));
  return { normal, abnormal };
}

/** Red for an increase between the last and current plan, blue for a decrease. */
export function segmentClass(delta: IndicatorDelta): "increase" | "decrease" | "neutral" {
  if (delta.delta === null || delta.delta === 0) return "neutral";
  return delta.delta > 0 ? "increase" : "decrease";
}

export interface ProductGlyphRegion {
  key: KpiKey;
  valueRadius: number; // inner sector, 0..1
  varianceAngle: number; // middle arc, radians 0..pi/2
  deltaAngle: number; // outer arc magnitude, radians 0..pi/2
  deltaClockwise: boolean; // clockwise (filled) = increase
  gray: boolean; // whole region gray when the value is a sentinel
  grayTriangle: boolean; // sentinel in the last plan
}

export function productGlyph(
  deltas: Record<KpiKey, IndicatorDelta>,
  summaries: Record<KpiKey, { value: number; mean: number; variance: number }>,
  norm: Record<KpiKey, { value: number; variance: number; delta: number }>,
): ProductGlyphRegion[] {
  const keys: KpiKey[] = ["delay_rate", "production_cost", "inventory_cost", "smoothing_rate"];
  const quarter = Math.PI / 2;
  return keys.map((key) => {
    const s = summaries[key];
    const d = deltas[key];
    const gray = isSentinel(s.value);
    const n = norm[key];
    return {
      key,
      valueRadius: gray || n.value <= 0 ? 0 : Math.min(1, s.value / n.value),
      varianceAngle:
        gray || isSentinel(s.variance) || n.variance <= 0
          ? 0
          : Math.min(1, s.variance / n.variance) * quarter,
      deltaAngle:
        d.delta === null || n.delta <= 0 ? 0 : Math.min(1, Math.abs(d.delta) / n.delta) * quarter,
      deltaClockwise: (d.delta ?? 0) > 0,
      gray,
      grayTriangle: d.was_sentinel_in_a,
    };
  });
}

/** Slider filter over indicator deltas; sentinel transitions never match. */
export function filterByDeltaRanges(
  deltas: Record<string, Record<KpiKey, IndicatorDelta>>,
  ranges: Partial<Record<KpiKey, [number | null, number | null]>>,
): string[] {
  const out: string[] = [];
  for (const [pid, byKey] of Object.entries(deltas)) {
    let ok = true;
    for (const [key, range] of Object.entries(ranges) as [KpiKey, [number | null, number | null]][]) {
      const d = byKey[key].delta;
      if (d === null) {
        ok = false;
        break;
      }
      const [lo, hi] = range;
      if ((lo !== null && d < lo) || (hi !== null && d > hi)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push(pid);
  }
  out.sort((x, y) => {
    const dx = deltas[x].delay_rate.delta;
    const dy = deltas[y].delay_rate.delta;
    const mx = dx === null ? -1 : Math.abs(dx);
    const my = dy === null ? -1 : Math.abs(dy);
    return my - mx || (x < y ? -1 : 1);
  });
  return out;
}

/** Heatmap saturation for remaining-inventory / delayed-order rows. */
export function heatShade(value: number, rowMax: number): number {
  if (rowMax <= 0) return 0;
  return Math.max(0, Math.min(1, value / rowMax));
}

/** Daily bar versus the last plan: border inside when current is larger. */
export function barWithBorder(current: number, last: number, axisMax: number) {
  const h = (v: number) => (axisMax > 0 && !isSentinel(v) ? Math.min(1, v / axisMax) : 0);
  return {
    barHeight: h(current),
    borderHeight: h(last),
    borderInside: !isSentinel(current) && !isSentinel(last) && current > last,
    gray: isSentinel(current),
  };
}
