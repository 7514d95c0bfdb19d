/** Product view: segmented parallel coordinates (normal values in the
 * upper box, sentinel values in the lower one), red/blue line segments for
 * plan-to-plan change, delta-range sliders, search, brushing that selects
 * products and notifies the control panel's capacity-set filter, and the
 * circular product glyphs for the brushed set. */

import * as d3 from "d3";
import type { DatasetSummary, IndicatorDelta, KpiKey, PlanDocument, PlanDiffPayload } from "../api";
import { KPI_KEYS } from "../api";
import {
  KPI_COLORS,
  filterByDeltaRanges,
  isSentinel,
  partitionAxis,
  productGlyph,
  segmentClass,
  shownValue,
} from "../encode";

export interface ProductViewHandlers {
  onProductPicked: (productId: string) => void;
  onCapacityFilter: (capacitySets: string[] | null) => void;
}

const AXIS_H = 150;
const ABNORMAL_H = 34;
const AXIS_GAP = 118;
const TOP = 26;

export class ProductView {
  private root: d3.Selection<HTMLElement, unknown, null, undefined>;
  private deltaRanges: Partial<Record<KpiKey, [number | null, number | null]>> = {};
  private brushed: Set<string> | null = null;
  private searchText = "";
  private diff: PlanDiffPayload | null = null;
  private current: PlanDocument | null = null;
  private dataset: DatasetSummary | null = null;

  constructor(
    container: HTMLElement,
    private handlers: ProductViewHandlers,
  ) {
    this.root = d3.select(container);
  }

  render(dataset: DatasetSummary, diff: PlanDiffPayload, current: PlanDocument): void {
    this.dataset = dataset;
    this.diff = diff;
    this.current = current;
    this.redraw();
  }

  /** Product ids passing the sliders, search box, and brush. */
  visibleProducts(): string[] {
    if (!this.diff?.product_deltas) return [];
    let ids = filterByDeltaRanges(this.diff.product_deltas, this.deltaRanges);
    if (this.searchText) ids = ids.filter((id) => id.includes(this.searchText));
    if (this.brushed) ids = ids.filter((id) => this.brushed!.has(id));
    return ids;
  }

  /** Brush one axis by value range: selects matching products, highlights
   * them, and narrows the control panel's capacity sets. The pixel brush
   * delegates here. Pass null to clear. */
  brushValues(key: KpiKey, range: [number, number] | null): void {
    if (!this.diff?.product_deltas) return;
    if (range === null) {
      this.brushed = null;
      this.notifyCapacityFilter(null);
      this.redraw();
      return;
    }
    const [lo, hi] = range;
    const picked = new Set<string>();
    for (const [id, byKey] of Object.entries(this.diff.product_deltas)) {
      const value = byKey[key].value_b;
      if (!isSentinel(value) && value >= lo && value <= hi) picked.add(id);
    }
    this.brushed = picked;
    this.notifyCapacityFilter([...picked]);
    this.redraw();
  }

  private notifyCapacityFilter(ids: string[] | null): void {
    if (ids === null || !this.current || !this.dataset) {
      this.handlers.onCapacityFilter(null);
      return;
    }
    // Capacity sets at the factories that can produce the brushed products.
    const byId = new Map(this.dataset.products.map((p) => [p.id, p]));
    const factories = new Set<string>();
    for (const pid of ids) {
      for (const f of byId.get(pid)?.factories ?? []) factories.add(f);
    }
    const sets = this.dataset.capacity_sets
      .filter((cs) => factories.has(cs.factory))
      .map((cs) => cs.id);
    this.handlers.onCapacityFilter(sets);
  }

  private redraw(): void {
    const root = this.root;
    root.selectAll("*").remove();
    root.append("h2").text("product view");
    if (!this.diff?.product_deltas || !this.current) {
      root.append("p").attr("class", "hint").text("select two plans in the overview");
      return;
    }
    const deltas = this.diff.product_deltas;

    const controls = root.append("div").attr("class", "product-controls");
    controls
      .append("input")
      .attr("type", "search")
      .attr("placeholder", "search products")
      .on("input", (event: Event) => {
        this.searchText = (event.target as HTMLInputElement).value.trim();
        this.redraw();
      });
    for (const key of KPI_KEYS) {
      const extent = d3.extent(
        Object.values(deltas)
          .map((d) => d[key].delta)
          .filter((v): v is number => v !== null),
      );
      if (extent[0] === undefined) continue;
      const row = controls.append("label").attr("class", "slider-row");
      row.append("span").text(`${key} Δ ≥`);
      row
        .append("input")
        .attr("type", "range")
        .attr("class", `delta-slider delta-slider-${key}`)
        .attr("min", extent[0])
        .attr("max", extent[1])
        .attr("step", (extent[1]! - extent[0]!) / 100 || 0.01)
        .attr("value", extent[0])
        .on("input", (event: Event) => {
          const lo = Number((event.target as HTMLInputElement).value);
          this.deltaRanges[key] = [lo, null];
          this.redraw();
        });
    }

    this.renderParallelCoordinates(root, deltas);
    this.renderGlyphs(root, deltas);
  }

  private renderParallelCoordinates(
    root: d3.Selection<HTMLElement, unknown, null, undefined>,
    deltas: Record<string, Record<KpiKey, IndicatorDelta>>,
  ): void {
    const ids = this.searchText
      ? Object.keys(deltas).filter((id) => id.includes(this.searchText))
      : Object.keys(deltas);
    const width = KPI_KEYS.length * AXIS_GAP + 60;
    const svg = root
      .append("svg")
      .attr("class", "parallel-coordinates")
      .attr("width", width)
      .attr("height", TOP + AXIS_H + ABNORMAL_H + 28);

    const axisX = (i: number) => 50 + i * AXIS_GAP;
    const scales = new Map<KpiKey, d3.ScaleLinear<number, number>>();

    KPI_KEYS.forEach((key, i) => {
      const values = ids.map((id) => ({ id, value: deltas[id][key].value_b }));
      const { normal } = partitionAxis(values);
      const max = Math.max(1e-9, ...normal.map((v) => v.value));
      scales.set(key, d3.scaleLinear().domain([0, max]).range([TOP + AXIS_H, TOP]));

      const x = axisX(i);
      // the upper rectangle holds normal values, the lower one sentinels
      svg
        .append("rect")
        .attr("class", "axis-box normal-box")
        .attr("x", x - 9)
        .attr("y", TOP)
        .attr("width", 18)
        .attr("height", AXIS_H);
      svg
        .append("rect")
        .attr("class", "axis-box abnormal-box")
        .attr("x", x - 9)
        .attr("y", TOP + AXIS_H + 8)
        .attr("width", 18)
        .attr("height", ABNORMAL_H);
      svg
        .append("text")
        .attr("class", "axis-label")
        .attr("x", x)
        .attr("y", TOP - 8)
        .attr("fill", KPI_COLORS[key])
        .text(key);

      const brush = d3
        .brushY<unknown>()
        .extent([
          [x - 10, TOP],
          [x + 10, TOP + AXIS_H + 8 + ABNORMAL_H],
        ])
        .on("end", (event: d3.D3BrushEvent<unknown>) => {
          if (!event.selection) {
            this.brushValues(key, null);
            return;
          }
          const [y0, y1] = event.selection as [number, number];
          const scale = scales.get(key)!;
          // pixels back to values; the y scale is inverted
          this.brushValues(key, [scale.invert(y1), scale.invert(y0)]);
        });
      svg.append("g").attr("class", `axis-brush axis-brush-${key}`).call(brush);
    });

    const yFor = (key: KpiKey, id: string): number => {
      const value = deltas[id][key].value_b;
      if (isSentinel(value)) return TOP + AXIS_H + 8 + ABNORMAL_H / 2;
      return scales.get(key)!(value);
    };

    const visible = new Set(this.visibleProducts());
    for (const id of ids) {
      const highlighted = visible.has(id);
      for (let i = 0; i + 1 < KPI_KEYS.length; i++) {
        const a = KPI_KEYS[i];
        const b = KPI_KEYS[i + 1];
        svg
          .append("line")
          .attr("class", `pc-segment ${segmentClass(deltas[id][a])}${highlighted ? " highlighted" : " dimmed"}`)
          .attr("data-product", id)
          .attr("x1", axisX(i) + 9)
          .attr("y1", yFor(a, id))
          .attr("x2", axisX(i + 1) - 9)
          .attr("y2", yFor(b, id));
      }
      KPI_KEYS.forEach((key, i) => {
        if (deltas[id][key].was_sentinel_in_a) {
          const y = yFor(key, id);
          svg
            .append("path")
            .attr("class", "last-plan-sentinel")
            .attr("data-product", id)
            .attr("d", `M ${axisX(i) + 11} ${y - 3} l 6 3 l -6 3 Z`);
        }
      });
    }
    if (!ids.length) {
      svg.append("text").attr("x", 40).attr("y", 60).text("no products match");
    }
  }

  private renderGlyphs(
    root: d3.Selection<HTMLElement, unknown, null, undefined>,
    deltas: Record<string, Record<KpiKey, IndicatorDelta>>,
  ): void {
    const current = this.current!;
    const ids = this.visibleProducts().slice(0, 24);
    const box = root.append("div").attr("class", "glyph-grid");

    const norm: Record<KpiKey, { value: number; variance: number; delta: number }> = {
      delay_rate: { value: 1e-9, variance: 1e-9, delta: 1e-9 },
      production_cost: { value: 1e-9, variance: 1e-9, delta: 1e-9 },
      inventory_cost: { value: 1e-9, variance: 1e-9, delta: 1e-9 },
      smoothing_rate: { value: 1e-9, variance: 1e-9, delta: 1e-9 },
    };
    for (const pid of Object.keys(deltas)) {
      const summary = current.kpis.products[pid]?.summary;
      if (!summary) continue;
      for (const key of KPI_KEYS) {
        if (!isSentinel(summary[key].value)) {
          norm[key].value = Math.max(norm[key].value, summary[key].value);
        }
        if (!isSentinel(summary[key].variance)) {
          norm[key].variance = Math.max(norm[key].variance, summary[key].variance);
        }
        norm[key].delta = Math.max(norm[key].delta, Math.abs(deltas[pid][key].delta ?? 0));
      }
    }

    for (const pid of ids) {
      const summary = current.kpis.products[pid]?.summary;
      if (!summary) continue;
      const regions = productGlyph(deltas[pid], summary, norm);
      const cell = box
        .append("div")
        .attr("class", "product-glyph")
        .attr("data-product", pid)
        .on("click", () => this.handlers.onProductPicked(pid));
      const size = 76;
      const svg = cell.append("svg").attr("width", size).attr("height", size);
      const cx = size / 2;
      const cy = size / 2;
      regions.forEach((region, i) => {
        const start = -Math.PI / 2 + i * (Math.PI / 2);
        const sector = d3.arc()({
          innerRadius: 0,
          outerRadius: 6 + region.valueRadius * 18,
          startAngle: start,
          endAngle: start + Math.PI / 2,
        });
        svg
          .append("path")
          .attr("transform", `translate(${cx},${cy})`)
          .attr("d", sector ?? "")
          .attr("fill", region.gray ? "#bbb" : KPI_COLORS[region.key])
          .attr("class", "glyph-sector")
          .attr("data-kpi", region.key)
          .attr("data-value", shownValue(summary[region.key].value));
        const variance = d3.arc()({
          innerRadius: 26,
          outerRadius: 28,
          startAngle: start,
          endAngle: start + region.varianceAngle,
        });
        svg
          .append("path")
          .attr("transform", `translate(${cx},${cy})`)
          .attr("d", variance ?? "")
          .attr("fill", region.gray ? "#bbb" : KPI_COLORS[region.key])
          .attr("class", "glyph-variance");
        // outer arc: clockwise filled = increase, counter-clockwise
        // bordered = decrease
        const mid = start + Math.PI / 4;
        const deltaArc = d3.arc()({
          innerRadius: 31,
          outerRadius: 34,
          startAngle: region.deltaClockwise ? mid : mid - region.deltaAngle,
          endAngle: region.deltaClockwise ? mid + region.deltaAngle : mid,
        });
        svg
          .append("path")
          .attr("transform", `translate(${cx},${cy})`)
          .attr("d", deltaArc ?? "")
          .attr("class", `glyph-delta ${region.deltaClockwise ? "increase" : "decrease"}`)
          .attr("fill", region.deltaClockwise ? KPI_COLORS[region.key] : "none")
          .attr("stroke", region.deltaClockwise ? "none" : "#222");
        if (region.grayTriangle) {
          const tx = cx + Math.cos(mid - Math.PI / 2) * 36;
          const ty = cy + Math.sin(mid - Math.PI / 2) * 36;
          svg
            .append("path")
            .attr("class", "glyph-sentinel-triangle")
            .attr("d", `M ${tx - 3} ${ty + 3} L ${tx + 3} ${ty + 3} L ${tx} ${ty - 3} Z`);
        }
      });
      cell.append("span").attr("class", "glyph-name").text(pid);
    }
  }
}
