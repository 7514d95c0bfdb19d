/** Production detail view: the dependency tree laid out depth-first with
 * two-row heatmaps (remaining inventory / delayed orders), the four daily
 * indicator bar rows with last-plan borders, and per-factory production
 * with capacity-use bars and utilization lines (black = last plan, blue =
 * current). Nodes fold/unfold on click; clicking a heatmap re-slices. */

import * as d3 from "d3";
import type { DetailSlice } from "../api";
import { KPI_KEYS } from "../api";
import { KPI_COLORS, barWithBorder, heatShade, isSentinel, shownValue } from "../encode";

export interface DetailViewHandlers {
  onNodePicked: (productId: string) => void;
}

const CELL = 9;
const ROW_H = 13;
const TREE_X = 150;

export class DetailView {
  private root: d3.Selection<HTMLElement, unknown, null, undefined>;
  private folded = new Set<string>();
  private slice: DetailSlice | null = null;

  constructor(
    container: HTMLElement,
    private handlers: DetailViewHandlers,
  ) {
    this.root = d3.select(container);
  }

  render(slice: DetailSlice): void {
    this.slice = slice;
    this.redraw();
  }

  private redraw(): void {
    const root = this.root;
    root.selectAll("*").remove();
    root.append("h2").text("production detail");
    const slice = this.slice;
    if (!slice) {
      root.append("p").attr("class", "hint").text("pick a product in the product view");
      return;
    }
    root.append("p").attr("class", "detail-title").text(`dependency and production of ${slice.product}`);
    const row = root.append("div").attr("class", "detail-columns");
    this.renderTree(row.append("div").attr("class", "detail-tree"), slice);
    const right = row.append("div").attr("class", "detail-right");
    this.renderIndicators(right, slice);
    this.renderFactories(right, slice);
  }

  /** Depth-first order: parents first, then the product, then its subtree;
   * children below a folded node are hidden. */
  private visibleNodes(slice: DetailSlice) {
    const nodes = [...slice.subtree].sort((a, b) => a.depth - b.depth || a.id.localeCompare(b.id));
    const parents = nodes.filter((n) => n.relation === "parent");
    const self = nodes.filter((n) => n.relation === "self");
    const children = nodes.filter((n) => n.relation === "child");
    const ordered = [...parents, ...self];
    const maxShownDepth = this.folded.has(slice.product) ? 0 : Infinity;
    for (const child of children) {
      if (child.depth <= maxShownDepth) ordered.push(child);
    }
    return ordered;
  }

  private renderTree(
    box: d3.Selection<HTMLDivElement, unknown, null, undefined>,
    slice: DetailSlice,
  ): void {
    const nodes = this.visibleNodes(slice);
    const horizon = slice.horizon;
    const rowHeight = 2 * ROW_H + 12;
    const svg = box
      .append("svg")
      .attr("class", "tree-svg")
      .attr("width", TREE_X + horizon * CELL + 16)
      .attr("height", nodes.length * rowHeight + 16);

    nodes.forEach((node, index) => {
      const y = 8 + index * rowHeight;
      const label = svg
        .append("text")
        .attr("class", `tree-node relation-${node.relation}${this.folded.has(node.id) ? " folded" : ""}`)
        .attr("x", 8 + Math.max(0, node.depth + 1) * 14)
        .attr("y", y + ROW_H)
        .attr("data-node", node.id)
        .text(node.id)
        .on("click", () => {
          if (this.folded.has(node.id)) this.folded.delete(node.id);
          else this.folded.add(node.id);
          this.redraw();
        });
      label.append("title").text(`${node.relation}, quantity per root: ${node.quantity_per_root}`);

      // two aligned heatmap rows: remaining inventory above, delayed
      // orders below; clicking loads that node's detail
      const invMax = Math.max(1e-9, ...node.inventory.b, ...node.inventory.a);
      const blMax = Math.max(1e-9, ...node.backlog.b, ...node.backlog.a);
      const group = svg
        .append("g")
        .attr("class", "node-heatmap")
        .attr("data-node", node.id)
        .on("click", () => this.handlers.onNodePicked(node.id));
      for (let t = 0; t < horizon; t++) {
        group
          .append("rect")
          .attr("class", "heat-inventory")
          .attr("x", TREE_X + t * CELL)
          .attr("y", y)
          .attr("width", CELL - 1)
          .attr("height", ROW_H - 1)
          .attr("fill", d3.interpolateGreens(0.12 + 0.8 * heatShade(node.inventory.b[t], invMax)))
          .attr("data-value", shownValue(node.inventory.b[t]));
        group
          .append("rect")
          .attr("class", "heat-backlog")
          .attr("x", TREE_X + t * CELL)
          .attr("y", y + ROW_H)
          .attr("width", CELL - 1)
          .attr("height", ROW_H - 1)
          .attr("fill", d3.interpolateReds(0.08 + 0.85 * heatShade(node.backlog.b[t], blMax)))
          .attr("data-value", shownValue(node.backlog.b[t]));
      }
    });
  }

  private renderIndicators(
    box: d3.Selection<HTMLDivElement, unknown, null, undefined>,
    slice: DetailSlice,
  ): void {
    const section = box.append("div").attr("class", "daily-indicators");
    section.append("h3").text("daily indicators (border = last plan)");
    for (const key of KPI_KEYS) {
      const current = slice.plans.b.indicators[key];
      const last = slice.plans.a.indicators[key];
      const axisMax = Math.max(
        1e-9,
        ...current.filter((v) => !isSentinel(v)),
        ...last.filter((v) => !isSentinel(v)),
      );
      const svg = section
        .append("svg")
        .attr("class", `indicator-row indicator-${key}`)
        .attr("width", 60 + current.length * CELL)
        .attr("height", 44);
      svg.append("text").attr("x", 0).attr("y", 24).attr("class", "row-label").text(key.slice(0, 9));
      // dashed zero line
      svg
        .append("line")
        .attr("class", "zero-line")
        .attr("x1", 58)
        .attr("x2", 60 + current.length * CELL)
        .attr("y1", 38)
        .attr("y2", 38);
      current.forEach((value, t) => {
        const mark = barWithBorder(value, last[t] ?? value, axisMax);
        const x = 60 + t * CELL;
        svg
          .append("rect")
          .attr("class", `daily-bar${mark.gray ? " sentinel" : ""}`)
          .attr("x", x)
          .attr("y", 38 - mark.barHeight * 30)
          .attr("width", CELL - 2)
          .attr("height", Math.max(0.5, mark.barHeight * 30))
          .attr("fill", mark.gray ? "#b9b9b9" : KPI_COLORS[key])
          .attr("data-kpi", key)
          .attr("data-day", t)
          .attr("data-value", shownValue(value));
        svg
          .append("rect")
          .attr("class", `last-plan-border${mark.borderInside ? " inside" : " outside"}`)
          .attr("x", x)
          .attr("y", 38 - mark.borderHeight * 30)
          .attr("width", CELL - 2)
          .attr("height", Math.max(0.5, mark.borderHeight * 30))
          .attr("data-value", shownValue(last[t] ?? null));
      });
    }
  }

  private renderFactories(
    box: d3.Selection<HTMLDivElement, unknown, null, undefined>,
    slice: DetailSlice,
  ): void {
    const section = box.append("div").attr("class", "factory-production");
    section.append("h3").text("daily production per factory (down) and capacity use (up)");
    const factories = Object.keys(slice.plans.b.production).sort();
    const capacity = slice.plans.b.capacity;
    const capacityLast = slice.plans.a.capacity;
    const totals = new Map(
      factories.map((f) => [f, slice.plans.b.production[f].reduce((s, v) => s + v, 0)]),
    );
    const maxTotal = Math.max(1, ...totals.values());

    for (const factory of factories) {
      const series = slice.plans.b.production[factory];
      const lastSeries = slice.plans.a.production[factory] ?? series.map(() => 0);
      const block = section.append("div").attr("class", "factory-block");
      // curve width encodes the factory's share of total output
      block
        .append("div")
        .attr("class", "factory-curve")
        .style("height", `${3 + (9 * (totals.get(factory) ?? 0)) / maxTotal}px`);
      block.append("span").attr("class", "factory-name").text(factory);
      const width = 40 + series.length * CELL;
      const svg = block.append("svg").attr("width", width).attr("height", 86);
      const mid = 52;
      const prodMax = Math.max(1, ...series, ...lastSeries);

      const csIds = Object.keys(capacity).sort();
      const useSeries = csIds.length ? capacity[csIds[0]].use : series.map(() => 0);
      const utilization = csIds.length ? capacity[csIds[0]].utilization : [];
      const utilizationLast = csIds.length && capacityLast[csIds[0]] ? capacityLast[csIds[0]].utilization : [];
      const useMax = Math.max(1, ...useSeries);

      series.forEach((value, t) => {
        const x = 36 + t * CELL;
        const infinite = isSentinel(utilization[t] ?? 0) && (utilization[t] ?? 0) === -2;
        // upward bars: capacity use (gray when the capacity is INFINITE)
        svg
          .append("rect")
          .attr("class", `use-bar${infinite ? " infinite" : ""}`)
          .attr("x", x)
          .attr("y", mid - ((useSeries[t] ?? 0) / useMax) * 26)
          .attr("width", CELL - 2)
          .attr("height", ((useSeries[t] ?? 0) / useMax) * 26)
          .attr("fill", infinite ? "#b9b9b9" : "#e3b04b")
          .attr("data-value", shownValue(useSeries[t] ?? null));
        // downward bars: production output of this product
        const mark = barWithBorder(value, lastSeries[t] ?? 0, prodMax);
        svg
          .append("rect")
          .attr("class", "production-bar")
          .attr("x", x)
          .attr("y", mid + 2)
          .attr("width", CELL - 2)
          .attr("height", mark.barHeight * 26)
          .attr("fill", "#1f77b4")
          .attr("data-day", t)
          .attr("data-value", shownValue(value));
        svg
          .append("rect")
          .attr("class", "production-border")
          .attr("x", x)
          .attr("y", mid + 2)
          .attr("width", CELL - 2)
          .attr("height", mark.borderHeight * 26);
      });

      // capacity utilization lines above the bars: black = last plan,
      // blue = current plan
      const utilLine = (values: number[], cls: string) => {
        const pts = values
          .map((u, t) => ({ t, u }))
          .filter((p) => !isSentinel(p.u));
        if (!pts.length) return;
        const line = d3
          .line<{ t: number; u: number }>()
          .x((p) => 36 + p.t * CELL + CELL / 2)
          .y((p) => 22 - Math.min(1.2, p.u) * 16);
        svg.append("path").attr("class", cls).attr("d", line(pts) ?? "");
      };
      utilLine(utilizationLast, "utilization-line last-plan");
      utilLine(utilization, "utilization-line current-plan");
    }
  }
}
