/** Control panel: editable demand/capacity charts, inventory bars, holiday
 * triangles, search boxes, and the Run button. Edits accumulate in the
 * EditBuffer and submit atomically on Run. */

import * as d3 from "d3";
import type { ConfigEdit, DatasetSummary, PlanConfig } from "../api";
import { EditBuffer } from "../state";
import { shownValue } from "../encode";

export interface ControlPanelHandlers {
  onRun: (edits: ConfigEdit[]) => void;
}

const CHART_W = 260;
const CHART_H = 64;
const MARGIN = { left: 30, right: 8, top: 6, bottom: 14 };

export class ControlPanel {
  readonly buffer = new EditBuffer();
  private root: d3.Selection<HTMLElement, unknown, null, undefined>;
  private config!: PlanConfig;
  private dataset!: DatasetSummary;
  private capacityFilter: Set<string> | null = null;
  private searchText = "";

  constructor(
    container: HTMLElement,
    private handlers: ControlPanelHandlers,
  ) {
    this.root = d3.select(container);
  }

  render(dataset: DatasetSummary, config: PlanConfig): void {
    this.dataset = dataset;
    this.config = config;
    this.redraw();
  }

  /** Linked filtering: the product view narrows the capacity sets shown. */
  filterCapacitySets(ids: string[] | null): void {
    this.capacityFilter = ids === null ? null : new Set(ids);
    if (this.config) this.redraw();
  }

  visibleCapacitySets(): string[] {
    let sets = this.config.capacity_sets.map((c) => c.id);
    if (this.capacityFilter) sets = sets.filter((id) => this.capacityFilter!.has(id));
    if (this.searchText) sets = sets.filter((id) => id.includes(this.searchText));
    return sets;
  }

  private redraw(): void {
    const root = this.root;
    root.selectAll("*").remove();
    root.append("h2").text("control panel");

    const search = root.append("div").attr("class", "search-row");
    search
      .append("input")
      .attr("type", "search")
      .attr("placeholder", "search orders / materials / capacity")
      .attr("value", this.searchText)
      .on("input", (event: Event) => {
        this.searchText = (event.target as HTMLInputElement).value.trim();
        this.redraw();
      });

    const runRow = root.append("div").attr("class", "run-row");
    runRow
      .append("button")
      .attr("class", "run-button")
      .text(`Run (${this.buffer.size} edits)`)
      .on("click", () => {
        this.handlers.onRun(this.buffer.pending);
        this.buffer.clear();
        this.redraw();
      });

    this.renderDemand(root);
    this.renderInventory(root);
    this.renderCapacity(root);
    this.renderHolidays(root);
  }

  private bump(edit: ConfigEdit): void {
    this.buffer.push(edit);
    this.root.select(".run-button").text(`Run (${this.buffer.size} edits)`);
  }

  private lineChart(
    parent: d3.Selection<HTMLDivElement, unknown, null, undefined>,
    label: string,
    series: (number | null)[],
    onDrag: (day: number, value: number) => void,
  ): void {
    const block = parent.append("div").attr("class", "chart-block");
    block.append("span").attr("class", "chart-label").text(label);
    const svg = block
      .append("svg")
      .attr("width", CHART_W)
      .attr("height", CHART_H)
      .attr("class", "series-chart");
    const finite = series.filter((v): v is number => v !== null);
    const yMax = Math.max(1, ...finite) * 1.2;
    const x = d3
      .scaleLinear()
      .domain([0, series.length - 1])
      .range([MARGIN.left, CHART_W - MARGIN.right]);
    const y = d3.scaleLinear().domain([0, yMax]).range([CHART_H - MARGIN.bottom, MARGIN.top]);

    const points = series.map((v, day) => ({ day, value: v }));
    const line = d3
      .line<{ day: number; value: number | null }>()
      .defined((p) => p.value !== null)
      .x((p) => x(p.day))
      .y((p) => y(p.value ?? 0));
    svg
      .append("path")
      .attr("class", "series-area")
      .attr(
        "d",
        d3
          .area<{ day: number; value: number | null }>()
          .defined((p) => p.value !== null)
          .x((p) => x(p.day))
          .y0(y(0))
          .y1((p) => y(p.value ?? 0))(points) ?? "",
      );
    svg.append("path").attr("class", "series-line").attr("d", line(points) ?? "");

    const drag = d3
      .drag<SVGCircleElement, { day: number; value: number | null }>()
      .on("drag", (event, p) => {
        const value = Math.max(0, Math.round(y.invert(event.y)));
        d3.select<SVGCircleElement, unknown>(event.sourceEvent.target).attr("cy", y(value));
        onDrag(p.day, value);
      });
    const handles = svg
      .selectAll<SVGCircleElement, { day: number; value: number | null }>("circle.handle")
      .data(points.filter((p) => p.value !== null))
      .join("circle")
      .attr("class", "handle")
      .attr("r", 2.5)
      .attr("cx", (p) => x(p.day))
      .attr("cy", (p) => y(p.value as number))
      .attr("data-value", (p) => shownValue(p.value));
    handles.call(drag);
    svg
      .selectAll("circle.infinite")
      .data(points.filter((p) => p.value === null))
      .join("circle")
      .attr("class", "infinite")
      .attr("r", 3)
      .attr("cx", (p) => x(p.day))
      .attr("cy", y(yMax / 1.2));
  }

  private renderDemand(root: d3.Selection<HTMLElement, unknown, null, undefined>): void {
    const div = root.append("div").attr("class", "panel-section demand-section");
    div.append("h3").text("order demand");
    let products = Object.keys(this.config.demand).sort();
    if (this.searchText) products = products.filter((p) => p.includes(this.searchText));
    for (const pid of products.slice(0, 8)) {
      this.lineChart(div as never, pid, this.config.demand[pid], (day, value) =>
        this.bump({ kind: "set_demand_point", product: pid, day, value }),
      );
    }
  }

  private renderInventory(root: d3.Selection<HTMLElement, unknown, null, undefined>): void {
    const div = root.append("div").attr("class", "panel-section inventory-section");
    div.append("h3").text("initial inventory (raw materials)");
    const raw = new Set(
      this.dataset.products.filter((p) => p.kind === "raw_material").map((p) => p.id),
    );
    let items = Object.entries(this.config.initial_inventory)
      .filter(([pid]) => raw.size === 0 || raw.has(pid))
      .sort();
    if (this.searchText) items = items.filter(([pid]) => pid.includes(this.searchText));
    const max = Math.max(1, ...items.map(([, v]) => v));
    const row = div
      .selectAll("div.bar-row")
      .data(items.slice(0, 10))
      .join("div")
      .attr("class", "bar-row");
    row.append("span").attr("class", "bar-label").text(([pid]) => pid);
    row
      .append("div")
      .attr("class", "bar draggable-bar")
      .style("width", ([, v]) => `${Math.round((v / max) * 140)}px`)
      .attr("data-value", ([, v]) => shownValue(v))
      .on("click", (_event, [pid, v]) => {
        const answer = window.prompt(`initial inventory for ${pid}`, String(v));
        if (answer === null) return;
        const value = Math.max(0, Math.round(Number(answer)));
        if (Number.isFinite(value)) {
          this.bump({ kind: "set_initial_inventory", product: pid, value });
        }
      });
    row.append("span").attr("class", "bar-value").text(([, v]) => shownValue(v));
  }

  private renderCapacity(root: d3.Selection<HTMLElement, unknown, null, undefined>): void {
    const div = root.append("div").attr("class", "panel-section capacity-section");
    div.append("h3").text("capacity sets");
    const visible = new Set(this.visibleCapacitySets());
    for (const cs of this.config.capacity_sets) {
      if (!visible.has(cs.id)) continue;
      this.lineChart(div as never, `${cs.id} @ ${cs.factory}`, cs.daily_capacity, (day, value) =>
        this.bump({ kind: "set_capacity_point", capacity_set: cs.id, day, value }),
      );
    }
  }

  private renderHolidays(root: d3.Selection<HTMLElement, unknown, null, undefined>): void {
    const div = root.append("div").attr("class", "panel-section holiday-section");
    div.append("h3").text("holidays");
    for (const factory of this.dataset.factories) {
      const current = new Set(this.config.holidays[factory.id] ?? []);
      const row = div.append("div").attr("class", "holiday-row");
      row.append("span").attr("class", "bar-label").text(factory.id);
      const svg = row.append("svg").attr("width", CHART_W).attr("height", 16);
      const days = d3.range(this.config.horizon);
      const x = d3
        .scaleLinear()
        .domain([0, this.config.horizon - 1])
        .range([8, CHART_W - 8]);
      svg
        .selectAll("path.holiday-triangle")
        .data(days)
        .join("path")
        .attr(
          "class",
          (d) => `holiday-triangle ${current.has(d) ? "holiday-on" : "holiday-off"}`,
        )
        .attr("d", (d) => {
          const cx = x(d);
          return `M ${cx - 4} 14 L ${cx + 4} 14 L ${cx} 4 Z`;
        })
        .on("click", (_event, d) => {
          this.bump({ kind: "toggle_holiday", factory: factory.id, day: d });
          const mark = d3.select(_event.target as SVGPathElement);
          mark.classed("holiday-on", !mark.classed("holiday-on"));
          mark.classed("holiday-off", !mark.classed("holiday-on"));
        });
    }
  }
}
