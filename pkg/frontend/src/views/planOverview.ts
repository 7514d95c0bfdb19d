/** Plan overview: timeline of plan glyphs (KPI bars over config circles)
 * joined by links whose triangles/lines encode config and KPI changes.
 * Clicking glyphs selects the (last, current) pair; hovering reveals the
 * delete control. An extra bottom link appears when the selected pair is
 * not consecutive. */

import * as d3 from "d3";
import type { KpiKey, PlanDiffPayload, PlanSummary } from "../api";
import { KPI_KEYS } from "../api";
import {
  KPI_COLORS,
  configCircles,
  configTriangle,
  glyphBars,
  kpiLink,
  maxTotals,
  shownValue,
} from "../encode";
import type { SelectionState } from "../state";

export interface PlanOverviewHandlers {
  onSelectPair: (a: string, b: string) => void;
  onDelete: (id: string) => void;
}

const GLYPH_W = 74;
const GLYPH_H = 96;
const LINK_W = 54;

export class PlanOverview {
  private root: d3.Selection<HTMLElement, unknown, null, undefined>;

  constructor(
    container: HTMLElement,
    private selection: SelectionState,
    private handlers: PlanOverviewHandlers,
  ) {
    this.root = d3.select(container);
  }

  render(plans: PlanSummary[], linkDiffs: Map<string, PlanDiffPayload>): void {
    const root = this.root;
    root.selectAll("*").remove();
    root.append("h2").text("plan overview");
    if (!plans.length) {
      root.append("p").attr("class", "hint").text("run the planner to record a first plan");
      return;
    }
    const width = plans.length * (GLYPH_W + LINK_W) + 40;
    const svg = root
      .append("svg")
      .attr("class", "overview-svg")
      .attr("width", width)
      .attr("height", GLYPH_H + 70);
    const maxima = maxTotals(plans);

    plans.forEach((plan, index) => {
      const x0 = 16 + index * (GLYPH_W + LINK_W);
      const group = svg
        .append("g")
        .attr("class", `plan-glyph${this.selection.isSelected(plan.id) ? " selected" : ""}`)
        .attr("transform", `translate(${x0}, 12)`)
        .attr("data-plan-id", plan.id)
        .on("click", () => {
          this.selection.select(plan.id);
          const pair = this.selection.pair;
          if (pair) this.handlers.onSelectPair(pair[0], pair[1]);
          this.render(plans, linkDiffs);
        });
      group
        .append("rect")
        .attr("class", "glyph-frame")
        .attr("width", GLYPH_W)
        .attr("height", GLYPH_H);

      const bars = glyphBars(plan.kpi_totals, maxima);
      const barW = GLYPH_W / bars.length - 6;
      bars.forEach((bar, i) => {
        const bx = 4 + i * (barW + 6);
        // gray backdrop marks the maximum across all recorded plans
        svgRect(group, bx, 6, barW, 44, "bar-backdrop");
        group
          .append("rect")
          .attr("class", `kpi-bar${bar.sentinel ? " sentinel" : ""}`)
          .attr("x", bx)
          .attr("y", 6 + 44 * (1 - bar.height))
          .attr("width", barW)
          .attr("height", 44 * bar.height)
          .attr("fill", bar.sentinel ? "#999" : KPI_COLORS[bar.key])
          .attr("data-kpi", bar.key)
          .attr("data-value", shownValue(plan.kpi_totals[bar.key]));
      });

      // separator avoids implying a column-wise relationship
      group
        .append("line")
        .attr("class", "glyph-separator")
        .attr("x1", 2)
        .attr("x2", GLYPH_W - 2)
        .attr("y1", 56)
        .attr("y2", 56);

      configCircles(plan, plans).forEach((circle, i) => {
        group
          .append("circle")
          .attr("class", `config-circle${circle.infinite ? " infinite-capacity" : ""}`)
          .attr("cx", 10 + i * ((GLYPH_W - 20) / 3))
          .attr("cy", 74)
          .attr("r", 2 + circle.radius * 6)
          .attr("data-category", circle.category);
      });

      group
        .append("text")
        .attr("class", "glyph-label")
        .attr("x", GLYPH_W / 2)
        .attr("y", GLYPH_H - 4)
        .text(plan.label || plan.id.slice(0, 6));

      group
        .append("text")
        .attr("class", "delete-plan")
        .attr("x", GLYPH_W - 8)
        .attr("y", 4)
        .text("×")
        .on("click", (event: Event) => {
          event.stopPropagation();
          this.handlers.onDelete(plan.id);
        });

      if (index + 1 < plans.length) {
        const diff = linkDiffs.get(`${plan.id}:${plans[index + 1].id}`);
        if (diff) {
          this.drawLink(svg, x0 + GLYPH_W, 12, diff);
        }
      }
    });

    // An additional link at the bottom when the selected pair is not
    // consecutive in the timeline.
    const pair = this.selection.pair;
    if (pair) {
      const ia = plans.findIndex((p) => p.id === pair[0]);
      const ib = plans.findIndex((p) => p.id === pair[1]);
      if (ia >= 0 && ib >= 0 && Math.abs(ia - ib) > 1) {
        const diff = linkDiffs.get(`${pair[0]}:${pair[1]}`);
        const lo = Math.min(ia, ib);
        const hi = Math.max(ia, ib);
        const y = GLYPH_H + 26;
        const xa = 16 + lo * (GLYPH_W + LINK_W) + GLYPH_W / 2;
        const xb = 16 + hi * (GLYPH_W + LINK_W) + GLYPH_W / 2;
        svg
          .append("path")
          .attr("class", "pair-link")
          .attr("d", `M ${xa} ${y} C ${xa} ${y + 24}, ${xb} ${y + 24}, ${xb} ${y}`);
        if (diff) this.drawLink(svg, (xa + xb) / 2 - LINK_W / 2, y + 8, diff);
      }
    }
  }

  private drawLink(
    svg: d3.Selection<SVGSVGElement, unknown, null, undefined>,
    x0: number,
    y0: number,
    diff: PlanDiffPayload,
  ): void {
    const group = svg.append("g").attr("class", "plan-link").attr("transform", `translate(${x0}, ${y0})`);
    const categories = ["demand", "inventory", "capacity", "holidays"] as const;
    const scaleMax = Math.max(1e-9, ...categories.map((c) => diff.config_delta[c].l1));
    categories.forEach((category, i) => {
      const mark = configTriangle(diff.config_delta[category], scaleMax);
      const cx = 6 + i * 12;
      const size = 3 + mark.size * 5;
      const up = mark.direction !== "down";
      const path = up
        ? `M ${cx - size} 18 L ${cx + size} 18 L ${cx} ${18 - 2 * size} Z`
        : `M ${cx - size} ${18 - 2 * size} L ${cx + size} ${18 - 2 * size} L ${cx} 18 Z`;
      group
        .append("path")
        .attr(
          "class",
          `link-triangle ${mark.dashed ? "dashed" : ""} ${mark.categorical ? "categorical" : ""}`,
        )
        .attr("data-category", category)
        .attr("data-dashed", String(mark.dashed))
        .attr("d", path);
    });
    const kpiScale = Math.max(
      1e-9,
      ...KPI_KEYS.map((k) => Math.abs(diff.kpi_delta[k].delta ?? 0)),
    );
    KPI_KEYS.forEach((key: KpiKey, i) => {
      const mark = kpiLink(diff.kpi_delta[key], kpiScale);
      group
        .append("line")
        .attr("class", "link-kpi")
        .attr("x1", 2)
        .attr("x2", LINK_W - 6)
        .attr("y1", 30 + i * 7)
        .attr("y2", 30 + i * 7)
        .attr("stroke", mark.increased ? "#8a8a8a" : KPI_COLORS[key])
        .attr("stroke-width", 0.6 + mark.width * 4)
        .attr("data-kpi", key)
        .attr("data-delta", shownValue(diff.kpi_delta[key].delta));
    });
  }
}

function svgRect(
  group: d3.Selection<SVGGElement, unknown, null, undefined>,
  x: number,
  y: number,
  w: number,
  h: number,
  cls: string,
): void {
  group.append("rect").attr("class", cls).attr("x", x).attr("y", y).attr("width", w).attr("height", h);
}
