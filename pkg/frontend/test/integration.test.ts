/**
 * Live-service integration: spawns the planning service on the bundled
 * bottleneck fixture and drives the real views against it. Run with
 * `npm run test:integration` (requires the Python package on PATH).
 */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { App } from "../src/main";
import { PlanningApi } from "../src/api";

const PORT = 8753;
const BASE = `http://127.0.0.1:${PORT}`;
const FIXTURE = resolve(__dirname, "../../tests/fixtures/bottleneck.json");
const enabled = process.env.PLAN_INTEGRATION === "1";

let service: ChildProcess | null = null;
let storeDir = "";

async function waitForService(): Promise<void> {
  const deadline = Date.now() + 60_000;
  while (Date.now() < deadline) {
    try {
      const r = await fetch(`${BASE}/api/dataset`);
      if (r.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((resolve) => setTimeout(resolve, 300));
  }
  throw new Error("service did not come up");
}

describe.runIf(enabled)("four views against the live fixture service", () => {
  let app: App;
  let baseId: string;
  let editedId: string;

  beforeAll(async () => {
    storeDir = mkdtempSync(join(tmpdir(), "plan-store-"));
    service = spawn(
      "python3",
      ["-m", "prodplan.cli", "serve", "--dataset", FIXTURE, "--store", storeDir, "--port", String(PORT)],
      { stdio: "ignore" },
    );
    await waitForService();

    const api = new PlanningApi(BASE);
    baseId = (await api.createPlan({ config_edits: [], label: "baseline" })).id;
    editedId = (
      await api.createPlan({
        base_plan_id: baseId,
        label: "two holidays",
        config_edits: [
          { kind: "toggle_holiday", factory: "f1", day: 4 },
          { kind: "toggle_holiday", factory: "f1", day: 5 },
        ],
      })
    ).id;

    document.body.innerHTML = `
      <div id="app">
        <aside id="control-panel"></aside>
        <main>
          <section id="plan-overview"></section>
          <section id="product-view"></section>
          <section id="detail-view"></section>
        </main>
      </div>`;
    app = new App(document, BASE);
    await app.start();
    app.selection.select(baseId);
    app.selection.select(editedId);
    await app.showPair(baseId, editedId);
    await app.showDetail("router_b");
  }, 120_000);

  afterAll(() => {
    service?.kill();
    if (storeDir) rmSync(storeDir, { recursive: true, force: true });
  });

  it("renders all four views", () => {
    expect(document.querySelectorAll("#plan-overview .plan-glyph").length).toBe(2);
    expect(document.querySelectorAll("#control-panel .series-chart").length).toBeGreaterThan(0);
    expect(document.querySelectorAll("#product-view .pc-segment").length).toBeGreaterThan(0);
    expect(document.querySelectorAll("#detail-view .daily-bar").length).toBeGreaterThan(0);
    expect(document.querySelectorAll("#detail-view .node-heatmap").length).toBeGreaterThan(0);
  });

  it("shows dashed link triangles exactly for unchanged config categories", () => {
    const triangles = [...document.querySelectorAll("#plan-overview .link-triangle")];
    expect(triangles.length).toBeGreaterThanOrEqual(4);
    const byCategory = new Map(
      triangles.map((t) => [t.getAttribute("data-category"), t.getAttribute("data-dashed")]),
    );
    // only the holiday count changed between the two recorded plans
    expect(byCategory.get("holidays")).toBe("false");
    expect(byCategory.get("demand")).toBe("true");
    expect(byCategory.get("inventory")).toBe("true");
    expect(byCategory.get("capacity")).toBe("true");
  });

  it("brushing the delay axis filters glyphs and control-panel capacity sets", () => {
    const before = app.controlPanel.visibleCapacitySets();
    expect(before).toContain("f1_main");
    expect(before).toContain("f2_main");

    // router_a and router_b carry delay; switch_c (made at f2) has none.
    app.productView.brushValues("delay_rate", [0.0001, 1.0]);
    const glyphs = [...document.querySelectorAll("#product-view .product-glyph")].map((g) =>
      g.getAttribute("data-product"),
    );
    expect(glyphs.length).toBeGreaterThan(0);
    expect(glyphs).not.toContain("switch_c");
    const filtered = app.controlPanel.visibleCapacitySets();
    expect(filtered).toContain("f1_main");
    expect(filtered).not.toContain("f2_main");

    app.productView.brushValues("delay_rate", null);
    expect(app.controlPanel.visibleCapacitySets()).toContain("f2_main");
  });

  it("displays numbers byte-equal to the API payloads", async () => {
    const api = new PlanningApi(BASE);
    const plans = await api.plans();
    const shown = new Map(
      [...document.querySelectorAll("#plan-overview .kpi-bar")].map((bar) => [
        `${bar.closest(".plan-glyph")!.getAttribute("data-plan-id")}:${bar.getAttribute("data-kpi")}`,
        bar.getAttribute("data-value"),
      ]),
    );
    for (const plan of plans) {
      for (const [key, value] of Object.entries(plan.kpi_totals)) {
        expect(shown.get(`${plan.id}:${key}`)).toBe(JSON.stringify(value));
      }
    }

    const detail = await api.diff(baseId, editedId, "detail", "router_b");
    const slice = detail.detail_slice!;
    const bars = [...document.querySelectorAll("#detail-view .indicator-delay_rate .daily-bar")];
    expect(bars.length).toBe(slice.plans.b.indicators.delay_rate.length);
    bars.forEach((bar, t) => {
      expect(bar.getAttribute("data-value")).toBe(
        JSON.stringify(slice.plans.b.indicators.delay_rate[t]),
      );
    });
  });

  it("selection state machine holds exactly two plans", () => {
    expect(app.selection.pair).toEqual([baseId, editedId]);
    app.selection.select("third");
    expect(app.selection.pair).toEqual([editedId, "third"]);
    app.selection.select(baseId);
    expect(app.selection.pair).toEqual(["third", baseId]);
  });
});

describe.runIf(!enabled)("integration (skipped)", () => {
  it("set PLAN_INTEGRATION=1 to run against the live service", () => {
    expect(enabled).toBe(false);
  });
});
