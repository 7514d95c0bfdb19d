/** Wires the four views to the planning service. No planning logic lives
 * here: every displayed number comes from an API payload. */

import { PlanningApi, type ConfigEdit, type PlanDiffPayload, type PlanSummary } from "./api";
import { SelectionState } from "./state";
import { ControlPanel } from "./views/controlPanel";
import { PlanOverview } from "./views/planOverview";
import { ProductView } from "./views/productView";
import { DetailView } from "./views/detailView";

export class App {
  readonly api: PlanningApi;
  readonly selection = new SelectionState();
  readonly controlPanel: ControlPanel;
  readonly planOverview: PlanOverview;
  readonly productView: ProductView;
  readonly detailView: DetailView;
  private plans: PlanSummary[] = [];
  private running = false;

  constructor(doc: Document, baseUrl = "") {
    this.api = new PlanningApi(baseUrl);
    this.controlPanel = new ControlPanel(doc.querySelector("#control-panel")!, {
      onRun: (edits) => void this.runPlan(edits),
    });
    this.planOverview = new PlanOverview(doc.querySelector("#plan-overview")!, this.selection, {
      onSelectPair: (a, b) => void this.showPair(a, b),
      onDelete: (id) => void this.deletePlan(id),
    });
    this.productView = new ProductView(doc.querySelector("#product-view")!, {
      onProductPicked: (pid) => void this.showDetail(pid),
      onCapacityFilter: (sets) => this.controlPanel.filterCapacitySets(sets),
    });
    this.detailView = new DetailView(doc.querySelector("#detail-view")!, {
      onNodePicked: (pid) => void this.showDetail(pid),
    });
  }

  async start(): Promise<void> {
    const dataset = await this.api.dataset();
    this.controlPanel.render(dataset, dataset.default_config);
    await this.refreshOverview();
  }

  async refreshOverview(): Promise<void> {
    this.plans = await this.api.plans();
    const diffs = new Map<string, PlanDiffPayload>();
    for (let i = 0; i + 1 < this.plans.length; i++) {
      const a = this.plans[i].id;
      const b = this.plans[i + 1].id;
      diffs.set(`${a}:${b}`, await this.api.diff(a, b, "plan"));
    }
    const pair = this.selection.pair;
    if (pair) diffs.set(`${pair[0]}:${pair[1]}`, await this.api.diff(pair[0], pair[1], "plan"));
    this.planOverview.render(this.plans, diffs);
  }

  /** One in-flight plan run at a time, with a progress indicator. */
  async runPlan(edits: ConfigEdit[]): Promise<void> {
    if (this.running) return;
    this.running = true;
    document.body.classList.add("running");
    try {
      const base = this.plans.at(-1)?.id;
      await this.api.createPlan({ base_plan_id: base, config_edits: edits });
      await this.refreshOverview();
    } catch (error) {
      reportError(error);
    } finally {
      this.running = false;
      document.body.classList.remove("running");
    }
  }

  async deletePlan(id: string): Promise<void> {
    try {
      await this.api.deletePlan(id);
      this.selection.drop(id);
      await this.refreshOverview();
    } catch (error) {
      reportError(error);
    }
  }

  private lastPair: [string, string] | null = null;

  async showPair(a: string, b: string): Promise<void> {
    this.lastPair = [a, b];
    try {
      const [dataset, diff, current] = await Promise.all([
        this.api.dataset(),
        this.api.diff(a, b, "product"),
        this.api.plan(b),
      ]);
      this.productView.render(dataset, diff, current);
    } catch (error) {
      reportError(error);
    }
  }

  async showDetail(productId: string): Promise<void> {
    if (!this.lastPair) return;
    const [a, b] = this.lastPair;
    try {
      const payload = await this.api.diff(a, b, "detail", productId);
      if (payload.detail_slice) this.detailView.render(payload.detail_slice);
    } catch (error) {
      reportError(error);
    }
  }
}

function reportError(error: unknown): void {
  const box = document.querySelector("#error-box") ?? createErrorBox();
  box.textContent = error instanceof Error ? error.message : String(error);
}

function createErrorBox(): HTMLElement {
  const box = document.createElement("div");
  box.id = "error-box";
  document.body.appendChild(box);
  return box;
}

if (!import.meta.env?.VITEST) {
  const app = new App(document);
  void app.start();
}
