/** Typed client for the planning service (docs/api.md). */

export interface DatasetSummary {
  counts: Record<string, number>;
  products: { id: string; name: string; kind: string; priority: number; factories: string[] }[];
  factories: { id: string; name: string }[];
  capacity_sets: { id: string; factory: string }[];
  fixed_component_constraints: { component: string; allowed_parents: string[] }[];
  default_config: PlanConfig;
}

export interface PlanConfig {
  horizon: number;
  start_date: string;
  demand: Record<string, number[]>;
  initial_inventory: Record<string, number>;
  capacity_sets: { id: string; factory: string; daily_capacity: (number | null)[] }[];
  holidays: Record<string, number[]>;
  objective_weights: number[];
}

export type KpiKey = "delay_rate" | "production_cost" | "inventory_cost" | "smoothing_rate";
export const KPI_KEYS: KpiKey[] = [
  "delay_rate",
  "production_cost",
  "inventory_cost",
  "smoothing_rate",
];

export interface PlanSummary {
  id: string;
  parent_id: string | null;
  label: string;
  created_at: string;
  dangling_parent?: boolean;
  config_magnitudes: {
    demand_total: number;
    initial_inventory_total: number;
    capacity_total: number;
    capacity_has_infinite: boolean;
    holiday_count: number;
  };
  kpi_totals: Record<KpiKey, number>;
}

export interface IndicatorSummary {
  value: number;
  mean: number;
  variance: number;
}

export interface PlanDocument {
  id: string;
  parent_id: string | null;
  label: string;
  config: PlanConfig;
  production: Record<string, Record<string, number[]>>;
  inventory: Record<string, number[]>;
  backlog: Record<string, number[]>;
  kpis: {
    products: Record<
      string,
      {
        delay_rate: number[];
        production_cost: number[];
        inventory_cost: number[];
        smoothing_rate: number[];
        summary: Record<KpiKey, IndicatorSummary>;
      }
    >;
    capacity_daily_use: Record<string, number[]>;
    capacity_utilization: Record<string, number[]>;
    totals: Record<KpiKey, number>;
  };
}

export interface CategoryDelta {
  l1: number;
  net: number;
  unchanged: boolean;
  infinite_transitions: number;
}

export interface IndicatorDelta {
  delta: number | null;
  value_a: number;
  value_b: number;
  was_sentinel_in_a: boolean;
  is_sentinel_in_b: boolean;
}

export interface PlanDiffPayload {
  plan_a: string;
  plan_b: string;
  config_delta: Record<"demand" | "inventory" | "capacity" | "holidays", CategoryDelta>;
  kpi_delta: Record<KpiKey, IndicatorDelta>;
  product_deltas?: Record<string, Record<KpiKey, IndicatorDelta>>;
  detail_slice?: DetailSlice;
}

export interface DetailSlice {
  product: string;
  horizon: number;
  subtree: {
    id: string;
    relation: "parent" | "self" | "child";
    depth: number;
    quantity_per_root: number | null;
    inventory: { a: number[]; b: number[] };
    backlog: { a: number[]; b: number[] };
  }[];
  plans: Record<
    "a" | "b",
    {
      indicators: Record<KpiKey, number[]>;
      production: Record<string, number[]>;
      capacity: Record<string, { use: number[]; utilization: number[] }>;
    }
  >;
}

export type ConfigEdit =
  | { kind: "set_demand_point"; product: string; day: number; value: number }
  | { kind: "set_initial_inventory"; product: string; value: number }
  | { kind: "set_capacity_point"; capacity_set: string; day: number; value: number | null }
  | { kind: "scale_capacity"; capacity_set: string; percent: number; day_range?: [number, number] }
  | { kind: "toggle_holiday"; factory: string; day: number }
  | { kind: "remove_fixed_constraint"; component: string };

export class ApiError extends Error {
  constructor(
    public status: number,
    detail: string,
  ) {
    super(detail);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  if (!response.ok) {
    let detail = response.statusText;
    try {
      detail = (await response.json()).detail ?? detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class PlanningApi {
  constructor(private base: string = "") {}

  dataset(): Promise<DatasetSummary> {
    return request(`${this.base}/api/dataset`);
  }

  plans(): Promise<PlanSummary[]> {
    return request(`${this.base}/api/plans`);
  }

  plan(id: string): Promise<PlanDocument> {
    return request(`${this.base}/api/plans/${id}`);
  }

  createPlan(body: {
    base_plan_id?: string;
    label?: string;
    config_edits: ConfigEdit[];
  }): Promise<PlanSummary> {
    return request(`${this.base}/api/plans`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  deletePlan(id: string): Promise<{ deleted: string }> {
    return request(`${this.base}/api/plans/${id}`, { method: "DELETE" });
  }

  diff(
    a: string,
    b: string,
    level: "plan" | "product" | "detail",
    product?: string,
  ): Promise<PlanDiffPayload> {
    const params = new URLSearchParams({ level });
    if (product) params.set("product", product);
    return request(`${this.base}/api/diff/${a}/${b}?${params}`);
  }
}
