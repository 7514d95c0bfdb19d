"""Multi-factory production planning: hybrid LP + heuristic solver, KPIs,
plan diffing, persistence, and a what-if HTTP service."""

from .model import (
    BomEdge,
    CapacitySet,
    CapacityUsageRate,
    Dataset,
    Factory,
    FixedComponentConstraint,
    INFINITE,
    KpiSet,
    Plan,
    PlanConfig,
    Product,
    ProductKind,
    Sentinel,
    ValidationReport,
    bom_closure,
    validate_config,
    validate_dataset,
)
from .dataset_io import dumps_dataset, load_dataset, loads_dataset, save_dataset
from .datagen import generate_dataset
from .diffing import PlanDiff, detail_slice, diff_plans, product_filter
from .indicators import IndicatorConfig, compute_kpis, cost_series, delay_rate, smoothing_rate
from .planner import (
    HybridParams,
    InfeasibleConfigError,
    PlanningError,
    SimulationError,
    build_problem,
    objective_value,
    plan,
    simulate,
    solve_hybrid,
)
from .serialize import dumps_plan, loads_plan, plan_summary
from .simplex import LinearProgram, LpSolution, SimplexConfig, solve_lp
from .store import PlanStore

__all__ = [
    "BomEdge",
    "CapacitySet",
    "CapacityUsageRate",
    "Dataset",
    "Factory",
    "FixedComponentConstraint",
    "INFINITE",
    "IndicatorConfig",
    "HybridParams",
    "InfeasibleConfigError",
    "KpiSet",
    "LinearProgram",
    "LpSolution",
    "Plan",
    "PlanConfig",
    "PlanDiff",
    "PlanStore",
    "PlanningError",
    "Product",
    "ProductKind",
    "Sentinel",
    "SimplexConfig",
    "SimulationError",
    "ValidationReport",
    "bom_closure",
    "build_problem",
    "compute_kpis",
    "cost_series",
    "delay_rate",
    "detail_slice",
    "diff_plans",
    "dumps_dataset",
    "dumps_plan",
    "generate_dataset",
    "load_dataset",
    "loads_dataset",
    "loads_plan",
    "objective_value",
    "plan",
    "plan_summary",
    "product_filter",
    "save_dataset",
    "simulate",
    "smoothing_rate",
    "solve_hybrid",
    "solve_lp",
    "validate_config",
    "validate_dataset",
]

__version__ = "0.1.0"
