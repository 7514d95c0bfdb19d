"""Headless command line: run plans, diff, validate, generate data, serve.

Exit codes: 0 ok, 1 I/O error, 2 validation failure, 3 solve failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dataset_io import (
    DatasetFormatError,
    canonical_dumps,
    config_from_dict,
    dumps_dataset,
    load_dataset,
)
from .datagen import (
    DEFAULT_DEPTH,
    DEFAULT_FACTORIES,
    DEFAULT_HORIZON,
    DEFAULT_PRODUCTS,
    generate_dataset,
)
from .diffing import diff_plans, diff_to_dict, detail_slice
from .model import INDICATORS, validate_dataset
from .planner import HybridParams, InfeasibleConfigError, PlanningError, plan
from .serialize import dumps_plan, loads_plan
from .store import default_store_path

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_SOLVE = 3


def _write_output(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _load_dataset_or_die(path: str):
    try:
        dataset = load_dataset(path)
    except OSError as exc:
        print(f"cannot read dataset: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)
    except DatasetFormatError as exc:
        print(f"malformed dataset: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)
    report = validate_dataset(dataset)
    if not report.ok:
        print(str(report), file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)
    return dataset


def cmd_validate(args) -> int:
    try:
        dataset = load_dataset(args.dataset)
    except OSError as exc:
        print(f"cannot read dataset: {exc}", file=sys.stderr)
        return EXIT_IO
    except DatasetFormatError as exc:
        print(f"malformed dataset: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    report = validate_dataset(dataset)
    print(str(report))
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_run(args) -> int:
    dataset = _load_dataset_or_die(args.dataset)
    config = dataset.default_config
    if args.config:
        try:
            config = config_from_dict(json.loads(Path(args.config).read_text(encoding="utf-8")))
        except OSError as exc:
            print(f"cannot read config: {exc}", file=sys.stderr)
            return EXIT_IO
        except (DatasetFormatError, json.JSONDecodeError) as exc:
            print(f"malformed config: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
    try:
        result = plan(dataset, config, HybridParams(), label=args.label)
    except InfeasibleConfigError as exc:
        print(f"infeasible config: {exc}", file=sys.stderr)
        return EXIT_SOLVE
    except (PlanningError, ValueError) as exc:
        print(f"solve failed: {exc}", file=sys.stderr)
        return EXIT_SOLVE
    _write_output(dumps_plan(result), args.out)
    return EXIT_OK


def cmd_diff(args) -> int:
    try:
        plan_a = loads_plan(Path(args.plan_a).read_text(encoding="utf-8"))
        plan_b = loads_plan(Path(args.plan_b).read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"cannot read plan: {exc}", file=sys.stderr)
        return EXIT_IO
    except (KeyError, ValueError) as exc:
        print(f"malformed plan file: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    dataset = _load_dataset_or_die(args.dataset) if args.dataset else None
    try:
        diff = diff_plans(plan_a, plan_b, dataset)
    except ValueError as exc:
        print(f"cannot diff: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    payload = diff_to_dict(diff, level=args.level)
    if args.level == "detail" and args.product:
        if dataset is None:
            print("detail with --product requires --dataset", file=sys.stderr)
            return EXIT_VALIDATION
        payload["detail_slice"] = detail_slice(dataset, plan_a, plan_b, args.product)
    if args.format == "table":
        _write_output(_diff_table(payload), args.out)
    else:
        _write_output(canonical_dumps(payload), args.out)
    return EXIT_OK


def _diff_table(payload: dict) -> str:
    lines = [f"plan {payload['plan_a']}  vs  {payload['plan_b']}", ""]
    lines.append(f"{'config':<12} {'|change|':>12} {'net':>12} unchanged")
    for cat, d in payload["config_delta"].items():
        lines.append(
            f"{cat:<12} {d['l1']:>12.2f} {d['net']:>12.2f} {str(d['unchanged']).lower()}"
        )
    lines.append("")
    lines.append(f"{'kpi':<18} {'A':>14} {'B':>14} {'delta':>14}")
    for key in INDICATORS:
        d = payload["kpi_delta"][key]
        delta = "-" if d["delta"] is None else f"{d['delta']:.4f}"
        lines.append(f"{key:<18} {d['value_a']:>14.4f} {d['value_b']:>14.4f} {delta:>14}")
    return "\n".join(lines)


def cmd_gen(args) -> int:
    if min(args.products, args.factories, args.depth, args.horizon) < 1:
        print("sizes must be >= 1", file=sys.stderr)
        return EXIT_VALIDATION
    dataset = generate_dataset(
        products=args.products,
        factories=args.factories,
        depth=args.depth,
        horizon=args.horizon,
        seed=args.seed,
    )
    report = validate_dataset(dataset)
    if not report.ok:
        print(f"generator produced an invalid dataset:\n{report}", file=sys.stderr)
        return EXIT_VALIDATION
    _write_output(dumps_dataset(dataset), args.out)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    from .store import PlanStore

    dataset = _load_dataset_or_die(args.dataset)
    store = PlanStore(args.store)
    app = create_app(
        dataset=dataset,
        store=store,
        max_concurrent_runs=args.max_concurrent_runs,
        run_timeout=args.run_timeout,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a dataset file")
    p.add_argument("dataset")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="solve a plan for a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--config", help="plan config JSON (defaults to the dataset's)")
    p.add_argument("--out", help="write the plan JSON here instead of stdout")
    p.add_argument("--label", default="")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("diff", help="diff two plan files")
    p.add_argument("plan_a")
    p.add_argument("plan_b")
    p.add_argument("--dataset", help="dataset file (needed for detail slices)")
    p.add_argument("--level", choices=["plan", "product", "detail"], default="plan")
    p.add_argument("--product", help="product id for --level detail")
    p.add_argument("--format", choices=["json", "table"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    p.add_argument("--products", type=int, default=DEFAULT_PRODUCTS)
    p.add_argument("--factories", type=int, default=DEFAULT_FACTORIES)
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("serve", help="serve the what-if HTTP API")
    p.add_argument("--dataset", required=True)
    p.add_argument("--store", default=str(default_store_path()))
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--max-concurrent-runs", type=int, default=2)
    p.add_argument("--run-timeout", type=float, default=120.0)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
