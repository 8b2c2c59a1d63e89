"""Command-line front end: single runs, seed sweeps, trace re-verification.

Exit codes: 0 all gated properties pass, 1 a property failed, 2 usage,
config, or scenario errors. Machine-readable error JSON goes to stdout on
exit 2 so callers can always parse the outcome.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import sys
from pathlib import Path

from .config import ConfigError, ExecutionConfig, ScenarioEnvelopeError
from .engine import run
from .events import TraceFormatError, read_trace
from .verify import (
    COMPARISON_COLUMNS,
    aggregate_rows,
    comparison_row,
    verify_trace,
)

SWEEP_FORMAT_VERSION = 1


def _error_json(kind: str, message: str) -> int:
    print(json.dumps({"error": {"kind": kind, "message": message}}, sort_keys=True))
    return 2


def _load_config(path: str) -> ExecutionConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return ExecutionConfig.from_json(raw)


def _apply_overrides(config: ExecutionConfig, args) -> ExecutionConfig:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.horizon is not None:
        overrides["horizon_rounds"] = args.horizon
    if getattr(args, "elector", None) is not None:
        overrides["elector"] = args.elector
    if overrides:
        config = config.with_overrides(**overrides)
        config.validate()
    return config


def _print_report(report, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report.to_json(), sort_keys=True))
        return
    for name, result in sorted(report.checks.items()):
        if result is None:
            print(f"{name}: SKIPPED (not applicable)")
        elif result.passed:
            print(f"{name}: PASS")
        else:
            print(f"{name}: FAIL at events {result.counterexamples} ({result.detail})")
    print(f"overall: {'PASS' if report.passed else 'FAIL'}")


def cmd_run(args) -> int:
    try:
        config = _apply_overrides(_load_config(args.config), args)
        trace = run(config)
    except (ConfigError, ScenarioEnvelopeError) as exc:
        return _error_json("config", str(exc))
    report = verify_trace(trace)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    trace.write(out_dir / "trace.jsonl")
    (out_dir / "report.json").write_text(
        json.dumps(report.to_json(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    _print_report(report, args.format)
    return 0 if report.passed else 1


def cmd_verify(args) -> int:
    try:
        trace = read_trace(args.trace)
    except (TraceFormatError, ConfigError, ScenarioEnvelopeError, OSError) as exc:
        return _error_json("trace", str(exc))
    report = verify_trace(trace)
    _print_report(report, args.format)
    return 0 if report.passed else 1


def _sweep_cell(payload: tuple) -> dict:
    label, config_json = payload
    config = ExecutionConfig.from_json(config_json)
    try:
        report = verify_trace(run(config))
    except Exception as exc:  # partial failures are marked, sweep continues
        return {"label": label, "elector": config.elector, "seed": config.seed,
                "passed": 0, "error": str(exc)}
    return comparison_row(label, config, report)


def _expand_grid(spec: dict) -> list[tuple[str, dict]]:
    base = spec.get("base_config")
    if base is None:
        raise ConfigError("sweep spec missing base_config")
    grid = spec.get("grid", {})
    electors = grid.get("elector") or [base.get("elector", "carousel")]
    faults = grid.get("faults") or [base.get("faults", {})]
    seeds = grid.get("seeds") or [base.get("seed", 0)]
    cells = []
    for elector in electors:
        for i, fault in enumerate(faults):
            fault_label = fault.get("label", f"faults{i}") if isinstance(fault, dict) else f"faults{i}"
            fault_obj = {k: v for k, v in fault.items() if k != "label"}
            for seed in seeds:
                cfg = dict(base)
                cfg["elector"] = elector
                cfg["faults"] = fault_obj
                cfg["seed"] = seed
                label = f"{elector}/{fault_label}"
                ExecutionConfig.from_json(cfg)  # validate eagerly: grid rows must be well-formed
                cells.append((label, cfg))
    return cells


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def write_comparison_csv(path: Path, rows: list[dict], aggregates: list[dict]) -> None:
    columns = COMPARISON_COLUMNS + ["error"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows + aggregates:
            writer.writerow([_format_cell(row.get(col)) for col in columns])


def cmd_sweep(args) -> int:
    try:
        spec = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        if spec.get("format_version", SWEEP_FORMAT_VERSION) != SWEEP_FORMAT_VERSION:
            raise ConfigError("unsupported sweep spec format_version")
        cells = _expand_grid(spec)
    except OSError as exc:
        return _error_json("spec", f"cannot read sweep spec: {exc}")
    except json.JSONDecodeError as exc:
        return _error_json("spec", f"sweep spec is not valid JSON: {exc}")
    except (ConfigError, ScenarioEnvelopeError) as exc:
        return _error_json("spec", str(exc))
    if args.jobs > 1 and cells:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_cell, cells))
    else:
        rows = [_sweep_cell(cell) for cell in cells]
    rows.sort(key=lambda row: (row["label"], row["seed"]))
    aggregates = aggregate_rows([r for r in rows if "error" not in r])
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = spec.get("name", "sweep")
    out_path = out_dir / f"{name}.csv"
    write_comparison_csv(out_path, rows, aggregates)
    print(out_path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smrsim",
        description="Simulate leader-based chained replication and verify its traces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and verify its trace")
    p_run.add_argument("--config", required=True, help="scenario config JSON")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--horizon", type=int, default=None, help="override horizon_rounds")
    p_run.add_argument("--elector", default=None, choices=["carousel", "round_robin"])
    p_run.add_argument("--format", default="text", choices=["text", "json"])
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a seed/config grid and aggregate a CSV")
    p_sweep.add_argument("--spec", required=True, help="experiment spec JSON")
    p_sweep.add_argument("--out", default="out", help="output directory")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel simulations")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="re-verify a stored trace")
    p_verify.add_argument("trace", help="trace JSONL file")
    p_verify.add_argument("--format", default="text", choices=["text", "json"])
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
