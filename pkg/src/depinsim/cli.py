"""Command-line front door: runs, sweeps, vesting tables, and metric scoring.

Exit codes are stable for CI scripting: 0 success, 2 usage/config error,
3 runtime abort.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import charts, metrics
from .engine import CSV_COLUMNS, SimulationConfig, SimulationError, run
from .llm_gateway import API_KEY_ENV, ENDPOINT_ENV, AuditLog, GatewayError
from .tokenomics import TokenAllocation, circulating_supply, node_emission, team_release, vc_release

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

# File-level keys the run config may carry on top of SimulationConfig.
_FILE_ONLY_KEYS = ("out_dir", "charts", "audit_log")


def _write_text(path: Path, text: str) -> None:
    """Atomic write: temp file in the target directory, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_config(args) -> Tuple[SimulationConfig, dict]:
    """Build the simulation config from file plus CLI overrides."""
    file_opts = {"out_dir": None, "charts": True, "audit_log": None}
    data = {}
    if args.config is not None:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError(f"{args.config}: config must be a JSON object")
        for key in _FILE_ONLY_KEYS:
            if key in data:
                file_opts[key] = data.pop(key)
    if getattr(args, "seed", None) is not None:
        data["seed"] = args.seed
    if getattr(args, "policy", None) is not None:
        data["policy"] = args.policy
    if getattr(args, "patience", None) is not None:
        data["patience"] = args.patience
    config = SimulationConfig.from_dict(data)
    if getattr(args, "out_dir", None) is not None:
        file_opts["out_dir"] = args.out_dir
    if getattr(args, "charts", None) is not None:
        file_opts["charts"] = args.charts == "on"
    if getattr(args, "audit_log", None) is not None:
        file_opts["audit_log"] = args.audit_log
    if file_opts["out_dir"] is None:
        file_opts["out_dir"] = "out"
    return config, file_opts


def _read_trajectory_csv(path: Path) -> dict:
    """Read an emitted trajectory.csv back into column lists."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    columns = {name: [] for name in CSV_COLUMNS}
    for row in rows:
        for name in CSV_COLUMNS:
            value = row[name]
            columns[name].append(int(value) if name in ("month", "nodes", "entries", "exits", "fallbacks") else float(value))
    return columns


def _trajectory_charts(columns: dict) -> dict:
    months = columns["month"]
    return {
        "price.svg": charts.line_chart(months, {"price": columns["price"]},
                                       title="Token price", x_label="month", y_label="currency/token"),
        "market_cap.svg": charts.line_chart(months, {"market cap": columns["market_cap"]},
                                            title="Market capitalization", x_label="month", y_label="currency"),
        "diluted_market_cap.svg": charts.line_chart(months, {"diluted cap": columns["diluted_cap"]},
                                                    title="Fully diluted market cap", x_label="month", y_label="currency"),
        "nodes.svg": charts.line_chart(months, {"nodes": [float(n) for n in columns["nodes"]]},
                                       title="Active nodes", x_label="month", y_label="count"),
        "users.svg": charts.line_chart(months, {"users": columns["users"]},
                                       title="Users", x_label="month", y_label="count"),
    }


def cmd_run(args) -> int:
    config, opts = _load_config(args)
    audit = AuditLog(opts["audit_log"]) if opts["audit_log"] else None
    trajectory = run(config, audit_log=audit)

    out_dir = Path(opts["out_dir"])
    csv_path = out_dir / "trajectory.csv"
    _write_text(csv_path, trajectory.to_csv_string())
    _write_text(out_dir / "metrics.json", json.dumps(trajectory.metrics.to_dict(), indent=2) + "\n")
    if opts["charts"]:
        columns = _read_trajectory_csv(csv_path)  # charts are views of the CSV
        for name, svg in _trajectory_charts(columns).items():
            _write_text(out_dir / name, svg)
    m = trajectory.metrics
    print(f"wrote {csv_path} ({len(trajectory.states)} months)")
    print(
        f"efficiency={m.efficiency:.6g} inclusion={m.inclusion if m.inclusion is None else round(m.inclusion, 6)} "
        f"stability={m.stability if m.stability is None else round(m.stability, 6)}"
    )
    return EXIT_OK


def _cell_label(policy: str, patience: int) -> str:
    return "heuristic" if policy == "heuristic" else f"llm p={patience}"


def cmd_compare(args) -> int:
    config, opts = _load_config(args)
    patience_values = args.patience_list
    if config.llm is None:
        raise ValueError("compare needs an llm config section (scripted or http backend)")
    seeds = [config.seed + i for i in range(args.seeds)]

    def agg(values: List[Optional[float]]) -> Tuple[float, float]:
        clean = [v for v in values if v is not None]
        if not clean:
            return float("nan"), float("nan")
        arr = np.asarray(clean)
        return float(arr.mean()), float(arr.std(ddof=1)) if arr.size > 1 else 0.0

    cells = [("heuristic", config.patience)] + [("llm", p) for p in patience_values]
    rows = []
    failures = []
    for policy, patience in cells:
        cell_metrics = []
        for seed in seeds:
            cell_config = SimulationConfig.from_dict(
                config.to_dict() | {"policy": policy, "patience": patience, "seed": seed}
            )
            try:
                cell_metrics.append(run(cell_config).metrics)
            except (SimulationError, GatewayError) as err:
                failures.append((policy, patience, seed, str(err)))
        if not cell_metrics:
            continue
        eff = agg([m.efficiency for m in cell_metrics])
        incl = agg([m.inclusion for m in cell_metrics])
        stab = agg([m.stability for m in cell_metrics])
        rows.append({
            "policy": policy,
            "patience": patience,
            "seeds": len(cell_metrics),
            "efficiency_mean": eff[0], "efficiency_std": eff[1],
            "inclusion_mean": incl[0], "inclusion_std": incl[1],
            "stability_mean": stab[0], "stability_std": stab[1],
        })

    for policy, patience, seed, message in failures:
        print(f"cell ({policy}, patience={patience}, seed={seed}) failed: {message}", file=sys.stderr)
    if not rows:
        print("all comparison cells failed", file=sys.stderr)
        return EXIT_RUNTIME

    out_dir = Path(opts["out_dir"])
    header = list(rows[0].keys())
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(row[k]) if isinstance(row[k], float) else str(row[k]) for k in header))
    _write_text(out_dir / "compare.csv", "\n".join(lines) + "\n")

    if opts["charts"]:
        labels = [_cell_label(r["policy"], r["patience"]) for r in rows]
        panels = [
            {"title": "Efficiency", "groups": labels,
             "values": [r["efficiency_mean"] for r in rows], "errors": [r["efficiency_std"] for r in rows]},
            {"title": "Inclusion", "groups": labels,
             "values": [r["inclusion_mean"] for r in rows], "errors": [r["inclusion_std"] for r in rows]},
            {"title": "Stability", "groups": labels,
             "values": [r["stability_mean"] for r in rows], "errors": [r["stability_std"] for r in rows]},
        ]
        _write_text(out_dir / "compare.svg", charts.grouped_bar_panels(panels))

    print(f"wrote {out_dir / 'compare.csv'} ({len(rows)} cells, {args.seeds} seeds each)")
    return EXIT_OK


def cmd_vesting(args) -> int:
    if args.horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {args.horizon}")
    alloc = TokenAllocation(
        total_supply=args.total_supply,
        team_fraction=args.team_fraction,
        vc_fraction=args.vc_fraction,
        node_fraction=args.node_fraction,
    )
    header = ["month", "team_release", "vc_release", "node_release",
              "team_cumulative", "vc_cumulative", "node_cumulative", "circulating_supply"]
    lines = [",".join(header)]
    team_cum = vc_cum = node_cum = 0.0
    cumulative = {"team": [], "vc": [], "node": []}
    months = list(range(1, args.horizon + 1))
    for month in months:
        team = team_release(month, alloc)
        vc = vc_release(month, alloc)
        node = node_emission(month, alloc)
        team_cum += team
        vc_cum += vc
        node_cum += node
        cumulative["team"].append(team_cum)
        cumulative["vc"].append(vc_cum)
        cumulative["node"].append(node_cum)
        row = [str(month)] + [
            repr(v) for v in
            (team, vc, node, team_cum, vc_cum, node_cum, circulating_supply(month, alloc))
        ]
        lines.append(",".join(row))
    out_dir = Path(args.out_dir)
    _write_text(out_dir / "vesting.csv", "\n".join(lines) + "\n")
    if args.charts != "off":
        svg = charts.line_chart(
            months,
            {"team": cumulative["team"], "vc": cumulative["vc"], "node": cumulative["node"]},
            title="Cumulative token releases",
            x_label="month",
            y_label="tokens",
        )
        _write_text(out_dir / "vesting.svg", svg)
    print(f"wrote {out_dir / 'vesting.csv'} ({args.horizon} months)")
    return EXIT_OK


def cmd_score(args) -> int:
    prices = metrics.read_price_series(args.prices)
    report = metrics.score_series(prices, circulating=args.circulating, price=args.price)
    text = json.dumps(report.to_dict(), indent=2)
    if args.out:
        _write_text(Path(args.out), text + "\n")
    print(text)
    return EXIT_OK


# name, default, description -- the generated configuration reference.
_CONFIG_REFERENCE = [
    ("horizon_months", 96, "number of simulated months"),
    ("initial_nodes", 50, "nodes deployed by the core team before month 1"),
    ("initial_price", 1.0, "token price carried until the first traded month"),
    ("user_revenue_factor", 10.0, "currency of monthly revenue per user (k)"),
    ("node_cost", 1000.0, "baseline node operating cost per month"),
    ("cost_spread", [0.8, 1.2], "uniform per-node cost multiplier range"),
    ("tolerance_range", [0.3, 0.9], "uniform per-node risk tolerance range"),
    ("patience", 1, "consecutive exit signals required before a node leaves"),
    ("entry_pool_size", 10, "candidate nodes evaluated for entry each month"),
    ("gc_arrival_rate", 1.0, "Poisson mean of growth-capitalist arrivals per month"),
    ("gc_endowment_mu", 13.0, "log-normal log-mean of GC endowments"),
    ("gc_endowment_sigma", 1.0, "log-normal sigma of GC endowments"),
    ("gc_lifespan_mu", 2.5, "log-normal log-mean of GC lifespans (months)"),
    ("gc_lifespan_sigma", 0.5, "log-normal sigma of GC lifespans"),
    ("tokens_on_sale_fraction", 0.05, "initial sale pool as a fraction of month-1 supply"),
    ("policy", "heuristic", "decision policy: heuristic | llm"),
    ("seed", 42, "root RNG seed; fixes the whole run"),
    ("parallel_decisions", False, "evaluate agent decisions on a thread pool"),
    ("stability_window", None, "[first, last] months scored for stability (default: full run)"),
    ("total_supply", 1_000_000_000.0, "fixed token supply"),
    ("team_fraction", 0.2, "share of supply vested to the core team"),
    ("vc_fraction", 0.2, "share of supply vested to VCs"),
    ("node_fraction", 0.6, "share of supply emitted to node providers"),
    ("team_schedule", {"kind": "cliff_linear", "cliff_months": 11, "unlock_at_cliff": 0.25, "linear_months": 36},
     "team vesting rule"),
    ("vc_schedule", {"kind": "cliff_linear", "cliff_months": 11, "unlock_at_cliff": 0.5, "linear_months": 12},
     "VC vesting rule"),
    ("node_schedule", {"kind": "halving_emission", "halving_period_months": 48}, "node emission rule"),
    ("llm.backend", "scripted", "completion backend: scripted | http"),
    ("llm.script", None, "inline prompt-pattern -> reply map (scripted)"),
    ("llm.script_file", None, "JSON file with the scripted reply map"),
    ("llm.default_reply", "", "scripted reply when no pattern matches"),
    ("llm.endpoint", None, f"completions endpoint base URL (or ${ENDPOINT_ENV})"),
    ("llm.api_key", None, f"bearer token (or ${API_KEY_ENV})"),
    ("llm.model_name", "EleutherAI/gpt-neo-125M", "model identifier sent to the endpoint"),
    ("llm.max_tokens", 8, "completion length limit"),
    ("llm.temperature", 0.0, "sampling temperature (0 for determinism)"),
    ("llm.timeout", 10.0, "HTTP timeout in seconds"),
    ("llm.retries", 2, "transport retry budget"),
    ("out_dir", "out", "directory for emitted artifacts"),
    ("charts", True, "emit SVG charts next to the CSVs"),
    ("audit_log", None, "JSON-lines file recording every LLM exchange"),
]


def cmd_config_reference(_args) -> int:
    print("| key | default | description |")
    print("| --- | --- | --- |")
    for key, default, description in _CONFIG_REFERENCE:
        print(f"| `{key}` | `{json.dumps(default)}` | {description} |")
    return EXIT_OK


def _patience_list(text: str) -> List[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"patience list must be comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("patience list must not be empty")
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("patience values must be >= 1")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="depin-sim",
        description="Simulate a DePIN token economy and score it on efficiency, inclusion, and stability.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON run-config file (defaults apply when omitted)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out-dir", help="output directory (default: out)")
        p.add_argument("--charts", choices=("on", "off"), help="toggle SVG chart emission")

    p_run = sub.add_parser("run", help="run one simulation and write trajectory.csv + metrics.json")
    add_common(p_run)
    p_run.add_argument("--policy", choices=("heuristic", "llm"), help="override the config policy")
    p_run.add_argument("--patience", type=int, help="override the config patience")
    p_run.add_argument("--audit-log", help="append every LLM exchange to this JSON-lines file")
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="heuristic benchmark vs LLM policy across patience levels")
    add_common(p_cmp)
    p_cmp.add_argument("--patience", dest="patience_list", type=_patience_list, required=True,
                       help="comma-separated patience levels for the LLM cells, e.g. 1,3,5")
    p_cmp.add_argument("--seeds", type=int, default=5, help="seeds per cell (default: 5)")
    p_cmp.set_defaults(func=cmd_compare, policy=None, patience=None, audit_log=None)

    p_vest = sub.add_parser("vesting", help="emit the per-month release schedule table")
    p_vest.add_argument("--horizon", type=int, default=96, help="months to tabulate (default: 96)")
    p_vest.add_argument("--total-supply", type=float, default=1_000_000_000.0)
    p_vest.add_argument("--team-fraction", type=float, default=0.20)
    p_vest.add_argument("--vc-fraction", type=float, default=0.20)
    p_vest.add_argument("--node-fraction", type=float, default=0.60)
    p_vest.add_argument("--out-dir", default="out")
    p_vest.add_argument("--charts", choices=("on", "off"), default="on")
    p_vest.set_defaults(func=cmd_vesting)

    p_score = sub.add_parser("score", help="score an external price series (one price per line)")
    p_score.add_argument("prices", help="CSV/TXT file, one price per line, optional header")
    p_score.add_argument("--circulating", type=float, required=True, help="circulating token count")
    p_score.add_argument("--price", type=float, required=True, help="current token price")
    p_score.add_argument("--out", help="also write the metric report JSON here")
    p_score.set_defaults(func=cmd_score)

    p_ref = sub.add_parser("config-reference", help="print the generated config key reference")
    p_ref.set_defaults(func=cmd_config_reference)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimulationError, GatewayError) as err:
        print(f"runtime error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
