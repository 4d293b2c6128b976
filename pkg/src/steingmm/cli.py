"""Command-line front end.

    steingmm estimate --model gamma2 --data x.txt --estimators power:2,mle
    steingmm simulate --model gamma1 --n 50 --reps 1000 --estimators hyvarinen,mle --out sim.csv
    steingmm repro-table1 --out table1.csv
    steingmm repro-figure1 --out figure1.csv
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .errors import DegenerateProblem, EstimationError
from .models import get_model
from .simulation import (
    DEFAULT_SEED,
    SimulationConfig,
    figure1_config,
    parameter_names,
    resolve_estimator,
    run_simulation,
    table1_config,
    to_reported,
)
from .weights import parse_xi_list

log = logging.getLogger(__name__)

EXIT_BAD_DATA = 2
EXIT_DEGENERATE = 3
EXIT_SIMULATION = 4

DEFAULTS = {
    "model": "gamma2",
    "xi": "0,0.3,0.4,0.5,0.8,1.0,1.2,1.5,1.8,2.0",
    "estimators": None,
    "n": 500,
    "reps": 1000,
    "seed": DEFAULT_SEED,
    "workers": None,
    "out": None,
    "data": None,
}


class DataError(ValueError):
    pass


def fmt(x: float) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(float(x), ".17g")


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def read_data(path) -> np.ndarray:
    """Newline-delimited reals; blank lines and lines starting with '#' are skipped."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            value = float(s)
        except ValueError:
            raise DataError(f"{path}:{lineno}: not a decimal number: {s!r}") from None
        if not math.isfinite(value):
            raise DataError(f"{path}:{lineno}: non-finite value {s!r}")
        values.append(value)
    if not values:
        raise DataError(f"{path}: no data")
    return np.array(values)


def summary_csv(report) -> str:
    header = ["estimator", "parameter", "true_value", "mean", "bias", "variance", "mse", "mc_standard_error_of_mse", "failures"]
    rows = [
        [r.estimator, r.parameter, r.true_value, r.mean, r.bias, r.variance, r.mse, r.mc_standard_error_of_mse, r.failures]
        for r in report.summary
    ]
    return render_csv(header, rows)


def replications_csv(report) -> str:
    return render_csv(["replication", "estimator", "parameter", "estimate"], report.per_replication())


def sidecar_path(out: Path) -> Path:
    return out.with_name(out.stem + ".config.json")


def emit(text: str, out, resolved: dict):
    if out is None:
        sys.stdout.write(text)
        return
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(text.encode())
    sidecar_path(out).write_text(json.dumps(resolved, indent=2, sort_keys=True) + "\n")


def resolve(args: argparse.Namespace) -> dict:
    """Defaults < JSON config file < explicit flags."""
    resolved = dict(DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            from_file = json.load(fh)
        unknown = set(from_file) - set(DEFAULTS)
        if unknown:
            raise DataError(f"unknown config keys: {sorted(unknown)}")
        resolved.update(from_file)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    resolved["command"] = args.command
    if isinstance(resolved["xi"], (list, tuple)):
        resolved["xi"] = ",".join(str(v) for v in resolved["xi"])
    if isinstance(resolved["estimators"], (list, tuple)):
        resolved["estimators"] = ",".join(resolved["estimators"])
    return resolved


def _roster(text, fallback):
    if not text:
        return list(fallback)
    return [s.strip() for s in text.split(",") if s.strip()]


def cmd_estimate(cfg: dict) -> int:
    if not cfg.get("data"):
        print("estimate: --data is required", file=sys.stderr)
        return EXIT_BAD_DATA
    try:
        x = read_data(cfg["data"])
        model = get_model(cfg["model"])
        x = model.check_support(x)
    except (DataError, EstimationError) as exc:
        print(f"estimate: {exc}", file=sys.stderr)
        return EXIT_BAD_DATA
    xi = parse_xi_list(cfg["xi"])
    roster = _roster(cfg["estimators"], ["hyvarinen", "gmm2step", "mle"])
    params = parameter_names(model)
    rows, failed = [], 0
    for name in roster:
        fn = resolve_estimator(name, model, xi)
        try:
            theta = fn(x)
        except DegenerateProblem as exc:
            print(f"estimate: {name}: {exc}", file=sys.stderr)
            failed += 1
            continue
        for par, value in zip(params, to_reported(model, theta)):
            rows.append([name, par, float(value), ""])
    if failed == len(roster):
        return EXIT_DEGENERATE
    emit(render_csv(["estimator", "parameter", "estimate", "diagnostic"], rows), cfg["out"], cfg)
    return 0


def _simulate(config: SimulationConfig, cfg: dict):
    cfg["resolved_simulation"] = config.to_dict()
    return run_simulation(config, workers=cfg["workers"])


def cmd_simulate(cfg: dict) -> int:
    model_name = cfg["model"]
    config = SimulationConfig(
        model_name=model_name,
        true_params={"alpha": 5.0, "beta": 1.0},
        n=int(cfg["n"]),
        replications=int(cfg["reps"]),
        master_seed=int(cfg["seed"]),
        xi_list=parse_xi_list(cfg["xi"]),
        estimator_roster=_roster(cfg["estimators"], ["hyvarinen", "gmm2step", "mle"]),
    )
    report = _simulate(config, cfg)
    emit(summary_csv(report), cfg["out"], cfg)
    if cfg["out"]:
        out = Path(cfg["out"])
        out.with_name(out.stem + ".replications.csv").write_bytes(replications_csv(report).encode())
    return 0


def cmd_repro_table1(cfg: dict) -> int:
    report = _simulate(table1_config(int(cfg["seed"])), cfg)
    emit(summary_csv(report), cfg["out"], cfg)
    return 0


def cmd_repro_figure1(cfg: dict) -> int:
    report = _simulate(figure1_config(int(cfg["seed"])), cfg)
    emit(replications_csv(report), cfg["out"], cfg)
    return 0


COMMANDS = {
    "estimate": cmd_estimate,
    "simulate": cmd_simulate,
    "repro-table1": cmd_repro_table1,
    "repro-figure1": cmd_repro_figure1,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steingmm", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file of option values; flags take precedence")
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int, help="parallel worker processes (default: all CPUs)")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        if name in ("estimate", "simulate"):
            p.add_argument("--model", choices=["gamma1", "gamma2"])
            p.add_argument("--xi", help="comma-separated power-weight exponents, e.g. 0,0.5,2")
            p.add_argument("--estimators", help="comma-separated roster, e.g. hyvarinen,power:2,gmm2step,mle")
        if name == "estimate":
            p.add_argument("--data", help="file of newline-delimited reals, '#' comments allowed")
        if name == "simulate":
            p.add_argument("--n", type=int)
            p.add_argument("--reps", type=int)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        cfg = resolve(args)
    except (OSError, ValueError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_BAD_DATA
    if args.command == "estimate":
        return cmd_estimate(cfg)
    try:
        return COMMANDS[args.command](cfg)
    except (EstimationError, ValueError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_SIMULATION


if __name__ == "__main__":
    sys.exit(main())
