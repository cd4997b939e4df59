"""Command line interface: ``otto-ne {cycle,qstar,sweep,optimize-power,validate}``.

Exit codes: 0 success, 2 configuration error, 3 physics/numerics error,
4 invariant violation (``validate``).

Sweep CSV columns, in order::

    value, E_A, E_B, E_C, E_D, W1, W3, Q2, Q4, W_total, efficiency,
    eta_quotient, power, q_star_1, q_star_2, engine_flag, n1_total,
    n2_total, eta_max, T1_eff, T2_eff, entropy_production,
    inequality_margin, clausius_ok, engine_window_ok, error

Failed grid points leave the numeric columns empty and fill ``error``.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .config import ConfigError, load_config, require, reservoir_from, spec_from
from .cycle import evaluate_cycle
from .errors import DomainError, OttoError
from .optimize import PowerProblem, maximize_power
from .protocols import DEFAULT_TOL, FrequencyProtocol, adiabaticity_Q, solve_classical_pair
from .second_law import second_law_report
from .thermo_core import regime_check
from .validation import run_battery

log = logging.getLogger("otto_ne")

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_INVARIANT = 0, 2, 3, 4

SWEEP_AXES = ("omega2", "beta2", "lambda", "epsilon", "phi", "tau_protocol")
CYCLE_COLUMNS = (
    "E_A", "E_B", "E_C", "E_D", "W1", "W3", "Q2", "Q4", "W_total", "efficiency",
    "eta_quotient", "power", "q_star_1", "q_star_2", "engine_flag", "n1_total", "n2_total",
)
SWEEP_COLUMNS = ("value",) + CYCLE_COLUMNS + (
    "eta_max", "T1_eff", "T2_eff", "entropy_production", "inequality_margin",
    "clausius_ok", "engine_window_ok", "error",
)


def _clean(obj):
    """Make floats JSON-safe: non-finite values become the strings 'inf', '-inf', 'nan'."""
    if isinstance(obj, float):
        if math.isfinite(obj):
            return obj
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def emit_json(obj, stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False))
    stream.write("\n")


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return "" if v is None else str(v)


def _error_payload(exc):
    out = {"type": type(exc).__name__, "message": str(exc)}
    diag = getattr(exc, "diagnostics", None)
    if diag:
        out["diagnostics"] = diag
    return {"error": out}


# ---------------------------------------------------------------- commands

def cycle_report(cfg, emit_warnings=True) -> dict:
    spec = spec_from(cfg)
    res = evaluate_cycle(spec)
    rep = second_law_report(spec, res)
    regime = {
        "cold": regime_check(spec.cold, spec.omega1, spec.conv, emit=emit_warnings).__dict__,
        "hot": regime_check(spec.hot, spec.omega2, spec.conv, emit=emit_warnings).__dict__,
    }
    return {"cycle": res.as_dict(), "second_law": rep.as_dict(), "regime": regime}


def cmd_cycle(args, cfg):
    report = cycle_report(cfg)
    if args.format == "csv":
        row = {**report["cycle"], **{k: report["second_law"][k] for k in
               ("eta_max", "T1_eff", "T2_eff", "entropy_production", "inequality_margin", "clausius_ok")}}
        w = csv.writer(sys.stdout, lineterminator="\r\n")
        w.writerow(list(row))
        w.writerow([_fmt(v) for v in row.values()])
    else:
        emit_json(report)
    return EXIT_OK


def cmd_qstar(args, cfg):
    kind = {"linear": "linear", "smooth": "smooth", "sudden": "sudden", "adiabatic": "adiabatic"}[args.protocol]
    try:
        protocol = FrequencyProtocol(kind, args.w1, args.w2, args.tau)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    tol = args.tol or DEFAULT_TOL
    res = adiabaticity_Q(protocol, tol)
    out = {"protocol": kind, "omega_start": args.w1, "omega_end": args.w2, "duration": protocol.duration,
           "q_star": res.q_star, "method": res.method, "error_estimate": res.error_estimate,
           "wronskian_drift": res.wronskian_drift, "tolerance": tol}
    if protocol.kind in ("linear", "smooth", "tabulated") and protocol.duration > 0:
        pair = solve_classical_pair(protocol, tol)
        out["steps"] = pair.steps
    emit_json(out)
    return EXIT_OK


def _sweep_config(cfg, axis, value):
    c = copy.deepcopy(cfg)
    if axis == "omega2":
        c["omega2"] = value
    elif axis == "beta2":
        c["hot"]["beta"] = value
    elif axis == "lambda":
        dev = c["hot"].get("deviation", {})
        if dev.get("type") != "correlated_pair":
            raise ConfigError("lambda sweep needs a correlated_pair hot reservoir")
        dev["lambda"] = value
    elif axis in ("epsilon", "phi"):
        dev = c["hot"].get("deviation", {})
        if dev.get("type") != "coherent":
            raise ConfigError(f"{axis} sweep needs a coherent hot reservoir")
        dev[axis] = value
    elif axis == "tau_protocol":
        for key in ("compression", "expansion"):
            block = c.setdefault(key, {"kind": "linear"})
            if block["kind"] not in ("linear", "smooth"):
                raise ConfigError("tau_protocol sweep needs linear or smooth strokes")
            block["duration"] = value
    return c


def _sweep_point(job):
    cfg, axis, value = job
    row = {"value": value}
    try:
        rep = cycle_report(_sweep_config(cfg, axis, value), emit_warnings=False)
    except (OttoError, ConfigError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    row.update(rep["cycle"])
    sl = rep["second_law"]
    for k in ("eta_max", "T1_eff", "T2_eff", "entropy_production", "inequality_margin",
              "clausius_ok", "engine_window_ok"):
        row[k] = sl[k]
    row["error"] = ""
    row["_regime_warnings"] = len(rep["regime"]["cold"]["warnings"]) + len(rep["regime"]["hot"]["warnings"])
    return row


def cmd_sweep(args, cfg):
    require(cfg, "sweep")
    sw = cfg["sweep"]
    # validate base config once, failures here are config errors
    _sweep_config(cfg, sw["axis"], sw["start"])
    spec_from(_sweep_config(cfg, sw["axis"], sw["start"]))
    if sw.get("spacing", "linear") == "log":
        if sw["start"] <= 0 or sw["stop"] <= 0:
            raise ConfigError("log spacing needs positive start and stop")
        grid = np.geomspace(sw["start"], sw["stop"], sw["count"])
    else:
        grid = np.linspace(sw["start"], sw["stop"], sw["count"])
    jobs = [(cfg, sw["axis"], float(v)) for v in grid]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    flagged = sum(1 for r in rows if r.pop("_regime_warnings", 0))
    if flagged:
        log.warning("%d of %d sweep points outside the high-temperature/weak-correlation regime",
                    flagged, len(rows))
    if args.format == "json":
        emit_json({"axis": sw["axis"], "columns": list(SWEEP_COLUMNS), "rows": rows})
        return EXIT_OK
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in SWEEP_COLUMNS])
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_optimize_power(args, cfg):
    require(cfg, "cold", "hot", "omega1")
    opt = cfg.get("optimize", {})
    try:
        hot = reservoir_from(cfg["hot"])
        cold = reservoir_from(cfg["cold"])
        if not cold.is_thermal:
            raise ConfigError("optimize-power takes a thermal cold reservoir")
        from .config import conventions_from

        problem = PowerProblem(
            omega1=cfg["omega1"], beta1=cold.beta, beta2=hot.beta, deviation=hot.deviation,
            cycle_time=cfg.get("cycle_time", 1.0), conv=conventions_from(cfg),
            bracket=tuple(opt["bracket"]) if "bracket" in opt else None,
            objective=opt.get("objective", "high_t"),
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    tol = args.tol or opt.get("tolerance", 1e-10)
    rep = maximize_power(problem, tol)
    emit_json(rep.as_dict())
    return EXIT_OK


def cmd_validate(args, cfg):
    block = cfg.get("validate", {})
    samples = args.samples if args.samples is not None else block.get("samples", 1000)
    seed = args.seed if args.seed is not None else block.get("seed", 42)
    envelope = args.envelope or block.get("envelope", "high_t")
    if samples < 1:
        raise ConfigError("validate needs at least one sample")
    if seed < 0:
        raise ConfigError("seed must be non-negative")
    report = run_battery(samples, seed, envelope, jobs=args.jobs)
    emit_json(report)
    return EXIT_OK if report["all_passed"] else EXIT_INVARIANT


# ---------------------------------------------------------------- wiring

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="RunConfig JSON file ('-' for stdin)")
    common.add_argument("--seed", type=int, help="RNG seed (validate)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweep/validate")
    common.add_argument("--tol", type=float, help="numerical tolerance (overrides config)")
    common.add_argument("--format", choices=("json", "csv"), help="output format")

    p = argparse.ArgumentParser(
        prog="otto-ne",
        description="Quantum Otto engines with nonequilibrium reservoirs.",
        epilog="Exit codes: 0 ok, 2 config error, 3 physics/numerics error, 4 invariant violation. "
               "Set OTTO_NE_LOG=error|warn|info|debug for diagnostics on stderr.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("cycle", parents=[common], help="evaluate one cycle and its second-law report (JSON)")

    q = sub.add_parser("qstar", parents=[common], help="adiabaticity parameter Q* of one stroke")
    q.add_argument("--protocol", choices=("sudden", "adiabatic", "linear", "smooth"), required=True)
    q.add_argument("--w1", type=float, default=1.0, help="start frequency")
    q.add_argument("--w2", type=float, default=2.0, help="end frequency")
    q.add_argument("--tau", type=float, default=0.0, help="stroke duration")

    sub.add_parser(
        "sweep", parents=[common], help="one-parameter sweep of the cycle (CSV by default)",
        description="Columns: " + ", ".join(SWEEP_COLUMNS),
    )
    sub.add_parser("optimize-power", parents=[common], help="maximise power over omega2 (JSON)")

    v = sub.add_parser("validate", parents=[common], help="seeded invariant battery (JSON)")
    v.add_argument("--samples", type=int, help="number of random specs")
    v.add_argument("--envelope", choices=("high_t", "out_of_regime"))
    return p


COMMANDS = {
    "cycle": cmd_cycle,
    "qstar": cmd_qstar,
    "sweep": cmd_sweep,
    "optimize-power": cmd_optimize_power,
    "validate": cmd_validate,
}


def _setup_logging():
    level = os.environ.get("OTTO_NE_LOG", "warn").lower()
    levels = {"error": logging.ERROR, "warn": logging.WARNING, "warning": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "sweep" else "json"
    if args.jobs < 1:
        emit_json({"error": {"type": "ConfigError", "message": "--jobs must be >= 1"}}, sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        if args.tol is not None:
            if args.tol <= 0:
                raise ConfigError("--tol must be positive")
            cfg["tolerance"] = args.tol
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        emit_json(_error_payload(exc), sys.stderr)
        return EXIT_CONFIG
    except OttoError as exc:
        emit_json(_error_payload(exc))
        return EXIT_PHYSICS


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
