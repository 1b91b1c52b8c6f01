"""Command-line entry point: ``plnc-spatial <subcommand> [options]``.

Exit status is 0 on success, 2 for configuration errors and 1 for numerical
failures.  Reports are CSV (default) or JSON; both start with the resolved
configuration.  CSV schema version 1:

    inr              quantity, value
    rate             scheme, rate_per_area, rate_dir1, rate_dir2, area, inr_relay, inr_end
    validate-radius  big_r, inr_finite, inr_unbounded, rel_gap
    sweep-r0         r0, scheme, rate_per_area, inr_relay, inr_end, area
    sweep-density    lambda, scheme, best_r0, rate_per_area, inr_relay, inr_end, area
    optimize-r0      scheme, best_r0, rate_per_area, inr_relay, inr_end, area
    crossover        snr_db, lambda_low, lambda_high, lambda_star, dominant
    mc-validate      r_n, r0, lambda, quantity, analytic, mc_mean, mc_stderr, z, pass
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .experiments import (
    SCHEMES,
    SweepGrid,
    default_r0_grid,
    find_crossover_density,
    optimize_r0,
    sweep_density,
    sweep_reserved_radius,
    validate_radius_sweep,
)
from .geometry import ParameterError, Scheme, SystemParams
from .interference import ConsistencyError, QuadratureError, QuadratureSpec, inr_breakdown, require_reservation
from .montecarlo import COUNT_MODELS, McConfig, compare_with_analytic, oracle_grid
from .ratemodel import distance_from_snr_db, end_to_end_rate, to_db

SCHEMA_VERSION = 1
SUBCOMMANDS = ("inr", "rate", "validate-radius", "sweep-r0", "sweep-density",
               "optimize-r0", "crossover", "mc-validate")

DEFAULTS = {
    "snr_db": None,
    "r_n": None,
    "lam": None,
    "r0": None,
    "big_r": 10.0,
    "r0_grid": None,
    "r_grid": "1:10:0.5",
    "lambda_grid": "0.1:10:0.1",
    "lambda_range": "0.1:10",
    "r0_range": None,
    "r0_step": 0.005,
    "scheme": "both",
    "trials": 100_000,
    "seed": 42,
    "count_model": "poisson",
    "quad_rtol": 1e-9,
    "format": "csv",
    "output": None,
    "db": False,
    "threads": 1,
}
# execution details that cannot change the report
_NOT_REPORTED = {"threads", "output", "config"}


class ConfigError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plnc-spatial", description=__doc__.split("\n")[0],
                                argument_default=argparse.SUPPRESS)
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", help="file of 'key = value' lines; flags override it")
    p.add_argument("--snr-db", dest="snr_db", type=float, help="link SNR in dB (sets r_n)")
    p.add_argument("--r-n", dest="r_n", type=float, help="normalized node spacing")
    p.add_argument("--lambda", dest="lam", type=float, help="interferer density")
    p.add_argument("--r0", type=float, help="reserved-area radius")
    p.add_argument("--big-r", dest="big_r", type=float, help="network radius (default 10)")
    p.add_argument("--r0-grid", dest="r0_grid", help="start:stop:step for sweep-r0")
    p.add_argument("--r-grid", dest="r_grid", help="start:stop:step of network radii for validate-radius")
    p.add_argument("--lambda-grid", dest="lambda_grid", help="start:stop:step for sweep-density")
    p.add_argument("--lambda-range", dest="lambda_range", help="low:high for crossover")
    p.add_argument("--r0-range", dest="r0_range", help="low:high r0 search range for optimization")
    p.add_argument("--r0-step", dest="r0_step", type=float, help="optimizer grid step")
    p.add_argument("--scheme", choices=("cr", "plnc", "both"))
    p.add_argument("--trials", type=int, help="Monte Carlo placements")
    p.add_argument("--seed", type=int)
    p.add_argument("--count-model", dest="count_model", choices=COUNT_MODELS)
    p.add_argument("--quad-rtol", dest="quad_rtol", type=float)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--output", help="output path (default stdout)")
    p.add_argument("--db", action="store_true", help="report INR columns in dB")
    p.add_argument("--threads", type=int, help="worker threads for Monte Carlo")
    return p


_KEY_ALIASES = {"lambda": "lam", "lambda_": "lam"}


def _read_config(path: str) -> dict:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        key = _KEY_ALIASES.get(key, key)
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{n}: unknown key '{key}'")
        out[key] = value
    return out


def _coerce(key: str, value):
    if value is None or not isinstance(value, str):
        return value
    default = DEFAULTS[key]
    try:
        if isinstance(default, bool):
            return value.lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(value)
        if key in ("snr_db", "r_n", "lam", "r0", "big_r", "quad_rtol", "r0_step"):
            return float(value)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {value!r}") from None
    return value


def resolve_config(argv) -> dict:
    try:
        ns = vars(_build_parser().parse_args(argv))
    except SystemExit as exc:
        raise ConfigError("") if exc.code else exc  # argparse already reported it
    cfg = dict(DEFAULTS)
    if "config" in ns:
        from_file = _read_config(ns["config"])
        if "snr_db" in ns or "r_n" in ns:
            from_file.pop("snr_db", None)
            from_file.pop("r_n", None)
        cfg.update(from_file)
    cfg.update({k: v for k, v in ns.items() if k != "config"})
    cfg = {k: _coerce(k, v) if k in DEFAULTS else v for k, v in cfg.items()}
    if cfg["snr_db"] is not None and cfg["r_n"] is not None:
        raise ConfigError("give only one of --snr-db and --r-n")
    if cfg["trials"] < 1:
        raise ConfigError("--trials must be at least 1")
    if cfg["threads"] < 1:
        raise ConfigError("--threads must be at least 1")
    if cfg["big_r"] <= 0:
        raise ConfigError("--big-r must be positive")
    if cfg["lam"] is not None and cfg["lam"] < 0:
        raise ConfigError("--lambda must be non-negative")
    return cfg


def _grid(text: str, name: str) -> SweepGrid:
    try:
        parts = [float(v) for v in text.split(":")]
    except ValueError:
        raise ConfigError(f"{name} must be start:stop:step") from None
    if len(parts) != 3:
        raise ConfigError(f"{name} must be start:stop:step")
    return SweepGrid(*parts)


def _pair(text: str, name: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise ConfigError(f"{name} must be low:high") from None
    return lo, hi


def _link(cfg) -> tuple[float, float | None]:
    """(r_n, snr_db) from whichever of --snr-db / --r-n was given."""
    if cfg["snr_db"] is not None:
        return distance_from_snr_db(cfg["snr_db"]), cfg["snr_db"]
    if cfg["r_n"] is not None:
        if cfg["r_n"] <= 0:
            raise ConfigError("--r-n must be positive")
        return cfg["r_n"], -40.0 * math.log10(cfg["r_n"])
    raise ConfigError("one of --snr-db or --r-n is required")


def _need(cfg, key, flag):
    if cfg[key] is None:
        raise ConfigError(f"{flag} is required")
    return cfg[key]


def _params(cfg) -> SystemParams:
    r_n, _ = _link(cfg)
    params = SystemParams(r_n=r_n, r0=_need(cfg, "r0", "--r0"), big_r=cfg["big_r"],
                          lam=_need(cfg, "lam", "--lambda"))
    require_reservation(params)
    return params


def _schemes(cfg):
    return SCHEMES if cfg["scheme"] == "both" else (Scheme(cfg["scheme"].upper()),)


def _inr(cfg, value):
    return to_db(value) if cfg["db"] else value


def _run_inr(cfg, quad):
    b = inr_breakdown(_params(cfg), quad)
    return ["quantity", "value"], [{"quantity": k, "value": _inr(cfg, v)} for k, v in b.as_dict().items()]


def _rate_row(cfg, rate, **lead):
    row = dict(lead)
    row.update(rate_per_area=rate.rate_per_area, inr_relay=_inr(cfg, rate.inr_at_relay),
               inr_end=_inr(cfg, rate.inr_at_end), area=rate.reserved_area)
    return row


def _run_rate(cfg, quad):
    params = _params(cfg)
    rows = []
    for s in _schemes(cfg):
        r = end_to_end_rate(s, params, quad)
        rows.append({"scheme": s.value, "rate_per_area": r.rate_per_area,
                     "rate_dir1": r.per_direction_rates[0], "rate_dir2": r.per_direction_rates[1],
                     "area": r.reserved_area, "inr_relay": _inr(cfg, r.inr_at_relay),
                     "inr_end": _inr(cfg, r.inr_at_end)})
    return ["scheme", "rate_per_area", "rate_dir1", "rate_dir2", "area", "inr_relay", "inr_end"], rows


def _run_validate_radius(cfg, quad):
    r0 = _need(cfg, "r0", "--r0")
    recs = validate_radius_sweep(r0, _need(cfg, "lam", "--lambda"), _grid(cfg["r_grid"], "--r-grid"))
    rows = [{"big_r": r.big_r, "inr_finite": _inr(cfg, r.inr_finite),
             "inr_unbounded": _inr(cfg, r.inr_unbounded), "rel_gap": r.relative_gap} for r in recs]
    return ["big_r", "inr_finite", "inr_unbounded", "rel_gap"], rows


def _run_sweep_r0(cfg, quad):
    _, snr_db = _link(cfg)
    grid = _grid(cfg["r0_grid"], "--r0-grid") if cfg["r0_grid"] else default_r0_grid(snr_db)
    recs = sweep_reserved_radius(snr_db, _need(cfg, "lam", "--lambda"), cfg["big_r"], grid, quad)
    rows = [_rate_row(cfg, r, r0=r.x, scheme=r.scheme.value) for r in recs]
    return ["r0", "scheme", "rate_per_area", "inr_relay", "inr_end", "area"], rows


def _search(cfg):
    return _pair(cfg["r0_range"], "--r0-range") if cfg["r0_range"] else None


def _run_sweep_density(cfg, quad):
    _, snr_db = _link(cfg)
    recs = sweep_density(snr_db, cfg["big_r"], _grid(cfg["lambda_grid"], "--lambda-grid"),
                         _search(cfg), cfg["r0_step"], quad)
    rows = [_rate_row(cfg, r, **{"lambda": r.x, "scheme": r.scheme.value, "best_r0": r.best_r0})
            for r in recs]
    return ["lambda", "scheme", "best_r0", "rate_per_area", "inr_relay", "inr_end", "area"], rows


def _run_optimize(cfg, quad):
    _, snr_db = _link(cfg)
    lam = _need(cfg, "lam", "--lambda")
    rows = []
    for s in _schemes(cfg):
        r0, rate = optimize_r0(snr_db, lam, cfg["big_r"], s, _search(cfg), cfg["r0_step"], quad)
        rows.append(_rate_row(cfg, rate, scheme=s.value, best_r0=r0))
    return ["scheme", "best_r0", "rate_per_area", "inr_relay", "inr_end", "area"], rows


def _run_crossover(cfg, quad):
    _, snr_db = _link(cfg)
    lo, hi = _pair(cfg["lambda_range"], "--lambda-range")
    c = find_crossover_density(snr_db, cfg["big_r"], (lo, hi), search=_search(cfg),
                               step=cfg["r0_step"], quad=quad)
    row = {"snr_db": snr_db, "lambda_low": lo, "lambda_high": hi,
           "lambda_star": c.lam_star, "dominant": c.dominant.value}
    return ["snr_db", "lambda_low", "lambda_high", "lambda_star", "dominant"], [row]


def _run_mc_validate(cfg, quad):
    mc = McConfig(trials=cfg["trials"], seed=cfg["seed"], count_model=cfg["count_model"])
    if cfg["snr_db"] is None and cfg["r_n"] is None:
        grid = oracle_grid(big_r=cfg["big_r"])
    else:
        grid = [_params(cfg)]
    ref = lambda p: inr_breakdown(p, quad).as_dict()  # noqa: E731
    rows = [{"r_n": r.params.r_n, "r0": r.params.r0, "lambda": r.params.lam, "quantity": r.quantity,
             "analytic": r.analytic, "mc_mean": r.mc_mean, "mc_stderr": r.mc_stderr, "z": r.z,
             "pass": r.passed}
            for r in compare_with_analytic(grid, mc, cfg["threads"], analytic=ref)]
    return ["r_n", "r0", "lambda", "quantity", "analytic", "mc_mean", "mc_stderr", "z", "pass"], rows


_RUNNERS = {
    "inr": _run_inr,
    "rate": _run_rate,
    "validate-radius": _run_validate_radius,
    "sweep-r0": _run_sweep_r0,
    "sweep-density": _run_sweep_density,
    "optimize-r0": _run_optimize,
    "crossover": _run_crossover,
    "mc-validate": _run_mc_validate,
}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".9g")
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return float(format(v, ".9g")) if math.isfinite(v) else format(v, ".9g")
    return value


def reported_config(cfg: dict) -> dict:
    out = {"schema": SCHEMA_VERSION}
    out.update({k: cfg[k] for k in sorted(cfg) if k not in _NOT_REPORTED})
    return out


def render(cfg: dict, columns, rows) -> str:
    config = reported_config(cfg)
    if cfg["format"] == "json":
        body = [{"config": {k: _json_value(v) for k, v in config.items()}}]
        body += [{c: _json_value(row.get(c)) for c in columns} for row in rows]
        return json.dumps(body, indent=1) + "\n"
    buf = io.StringIO()
    for k, v in config.items():
        buf.write(f"# {k}={_fmt(v)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        cfg = resolve_config(argv)
        quad = QuadratureSpec(rel_tol=cfg["quad_rtol"])
        columns, rows = _RUNNERS[cfg["subcommand"]](cfg, quad)
    except (ConfigError, ParameterError) as exc:
        if str(exc):
            print(f"plnc-spatial: error: {exc}", file=stderr)
        return 2
    except (QuadratureError, ConsistencyError) as exc:
        print(f"plnc-spatial: numerical failure: {exc}", file=stderr)
        return 1
    text = render(cfg, columns, rows)
    if cfg["output"]:
        try:
            with open(cfg["output"], "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"plnc-spatial: error: cannot write {cfg['output']}: {exc}", file=stderr)
            return 2
    else:
        stdout.write(text)
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
