"""Command-line front end: reproducible parameter scans and trajectories.

Subcommands
-----------
evolve          occupation + transport trajectory table for one parameter set
scan            asymptotic observables against T, g0 or mu (both statistics)
oracle-compare  analytic n(t) against the exact discretized-bath propagation
kernel-dump     memory kernel K(t) and its running integral

Configuration is a JSON file (see README for the schema); every key can be
overridden with --set section.key=value.  Unknown keys are rejected.  Output
is CSV with '#' metadata lines (or JSON via --format json); rows are fully
determined by the config, so repeated runs are byte-identical.  --plot
renders a matplotlib figure next to the table.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import FermibathError
from .model import BathStatistics, ModelParams
from .observables import (MINUS_PLUS, PLUS_MINUS, default_time_grid,
                          diffusion, equilibrium_summary, friction,
                          low_temperature_asymptote, occupation,
                          occupation_weak_coupling, statistics_ratio)
from .quadrature import QuadratureSpec
from .response import compute_roots, memory_kernel, memory_kernel_integral
from .bath_oracle import OneBodyState, discretize_bath, propagate_occupation


class ConfigError(Exception):
    pass


_DEFAULT_CONFIG = {
    "model": {
        "Omega": 1.0, "g0": 0.1, "gamma": 12.0, "T": 1.0, "mu": 0.0,
        "statistics": "fermi", "n0": 0.0,
    },
    "quadrature": {"rel_tol": 1e-8, "abs_tol": 1e-12, "max_panels": 4000},
    "grid": {
        "t_max": 40.0, "num_points": None,
        "variable": "T", "start": 0.1, "stop": 5.0, "num": 40,
        "spacing": "linear",
    },
    "oracle": {"N": 4000, "w_max": None, "frequency_shift": "discrete"},
    "output": {"path": "-", "format": "csv"},
    "options": {"weak_coupling": True, "plot": False, "with_oracle": False,
                "jobs": 1},
}

_GRID_KEYS = {
    "evolve": {"t_max", "num_points"},
    "oracle-compare": {"t_max", "num_points"},
    "kernel-dump": {"t_max", "num_points"},
    "scan": {"variable", "start", "stop", "num", "spacing"},
}


def _merge_strict(base: dict, user: dict, path: str = "") -> dict:
    out = dict(base)
    for key, val in user.items():
        here = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown config key '{here}'")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"config section '{here}' must be a mapping")
            out[key] = _merge_strict(base[key], val, here)
        else:
            out[key] = val
    return out


def _apply_set(config: dict, assignment: str) -> None:
    if "=" not in assignment:
        raise ConfigError(f"--set needs key=value, got '{assignment}'")
    key, raw = assignment.split("=", 1)
    parts = key.strip().split(".")
    node = config
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(f"unknown config key '{key}'")
        node = node[part]
    leaf = parts[-1]
    if not isinstance(node, dict) or leaf not in node:
        raise ConfigError(f"unknown config key '{key}'")
    if isinstance(node[leaf], dict):
        raise ConfigError(f"'{key}' is a section, not a value")
    try:
        node[leaf] = json.loads(raw)
    except json.JSONDecodeError:
        node[leaf] = raw


def load_config(path: str | None, sets: list[str], command: str,
                args: argparse.Namespace) -> dict:
    config = json.loads(json.dumps(_DEFAULT_CONFIG))  # deep copy
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                user = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"config parse error at line {exc.lineno}, column {exc.colno}: "
                f"{exc.msg}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
        config = _merge_strict(config, user)
    for assignment in sets:
        _apply_set(config, assignment)
    if args.output is not None:
        config["output"]["path"] = args.output
    if args.format is not None:
        config["output"]["format"] = args.format
    if args.plot:
        config["options"]["plot"] = True
    if getattr(args, "with_oracle", None) is not None:
        config["options"]["with_oracle"] = True
        config["oracle"]["N"] = args.with_oracle
    if getattr(args, "jobs", None) is not None:
        config["options"]["jobs"] = args.jobs
    _validate(config, command)
    return config


def _validate(config: dict, command: str) -> None:
    stats = config["model"]["statistics"]
    if stats not in ("fermi", "bose"):
        raise ConfigError("model.statistics must be 'fermi' or 'bose'")
    fmt = config["output"]["format"]
    if fmt not in ("csv", "json"):
        raise ConfigError("output.format must be 'csv' or 'json'")
    grid = config["grid"]
    if command == "scan":
        if grid["variable"] not in ("T", "g0", "mu"):
            raise ConfigError("grid.variable must be one of T, g0, mu")
        if not (isinstance(grid["num"], int) and grid["num"] >= 2):
            raise ConfigError("grid.num must be an integer >= 2")
        if grid["spacing"] not in ("linear", "log"):
            raise ConfigError("grid.spacing must be 'linear' or 'log'")
        if grid["variable"] in ("T", "g0") and grid["start"] <= 0:
            raise ConfigError(f"grid.start must be > 0 for a {grid['variable']} scan")
        if grid["spacing"] == "log" and grid["start"] <= 0:
            raise ConfigError("log spacing requires positive grid.start")
    else:
        if grid["t_max"] is None or grid["t_max"] <= 0:
            raise ConfigError("grid.t_max must be positive")
    if config["options"]["plot"] and config["output"]["path"] in ("-", ""):
        raise ConfigError("--plot needs a file output path, not stdout")
    jobs = config["options"]["jobs"]
    if not (isinstance(jobs, int) and jobs >= 1):
        raise ConfigError("options.jobs must be an integer >= 1")


def _params_from_config(config: dict) -> ModelParams:
    m = config["model"]
    try:
        return ModelParams(
            Omega=float(m["Omega"]), g0=float(m["g0"]), gamma=float(m["gamma"]),
            T=float(m["T"]), mu=float(m["mu"]),
            statistics=BathStatistics(m["statistics"]), n0=float(m["n0"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from exc


def _spec_from_config(config: dict) -> QuadratureSpec:
    q = config["quadrature"]
    try:
        return QuadratureSpec(rel_tol=float(q["rel_tol"]),
                              abs_tol=float(q["abs_tol"]),
                              max_panels=int(q["max_panels"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid quadrature settings: {exc}") from exc


@dataclass
class _Table:
    columns: list
    rows: list
    meta: dict


def _time_grid(config: dict, params: ModelParams) -> np.ndarray:
    grid = config["grid"]
    if grid["num_points"]:
        return np.linspace(0.0, float(grid["t_max"]), int(grid["num_points"]))
    return default_time_grid(params, float(grid["t_max"]))


class _NumericalFailure(Exception):
    def __init__(self, operation, exc):
        super().__init__(f"numerical failure in {operation}: {exc}")


def _run(operation: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (FermibathError, ArithmeticError, ValueError) as exc:
        raise _NumericalFailure(operation, exc) from exc


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def _cmd_evolve(config: dict) -> _Table:
    params = _params_from_config(config)
    spec = _spec_from_config(config)
    roots = _run("compute_roots", compute_roots, params)
    times = _time_grid(config, params)

    columns = ["time", "n_exact", "n_weak_coupling"]
    oracle_vals = None
    if config["options"]["with_oracle"]:
        columns.append("n_oracle")
        bath = _run("discretize_bath", discretize_bath, params,
                    int(config["oracle"]["N"]),
                    config["oracle"]["w_max"])
        traj = _run("propagate_occupation", propagate_occupation, bath, params,
                    times, config["oracle"]["frequency_shift"])
        oracle_vals = traj.values
    columns += ["lambda", "D_plus", "D_minus"]

    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for i, t in enumerate(times):
            row = {
                "time": float(t),
                "n_exact": _run(f"occupation(t={t:g})", occupation,
                                t, params, roots, spec),
                "n_weak_coupling": _run(f"occupation_weak_coupling(t={t:g})",
                                        occupation_weak_coupling, t, params, spec)
                if config["options"]["weak_coupling"] else float("nan"),
                "lambda": _run(f"friction(t={t:g})", friction, t, roots, params),
                "D_plus": _run(f"diffusion(t={t:g})", diffusion, t, PLUS_MINUS,
                               roots, params, spec),
                "D_minus": _run(f"diffusion(t={t:g})", diffusion, t, MINUS_PLUS,
                                roots, params, spec),
            }
            if oracle_vals is not None:
                row["n_oracle"] = float(oracle_vals[i])
            rows.append(row)
    return _Table(columns=columns, rows=rows, meta={})


def _scan_point(value: float, variable: str, config: dict):
    """All asymptotic observables at one scan point, for both statistics."""
    base = _params_from_config(config)
    spec = _spec_from_config(config)
    kwargs = {"Omega": base.Omega, "g0": base.g0, "gamma": base.gamma,
              "T": base.T, "mu": base.mu, "n0": base.n0}
    kwargs[variable] = value
    fermi = ModelParams(statistics=BathStatistics.FERMI, **kwargs)
    bose_kwargs = dict(kwargs, mu=min(kwargs["mu"], 0.0))
    bose = ModelParams(statistics=BathStatistics.BOSE, **bose_kwargs)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sf = _run(f"equilibrium_summary({variable}={value:g}, fermi)",
                  equilibrium_summary, fermi, None, spec)
        sb = _run(f"equilibrium_summary({variable}={value:g}, bose)",
                  equilibrium_summary, bose, None, spec)
        low_f = low_temperature_asymptote(fermi)
        low_b = low_temperature_asymptote(bose)
    ratio = sf.n_infinity / sb.n_infinity if sb.n_infinity != 0 else float("inf")
    return {
        variable: float(value),
        "n_inf_fermi": sf.n_infinity,
        "n_inf_bose": sb.n_infinity,
        "fermi_dirac": sf.reference_thermal,
        "bose_einstein": sb.reference_thermal,
        "low_t_fermi": low_f,
        "low_t_bose": low_b,
        "tanh_ratio": statistics_ratio(fermi.T, fermi.Omega),
        "ratio_fermi_bose": ratio,
        "lambda_inf": sf.lambda_infinity,
        "d_plus_inf_fermi": sf.D_plus_infinity,
        "d_minus_inf_fermi": sf.D_minus_infinity,
        "d_plus_inf_bose": sb.D_plus_infinity,
        "d_minus_inf_bose": sb.D_minus_infinity,
    }


def _cmd_scan(config: dict) -> _Table:
    grid = config["grid"]
    variable = grid["variable"]
    if grid["spacing"] == "log":
        values = np.geomspace(float(grid["start"]), float(grid["stop"]),
                              int(grid["num"]))
    else:
        values = np.linspace(float(grid["start"]), float(grid["stop"]),
                             int(grid["num"]))
    jobs = int(config["options"]["jobs"])
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda v: _scan_point(v, variable, config),
                                 values))
    else:
        rows = [_scan_point(v, variable, config) for v in values]
    columns = list(rows[0].keys())
    return _Table(columns=columns, rows=rows, meta={"scan_variable": variable})


def _cmd_oracle_compare(config: dict) -> _Table:
    params = _params_from_config(config)
    spec = _spec_from_config(config)
    roots = _run("compute_roots", compute_roots, params)
    bath = _run("discretize_bath", discretize_bath, params,
                int(config["oracle"]["N"]), config["oracle"]["w_max"])
    t_max = min(float(config["grid"]["t_max"]), bath.t_recurrence / 2)
    num = int(config["grid"]["num_points"] or 81)
    times = np.linspace(0.0, t_max, num)

    state = _run("one_body_eigendecomposition", OneBodyState.from_bath,
                 bath, params, config["oracle"]["frequency_shift"])
    traj = _run("propagate_occupation", propagate_occupation, bath, params,
                times, state=state)
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for t, n_o in zip(times, traj.values):
            n_a = _run(f"occupation(t={t:g})", occupation, t, params, roots, spec)
            rows.append({"time": float(t), "n_analytic": n_a,
                         "n_oracle": float(n_o),
                         "abs_error": abs(n_a - float(n_o))})
    meta = {"oracle_N": bath.N, "oracle_w_max": bath.w_max,
            "t_recurrence": bath.t_recurrence,
            "frequency_shift": config["oracle"]["frequency_shift"]}
    return _Table(columns=["time", "n_analytic", "n_oracle", "abs_error"],
                  rows=rows, meta=meta)


def _cmd_kernel_dump(config: dict) -> _Table:
    params = _params_from_config(config)
    num = int(config["grid"]["num_points"] or 200)
    times = np.linspace(0.0, float(config["grid"]["t_max"]), num)
    rows = [{"time": float(t),
             "kernel": memory_kernel(t, params),
             "kernel_integral": memory_kernel_integral(t, params)}
            for t in times]
    return _Table(columns=["time", "kernel", "kernel_integral"], rows=rows,
                  meta={})


_COMMANDS = {
    "evolve": _cmd_evolve,
    "scan": _cmd_scan,
    "oracle-compare": _cmd_oracle_compare,
    "kernel-dump": _cmd_kernel_dump,
}


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))   # shortest round-trip representation
    return str(value)


def _meta_lines(command: str, config: dict, table: _Table) -> list[str]:
    relevant = {k: v for k, v in config.items()}
    relevant["grid"] = {k: v for k, v in config["grid"].items()
                        if k in _GRID_KEYS[command]}
    if command not in ("oracle-compare",) and not config["options"]["with_oracle"]:
        relevant.pop("oracle", None)
    lines = [
        f"# fermibath {__version__}",
        f"# command: {command}",
        f"# config: {json.dumps(relevant, sort_keys=True, separators=(',', ':'))}",
    ]
    for key in sorted(table.meta):
        lines.append(f"# {key}: {_fmt(table.meta[key])}")
    lines.append(f"# columns: {','.join(table.columns)}")
    return lines


def write_csv(table: _Table, command: str, config: dict, stream) -> None:
    for line in _meta_lines(command, config, table):
        stream.write(line + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(row[c]) for c in table.columns])


def write_json(table: _Table, command: str, config: dict, stream) -> None:
    doc = {
        "meta": {
            "tool": f"fermibath {__version__}",
            "command": command,
            "config": config,
            **table.meta,
            "columns": table.columns,
        },
        "rows": [{c: row[c] for c in table.columns} for row in table.rows],
    }
    json.dump(doc, stream, indent=1, sort_keys=True, default=float)
    stream.write("\n")


def _write_output(table: _Table, command: str, config: dict) -> None:
    path = config["output"]["path"]
    fmt = config["output"]["format"]
    buf = io.StringIO()
    if fmt == "json":
        write_json(table, command, config, buf)
    else:
        write_csv(table, command, config, buf)
    if path in ("-", ""):
        sys.stdout.write(buf.getvalue())
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())

    if config["options"]["plot"]:
        from . import plots  # deferred: matplotlib import is slow
        base = path.rsplit(".", 1)[0] if "." in path.split("/")[-1] else path
        fig_path = base + ".png"
        title = f"{command}  ({config['model']['statistics']})"
        if command == "evolve":
            plots.plot_evolution(table.rows, table.columns, fig_path, title)
        elif command == "scan":
            plots.plot_scan(table.rows, table.columns,
                            table.meta["scan_variable"], fig_path, title)
        elif command == "oracle-compare":
            plots.plot_oracle_compare(table.rows, table.columns, fig_path, title)
        else:
            plots.plot_kernel(table.rows, table.columns, fig_path, title)


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermibath",
        description=("Exact relaxation of a two-level collective mode coupled "
                     "to a Drude-cutoff Fermi or Bose heat bath."))
    parser.add_argument("--version", action="version",
                        version=f"fermibath {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("evolve", "occupation and transport trajectory table"),
            ("scan", "asymptotic observables against T, g0 or mu"),
            ("oracle-compare", "analytic n(t) vs discretized-bath propagation"),
            ("kernel-dump", "memory kernel K(t) and its running integral")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-c", "--config", default=None,
                       help="JSON configuration file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config entry, e.g. model.T=0.5")
        p.add_argument("-o", "--output", default=None,
                       help="output path ('-' for stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--plot", action="store_true",
                       help="render a PNG figure next to the output table")
        if name == "evolve":
            p.add_argument("--with-oracle", type=int, nargs="?", const=4000,
                           default=None, metavar="N",
                           help="add a discrete-bath oracle column (N modes)")
        if name == "scan":
            p.add_argument("--jobs", type=int, default=None,
                           help="parallel workers for scan points")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, args.set, args.command, args)
    except ConfigError as exc:
        print(f"fermibath: config error: {exc}", file=sys.stderr)
        return 2

    try:
        table = _COMMANDS[args.command](config)
        _write_output(table, args.command, config)
    except _NumericalFailure as exc:
        print(f"fermibath: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"fermibath: config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
