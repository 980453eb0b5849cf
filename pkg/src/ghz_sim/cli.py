"""Command-line front end: ``ghz-sim validate | ghz | sweep``.

Unit convention at the boundary: frequency inputs labelled "MHz" are angular
frequencies with 1 MHz = 1e6 rad/s, and times are in microseconds. (The
protocol's t_1 = pi sqrt(15) / (4 Omega) only reproduces 0.34 us for
Omega = 8.95 MHz under this angular reading.) Set ``"units": "si"`` in the
config to pass rad/s and seconds through unchanged.

All emitted numbers go through one fixed 12-significant-digit lowercase
scientific format, so output files are byte-deterministic for a fixed config.

Exit codes: 0 success, 1 check or accuracy failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

import numpy as np

from . import checks as checks_mod
from .errors import AccuracyError, ConfigurationError, TruncationError
from .fock_core import HilbertShape, ION_LABELS
from .ghz_protocol import (ghz_schedule, parse_label, protocol_timeseries,
                           sweep)
from .hamiltonian import SystemParams

MHZ = 1e6   # angular rad/s per "MHz" at the config boundary
US = 1e-6   # seconds per microsecond

FREQ_KEYS = ("Omega", "g", "nu", "omega_0", "omega_c", "omega_L")

DEFAULT_CONFIG = {
    "units": "mhz",
    # scaled resonant hierarchy: nu = 20 Omega, omega_0 = 200 nu
    "Omega": 8.95,
    "g": None,            # null -> tune for the GHZ condition
    "eta_L": 0.05,
    "eta_c": 0.05,
    "nu": 179.0,
    "omega_0": 35800.0,
    "omega_c": 35621.0,
    "omega_L": 35800.0,
    "phi": 0.0,
    "model": "block",
    "shape": "6x6",
    "initial": "g,0,0",
    "p": 1,
    "m": 1,
    "n": 1,
    "t": None,            # optional explicit pulse time (us, or s for si units)
    "dt": None,           # lab-frame integrator step (us / s)
    "n_times": 101,
    "format": "csv",
    "output": "ghz_series.csv",
}

MODEL_ALIASES = {"block": "block_analytic", "ld": "ld_full",
                 "rwa": "rwa_full", "lab": "lab_frame"}


def fmt(x: float) -> str:
    """Fixed float formatting: 12 significant digits, lowercase scientific."""
    return f"{float(x):.11e}"


def load_config(path: str | None, overrides: dict) -> dict:
    config = dict(DEFAULT_CONFIG)
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            try:
                loaded = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigurationError(f"config {path}: invalid JSON ({exc})")
        if not isinstance(loaded, dict):
            raise ConfigurationError(f"config {path}: expected a JSON object")
        unknown = set(loaded) - set(DEFAULT_CONFIG)
        if unknown:
            raise ConfigurationError(
                f"config {path}: unknown field(s) {sorted(unknown)}")
        config.update(loaded)
    # flags win over file values
    config.update({k: v for k, v in overrides.items() if v is not None})
    return config


def parse_shape(text: str) -> HilbertShape:
    try:
        vib, cav = text.lower().split("x")
        return HilbertShape(vib_dim=int(vib), cav_dim=int(cav))
    except (ValueError, TypeError):
        raise ConfigurationError(f"bad shape {text!r}, expected e.g. '6x6'")


def build_params(config: dict) -> tuple[SystemParams, bool]:
    """SystemParams in internal units plus a flag for 'tune the coupling'."""
    units = config.get("units", "mhz")
    if units not in ("mhz", "si"):
        raise ConfigurationError(f"units must be 'mhz' or 'si', got {units!r}")
    scale = MHZ if units == "mhz" else 1.0
    tune = config["g"] is None
    values = {}
    for key in FREQ_KEYS:
        raw = config[key]
        values[key] = 0.0 if raw is None else float(raw) * scale
    try:
        params = SystemParams(eta_L=float(config["eta_L"]),
                              eta_c=float(config["eta_c"]),
                              phi=float(config["phi"]), **values)
    except ValueError as exc:
        raise ConfigurationError(str(exc))
    return params, tune


def config_time(config: dict, key: str) -> float | None:
    raw = config.get(key)
    if raw is None:
        return None
    scale = US if config.get("units", "mhz") == "mhz" else 1.0
    return float(raw) * scale


def resolve_model(name: str) -> str:
    if name in MODEL_ALIASES:
        return MODEL_ALIASES[name]
    if name in MODEL_ALIASES.values():
        return name
    raise ConfigurationError(
        f"unknown model {name!r}; choose from {sorted(MODEL_ALIASES)}")


def sweep_threads() -> int | None:
    raw = os.environ.get("GHZ_SIM_THREADS")
    if raw is None:
        return None
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigurationError(f"GHZ_SIM_THREADS must be an integer, got {raw!r}")


# ---------------------------------------------------------------------------
# table writing / reading
# ---------------------------------------------------------------------------

def write_table(path: str, columns: list[str], rows: list[list[float]],
                file_format: str):
    if file_format == "csv":
        lines = [",".join(columns)]
        lines += [",".join(fmt(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    elif file_format == "json":
        payload = {"columns": columns,
                   "rows": [[float(fmt(v)) for v in row] for row in rows]}
        text = json.dumps(payload, indent=1) + "\n"
    else:
        raise ConfigurationError(f"unknown output format {file_format!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_table(path: str, file_format: str | None = None
               ) -> tuple[list[str], list[list[float]]]:
    """Re-parse a file written by :func:`write_table`."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if file_format is None:
        file_format = "json" if text.lstrip().startswith("{") else "csv"
    if file_format == "json":
        payload = json.loads(text)
        return list(payload["columns"]), [list(map(float, r))
                                          for r in payload["rows"]]
    lines = [ln for ln in text.splitlines() if ln]
    columns = lines[0].split(",")
    return columns, [[float(v) for v in ln.split(",")] for ln in lines[1:]]


def _label_sort_key(label: str) -> tuple[int, int, int]:
    s, m, n = label.split(",")
    return (ION_LABELS.index(s), int(m), int(n))


def series_table(series) -> tuple[list[str], list[list[float]]]:
    """Flatten (t, FidelityReport) rows into fixed columns; the union of all
    populated labels becomes pop_* columns in basis-index order. Times are
    emitted in microseconds regardless of the input unit system."""
    labels = sorted({lbl for _, rep in series for lbl in rep.populations},
                    key=_label_sort_key)
    columns = (["t_us"]
               + [f"pop_{lbl.replace(',', '_')}" for lbl in labels]
               + ["fidelity", "norm", "block_leakage"])
    rows = []
    for t, rep in series:
        rows.append([t / US]
                    + [rep.populations.get(lbl, 0.0) for lbl in labels]
                    + [rep.fidelity, rep.norm, rep.block_leakage])
    return columns, rows


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    if args.list:
        for name in checks_mod.CHECK_NAMES:
            print(name)
        return 0
    results = checks_mod.run_checks(fault=args.inject_fault)
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name} measured={fmt(res.measured)} "
              f"threshold={fmt(res.threshold)} ({res.detail})")
    failed = [res.name for res in results if not res.passed]
    if failed:
        print(f"validate: {len(failed)} check(s) failed: {', '.join(failed)}")
        return 1
    print(f"validate: all {len(results)} checks passed")
    return 0


def cmd_ghz(args) -> int:
    config = load_config(args.config, {
        "model": args.model, "shape": args.shape, "p": args.p,
        "format": args.format, "output": args.output,
    })
    params, tune = build_params(config)
    shape = parse_shape(config["shape"])
    model = resolve_model(config["model"])
    initial = parse_label(config["initial"])
    m, n, p = int(config["m"]), int(config["n"]), int(config["p"])

    schedule = ghz_schedule(params, m=m, n=n, p=p, shape=shape, tune=tune)
    explicit_t = config_time(config, "t")
    if explicit_t is not None:
        schedule = replace(schedule, t_p=explicit_t,
                           a_t_product=schedule.block.a * explicit_t)
    run_params = replace(params, g=schedule.tuned_g)

    n_times = int(config["n_times"])
    times = np.linspace(0.0, schedule.t_p, n_times)
    series = protocol_timeseries(run_params, initial, model, schedule, times,
                                 shape=shape, dt=config_time(config, "dt"))

    columns, rows = series_table(series)
    write_table(config["output"], columns, rows, config["format"])

    final = series[-1][1]
    print(f"ghz model={model} initial={config['initial']} p={schedule.p} "
          f"t_p={fmt(schedule.t_p / US)} us "
          f"tuned_g={fmt(schedule.tuned_g / MHZ)} MHz "
          f"fidelity={fmt(final.fidelity)} block_leakage={fmt(final.block_leakage)} "
          f"output={config['output']}")
    return 0


def parse_values(text: str) -> list[float]:
    """Axis values: '0.1,0.2,0.3' or an inclusive range 'start:stop:step'."""
    text = text.strip().strip("{}")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigurationError(
                f"bad range {text!r}, expected 'start:stop:step'")
        start, stop, step = (float(v) for v in parts)
        if step <= 0:
            raise ConfigurationError("range step must be > 0")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(max(count, 0))]
    values = [float(v) for v in text.split(",") if v.strip()]
    if not values:
        raise ConfigurationError(f"no values in {text!r}")
    return values


def cmd_sweep(args) -> int:
    config = load_config(args.config, {
        "model": args.model, "shape": args.shape, "p": args.p,
        "format": args.format, "output": args.output,
    })
    params, tune = build_params(config)
    shape = parse_shape(config["shape"])
    model = resolve_model(config["model"])
    initial = parse_label(config["initial"])
    values = parse_values(args.values)
    if args.axis == "dt":
        scale = US if config.get("units", "mhz") == "mhz" else 1.0
        values = [v * scale for v in values]

    points = sweep(params, args.axis, values, initial, model, shape=shape,
                   m=int(config["m"]), n=int(config["n"]), p=int(config["p"]),
                   dt=config_time(config, "dt"), tune=not args.no_tune,
                   threads=sweep_threads())

    labels = sorted({lbl for pt in points for lbl in pt.report.populations},
                    key=_label_sort_key)
    columns = ([args.axis, "t_p_us", "tuned_g_MHz",
                "fidelity", "norm", "block_leakage"]
               + [f"pop_{lbl.replace(',', '_')}" for lbl in labels])
    rows = []
    for pt in points:
        rows.append([pt.value, pt.t_p / US, pt.tuned_g / MHZ,
                     pt.report.fidelity, pt.report.norm, pt.report.block_leakage]
                    + [pt.report.populations.get(lbl, 0.0) for lbl in labels])
    write_table(config["output"], columns, rows, config["format"])
    print(f"sweep axis={args.axis} points={len(points)} model={model} "
          f"output={config['output']}")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghz-sim",
        description="Simulate single-step tripartite GHZ generation for a "
                    "trapped ion in an optical cavity.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--output", help="output file path")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--model", help="block | ld | rwa | lab")
    common.add_argument("--shape", help="truncation, e.g. 6x6 (vib x cav)")
    common.add_argument("--p", type=int, help="pulse index p >= 1")

    p_val = sub.add_parser("validate", help="run the consistency checks")
    p_val.add_argument("--list", action="store_true",
                       help="print check names without running")
    p_val.add_argument("--inject-fault", choices=("o_k",),
                       help="test hook: perturb an internal operator")
    p_val.set_defaults(handler=cmd_validate)

    p_ghz = sub.add_parser("ghz", parents=[common],
                           help="run one GHZ pulse and write the time series")
    p_ghz.set_defaults(handler=cmd_ghz)

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="run the protocol across one parameter axis")
    p_sweep.add_argument("axis", help="one of eta_c, eta_L, phi, p, vib_dim, "
                                      "cav_dim, dt")
    p_sweep.add_argument("values", help="comma list '0.02,0.05' or range "
                                        "'0:1.5:0.25'")
    p_sweep.add_argument("--no-tune", action="store_true",
                         help="keep g fixed instead of retuning per point")
    p_sweep.set_defaults(handler=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (AccuracyError, TruncationError) as exc:
        print(f"ghz-sim: {exc}", file=sys.stderr)
        return 1
    except (ConfigurationError, ValueError, IndexError) as exc:
        print(f"ghz-sim: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ghz-sim: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
