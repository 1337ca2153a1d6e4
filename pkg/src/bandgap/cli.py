"""Command-line interface.

Four commands:

    bandgap recover  --input series.csv --missing "1..12" --omega 0.25
    bandgap forecast --input past.csv --horizon 3 --gap 12 --n 60 --omega 0.25
    bandgap diagnose --missing "0..2" --omega 0.5
    bandgap simulate --config truncation_sweep.json

Omega is always given as a fraction of pi (0.25 means 0.25*pi).  Results go
to --output (default stdout) as JSON or CSV; every output embeds the
effective configuration and the toolkit version.  Exit codes: 0 success,
2 parse/parameter errors, 3 geometry errors, 4 solver errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from importlib import resources

from . import __version__
from .errors import GeometryError, ParameterError, SolverError
from .forecast import ForecastSpec, forecast
from .kernel import BandLimit
from .lab import ExperimentConfig, run_experiment, write_report_csv, write_report_json
from .masks import IndexWindow, make_mask, parse_missing_spec
from .operators import assemble_operator, diagnostics, eigenvalues
from .recovery import RecoveryProblem, recover
from .series import read_series_csv
from .solvers import SolverConfig

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_GEOMETRY = 3
EXIT_SOLVER = 4


def _omega_from_fraction(frac: float, frac2: float | None = None) -> BandLimit:
    if frac2 is not None:
        return BandLimit.from_pi_fraction((frac, frac2))
    return BandLimit.from_pi_fraction(frac)


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        method=args.solver,
        tol=args.tol,
        max_iter=args.max_iter,
    )


def _index_doc(t) -> dict:
    if isinstance(t, tuple):
        return {"t1": int(t[0]), "t2": int(t[1])}
    return {"t": int(t)}


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)


def _emit(doc: dict, args, csv_rows: list[dict], csv_fields: list[str]) -> None:
    if args.format == "json":
        _write_text(args.output, json.dumps(doc, indent=2) + "\n")
        return
    buf = io.StringIO()
    buf.write(f"# version={doc['version']}\n")
    buf.write(f"# config={json.dumps(doc['config'])}\n")
    writer = csv.DictWriter(buf, fieldnames=csv_fields, extrasaction="ignore")
    writer.writeheader()
    for row in csv_rows:
        writer.writerow(row)
    _write_text(args.output, buf.getvalue())


def _base_doc(command: str, config: dict) -> dict:
    return {"version": __version__, "command": command, "config": config}


# ---------------------------------------------------------------------------
# recover
# ---------------------------------------------------------------------------

def cmd_recover(args) -> int:
    missing = parse_missing_spec(args.missing)
    series, absent = read_series_csv(args.input)
    for t in absent:
        if t not in set(missing):
            missing.append(t)
    mask = make_mask(series.window, missing)
    omega = _omega_from_fraction(args.omega, args.omega2)
    problem = RecoveryProblem(
        series=series, mask=mask, omega=omega, rho=args.rho, solver=_solver_config(args)
    )
    solution = recover(problem)
    report = solution.solve_report
    diag = solution.operator_diagnostics
    config = {
        "input": args.input,
        "missing": args.missing,
        "omega": args.omega,
        "omega2": args.omega2,
        "rho": report.rho,
        "solver": args.solver,
        "tol": args.tol,
        "max_iter": args.max_iter,
    }
    doc = _base_doc("recover", config)
    doc["values"] = [dict(_index_doc(t), value=v) for t, v in solution.values.items()]
    doc["diagnostics"] = {
        "spectral_norm": diag.spectral_norm,
        "min_eig_I_minus_A": diag.min_eig_I_minus_A,
        "symmetry_defect": diag.symmetry_defect,
        "size": diag.size,
        "residual": report.residual,
        "iterations": report.iterations,
        "norm_bound": report.norm_bound,
        "rho": report.rho,
        "method": report.method,
    }
    doc["warnings"] = list(solution.warnings)
    rows = doc["values"]
    fields = ["t1", "t2", "value"] if series.ndim == 2 else ["t", "value"]
    _emit(doc, args, rows, fields)
    return EXIT_OK


# ---------------------------------------------------------------------------
# forecast
# ---------------------------------------------------------------------------

def cmd_forecast(args) -> int:
    past, absent = read_series_csv(args.input)
    if absent:
        raise GeometryError(f"past series has gaps at {absent[:5]}; fill or trim them first")
    if args.dummy == "zero":
        dummy = None
    else:
        dummy, dummy_absent = read_series_csv(args.dummy)
        if dummy_absent:
            raise GeometryError("dummy series has gaps")
    omega = _omega_from_fraction(args.omega)
    spec = ForecastSpec(
        past=past,
        horizon=args.horizon,
        gap=args.gap,
        omega=omega,
        dummy=dummy,
        n=args.n,
        rho=args.rho,
        solver=_solver_config(args),
    )
    result = forecast(spec)
    report = result.solution.solve_report
    config = {
        "input": args.input,
        "horizon": args.horizon,
        "gap": args.gap,
        "n": args.n if dummy is None else dummy.window.hi,
        "dummy": args.dummy,
        "omega": args.omega,
        "rho": report.rho,
        "solver": args.solver,
        "tol": args.tol,
        "max_iter": args.max_iter,
    }
    doc = _base_doc("forecast", config)
    doc["values"] = [
        {"t": t, "value": float(v)} for t, v in enumerate(result.values, start=1)
    ]
    doc["full_gap"] = [
        {"t": t, "value": float(v)} for t, v in enumerate(result.full_gap, start=1)
    ]
    plot_rows = []
    for t in past.window.indices():
        plot_rows.append({"t": t, "value": past.value_at(t), "series": "past", "accepted": ""})
    if dummy is not None:
        for t in dummy.window.indices():
            plot_rows.append({"t": t, "value": dummy.value_at(t), "series": "dummy", "accepted": ""})
    else:
        for t in range(args.gap + 1, config["n"] + 1):
            plot_rows.append({"t": t, "value": 0.0, "series": "dummy", "accepted": ""})
    for t, v in enumerate(result.full_gap, start=1):
        plot_rows.append({
            "t": t, "value": float(v), "series": "forecast",
            "accepted": int(t <= args.horizon),
        })
    doc["plot_data"] = plot_rows
    doc["diagnostics"] = {
        "residual": report.residual,
        "iterations": report.iterations,
        "norm_bound": report.norm_bound,
        "rho": report.rho,
        "spectral_norm": result.solution.operator_diagnostics.spectral_norm,
        "min_eig_I_minus_A": result.solution.operator_diagnostics.min_eig_I_minus_A,
    }
    doc["warnings"] = list(result.solution.warnings)
    _emit(doc, args, plot_rows, ["t", "value", "series", "accepted"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# diagnose
# ---------------------------------------------------------------------------

def _parse_window(text: str | None, missing) -> IndexWindow:
    if text is not None:
        lo_s, hi_s = text.split("..", maxsplit=1)
        return IndexWindow(int(lo_s), int(hi_s))
    if isinstance(missing[0], tuple):
        return IndexWindow(
            (min(t[0] for t in missing), min(t[1] for t in missing)),
            (max(t[0] for t in missing), max(t[1] for t in missing)),
        )
    return IndexWindow(min(missing), max(missing))


def cmd_diagnose(args) -> int:
    omega = _omega_from_fraction(args.omega, args.omega2)
    config = {
        "missing": args.missing,
        "omega": args.omega,
        "omega2": args.omega2,
        "window": args.window,
        "gap_sizes": args.gap_sizes,
    }
    doc = _base_doc("diagnose", config)
    if args.gap_sizes:
        sizes = parse_missing_spec(args.gap_sizes)
        if any(isinstance(s, tuple) or s < 1 for s in sizes):
            raise ParameterError("--gap-sizes must be positive integers")
        rows = []
        for m in sizes:
            mask = make_mask(IndexWindow(1, m), range(1, m + 1))
            diag = diagnostics(assemble_operator(mask, omega))
            rows.append({
                "gap_size": m,
                "spectral_norm": diag.spectral_norm,
                "min_eig_I_minus_A": diag.min_eig_I_minus_A,
            })
        doc["sweep"] = rows
        _emit(doc, args, rows, ["gap_size", "spectral_norm", "min_eig_I_minus_A"])
        return EXIT_OK
    missing = parse_missing_spec(args.missing)
    if not missing:
        raise GeometryError("empty missing set")
    mask = make_mask(_parse_window(args.window, missing), missing)
    op = assemble_operator(mask, omega)
    diag = diagnostics(op)
    spectrum = [float(v) for v in eigenvalues(op)]
    doc["diagnostics"] = {
        "spectral_norm": diag.spectral_norm,
        "min_eig_I_minus_A": diag.min_eig_I_minus_A,
        "symmetry_defect": diag.symmetry_defect,
        "size": diag.size,
        "spectrum": spectrum,
    }
    rows = [{"eigenvalue": v} for v in spectrum]
    _emit(doc, args, rows, ["eigenvalue"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _load_run_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        bundled = resources.files("bandgap").joinpath("configs", path)
        if bundled.is_file():
            return json.loads(bundled.read_text(encoding="utf-8"))
        raise
    except json.JSONDecodeError as exc:
        raise ParameterError(f"malformed config {path}: {exc}") from exc


def cmd_simulate(args) -> int:
    doc = _load_run_config(args.config)
    try:
        config = ExperimentConfig.from_json_dict(doc)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"bad experiment config: {exc}") from exc
    report = run_experiment(config)
    report["version"] = __version__
    report["config_file"] = doc
    if args.format == "json":
        if args.output in (None, "-"):
            json.dump(report, sys.stdout, indent=2)
            sys.stdout.write("\n")
        else:
            write_report_json(report, args.output)
    else:
        if args.output in (None, "-"):
            raise ParameterError("CSV simulate output requires --output PATH")
        write_report_csv(report, args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--solver", choices=("direct", "neumann"), default="direct")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=10_000)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bandgap",
        description="Band-limited recovery of missing samples and short-horizon forecasting.",
    )
    parser.add_argument("--version", action="version", version=f"bandgap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recover", help="recover missing samples in a series file")
    p.add_argument("--input", required=True, help="series CSV (t,value or t1,t2,value)")
    p.add_argument("--missing", required=True, help='missing-set spec, e.g. "1..12" or "0..2 x 0..2"')
    p.add_argument("--omega", type=float, required=True, help="band limit as a fraction of pi")
    p.add_argument("--omega2", type=float, default=None, help="second-axis band limit (2D only)")
    p.add_argument("--rho", type=float, default=None, help="ridge weight (default: auto)")
    _add_solver_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("forecast", help="short-horizon forecast from past samples")
    p.add_argument("--input", required=True, help="past series CSV on {-q..0}")
    p.add_argument("--horizon", type=int, default=3, help="accepted forecast length")
    p.add_argument("--gap", type=int, default=12, help="recovered gap length m > horizon")
    p.add_argument("--n", type=int, default=60, help="outer truncation bound (zero dummy)")
    p.add_argument("--dummy", default="zero", help='"zero" or a CSV on {gap+1..n}')
    p.add_argument("--omega", type=float, default=0.25, help="band limit as a fraction of pi")
    p.add_argument("--rho", type=float, default=0.0)
    _add_solver_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("diagnose", help="gap-operator spectrum for a mask")
    p.add_argument("--missing", default="", help="missing-set spec")
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--omega2", type=float, default=None)
    p.add_argument("--window", default=None, help='window "lo..hi" (default: bounding box)')
    p.add_argument("--gap-sizes", default=None, help='sweep contiguous gaps, e.g. "1..20"')
    _add_common(p)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("simulate", help="run a seeded experiment sweep from a config file")
    p.add_argument("--config", required=True, help="RunConfig JSON (path or bundled name)")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    return parser


def _error(category: str, exc: Exception) -> None:
    sys.stderr.write(json.dumps({"error": {"category": category, "message": str(exc)}}) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ParameterError as exc:
        _error("parameter", exc)
        return EXIT_PARSE
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        _error("parse", exc)
        return EXIT_PARSE
    except GeometryError as exc:
        _error("geometry", exc)
        return EXIT_GEOMETRY
    except SolverError as exc:
        _error("solver", exc)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
