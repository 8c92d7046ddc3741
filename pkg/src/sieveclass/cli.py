"""Command-line interface: ``sieveclass <command> [options]``.

Exit codes: 0 success, 2 argument error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from ._parallel import default_threads
from .arfit import fit_cv, select_order_cv
from .basis import BasisFamily
from .bench import BenchmarkCell, run_benchmark, sweep_cells
from .classify import (TrainConfig, TrainedClassifier, predict, prepare_values,
                       stationarity_statistic, stationarity_test, train)
from .errors import ArgumentError, DataError, SieveClassError
from .io import (fmt, read_manifest, read_series, write_cv_table, write_features, write_manifest,
                 write_rows, write_series)
from .oracle import AutocovModel, ModelKind, population_curves
from .simgen import SimulationSpec, generate_cohort


def parse_grid(text: str) -> tuple:
    """``"1-8"`` or ``"1,2,4"`` (or a mix) to a sorted tuple of integers."""
    out = set()
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                lo, hi = part.split("-")
                out.update(range(int(lo), int(hi) + 1))
            elif part:
                out.add(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer grid {text!r}")
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError(f"grid {text!r} must list positive integers")
    return tuple(sorted(out))


def parse_floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}")


def on_off(text: str) -> bool:
    if text.lower() in ("on", "true", "1", "yes"):
        return True
    if text.lower() in ("off", "false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError("expected on or off")


def _add_fit_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--b-grid", type=parse_grid, default=parse_grid("1-8"))
    p.add_argument("--c-grid", type=parse_grid, default=parse_grid("1-8"))
    p.add_argument("--basis", choices=[f.value for f in BasisFamily], default="legendre")
    p.add_argument("--grid-size", type=int, default=201, help="feature grid on [0, 1]")
    p.add_argument("--intercept", action="store_true", help="add a smooth intercept block")
    p.add_argument("--standardize", choices=["auto", "on", "off"], default="auto",
                   help="auto: on unless the manifest comes from 'simulate'")
    p.add_argument("--threads", type=int, default=None)


def _add_train_options(p: argparse.ArgumentParser, pretest_default: str) -> None:
    _add_fit_options(p)
    p.add_argument("--M", type=int, default=1000, help="threshold grid resolution")
    p.add_argument("--pretest", type=on_off, default=on_off(pretest_default))
    p.add_argument("--level", type=float, default=0.05, help="pretest level")
    p.add_argument("--bootstrap", type=int, default=200)
    p.add_argument("--pretest-max-series", type=int, default=None)
    p.add_argument("--prescreen", type=on_off, default=False)
    p.add_argument("--bandwidth", type=float, default=0.1)
    p.add_argument("--margin", type=float, default=3.0)
    p.add_argument("--seed", type=int, default=0)


def _standardize(args, manifest: dict | None) -> bool:
    if args.standardize != "auto":
        return args.standardize == "on"
    return not (manifest and manifest.get("source") == "simulated")


def _config(args, manifest=None) -> TrainConfig:
    return TrainConfig(
        b_grid=args.b_grid, c_grid=args.c_grid, basis=args.basis,
        M=getattr(args, "M", 1000), grid_size=args.grid_size, intercept=args.intercept,
        standardize=_standardize(args, manifest), pretest=getattr(args, "pretest", False),
        pretest_level=getattr(args, "level", 0.05), bootstrap=getattr(args, "bootstrap", 200),
        pretest_max_series=getattr(args, "pretest_max_series", None),
        prescreen=getattr(args, "prescreen", False), bandwidth=getattr(args, "bandwidth", 0.1),
        margin=getattr(args, "margin", 3.0), seed=getattr(args, "seed", 0),
        threads=args.threads or default_threads())


def _load_inputs(args):
    if getattr(args, "manifest", None):
        return read_manifest(args.manifest)
    if not args.series:
        raise ArgumentError("give --manifest or one or more series files")
    return [read_series(Path(p)) for p in args.series], None


# ------------------------------------------------------------------ commands

def cmd_simulate(args) -> int:
    template = SimulationSpec(args.model, args.noise, args.delta, args.n)
    records = generate_cohort(template, args.n1, args.n2, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for rec in records:
        name = f"{rec.id}.csv"
        write_series(out / name, rec.values)
        entries.append({"id": rec.id, "path": name, "label": rec.label, "seed": rec.seed})
    config = {"model": args.model, "noise": args.noise, "delta": args.delta, "n": args.n,
              "n1": args.n1, "n2": args.n2, "seed": args.seed}
    write_manifest(out / "manifest.json", entries, config, "simulated")
    print(f"wrote {len(records)} series to {out}", file=sys.stderr)
    return 0


def cmd_train(args) -> int:
    records, manifest = read_manifest(args.manifest)
    config = _config(args, manifest)
    model = train(records, config)
    Path(args.model_out).write_text(model.to_json() + "\n")
    if args.features_out:
        write_features(Path(args.features_out), model.training_features)
    acc = model.training_accuracy
    print(f"mode={model.mode.value}"
          + ("" if acc is None else f" training_accuracy={acc:.4f}"), file=sys.stderr)
    return 0


def cmd_predict(args) -> int:
    model = TrainedClassifier.from_json(Path(args.model).read_text())
    model.config.threads = 1
    records, _ = _load_inputs(args)
    rows = []
    for rec in records:
        p = predict(model, rec)
        rows.append([p.series_id, p.label, p.mode.value, p.source, p.S_z, p.S_xz, p.S_yz,
                     p.b, p.c, p.tie, rec.label or ""])
    header = ["series_id", "predicted_label", "mode", "source", "S_z", "S_xz", "S_yz",
              "b", "c", "tie", "true_label"]
    _emit(args.out, header, rows)
    return 0


def cmd_features(args) -> int:
    records, manifest = _load_inputs(args)
    config = replace(_config(args, manifest), pretest=False)
    if any(r.label is None for r in records) or len({r.label for r in records}) < 2:
        raise DataError("feature export needs a labeled manifest with both classes")
    model = train(records, config)
    write_features(Path(args.out), model.training_features)
    if args.cv_dir:
        cv_dir = Path(args.cv_dir)
        cv_dir.mkdir(parents=True, exist_ok=True)
        for rec in records:
            sel = select_order_cv(prepare_values(rec, config), config.b_grid, config.c_grid,
                                  config.basis, config.intercept)
            write_cv_table(cv_dir / f"{rec.id}.csv", sel.cv_table)
    return 0


def cmd_test_stationarity(args) -> int:
    records, manifest = _load_inputs(args)
    config = _config(args, manifest)
    rows = []
    for k, rec in enumerate(records):
        z = prepare_values(rec, config)
        fit = fit_cv(z, config.b_grid, config.c_grid, config.basis, config.intercept)
        p = stationarity_test(z, fit, args.bootstrap, args.seed + k, config.grid_size,
                               config.c_grid)
        rows.append([rec.id, fit.b, fit.c, stationarity_statistic(fit, config.grid_size), p,
                     p < args.level])
    _emit(args.out, ["series_id", "b", "c", "T", "p_value", "reject"], rows)
    return 0


_SAFE = {"cos": np.cos, "sin": np.sin, "exp": np.exp, "pi": math.pi, "sqrt": np.sqrt}


def _coefficient(expr: str):
    code = compile(expr, "<coef>", "eval")
    bad = [n for n in code.co_names if n not in _SAFE and n != "t"]
    if bad:
        raise ArgumentError(f"unsupported names in coefficient expression: {bad}")
    return lambda t: float(eval(code, {"__builtins__": {}}, dict(_SAFE, t=t)))


def cmd_oracle(args) -> int:
    model = AutocovModel(ModelKind(args.kind), _coefficient(args.coef))
    curves = population_curves(model, args.b, args.grid_size)
    t = np.linspace(0.0, 1.0, args.grid_size)
    header = ["t"] + [f"phi_{j}" for j in range(1, args.b + 1)]
    _emit(args.out, header, [[ti] + list(row) for ti, row in zip(t, curves)])
    if args.features_out:
        dstar = curves.max(axis=0) - curves.min(axis=0)
        write_rows(Path(args.features_out), ["j", "D_star"],
                   [(j, d) for j, d in enumerate(dstar, start=1)])
    return 0


def cmd_benchmark(args) -> int:
    base = BenchmarkCell(args.model, args.noise, args.delta, args.n, args.n1, args.n2, args.n_test)
    cells = sweep_cells(base, args.sweep, args.values or [])
    config = _config(args, {"source": "simulated"})
    threads = args.threads or default_threads()
    results = run_benchmark(cells, args.reps, config, args.seed, threads)
    header = ["model", "noise", "delta", "n", "n1", "n2", "n_test", "reps", "mean_accuracy",
              "std_accuracy", "failures", "table_entry"]
    rows = [[r.cell.model_id, r.cell.noise_id, r.cell.delta, r.cell.n, r.cell.n1, r.cell.n2,
             r.cell.n_test, r.reps, r.mean, r.std, r.failures, r.formatted()] for r in results]
    _emit(args.out, header, rows)
    return 0


def _emit(out, header, rows) -> None:
    if out and out != "-":
        write_rows(Path(out), header, rows)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sieveclass", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a labeled two-class cohort")
    p.add_argument("--model", type=int, required=True, choices=range(1, 7))
    p.add_argument("--noise", type=int, default=1, choices=(1, 2, 3))
    p.add_argument("--delta", type=float, default=0.2)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--n1", type=int, default=100)
    p.add_argument("--n2", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("train", help="train a classifier from a labeled manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model-out", default="model.json")
    p.add_argument("--features-out", default=None)
    _add_train_options(p, pretest_default="on")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="label series with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", default=None)
    p.add_argument("series", nargs="*")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("features", help="export per-series lag features")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--cv-dir", default=None, help="also write each series' CV table here")
    p.set_defaults(series=[])
    _add_fit_options(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("test-stationarity", help="bootstrap test for constant AR coefficients")
    p.add_argument("--manifest", default=None)
    p.add_argument("series", nargs="*")
    p.add_argument("--bootstrap", type=int, default=200)
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    _add_fit_options(p)
    p.set_defaults(func=cmd_test_stationarity)

    p = sub.add_parser("oracle", help="population AR coefficients of a closed-form model")
    p.add_argument("--kind", choices=[k.value for k in ModelKind if k is not ModelKind.CUSTOM],
                   required=True)
    p.add_argument("--coef", required=True, help="a(t) as an expression in t, e.g. '0.5+0.3*t'")
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--grid-size", type=int, default=201)
    p.add_argument("--out", default="-")
    p.add_argument("--features-out", default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("benchmark", help="Monte-Carlo accuracy table for a simulation model")
    p.add_argument("--model", type=int, required=True, choices=range(1, 7))
    p.add_argument("--noise", type=int, default=1, choices=(1, 2, 3))
    p.add_argument("--delta", type=float, default=0.2)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--n1", type=int, default=100)
    p.add_argument("--n2", type=int, default=100)
    p.add_argument("--n-test", type=int, default=25)
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--sweep", choices=["none", "delta", "kappa", "n"], default="none")
    p.add_argument("--values", type=parse_floats, default=None)
    p.add_argument("--out", default="-")
    _add_train_options(p, pretest_default="off")
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SieveClassError as exc:
        print(f"sieveclass {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, KeyError) as exc:
        print(f"sieveclass {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
