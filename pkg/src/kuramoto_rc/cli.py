"""Command-line entry point ``kuramoto-rc``."""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

from . import __version__
from .config import ALIASES, parse_config
from .dynamics import OrderParameterSeries
from .exceptions import ConfigError, InputError, KuramotoRCError
from .readout import ReadoutWeights, mean_squared_error, predict
from .svg import line_chart
from .tasks import bifurcation_sweep, fit_series, run_sweep, simulate_task, write_aggregate_csv, write_csv, write_trials_csv
from .theory import steady_state

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _series_columns(n_modes):
    cols = ["t"]
    for n in range(n_modes + 1):
        cols += [f"r{n}_re", f"r{n}_im"]
    return cols


def write_series_csv(path, series):
    rows = []
    for i, t in enumerate(series.times):
        row = [float(t)]
        for v in series.values[:, i]:
            row += [float(v.real), float(v.imag)]
        rows.append(row)
    write_csv(path, _series_columns(series.n_modes), rows)


def _read_table(path):
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            rows = list(reader)
    except OSError as exc:
        raise ConfigError("input", f"cannot read {path}: {exc.strerror}") from None
    if not header:
        raise InputError(f"{path}: empty CSV")
    return header, rows


def read_series_csv(path, config=None, seed=None):
    header, rows = _read_table(path)
    if header[0] != "t" or len(header) % 2 != 1 or len(header) < 5:
        raise InputError(f"{path}: not an order-parameter CSV")
    data = np.array(rows, dtype=float)
    values = data[:, 1::2] + 1j * data[:, 2::2]
    return OrderParameterSeries(data[:, 0], values.T, config, seed)


def _prepare_out(cfg):
    out = cfg["run.out"]
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "resolved_config"), "w") as fh:
        fh.write("\n".join(cfg.lines(__version__)) + "\n")
    return out


def cmd_simulate(cfg, args):
    out = _prepare_out(cfg)
    series = simulate_task(cfg.task(), cfg.reservoir(), cfg.distribution(), [cfg["run.seed"]])[0]
    path = os.path.join(out, "series.csv")
    write_series_csv(path, series)
    print(f"wrote {path} ({len(series)} samples)")


def _series_arg(args, out):
    return args.series or os.path.join(out, "series.csv")


def cmd_train(cfg, args):
    out = _prepare_out(cfg)
    series = read_series_csv(_series_arg(args, out), cfg.reservoir(), cfg["run.seed"])
    fit = fit_series(cfg.task(), series, cfg["readout.svd_tol"], cfg["readout.ridge"])
    meta = dict(fit.weights.metadata, Omega=cfg.distribution().mean)
    w = ReadoutWeights(fit.weights.coeffs, fit.weights.n_modes, fit.weights.svd_tol, fit.weights.ridge, meta)
    path = args.weights or os.path.join(out, "weights.txt")
    w.save(path)
    print(f"wrote {path}; train_mse={fit.train_mse!r}")


def cmd_predict(cfg, args):
    out = _prepare_out(cfg)
    series = read_series_csv(_series_arg(args, out), cfg.reservoir(), cfg["run.seed"])
    w = ReadoutWeights.load(args.weights or os.path.join(out, "weights.txt"))
    task = cfg.task()
    y = predict(w, series)
    y_tar = task.target(series.times)
    write_csv(os.path.join(out, "prediction.csv"), ("t", "y", "y_tar"), zip(series.times.tolist(), y.tolist(), y_tar.tolist()))
    dt = cfg["reservoir.dt"]
    n_train = round(task.train_window / dt)
    metrics = []
    if len(series) == n_train + round(task.test_window / dt):
        metrics.append(("train", mean_squared_error(y[:n_train], y_tar[:n_train])))
        metrics.append(("test", mean_squared_error(y[n_train:], y_tar[n_train:])))
    metrics.append(("all", mean_squared_error(y, y_tar)))
    write_csv(os.path.join(out, "metrics.csv"), ("window", "mse"), metrics)
    print(" ".join(f"{name}_mse={v!r}" for name, v in metrics))


def cmd_sweep(cfg, args):
    out = _prepare_out(cfg)
    results, rows = run_sweep(cfg.sweep(), cfg["run.threads"] or None, cfg["readout.svd_tol"], cfg["readout.ridge"])
    write_trials_csv(os.path.join(out, "sweep_trials.csv"), results)
    write_aggregate_csv(os.path.join(out, "sweep_aggregate.csv"), rows)
    for r in rows:
        print(f"K={r.K!r} mse_mean={r.mse_mean:.4g} r1_mean={r.r1_mean:.4f}")


def cmd_bifurcation(cfg, args):
    out = _prepare_out(cfg)
    results, rows = bifurcation_sweep(
        cfg["sweep.K_values"],
        cfg.reservoir(),
        cfg.distribution(),
        cfg["sweep.trials"],
        alpha=0.0,
        base_seed=cfg["run.seed"],
        t_end=cfg["sweep.t_end"],
        average=cfg["sweep.average"],
        threads=cfg["run.threads"] or None,
    )
    write_trials_csv(os.path.join(out, "bifurcation_trials.csv"), results)
    write_aggregate_csv(os.path.join(out, "bifurcation_aggregate.csv"), rows)
    for r in rows:
        print(f"K={r.K!r} r1_mean={r.r1_mean:.4f}")


def theory_rows(K_values, dist, n_modes):
    cols = ["K", "branch", "r_star"] + [f"c_{n}" for n in range(n_modes + 1)] + [f"err_{n}" for n in range(n_modes + 1)]
    rows = []
    for K in K_values:
        st = steady_state(K, dist, n_modes)
        rows.append([float(K), st.branch, st.r_star] + st.c.tolist() + st.errors.tolist())
    return cols, rows


def cmd_theory(cfg, args):
    out = _prepare_out(cfg)
    cols, rows = theory_rows(cfg["sweep.K_values"], cfg.distribution(), cfg["reservoir.n_modes"])
    path = os.path.join(out, "theory.csv")
    write_csv(path, cols, rows)
    print(f"wrote {path} ({len(rows)} rows)")


def _as_float(text):
    try:
        return float(text)
    except ValueError:
        return math.nan


def chart_from_csv(path):
    """Choose series and bands for a known CSV layout and return SVG text."""
    header, rows = _read_table(path)
    cols = {name: [(_as_float(r[i]) if i < len(r) else math.nan) for r in rows] for i, name in enumerate(header)}
    x = cols[header[0]]
    base = os.path.basename(path)
    bands = []
    if "mse_mean" in cols:
        series = {}
        for stem in ("mse", "r1"):
            mean = cols[f"{stem}_mean"]
            if any(math.isfinite(v) for v in mean):
                series[f"{stem}_mean"] = mean
                bands.append((f"{stem}_mean", cols[f"{stem}_ci_lo"], cols[f"{stem}_ci_hi"]))
        ylabel = "mean over trials (95% CI)"
    elif "test_mse" in cols:
        series = {}
        for seed in dict.fromkeys(r[header.index("seed")] for r in rows):
            idx = [i for i, r in enumerate(rows) if r[header.index("seed")] == seed]
            key = "test_mse" if any(math.isfinite(cols["test_mse"][i]) for i in idx) else "r1_mean_abs"
            series[f"seed {seed}"] = [cols[key][i] if i in idx else math.nan for i in range(len(rows))]
        ylabel = "per-trial value"
    else:
        skip = {header[0], "branch"}
        series = {name: v for name, v in cols.items() if name not in skip and not name.startswith("err_")}
        ylabel = "value"
    series = {k: v for k, v in series.items() if any(math.isfinite(a) for a in v)}
    if not series:
        raise InputError(f"{path}: no numeric columns to plot")
    return line_chart(x, series, bands, title=base, xlabel=header[0], ylabel=ylabel)


def cmd_render(cfg, args):
    if not args.input:
        raise ConfigError("--input", "render needs a CSV file")
    svg = chart_from_csv(args.input)
    path = args.output or os.path.splitext(args.input)[0] + ".svg"
    with open(path, "w") as fh:
        fh.write(svg)
    print(f"wrote {path}")


COMMANDS = {
    "simulate": (cmd_simulate, "integrate one trial and write its order parameters"),
    "train": (cmd_train, "fit readout weights on a simulated series"),
    "predict": (cmd_predict, "apply saved weights to a series"),
    "sweep": (cmd_sweep, "task error over a grid of couplings and trials"),
    "bifurcation": (cmd_bifurcation, "time-averaged |r_1| over a grid of couplings"),
    "theory": (cmd_theory, "steady-state coefficients c_n over a grid of couplings"),
    "render": (cmd_render, "SVG line chart of any CSV written by this tool"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value configuration file")
    common.add_argument("--out", help="output directory (run.out)")
    common.add_argument("--seed", help="base seed, unsigned 64-bit (run.seed)")
    common.add_argument("--threads", help="concurrent couplings, 0 = all cores (run.threads)")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override any key")
    for short in sorted(ALIASES):
        if short in ("out", "seed", "threads"):
            continue
        common.add_argument(f"--{short.replace('_', '-')}", dest=f"alias__{short}", metavar="VALUE", help=f"= --set {ALIASES[short]}=VALUE")
    common.add_argument("--series", help="order-parameter CSV (train, predict)")
    common.add_argument("--weights", help="weight file (train writes, predict reads)")
    common.add_argument("--input", help="CSV to render")
    common.add_argument("--output", help="SVG path for render")

    parser = argparse.ArgumentParser(prog="kuramoto-rc", description="Kuramoto oscillator reservoir computing")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def _overrides(args):
    out = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(item, "--set expects KEY=VALUE")
        out[key.strip()] = value
    for name, value in vars(args).items():
        if name.startswith("alias__") and value is not None:
            out[name[len("alias__") :]] = value
    for short in ("out", "seed", "threads"):
        value = getattr(args, short)
        if value is not None:
            out[f"run.{short}"] = value
    return out


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config, _overrides(args))
        COMMANDS[args.command][0](cfg, args)
    except ConfigError as exc:
        print(f"kuramoto-rc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (KuramotoRCError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"kuramoto-rc: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
