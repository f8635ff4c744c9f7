"""Prediction and transformation experiments, coupling sweeps and bifurcation diagrams."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .dynamics import ReservoirConfig, n_steps_for, simulate_trials
from .exceptions import InputError
from .readout import build_design_matrix, mean_squared_error, predict, train
from .signals import Constant, Sine, Triangle

PREDICTION = "prediction"
TRANSFORMATION = "transformation"
TASK_KINDS = (PREDICTION, TRANSFORMATION)

TRIAL_COLUMNS = ("K", "omega_mean", "dist", "seed", "train_mse", "test_mse", "r1_mean_abs")
AGGREGATE_COLUMNS = ("K", "mse_mean", "mse_ci_lo", "mse_ci_hi", "r1_mean", "r1_ci_lo", "r1_ci_hi")


def make_signal(kind, omega_hat, amplitude=1.0, phase=0.0):
    """Sine or unit triangle of angular velocity ``omega_hat``."""
    if not (math.isfinite(omega_hat) and omega_hat > 0):
        raise InputError(f"angular velocity must be finite and > 0, got {omega_hat}")
    if kind == "sine":
        return Sine(omega_hat, amplitude, phase)
    if kind == "triangle":
        return Triangle(omega_hat, amplitude, phase)
    raise InputError(f"unknown signal kind {kind!r}; expected 'sine' or 'triangle'")


@dataclass(frozen=True)
class TaskSpec:
    """Input, target and the three consecutive windows of one experiment."""

    kind: str
    input: object
    target: object
    stabilize: float = 240.0
    train_window: float = 30.0
    test_window: float = 30.0

    def __post_init__(self):
        if self.kind not in TASK_KINDS:
            raise InputError(f"task kind must be one of {TASK_KINDS}, got {self.kind!r}")
        for name in ("stabilize", "train_window", "test_window"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InputError(f"{name} must be finite and > 0, got {v}")

    @classmethod
    def prediction(cls, omega_hat=0.5, dt=0.01, **windows):
        """Target is the input sine one step ahead."""
        u = make_signal("sine", omega_hat)
        return cls(PREDICTION, u, make_signal("sine", omega_hat, 1.0, omega_hat * dt), **windows)

    @classmethod
    def transformation(cls, omega_hat=0.5, **windows):
        """Sine input, triangle target of the same period."""
        return cls(TRANSFORMATION, make_signal("sine", omega_hat), make_signal("triangle", omega_hat), **windows)

    @property
    def t_end(self):
        return self.stabilize + self.train_window + self.test_window


@dataclass(frozen=True)
class TrialResult:
    K: float
    omega_mean: float
    dist: str
    seed: int
    train_mse: float
    test_mse: float
    r1_mean_abs: float
    wallclock: float = 0.0

    def row(self):
        return (self.K, self.omega_mean, self.dist, self.seed, self.train_mse, self.test_mse, self.r1_mean_abs)


@dataclass(frozen=True)
class AggregateRow:
    K: float
    mse_mean: float
    mse_ci_lo: float
    mse_ci_hi: float
    r1_mean: float
    r1_ci_lo: float
    r1_ci_hi: float

    def row(self):
        return (self.K, self.mse_mean, self.mse_ci_lo, self.mse_ci_hi, self.r1_mean, self.r1_ci_lo, self.r1_ci_hi)


@dataclass(frozen=True)
class SweepSpec:
    K_values: tuple
    trials: int
    task: TaskSpec
    config: ReservoirConfig = field(default_factory=ReservoirConfig)
    dist: object = None
    base_seed: int = 0

    def __post_init__(self):
        ks = tuple(float(k) for k in self.K_values)
        if not ks or not all(math.isfinite(k) and k >= 0 for k in ks):
            raise InputError(f"K values must be a non-empty list of finite values >= 0, got {self.K_values}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise InputError(f"trials must be a positive integer, got {self.trials}")
        if self.dist is None:
            raise InputError("sweep needs a frequency distribution")
        object.__setattr__(self, "K_values", ks)
        object.__setattr__(self, "trials", int(self.trials))


@dataclass(frozen=True)
class TrialFit:
    """Readout fitted on one simulated series, with its outputs on both windows."""

    weights: object
    train_times: np.ndarray
    test_times: np.ndarray
    train_output: np.ndarray
    test_output: np.ndarray
    train_mse: float
    test_mse: float
    r1_mean_abs: float


def _window_counts(task, dt):
    return n_steps_for(task.train_window, dt), n_steps_for(task.test_window, dt)


def simulate_task(task, cfg, dist, seeds):
    """Series covering the training and testing windows for every seed."""
    n_train, n_test = _window_counts(task, cfg.dt)
    t_end = task.stabilize + (n_train + n_test - 1) * cfg.dt
    return simulate_trials(cfg, dist, task.input, t_end, task.stabilize, seeds)


def fit_series(task, series, svd_tol=1e-10, ridge=0.0):
    """Train on the first window of ``series`` and score both windows."""
    cfg = series.config
    n_train, n_test = _window_counts(task, cfg.dt)
    if len(series) != n_train + n_test:
        raise InputError(f"series has {len(series)} samples, task needs {n_train + n_test}")
    train_s = series.window(0, n_train)
    test_s = series.window(n_train, n_train + n_test)
    meta = {"K": cfg.coupling, "alpha": cfg.input_gain, "seed": series.seed}
    w = train(build_design_matrix(train_s), task.target(train_s.times), svd_tol, ridge, meta)
    y_train = predict(w, train_s)
    y_test = predict(w, test_s)
    return TrialFit(
        w,
        train_s.times,
        test_s.times,
        y_train,
        y_test,
        mean_squared_error(y_train, task.target(train_s.times)),
        mean_squared_error(y_test, task.target(test_s.times)),
        float(np.mean(np.abs(test_s.values[1]))),
    )


def run_trials(task, cfg, dist, seeds, svd_tol=1e-10, ridge=0.0):
    """Simulate all ``seeds`` in one batch and score each trial."""
    t0 = time.perf_counter()
    series = simulate_task(task, cfg, dist, seeds)
    per_trial = (time.perf_counter() - t0) / max(len(seeds), 1)
    results = []
    for s in series:
        fit = fit_series(task, s, svd_tol, ridge)
        results.append(
            TrialResult(cfg.coupling, dist.mean, dist.label, s.seed, fit.train_mse, fit.test_mse, fit.r1_mean_abs, per_trial)
        )
    return results


def run_trial(task, cfg, dist, seed, svd_tol=1e-10, ridge=0.0):
    return run_trials(task, cfg, dist, [seed], svd_tol, ridge)[0]


def t_interval(x, confidence=0.95):
    """Mean and Student-t confidence interval; the interval is NaN for one sample."""
    x = np.asarray(x, dtype=float)
    m = float(np.mean(x))
    if x.size < 2:
        return m, math.nan, math.nan
    half = float(stats.t.ppf(0.5 + 0.5 * confidence, x.size - 1) * np.std(x, ddof=1) / math.sqrt(x.size))
    return m, m - half, m + half


def aggregate(results):
    """One row per coupling value, in order of first appearance."""
    by_k = {}
    for r in results:
        by_k.setdefault(r.K, []).append(r)
    rows = []
    for k, rs in by_k.items():
        mse = t_interval([r.test_mse for r in rs])
        r1 = t_interval([r.r1_mean_abs for r in rs])
        rows.append(AggregateRow(k, *mse, *r1))
    return rows


def _default_threads():
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def _map_ordered(fn, items, threads):
    threads = threads or _default_threads()
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    # the integration kernel releases the GIL, so threads overlap the heavy part
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def run_sweep(spec, threads=None, svd_tol=1e-10, ridge=0.0):
    """All trials of ``spec`` ordered by (K, trial), plus per-K aggregates."""
    seeds = [spec.base_seed + i for i in range(spec.trials)]

    def one_k(k):
        return run_trials(spec.task, spec.config.with_(coupling=k), spec.dist, seeds, svd_tol, ridge)

    results = [r for batch in _map_ordered(one_k, list(spec.K_values), threads) for r in batch]
    return results, aggregate(results)


def bifurcation_sweep(K_values, cfg, dist, trials, alpha=0.0, base_seed=0, t_end=270.0, average=30.0, threads=None):
    """Time-averaged ``|r_1|`` over the last ``average`` seconds, per coupling and trial.

    Returns ``(results, aggregate_rows)``; MSE fields are NaN.
    """
    if not 0 < average <= t_end:
        raise InputError(f"need 0 < average <= t_end, got {average}, {t_end}")
    seeds = [base_seed + i for i in range(int(trials))]
    cfg = cfg.with_(input_gain=alpha)
    u = Constant(0.0)

    def one_k(k):
        c = cfg.with_(coupling=k)
        t0 = time.perf_counter()
        series = simulate_trials(c, dist, u, t_end, t_end - average, seeds)
        per_trial = (time.perf_counter() - t0) / len(seeds)
        return [
            TrialResult(k, dist.mean, dist.label, s.seed, math.nan, math.nan, float(np.mean(np.abs(s.values[1]))), per_trial)
            for s in series
        ]

    results = [r for batch in _map_ordered(one_k, [float(k) for k in K_values], threads) for r in batch]
    return results, aggregate(results)


def _fmt(v):
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_trials_csv(path, results):
    write_csv(path, TRIAL_COLUMNS, [r.row() for r in results])


def write_aggregate_csv(path, rows):
    write_csv(path, AGGREGATE_COLUMNS, [r.row() for r in rows])
