"""Input-driven Kuramoto dynamics and its n-th order parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .ensemble import (
    FREQUENCY_SAMPLINGS,
    PHASE_INITS,
    EnsembleState,
    init_ensemble,
    make_rng,
    wrap_phases,
)
from .exceptions import InputError
from .signals import integrated_input  # noqa: F401  (re-exported)

INTEGRATORS = ("rk4", "euler")


@dataclass(frozen=True)
class ReservoirConfig:
    """Parameters of the oscillator reservoir.

    ``n_modes`` is the number M of order parameters r_1..r_M fed to the
    readout. ``phase_init`` and ``frequency_sampling`` select how
    :func:`~kuramoto_rc.ensemble.init_ensemble` builds each trial.
    """

    n_oscillators: int = 500
    coupling: float = 0.7
    input_gain: float = 0.01
    dt: float = 0.01
    integrator: str = "rk4"
    n_modes: int = 10
    phase_init: str = "uniform"
    frequency_sampling: str = "quantile"

    def __post_init__(self):
        if int(self.n_oscillators) != self.n_oscillators or self.n_oscillators < 1:
            raise InputError(f"n_oscillators must be a positive integer, got {self.n_oscillators}")
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise InputError(f"n_modes must be a positive integer, got {self.n_modes}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise InputError(f"dt must be finite and > 0, got {self.dt}")
        if not (math.isfinite(self.coupling) and self.coupling >= 0):
            raise InputError(f"coupling must be finite and >= 0, got {self.coupling}")
        if not math.isfinite(self.input_gain):
            raise InputError(f"input_gain must be finite, got {self.input_gain}")
        if self.integrator not in INTEGRATORS:
            raise InputError(f"integrator must be one of {INTEGRATORS}, got {self.integrator!r}")
        if self.phase_init not in PHASE_INITS:
            raise InputError(f"phase_init must be one of {PHASE_INITS}, got {self.phase_init!r}")
        if self.frequency_sampling not in FREQUENCY_SAMPLINGS:
            raise InputError(
                f"frequency_sampling must be one of {FREQUENCY_SAMPLINGS}, got {self.frequency_sampling!r}"
            )
        object.__setattr__(self, "n_oscillators", int(self.n_oscillators))
        object.__setattr__(self, "n_modes", int(self.n_modes))

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class OrderParameterSeries:
    """Order parameters r_0..r_M sampled on ``times``.

    ``values[n, i]`` is r_n at ``times[i]``; row 0 is identically one.
    """

    times: np.ndarray
    values: np.ndarray
    config: ReservoirConfig | None = None
    seed: int | None = None

    def __post_init__(self):
        times = np.array(self.times, dtype=float).ravel()
        values = np.array(self.values, dtype=complex)
        if values.ndim != 2 or values.shape[1] != times.size or values.shape[0] < 1:
            raise InputError(f"values must have shape (M+1, {times.size}), got {values.shape}")
        times.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def n_modes(self):
        return self.values.shape[0] - 1

    def __len__(self):
        return self.times.size

    def window(self, start, stop):
        """Columns ``start:stop`` as a new series."""
        return OrderParameterSeries(self.times[start:stop], self.values[:, start:stop], self.config, self.seed)


def order_parameters(state, n_max):
    """``r_n = mean_j exp(i n theta_j)`` for n = 0..n_max."""
    theta = np.asarray(state.phases if isinstance(state, EnsembleState) else state, dtype=float)
    n = np.arange(n_max + 1)[:, None]
    r = np.exp(1j * n * theta[None, :]).mean(axis=1)
    r[0] = 1.0
    return r


def drift(state, u_t, cfg):
    """Phase velocities ``alpha*u + omega_i + K |r_1| sin(psi_1 - theta_i)``.

    Mean-field form of the pairwise coupling sum; O(N).
    """
    theta = state.phases
    r1 = np.exp(1j * theta).mean()
    return cfg.input_gain * u_t + state.freqs + cfg.coupling * np.imag(r1 * np.exp(-1j * theta))


def _velocity(theta, freqs, drive, coupling):
    r1 = np.exp(1j * theta).mean()
    return drive + freqs + coupling * np.imag(r1 * np.exp(-1j * theta))


def step(state, u, cfg):
    """Advance ``state`` by one step of ``cfg.dt``.

    Reference NumPy implementation; :func:`simulate` uses the compiled
    kernel, which agrees with repeated calls of this function to rounding.
    """
    dt = cfg.dt
    t = state.time
    theta = state.phases
    a = cfg.input_gain
    k1 = _velocity(theta, state.freqs, a * u(t), cfg.coupling)
    if cfg.integrator == "euler":
        new = theta + dt * k1
    else:
        k2 = _velocity(theta + 0.5 * dt * k1, state.freqs, a * u(t + 0.5 * dt), cfg.coupling)
        k3 = _velocity(theta + 0.5 * dt * k2, state.freqs, a * u(t + 0.5 * dt), cfg.coupling)
        k4 = _velocity(theta + dt * k3, state.freqs, a * u(t + dt), cfg.coupling)
        new = theta + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return EnsembleState(wrap_phases(new), state.freqs, t + dt)


def _drive_table(u, gain, t0, dt, n_steps):
    tk = t0 + dt * np.arange(n_steps)
    table = np.empty((n_steps, 3))
    table[:, 0] = u(tk)
    table[:, 1] = u(tk + 0.5 * dt)
    table[:, 2] = u(tk + dt)
    if not np.all(np.isfinite(table)):
        raise InputError("input signal produced non-finite samples")
    return gain * table


def n_steps_for(duration, dt):
    """Number of whole steps of ``dt`` that cover ``duration`` seconds."""
    k = round(duration / dt)
    if abs(k * dt - duration) > 1e-9 * max(1.0, abs(duration)):
        raise InputError(f"{duration} s is not a whole number of steps of {dt} s")
    return int(k)


def run_ensembles(states, u, cfg, n_steps, record_start=0):
    """Integrate several ensembles of equal size and start time together.

    Returns ``(final_states, values)`` with ``values`` of shape
    ``(len(states), M+1, n_steps + 1 - record_start)``.
    """
    if not states:
        raise InputError("need at least one ensemble")
    n = states[0].n_oscillators
    t0 = states[0].time
    if any(s.n_oscillators != n or s.time != t0 for s in states):
        raise InputError("batched ensembles must share size and start time")
    if not 0 <= record_start <= n_steps + 1:
        raise InputError(f"record_start {record_start} outside 0..{n_steps + 1}")
    theta = np.array([s.phases for s in states])
    omega = np.array([s.freqs for s in states])
    drive = _drive_table(u, cfg.input_gain, t0, cfg.dt, n_steps)
    out = np.empty((len(states), cfg.n_modes + 1, n_steps + 1 - record_start), dtype=complex)
    t_end = t0 + n_steps * cfg.dt
    # largest phase increment of any stage; the kernel's series need it small
    max_rate = (np.abs(drive).max() if n_steps else 0.0) + np.abs(omega).max() + cfg.coupling
    if cfg.dt * max_rate >= _kernels.MAX_INCREMENT:
        return _run_reference(states, u, cfg, n_steps, record_start, out)
    method = _kernels.RK4 if cfg.integrator == "rk4" else _kernels.EULER
    _kernels.integrate_batch(
        theta, omega, float(cfg.coupling), float(cfg.dt), drive, method, n_steps, record_start, cfg.n_modes, out
    )
    finals = [EnsembleState(theta[b], omega[b], t_end) for b in range(len(states))]
    return finals, out


def _run_reference(states, u, cfg, n_steps, record_start, out):
    # slow path for steps too coarse for the compiled kernel
    finals = []
    for b, state in enumerate(states):
        for k in range(n_steps + 1):
            if k >= record_start:
                out[b, :, k - record_start] = order_parameters(state, cfg.n_modes)
            if k < n_steps:
                state = step(state, u, cfg)
        finals.append(state)
    return finals, out


def simulate_trials(cfg, dist, u, t_end, record_from, seeds):
    """:func:`simulate` for several seeds in one batched integration."""
    if not 0 <= record_from <= t_end:
        raise InputError(f"need 0 <= record_from <= t_end, got {record_from}, {t_end}")
    n_steps = n_steps_for(t_end, cfg.dt)
    record_start = min(math.ceil(record_from / cfg.dt - 1e-9), n_steps)
    states = [
        init_ensemble(cfg.n_oscillators, dist, cfg.phase_init, make_rng(seed), cfg.frequency_sampling)
        for seed in seeds
    ]
    _, values = run_ensembles(states, u, cfg, n_steps, record_start)
    times = cfg.dt * np.arange(record_start, n_steps + 1)
    return [OrderParameterSeries(times, values[b], cfg, int(seed)) for b, seed in enumerate(seeds)]


def simulate(cfg, dist, u, t_end, record_from, seed=0):
    """Integrate from t = 0 to ``t_end`` and record r_0..r_M from ``record_from``.

    The trial's ensemble is drawn from ``make_rng(seed)``.
    """
    return simulate_trials(cfg, dist, u, t_end, record_from, [seed])[0]
