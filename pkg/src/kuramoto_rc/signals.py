"""Scalar input signals u(t) and their running integrals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InputError


@dataclass(frozen=True)
class Sine:
    """``amplitude * sin(angular_velocity * t + phase)``."""

    angular_velocity: float
    amplitude: float = 1.0
    phase: float = 0.0

    def __call__(self, t):
        return self.amplitude * np.sin(self.angular_velocity * np.asarray(t, dtype=float) + self.phase)

    def integral(self, t):
        w = self.angular_velocity
        t = np.asarray(t, dtype=float)
        if w == 0.0:
            return self.amplitude * math.sin(self.phase) * t
        return self.amplitude * (math.cos(self.phase) - np.cos(w * t + self.phase)) / w


def _triangle_unit(phi):
    # unit triangle of the angle phi, zero crossing rising at phi = 0
    x = np.mod(np.asarray(phi, dtype=float) + 0.5 * math.pi, 2.0 * math.pi) - 0.5 * math.pi
    return np.where(x <= 0.5 * math.pi, 2.0 * x / math.pi, 2.0 - 2.0 * x / math.pi)


def _triangle_antiderivative(phi):
    # periodic primitive of _triangle_unit with respect to phi
    x = np.mod(np.asarray(phi, dtype=float) + 0.5 * math.pi, 2.0 * math.pi) - 0.5 * math.pi
    rising = x * x / math.pi
    falling = 2.0 * x - x * x / math.pi - 0.5 * math.pi
    return np.where(x <= 0.5 * math.pi, rising, falling)


@dataclass(frozen=True)
class Triangle:
    """Zero-mean triangle wave with period ``2*pi / angular_velocity``.

    Peaks at ``+amplitude`` a quarter period after each rising zero
    crossing; with equal ``phase`` the crossings coincide with those of
    :class:`Sine`.
    """

    angular_velocity: float
    amplitude: float = 1.0
    phase: float = 0.0

    def __call__(self, t):
        return self.amplitude * _triangle_unit(self.angular_velocity * np.asarray(t, dtype=float) + self.phase)

    def integral(self, t):
        w = self.angular_velocity
        t = np.asarray(t, dtype=float)
        if w == 0.0:
            return self.amplitude * float(_triangle_unit(self.phase)) * t
        g = _triangle_antiderivative(w * t + self.phase) - _triangle_antiderivative(self.phase)
        return self.amplitude * g / w


@dataclass(frozen=True)
class Constant:
    value: float

    def __call__(self, t):
        return np.full(np.shape(t), float(self.value)) if np.ndim(t) else float(self.value)

    def integral(self, t):
        return self.value * np.asarray(t, dtype=float)


@dataclass(frozen=True, eq=False)
class Sampled:
    """Piecewise-linear interpolation of samples ``values`` at ``times``.

    Outside the sampled range the nearest end value is held.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.array(self.times, dtype=float).ravel()
        values = np.array(self.values, dtype=float).ravel()
        if times.size < 1 or times.shape != values.shape:
            raise InputError("Sampled signal needs equally long, non-empty times and values")
        if not np.all(np.isfinite(times)):
            raise InputError("Sampled signal times must be finite")
        if np.any(np.diff(times) <= 0):
            raise InputError("Sampled signal times must be strictly increasing")
        times.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __call__(self, t):
        return np.interp(t, self.times, self.values)

    def integral(self, t):
        # exact integral of the interpolant == composite trapezoid on its knots
        t = np.asarray(t, dtype=float)
        knots = np.concatenate(([0.0], self.times[self.times > 0.0]))
        vals = np.interp(knots, self.times, self.values)
        cum = np.concatenate(([0.0], np.cumsum(0.5 * (vals[1:] + vals[:-1]) * np.diff(knots))))
        idx = np.clip(np.searchsorted(knots, t, side="right") - 1, 0, knots.size - 1)
        left = knots[idx]
        partial = 0.5 * (vals[idx] + np.interp(t, self.times, self.values)) * (t - left)
        return cum[idx] + partial


InputSignal = Sine | Triangle | Constant | Sampled


def integrated_input(u, t):
    """Running integral of ``u`` from 0 to ``t``."""
    if np.any(np.asarray(t) < 0):
        raise InputError("integrated_input is defined for t >= 0")
    result = u.integral(t)
    return float(result) if np.ndim(result) == 0 else result
