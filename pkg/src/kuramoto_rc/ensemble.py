"""Natural-frequency distributions, seeded sampling and oscillator ensembles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .exceptions import InputError

TWO_PI = 2.0 * math.pi

#: Bit generator used for every random draw; written into run metadata.
RNG_ALGORITHM = "numpy.random.PCG64"

PHASE_INITS = ("uniform", "zero")
FREQUENCY_SAMPLINGS = ("quantile", "iid", "antithetic")


def make_rng(seed):
    """Return the package's seeded generator for an unsigned 64-bit ``seed``."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise InputError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def wrap_phases(theta):
    """Map angles onto [0, 2*pi)."""
    wrapped = np.mod(theta, TWO_PI)
    # mod of a tiny negative number rounds up to exactly 2*pi
    return np.where(wrapped >= TWO_PI, 0.0, wrapped)


@dataclass(frozen=True)
class Gaussian:
    """Normal density with mean ``mean`` and standard deviation ``std`` (rad/s)."""

    mean: float
    std: float

    kind = "gaussian"

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.std)) or self.std <= 0:
            raise InputError(f"Gaussian needs finite mean and std > 0, got ({self.mean}, {self.std})")

    def density(self, omega):
        z = (np.asarray(omega, dtype=float) - self.mean) / self.std
        return np.exp(-0.5 * z * z) / (self.std * math.sqrt(TWO_PI))

    def cdf(self, omega):
        z = (np.asarray(omega, dtype=float) - self.mean) / self.std
        return special.ndtr(z)

    def ppf(self, q):
        return self.mean + self.std * special.ndtri(np.asarray(q, dtype=float))

    def second_derivative_at_mean(self):
        return -1.0 / (self.std**3 * math.sqrt(TWO_PI))

    def support(self, n_std=10.0):
        """Interval carrying all but a negligible tail of the mass."""
        return self.mean - n_std * self.std, self.mean + n_std * self.std

    def centered(self):
        return Gaussian(0.0, self.std)

    def draw(self, rng, n):
        return rng.normal(self.mean, self.std, size=n)

    @property
    def label(self):
        return f"gaussian:{self.mean!r}:{self.std!r}"


@dataclass(frozen=True)
class Uniform:
    """Flat density on ``[lo, hi]`` (rad/s)."""

    lo: float
    hi: float

    kind = "uniform"

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.lo >= self.hi:
            raise InputError(f"Uniform needs finite lo < hi, got ({self.lo}, {self.hi})")

    @property
    def mean(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def half_width(self):
        return 0.5 * (self.hi - self.lo)

    def density(self, omega):
        omega = np.asarray(omega, dtype=float)
        inside = (omega >= self.lo) & (omega <= self.hi)
        return np.where(inside, 1.0 / (self.hi - self.lo), 0.0)

    def cdf(self, omega):
        omega = np.asarray(omega, dtype=float)
        return np.clip((omega - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def ppf(self, q):
        return self.lo + (self.hi - self.lo) * np.asarray(q, dtype=float)

    def second_derivative_at_mean(self):
        return 0.0

    def support(self, n_std=None):
        return self.lo, self.hi

    def centered(self):
        return Uniform(-self.half_width, self.half_width)

    def draw(self, rng, n):
        return rng.uniform(self.lo, self.hi, size=n)

    @property
    def label(self):
        return f"uniform:{self.lo!r}:{self.hi!r}"


FrequencyDistribution = Gaussian | Uniform


def density(dist, omega):
    """Probability density of ``dist`` at ``omega``."""
    return dist.density(omega)


def sample_frequencies(dist, n, rng):
    """``n`` independent draws from ``dist``."""
    if n < 1:
        raise InputError(f"need at least one frequency, got n={n}")
    return np.asarray(dist.draw(rng, n), dtype=float)


def quantile_frequencies(dist, n):
    """Midpoint quantiles ``G^-1((j + 1/2) / n)``, a regular sample of ``dist``.

    The sample is exactly symmetric about the mean, so a finite ensemble
    built from it has no spurious drift of its collective frequency.
    """
    if n < 1:
        raise InputError(f"need at least one frequency, got n={n}")
    return dist.ppf((np.arange(n) + 0.5) / n)


def antithetic_frequencies(dist, n, rng):
    """Independent draws paired with their reflections about the mean.

    For odd ``n`` the unpaired oscillator sits exactly at the mean.
    """
    if n < 1:
        raise InputError(f"need at least one frequency, got n={n}")
    half = sample_frequencies(dist, n // 2, rng) if n >= 2 else np.empty(0)
    center = dist.mean
    parts = [half, 2.0 * center - half]
    if n % 2:
        parts.append(np.array([center]))
    return np.concatenate(parts)


def draw_frequencies(dist, n, rng, sampling="quantile"):
    if sampling == "iid":
        return sample_frequencies(dist, n, rng)
    if sampling == "quantile":
        return quantile_frequencies(dist, n)
    if sampling == "antithetic":
        return antithetic_frequencies(dist, n, rng)
    raise InputError(f"unknown frequency sampling {sampling!r}; expected one of {FREQUENCY_SAMPLINGS}")


@dataclass(frozen=True, eq=False)
class EnsembleState:
    """Phases and quenched natural frequencies of ``N`` oscillators at ``time``."""

    phases: np.ndarray
    freqs: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        phases = np.array(self.phases, dtype=float).ravel()
        freqs = np.array(self.freqs, dtype=float).ravel()
        if phases.size < 1 or phases.shape != freqs.shape:
            raise InputError(
                f"phases and freqs must be non-empty and equally long, got {phases.size} and {freqs.size}"
            )
        if not (np.all(np.isfinite(phases)) and np.all(np.isfinite(freqs))):
            raise InputError("ensemble state contains non-finite values")
        phases = wrap_phases(phases)
        phases.flags.writeable = False
        freqs.flags.writeable = False
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "time", float(self.time))

    @property
    def n_oscillators(self):
        return self.phases.size


def initial_phases(n, phase_init, rng):
    if phase_init == "uniform":
        return rng.uniform(0.0, TWO_PI, size=n)
    if phase_init == "zero":
        return np.zeros(n)
    raise InputError(f"unknown phase_init {phase_init!r}; expected one of {PHASE_INITS}")


def init_ensemble(n, dist, phase_init="uniform", rng=None, frequency_sampling="quantile"):
    """Build the state at ``t = 0``.

    Frequencies are drawn before phases, so for a given seed the frequency
    sample does not depend on ``phase_init``.
    """
    if n < 1:
        raise InputError(f"need at least one oscillator, got n={n}")
    if rng is None:
        rng = make_rng(0)
    freqs = draw_frequencies(dist, n, rng, frequency_sampling)
    phases = initial_phases(n, phase_init, rng)
    return EnsembleState(phases, freqs, 0.0)
