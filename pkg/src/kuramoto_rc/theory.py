"""Mean-field theory: critical coupling, the synchronized branch and steady-state order parameters.

Everything here works with the distribution centered at zero mean; the
collective rotation ``exp(i n Omega t)`` is re-attached by
:func:`theoretical_r_n`.  Phases are measured from the mean-field phase, so
locked oscillators sit at ``theta = arcsin(omega / (K r))`` and drifting
ones follow the density of :func:`steady_density_ac`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .ensemble import Gaussian, Uniform
from .exceptions import DomainError, InputError, UnsupportedDistributionError
from .signals import integrated_input

INCOHERENT = "incoherent"
SYNCHRONIZED = "synchronized"

_SCAN_POINTS = 256
_R_MIN = 1e-12
_TAIL_STDS = 10.0
_EPSABS = 1e-13
_LIMIT = 400


def _centered(dist):
    if not isinstance(dist, (Gaussian, Uniform)):
        raise UnsupportedDistributionError(f"unsupported distribution {dist!r}")
    return dist.centered()


def _scalar_density(dist):
    # plain-float density for the scalar integrands below
    if isinstance(dist, Gaussian):
        norm = 1.0 / (dist.std * math.sqrt(2.0 * math.pi))
        inv2 = 0.5 / (dist.std * dist.std)
        return lambda w: norm * math.exp(-inv2 * w * w)
    h = dist.half_width
    return lambda w: 0.5 / h if -h <= w <= h else 0.0


def _upper(dist):
    # frequency beyond which the tail mass is negligible
    if isinstance(dist, Gaussian):
        return _TAIL_STDS * dist.std
    return dist.half_width


def critical_coupling(dist):
    """``K_c = 2 / (pi g(Omega))``."""
    return 2.0 / (math.pi * float(dist.density(dist.mean)))


def _quad(f, lo, hi, points=None):
    pts = [p for p in (points or ()) if lo < p < hi]
    val, err = integrate.quad(f, lo, hi, points=pts or None, epsabs=_EPSABS, epsrel=1e-12, limit=_LIMIT)
    return val, err


def _locked_cos_integral(n, a, dist, weight=math.cos):
    """``a * int_{-pi/2}^{pi/2} cos(n y) weight(y) g(a sin y) dy`` over the locked band, folded by evenness."""
    g = _scalar_density(dist)
    points = None
    if isinstance(dist, Uniform) and a > dist.half_width:
        points = [math.asin(dist.half_width / a)]
    val, err = _quad(lambda y: math.cos(n * y) * weight(y) * g(a * math.sin(y)), 0.0, 0.5 * math.pi, points)
    return 2.0 * a * val, 2.0 * a * err


def self_consistency(r, K, dist):
    """Locked-population integral ``F(r) = int_{|w|<Kr} sqrt(1 - (w/Kr)^2) g(w) dw``."""
    d = _centered(dist)
    if r <= 0.0:
        return 0.0
    return _locked_cos_integral(1, K * r, d, weight=math.cos)[0]


def _growth(r, K, dist):
    # F(r)/r - 1; same sign as F(r) - r for r > 0, better scaled near r = 0
    return self_consistency(r, K, dist) / r - 1.0


def solve_r_star(K, dist, tol=1e-12):
    """Largest self-consistent ``r`` in ``(0, 1]``, or 0 when none exists.

    The sign of ``F(r) - r`` is scanned on a uniform grid of 256 points
    and the last sign change is refined by bisection to width ``tol``.
    """
    if not (math.isfinite(K) and K >= 0):
        raise InputError(f"coupling must be finite and >= 0, got {K}")
    if not (tol > 0):
        raise InputError(f"tol must be > 0, got {tol}")
    d = _centered(dist)
    if K == 0.0:
        return 0.0
    grid = np.linspace(_R_MIN, 1.0, _SCAN_POINTS)
    signs = np.array([_growth(r, K, d) > 0.0 for r in grid])
    if not signs.any():
        return 0.0
    i = int(np.flatnonzero(signs)[-1])
    if i == grid.size - 1:
        return 1.0
    lo, hi = float(grid[i]), float(grid[i + 1])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _growth(mid, K, d) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def r_c_asymptotic(K, dist):
    """Leading-order branch ``sqrt(-16 / (pi K_c^4 g''(0))) sqrt(K - K_c)``."""
    if not isinstance(dist, Gaussian):
        raise UnsupportedDistributionError("the square-root asymptote needs g''(0) < 0 (Gaussian only)")
    d = dist.centered()
    kc = critical_coupling(d)
    if K < kc:
        raise DomainError(f"asymptote defined for K >= K_c = {kc!r}, got {K}")
    return math.sqrt(-16.0 / (math.pi * kc**4 * d.second_derivative_at_mean())) * math.sqrt(K - kc)


def steady_density_ac(theta, omega, K, r_star):
    """Stationary phase density of a drifting oscillator (``|omega| > K r_star``)."""
    theta = np.asarray(theta, dtype=float)
    omega = np.asarray(omega, dtype=float)
    a = K * r_star
    if np.any(np.abs(omega) <= a):
        raise DomainError("density is a point mass for |omega| <= K r_star")
    return np.sqrt(omega * omega - a * a) / (2.0 * math.pi * np.abs(omega - a * np.sin(theta)))


def compute_a_n(n, K, r_star, dist, full_output=False):
    """Locked-population part ``a_n = int_{|w|<Kr} cos(n arcsin(w/Kr)) g(w) dw``.

    With ``full_output`` returns ``(value, abs_error)``.
    """
    _check_order(n)
    d = _centered(dist)
    a = K * r_star
    if a <= 0.0:
        out = (0.0, 0.0)
    else:
        out = _locked_cos_integral(n, a, d)
    return out if full_output else out[0]


def _drift_mode(n, a, dist, sign=1.0, part=np.cos):
    """``int_{sign*w > a} g(w) int_{-pi}^{pi} part(n theta) rho(theta, w) dtheta dw``.

    The inner integral runs over ``phi = theta - sign*pi/2`` so the peak of
    the density sits at the breakpoint ``phi = 0``.  The outer one uses
    ``w = sign * a cosh(s)``, which removes the square-root edge at ``|w| = a``.
    Returns ``(value, abs_error)``.
    """
    g = _scalar_density(dist)
    hi = _upper(dist)
    if a >= hi:
        return 0.0, 0.0
    shift = sign * 0.5 * math.pi
    f_part = math.cos if part is np.cos else math.sin
    inner_errs = []

    def inner(w):
        # sqrt(w^2 - a^2) / |w - a sin(theta)| with theta = phi + shift
        root = math.sqrt(max(w * w - a * a, 0.0))
        absw = abs(w)

        def f(phi):
            return f_part(n * (phi + shift)) * root / (absw - a * math.cos(phi))

        val, err = _quad(f, -math.pi, math.pi, [0.0])
        inner_errs.append(err)
        return val / (2.0 * math.pi)

    if a > 0.0:
        s_max = math.acosh(hi / a)

        def outer(s):
            w = a * math.cosh(s)
            return inner(sign * w) * g(sign * w) * a * math.sinh(s)

        val, err = _quad(outer, 0.0, s_max)
    else:
        val, err = _quad(lambda w: inner(sign * w) * g(sign * w), 0.0, hi)
    inner_err = max(inner_errs, default=0.0) / (2.0 * math.pi)
    return val, err + inner_err


def compute_b_n(n, K, r_star, dist, full_output=False):
    """Drifting-population part ``b_n`` of the steady order parameter.

    The phase integral covers the whole circle, so any cancellation for odd
    ``n`` comes out of the quadrature.  With ``full_output`` returns
    ``(value, abs_error)``.
    """
    _check_order(n)
    d = _centered(dist)
    # both frequency tails contribute equally by evenness of g
    val, err = _drift_mode(n, K * r_star, d, 1.0)
    out = (2.0 * val, 2.0 * err)
    return out if full_output else out[0]


def compute_c_n(n, K, dist, full_output=False, r_star=None):
    """Steady-state order parameter ``c_n = a_n + b_n`` on the largest branch."""
    _check_order(n)
    d = _centered(dist)
    if r_star is None:
        r_star = solve_r_star(K, d)
    if n == 0:
        out = (1.0, 0.0)
    elif r_star == 0.0:
        out = (0.0, 0.0)
    else:
        a, ea = compute_a_n(n, K, r_star, d, full_output=True)
        b, eb = compute_b_n(n, K, r_star, d, full_output=True)
        out = (a + b, ea + eb)
    return out if full_output else out[0]


def complex_c_n(n, K, r_star, dist):
    """``c_n`` as the full complex integral of ``exp(i n theta)`` over the steady density.

    No symmetry of ``g`` is used: locked band, both drifting tails, and both
    real and imaginary parts are integrated separately.  Returns
    ``(value, abs_error)`` with ``value`` complex.
    """
    _check_order(n)
    d = _centered(dist)
    a = K * r_star
    g = _scalar_density(d)
    re = im = err = 0.0
    if a > 0.0:
        pts = [0.0]
        if isinstance(d, Uniform) and a > d.half_width:
            y = math.asin(d.half_width / a)
            pts += [-y, y]
        for fn, sgn in ((math.cos, 1), (math.sin, 0)):
            v, e = _quad(lambda y: fn(n * y) * math.cos(y) * g(a * math.sin(y)), -0.5 * math.pi, 0.5 * math.pi, pts)
            if sgn:
                re += a * v
            else:
                im += a * v
            err += a * e
    for sign in (1.0, -1.0):
        v, e = _drift_mode(n, a, d, sign, np.cos)
        re += v
        err += e
        v, e = _drift_mode(n, a, d, sign, np.sin)
        im += v
        err += e
    return complex(re, im), err


def _check_order(n):
    if int(n) != n or n < 0:
        raise InputError(f"mode index must be a non-negative integer, got {n}")


@dataclass(frozen=True, eq=False)
class TheorySteadyState:
    """Steady state of the centered mean-field model at coupling ``K``."""

    K: float
    dist: object
    r_star: float
    c: np.ndarray
    errors: np.ndarray
    branch: str

    @property
    def n_modes(self):
        return self.c.size - 1


def steady_state(K, dist, n_modes=10):
    """Solve for ``r_star`` and evaluate ``c_0..c_M`` with error estimates."""
    d = _centered(dist)
    r = solve_r_star(K, d)
    pairs = [compute_c_n(n, K, d, full_output=True, r_star=r) for n in range(n_modes + 1)]
    c = np.array([p[0] for p in pairs])
    errors = np.array([p[1] for p in pairs])
    return TheorySteadyState(float(K), d, r, c, errors, SYNCHRONIZED if r > 0.0 else INCOHERENT)


def theoretical_r_n(n, t, c_n, omega_mean, alpha, u):
    """``c_n exp(i n (Omega t + alpha int_0^t u))``."""
    t = np.asarray(t, dtype=float)
    phase = omega_mean * t + alpha * integrated_input(u, t)
    out = c_n * np.exp(1j * n * phase)
    return complex(out) if out.ndim == 0 else out
