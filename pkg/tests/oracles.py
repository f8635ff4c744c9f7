"""Independent reference computations used only by the tests.

Each one reaches its answer by a route that does not share code with the
package implementation it checks.
"""

import math

import numpy as np
from scipy import integrate, optimize, stats


def pairwise_drift(theta, omega, coupling, drive):
    """``drive + omega_i + (K/N) sum_j sin(theta_j - theta_i)`` by the O(N^2) double sum."""
    n = len(theta)
    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += math.sin(theta[j] - theta[i])
        out[i] = drive + omega[i] + coupling * acc / n
    return out


def euler_trajectory(theta0, omega, coupling, gain, u, t_end, dt):
    """Unwrapped phases at ``t_end`` from forward Euler on the pairwise form."""
    theta = np.array(theta0, dtype=float)
    n_steps = round(t_end / dt)
    for k in range(n_steps):
        theta = theta + dt * pairwise_drift(theta, omega, coupling, gain * float(u(k * dt)))
    return theta


def richardson_euler(theta0, omega, coupling, gain, u, t_end, dt):
    """Second-order accurate extrapolation ``2 E(dt/2) - E(dt)`` of two Euler runs."""
    coarse = euler_trajectory(theta0, omega, coupling, gain, u, t_end, dt)
    fine = euler_trajectory(theta0, omega, coupling, gain, u, t_end, dt / 2)
    return 2.0 * fine - coarse


def b_n_poisson(n, a, density, upper):
    """``b_n`` from the Poisson-kernel series of the drifting density.

    For ``w > a`` the conditional density expands as
    ``1 + 2 sum_k q^k cos(k (theta - pi/2))`` with ``q = (w - sqrt(w^2 - a^2)) / a``,
    so its n-th Fourier moment is ``q^n cos(n pi / 2)``.
    """
    if a >= upper:
        return 0.0
    if a == 0.0:
        q = lambda w: 0.0 if n else 1.0  # noqa: E731
    else:
        q = lambda w: ((w - math.sqrt(w * w - a * a)) / a) ** n  # noqa: E731
    val = integrate.quad(lambda w: q(w) * float(density(w)), a, upper, epsabs=1e-14, epsrel=1e-13, limit=400)[0]
    return 2.0 * math.cos(n * math.pi / 2.0) * val


def b_n_monte_carlo(n, a, sigma, n_samples, rng, chunk=10**6):
    """Monte-Carlo estimate of ``b_n`` for a centered Gaussian, with its standard error.

    ``|w|`` is drawn from the Gaussian restricted to ``|w| > a`` by inverse
    CDF, its sign by a fair coin, and ``theta`` uniformly on the circle.
    """
    tail = 2.0 * stats.norm.sf(a / sigma)
    total = total_sq = 0.0
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        w = sigma * stats.norm.isf(0.5 * tail * rng.uniform(size=m))
        w = np.where(rng.uniform(size=m) < 0.5, w, -w)
        theta = rng.uniform(0.0, 2.0 * math.pi, size=m)
        dens = np.sqrt(w * w - a * a) / (2.0 * math.pi * np.abs(w - a * np.sin(theta)))
        f = tail * 2.0 * math.pi * np.cos(n * theta) * dens
        total += f.sum()
        total_sq += (f * f).sum()
        done += m
    mean = total / n_samples
    var = (total_sq - n_samples * mean * mean) / (n_samples - 1)
    return mean, math.sqrt(var / n_samples)


def r_star_uniform_closed_form(K, half_width):
    """Fully locked branch of a uniform density: solve for ``x = gamma / (K r)``.

    With every oscillator locked, ``F(r) = r`` reduces to
    ``K (x sqrt(1 - x^2) + arcsin x) / (2 gamma) = 1``.
    """
    f = lambda x: K * (x * math.sqrt(1 - x * x) + math.asin(x)) / (2 * half_width) - 1.0  # noqa: E731
    x = optimize.brentq(f, 1e-12, 1.0, xtol=1e-15)
    return half_width / (K * x)


def r_star_gaussian_direct(K, sigma, lo):
    """Root of ``F(r) - r`` above ``lo``, with ``F`` integrated in the frequency variable.

    The square-root endpoint behaviour is handled by an algebraic quadrature weight.
    """

    def F(r):
        a = K * r
        g = lambda w: math.exp(-0.5 * (w / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))  # noqa: E731
        # sqrt(1 - (w/a)^2) = sqrt(a - w) sqrt(a + w) / a
        return integrate.quad(lambda w: g(w) / a, -a, a, weight="alg", wvar=(0.5, 0.5), epsabs=1e-14)[0]

    return optimize.brentq(lambda r: F(r) - r, lo, 1.0, xtol=1e-14)


def normal_equations(R, y):
    """Least-squares weights from ``w (R R^T) = y R^T`` for full-row-rank ``R``."""
    return np.linalg.solve(R @ R.T, R @ y)


def trapezoid_integral(f, t, n=200001):
    s = np.linspace(0.0, t, n)
    return float(integrate.trapezoid(f(s), s))
