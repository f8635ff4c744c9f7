"""Compiled fixed-step integrator for batches of mean-field Kuramoto ensembles.

Each stage needs sin/cos of the stage phases.  They are obtained by rotating
the current (sin, cos) pair through the stage increment with truncated
Taylor series, exact to double precision while every increment stays below
``MAX_INCREMENT`` rad; full trig evaluations happen only every ``_RESYNC``
steps.  Callers must check that bound (see ``dynamics.run_ensembles``).
"""

import math

import numpy as np
from numba import njit

EULER = 0
RK4 = 1

_TWO_PI = 2.0 * math.pi
MAX_INCREMENT = 0.1
_RESYNC = 64
# nested Taylor factors: sin uses 1/(2k(2k+1)), cos uses 1/((2k-1)2k)
_S3, _S5, _S7, _S9 = 1.0 / 6.0, 1.0 / 20.0, 1.0 / 42.0, 1.0 / 72.0
_C4, _C6, _C8, _C10 = 1.0 / 12.0, 1.0 / 30.0, 1.0 / 56.0, 1.0 / 90.0


@njit(cache=True, inline="always", fastmath=True)
def _sincos_small(d):
    # truncation error below 1e-18 for |d| < MAX_INCREMENT
    d2 = d * d
    s = d * (1.0 - d2 * _S3 * (1.0 - d2 * _S5 * (1.0 - d2 * _S7 * (1.0 - d2 * _S9))))
    c = 1.0 - d2 * 0.5 * (1.0 - d2 * _C4 * (1.0 - d2 * _C6 * (1.0 - d2 * _C8 * (1.0 - d2 * _C10))))
    return s, c


@njit(cache=True, inline="always", fastmath=True)
def _wrap(x):
    # increments are far smaller than 2*pi, so one shift almost always suffices
    if x >= _TWO_PI:
        x -= _TWO_PI
    elif x < 0.0:
        x += _TWO_PI
    if x < 0.0 or x >= _TWO_PI:
        x = x % _TWO_PI
        if x >= _TWO_PI:
            x = 0.0
    return x


@njit(cache=True)
def _record(s, c, n_modes, out, b, col):
    n = s.size
    out[b, 0, col] = 1.0 + 0.0j
    if n_modes == 0:
        return
    acc_re = np.zeros(n_modes)
    acc_im = np.zeros(n_modes)
    for j in range(n):
        pr = c[j]
        pi = s[j]
        acc_re[0] += pr
        acc_im[0] += pi
        for m in range(1, n_modes):
            tr = pr * c[j] - pi * s[j]
            pi = pr * s[j] + pi * c[j]
            pr = tr
            acc_re[m] += pr
            acc_im[m] += pi
    for m in range(n_modes):
        out[b, m + 1, col] = complex(acc_re[m] / n, acc_im[m] / n)


@njit(cache=True, nogil=True, fastmath=True)
def integrate_batch(theta, omega, coupling, dt, drive, method, n_steps, record_start, n_modes, out):
    """Advance every row of ``theta`` by ``n_steps`` steps in place.

    ``drive[k]`` holds alpha*u at t_k, t_k + dt/2 and t_k + dt.  The state
    after ``k`` steps is recorded into ``out[:, :, k - record_start]`` for
    every ``k >= record_start`` (``k`` runs from 0 to ``n_steps``).
    """
    n_batch, n = theta.shape
    inv_n = 1.0 / n
    s = np.empty(n)
    c = np.empty(n)
    ss = np.empty(n)
    cs = np.empty(n)
    acc = np.empty(n)
    half = 0.5 * dt
    sixth = dt / 6.0
    for b in range(n_batch):
        th = theta[b]
        om = omega[b]
        for k in range(n_steps + 1):
            if k % _RESYNC == 0:
                for j in range(n):
                    s[j] = math.sin(th[j])
                    c[j] = math.cos(th[j])
            if k >= record_start:
                _record(s, c, n_modes, out, b, k - record_start)
            if k == n_steps:
                break
            sx = 0.0
            sy = 0.0
            for j in range(n):
                sx += c[j]
                sy += s[j]
            x = sx * inv_n
            y = sy * inv_n
            if method == EULER:
                d0 = drive[k, 0]
                for j in range(n):
                    kj = d0 + om[j] + coupling * (y * c[j] - x * s[j])
                    delta = dt * kj
                    th[j] = _wrap(th[j] + delta)
                    sd, cd = _sincos_small(delta)
                    sj = s[j]
                    s[j] = sj * cd + c[j] * sd
                    c[j] = c[j] * cd - sj * sd
                continue
            d0 = drive[k, 0]
            d1 = drive[k, 1]
            d2 = drive[k, 2]
            # stage 1, and rotation to the stage-2 phases
            sx = 0.0
            sy = 0.0
            for j in range(n):
                kj = d0 + om[j] + coupling * (y * c[j] - x * s[j])
                acc[j] = kj
                sd, cd = _sincos_small(half * kj)
                ss[j] = s[j] * cd + c[j] * sd
                cs[j] = c[j] * cd - s[j] * sd
                sx += cs[j]
                sy += ss[j]
            x = sx * inv_n
            y = sy * inv_n
            # stage 2 -> stage-3 phases
            sx = 0.0
            sy = 0.0
            for j in range(n):
                kj = d1 + om[j] + coupling * (y * cs[j] - x * ss[j])
                acc[j] += 2.0 * kj
                sd, cd = _sincos_small(half * kj)
                ss[j] = s[j] * cd + c[j] * sd
                cs[j] = c[j] * cd - s[j] * sd
                sx += cs[j]
                sy += ss[j]
            x = sx * inv_n
            y = sy * inv_n
            # stage 3 -> stage-4 phases
            sx = 0.0
            sy = 0.0
            for j in range(n):
                kj = d1 + om[j] + coupling * (y * cs[j] - x * ss[j])
                acc[j] += 2.0 * kj
                sd, cd = _sincos_small(dt * kj)
                ss[j] = s[j] * cd + c[j] * sd
                cs[j] = c[j] * cd - s[j] * sd
                sx += cs[j]
                sy += ss[j]
            x = sx * inv_n
            y = sy * inv_n
            # stage 4 and the combined update
            for j in range(n):
                kj = d2 + om[j] + coupling * (y * cs[j] - x * ss[j])
                delta = sixth * (acc[j] + kj)
                th[j] = _wrap(th[j] + delta)
                sd, cd = _sincos_small(delta)
                sj = s[j]
                s[j] = sj * cd + c[j] * sd
                c[j] = c[j] * cd - sj * sd
