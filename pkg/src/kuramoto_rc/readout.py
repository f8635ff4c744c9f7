"""Linear readout over order parameters, trained by pseudoinverse regression."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InputError

FORMAT_VERSION = 1
_HEADER_KEYS = ("format_version", "M", "K", "alpha", "Omega", "seed", "svd_tol", "ridge")


def build_design_matrix(series, n_modes=None):
    """Real matrix with rows ``[r_0, Re r_1, Im r_1, ..., Re r_M, Im r_M]``.

    ``series`` is an :class:`~kuramoto_rc.dynamics.OrderParameterSeries` or a
    complex array shaped ``(M+1, T)``. ``n_modes`` keeps only r_0..r_n_modes.
    """
    values = np.asarray(getattr(series, "values", series))
    if values.ndim != 2 or values.shape[1] < 1:
        raise InputError(f"order parameters must be a non-empty (M+1, T) array, got shape {values.shape}")
    available = values.shape[0] - 1
    m = available if n_modes is None else int(n_modes)
    if m > available or m < 0:
        raise InputError(f"series has {available} modes, {m} requested")
    R = np.empty((2 * m + 1, values.shape[1]))
    R[0] = 1.0
    R[1::2] = values[1 : m + 1].real
    R[2::2] = values[1 : m + 1].imag
    return R


def pseudoinverse(R, svd_tol=1e-10):
    """Moore-Penrose inverse via SVD, dropping singular values below ``svd_tol * s_max``."""
    U, s, Vt = np.linalg.svd(np.asarray(R, dtype=float), full_matrices=False)
    keep = s > svd_tol * s[0]
    return (Vt[keep].T / s[keep]) @ U[:, keep].T


@dataclass(frozen=True, eq=False)
class ReadoutWeights:
    """Coefficients in design-matrix row order plus training metadata."""

    coeffs: np.ndarray
    n_modes: int
    svd_tol: float = 1e-10
    ridge: float = 0.0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float).ravel()
        if coeffs.size != 2 * int(self.n_modes) + 1:
            raise InputError(f"expected {2 * self.n_modes + 1} coefficients for M={self.n_modes}, got {coeffs.size}")
        if not np.all(np.isfinite(coeffs)):
            raise InputError("readout coefficients must be finite")
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "n_modes", int(self.n_modes))

    def save(self, path):
        meta = dict(self.metadata)
        header = {
            "format_version": FORMAT_VERSION,
            "M": self.n_modes,
            "K": float(meta.get("K", math.nan)),
            "alpha": float(meta.get("alpha", math.nan)),
            "Omega": float(meta.get("Omega", math.nan)),
            "seed": int(meta["seed"]) if meta.get("seed") is not None else -1,
            "svd_tol": self.svd_tol,
            "ridge": self.ridge,
        }
        lines = [f"{k} = {_fmt(v)}" for k, v in header.items()]
        lines += ["%.16e" % c for c in self.coeffs]
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
        header = {}
        for ln in lines[: len(_HEADER_KEYS)]:
            key, sep, value = ln.partition("=")
            if not sep:
                raise InputError(f"{path}: malformed header line {ln!r}")
            header[key.strip()] = value.strip()
        missing = [k for k in _HEADER_KEYS if k not in header]
        if missing:
            raise InputError(f"{path}: missing header keys {missing}")
        if int(header["format_version"]) != FORMAT_VERSION:
            raise InputError(f"{path}: unsupported format_version {header['format_version']}")
        coeffs = [float(x) for x in lines[len(_HEADER_KEYS) :]]
        meta = {
            "K": float(header["K"]),
            "alpha": float(header["alpha"]),
            "Omega": float(header["Omega"]),
            "seed": int(header["seed"]),
        }
        return cls(coeffs, int(header["M"]), float(header["svd_tol"]), float(header["ridge"]), meta)


def _fmt(v):
    # shortest repr round-trips exactly
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def _check_finite(name, a):
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name} contains non-finite entries")


def train(R, y_tar, svd_tol=1e-10, ridge=0.0, metadata=None):
    """Minimum-norm least-squares weights ``w`` with ``w @ R ~= y_tar``.

    With ``ridge > 0`` the SVD filter factors ``s / (s^2 + ridge)`` replace
    ``1 / s``; singular values below ``svd_tol * s_max`` are always dropped.
    """
    R = np.asarray(R, dtype=float)
    y = np.asarray(y_tar, dtype=float).ravel()
    if R.ndim != 2 or R.shape[0] % 2 != 1:
        raise InputError(f"design matrix must have 2M+1 rows, got shape {R.shape}")
    if R.shape[1] < 1 or y.size != R.shape[1]:
        raise InputError(f"target length {y.size} does not match {R.shape[1]} design columns")
    if not (math.isfinite(svd_tol) and svd_tol >= 0):
        raise InputError(f"svd_tol must be finite and >= 0, got {svd_tol}")
    if not (math.isfinite(ridge) and ridge >= 0):
        raise InputError(f"ridge must be finite and >= 0, got {ridge}")
    _check_finite("design matrix", R)
    _check_finite("target", y)
    U, s, Vt = np.linalg.svd(R, full_matrices=False)
    keep = s > svd_tol * s[0]
    s = s[keep]
    inv = s / (s * s + ridge) if ridge > 0 else 1.0 / s
    w = ((y @ Vt[keep].T) * inv) @ U[:, keep].T
    return ReadoutWeights(w, (R.shape[0] - 1) // 2, svd_tol, ridge, dict(metadata or {}))


def predict(w, series):
    """Readout output ``y(t_i) = w . R[:, i]`` on ``series``."""
    values = np.asarray(getattr(series, "values", series))
    if values.ndim != 2 or values.shape[0] - 1 < w.n_modes:
        raise InputError(f"series has {values.shape[0] - 1 if values.ndim == 2 else 0} modes, weights need {w.n_modes}")
    return w.coeffs @ build_design_matrix(values, w.n_modes)


def mean_squared_error(y, y_tar):
    y = np.asarray(y, dtype=float).ravel()
    y_tar = np.asarray(y_tar, dtype=float).ravel()
    if y.size != y_tar.size or y.size == 0:
        raise InputError(f"need equal non-zero lengths, got {y.size} and {y_tar.size}")
    d = y - y_tar
    return float(np.mean(d * d))
