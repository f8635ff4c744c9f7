"""Flat ``key = value`` run configuration with section prefixes.

Precedence is defaults < config file < command-line overrides.  Keys may be
given in full (``reservoir.coupling``) or by their unambiguous last part
(``coupling``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import INTEGRATORS, ReservoirConfig
from .ensemble import FREQUENCY_SAMPLINGS, PHASE_INITS, RNG_ALGORITHM, Gaussian, Uniform
from .exceptions import ConfigError, KuramotoRCError
from .tasks import TASK_KINDS, SweepSpec, TaskSpec

__all__ = ["RunConfig", "DEFAULTS", "parse_config", "read_config_file", "ALIASES"]


def _float_list(text):
    items = [s for s in text.replace(" ", "").split(",") if s]
    if not items:
        raise ValueError("empty list")
    return tuple(float(s) for s in items)


def _positive(v):
    return v > 0


def _nonneg(v):
    return v >= 0


def _finite(v):
    return math.isfinite(v)


def _u64(v):
    return 0 <= v < 2**64


# key: (parser, default, check, description of the check)
_SCHEMA = {
    "reservoir.n_oscillators": (int, 500, _positive, "must be >= 1"),
    "reservoir.coupling": (float, 0.7, lambda v: _finite(v) and v >= 0, "must be finite and >= 0"),
    "reservoir.input_gain": (float, 0.01, _finite, "must be finite"),
    "reservoir.dt": (float, 0.01, lambda v: _finite(v) and v > 0, "must be finite and > 0"),
    "reservoir.integrator": (str, "rk4", lambda v: v in INTEGRATORS, f"must be one of {INTEGRATORS}"),
    "reservoir.n_modes": (int, 10, _positive, "must be >= 1"),
    "reservoir.phase_init": (str, "uniform", lambda v: v in PHASE_INITS, f"must be one of {PHASE_INITS}"),
    "reservoir.frequency_sampling": (
        str,
        "quantile",
        lambda v: v in FREQUENCY_SAMPLINGS,
        f"must be one of {FREQUENCY_SAMPLINGS}",
    ),
    "dist.kind": (str, "gaussian", lambda v: v in ("gaussian", "uniform"), "must be 'gaussian' or 'uniform'"),
    "dist.mean": (float, 0.5, _finite, "must be finite"),
    "dist.std": (float, 0.4, lambda v: _finite(v) and v > 0, "must be finite and > 0"),
    "dist.lo": (float, 0.0, _finite, "must be finite"),
    "dist.hi": (float, 1.0, _finite, "must be finite"),
    "task.kind": (str, "prediction", lambda v: v in TASK_KINDS, f"must be one of {TASK_KINDS}"),
    "task.omega_hat": (float, 0.5, lambda v: _finite(v) and v > 0, "must be finite and > 0"),
    "task.stabilize": (float, 240.0, lambda v: _finite(v) and v > 0, "must be finite and > 0"),
    "task.train": (float, 30.0, lambda v: _finite(v) and v > 0, "must be finite and > 0"),
    "task.test": (float, 30.0, lambda v: _finite(v) and v > 0, "must be finite and > 0"),
    "sweep.K_values": (
        _float_list,
        (0.55, 0.6, 0.62, 0.64, 0.66, 0.68, 0.7, 0.75),
        lambda v: all(_finite(k) and k >= 0 for k in v),
        "must be finite values >= 0",
    ),
    "sweep.trials": (int, 10, _positive, "must be >= 1"),
    "sweep.t_end": (float, 270.0, lambda v: _finite(v) and v > 0, "must be finite and > 0"),
    "sweep.average": (float, 30.0, lambda v: _finite(v) and v > 0, "must be finite and > 0"),
    "readout.svd_tol": (float, 1e-10, lambda v: _finite(v) and v >= 0, "must be finite and >= 0"),
    "readout.ridge": (float, 0.0, lambda v: _finite(v) and v >= 0, "must be finite and >= 0"),
    "run.seed": (int, 0, _u64, "must be an unsigned 64-bit integer"),
    "run.threads": (int, 0, _nonneg, "must be >= 0 (0 means all available cores)"),
    "run.out": (str, "out", lambda v: bool(v), "must be a non-empty path"),
}

DEFAULTS = {k: spec[1] for k, spec in _SCHEMA.items()}

# run metadata lines written by the tool itself; accepted and ignored on input
META_PREFIX = "meta."


def _aliases():
    counts = {}
    for key in _SCHEMA:
        counts.setdefault(key.split(".", 1)[1], []).append(key)
    return {short: keys[0] for short, keys in counts.items() if len(keys) == 1}


ALIASES = _aliases()


def canonical_key(key):
    key = key.strip()
    if key in _SCHEMA or key.startswith(META_PREFIX):
        return key
    if key in ALIASES:
        return ALIASES[key]
    raise ConfigError(key, "unknown configuration key")


def _parse_value(key, raw):
    parser, _, check, what = _SCHEMA[key]
    if isinstance(raw, str):
        text = raw.strip()
        try:
            if parser is int:
                value = int(text, 0)
            else:
                value = parser(text)
        except ValueError:
            name = "integer" if parser is int else ("number" if parser is float else "list of numbers")
            raise ConfigError(key, f"expected a {name}, got {text!r}") from None
    else:
        value = raw
    if not check(value):
        raise ConfigError(key, f"{value!r} {what}")
    return value


def read_config_file(path):
    """``{canonical key: raw text}`` from a flat ``key = value`` file; ``#`` starts a comment."""
    entries = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}", f"expected 'key = value', got {line!r}")
            entries[canonical_key(key)] = value.strip()
    return entries


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings; ``values`` maps every canonical key to its typed value."""

    values: dict

    def __getitem__(self, key):
        return self.values[canonical_key(key)]

    def reservoir(self):
        v = self.values
        return ReservoirConfig(
            v["reservoir.n_oscillators"],
            v["reservoir.coupling"],
            v["reservoir.input_gain"],
            v["reservoir.dt"],
            v["reservoir.integrator"],
            v["reservoir.n_modes"],
            v["reservoir.phase_init"],
            v["reservoir.frequency_sampling"],
        )

    def distribution(self):
        v = self.values
        if v["dist.kind"] == "gaussian":
            return Gaussian(v["dist.mean"], v["dist.std"])
        return Uniform(v["dist.lo"], v["dist.hi"])

    def task(self):
        v = self.values
        windows = {"stabilize": v["task.stabilize"], "train_window": v["task.train"], "test_window": v["task.test"]}
        if v["task.kind"] == "prediction":
            return TaskSpec.prediction(v["task.omega_hat"], v["reservoir.dt"], **windows)
        return TaskSpec.transformation(v["task.omega_hat"], **windows)

    def sweep(self):
        v = self.values
        return SweepSpec(
            v["sweep.K_values"], v["sweep.trials"], self.task(), self.reservoir(), self.distribution(), v["run.seed"]
        )

    def lines(self, version):
        out = []
        for key in sorted(self.values):
            value = self.values[key]
            if isinstance(value, tuple):
                text = ",".join(repr(x) for x in value)
            elif isinstance(value, float):
                text = repr(value)
            else:
                text = str(value)
            out.append(f"{key} = {text}")
        out.append(f"{META_PREFIX}version = {version}")
        out.append(f"{META_PREFIX}rng_algorithm = {RNG_ALGORITHM}")
        return out


def _check_cross_field(values):
    if values["dist.kind"] == "uniform" and not values["dist.lo"] < values["dist.hi"]:
        raise ConfigError("dist.lo", f"must be < dist.hi, got {values['dist.lo']!r} >= {values['dist.hi']!r}")
    for key in ("task.stabilize", "task.train", "task.test"):
        steps = values[key] / values["reservoir.dt"]
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ConfigError(key, f"{values[key]!r} s is not a whole number of steps of dt = {values['reservoir.dt']!r}")
    if values["sweep.average"] > values["sweep.t_end"]:
        raise ConfigError("sweep.average", "must not exceed sweep.t_end")


def parse_config(path=None, overrides=None):
    """Resolve defaults, then the file at ``path``, then ``overrides`` (key -> raw text or value)."""
    raw = {}
    if path is not None:
        raw.update(read_config_file(path))
    for key, value in (overrides or {}).items():
        raw[canonical_key(key)] = value
    values = dict(DEFAULTS)
    for key, value in raw.items():
        if key.startswith(META_PREFIX):
            continue
        values[key] = _parse_value(key, value)
    _check_cross_field(values)
    cfg = RunConfig(values)
    try:
        cfg.reservoir()
        cfg.distribution()
        cfg.task()
    except KuramotoRCError as exc:
        raise ConfigError("config", str(exc)) from None
    return cfg
