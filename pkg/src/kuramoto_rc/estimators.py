"""scikit-learn compatible wrappers: the oscillator reservoir as a transformer, the readout as a regressor.

Typical use::

    model = make_pipeline(KuramotoReservoir(coupling=0.7), PseudoinverseReadout(washout=24000))
    model.fit(u[:, None], y_tar)
    y = model.predict(u[:, None])
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .dynamics import ReservoirConfig, run_ensembles
from .ensemble import Gaussian, Uniform, init_ensemble, make_rng
from .exceptions import InputError
from .readout import ReadoutWeights, build_design_matrix, train
from .signals import Sampled


def make_distribution(kind, omega_mean=0.5, omega_std=0.4, omega_lo=0.0, omega_hi=1.0):
    if kind == "gaussian":
        return Gaussian(omega_mean, omega_std)
    if kind == "uniform":
        return Uniform(omega_lo, omega_hi)
    raise InputError(f"unknown distribution kind {kind!r}; expected 'gaussian' or 'uniform'")


class KuramotoReservoir(BaseEstimator, TransformerMixin):
    """Maps a sampled scalar input to order-parameter features.

    ``fit`` draws the oscillator ensemble from ``random_state``;
    ``transform`` integrates that same initial ensemble through the input
    ``X`` (one column, samples ``dt`` apart starting at t = 0) and returns
    the design-matrix columns as rows, shape ``(T, 2 * n_modes + 1)``.
    """

    def __init__(
        self,
        n_oscillators=500,
        coupling=0.7,
        input_gain=0.01,
        dt=0.01,
        integrator="rk4",
        n_modes=10,
        distribution="gaussian",
        omega_mean=0.5,
        omega_std=0.4,
        omega_lo=0.0,
        omega_hi=1.0,
        phase_init="uniform",
        frequency_sampling="quantile",
        random_state=0,
    ):
        self.n_oscillators = n_oscillators
        self.coupling = coupling
        self.input_gain = input_gain
        self.dt = dt
        self.integrator = integrator
        self.n_modes = n_modes
        self.distribution = distribution
        self.omega_mean = omega_mean
        self.omega_std = omega_std
        self.omega_lo = omega_lo
        self.omega_hi = omega_hi
        self.phase_init = phase_init
        self.frequency_sampling = frequency_sampling
        self.random_state = random_state

    def _config(self):
        return ReservoirConfig(
            self.n_oscillators,
            self.coupling,
            self.input_gain,
            self.dt,
            self.integrator,
            self.n_modes,
            self.phase_init,
            self.frequency_sampling,
        )

    def fit(self, X, y=None):
        check_array(X, ensure_min_samples=1)
        self.config_ = self._config()
        self.distribution_ = make_distribution(
            self.distribution, self.omega_mean, self.omega_std, self.omega_lo, self.omega_hi
        )
        self.initial_state_ = init_ensemble(
            self.config_.n_oscillators,
            self.distribution_,
            self.config_.phase_init,
            make_rng(self.random_state),
            self.config_.frequency_sampling,
        )
        self.n_features_in_ = 1
        return self

    def order_parameters(self, X):
        """Complex ``r_0..r_M`` along ``X``, shape ``(M+1, T)``."""
        check_is_fitted(self, "initial_state_")
        X = check_array(X, ensure_min_samples=1)
        if X.shape[1] != 1:
            raise InputError(f"reservoir takes a single input column, got {X.shape[1]}")
        t = self.config_.dt * np.arange(X.shape[0])
        u = Sampled(t, X[:, 0])
        _, values = run_ensembles([self.initial_state_], u, self.config_, X.shape[0] - 1)
        return values[0]

    def transform(self, X):
        return build_design_matrix(self.order_parameters(X)).T


class PseudoinverseReadout(BaseEstimator, RegressorMixin):
    """Linear readout trained by SVD pseudoinverse.

    The first ``washout`` rows are left out of the fit; predictions cover
    every row.
    """

    def __init__(self, svd_tol=1e-10, ridge=0.0, washout=0):
        self.svd_tol = svd_tol
        self.ridge = ridge
        self.washout = washout

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if X.shape[1] % 2 != 1:
            raise InputError(f"features must have 2M+1 columns, got {X.shape[1]}")
        if not 0 <= self.washout < X.shape[0]:
            raise InputError(f"washout must lie in [0, {X.shape[0]}), got {self.washout}")
        self.weights_ = train(X[self.washout :].T, y[self.washout :], self.svd_tol, self.ridge)
        self.coef_ = self.weights_.coeffs
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "weights_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise InputError(f"expected {self.n_features_in_} feature columns, got {X.shape[1]}")
        return X @ self.coef_

    @classmethod
    def from_weights(cls, weights: ReadoutWeights):
        est = cls(weights.svd_tol, weights.ridge)
        est.weights_ = weights
        est.coef_ = weights.coeffs
        est.n_features_in_ = weights.coeffs.size
        return est
