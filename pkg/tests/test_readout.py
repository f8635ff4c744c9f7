import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kuramoto_rc.dynamics import OrderParameterSeries, ReservoirConfig, simulate
from kuramoto_rc.ensemble import Gaussian, make_rng
from kuramoto_rc.exceptions import InputError
from kuramoto_rc.readout import (
    ReadoutWeights,
    build_design_matrix,
    mean_squared_error,
    predict,
    pseudoinverse,
    train,
)
from kuramoto_rc.signals import Sine
from oracles import normal_equations


def _coincident_series(phi, m, t=4):
    vals = np.exp(1j * np.arange(m + 1)[:, None] * phi) * np.ones((1, t))
    return OrderParameterSeries(np.arange(t) * 0.01, vals)


def _simulated(m=5, n=300):
    cfg = ReservoirConfig(n_oscillators=200, coupling=0.8, n_modes=m)
    return simulate(cfg, Gaussian(0.5, 0.4), Sine(0.5), 20.0, 20.0 - (n - 1) * 0.01, seed=3)


def test_design_matrix_coincident_zero():
    R = build_design_matrix(_coincident_series(0.0, 3))
    assert R.shape == (7, 4)
    assert np.all(R[0] == 1) and np.all(R[1::2] == 1) and np.all(R[2::2] == 0)


def test_design_matrix_re_im_split():
    vals = np.array([[1.0], [1j]])
    assert build_design_matrix(vals).ravel().tolist() == [1.0, 0.0, 1.0]


def test_design_matrix_row_zero_and_bounds():
    R = build_design_matrix(_simulated())
    assert np.all(R[0] == 1.0)
    assert np.all(np.abs(R) <= 1.0)


def test_design_matrix_truncation_and_errors():
    s = _simulated(m=5)
    assert build_design_matrix(s, 2).shape == (5, len(s))
    with pytest.raises(InputError):
        build_design_matrix(s, 6)


def test_train_recovers_output_of_known_weights():
    s = _simulated(m=5, n=300)
    R = build_design_matrix(s)
    w_star = np.zeros(R.shape[0])
    w_star[:7] = make_rng(0).normal(size=7)
    y = w_star @ R
    w = train(R, y)
    assert np.max(np.abs(w.coeffs @ R - y)) < 1e-8


def test_train_rank_one_minimum_norm():
    R = np.zeros((5, 1))
    R[0, 0] = 1.0
    w = train(R, [3.0])
    assert np.allclose(w.coeffs, [3.0, 0, 0, 0, 0], atol=1e-15)


def test_train_zero_target():
    R = build_design_matrix(_simulated())
    assert np.all(train(R, np.zeros(R.shape[1])).coeffs == 0.0)


def test_train_matches_normal_equations():
    rng = make_rng(4)
    R = rng.uniform(-1, 1, size=(7, 40))
    R[0] = 1.0
    y = rng.normal(size=40)
    w = train(R, y)
    assert np.allclose(w.coeffs, normal_equations(R, y), atol=1e-10)
    fitted = w.coeffs @ R
    # residual is orthogonal to the row space
    assert np.max(np.abs(R @ (y - fitted))) < 1e-10


def test_train_rejects_nonfinite_and_mismatch():
    R = np.ones((3, 4))
    with pytest.raises(InputError):
        train(R, [1.0, 2.0, math.nan, 0.0])
    R2 = R.copy()
    R2[1, 1] = math.inf
    with pytest.raises(InputError):
        train(R2, np.zeros(4))
    with pytest.raises(InputError):
        train(R, np.zeros(3))
    with pytest.raises(InputError):
        train(np.ones((2, 4)), np.zeros(4))


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_pseudoinverse_identities(seed):
    R = make_rng(seed).normal(size=(21, 200))
    P = pseudoinverse(R)
    assert np.max(np.abs(R @ P @ R - R)) < 1e-8
    assert np.max(np.abs(P @ R @ P - P)) < 1e-8


def test_pseudoinverse_identities_rank_deficient():
    rng = make_rng(1)
    R = rng.normal(size=(21, 5)) @ rng.normal(size=(5, 200))
    P = pseudoinverse(R)
    assert np.max(np.abs(R @ P @ R - R)) < 1e-8
    assert np.max(np.abs(P @ R @ P - P)) < 1e-8
    assert np.allclose(P, np.linalg.pinv(R, rcond=1e-10), atol=1e-10)


def test_training_optimality_under_perturbation():
    s = _simulated()
    R = build_design_matrix(s)
    y = np.sin(0.5 * s.times)
    w = train(R, y).coeffs
    base = np.linalg.norm(y - w @ R)
    rng = make_rng(2)
    for _ in range(50):
        d = rng.normal(size=w.size)
        d *= 1e-3 / np.linalg.norm(d)
        assert np.linalg.norm(y - (w + d) @ R) >= base - 1e-12


def test_scale_equivariance():
    R = build_design_matrix(_simulated())
    y = np.cos(np.arange(R.shape[1]) * 0.01)
    for c in (-2.5, 0.0, 3.0):
        assert np.allclose(train(R, c * y).coeffs, c * train(R, y).coeffs, rtol=1e-10, atol=1e-12)


def test_retraining_on_fitted_outputs_is_idempotent():
    R = build_design_matrix(_simulated())
    y = np.cos(0.3 * np.arange(R.shape[1]))
    fitted = train(R, y).coeffs @ R
    refit = train(R, fitted).coeffs @ R
    assert np.max(np.abs(refit - fitted)) < 1e-10


def test_ridge_shrinks_and_is_recorded(tmp_path):
    R = build_design_matrix(_simulated())
    y = np.sin(np.arange(R.shape[1]) * 0.01)
    w0 = train(R, y)
    w1 = train(R, y, ridge=1.0)
    assert np.linalg.norm(w1.coeffs) < np.linalg.norm(w0.coeffs)
    w1.save(tmp_path / "w.txt")
    assert ReadoutWeights.load(tmp_path / "w.txt").ridge == 1.0


def test_predict_examples():
    s = _simulated(m=3)
    w = ReadoutWeights([1.0] + [0.0] * 6, 3)
    assert np.all(predict(w, s) == 1.0)
    phi = 1.1
    w = ReadoutWeights([0.0, 1.0] + [0.0] * 5, 3)
    assert np.allclose(predict(w, _coincident_series(phi, 3)), math.cos(phi), atol=1e-15)


def test_predict_on_training_window_is_least_squares_fit():
    rng = make_rng(6)
    vals = np.exp(1j * rng.uniform(0, 2 * np.pi, size=(3, 30)))
    vals[0] = 1.0
    s = OrderParameterSeries(np.arange(30.0), vals)
    R = build_design_matrix(s)
    y = rng.normal(size=30)
    w = train(R, y)
    assert np.allclose(predict(w, s), normal_equations(R, y) @ R, atol=1e-12)


def test_predict_mode_mismatch():
    w = ReadoutWeights(np.zeros(11), 5)
    with pytest.raises(InputError):
        predict(w, _simulated(m=3))
    # extra modes in the series are ignored
    assert predict(ReadoutWeights(np.ones(3), 1), _simulated(m=3)).shape == (300,)


def test_mse_examples():
    assert mean_squared_error([1, 2], [1, 2]) == 0.0
    assert mean_squared_error([0, 0], [1, 1]) == 1.0
    assert mean_squared_error([1, 2, 3], [1, 1, 1]) == pytest.approx(5 / 3, rel=1e-15)
    with pytest.raises(InputError):
        mean_squared_error([1], [1, 2])


def test_weights_roundtrip_exact(tmp_path):
    coeffs = make_rng(9).normal(size=21) * 10.0 ** make_rng(10).integers(-12, 12, size=21)
    w = ReadoutWeights(coeffs, 10, 1e-10, 0.0, {"K": 0.7, "alpha": 0.01, "Omega": 0.5, "seed": 42})
    path = tmp_path / "w.txt"
    w.save(path)
    back = ReadoutWeights.load(path)
    assert np.array_equal(back.coeffs, w.coeffs)
    assert back.n_modes == 10 and back.svd_tol == 1e-10
    assert back.metadata == {"K": 0.7, "alpha": 0.01, "Omega": 0.5, "seed": 42}
    lines = path.read_text().splitlines()
    assert [ln.split("=")[0].strip() for ln in lines[:8]] == [
        "format_version",
        "M",
        "K",
        "alpha",
        "Omega",
        "seed",
        "svd_tol",
        "ridge",
    ]
    # 17 significant digits on every coefficient line
    assert all(len(ln.lstrip("-").split("e")[0].replace(".", "")) == 17 for ln in lines[8:])
    back.save(tmp_path / "w2.txt")
    assert (tmp_path / "w2.txt").read_text() == path.read_text()


def test_weights_validation(tmp_path):
    with pytest.raises(InputError):
        ReadoutWeights(np.zeros(4), 2)
    with pytest.raises(InputError):
        ReadoutWeights([0.0, math.nan, 0.0], 1)
    bad = tmp_path / "bad.txt"
    bad.write_text("format_version = 9\nM = 0\nK = 1\nalpha = 0\nOmega = 0\nseed = 0\nsvd_tol = 0\nridge = 0\n1\n")
    with pytest.raises(InputError):
        ReadoutWeights.load(bad)
