import numpy as np
import pytest

from photonrc.detector import DetectorConfig, photodiode
from photonrc.reservoir import StateMatrix
from photonrc.ridge import RidgeConfig, cv_alpha, default_alpha_grid, invert_target, ridge_solve
from photonrc.signals import OpticalSignal


def _random_system(n, f, seed, noise=0.0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, f)) + 1j * rng.normal(size=(n, f))
    w_true = rng.normal(size=f) + 1j * rng.normal(size=f)
    t = x @ w_true + noise * (rng.normal(size=n) + 1j * rng.normal(size=n))
    return x, w_true, t


def _augmented_oracle(x, t, alpha, penalty_mask=None):
    """Stacked least-squares solved by SVD: an independent numerical path."""
    f = x.shape[1]
    mask = np.ones(f) if penalty_mask is None else np.asarray(penalty_mask, float)
    stacked = np.vstack([x, alpha * np.diag(mask)])
    rhs = np.concatenate([t, np.zeros(f)])
    w, *_ = np.linalg.lstsq(stacked, rhs, rcond=None)
    return w


class TestInvertTarget:
    def test_zero(self):
        assert invert_target(np.zeros(4), 0.5).tolist() == [0, 0, 0, 0]

    def test_explicit_value(self):
        out = invert_target(np.array([0.1]), 0.5)
        assert np.isclose(out[0], np.sqrt(0.2))
        assert np.isclose(out[0], 0.44721, atol=1e-5)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            invert_target(np.array([0.1, -0.2]), 0.5)

    def test_detector_inversion_identity(self):
        # Feeding sqrt(d/R) through a noiseless, unfiltered detector gives d back.
        d = np.array([0.0, 0.1, 0.1, 0.0, 0.025])
        amp = invert_target(d, 0.5)
        cfg = DetectorConfig(noise_enabled=False, filter_enabled=False)
        y = photodiode(OpticalSignal(amp.astype(complex), 1e-11), cfg)
        assert np.allclose(y.samples, d, rtol=1e-12, atol=1e-18)


class TestRidgeSolve:
    def test_diagonal_example(self):
        w = ridge_solve(np.eye(2), np.array([1.0, 0.0]), alpha=1.0, regularize_bias=True)
        assert np.allclose(w.values, [0.5, 0.0])

    def test_exact_solve_alpha_zero(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        t = rng.normal(size=4) + 1j * rng.normal(size=4)
        w = ridge_solve(x, t, alpha=0.0)
        assert np.allclose(x @ w.values, t, rtol=1e-9)

    def test_matches_independent_oracle(self):
        for seed in range(5):
            x, _, t = _random_system(50, 5, seed, noise=0.3)
            for alpha in (1e-3, 0.1, 1.0, 10.0):
                w = ridge_solve(x, t, alpha).values
                w_oracle = _augmented_oracle(x, t, alpha)
                assert np.linalg.norm(w - w_oracle) <= 1e-10 * np.linalg.norm(w_oracle)

    def test_bias_channel_not_penalized(self):
        x, _, t = _random_system(60, 4, 3, noise=0.2)
        bias = np.ones((60, 1), dtype=complex)
        xb = np.hstack([x, bias])
        w = ridge_solve(xb, t, alpha=2.0, bias_channel=4).values
        mask = np.array([1.0, 1.0, 1.0, 1.0, 0.0])
        w_oracle = _augmented_oracle(xb, t, 2.0, penalty_mask=mask)
        assert np.allclose(w, w_oracle, rtol=1e-9)

    def test_singular_at_alpha_zero(self):
        x = np.ones((6, 3), dtype=complex)  # rank 1
        t = np.ones(6, dtype=complex)
        with pytest.raises(np.linalg.LinAlgError):
            ridge_solve(x, t, alpha=0.0)

    def test_monotone_shrinkage(self):
        x, _, t = _random_system(40, 6, 9, noise=0.5)
        alphas = [1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0]
        norms = [np.linalg.norm(ridge_solve(x, t, a).values) for a in alphas]
        assert all(n1 >= n2 - 1e-12 for n1, n2 in zip(norms, norms[1:]))

    def test_real_system_gives_real_weights(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(30, 5)).astype(complex)
        t = rng.normal(size=30)
        w = ridge_solve(x, t, alpha=0.5).values
        assert np.max(np.abs(w.imag)) <= 1e-12

    def test_gradient_descent_oracle(self):
        # Wirtinger gradient descent on |Xw - t|^2 + a^2 |w|^2 converges to
        # the same minimizer on a small well-conditioned instance.
        x, _, t = _random_system(30, 3, 7, noise=0.2)
        alpha = 0.7
        w = np.zeros(3, dtype=complex)
        lipschitz = np.linalg.norm(x.conj().T @ x, 2) + alpha**2
        step = 1.0 / lipschitz
        for _ in range(20000):
            grad = x.conj().T @ (x @ w - t) + alpha**2 * w
            w = w - step * grad
        assert np.allclose(w, ridge_solve(x, t, alpha).values, atol=1e-8)

    def test_local_minimality(self):
        x, _, t = _random_system(25, 4, 11, noise=0.4)
        alpha = 0.9
        w = ridge_solve(x, t, alpha).values

        def objective(v):
            return np.sum(np.abs(x @ v - t) ** 2) + alpha**2 * np.sum(np.abs(v) ** 2)

        base = objective(w)
        rng = np.random.default_rng(0)
        for _ in range(50):
            delta = 1e-4 * (rng.normal(size=4) + 1j * rng.normal(size=4))
            assert objective(w + delta) >= base


class TestCvAlpha:
    def test_single_alpha_grid(self):
        x, _, t = _random_system(40, 3, 1, noise=0.1)
        alpha, w = cv_alpha(x, np.abs(t), RidgeConfig(alpha_grid=(0.25,), folds=4))
        assert alpha == 0.25
        assert len(w.values) == 3

    def test_noiseless_system_picks_smallest_alpha(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(100, 4)) + 1j * rng.normal(size=(100, 4))
        w_true = rng.normal(size=4) + 1j * rng.normal(size=4)
        t = np.abs(x @ w_true)  # exactly representable modulus target
        grid = (1e-6, 1e-3, 1.0, 10.0)
        alpha, _ = cv_alpha(x, t, RidgeConfig(alpha_grid=grid, folds=5))
        assert alpha == 1e-6

    def test_pure_noise_target_prefers_shrinkage(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(200, 6)) + 1j * rng.normal(size=(200, 6))
        t = rng.normal(size=200)  # independent of x
        grid = tuple(10.0**k for k in range(-6, 4))
        alpha, _ = cv_alpha(x, t, RidgeConfig(alpha_grid=grid, folds=5))
        assert alpha >= np.median(grid)

    def test_empty_grid_rejected(self):
        x, _, t = _random_system(20, 2, 5)
        with pytest.raises(ValueError):
            cv_alpha(x, np.abs(t), RidgeConfig(alpha_grid=(), folds=2))

    def test_too_few_samples_rejected(self):
        x, _, t = _random_system(3, 2, 5)
        with pytest.raises(ValueError):
            cv_alpha(x, np.abs(t), RidgeConfig(alpha_grid=(0.1,), folds=5))

    def test_state_matrix_bias_exemption(self):
        rng = np.random.default_rng(8)
        arr = rng.normal(size=(90, 3)) + 1j * rng.normal(size=(90, 3))
        arr[:, 2] = 0.14
        states = StateMatrix(arr, 1e-11, ("node0", "node1", "bias"))
        t = np.abs(arr @ np.array([0.2, -0.4j, 1.0]))
        alpha, w = cv_alpha(states, t, RidgeConfig(alpha_grid=(5.0,), folds=3))
        w_oracle = _augmented_oracle(arr, t, 5.0, penalty_mask=np.array([1.0, 1.0, 0.0]))
        assert np.allclose(w.values, w_oracle, rtol=1e-8)

    def test_default_grid_scales_with_power(self):
        small = default_alpha_grid(0.01 * np.ones((10, 2)))
        large = default_alpha_grid(1.0 * np.ones((10, 2)))
        assert len(small) == len(large) == 15
        assert small[0] < large[0]
