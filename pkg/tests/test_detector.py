import numpy as np
import pytest
from scipy.signal import butter, freqz

from photonrc.detector import (
    BOLTZMANN,
    DetectorConfig,
    ELEMENTARY_CHARGE,
    ReadoutWeights,
    butterworth_cutoff,
    noise_variance,
    photodiode,
    readout_forward,
)
from photonrc.reservoir import StateMatrix
from photonrc.signals import OpticalSignal

QUIET = DetectorConfig(noise_enabled=False)
RAW = DetectorConfig(noise_enabled=False, filter_enabled=False)


def _constant_signal(value, n=4096, period=1.0 / (24 * 10e9)):
    return OpticalSignal(np.full(n, value, dtype=complex), period)


class TestPhotodiode:
    def test_square_law_dc(self):
        # |0.2|^2 = 0.04 W at 0.5 A/W -> 0.02 A; DC passes the low-pass.
        y = photodiode(_constant_signal(0.2 + 0j), QUIET)
        assert np.allclose(y.samples[-100:], 0.02, rtol=1e-6)
        y_raw = photodiode(_constant_signal(0.2 + 0j), RAW)
        assert np.allclose(y_raw.samples, 0.02, rtol=1e-13)

    def test_zero_in_zero_out(self):
        y = photodiode(_constant_signal(0.0), QUIET)
        assert np.all(y.samples == 0.0)

    def test_phase_blind(self):
        a = _constant_signal(0.1 * np.exp(0.7j))
        b = _constant_signal(0.1 + 0j)
        assert np.allclose(photodiode(a, RAW).samples, photodiode(b, RAW).samples, rtol=1e-12)

    def test_noise_variance_formula(self):
        cfg = DetectorConfig()
        got = noise_variance(0.02, cfg)
        expected = (
            2 * ELEMENTARY_CHARGE * 25e9 * (0.02 + 1e-10)
            + 4 * BOLTZMANN * 300.0 * 25e9 / 1e6
        )
        assert got == expected
        assert np.isclose(got, 1.602e-10, rtol=1e-3)

    def test_noise_variance_empirical(self):
        # Pre-filter noise on a constant signal: sample variance over 1e5
        # samples must sit within 5% of the configured variance.
        cfg = DetectorConfig(noise_enabled=True, filter_enabled=False, noise_seed=42)
        sig = _constant_signal(0.2 + 0j, n=100_000)
        clean = photodiode(sig, RAW).samples
        noisy = photodiode(sig, cfg).samples
        measured = np.var(noisy - clean)
        assert np.isclose(measured, noise_variance(0.02, cfg), rtol=0.05)

    def test_noise_reproducible_from_seed(self):
        cfg = DetectorConfig(noise_seed=7, filter_enabled=False)
        sig = _constant_signal(0.1, n=256)
        assert np.array_equal(photodiode(sig, cfg).samples, photodiode(sig, cfg).samples)

    def test_noise_independent_with_external_rng(self):
        cfg = DetectorConfig(filter_enabled=False)
        sig = _constant_signal(0.1, n=256)
        rng = np.random.default_rng(3)
        a = photodiode(sig, cfg, rng=rng).samples
        b = photodiode(sig, cfg, rng=rng).samples
        assert not np.array_equal(a, b)


class TestButterworth:
    def test_cutoff_magnitude(self):
        fs = 24 * 10e9
        cutoff = butterworth_cutoff(DetectorConfig(), fs)
        b, a = butter(4, cutoff, btype="low", fs=fs)
        _, h = freqz(b, a, worN=[cutoff], fs=fs)
        assert np.isclose(abs(h[0]), 1 / np.sqrt(2), rtol=0.01)

    def test_passband_monotone(self):
        fs = 24 * 10e9
        cutoff = butterworth_cutoff(DetectorConfig(), fs)
        b, a = butter(4, cutoff, btype="low", fs=fs)
        freqs = np.linspace(0, cutoff, 200)
        _, h = freqz(b, a, worN=freqs, fs=fs)
        mags = np.abs(h)
        assert np.all(np.diff(mags) <= 1e-9)

    def test_cutoff_capped_below_nyquist(self):
        fs = 24 * 1e9  # 1 Gbps: Nyquist 12 GHz < 25 GHz bandwidth
        cfg = DetectorConfig()
        assert butterworth_cutoff(cfg, fs) == 0.45 * fs
        fs_fast = 24 * 10e9
        assert butterworth_cutoff(cfg, fs_fast) == cfg.bandwidth_hz

    def test_filter_stable_at_low_sample_rate(self):
        sig = OpticalSignal(np.ones(2000, complex) * 0.1, 1.0 / (24 * 1e9))
        y = photodiode(sig, QUIET)
        assert np.isfinite(y.samples).all()
        assert np.allclose(y.samples[-50:], 0.005, rtol=1e-3)


class TestReadoutForward:
    def _states(self, columns):
        arr = np.stack(columns, axis=1).astype(complex)
        roles = tuple(f"ch{i}" for i in range(arr.shape[1]))
        return StateMatrix(arr, 1e-11, roles)

    def test_one_hot_selects_channel(self):
        rng = np.random.default_rng(0)
        x = self._states([rng.normal(size=64) + 1j * rng.normal(size=64) for _ in range(3)])
        w = np.zeros(3, complex)
        w[1] = 1.0
        direct = photodiode(OpticalSignal(x.samples[:, 1], x.sample_period), RAW)
        via_readout = readout_forward(x, w, RAW)
        assert np.allclose(via_readout.samples, direct.samples, rtol=1e-12)

    def test_zero_weights_zero_output(self):
        x = self._states([np.ones(32), np.ones(32)])
        y = readout_forward(x, np.zeros(2, complex), QUIET)
        assert np.all(y.samples == 0.0)

    def test_coherent_cancellation(self):
        x = self._states([np.ones(32), -np.ones(32)])
        y = readout_forward(x, np.array([1.0, 1.0], complex), RAW)
        assert np.allclose(y.samples, 0.0, atol=1e-15)

    def test_global_phase_invariance(self):
        rng = np.random.default_rng(1)
        x = self._states([rng.normal(size=128) + 1j * rng.normal(size=128) for _ in range(4)])
        w = rng.normal(size=4) + 1j * rng.normal(size=4)
        base = readout_forward(x, w, QUIET).samples
        for theta in (0.3, 1.7, np.pi):
            rotated = readout_forward(x, np.exp(1j * theta) * w, QUIET).samples
            assert np.allclose(rotated, base, rtol=1e-12, atol=1e-18)

    def test_per_sample_row_phase_invariance(self):
        rng = np.random.default_rng(2)
        x = self._states([rng.normal(size=128) + 1j * rng.normal(size=128) for _ in range(4)])
        w = rng.normal(size=4) + 1j * rng.normal(size=4)
        base = readout_forward(x, w, RAW).samples
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=128))
        rotated = StateMatrix(x.samples * phases[:, None], x.sample_period, x.channel_roles)
        assert np.allclose(readout_forward(rotated, w, RAW).samples, base, rtol=1e-12)

    def test_dimension_mismatch_rejected(self):
        x = self._states([np.ones(8)])
        with pytest.raises(ValueError):
            readout_forward(x, np.ones(3, complex), QUIET)

    def test_readout_weights_wrapper(self):
        x = self._states([np.ones(8), np.zeros(8)])
        w = ReadoutWeights(np.array([1.0, 0.0], complex))
        assert len(w) == 2
        y = readout_forward(x, w, RAW)
        assert np.allclose(y.samples, 0.5)


class TestConfigValidation:
    def test_bad_values_rejected(self):
        with pytest.raises(ValueError):
            DetectorConfig(responsivity=0.0)
        with pytest.raises(ValueError):
            DetectorConfig(bandwidth_hz=-1.0)
        with pytest.raises(ValueError):
            DetectorConfig(dark_current_a=-1e-9)
        with pytest.raises(ValueError):
            DetectorConfig(load_ohm=0.0)
