"""Photodetector model and the weighted-sum optical readout in front of it.

The readout forms the inner product of the complex node signals with a
complex weight vector; the detector then converts the optical sum to a
photocurrent through its square-law response, adds shot and thermal
noise, and band-limits the result with a fourth-order Butterworth filter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import butter, lfilter

from .reservoir import StateMatrix
from .signals import OpticalSignal

__all__ = [
    "ELEMENTARY_CHARGE",
    "BOLTZMANN",
    "DetectorConfig",
    "ReadoutWeights",
    "ElectricalSignal",
    "noise_variance",
    "photodiode",
    "readout_forward",
]

ELEMENTARY_CHARGE = 1.602176634e-19  # C
BOLTZMANN = 1.380649e-23  # J/K


@dataclass(frozen=True)
class DetectorConfig:
    """Photodetector parameters.

    ``bandwidth_hz`` sets both the noise bandwidth and the Butterworth
    cutoff.  ``filter_enabled`` exists so oracles can probe the pure
    square-law response; physical runs keep it on.
    """

    responsivity: float = 0.5  # A/W
    bandwidth_hz: float = 25e9
    dark_current_a: float = 1e-10
    temperature_k: float = 300.0
    load_ohm: float = 1e6
    noise_enabled: bool = True
    filter_enabled: bool = True
    noise_seed: int | None = None

    def __post_init__(self) -> None:
        if not self.responsivity > 0:
            raise ValueError("responsivity must be positive")
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth must be positive")
        if self.dark_current_a < 0:
            raise ValueError("dark current must be non-negative")
        if not self.temperature_k > 0:
            raise ValueError("temperature must be positive")
        if not self.load_ohm > 0:
            raise ValueError("load impedance must be positive")


@dataclass(frozen=True)
class ReadoutWeights:
    """Complex weights applied to the state channels before detection."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim != 1:
            raise ValueError("weights must be one-dimensional")
        if values.size and not np.isfinite(values).all():
            raise ValueError("weights must be finite")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class ElectricalSignal:
    """Real photocurrent samples in Ampere on a uniform grid."""

    samples: np.ndarray
    sample_period: float

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if samples.size and not np.isfinite(samples).all():
            raise ValueError("electrical samples must be finite")
        if not self.sample_period > 0:
            raise ValueError("sample_period must be positive")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return int(self.samples.size)


def noise_variance(mean_current_a: float, cfg: DetectorConfig) -> float:
    """Stationary detector noise power: shot noise plus thermal noise."""
    mean_current_a = max(float(mean_current_a), 0.0)
    shot = 2.0 * ELEMENTARY_CHARGE * cfg.bandwidth_hz * (mean_current_a + cfg.dark_current_a)
    thermal = 4.0 * BOLTZMANN * cfg.temperature_k * cfg.bandwidth_hz / cfg.load_ohm
    return shot + thermal


def butterworth_cutoff(cfg: DetectorConfig, sample_rate: float) -> float:
    """Effective low-pass cutoff; capped at 0.45x the sample rate.

    Low bitrates sample below twice the detector bandwidth, where the
    nominal cutoff would not be realizable in discrete time.
    """
    nyquist = 0.5 * sample_rate
    if cfg.bandwidth_hz < nyquist:
        return cfg.bandwidth_hz
    return 0.45 * sample_rate


def photodiode(
    a: OpticalSignal,
    cfg: DetectorConfig,
    rng: np.random.Generator | None = None,
) -> ElectricalSignal:
    """Square-law detection of an optical signal.

    The photocurrent is ``responsivity * |a|^2``.  Zero-mean Gaussian
    noise with the variance from :func:`noise_variance` (evaluated at the
    mean photocurrent of this signal) is added before the band-limiting
    Butterworth filter, matching the physical ordering.  Negative samples
    produced by noise or filter ringing are retained.
    """
    current = cfg.responsivity * np.abs(a.samples) ** 2
    if cfg.noise_enabled and current.size:
        if rng is None:
            rng = np.random.default_rng(cfg.noise_seed)
        sigma = np.sqrt(noise_variance(current.mean(), cfg))
        current = current + rng.normal(0.0, sigma, size=current.size)
    if cfg.filter_enabled and current.size:
        sample_rate = 1.0 / a.sample_period
        cutoff = butterworth_cutoff(cfg, sample_rate)
        b, den = butter(4, cutoff, btype="low", fs=sample_rate)
        current = lfilter(b, den, current)
    return ElectricalSignal(np.asarray(current, dtype=np.float64), a.sample_period)


def readout_forward(
    states: StateMatrix,
    weights: ReadoutWeights | np.ndarray,
    cfg: DetectorConfig,
    rng: np.random.Generator | None = None,
) -> ElectricalSignal:
    """Detector output of the weighted optical sum ``X @ w``."""
    w = weights.values if isinstance(weights, ReadoutWeights) else np.asarray(weights, dtype=np.complex128)
    if w.shape != (states.n_channels,):
        raise ValueError(
            f"weight vector has {w.shape[0] if w.ndim == 1 else 'bad'} entries, "
            f"state matrix has {states.n_channels} channels"
        )
    summed = states.samples @ w
    return photodiode(OpticalSignal(summed, states.sample_period), cfg, rng=rng)
