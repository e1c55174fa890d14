"""Experiment configuration: defaults, profiles, and YAML round-trip."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .detector import DetectorConfig
from .ridge import RidgeConfig

__all__ = [
    "ReservoirSettings",
    "CmaesSettings",
    "NlinvSettings",
    "ExperimentConfig",
    "paper_profile",
    "ci_profile",
    "profile_by_name",
    "config_from_dict",
    "config_to_dict",
    "load_config",
    "save_config",
]

TRAINERS = ("ridge", "cmaes", "nlinv")

ALL_3BIT_HEADERS = tuple(format(v, "03b") for v in range(8))


@dataclass(frozen=True)
class ReservoirSettings:
    rows: int = 4
    cols: int = 4
    delay_s: float = 62.5e-12
    loss_db_per_cm: float = 3.0
    group_index: float = 4.2
    topology_file: str | None = None


@dataclass(frozen=True)
class CmaesSettings:
    max_iterations: int = 1000
    population: int | None = None
    sigma_sweep: tuple[float, ...] | None = None  # None -> decades 1e-5..1e2
    target_sse: float | None = None
    convergence_sigma0: float = 0.1
    convergence_iterations: int = 500


@dataclass(frozen=True)
class NlinvSettings:
    repeats: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; fully determines results together with seeds."""

    bitrates_gbps: tuple[float, ...] = tuple(float(r) for r in range(1, 32))
    headers: tuple[str, ...] = ("101",)
    trainers: tuple[str, ...] = ("ridge",)
    n_train_bits: int = 10010
    n_test_bits: int = 10010
    warmup_bits: int = 10
    n_reservoirs: int = 10
    samples_per_bit: int = 24
    p_total_w: float = 0.1
    bias_power_w: float = 0.02
    smoothing: str | float | None = "auto"
    master_seed: int = 1234
    ber_floor_errors: int = 10
    search_bits: int = 2
    perturbation_bitrate_gbps: float = 5.0
    perturbation_b_over_pi: tuple[float, ...] = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
    n_perturbation_draws: int = 10
    convergence_bitrate_gbps: float = 10.0
    reservoir: ReservoirSettings = field(default_factory=ReservoirSettings)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    ridge: RidgeConfig = field(default_factory=RidgeConfig)
    cmaes: CmaesSettings = field(default_factory=CmaesSettings)
    nlinv: NlinvSettings = field(default_factory=NlinvSettings)

    def __post_init__(self) -> None:
        object.__setattr__(self, "bitrates_gbps", tuple(float(b) for b in self.bitrates_gbps))
        object.__setattr__(self, "headers", tuple(str(h) for h in self.headers))
        object.__setattr__(self, "trainers", tuple(self.trainers))
        for b in self.bitrates_gbps:
            if not b > 0:
                raise ValueError("bitrates must be positive")
        for t in self.trainers:
            if t not in TRAINERS:
                raise ValueError(f"unknown trainer {t!r}; expected one of {TRAINERS}")
        if self.warmup_bits >= min(self.n_train_bits, self.n_test_bits):
            raise ValueError("warm-up must be shorter than the bit sequences")
        if self.n_reservoirs < 1:
            raise ValueError("need at least one reservoir instance")


def paper_profile() -> ExperimentConfig:
    """Full scale: 10010 bits, 1-31 Gbps, 10 reservoir instances."""
    return ExperimentConfig()


def ci_profile() -> ExperimentConfig:
    """Desk scale: short sequences and a reduced sweep for quick runs."""
    return ExperimentConfig(
        bitrates_gbps=(5.0, 10.0, 15.0, 20.0),
        n_train_bits=2010,
        n_test_bits=2010,
        n_reservoirs=3,
        n_perturbation_draws=3,
        perturbation_b_over_pi=(0.0, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0),
        cmaes=CmaesSettings(max_iterations=300, convergence_iterations=300),
    )


_PROFILES = {"paper": paper_profile, "ci": ci_profile}


def profile_by_name(name: str) -> ExperimentConfig:
    try:
        return _PROFILES[name]()
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; expected one of {sorted(_PROFILES)}") from None


_SECTION_TYPES = {
    "reservoir": ReservoirSettings,
    "detector": DetectorConfig,
    "ridge": RidgeConfig,
    "cmaes": CmaesSettings,
    "nlinv": NlinvSettings,
}

_TUPLE_FIELDS = {
    "bitrates_gbps",
    "headers",
    "trainers",
    "perturbation_b_over_pi",
    "alpha_grid",
    "sigma_sweep",
}


def _build_section(cls, data: dict, base):
    allowed = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    fixed = {
        k: (tuple(v) if k in _TUPLE_FIELDS and v is not None else v) for k, v in data.items()
    }
    return replace(base, **fixed)


def config_from_dict(data: dict, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Overlay a (possibly partial) mapping onto a base configuration."""
    cfg = base if base is not None else ExperimentConfig()
    data = dict(data or {})
    updates = {}
    for section, cls in _SECTION_TYPES.items():
        if section in data:
            updates[section] = _build_section(cls, data.pop(section) or {}, getattr(cfg, section))
    allowed = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for k, v in data.items():
        updates[k] = tuple(v) if k in _TUPLE_FIELDS and v is not None else v
    return replace(cfg, **updates)


def _plain(value):
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: _plain(getattr(value, f.name)) for f in dataclasses.fields(value)}
    return value


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return _plain(cfg)


def load_config(path: str | Path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must hold a mapping")
    return config_from_dict(data, base=base)


def save_config(cfg: ExperimentConfig, path: str | Path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(config_to_dict(cfg), fh, sort_keys=True)
