"""End-to-end experiment driver for header-recognition error-rate studies.

One experiment cell = (bitrate, header, trainer, reservoir instance).
The driver generates train/test bit streams, modulates and propagates
them through a reservoir instance, trains the readout with the selected
trainer, freezes decision threshold and sampling point on the training
output, and scores the test output.  Everything is reproducible from the
configuration and its master seed.
"""

from __future__ import annotations

import csv
import json
import math
import zlib
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .cmaes import CmaConfig, DEFAULT_SIGMA_SWEEP, decode_weights, train_cmaes
from .config import ALL_3BIT_HEADERS, ExperimentConfig, config_to_dict
from .detector import ElectricalSignal, ReadoutWeights, readout_forward
from .reservoir import (
    PerturbationSpec,
    ReservoirTopology,
    StateMatrix,
    build_swirl,
    load_topology,
    perturb_phases,
    simulate,
)
from .ridge import cv_alpha, invert_target
from .signals import BitSignal, DesiredSignal, HeaderPattern, desired_signal, gen_bits, modulate
from .stateest import SimulatedReadout, train_nlinv

__all__ = [
    "ExperimentRecord",
    "SummaryRow",
    "PerturbationRow",
    "ConvergenceRow",
    "threshold_level",
    "decide_bits",
    "bit_error_rate",
    "best_sampling_point",
    "run_single",
    "run_bitrate_sweep",
    "run_all_headers",
    "run_perturbation",
    "run_convergence",
    "aggregate_records",
    "write_records_csv",
    "write_summary_csv",
    "write_summary_json",
    "derive_seed",
]

GEO_MEAN_CLAMP = 1e-4


# ---------------------------------------------------------------------------
# Decision chain


def _as_samples(y) -> np.ndarray:
    return y.samples if isinstance(y, ElectricalSignal) else np.asarray(y, dtype=np.float64)


def threshold_level(y) -> float:
    """Decision threshold in the middle of the robust signal range.

    Uses the 5th and 95th percentile so isolated noise spikes do not
    drag the threshold around.
    """
    samples = _as_samples(y)
    if samples.size == 0:
        raise ValueError("cannot compute a threshold of an empty signal")
    p5, p95 = np.percentile(samples, [5.0, 95.0])
    return float(p5 + (p95 - p5) / 2.0)


def decide_bits(y, samples_per_bit: int, offset: int, threshold: float) -> np.ndarray:
    """Subsample once per bit starting at ``offset`` and threshold."""
    samples = _as_samples(y)
    if offset < 0:
        raise ValueError("sampling offset must be non-negative")
    return (samples[offset::samples_per_bit] > threshold).astype(np.uint8)


def bit_error_rate(decided, ideal) -> float:
    """Fraction of mismatched bits between two equal-length bit streams."""
    decided = np.asarray(decided)
    ideal = np.asarray(ideal)
    if decided.shape != ideal.shape:
        raise ValueError(f"length mismatch: {decided.shape} vs {ideal.shape}")
    if decided.size == 0:
        raise ValueError("cannot compute a bit error rate over zero bits")
    return float(np.mean(decided != ideal))


def _offset_ber(samples, d_ideal, samples_per_bit, offset, threshold) -> float:
    decided = decide_bits(samples, samples_per_bit, offset, threshold)
    n = min(decided.size, len(d_ideal))
    if n == 0:
        return 1.0
    return bit_error_rate(decided[:n], np.asarray(d_ideal)[:n])


def best_sampling_point(
    y,
    d_ideal,
    samples_per_bit: int,
    search_bits: int = 2,
    threshold: float | None = None,
) -> int:
    """Offset within the first ``search_bits`` bit periods minimizing BER.

    Offsets of a whole bit period or more absorb integer-bit latency of
    the reservoir: the decided stream simply pairs with the target
    shifted by that many bits.  Ties go to the smallest offset.
    """
    samples = _as_samples(y)
    if threshold is None:
        threshold = threshold_level(samples)
    offsets = range(search_bits * samples_per_bit)
    bers = [_offset_ber(samples, d_ideal, samples_per_bit, o, threshold) for o in offsets]
    return int(np.argmin(bers))


# ---------------------------------------------------------------------------
# Reproducible seed derivation


def _seed_word(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode())
    if isinstance(part, float):
        return int(round(part * 1e9)) & 0xFFFFFFFFFFFFFFFF
    return int(part) & 0xFFFFFFFFFFFFFFFF


def derive_seed(master: int, *parts) -> int:
    """Stable per-purpose seed derived from the master seed."""
    entropy = [_seed_word(master)] + [_seed_word(p) for p in parts]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])


# ---------------------------------------------------------------------------
# Records


@dataclass(frozen=True)
class ExperimentRecord:
    bitrate_gbps: float
    header: str
    trainer: str
    instance: int
    topology_seed: int
    threshold_a: float
    sampling_offset: int
    train_ber: float
    test_ber: float
    train_ber_floor: float
    test_ber_floor: float
    presentations: int
    detail: str

    @property
    def train_report(self) -> str:
        return format_ber(self.train_ber, self.train_ber_floor)

    @property
    def test_report(self) -> str:
        return format_ber(self.test_ber, self.test_ber_floor)


@dataclass(frozen=True)
class SummaryRow:
    bitrate_gbps: float
    header: str
    trainer: str
    n_instances: int
    geo_mean_test_ber: float
    mean_test_ber: float
    min_test_ber: float
    max_test_ber: float


@dataclass(frozen=True)
class PerturbationRow:
    b_over_pi: float
    b_rad: float
    mean_ber: float
    geo_mean_ber: float
    n_evaluations: int


@dataclass(frozen=True)
class ConvergenceRow:
    iteration: int
    presentations: int
    best_sse: float
    ber: float
    best_ber: float


def format_ber(ber: float, floor: float) -> str:
    """Human-readable BER; values at or below the floor are flagged."""
    if ber < floor:
        return "<" + f"{floor:.0e}".replace("e-0", "e-")
    return f"{ber:.3g}"


# ---------------------------------------------------------------------------
# Cell preparation and training


@dataclass
class _Cell:
    """Working data of one (bitrate, instance) simulation, header-agnostic."""

    bitrate_gbps: float
    instance: int
    topology: ReservoirTopology
    topology_seed: int
    bits_train: BitSignal
    bits_test: BitSignal
    sig_train: object
    sig_test: object
    states_train: StateMatrix
    states_test: StateMatrix


def _instance_topology(cfg: ExperimentConfig, instance: int) -> tuple[ReservoirTopology, int]:
    seed = derive_seed(cfg.master_seed, "topology", instance)
    res = cfg.reservoir
    if res.topology_file:
        topo = load_topology(res.topology_file)
        if instance > 0:
            # keep the file's geometry, redraw all phases for this instance
            rng = np.random.default_rng(seed)
            edges = tuple(
                replace(e, phase=float(rng.uniform(0.0, 2.0 * np.pi))) for e in topo.edges
            )
            ports = tuple(
                replace(p, phase=float(rng.uniform(0.0, 2.0 * np.pi))) for p in topo.input_ports
            )
            topo = ReservoirTopology(topo.n_nodes, edges, ports, seed=seed)
        return topo, seed
    topo = build_swirl(
        res.rows,
        res.cols,
        delay=res.delay_s,
        loss_db_per_cm=res.loss_db_per_cm,
        group_index=res.group_index,
        seed=seed,
    )
    return topo, seed


def _prepare_cell(cfg: ExperimentConfig, bitrate_gbps: float, instance: int) -> _Cell:
    bitrate = bitrate_gbps * 1e9
    topo, topo_seed = _instance_topology(cfg, instance)
    bits_train = gen_bits(cfg.n_train_bits, derive_seed(cfg.master_seed, "train-bits"), bitrate)
    bits_test = gen_bits(cfg.n_test_bits, derive_seed(cfg.master_seed, "test-bits"), bitrate)
    p_node = cfg.p_total_w / len(topo.input_ports)
    sig_train = modulate(bits_train, cfg.samples_per_bit, p_node, cfg.smoothing)
    sig_test = modulate(bits_test, cfg.samples_per_bit, p_node, cfg.smoothing)
    states_train = simulate(topo, sig_train, cfg.bias_power_w)
    states_test = simulate(topo, sig_test, cfg.bias_power_w)
    return _Cell(
        bitrate_gbps=bitrate_gbps,
        instance=instance,
        topology=topo,
        topology_seed=topo_seed,
        bits_train=bits_train,
        bits_test=bits_test,
        sig_train=sig_train,
        sig_test=sig_test,
        states_train=states_train,
        states_test=states_test,
    )


def _trimmed(states: StateMatrix, skip_samples: int) -> StateMatrix:
    return StateMatrix(states.samples[skip_samples:], states.sample_period, states.channel_roles)


def _train(
    cfg: ExperimentConfig,
    cell: _Cell,
    header: str,
    trainer: str,
    d_train: DesiredSignal,
) -> tuple[ReadoutWeights, int, str]:
    """Run the selected trainer; returns weights, presentations used, detail."""
    spb = cfg.samples_per_bit
    warm = cfg.warmup_bits
    responsivity = cfg.detector.responsivity
    key = (cell.bitrate_gbps, header, cell.instance)

    if trainer == "ridge":
        x = _trimmed(cell.states_train, warm * spb)
        target = invert_target(np.repeat(d_train.scaled[warm:], spb), responsivity)
        alpha, weights = cv_alpha(x, target, cfg.ridge)
        # The state capture itself corresponds to one presentation of the
        # training sequence (and is only possible with full observability).
        return weights, 1, f"alpha={alpha:.6g}"

    if trainer == "cmaes":
        readout = SimulatedReadout(
            cell.states_train, cfg.detector, seed=derive_seed(cfg.master_seed, "cmaes-noise", *key)
        )
        cma = CmaConfig(
            population=cfg.cmaes.population,
            max_iterations=cfg.cmaes.max_iterations,
            target_sse=cfg.cmaes.target_sse,
            seed=derive_seed(cfg.master_seed, "cmaes", *key),
        )
        sweep = cfg.cmaes.sigma_sweep if cfg.cmaes.sigma_sweep is not None else DEFAULT_SIGMA_SWEEP
        result = train_cmaes(
            readout,
            d_train,
            cma,
            samples_per_bit=spb,
            skip_bits=warm,
            sigma_sweep=sweep,
        )
        return result.weights, result.presentations, f"sigma0={result.sigma0:g}"

    if trainer == "nlinv":
        readout = SimulatedReadout(
            cell.states_train, cfg.detector, seed=derive_seed(cfg.master_seed, "probe-noise", *key)
        )
        result = train_nlinv(
            readout,
            d_train,
            cfg.ridge,
            responsivity,
            samples_per_bit=spb,
            skip_bits=warm,
            repeats=cfg.nlinv.repeats,
        )
        return result.weights, result.presentations, f"alpha={result.alpha:.6g}"

    raise ValueError(f"unknown trainer {trainer!r}")


def _evaluate(
    cfg: ExperimentConfig,
    cell: _Cell,
    header: str,
    trainer: str,
    weights: ReadoutWeights,
    d_train: DesiredSignal,
    d_test: DesiredSignal,
) -> tuple[float, int, float, float, int, int]:
    """Freeze threshold and sampling point on train output, score test."""
    spb = cfg.samples_per_bit
    warm = cfg.warmup_bits
    key = (cell.bitrate_gbps, header, trainer, cell.instance)

    y_train = readout_forward(
        cell.states_train,
        weights,
        cfg.detector,
        rng=np.random.default_rng(derive_seed(cfg.master_seed, "eval-train", *key)),
    ).samples[warm * spb :]
    d_tr = d_train.ideal[warm:]
    threshold = threshold_level(y_train)
    offset = best_sampling_point(y_train, d_tr, spb, cfg.search_bits, threshold=threshold)
    train_ber = _offset_ber(y_train, d_tr, spb, offset, threshold)
    n_train_scored = min(decide_bits(y_train, spb, offset, threshold).size, d_tr.size)

    y_test = readout_forward(
        cell.states_test,
        weights,
        cfg.detector,
        rng=np.random.default_rng(derive_seed(cfg.master_seed, "eval-test", *key)),
    ).samples[warm * spb :]
    d_te = d_test.ideal[warm:]
    test_ber = _offset_ber(y_test, d_te, spb, offset, threshold)
    n_test_scored = min(decide_bits(y_test, spb, offset, threshold).size, d_te.size)
    return threshold, offset, train_ber, test_ber, n_train_scored, n_test_scored


def _run_trainers(cfg, cell, header, trainers) -> list[ExperimentRecord]:
    pattern = HeaderPattern.from_string(header)
    d_train = desired_signal(cell.bits_train, pattern, cfg.p_total_w)
    d_test = desired_signal(cell.bits_test, pattern, cfg.p_total_w)
    records = []
    for trainer in trainers:
        weights, presentations, detail = _train(cfg, cell, header, trainer, d_train)
        threshold, offset, train_ber, test_ber, n_tr, n_te = _evaluate(
            cfg, cell, header, trainer, weights, d_train, d_test
        )
        records.append(
            ExperimentRecord(
                bitrate_gbps=cell.bitrate_gbps,
                header=header,
                trainer=trainer,
                instance=cell.instance,
                topology_seed=cell.topology_seed,
                threshold_a=threshold,
                sampling_offset=offset,
                train_ber=train_ber,
                test_ber=test_ber,
                train_ber_floor=cfg.ber_floor_errors / max(n_tr, 1),
                test_ber_floor=cfg.ber_floor_errors / max(n_te, 1),
                presentations=presentations,
                detail=detail,
            )
        )
    return records


def run_single(
    cfg: ExperimentConfig,
    bitrate_gbps: float,
    header: str,
    trainer: str,
    instance: int = 0,
) -> ExperimentRecord:
    """Run one full experiment cell and return its record."""
    cell = _prepare_cell(cfg, bitrate_gbps, instance)
    return _run_trainers(cfg, cell, header, [trainer])[0]


# ---------------------------------------------------------------------------
# Sweeps


def run_bitrate_sweep(
    cfg: ExperimentConfig,
    out_dir: str | Path | None = None,
    verbose: bool = False,
) -> tuple[list[ExperimentRecord], list[SummaryRow]]:
    """Sweep (bitrate x header x trainer x instance) and aggregate.

    Simulations are shared across headers and trainers of one cell, so
    adding trainers is cheap compared to adding bitrates or instances.
    """
    records: list[ExperimentRecord] = []
    for bitrate in cfg.bitrates_gbps:
        for instance in range(cfg.n_reservoirs):
            cell = _prepare_cell(cfg, bitrate, instance)
            for header in cfg.headers:
                cell_records = _run_trainers(cfg, cell, header, cfg.trainers)
                records.extend(cell_records)
                if verbose:
                    for r in cell_records:
                        print(
                            f"bitrate={r.bitrate_gbps:g} Gbps header={r.header} "
                            f"trainer={r.trainer} instance={r.instance} "
                            f"test BER={r.test_report}"
                        )
    records.sort(key=lambda r: (r.bitrate_gbps, r.header, r.trainer, r.instance))
    summary = aggregate_records(records)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_records_csv(records, out / "records.csv")
        write_summary_csv(summary, out / "summary.csv")
        write_summary_json(cfg, out / "summary.json")
        _write_dat_files(summary, out)
    return records, summary


def run_all_headers(
    cfg: ExperimentConfig,
    out_dir: str | Path | None = None,
    verbose: bool = False,
) -> tuple[list[ExperimentRecord], list[SummaryRow]]:
    """Bitrate sweep over every possible 3-bit header."""
    cfg_all = replace(cfg, headers=ALL_3BIT_HEADERS)
    return run_bitrate_sweep(cfg_all, out_dir=out_dir, verbose=verbose)


def aggregate_records(records: list[ExperimentRecord]) -> list[SummaryRow]:
    """Per (bitrate, header, trainer): geometric and arithmetic mean BER.

    The geometric mean clamps each BER at 1e-4 so error-free instances do
    not zero the product; both aggregations are reported because either
    may be wanted for log-scale curves.
    """
    groups: dict[tuple, list[float]] = {}
    for r in records:
        groups.setdefault((r.bitrate_gbps, r.header, r.trainer), []).append(r.test_ber)
    rows = []
    for (bitrate, header, trainer), bers in sorted(groups.items()):
        clamped = np.maximum(np.asarray(bers), GEO_MEAN_CLAMP)
        rows.append(
            SummaryRow(
                bitrate_gbps=bitrate,
                header=header,
                trainer=trainer,
                n_instances=len(bers),
                geo_mean_test_ber=float(np.exp(np.mean(np.log(clamped)))),
                mean_test_ber=float(np.mean(bers)),
                min_test_ber=float(np.min(bers)),
                max_test_ber=float(np.max(bers)),
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Perturbation study


def run_perturbation(
    cfg: ExperimentConfig,
    b_list: list[float] | None = None,
    out_dir: str | Path | None = None,
    verbose: bool = False,
) -> list[PerturbationRow]:
    """Degradation of frozen ridge weights under random phase perturbations.

    For each nominal reservoir instance the readout is trained once; the
    trained weights, threshold, and sampling point are then reapplied to
    perturbed copies of the instance, where every waveguide phase gets an
    independent U(0, b) shift.  ``b = 0`` is the unperturbed baseline by
    construction.
    """
    if b_list is None:
        b_list = [f * math.pi for f in cfg.perturbation_b_over_pi]
    bitrate = cfg.perturbation_bitrate_gbps
    header = cfg.headers[0]
    spb = cfg.samples_per_bit
    warm = cfg.warmup_bits
    pattern = HeaderPattern.from_string(header)

    per_b: dict[int, list[float]] = {i: [] for i in range(len(b_list))}
    for instance in range(cfg.n_reservoirs):
        cell = _prepare_cell(cfg, bitrate, instance)
        d_train = desired_signal(cell.bits_train, pattern, cfg.p_total_w)
        d_test = desired_signal(cell.bits_test, pattern, cfg.p_total_w)
        weights, _, _ = _train(cfg, cell, header, "ridge", d_train)
        threshold, offset, _, baseline_ber, _, _ = _evaluate(
            cfg, cell, header, "ridge", weights, d_train, d_test
        )
        d_te = d_test.ideal[warm:]
        for b_idx, b in enumerate(b_list):
            if b == 0.0:
                per_b[b_idx].append(baseline_ber)
                continue
            for draw in range(cfg.n_perturbation_draws):
                spec = PerturbationSpec(
                    b, seed=derive_seed(cfg.master_seed, "perturb", instance, b_idx, draw)
                )
                perturbed = perturb_phases(cell.topology, spec)
                states = simulate(perturbed, cell.sig_test, cfg.bias_power_w)
                y = readout_forward(
                    states,
                    weights,
                    cfg.detector,
                    rng=np.random.default_rng(
                        derive_seed(cfg.master_seed, "perturb-eval", instance, b_idx, draw)
                    ),
                ).samples[warm * spb :]
                per_b[b_idx].append(_offset_ber(y, d_te, spb, offset, threshold))
        if verbose:
            print(f"perturbation instance {instance}: baseline test BER {baseline_ber:.3g}")

    rows = []
    for b_idx, b in enumerate(b_list):
        bers = np.asarray(per_b[b_idx])
        clamped = np.maximum(bers, GEO_MEAN_CLAMP)
        rows.append(
            PerturbationRow(
                b_over_pi=b / math.pi,
                b_rad=b,
                mean_ber=float(bers.mean()),
                geo_mean_ber=float(np.exp(np.mean(np.log(clamped)))),
                n_evaluations=int(bers.size),
            )
        )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_rows_csv(
            rows,
            out / "perturbation.csv",
            ["b_over_pi", "b_rad", "mean_ber", "geo_mean_ber", "n_evaluations"],
        )
        write_summary_json(cfg, out / "summary.json")
    return rows


# ---------------------------------------------------------------------------
# Convergence study


def run_convergence(
    cfg: ExperimentConfig,
    out_dir: str | Path | None = None,
    instance: int = 0,
    verbose: bool = False,
) -> list[ConvergenceRow]:
    """Black-box training with the error rate recorded at every iteration.

    One objective evaluation equals one presentation of the training
    sequence, so the presentation column is iterations times population.
    The ``best_ber`` column is the running minimum of the recorded BER.
    """
    bitrate = cfg.convergence_bitrate_gbps
    header = cfg.headers[0]
    spb = cfg.samples_per_bit
    warm = cfg.warmup_bits
    pattern = HeaderPattern.from_string(header)

    cell = _prepare_cell(cfg, bitrate, instance)
    d_train = desired_signal(cell.bits_train, pattern, cfg.p_total_w)
    d_tr = d_train.ideal[warm:]
    readout = SimulatedReadout(
        cell.states_train,
        cfg.detector,
        seed=derive_seed(cfg.master_seed, "conv-noise", bitrate, instance),
    )
    rows: list[ConvergenceRow] = []
    best_ber = math.inf

    def record(it) -> None:
        nonlocal best_ber
        weights = decode_weights(it.best_x)
        y = readout_forward(
            cell.states_train,
            weights,
            cfg.detector,
            rng=np.random.default_rng(
                derive_seed(cfg.master_seed, "conv-eval", bitrate, instance, it.iteration)
            ),
        ).samples[warm * spb :]
        threshold = threshold_level(y)
        offset = best_sampling_point(y, d_tr, spb, cfg.search_bits, threshold=threshold)
        ber = _offset_ber(y, d_tr, spb, offset, threshold)
        best_ber = min(best_ber, ber)
        rows.append(
            ConvergenceRow(
                iteration=it.iteration,
                presentations=it.evaluations,
                best_sse=it.best_f,
                ber=ber,
                best_ber=best_ber,
            )
        )
        if verbose and it.iteration % 25 == 0:
            print(
                f"iteration {it.iteration}: presentations={it.evaluations} "
                f"sse={it.best_f:.4g} ber={ber:.4g}"
            )

    cma = CmaConfig(
        initial_sigma=cfg.cmaes.convergence_sigma0,
        population=cfg.cmaes.population,
        max_iterations=cfg.cmaes.convergence_iterations,
        seed=derive_seed(cfg.master_seed, "conv", bitrate, instance),
    )
    train_cmaes(
        readout,
        d_train,
        cma,
        samples_per_bit=spb,
        skip_bits=warm,
        sigma_sweep=[cfg.cmaes.convergence_sigma0],
        callback=record,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_rows_csv(
            rows,
            out / "convergence.csv",
            ["iteration", "presentations", "best_sse", "ber", "best_ber"],
        )
        write_summary_json(cfg, out / "summary.json")
    return rows


# ---------------------------------------------------------------------------
# Persistence


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


RECORD_COLUMNS = [
    "bitrate_gbps",
    "header",
    "trainer",
    "instance",
    "topology_seed",
    "threshold_a",
    "sampling_offset",
    "train_ber",
    "train_ber_report",
    "test_ber",
    "test_ber_report",
    "test_ber_floor",
    "presentations",
    "detail",
]


def write_records_csv(records: list[ExperimentRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    _fmt(r.bitrate_gbps),
                    r.header,
                    r.trainer,
                    r.instance,
                    r.topology_seed,
                    _fmt(r.threshold_a),
                    r.sampling_offset,
                    _fmt(r.train_ber),
                    r.train_report,
                    _fmt(r.test_ber),
                    r.test_report,
                    _fmt(r.test_ber_floor),
                    r.presentations,
                    r.detail,
                ]
            )


def _write_rows_csv(rows, path: str | Path, columns: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(getattr(row, c)) for c in columns])


def write_summary_csv(rows: list[SummaryRow], path: str | Path) -> None:
    _write_rows_csv(
        rows,
        path,
        [
            "bitrate_gbps",
            "header",
            "trainer",
            "n_instances",
            "geo_mean_test_ber",
            "mean_test_ber",
            "min_test_ber",
            "max_test_ber",
        ],
    )


def write_summary_json(cfg: ExperimentConfig, path: str | Path) -> None:
    payload = {"package": "photonrc", "version": __version__, "config": config_to_dict(cfg)}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_dat_files(summary: list[SummaryRow], out: Path) -> None:
    """Plain-column data files for BER-vs-bitrate plotting."""
    keys = sorted({(s.header, s.trainer) for s in summary})
    for header, trainer in keys:
        rows = [s for s in summary if s.header == header and s.trainer == trainer]
        lines = ["# bitrate_gbps geo_mean_test_ber mean_test_ber"]
        for s in sorted(rows, key=lambda s: s.bitrate_gbps):
            lines.append(f"{_fmt(s.bitrate_gbps)} {_fmt(s.geo_mean_test_ber)} {_fmt(s.mean_test_ber)}")
        (out / f"ber_vs_bitrate_{header}_{trainer}.dat").write_text("\n".join(lines) + "\n")
