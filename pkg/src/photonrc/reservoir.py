"""Delay-line network model of a passive photonic swirl reservoir.

The reservoir is a directed graph of nodes joined by delayed, lossy,
phase-shifted waveguides.  Nodes combine their incoming amplitudes with a
1/sqrt(k_in) factor (an injection port counts toward k_in) and split their
output onto outgoing waveguides with 1/sqrt(k_out).  That scattering rule
is energy-non-increasing for every coherent input, so the network is
passive by construction; the only nonlinearity of the whole system lives
in the detector.

The time-domain update runs on a grid fine enough that every waveguide
delay is an integer number of steps and every bit period spans at least
as many steps as the requested output resolution.  Recorded node signals
are resampled back onto the input grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .signals import OpticalSignal

__all__ = [
    "Edge",
    "InputPort",
    "ReservoirTopology",
    "PerturbationSpec",
    "StateMatrix",
    "build_swirl",
    "perturb_phases",
    "simulate",
    "save_topology",
    "load_topology",
    "default_swirl4x4",
]

SPEED_OF_LIGHT = 299792458.0  # m/s

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Edge:
    """Directed waveguide: src -> dst with delay (s), loss (dB) and phase (rad)."""

    src: int
    dst: int
    delay: float
    loss_db: float
    phase: float


@dataclass(frozen=True)
class InputPort:
    """Injection point: external input enters ``node`` with a feed phase."""

    node: int
    phase: float


@dataclass(frozen=True)
class ReservoirTopology:
    n_nodes: int
    edges: tuple[Edge, ...]
    input_ports: tuple[InputPort, ...]
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.n_nodes < 1:
            raise ValueError("topology needs at least one node")
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "input_ports", tuple(self.input_ports))
        for e in self.edges:
            if not (0 <= e.src < self.n_nodes and 0 <= e.dst < self.n_nodes):
                raise ValueError(f"edge {e.src}->{e.dst} references a missing node")
            if not e.delay > 0:
                raise ValueError("edge delays must be positive")
            if e.loss_db < 0:
                raise ValueError("edge loss must be non-negative")
            if not (0.0 <= e.phase < TWO_PI):
                raise ValueError("edge phases must lie in [0, 2*pi)")
        for p in self.input_ports:
            if not (0 <= p.node < self.n_nodes):
                raise ValueError(f"input port references missing node {p.node}")
            if not (0.0 <= p.phase < TWO_PI):
                raise ValueError("input port phases must lie in [0, 2*pi)")

    def in_degree(self) -> np.ndarray:
        deg = np.zeros(self.n_nodes, dtype=int)
        for e in self.edges:
            deg[e.dst] += 1
        return deg

    def out_degree(self) -> np.ndarray:
        deg = np.zeros(self.n_nodes, dtype=int)
        for e in self.edges:
            deg[e.src] += 1
        return deg


@dataclass(frozen=True)
class PerturbationSpec:
    """Uniform random phase perturbation U(0, b) applied per waveguide."""

    b: float
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.b < 0:
            raise ValueError("maximum phase perturbation must be non-negative")


@dataclass(frozen=True)
class StateMatrix:
    """N samples x F channels of complex node amplitudes plus optional bias.

    ``channel_roles`` names each column, e.g. ``node0`` .. ``node15`` and
    ``bias`` for the constant power line feeding the readout directly.
    """

    samples: np.ndarray
    sample_period: float
    channel_roles: tuple[str, ...]

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.ndim != 2:
            raise ValueError("state samples must be a 2-D array")
        if samples.size and not np.isfinite(samples).all():
            raise ValueError("state samples must be finite")
        if not self.sample_period > 0:
            raise ValueError("sample_period must be positive")
        roles = tuple(self.channel_roles)
        if len(roles) != samples.shape[1]:
            raise ValueError("channel_roles must name every column")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "channel_roles", roles)

    @property
    def n_samples(self) -> int:
        return int(self.samples.shape[0])

    @property
    def n_channels(self) -> int:
        return int(self.samples.shape[1])

    @property
    def bias_index(self) -> int | None:
        try:
            return self.channel_roles.index("bias")
        except ValueError:
            return None


def _swirl_edges(rows: int, cols: int) -> list[tuple[int, int]]:
    """Nearest-neighbour grid with alternating edge directions.

    Horizontal edges run left-to-right on even rows and right-to-left on
    odd rows; vertical edges run upward on even columns and downward on
    odd columns.  Node indices are ordered row by row, left to right.
    """
    idx = lambda r, c: r * cols + c
    pairs: list[tuple[int, int]] = []
    for r in range(rows):
        for c in range(cols - 1):
            if r % 2 == 0:
                pairs.append((idx(r, c), idx(r, c + 1)))
            else:
                pairs.append((idx(r, c + 1), idx(r, c)))
    for r in range(rows - 1):
        for c in range(cols):
            if c % 2 == 0:
                pairs.append((idx(r + 1, c), idx(r, c)))
            else:
                pairs.append((idx(r, c), idx(r + 1, c)))
    return pairs


def central_input_nodes(rows: int, cols: int) -> tuple[int, ...]:
    """The four central nodes of the grid (5, 6, 9, 10 on a 4x4)."""
    r0, c0 = rows // 2 - 1, cols // 2 - 1
    return tuple(
        r * cols + c for r in (r0, r0 + 1) for c in (c0, c0 + 1)
    )


def build_swirl(
    rows: int = 4,
    cols: int = 4,
    *,
    delay: float = 62.5e-12,
    loss_db_per_cm: float = 3.0,
    group_index: float = 4.2,
    seed: int | None = None,
    input_nodes: tuple[int, ...] | None = None,
) -> ReservoirTopology:
    """Construct a swirl-interconnect reservoir with random waveguide phases.

    Every waveguide gets the same nominal ``delay``; its loss follows from
    the physical length ``delay * c / group_index`` at ``loss_db_per_cm``.
    Phases are drawn independently from U(0, 2*pi), as are the feed phases
    of the injection ports.  Fabrication variation between instances is
    modelled entirely by these phases (different seeds).
    """
    if rows < 2 or cols < 2:
        raise ValueError("swirl grid needs at least 2 rows and 2 columns")
    if not delay > 0:
        raise ValueError("delay must be positive")
    if loss_db_per_cm < 0:
        raise ValueError("loss must be non-negative")
    if not group_index > 0:
        raise ValueError("group index must be positive")

    n_nodes = rows * cols
    if input_nodes is None:
        input_nodes = central_input_nodes(rows, cols)
    input_nodes = tuple(int(v) for v in input_nodes)
    bad = [v for v in input_nodes if not 0 <= v < n_nodes]
    if bad:
        raise ValueError(f"input nodes {bad} do not exist on a {rows}x{cols} grid")

    length_cm = delay * SPEED_OF_LIGHT / group_index * 100.0
    loss_db = loss_db_per_cm * length_cm

    rng = np.random.default_rng(seed)
    pairs = _swirl_edges(rows, cols)
    edge_phases = rng.uniform(0.0, TWO_PI, size=len(pairs))
    port_phases = rng.uniform(0.0, TWO_PI, size=len(input_nodes))

    edges = tuple(
        Edge(src, dst, delay, loss_db, float(ph))
        for (src, dst), ph in zip(pairs, edge_phases)
    )
    ports = tuple(InputPort(node, float(ph)) for node, ph in zip(input_nodes, port_phases))
    return ReservoirTopology(n_nodes, edges, ports, seed=seed)


def perturb_phases(topology: ReservoirTopology, spec: PerturbationSpec) -> ReservoirTopology:
    """Return a copy with every waveguide and feed phase shifted by U(0, b).

    Each phase receives an independent draw; results are wrapped back to
    [0, 2*pi).  The original topology is left untouched.
    """
    rng = np.random.default_rng(spec.seed)
    edge_shift = rng.uniform(0.0, spec.b, size=len(topology.edges)) if spec.b > 0 else np.zeros(len(topology.edges))
    port_shift = rng.uniform(0.0, spec.b, size=len(topology.input_ports)) if spec.b > 0 else np.zeros(len(topology.input_ports))
    edges = tuple(
        replace(e, phase=float((e.phase + s) % TWO_PI))
        for e, s in zip(topology.edges, edge_shift)
    )
    ports = tuple(
        replace(p, phase=float((p.phase + s) % TWO_PI))
        for p, s in zip(topology.input_ports, port_shift)
    )
    return ReservoirTopology(topology.n_nodes, edges, ports, seed=topology.seed)


def _interp_complex(t_new: np.ndarray, t_old: np.ndarray, values: np.ndarray) -> np.ndarray:
    return np.interp(t_new, t_old, values.real) + 1j * np.interp(t_new, t_old, values.imag)


def _simulation_step(topology: ReservoirTopology, input_period: float) -> tuple[float, np.ndarray]:
    """Pick the step so the shortest delay is an integer number of steps.

    The step never exceeds the input sample period, which keeps at least
    the input resolution (24 samples per bit by default) in the update
    loop across the whole bitrate sweep.  Remaining delays are rounded to
    whole steps; with the bundled single-delay topologies the rounding is
    exact.
    """
    delays = np.array([e.delay for e in topology.edges], dtype=np.float64)
    base = float(delays.min())
    k = max(1, math.ceil(base / input_period - 1e-9))
    step = base / k
    steps = np.maximum(1, np.rint(delays / step).astype(np.int64))
    return step, steps


def simulate(
    topology: ReservoirTopology,
    inputs: OpticalSignal | list[OpticalSignal] | tuple[OpticalSignal, ...],
    bias_power: float | None = None,
) -> StateMatrix:
    """Propagate injected optical inputs through the reservoir.

    ``inputs`` is one optical signal per injection port (a single signal
    is broadcast to all ports).  Each port applies its own feed phase.
    Node ``v`` records the combined amplitude

        s_v[n] = (sum of arriving edge amplitudes + injected input) / sqrt(k_in)

    where edges contribute their source output delayed, attenuated by
    10^(-loss_db/20), rotated by the waveguide phase and scaled by the
    source splitter factor 1/sqrt(k_out).  A constant channel of amplitude
    sqrt(bias_power) is appended when ``bias_power`` is given, modelling
    the bias light fed straight into the readout.
    """
    ports = topology.input_ports
    if not ports:
        raise ValueError("topology has no input ports")
    if isinstance(inputs, OpticalSignal):
        inputs = [inputs] * len(ports)
    inputs = list(inputs)
    if len(inputs) != len(ports):
        raise ValueError(f"expected {len(ports)} input signals, got {len(inputs)}")
    n_in = len(inputs[0])
    period = inputs[0].sample_period
    for sig in inputs[1:]:
        if len(sig) != n_in:
            raise ValueError("all input signals must have the same length")
        if not np.isclose(sig.sample_period, period, rtol=1e-12, atol=0.0):
            raise ValueError("all input signals must share one sample period")
    if bias_power is not None and not bias_power > 0:
        raise ValueError("bias_power must be positive when the bias line is enabled")
    if n_in == 0:
        raise ValueError("input signals are empty")

    n_nodes = topology.n_nodes
    step, delay_steps = _simulation_step(topology, period)
    same_grid = abs(step - period) <= 1e-9 * period
    if same_grid:
        n_sim = n_in
        t_sim = None
    else:
        # cover the final input sample time so the back-resampling never
        # extrapolates
        n_sim = int(math.ceil((n_in - 1) * period / step - 1e-9)) + 1
        t_sim = np.arange(n_sim) * step

    k_in = topology.in_degree().astype(np.float64)
    k_out = topology.out_degree().astype(np.float64)
    for p in ports:
        k_in[p.node] += 1.0
    combine = 1.0 / np.sqrt(np.maximum(k_in, 1.0))

    # Injection term, already divided by the combiner factor of its node.
    drive = np.zeros((n_sim, n_nodes), dtype=np.complex128)
    t_in = np.arange(n_in) * period
    for port, sig in zip(ports, inputs):
        resampled = sig.samples if same_grid else _interp_complex(t_sim, t_in, sig.samples)
        drive[:, port.node] += resampled * np.exp(1j * port.phase) * combine[port.node]

    # Edge transfer gains including splitter and combiner factors.
    gains = np.array(
        [
            10.0 ** (-e.loss_db / 20.0)
            * np.exp(1j * e.phase)
            / np.sqrt(k_out[e.src])
            * combine[e.dst]
            for e in topology.edges
        ],
        dtype=np.complex128,
    )

    out = np.zeros((n_sim, n_nodes), dtype=np.complex128)
    if delay_steps.size and np.all(delay_steps == delay_steps[0]):
        # All delays equal: the recursion couples only samples D steps
        # apart, so whole blocks of D time steps advance with one matmul.
        d = int(delay_steps[0])
        transfer = np.zeros((n_nodes, n_nodes), dtype=np.complex128)
        for e, g in zip(topology.edges, gains):
            transfer[e.dst, e.src] += g
        transfer_t = transfer.T.copy()
        out[: min(d, n_sim)] = drive[: min(d, n_sim)]
        for start in range(d, n_sim, d):
            stop = min(start + d, n_sim)
            out[start:stop] = drive[start:stop] + out[start - d : stop - d] @ transfer_t
    else:
        src = np.array([e.src for e in topology.edges])
        dst = np.array([e.dst for e in topology.edges])
        for n in range(n_sim):
            acc = drive[n].copy()
            back = n - delay_steps
            live = back >= 0
            if live.any():
                np.add.at(acc, dst[live], gains[live] * out[back[live], src[live]])
            out[n] = acc

    if not same_grid:
        resampled = np.empty((n_in, n_nodes), dtype=np.complex128)
        for ch in range(n_nodes):
            resampled[:, ch] = _interp_complex(t_in, t_sim, out[:, ch])
        out = resampled

    roles = [f"node{i}" for i in range(n_nodes)]
    if bias_power is not None:
        bias = np.full((n_in, 1), np.sqrt(bias_power), dtype=np.complex128)
        out = np.hstack([out, bias])
        roles.append("bias")
    return StateMatrix(out, period, tuple(roles))


# ---------------------------------------------------------------------------
# Topology file format: plain text, one record per line.
#   nodes <count>
#   edge <src> <dst> <delay_s> <loss_db> <phase_rad>
#   input <node> <phase_rad>


def save_topology(topology: ReservoirTopology, path: str | Path) -> None:
    lines = ["# photonic delay-line network topology", f"nodes {topology.n_nodes}"]
    for e in topology.edges:
        lines.append(f"edge {e.src} {e.dst} {e.delay!r} {e.loss_db!r} {e.phase!r}")
    for p in topology.input_ports:
        lines.append(f"input {p.node} {p.phase!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_topology(text: str, origin: str) -> ReservoirTopology:
    n_nodes = None
    edges: list[Edge] = []
    ports: list[InputPort] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kind = fields[0]
        try:
            if kind == "nodes":
                n_nodes = int(fields[1])
            elif kind == "edge":
                edges.append(
                    Edge(int(fields[1]), int(fields[2]), float(fields[3]), float(fields[4]), float(fields[5]))
                )
            elif kind == "input":
                ports.append(InputPort(int(fields[1]), float(fields[2])))
            else:
                raise ValueError(f"unknown record {kind!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"{origin}:{lineno}: bad topology record {raw!r}") from exc
    if n_nodes is None:
        raise ValueError(f"{origin}: missing 'nodes' record")
    return ReservoirTopology(n_nodes, tuple(edges), tuple(ports))


def load_topology(path: str | Path) -> ReservoirTopology:
    path = Path(path)
    return _parse_topology(path.read_text(), str(path))


def default_swirl4x4() -> ReservoirTopology:
    """The bundled 4x4 swirl instance (62.5 ps delays, 3 dB/cm loss)."""
    text = resources.files("photonrc").joinpath("data/swirl4x4.topo").read_text()
    return _parse_topology(text, "data/swirl4x4.topo")
