"""Trajectory statevector engine.

Executes bound circuits on the kernel backend. Stochastic elements
(measurement outcomes, reset outcomes, Pauli noise insertions) all draw
from one uniform stream per trajectory, indexed positionally by op slot:
op ``i`` consumes ``uniforms[i]`` or nothing. The stream for trajectory
``t`` under ``base_seed`` depends only on ``(base_seed, t)``, so results
are reproducible regardless of how trajectories are batched or
distributed over workers.

Noise model: after each executed gate a depolarizing channel may fire
with probability p. On firing, a Pauli is drawn uniformly from
{I, X, Y, Z} (single-qubit gates) or {I, X, Y, Z}^2 (after CX), which
realizes rho -> (1-p) rho + p I/2^k on the touched qubits. Firings are
counted whether or not the drawn Pauli is the identity. Measurement and
reset are noiseless.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .circuit import Circuit, Gate, GateKind, ParamSpace

_KIND_CODE = {
    GateKind.H: 0,
    GateKind.X: 1,
    GateKind.Z: 2,
    GateKind.RY: 3,
    GateKind.CX: 4,
    GateKind.MEASURE: 5,
    GateKind.RESET: 6,
}

_NORM_TOL = 1e-6


class SimulationError(Exception):
    """Raised for invalid simulator input or a numerically broken state."""


@dataclass(frozen=True)
class NoiseConfig:
    """Depolarizing-noise settings for one run.

    p is the per-gate firing probability; the two flags gate the channel
    on single-qubit gates and on CX independently.
    """

    p: float
    on_single: bool = True
    on_two: bool = True

    def __post_init__(self) -> None:
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"noise probability must be in [0, 1], got {self.p}")


@dataclass(frozen=True)
class ShotResult:
    """Final state and classical register of a single trajectory."""

    state: np.ndarray
    clbits: tuple[int, ...]
    noise_events: int


@dataclass(frozen=True)
class SampleResult:
    """Classical outcomes of many trajectories of one circuit.

    outcomes has shape (shots, n_clbits); noise_events is summed over
    all trajectories.
    """

    outcomes: np.ndarray
    noise_events: int

    @property
    def shots(self) -> int:
        return self.outcomes.shape[0]

    def counts(self) -> dict[str, int]:
        """Histogram keyed by bitstring, clbit 0 leftmost."""
        out: dict[str, int] = {}
        for row in self.outcomes:
            key = "".join("1" if b else "0" for b in row)
            out[key] = out.get(key, 0) + 1
        return out

    def z_expectations(self) -> np.ndarray:
        """Per-clbit estimate (N0 - N1) / shots."""
        if self.shots == 0:
            raise SimulationError("no trajectories to estimate from")
        return 1.0 - 2.0 * self.outcomes.mean(axis=0)


def derive_seed(*parts: int) -> int:
    """Mix integer parts into a uint64 stream seed.

    Used to give every (row, iteration, trajectory-group) its own
    independent base seed without coordinating counters.
    """
    for p in parts:
        if not isinstance(p, (int, np.integer)) or p < 0:
            raise ValueError(f"seed parts must be non-negative ints, got {p!r}")
    seq = np.random.SeedSequence([int(p) for p in parts])
    return int(seq.generate_state(1, np.uint64)[0])


def trajectory_uniforms(base_seed: int, trajectory: int, n: int) -> np.ndarray:
    """Uniform stream for one trajectory, one entry per op slot."""
    if base_seed < 0 or trajectory < 0:
        raise ValueError("base_seed and trajectory must be non-negative")
    key = (int(base_seed) << 64) | int(trajectory)
    rng = np.random.Generator(np.random.Philox(key=key))
    return rng.random(n)


class CompiledCircuit:
    """Flat-array form of a circuit, ready for the kernel.

    Symbolic RY angles stay symbolic here; ``bind_tables`` produces the
    cos/sin half-angle tables for a concrete (x, theta) without
    rebuilding the structure, which is the hot path during training.
    """

    __slots__ = (
        "n_qubits", "n_clbits", "n_ops", "n_data_params", "n_theta_params",
        "kinds", "qa", "qb", "cbit", "cond_bit", "cond_val",
        "_angles", "_data_slots", "_data_idx", "_theta_slots", "_theta_idx",
        "_measure_slots", "_forced_none", "_zero_uniforms", "_literal_tables",
        "_has_stochastic",
    )

    @classmethod
    def from_circuit(cls, circuit: Circuit) -> "CompiledCircuit":
        self = cls.__new__(cls)
        n_ops = len(circuit.gates)
        self.n_qubits = circuit.n_qubits
        self.n_clbits = circuit.n_clbits
        self.n_ops = n_ops
        self.n_data_params = circuit.n_data_params
        self.n_theta_params = circuit.n_theta_params
        self.kinds = np.empty(n_ops, dtype=np.int8)
        self.qa = np.zeros(n_ops, dtype=np.int32)
        self.qb = np.zeros(n_ops, dtype=np.int32)
        self.cbit = np.zeros(n_ops, dtype=np.int32)
        self.cond_bit = np.full(n_ops, -1, dtype=np.int32)
        self.cond_val = np.zeros(n_ops, dtype=np.int8)
        self._angles = np.zeros(n_ops, dtype=np.float64)
        data_slots: list[int] = []
        data_idx: list[int] = []
        theta_slots: list[int] = []
        theta_idx: list[int] = []
        measure_slots: list[int] = []
        has_stochastic = False
        for i, g in enumerate(circuit.gates):
            self.kinds[i] = _KIND_CODE[g.kind]
            self.qa[i] = g.qubits[0]
            if g.kind is GateKind.CX:
                self.qb[i] = g.qubits[1]
            if g.kind is GateKind.MEASURE:
                self.cbit[i] = g.clbit
                measure_slots.append(i)
                has_stochastic = True
            if g.kind is GateKind.RESET:
                has_stochastic = True
            if g.condition is not None:
                self.cond_bit[i] = g.condition[0]
                self.cond_val[i] = g.condition[1]
            if g.kind is GateKind.RY:
                if g.is_symbolic:
                    if g.angle.space is ParamSpace.DATA:
                        data_slots.append(i)
                        data_idx.append(g.angle.index)
                    else:
                        theta_slots.append(i)
                        theta_idx.append(g.angle.index)
                else:
                    self._angles[i] = g.angle
        self._data_slots = np.asarray(data_slots, dtype=np.intp)
        self._data_idx = np.asarray(data_idx, dtype=np.intp)
        self._theta_slots = np.asarray(theta_slots, dtype=np.intp)
        self._theta_idx = np.asarray(theta_idx, dtype=np.intp)
        self._measure_slots = np.asarray(measure_slots, dtype=np.intp)
        self._forced_none = np.full(n_ops, -1, dtype=np.int8)
        self._zero_uniforms = np.zeros(n_ops, dtype=np.float64)
        self._has_stochastic = has_stochastic
        if self._data_slots.size == 0 and self._theta_slots.size == 0:
            half = 0.5 * self._angles
            self._literal_tables = (np.cos(half), np.sin(half))
        else:
            self._literal_tables = None
        return self

    @property
    def n_measures(self) -> int:
        return self._measure_slots.size

    def bind_tables(self, x=None, theta=None) -> tuple[np.ndarray, np.ndarray]:
        """Cos/sin half-angle tables for the given parameter vectors."""
        if self._literal_tables is not None:
            return self._literal_tables
        ang = self._angles.copy()
        if self._data_slots.size:
            if x is None:
                raise SimulationError("circuit references data parameters, x required")
            x = np.asarray(x, dtype=np.float64)
            if x.ndim != 1 or x.size < self.n_data_params:
                raise SimulationError(
                    f"x must hold {self.n_data_params} values, got shape {x.shape}"
                )
            ang[self._data_slots] = x[self._data_idx]
        if self._theta_slots.size:
            if theta is None:
                raise SimulationError("circuit references theta parameters, theta required")
            theta = np.asarray(theta, dtype=np.float64)
            if theta.ndim != 1 or theta.size < self.n_theta_params:
                raise SimulationError(
                    f"theta must hold {self.n_theta_params} values, got shape {theta.shape}"
                )
            ang[self._theta_slots] = theta[self._theta_idx]
        half = 0.5 * ang
        return np.cos(half), np.sin(half)

    def _forced_array(self, forced_outcomes) -> np.ndarray:
        if forced_outcomes is None:
            return self._forced_none
        forced_outcomes = list(forced_outcomes)
        if len(forced_outcomes) != self.n_measures:
            raise SimulationError(
                f"forced_outcomes must give one bit per measurement "
                f"({self.n_measures}), got {len(forced_outcomes)}"
            )
        if any(v not in (0, 1) for v in forced_outcomes):
            raise SimulationError("forced outcomes must be 0 or 1")
        forced = self._forced_none.copy()
        forced[self._measure_slots] = forced_outcomes
        return forced

    def _initial_buffer(self, initial_state) -> np.ndarray:
        n_amps = 1 << self.n_qubits
        if initial_state is None:
            buf = np.zeros(2 * n_amps, dtype=np.float64)
            buf[0] = 1.0
            return buf
        arr = np.ascontiguousarray(initial_state, dtype=np.complex128)
        if arr.shape != (n_amps,):
            raise SimulationError(
                f"initial_state must have {n_amps} amplitudes, got shape {arr.shape}"
            )
        buf = arr.view(np.float64).copy()
        norm = float(buf @ buf)
        if abs(norm - 1.0) > _NORM_TOL:
            raise SimulationError(f"initial_state is not normalized (|psi|^2 = {norm})")
        return buf

    def run(self, c_half=None, s_half=None, *, noise: NoiseConfig | None = None,
            base_seed: int = 0, trajectory: int = 0,
            forced_outcomes=None, initial_state=None,
            uniforms=None) -> ShotResult:
        """Execute one trajectory and return its final state and clbits."""
        if c_half is None:
            if self._literal_tables is None:
                raise SimulationError("circuit has unbound parameters; bind first")
            c_half, s_half = self._literal_tables
        noise_p = 0.0
        on1 = on2 = False
        if noise is not None and noise.p > 0.0:
            noise_p = noise.p
            on1 = noise.on_single
            on2 = noise.on_two
        if uniforms is None:
            if self._has_stochastic or on1 or on2:
                uniforms = trajectory_uniforms(base_seed, trajectory, self.n_ops)
            else:
                uniforms = self._zero_uniforms
        forced = self._forced_array(forced_outcomes)
        buf = self._initial_buffer(initial_state)
        clbits = np.zeros(self.n_clbits, dtype=np.int8)
        status = backend.run_ops(
            self.kinds, self.qa, self.qb, self.cbit, self.cond_bit, self.cond_val,
            forced, c_half, s_half, buf, clbits, uniforms,
            noise_p, on1, on2, self.n_qubits,
        )
        if status == -1:
            raise SimulationError("forced measurement branch has probability ~0")
        if status < 0:
            raise SimulationError(f"kernel rejected the op table (status {status})")
        norm = float(buf @ buf)
        if abs(norm - 1.0) > _NORM_TOL:
            raise SimulationError(f"state norm drifted to {norm}")
        return ShotResult(
            state=buf.view(np.complex128),
            clbits=tuple(int(b) for b in clbits),
            noise_events=int(status),
        )


def run_once(circuit: Circuit, noise: NoiseConfig | None = None, seed: int = 0, *,
             forced_outcomes=None, initial_state=None) -> ShotResult:
    """Run a single trajectory of a fully bound circuit.

    Equivalent to trajectory 0 of ``sample`` with base_seed = seed.
    forced_outcomes, when given, pins every measurement outcome in
    program order (resets are never forced); initial_state overrides the
    default all-zeros start.
    """
    if not circuit.is_bound:
        raise SimulationError("circuit has unbound parameters; bind first")
    comp = CompiledCircuit.from_circuit(circuit)
    return comp.run(noise=noise, base_seed=seed, trajectory=0,
                    forced_outcomes=forced_outcomes, initial_state=initial_state)


def sample_compiled(comp: CompiledCircuit, c_half: np.ndarray, s_half: np.ndarray,
                    shots: int, noise: NoiseConfig | None = None,
                    base_seed: int = 0) -> SampleResult:
    """Many-trajectory run of an already-compiled, already-bound circuit.

    Trajectory t draws its uniforms from (base_seed, t) only, so the
    result is identical however the shot loop is split up.
    """
    if shots < 1:
        raise SimulationError(f"shots must be >= 1, got {shots}")
    noise_p = 0.0
    on1 = on2 = False
    if noise is not None and noise.p > 0.0:
        noise_p = noise.p
        on1 = noise.on_single
        on2 = noise.on_two
    buf = np.empty(2 << comp.n_qubits, dtype=np.float64)
    clbits = np.zeros(comp.n_clbits, dtype=np.int8)
    outcomes = np.empty((shots, comp.n_clbits), dtype=np.int8)
    forced = comp._forced_none
    total_events = 0
    need_uniforms = comp._has_stochastic or on1 or on2
    uniforms = comp._zero_uniforms
    for t in range(shots):
        buf.fill(0.0)
        buf[0] = 1.0
        clbits.fill(0)
        if need_uniforms:
            uniforms = trajectory_uniforms(base_seed, t, comp.n_ops)
        status = backend.run_ops(
            comp.kinds, comp.qa, comp.qb, comp.cbit, comp.cond_bit, comp.cond_val,
            forced, c_half, s_half, buf, clbits, uniforms,
            noise_p, on1, on2, comp.n_qubits,
        )
        if status < 0:
            raise SimulationError(f"kernel rejected the op table (status {status})")
        total_events += status
        outcomes[t] = clbits
    return SampleResult(outcomes=outcomes, noise_events=total_events)


def sample(circuit: Circuit, shots: int, noise: NoiseConfig | None = None,
           base_seed: int = 0) -> SampleResult:
    """Run many independent trajectories, recording final clbits of each."""
    if not circuit.is_bound:
        raise SimulationError("circuit has unbound parameters; bind first")
    comp = CompiledCircuit.from_circuit(circuit)
    c_half, s_half = comp.bind_tables()
    return sample_compiled(comp, c_half, s_half, shots, noise, base_seed)


def state_z_expectations(state: np.ndarray, qubits=None) -> np.ndarray:
    """<Z_q> for each requested qubit of a statevector."""
    state = np.asarray(state)
    n_amps = state.size
    n = n_amps.bit_length() - 1
    if 1 << n != n_amps:
        raise SimulationError(f"state length {n_amps} is not a power of two")
    probs = (state.real * state.real + state.imag * state.imag).reshape((2,) * n)
    qubits = list(range(n)) if qubits is None else list(qubits)
    out = np.empty(len(qubits))
    for j, q in enumerate(qubits):
        if not 0 <= q < n:
            raise SimulationError(f"qubit {q} out of range for {n} qubits")
        p1 = float(probs.take(1, axis=n - 1 - q).sum())
        out[j] = 1.0 - 2.0 * p1
    return out


def exact_expectations_z(circuit: Circuit, qubits=None) -> np.ndarray:
    """Exact <Z> values from noiseless deterministic evolution.

    The circuit must be free of measurements and resets; conditionals
    are fine (classical bits stay 0 without measurements).
    """
    for g in circuit.gates:
        if g.kind in (GateKind.MEASURE, GateKind.RESET):
            raise SimulationError(
                "exact expectations need a measurement-free circuit; "
                "strip terminal measurements first"
            )
    result = run_once(circuit)
    return state_z_expectations(result.state, qubits)
