"""Monolithic-to-distributed circuit rewriting.

Logical data qubits are packed onto QPUs sequentially, each QPU holding
a contiguous physical block of data slots followed by communication
slots. Cross-QPU CX gates are replaced by an 11-gate remote-CX protocol
running over one communication qubit per endpoint QPU: prepare a Bell
pair, cascade the control onto it, measure and classically correct,
then reset both communication qubits so the next protocol instance can
reuse them. Every measurement branch applies the same effective CX, so
the rewrite is exact, not approximate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import Circuit, Gate, GateKind


@dataclass(frozen=True)
class Topology:
    """QPU grid: identical nodes, fixed per-node data/comm capacity."""

    n_qpus: int = 4
    data_per_qpu: int = 2
    comm_per_qpu: int = 2

    def __post_init__(self) -> None:
        if self.n_qpus < 1:
            raise ValueError(f"n_qpus must be >= 1, got {self.n_qpus}")
        if self.data_per_qpu < 1:
            raise ValueError(f"data_per_qpu must be >= 1, got {self.data_per_qpu}")
        if self.comm_per_qpu < 2:
            raise ValueError(
                f"comm_per_qpu must be >= 2 (remote CX uses one comm qubit "
                f"per endpoint), got {self.comm_per_qpu}"
            )

    @property
    def qubits_per_qpu(self) -> int:
        return self.data_per_qpu + self.comm_per_qpu

    @property
    def data_capacity(self) -> int:
        return self.n_qpus * self.data_per_qpu

    @property
    def n_physical(self) -> int:
        return self.n_qpus * self.qubits_per_qpu


@dataclass(frozen=True)
class AllocationMap:
    """Placement of logical data qubits onto the physical register."""

    topology: Topology
    n_logical: int
    logical_to_physical: tuple[int, ...]
    comm_qubits: tuple[tuple[int, ...], ...] = field(repr=False)

    def qpu_of_logical(self, logical: int) -> int:
        return logical // self.topology.data_per_qpu

    def qpu_of_physical(self, physical: int) -> int:
        return physical // self.topology.qubits_per_qpu

    def is_data_slot(self, physical: int) -> bool:
        return physical % self.topology.qubits_per_qpu < self.topology.data_per_qpu


def allocate(n_logical: int, topo: Topology) -> AllocationMap:
    """Sequential allocation: logical d goes to QPU d // data_per_qpu."""
    if n_logical < 1:
        raise ValueError(f"n_logical must be >= 1, got {n_logical}")
    if n_logical > topo.data_capacity:
        raise ValueError(
            f"{n_logical} logical qubits exceed capacity "
            f"{topo.data_capacity} of {topo.n_qpus} QPUs"
        )
    span = topo.qubits_per_qpu
    mapping = tuple(
        (d // topo.data_per_qpu) * span + d % topo.data_per_qpu
        for d in range(n_logical)
    )
    comms = tuple(
        tuple(k * span + topo.data_per_qpu + j for j in range(topo.comm_per_qpu))
        for k in range(topo.n_qpus)
    )
    return AllocationMap(topo, n_logical, mapping, comms)


def remote_cx_sequence(control_phys: int, target_phys: int,
                       comm_a: int, comm_b: int,
                       clbit_m1: int, clbit_m2: int) -> list[Gate]:
    """The remote-CX protocol as a flat gate list.

    comm_a sits with the control, comm_b with the target. Bell-prep,
    entangle control into the pair, measure and correct on both sides,
    then return both comm qubits to |0> for reuse.
    """
    qubits = (control_phys, target_phys, comm_a, comm_b)
    if len(set(qubits)) != 4 or any(q < 0 for q in qubits):
        raise ValueError(f"protocol qubits must be distinct and non-negative: {qubits}")
    if clbit_m1 == clbit_m2 or clbit_m1 < 0 or clbit_m2 < 0:
        raise ValueError(f"protocol clbits must be distinct: ({clbit_m1}, {clbit_m2})")
    return [
        Gate(GateKind.H, (comm_a,)),
        Gate(GateKind.CX, (comm_a, comm_b)),
        Gate(GateKind.CX, (control_phys, comm_a)),
        Gate(GateKind.MEASURE, (comm_a,), clbit=clbit_m1),
        Gate(GateKind.X, (comm_b,), condition=(clbit_m1, 1)),
        Gate(GateKind.CX, (comm_b, target_phys)),
        Gate(GateKind.H, (comm_b,)),
        Gate(GateKind.MEASURE, (comm_b,), clbit=clbit_m2),
        Gate(GateKind.Z, (control_phys,), condition=(clbit_m2, 1)),
        Gate(GateKind.RESET, (comm_a,)),
        Gate(GateKind.RESET, (comm_b,)),
    ]


def _terminal_measure_start(circuit: Circuit) -> int:
    n = len(circuit.gates)
    while n > 0 and circuit.gates[n - 1].kind is GateKind.MEASURE:
        n -= 1
    return n


def _validate_transform_input(circuit: Circuit) -> int:
    split = _terminal_measure_start(circuit)
    for i, g in enumerate(circuit.gates):
        if g.kind is GateKind.RESET:
            raise ValueError("input circuit must not contain RESET")
        if g.condition is not None:
            raise ValueError("input circuit must not contain conditioned gates")
        if g.kind is GateKind.MEASURE and i < split:
            raise ValueError("only terminal measurements are supported")
    return split


def transform(circuit: Circuit, topo: Topology = Topology()) -> Circuit:
    """Rewrite a logical circuit onto the physical register of ``topo``.

    Index-remaps everything that stays on one QPU, expands each
    cross-QPU CX into the remote-CX protocol over the first comm qubit
    of both endpoint QPUs, and appends two fresh classical bits per
    protocol instance after the circuit's own bits.
    """
    split = _validate_transform_input(circuit)
    alloc = allocate(circuit.n_qubits, topo)
    n_cross = count_remote(circuit, topo)
    out = Circuit(topo.n_physical, circuit.n_clbits + 2 * n_cross)
    phys = alloc.logical_to_physical
    next_clbit = circuit.n_clbits
    for i, g in enumerate(circuit.gates):
        if g.kind is GateKind.CX:
            qc, qt = g.qubits
            if alloc.qpu_of_logical(qc) == alloc.qpu_of_logical(qt):
                out.append(Gate(GateKind.CX, (phys[qc], phys[qt])))
            else:
                comm_a = alloc.comm_qubits[alloc.qpu_of_logical(qc)][0]
                comm_b = alloc.comm_qubits[alloc.qpu_of_logical(qt)][0]
                for pg in remote_cx_sequence(phys[qc], phys[qt], comm_a, comm_b,
                                             next_clbit, next_clbit + 1):
                    out.append(pg)
                next_clbit += 2
        elif g.kind is GateKind.MEASURE:
            out.append(Gate(GateKind.MEASURE, (phys[g.qubits[0]],), clbit=g.clbit))
        else:
            out.append(Gate(g.kind, (phys[g.qubits[0]],), angle=g.angle))
    out.declare_params(circuit.n_data_params, circuit.n_theta_params)
    return out


def count_remote(circuit: Circuit, topo: Topology = Topology()) -> int:
    """Number of CX gates that would cross QPUs under sequential allocation.

    Accepts either a logical circuit (width within data capacity) or an
    already-transformed one (width equal to the physical register). In
    the physical case only data-slot endpoints count, so protocol
    Bell-prep CXs between communication qubits are excluded.
    """
    n = circuit.n_qubits
    if n <= topo.data_capacity:
        per = topo.data_per_qpu
        return sum(
            1 for g in circuit.gates
            if g.kind is GateKind.CX and g.qubits[0] // per != g.qubits[1] // per
        )
    if n == topo.n_physical:
        alloc = allocate(topo.data_capacity, topo)
        count = 0
        for g in circuit.gates:
            if g.kind is not GateKind.CX:
                continue
            a, b = g.qubits
            if (alloc.is_data_slot(a) and alloc.is_data_slot(b)
                    and alloc.qpu_of_physical(a) != alloc.qpu_of_physical(b)):
                count += 1
        return count
    raise ValueError(
        f"circuit width {n} fits neither the data capacity "
        f"({topo.data_capacity}) nor the physical register ({topo.n_physical})"
    )
