"""Variational circuit architectures for the 8-qubit classifier.

Every architecture shares one skeleton: an RY(x_i) feature-encoding
column, n_layers blocks that each end in a full column of trainable RY
rotations (so all kinds carry n_qubits * n_layers angles), and a
terminal measurement of the readout qubits. The kinds differ only in
where CX gates go:

* BASELINE: an open chain (0,1)(1,2)..(6,7) in every layer.
* FULLY_ENTANGLED: every pair once, right after encoding; layers are
  rotation-only.
* ALTERNATING: chain layers (even l) alternate with local-pair layers
  (odd l) that entangle only inside qubit pairs (0,1)(2,3)(4,5)(6,7).
* ALTERNATING2: a local-pair column every layer, plus a bridging column
  (1,2)(3,4)(5,6) every global_period layers; the last qubit never
  receives a bridging CX.

With qubits grouped two-per-QPU, local-pair columns never leave a QPU,
which is what separates the kinds in remote-gate cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations

from .circuit import Circuit, GateKind, ParameterRef, ParamSpace


class ArchKind(Enum):
    BASELINE = "baseline"
    FULLY_ENTANGLED = "fully_entangled"
    ALTERNATING = "alternating"
    ALTERNATING2 = "alternating2"


@dataclass(frozen=True)
class Architecture:
    """One concrete architecture choice.

    global_period only affects ALTERNATING2; bridging columns go at
    layers l with l % global_period == 0.
    """

    kind: ArchKind
    n_qubits: int = 8
    n_layers: int = 10
    global_period: int = 4
    measured_qubits: tuple[int, ...] = (0, 1)

    def __post_init__(self) -> None:
        if not isinstance(self.kind, ArchKind):
            raise TypeError(f"kind must be an ArchKind, got {self.kind!r}")
        if self.n_qubits < 2:
            raise ValueError(f"n_qubits must be >= 2, got {self.n_qubits}")
        if self.n_layers < 1:
            raise ValueError(f"n_layers must be >= 1, got {self.n_layers}")
        if self.global_period < 1:
            raise ValueError(f"global_period must be >= 1, got {self.global_period}")
        mq = tuple(int(q) for q in self.measured_qubits)
        object.__setattr__(self, "measured_qubits", mq)
        if len(mq) != 2:
            raise ValueError(f"exactly two readout qubits expected, got {mq}")
        if len(set(mq)) != len(mq):
            raise ValueError(f"duplicate readout qubit in {mq}")
        if any(not 0 <= q < self.n_qubits for q in mq):
            raise ValueError(f"readout qubit out of range in {mq}")


def parameter_count(arch: Architecture) -> int:
    """Trainable angle count; identical across kinds by construction."""
    return arch.n_qubits * arch.n_layers


def _rotation_column(circ: Circuit, n: int, layer: int) -> None:
    for q in range(n):
        circ.ry(q, ParameterRef(ParamSpace.THETA, layer * n + q))


def _chain_column(circ: Circuit, n: int) -> None:
    for q in range(n - 1):
        circ.cx(q, q + 1)


def _local_column(circ: Circuit, n: int) -> None:
    for q in range(0, n - 1, 2):
        circ.cx(q, q + 1)


def _bridge_column(circ: Circuit, n: int) -> None:
    for q in range(1, n - 1, 2):
        circ.cx(q, q + 1)


def build(arch: Architecture) -> Circuit:
    """Symbolic circuit for ``arch``, terminal measurements included."""
    n = arch.n_qubits
    circ = Circuit(n, len(arch.measured_qubits))
    for q in range(n):
        circ.ry(q, ParameterRef(ParamSpace.DATA, q))
    if arch.kind is ArchKind.BASELINE:
        for layer in range(arch.n_layers):
            _chain_column(circ, n)
            _rotation_column(circ, n, layer)
    elif arch.kind is ArchKind.FULLY_ENTANGLED:
        for i, j in combinations(range(n), 2):
            circ.cx(i, j)
        for layer in range(arch.n_layers):
            _rotation_column(circ, n, layer)
    elif arch.kind is ArchKind.ALTERNATING:
        for layer in range(arch.n_layers):
            if layer % 2 == 0:
                _chain_column(circ, n)
            else:
                _local_column(circ, n)
            _rotation_column(circ, n, layer)
    elif arch.kind is ArchKind.ALTERNATING2:
        for layer in range(arch.n_layers):
            _local_column(circ, n)
            if layer % arch.global_period == 0:
                _bridge_column(circ, n)
            _rotation_column(circ, n, layer)
    else:
        raise ValueError(f"unsupported architecture kind {arch.kind!r}")
    for cb, q in enumerate(arch.measured_qubits):
        circ.measure(q, cb)
    return circ


def entangling_gate_census(arch: Architecture) -> tuple[int, int]:
    """(total CX, CX crossing a QPU pair) with qubits grouped two per QPU."""
    total = 0
    cross = 0
    for g in build(arch).gates:
        if g.kind is GateKind.CX:
            total += 1
            if g.qubits[0] // 2 != g.qubits[1] // 2:
                cross += 1
    return total, cross
