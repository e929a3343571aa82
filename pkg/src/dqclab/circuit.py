"""Gate-level intermediate representation for parameterized circuits.

The gate set is the minimal closure needed by the ansatz builders, the
distributed-circuit rewriter and the simulator: H, X, Z, RY, CX, MEASURE,
RESET, plus classically-conditioned X/Z. RY angles are either literal
radians or references into one of two flat parameter spaces (data features
vs trainable angles); ``bind`` substitutes both spaces at once and is
structure-preserving.

Circuits serialize to a one-gate-per-line text format (see ``dump_text``)
that round-trips through ``parse_text``; literal angles are printed with
six decimal places, so the round-trip is exact for angles carrying at most
six decimals.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence


class GateKind(Enum):
    H = "H"
    X = "X"
    Z = "Z"
    RY = "RY"
    CX = "CX"
    MEASURE = "MEASURE"
    RESET = "RESET"


class ParamSpace(Enum):
    DATA = "x"
    THETA = "t"


@dataclass(frozen=True)
class ParameterRef:
    """Index into one of the two flat parameter spaces."""

    space: ParamSpace
    index: int

    def __post_init__(self) -> None:
        if not isinstance(self.space, ParamSpace):
            raise TypeError(f"space must be a ParamSpace, got {self.space!r}")
        if self.index < 0:
            raise ValueError(f"parameter index must be non-negative, got {self.index}")

    def __str__(self) -> str:
        return f"{self.space.value}[{self.index}]"


Angle = "float | ParameterRef"

_CONDITIONABLE = (GateKind.X, GateKind.Z)
_SINGLE_QUBIT = (GateKind.H, GateKind.X, GateKind.Z, GateKind.RY, GateKind.MEASURE, GateKind.RESET)


@dataclass(frozen=True)
class Gate:
    """One circuit element.

    ``qubits`` is (control, target) for CX and a single index otherwise.
    ``angle`` is present iff kind is RY; ``clbit`` iff kind is MEASURE;
    ``condition`` is an optional (classical bit, required value) pair and
    is allowed only on X and Z.
    """

    kind: GateKind
    qubits: tuple[int, ...]
    angle: float | ParameterRef | None = None
    clbit: int | None = None
    condition: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.kind, GateKind):
            raise TypeError(f"kind must be a GateKind, got {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        n_expected = 2 if self.kind is GateKind.CX else 1
        if len(self.qubits) != n_expected:
            raise ValueError(f"{self.kind.value} takes {n_expected} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubit in {self.kind.value} gate: {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"negative qubit index in {self.qubits}")
        if (self.angle is not None) != (self.kind is GateKind.RY):
            raise ValueError(f"angle present iff kind is RY (kind={self.kind.value})")
        if self.angle is not None and not isinstance(self.angle, ParameterRef):
            object.__setattr__(self, "angle", float(self.angle))
        if (self.clbit is not None) != (self.kind is GateKind.MEASURE):
            raise ValueError(f"clbit present iff kind is MEASURE (kind={self.kind.value})")
        if self.clbit is not None and self.clbit < 0:
            raise ValueError(f"negative classical bit {self.clbit}")
        if self.condition is not None:
            if self.kind not in _CONDITIONABLE:
                raise ValueError(f"condition only allowed on X/Z, not {self.kind.value}")
            bit, val = self.condition
            if val not in (0, 1):
                raise ValueError(f"condition value must be 0 or 1, got {val}")
            if bit < 0:
                raise ValueError(f"negative condition bit {bit}")
            object.__setattr__(self, "condition", (int(bit), int(val)))

    @property
    def is_symbolic(self) -> bool:
        return isinstance(self.angle, ParameterRef)


class Circuit:
    """Ordered gate list over ``n_qubits`` qubits and ``n_clbits`` classical bits.

    Append order is execution order. The two parameter-space sizes grow
    automatically as referencing gates are appended; ``declare_params`` can
    widen them explicitly (parsing and the rewriter use this to preserve
    declared widths that exceed the largest referenced index).
    """

    def __init__(self, n_qubits: int, n_clbits: int = 0):
        if n_qubits < 1:
            raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
        if n_clbits < 0:
            raise ValueError(f"n_clbits must be >= 0, got {n_clbits}")
        self.n_qubits = int(n_qubits)
        self.n_clbits = int(n_clbits)
        self.gates: list[Gate] = []
        self.n_data_params = 0
        self.n_theta_params = 0

    # -- construction -----------------------------------------------------

    def append(self, gate: Gate) -> "Circuit":
        """Append one gate, validating indices against the circuit widths."""
        for q in gate.qubits:
            if q >= self.n_qubits:
                raise ValueError(f"qubit {q} out of range for width {self.n_qubits}")
        if gate.clbit is not None and gate.clbit >= self.n_clbits:
            raise ValueError(f"clbit {gate.clbit} out of range for {self.n_clbits} classical bits")
        if gate.condition is not None and gate.condition[0] >= self.n_clbits:
            raise ValueError(f"condition bit {gate.condition[0]} out of range")
        if isinstance(gate.angle, ParameterRef):
            if gate.angle.space is ParamSpace.DATA:
                self.n_data_params = max(self.n_data_params, gate.angle.index + 1)
            else:
                self.n_theta_params = max(self.n_theta_params, gate.angle.index + 1)
        self.gates.append(gate)
        return self

    def h(self, q: int) -> "Circuit":
        return self.append(Gate(GateKind.H, (q,)))

    def x(self, q: int, condition: tuple[int, int] | None = None) -> "Circuit":
        return self.append(Gate(GateKind.X, (q,), condition=condition))

    def z(self, q: int, condition: tuple[int, int] | None = None) -> "Circuit":
        return self.append(Gate(GateKind.Z, (q,), condition=condition))

    def ry(self, q: int, angle: float | ParameterRef) -> "Circuit":
        return self.append(Gate(GateKind.RY, (q,), angle=angle))

    def cx(self, control: int, target: int) -> "Circuit":
        return self.append(Gate(GateKind.CX, (control, target)))

    def measure(self, q: int, clbit: int) -> "Circuit":
        return self.append(Gate(GateKind.MEASURE, (q,), clbit=clbit))

    def reset(self, q: int) -> "Circuit":
        return self.append(Gate(GateKind.RESET, (q,)))

    def declare_params(self, n_data: int, n_theta: int) -> None:
        """Widen the declared parameter-space sizes (never shrinks)."""
        if n_data < self.n_data_params or n_theta < self.n_theta_params:
            raise ValueError(
                f"declared sizes ({n_data}, {n_theta}) smaller than referenced "
                f"({self.n_data_params}, {self.n_theta_params})"
            )
        self.n_data_params = int(n_data)
        self.n_theta_params = int(n_theta)

    # -- queries ----------------------------------------------------------

    @property
    def is_bound(self) -> bool:
        return not any(g.is_symbolic for g in self.gates)

    def bind(self, x: Sequence[float], theta: Sequence[float]) -> "Circuit":
        """Substitute both parameter spaces, returning a literal-angle copy.

        Structure-preserving: gate count, kinds and qubit tuples are
        unchanged.
        """
        if len(x) != self.n_data_params:
            raise ValueError(f"expected {self.n_data_params} data values, got {len(x)}")
        if len(theta) != self.n_theta_params:
            raise ValueError(f"expected {self.n_theta_params} theta values, got {len(theta)}")
        out = Circuit(self.n_qubits, self.n_clbits)
        for g in self.gates:
            if isinstance(g.angle, ParameterRef):
                vec = x if g.angle.space is ParamSpace.DATA else theta
                g = Gate(g.kind, g.qubits, angle=float(vec[g.angle.index]),
                         clbit=g.clbit, condition=g.condition)
            out.append(g)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return (
            self.n_qubits == other.n_qubits
            and self.n_clbits == other.n_clbits
            and self.n_data_params == other.n_data_params
            and self.n_theta_params == other.n_theta_params
            and self.gates == other.gates
        )

    def __len__(self) -> int:
        return len(self.gates)

    def __repr__(self) -> str:
        return (f"Circuit(n_qubits={self.n_qubits}, n_clbits={self.n_clbits}, "
                f"gates={len(self.gates)})")


def strip_terminal_measurements(circuit: Circuit) -> Circuit:
    """Copy of ``circuit`` without its trailing run of MEASURE gates."""
    n = len(circuit.gates)
    while n > 0 and circuit.gates[n - 1].kind is GateKind.MEASURE:
        n -= 1
    out = Circuit(circuit.n_qubits, circuit.n_clbits)
    for g in circuit.gates[:n]:
        out.append(g)
    out.declare_params(circuit.n_data_params, circuit.n_theta_params)
    return out


def compact_qubits(circuit: Circuit) -> tuple[Circuit, tuple[int, ...]]:
    """Drop wires no gate touches, relabeling the rest onto 0..k-1.

    An idle wire stays in |0> for the whole execution, so removing it
    changes no amplitude on the remaining wires and no classical
    outcome; it only halves the simulated state per wire dropped.
    Returns the compact circuit and the kept original indices in order
    (``kept[new] == old``).
    """
    used = sorted({q for g in circuit.gates for q in g.qubits})
    if not used:
        used = [0]
    mapping = {q: i for i, q in enumerate(used)}
    out = Circuit(len(used), circuit.n_clbits)
    for g in circuit.gates:
        out.append(Gate(g.kind, tuple(mapping[q] for q in g.qubits),
                        angle=g.angle, clbit=g.clbit, condition=g.condition))
    out.declare_params(circuit.n_data_params, circuit.n_theta_params)
    return out, tuple(used)


# -- text format ----------------------------------------------------------

_HEADER_RE = re.compile(
    r"# circuit qubits=(\d+) clbits=(\d+) data=(\d+) theta=(\d+)\s*$"
)
_REF_RE = re.compile(r"([xt])\[(\d+)\]$")


def _angle_str(angle: float | ParameterRef) -> str:
    if isinstance(angle, ParameterRef):
        return str(angle)
    return f"{angle:.6f}"


def dump_text(circuit: Circuit) -> str:
    """Serialize to the one-gate-per-line text format (LF line endings).

    Examples: ``H 0``, ``CX 1 2``, ``RY 0 0.700000``, ``RY 3 t[17]``,
    ``MEASURE 2 -> c0``, ``X 4 if c0==1``, ``RESET 2``. A leading comment
    line records the widths so parsing restores them exactly.
    """
    lines = [
        f"# circuit qubits={circuit.n_qubits} clbits={circuit.n_clbits} "
        f"data={circuit.n_data_params} theta={circuit.n_theta_params}"
    ]
    for g in circuit.gates:
        if g.kind is GateKind.CX:
            lines.append(f"CX {g.qubits[0]} {g.qubits[1]}")
        elif g.kind is GateKind.RY:
            lines.append(f"RY {g.qubits[0]} {_angle_str(g.angle)}")
        elif g.kind is GateKind.MEASURE:
            lines.append(f"MEASURE {g.qubits[0]} -> c{g.clbit}")
        else:
            line = f"{g.kind.value} {g.qubits[0]}"
            if g.condition is not None:
                line += f" if c{g.condition[0]}=={g.condition[1]}"
            lines.append(line)
    return "\n".join(lines) + "\n"


def _parse_angle(token: str) -> float | ParameterRef:
    m = _REF_RE.match(token)
    if m:
        space = ParamSpace.DATA if m.group(1) == "x" else ParamSpace.THETA
        return ParameterRef(space, int(m.group(2)))
    return float(token)


def parse_text(text: str) -> Circuit:
    """Inverse of ``dump_text``."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty circuit text")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise ValueError(f"missing or malformed header line: {lines[0]!r}")
    n_qubits, n_clbits, n_data, n_theta = (int(g) for g in m.groups())
    circ = Circuit(n_qubits, n_clbits)
    for ln in lines[1:]:
        parts = ln.split()
        kind = parts[0]
        if kind == "CX":
            circ.cx(int(parts[1]), int(parts[2]))
        elif kind == "RY":
            circ.ry(int(parts[1]), _parse_angle(parts[2]))
        elif kind == "MEASURE":
            if len(parts) != 4 or parts[2] != "->" or not parts[3].startswith("c"):
                raise ValueError(f"malformed MEASURE line: {ln!r}")
            circ.measure(int(parts[1]), int(parts[3][1:]))
        elif kind in ("H", "X", "Z", "RESET"):
            condition = None
            if len(parts) == 4 and parts[2] == "if":
                bit_s, val_s = parts[3].split("==")
                condition = (int(bit_s.lstrip("c")), int(val_s))
            elif len(parts) != 2:
                raise ValueError(f"malformed line: {ln!r}")
            g = Gate(GateKind[kind], (int(parts[1]),), condition=condition)
            circ.append(g)
        else:
            raise ValueError(f"unknown gate {kind!r} in line {ln!r}")
    circ.declare_params(n_data, n_theta)
    return circ
