"""Circuit IR: gate validation, binding, serialization round-trips."""

import numpy as np
import pytest

from dqclab.circuit import (
    Circuit,
    Gate,
    GateKind,
    ParameterRef,
    ParamSpace,
    compact_qubits,
    dump_text,
    parse_text,
    strip_terminal_measurements,
)


class TestGateValidation:
    def test_ry_requires_angle(self):
        with pytest.raises(ValueError):
            Gate(GateKind.RY, (0,))

    def test_non_ry_rejects_angle(self):
        with pytest.raises(ValueError):
            Gate(GateKind.H, (0,), angle=0.5)

    def test_measure_requires_clbit(self):
        with pytest.raises(ValueError):
            Gate(GateKind.MEASURE, (0,))

    def test_non_measure_rejects_clbit(self):
        with pytest.raises(ValueError):
            Gate(GateKind.X, (0,), clbit=0)

    def test_cx_needs_two_distinct_qubits(self):
        with pytest.raises(ValueError):
            Gate(GateKind.CX, (1,))
        with pytest.raises(ValueError):
            Gate(GateKind.CX, (2, 2))

    def test_single_qubit_kinds_take_one_qubit(self):
        with pytest.raises(ValueError):
            Gate(GateKind.H, (0, 1))

    def test_negative_qubit_rejected(self):
        with pytest.raises(ValueError):
            Gate(GateKind.Z, (-1,))

    def test_condition_only_on_x_and_z(self):
        Gate(GateKind.X, (0,), condition=(0, 1))
        Gate(GateKind.Z, (0,), condition=(2, 0))
        with pytest.raises(ValueError):
            Gate(GateKind.H, (0,), condition=(0, 1))
        with pytest.raises(ValueError):
            Gate(GateKind.RY, (0,), angle=0.1, condition=(0, 1))

    def test_condition_value_binary(self):
        with pytest.raises(ValueError):
            Gate(GateKind.X, (0,), condition=(0, 2))

    def test_parameter_ref_validation(self):
        with pytest.raises(ValueError):
            ParameterRef(ParamSpace.DATA, -1)
        assert str(ParameterRef(ParamSpace.DATA, 3)) == "x[3]"
        assert str(ParameterRef(ParamSpace.THETA, 17)) == "t[17]"


class TestCircuitConstruction:
    def test_width_validation(self):
        with pytest.raises(ValueError):
            Circuit(0)
        with pytest.raises(ValueError):
            Circuit(2, -1)

    def test_qubit_bounds_checked_on_append(self):
        c = Circuit(2, 1)
        with pytest.raises(ValueError):
            c.h(2)
        with pytest.raises(ValueError):
            c.cx(0, 5)

    def test_clbit_bounds_checked_on_append(self):
        c = Circuit(2, 1)
        with pytest.raises(ValueError):
            c.measure(0, 1)
        with pytest.raises(ValueError):
            c.x(0, condition=(1, 1))

    def test_builders_chain(self):
        c = Circuit(3, 2).h(0).cx(0, 1).ry(2, 0.5).measure(0, 0).reset(1)
        assert len(c) == 5
        assert [g.kind for g in c.gates] == [
            GateKind.H, GateKind.CX, GateKind.RY, GateKind.MEASURE, GateKind.RESET,
        ]

    def test_param_spaces_grow_with_references(self):
        c = Circuit(2)
        c.ry(0, ParameterRef(ParamSpace.DATA, 3))
        c.ry(1, ParameterRef(ParamSpace.THETA, 7))
        assert c.n_data_params == 4
        assert c.n_theta_params == 8

    def test_declare_params_widens_only(self):
        c = Circuit(1)
        c.ry(0, ParameterRef(ParamSpace.THETA, 4))
        c.declare_params(2, 10)
        assert (c.n_data_params, c.n_theta_params) == (2, 10)
        with pytest.raises(ValueError):
            c.declare_params(0, 3)


class TestBind:
    def test_bind_substitutes_both_spaces(self):
        c = Circuit(2)
        c.ry(0, ParameterRef(ParamSpace.DATA, 0))
        c.ry(1, ParameterRef(ParamSpace.THETA, 1))
        c.ry(0, 0.25)
        c.declare_params(1, 2)
        b = c.bind([1.5], [2.5, 3.5])
        assert b.is_bound
        assert [g.angle for g in b.gates] == [1.5, 3.5, 0.25]

    def test_bind_preserves_structure(self):
        c = Circuit(3, 2).h(0).cx(1, 2)
        c.ry(0, ParameterRef(ParamSpace.THETA, 0))
        c.measure(2, 1).x(0, condition=(1, 1))
        b = c.bind([], [0.7])
        assert len(b) == len(c)
        assert [g.kind for g in b.gates] == [g.kind for g in c.gates]
        assert [g.qubits for g in b.gates] == [g.qubits for g in c.gates]
        assert b.gates[3].clbit == 1
        assert b.gates[4].condition == (1, 1)

    def test_bind_checks_lengths(self):
        c = Circuit(1)
        c.ry(0, ParameterRef(ParamSpace.THETA, 2))
        with pytest.raises(ValueError):
            c.bind([], [0.1])
        c.bind([], [0.1, 0.2, 0.3])

    def test_is_bound(self):
        c = Circuit(1).ry(0, 0.3)
        assert c.is_bound
        c.ry(0, ParameterRef(ParamSpace.DATA, 0))
        assert not c.is_bound


class TestStripTerminalMeasurements:
    def test_strips_trailing_run_only(self):
        c = Circuit(2, 2).h(0).measure(0, 0).x(1).measure(0, 0).measure(1, 1)
        s = strip_terminal_measurements(c)
        assert [g.kind for g in s.gates] == [GateKind.H, GateKind.MEASURE, GateKind.X]

    def test_preserves_declared_params(self):
        c = Circuit(1, 1)
        c.ry(0, ParameterRef(ParamSpace.THETA, 0))
        c.declare_params(5, 3)
        c.measure(0, 0)
        s = strip_terminal_measurements(c)
        assert (s.n_data_params, s.n_theta_params) == (5, 3)

    def test_no_measurements_is_identity_copy(self):
        c = Circuit(2).h(0).cx(0, 1)
        s = strip_terminal_measurements(c)
        assert s == c
        assert s is not c


def _random_circuit(rng: np.random.Generator) -> Circuit:
    n_qubits = int(rng.integers(1, 6))
    n_clbits = int(rng.integers(0, 4))
    c = Circuit(n_qubits, n_clbits)
    kinds = ["H", "X", "Z", "RY", "RESET"]
    if n_qubits >= 2:
        kinds.append("CX")
    if n_clbits >= 1:
        kinds.append("MEASURE")
    for _ in range(int(rng.integers(0, 25))):
        kind = kinds[rng.integers(len(kinds))]
        q = int(rng.integers(n_qubits))
        if kind == "H":
            c.h(q)
        elif kind == "RESET":
            c.reset(q)
        elif kind == "RY":
            u = rng.random()
            if u < 0.4:
                c.ry(q, round(float(rng.uniform(-4, 4)), 6))
            elif u < 0.7:
                c.ry(q, ParameterRef(ParamSpace.DATA, int(rng.integers(8))))
            else:
                c.ry(q, ParameterRef(ParamSpace.THETA, int(rng.integers(80))))
        elif kind == "CX":
            t = int(rng.integers(n_qubits - 1))
            t = t if t < q else t + 1
            c.cx(q, t)
        elif kind == "MEASURE":
            c.measure(q, int(rng.integers(n_clbits)))
        else:
            condition = None
            if n_clbits and rng.random() < 0.3:
                condition = (int(rng.integers(n_clbits)), int(rng.integers(2)))
            if kind == "X":
                c.x(q, condition=condition)
            else:
                c.z(q, condition=condition)
    return c


class TestTextFormat:
    def test_dump_shapes(self):
        c = Circuit(5, 2)
        c.h(0).cx(1, 2).ry(0, 0.7).ry(3, ParameterRef(ParamSpace.THETA, 17))
        c.measure(2, 0).x(4, condition=(0, 1)).reset(2)
        text = dump_text(c)
        lines = text.splitlines()
        assert lines[0] == "# circuit qubits=5 clbits=2 data=0 theta=18"
        assert lines[1:] == [
            "H 0", "CX 1 2", "RY 0 0.700000", "RY 3 t[17]",
            "MEASURE 2 -> c0", "X 4 if c0==1", "RESET 2",
        ]
        assert text.endswith("\n")
        assert "\r" not in text

    def test_round_trip_random_circuits(self):
        rng = np.random.default_rng(20240817)
        for _ in range(100):
            c = _random_circuit(rng)
            assert parse_text(dump_text(c)) == c

    def test_round_trip_preserves_declared_widths(self):
        c = Circuit(2, 1)
        c.declare_params(8, 80)
        c.ry(0, ParameterRef(ParamSpace.DATA, 2))
        assert parse_text(dump_text(c)) == c

    def test_parse_rejects_missing_header(self):
        with pytest.raises(ValueError):
            parse_text("H 0\n")

    def test_parse_rejects_unknown_gate(self):
        with pytest.raises(ValueError):
            parse_text("# circuit qubits=1 clbits=0 data=0 theta=0\nT 0\n")

    def test_parse_rejects_malformed_measure(self):
        with pytest.raises(ValueError):
            parse_text("# circuit qubits=1 clbits=1 data=0 theta=0\nMEASURE 0 c0\n")

    def test_parse_rejects_empty(self):
        with pytest.raises(ValueError):
            parse_text("")

    def test_parse_validates_bounds(self):
        with pytest.raises(ValueError):
            parse_text("# circuit qubits=1 clbits=0 data=0 theta=0\nH 3\n")


class TestCompactQubits:
    def test_idle_wires_removed(self):
        c = Circuit(8, 1)
        c.h(1).cx(1, 5).measure(5, 0)
        out, kept = compact_qubits(c)
        assert kept == (1, 5)
        assert out.n_qubits == 2
        assert out.gates == [
            Gate(GateKind.H, (0,)),
            Gate(GateKind.CX, (0, 1)),
            Gate(GateKind.MEASURE, (1,), clbit=0),
        ]
        assert out.n_clbits == 1

    def test_dense_circuit_unchanged(self):
        c = Circuit(3, 0)
        c.h(0).cx(0, 1).ry(2, 0.4)
        out, kept = compact_qubits(c)
        assert kept == (0, 1, 2)
        assert out == c

    def test_preserves_params_and_conditions(self):
        c = Circuit(6, 2)
        c.ry(4, ParameterRef(ParamSpace.THETA, 7))
        c.measure(4, 1)
        c.x(2, condition=(1, 1))
        c.declare_params(8, 80)
        out, kept = compact_qubits(c)
        assert kept == (2, 4)
        assert (out.n_data_params, out.n_theta_params) == (8, 80)
        assert out.gates[0].angle == ParameterRef(ParamSpace.THETA, 7)
        assert out.gates[2] == Gate(GateKind.X, (0,), condition=(1, 1))

    def test_gateless_circuit(self):
        out, kept = compact_qubits(Circuit(5, 0))
        assert out.n_qubits == 1 and kept == (0,)

    def test_simulation_agrees_with_padded(self):
        # padded and compact executions must produce identical outcomes
        from dqclab.engine import run_once, state_z_expectations

        c = Circuit(6, 2)
        c.h(4).cx(4, 1).ry(1, 0.7).measure(4, 0).x(1, condition=(0, 1)) \
            .measure(1, 1)
        out, kept = compact_qubits(c)
        for seed in range(5):
            full = run_once(c, seed=seed)
            comp = run_once(out, seed=seed)
            assert full.clbits == comp.clbits
            zs_full = state_z_expectations(full.state, list(kept))
            zs_comp = state_z_expectations(comp.state)
            np.testing.assert_allclose(zs_full, zs_comp, atol=1e-12)
