"""Architecture builders: structure, parameter counts, entangling census."""

import numpy as np
import pytest

from dqclab.ansatz import (
    ArchKind,
    Architecture,
    build,
    entangling_gate_census,
    parameter_count,
)
from dqclab.circuit import GateKind, ParamSpace

ALL_KINDS = list(ArchKind)


def _cx_pairs(circ):
    return [g.qubits for g in circ.gates if g.kind is GateKind.CX]


def _ry_gates(circ):
    return [(g.qubits[0], g.angle) for g in circ.gates if g.kind is GateKind.RY]


class TestArchitectureValidation:
    def test_defaults(self):
        a = Architecture(ArchKind.BASELINE)
        assert (a.n_qubits, a.n_layers, a.global_period) == (8, 10, 4)
        assert a.measured_qubits == (0, 1)

    def test_kind_checked(self):
        with pytest.raises(TypeError):
            Architecture("baseline")

    def test_readout_must_be_two_distinct_in_range(self):
        with pytest.raises(ValueError):
            Architecture(ArchKind.BASELINE, measured_qubits=(0,))
        with pytest.raises(ValueError):
            Architecture(ArchKind.BASELINE, measured_qubits=(2, 2))
        with pytest.raises(ValueError):
            Architecture(ArchKind.BASELINE, measured_qubits=(0, 8))

    def test_size_bounds(self):
        with pytest.raises(ValueError):
            Architecture(ArchKind.BASELINE, n_qubits=1)
        with pytest.raises(ValueError):
            Architecture(ArchKind.BASELINE, n_layers=0)
        with pytest.raises(ValueError):
            Architecture(ArchKind.ALTERNATING2, global_period=0)

    def test_kind_from_config_string(self):
        assert ArchKind("alternating2") is ArchKind.ALTERNATING2


class TestParameterCount:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_standard_size_is_80(self, kind):
        assert parameter_count(Architecture(kind)) == 80

    def test_small_sizes(self):
        assert parameter_count(Architecture(ArchKind.BASELINE, n_qubits=4, n_layers=1)) == 4
        assert parameter_count(Architecture(ArchKind.ALTERNATING, n_layers=2)) == 16

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_matches_distinct_theta_refs_in_circuit(self, kind):
        circ = build(Architecture(kind))
        refs = [g.angle for g in circ.gates
                if g.kind is GateKind.RY and g.is_symbolic
                and g.angle.space is ParamSpace.THETA]
        assert len(refs) == 80
        assert sorted(r.index for r in refs) == list(range(80))
        assert circ.n_theta_params == 80


class TestStructure:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_encoding_column_first(self, kind):
        circ = build(Architecture(kind))
        head = circ.gates[:8]
        for q, g in enumerate(head):
            assert g.kind is GateKind.RY
            assert g.qubits == (q,)
            assert g.angle.space is ParamSpace.DATA and g.angle.index == q
        assert circ.n_data_params == 8

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_terminal_measurements(self, kind):
        circ = build(Architecture(kind))
        tail = circ.gates[-2:]
        assert [(g.kind, g.qubits[0], g.clbit) for g in tail] == [
            (GateKind.MEASURE, 0, 0), (GateKind.MEASURE, 1, 1),
        ]

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_rotation_columns_identical_across_kinds(self, kind):
        # kinds differ only in CX placement
        ref = _ry_gates(build(Architecture(ArchKind.BASELINE)))
        assert _ry_gates(build(Architecture(kind))) == ref

    def test_baseline_gate_count(self):
        circ = build(Architecture(ArchKind.BASELINE))
        assert len(circ) == 8 + 10 * (7 + 8) + 2

    def test_baseline_chain_every_layer(self):
        pairs = _cx_pairs(build(Architecture(ArchKind.BASELINE)))
        chain = [(i, i + 1) for i in range(7)]
        assert pairs == chain * 10

    def test_fully_entangled_all_pairs_once_before_rotations(self):
        circ = build(Architecture(ArchKind.FULLY_ENTANGLED))
        pairs = _cx_pairs(circ)
        assert pairs == [(i, j) for i in range(8) for j in range(i + 1, 8)]
        first_theta = next(i for i, g in enumerate(circ.gates)
                           if g.kind is GateKind.RY and g.is_symbolic
                           and g.angle.space is ParamSpace.THETA)
        last_cx = max(i for i, g in enumerate(circ.gates) if g.kind is GateKind.CX)
        assert last_cx < first_theta

    def test_alternating_layer_pattern(self):
        pairs = _cx_pairs(build(Architecture(ArchKind.ALTERNATING)))
        chain = [(i, i + 1) for i in range(7)]
        local = [(0, 1), (2, 3), (4, 5), (6, 7)]
        expected = []
        for layer in range(10):
            expected += chain if layer % 2 == 0 else local
        assert pairs == expected

    def test_alternating2_bridge_layers(self):
        pairs = _cx_pairs(build(Architecture(ArchKind.ALTERNATING2)))
        local = [(0, 1), (2, 3), (4, 5), (6, 7)]
        bridge = [(1, 2), (3, 4), (5, 6)]
        expected = []
        for layer in range(10):
            expected += local
            if layer % 4 == 0:
                expected += bridge
        assert pairs == expected

    def test_alternating2_last_qubit_gets_no_bridge(self):
        pairs = _cx_pairs(build(Architecture(ArchKind.ALTERNATING2)))
        bridging = [p for p in pairs if p[0] // 2 != p[1] // 2]
        assert all(7 not in p for p in bridging)

    def test_alternating2_period_config(self):
        arch = Architecture(ArchKind.ALTERNATING2, global_period=3)
        pairs = _cx_pairs(build(arch))
        n_bridge = sum(1 for p in pairs if p[0] // 2 != p[1] // 2)
        assert n_bridge == 3 * len([l for l in range(10) if l % 3 == 0])

    def test_cx_control_is_lower_index(self):
        for kind in ALL_KINDS:
            for control, target in _cx_pairs(build(Architecture(kind))):
                assert control < target


class TestCensus:
    # closed forms: baseline crosses at (1,2),(3,4),(5,6) each chain layer;
    # fully entangled crosses on all pairs except the 4 in-QPU ones
    CASES = {
        ArchKind.BASELINE: (70, 30),
        ArchKind.FULLY_ENTANGLED: (28, 24),
        ArchKind.ALTERNATING: (55, 15),
        ArchKind.ALTERNATING2: (49, 9),
    }

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_census_matches_closed_form(self, kind):
        assert entangling_gate_census(Architecture(kind)) == self.CASES[kind]

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_census_matches_independent_scan(self, kind):
        pairs = _cx_pairs(build(Architecture(kind)))
        cross = sum(1 for a, b in pairs if a // 2 != b // 2)
        assert entangling_gate_census(Architecture(kind)) == (len(pairs), cross)

    def test_remote_cost_ordering(self):
        costs = {k: entangling_gate_census(Architecture(k))[1] for k in ALL_KINDS}
        assert (costs[ArchKind.ALTERNATING2] < costs[ArchKind.ALTERNATING]
                < costs[ArchKind.FULLY_ENTANGLED] < costs[ArchKind.BASELINE])


class TestBuiltCircuitsSimulate:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_bound_circuit_runs(self, kind):
        from dqclab.engine import run_once
        rng = np.random.default_rng(2)
        circ = build(Architecture(kind))
        bound = circ.bind(rng.uniform(-np.pi, np.pi, 8), rng.uniform(-np.pi, np.pi, 80))
        r = run_once(bound, seed=0)
        assert len(r.clbits) == 2
