#!/usr/bin/env python3
"""Compare the compiled trajectory kernel against the numpy fallback.

Times three representative workloads per backend:

  exact-forward   one exact statevector pass of the monolithic 8-qubit
                  classifier circuit (training inner loop)
  noisy-shots     depolarizing-noise trajectories of the distributed
                  circuit (test-time evaluation)
  protocol-shots  mid-circuit measurement sampling of the 4-qubit
                  remote-CX protocol

Usage: python3 benchmarks/bench_backends.py [--shots N] [--repeat N]
"""

from __future__ import annotations

import argparse
import importlib
import time

import numpy as np

from dqclab import backend as backend_mod
from dqclab.ansatz import ArchKind, Architecture
from dqclab.circuit import Circuit
from dqclab.dqc import Topology
from dqclab.engine import CompiledCircuit, NoiseConfig, sample_compiled
from dqclab.qml import _model_circuits, initial_theta


def _impl_modules() -> dict[str, object]:
    impls = {}
    try:
        impls["cython"] = importlib.import_module("dqclab._kernels")
    except ImportError:
        pass
    impls["python"] = importlib.import_module("dqclab._kernels_py")
    return impls


def _protocol_circuit() -> Circuit:
    c = Circuit(4, 2)
    c.ry(0, 1.1).ry(2, 0.4)
    c.h(1).cx(1, 3).cx(0, 1).measure(1, 0).x(3, condition=(0, 1))
    c.cx(3, 2).h(3).measure(3, 1).z(0, condition=(1, 1))
    c.reset(1).reset(3)
    return c


def build_workloads(shots: int):
    arch = Architecture(kind=ArchKind.BASELINE)
    theta = initial_theta(arch, 0)
    x = np.linspace(-np.pi, np.pi, arch.n_qubits)
    topo = Topology()

    mono = _model_circuits(arch, topo, distributed=False)
    mono_tables = mono.exact.bind_tables(x, theta)

    dist = _model_circuits(arch, topo, distributed=True)
    dist_tables = dist.sampled.bind_tables(x, theta)
    noise = NoiseConfig(0.03)

    proto_comp = CompiledCircuit.from_circuit(_protocol_circuit())
    proto_tables = proto_comp.bind_tables([], [])

    def exact_forward():
        mono.exact.run(*mono_tables, base_seed=0)

    def noisy_shots():
        sample_compiled(dist.sampled, *dist_tables, shots=shots, noise=noise,
                        base_seed=0)

    def protocol_shots():
        sample_compiled(proto_comp, *proto_tables, shots=20 * shots,
                        noise=None, base_seed=0)

    return [
        ("exact-forward", exact_forward, 1),
        (f"noisy-shots[{shots}]", noisy_shots, shots),
        (f"protocol-shots[{20 * shots}]", protocol_shots, 20 * shots),
    ]


def time_best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--shots", type=int, default=50,
                    help="noisy trajectories per measurement (default 50)")
    ap.add_argument("--repeat", type=int, default=3,
                    help="repeats per workload, best-of (default 3)")
    args = ap.parse_args()

    impls = _impl_modules()
    if "cython" not in impls:
        print("note: compiled extension not importable; timing python only")

    original = backend_mod.run_ops
    results: dict[str, dict[str, float]] = {}
    try:
        for name, module in impls.items():
            backend_mod.run_ops = module.run_ops
            workloads = build_workloads(args.shots)
            for wname, fn, _ in workloads:
                fn()  # warm up
                results.setdefault(wname, {})[name] = time_best(fn, args.repeat)
    finally:
        backend_mod.run_ops = original

    width = max(len(w) for w in results)
    header = f"{'workload':<{width}}  {'cython':>10}  {'python':>10}  {'ratio':>7}"
    print(header)
    print("-" * len(header))
    for wname, times in results.items():
        cy = times.get("cython")
        py = times.get("python")
        cy_s = f"{cy * 1e3:9.2f}ms" if cy is not None else "       n/a"
        py_s = f"{py * 1e3:9.2f}ms" if py is not None else "       n/a"
        ratio = f"{py / cy:6.1f}x" if cy and py else "    n/a"
        print(f"{wname:<{width}}  {cy_s}  {py_s}  {ratio}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
