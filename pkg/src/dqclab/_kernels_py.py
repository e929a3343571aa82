"""Pure-numpy statevector trajectory kernel.

Drop-in replacement for the compiled extension ``_kernels``: identical
signature, identical uniform-slot consumption, identical branch decisions
and fast paths, so trajectories agree between backends bit-for-bit in
outcomes (state amplitudes agree to float rounding).
"""

from __future__ import annotations

import math

import numpy as np

_SQRT_HALF = 0.7071067811865476


def _axes_view(state: np.ndarray, n_qubits: int) -> np.ndarray:
    # amplitude index bit q lives on reshape axis n-1-q
    return state.view(np.complex128).reshape((2,) * n_qubits)


def _pair(psi: np.ndarray, n: int, q: int):
    ax = n - 1 - q
    lo = [slice(None)] * n
    hi = [slice(None)] * n
    lo[ax] = 0
    hi[ax] = 1
    return tuple(lo), tuple(hi)


def _apply_x(psi, n, q):
    lo, hi = _pair(psi, n, q)
    a0 = psi[lo].copy()
    psi[lo] = psi[hi]
    psi[hi] = a0


def _apply_y(psi, n, q):
    lo, hi = _pair(psi, n, q)
    a0 = psi[lo].copy()
    psi[lo] = -1j * psi[hi]
    psi[hi] = 1j * a0


def _apply_z(psi, n, q):
    _, hi = _pair(psi, n, q)
    psi[hi] = -psi[hi]


def _apply_h(psi, n, q):
    lo, hi = _pair(psi, n, q)
    a0 = psi[lo].copy()
    a1 = psi[hi]
    psi[lo] = _SQRT_HALF * (a0 + a1)
    psi[hi] = _SQRT_HALF * (a0 - a1)


def _apply_rot(psi, n, q, c, sn):
    lo, hi = _pair(psi, n, q)
    a0 = psi[lo].copy()
    a1 = psi[hi]
    psi[lo] = c * a0 - sn * a1
    psi[hi] = sn * a0 + c * a1


def _apply_cx(psi, n, qc, qt):
    axc = n - 1 - qc
    axt = n - 1 - qt
    i0 = [slice(None)] * n
    i1 = [slice(None)] * n
    i0[axc] = 1
    i1[axc] = 1
    i0[axt] = 0
    i1[axt] = 1
    i0 = tuple(i0)
    i1 = tuple(i1)
    a0 = psi[i0].copy()
    psi[i0] = psi[i1]
    psi[i1] = a0


def _apply_pauli(psi, n, q, which):
    if which == 1:
        _apply_x(psi, n, q)
    elif which == 2:
        _apply_y(psi, n, q)
    elif which == 3:
        _apply_z(psi, n, q)


def _prob_one(psi, n, q):
    _, hi = _pair(psi, n, q)
    b = psi[hi]
    p = float(np.sum(b.real * b.real + b.imag * b.imag))
    if p > 1.0:
        return 1.0
    if p < 0.0:
        return 0.0
    return p


def _collapse(psi, n, q, outcome, p_keep):
    lo, hi = _pair(psi, n, q)
    keep, zero = (hi, lo) if outcome == 1 else (lo, hi)
    psi[zero] = 0.0
    psi[keep] *= 1.0 / math.sqrt(p_keep)


def run_ops(kinds, qa, qb, cbit, cond_bit, cond_val, forced,
            c_half, s_half, state, clbits, uniforms,
            noise_p, noise_1q, noise_2q, n_qubits):
    """Execute one trajectory in place; mirrors the compiled kernel."""
    psi = _axes_view(state, n_qubits)
    events = 0
    for i in range(len(kinds)):
        k = kinds[i]
        if cond_bit[i] >= 0 and clbits[cond_bit[i]] != cond_val[i]:
            continue
        q = qa[i]
        if k == 0:
            _apply_h(psi, n_qubits, q)
        elif k == 1:
            _apply_x(psi, n_qubits, q)
        elif k == 2:
            _apply_z(psi, n_qubits, q)
        elif k == 3:
            _apply_rot(psi, n_qubits, q, c_half[i], s_half[i])
        elif k == 4:
            _apply_cx(psi, n_qubits, q, qb[i])
        elif k == 5:
            p1 = _prob_one(psi, n_qubits, q)
            if forced[i] >= 0:
                outcome = int(forced[i])
            else:
                outcome = 1 if uniforms[i] < p1 else 0
            pk = p1 if outcome == 1 else 1.0 - p1
            if forced[i] >= 0 and pk < 1e-12:
                return -1
            if pk != 1.0:
                _collapse(psi, n_qubits, q, outcome, pk)
            clbits[cbit[i]] = outcome
            continue
        elif k == 6:
            p1 = _prob_one(psi, n_qubits, q)
            if p1 == 0.0:
                continue
            if p1 == 1.0:
                _apply_x(psi, n_qubits, q)
                continue
            outcome = 1 if uniforms[i] < p1 else 0
            pk = p1 if outcome == 1 else 1.0 - p1
            if pk != 1.0:
                _collapse(psi, n_qubits, q, outcome, pk)
            if outcome == 1:
                _apply_x(psi, n_qubits, q)
            continue
        else:
            return -2
        if k == 4:
            if noise_2q:
                u = uniforms[i]
                if u < noise_p:
                    events += 1
                    j = min(int(u / noise_p * 16.0), 15)
                    _apply_pauli(psi, n_qubits, q, j >> 2)
                    _apply_pauli(psi, n_qubits, qb[i], j & 3)
        elif noise_1q:
            u = uniforms[i]
            if u < noise_p:
                events += 1
                j = min(int(u / noise_p * 4.0), 3)
                _apply_pauli(psi, n_qubits, q, j)
    return events
