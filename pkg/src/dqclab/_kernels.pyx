# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled statevector trajectory kernels.

State layout: interleaved re/im float64, 2**(n+1) entries; amplitude index
bit i is the value of qubit i (little-endian). ``run_ops`` executes one
full trajectory over a compiled op table; the pure-python module
``_kernels_py`` mirrors its semantics exactly (same uniform-slot
consumption, same fast paths), so either backend yields the same
measurement outcomes and noise insertions for the same uniform stream.

Op codes: 0=H 1=X 2=Z 3=RY 4=CX 5=MEASURE 6=RESET.
Return value: >=0 number of noise-channel firings, -1 forced measurement
branch has (near-)zero probability, -2 unknown op code.
"""

from libc.math cimport sqrt


cdef inline void _apply_rot(double* s, Py_ssize_t n_amps, int q,
                            double c, double sn) noexcept nogil:
    # real rotation [[c, -sn], [sn, c]] applied componentwise to re/im
    cdef Py_ssize_t step = (<Py_ssize_t>1) << q
    cdef Py_ssize_t base = 0
    cdef Py_ssize_t i, i0, i1
    cdef double a0r, a0i, a1r, a1i
    while base < n_amps:
        for i in range(base, base + step):
            i0 = 2 * i
            i1 = 2 * (i + step)
            a0r = s[i0]; a0i = s[i0 + 1]
            a1r = s[i1]; a1i = s[i1 + 1]
            s[i0] = c * a0r - sn * a1r
            s[i0 + 1] = c * a0i - sn * a1i
            s[i1] = sn * a0r + c * a1r
            s[i1 + 1] = sn * a0i + c * a1i
        base += 2 * step


cdef inline void _apply_h(double* s, Py_ssize_t n_amps, int q) noexcept nogil:
    cdef double r = 0.7071067811865476
    cdef Py_ssize_t step = (<Py_ssize_t>1) << q
    cdef Py_ssize_t base = 0
    cdef Py_ssize_t i, i0, i1
    cdef double a0r, a0i, a1r, a1i
    while base < n_amps:
        for i in range(base, base + step):
            i0 = 2 * i
            i1 = 2 * (i + step)
            a0r = s[i0]; a0i = s[i0 + 1]
            a1r = s[i1]; a1i = s[i1 + 1]
            s[i0] = r * (a0r + a1r)
            s[i0 + 1] = r * (a0i + a1i)
            s[i1] = r * (a0r - a1r)
            s[i1 + 1] = r * (a0i - a1i)
        base += 2 * step


cdef inline void _apply_x(double* s, Py_ssize_t n_amps, int q) noexcept nogil:
    cdef Py_ssize_t step = (<Py_ssize_t>1) << q
    cdef Py_ssize_t base = 0
    cdef Py_ssize_t i, i0, i1
    cdef double tr, ti
    while base < n_amps:
        for i in range(base, base + step):
            i0 = 2 * i
            i1 = 2 * (i + step)
            tr = s[i0]; ti = s[i0 + 1]
            s[i0] = s[i1]; s[i0 + 1] = s[i1 + 1]
            s[i1] = tr; s[i1 + 1] = ti
        base += 2 * step


cdef inline void _apply_y(double* s, Py_ssize_t n_amps, int q) noexcept nogil:
    # |0> component gets -i*a1, |1> component gets i*a0
    cdef Py_ssize_t step = (<Py_ssize_t>1) << q
    cdef Py_ssize_t base = 0
    cdef Py_ssize_t i, i0, i1
    cdef double a0r, a0i, a1r, a1i
    while base < n_amps:
        for i in range(base, base + step):
            i0 = 2 * i
            i1 = 2 * (i + step)
            a0r = s[i0]; a0i = s[i0 + 1]
            a1r = s[i1]; a1i = s[i1 + 1]
            s[i0] = a1i
            s[i0 + 1] = -a1r
            s[i1] = -a0i
            s[i1 + 1] = a0r
        base += 2 * step


cdef inline void _apply_z(double* s, Py_ssize_t n_amps, int q) noexcept nogil:
    cdef Py_ssize_t step = (<Py_ssize_t>1) << q
    cdef Py_ssize_t base = 0
    cdef Py_ssize_t i, i1
    while base < n_amps:
        for i in range(base, base + step):
            i1 = 2 * (i + step)
            s[i1] = -s[i1]
            s[i1 + 1] = -s[i1 + 1]
        base += 2 * step


cdef inline void _apply_cx(double* s, Py_ssize_t n_amps, int qc, int qt) noexcept nogil:
    cdef int lo = qc if qc < qt else qt
    cdef int hi = qt if qc < qt else qc
    cdef Py_ssize_t slo = (<Py_ssize_t>1) << lo
    cdef Py_ssize_t shi = (<Py_ssize_t>1) << hi
    cdef Py_ssize_t sc = (<Py_ssize_t>1) << qc
    cdef Py_ssize_t st = (<Py_ssize_t>1) << qt
    cdef Py_ssize_t x = 0
    cdef Py_ssize_t y, z, i, j
    cdef double tr, ti
    while x < n_amps:
        y = x
        while y < x + shi:
            for z in range(y, y + slo):
                i = 2 * (z + sc)
                j = 2 * (z + sc + st)
                tr = s[i]; ti = s[i + 1]
                s[i] = s[j]; s[i + 1] = s[j + 1]
                s[j] = tr; s[j + 1] = ti
            y += 2 * slo
        x += 2 * shi


cdef inline double _prob_one(double* s, Py_ssize_t n_amps, int q) noexcept nogil:
    cdef Py_ssize_t step = (<Py_ssize_t>1) << q
    cdef Py_ssize_t base = 0
    cdef Py_ssize_t i, i1
    cdef double p = 0.0
    while base < n_amps:
        for i in range(base, base + step):
            i1 = 2 * (i + step)
            p += s[i1] * s[i1] + s[i1 + 1] * s[i1 + 1]
        base += 2 * step
    if p > 1.0:
        p = 1.0
    elif p < 0.0:
        p = 0.0
    return p


cdef inline void _collapse(double* s, Py_ssize_t n_amps, int q, int outcome,
                           double p_keep) noexcept nogil:
    # zero the discarded branch, renormalize the kept one
    cdef Py_ssize_t step = (<Py_ssize_t>1) << q
    cdef Py_ssize_t base = 0
    cdef Py_ssize_t i, ik, iz
    cdef double scale = 1.0 / sqrt(p_keep)
    while base < n_amps:
        for i in range(base, base + step):
            if outcome == 1:
                ik = 2 * (i + step); iz = 2 * i
            else:
                ik = 2 * i; iz = 2 * (i + step)
            s[iz] = 0.0
            s[iz + 1] = 0.0
            s[ik] = scale * s[ik]
            s[ik + 1] = scale * s[ik + 1]
        base += 2 * step


cdef inline void _apply_pauli(double* s, Py_ssize_t n_amps, int q, int which) noexcept nogil:
    if which == 1:
        _apply_x(s, n_amps, q)
    elif which == 2:
        _apply_y(s, n_amps, q)
    elif which == 3:
        _apply_z(s, n_amps, q)


def run_ops(const signed char[::1] kinds, const int[::1] qa, const int[::1] qb,
            const int[::1] cbit, const int[::1] cond_bit, const signed char[::1] cond_val,
            const signed char[::1] forced,
            const double[::1] c_half, const double[::1] s_half,
            double[::1] state, signed char[::1] clbits,
            const double[::1] uniforms,
            double noise_p, bint noise_1q, bint noise_2q,
            int n_qubits):
    """Execute one trajectory in place; see module docstring for the contract."""
    cdef Py_ssize_t n_amps = (<Py_ssize_t>1) << n_qubits
    cdef Py_ssize_t n_ops = kinds.shape[0]
    cdef double* s = &state[0]
    cdef Py_ssize_t i
    cdef int k, q, outcome, j, events = 0, status = 0
    cdef double p1, pk, u, r
    with nogil:
        for i in range(n_ops):
            k = kinds[i]
            if cond_bit[i] >= 0 and clbits[cond_bit[i]] != cond_val[i]:
                continue
            q = qa[i]
            if k == 0:
                _apply_h(s, n_amps, q)
            elif k == 1:
                _apply_x(s, n_amps, q)
            elif k == 2:
                _apply_z(s, n_amps, q)
            elif k == 3:
                _apply_rot(s, n_amps, q, c_half[i], s_half[i])
            elif k == 4:
                _apply_cx(s, n_amps, q, qb[i])
            elif k == 5:
                p1 = _prob_one(s, n_amps, q)
                if forced[i] >= 0:
                    outcome = forced[i]
                else:
                    outcome = 1 if uniforms[i] < p1 else 0
                pk = p1 if outcome == 1 else 1.0 - p1
                if forced[i] >= 0 and pk < 1e-12:
                    status = -1
                    break
                if pk != 1.0:
                    _collapse(s, n_amps, q, outcome, pk)
                clbits[cbit[i]] = <signed char>outcome
                continue
            elif k == 6:
                p1 = _prob_one(s, n_amps, q)
                if p1 == 0.0:
                    continue
                if p1 == 1.0:
                    _apply_x(s, n_amps, q)
                    continue
                outcome = 1 if uniforms[i] < p1 else 0
                pk = p1 if outcome == 1 else 1.0 - p1
                if pk != 1.0:
                    _collapse(s, n_amps, q, outcome, pk)
                if outcome == 1:
                    _apply_x(s, n_amps, q)
                continue
            else:
                status = -2
                break
            # stochastic Pauli noise attached to the gate just applied
            if k == 4:
                if noise_2q:
                    u = uniforms[i]
                    if u < noise_p:
                        events += 1
                        r = u / noise_p
                        j = <int>(r * 16.0)
                        if j > 15:
                            j = 15
                        _apply_pauli(s, n_amps, q, j >> 2)
                        _apply_pauli(s, n_amps, qb[i], j & 3)
            elif noise_1q:
                u = uniforms[i]
                if u < noise_p:
                    events += 1
                    r = u / noise_p
                    j = <int>(r * 4.0)
                    if j > 3:
                        j = 3
                    _apply_pauli(s, n_amps, q, j)
    if status < 0:
        return status
    return events
