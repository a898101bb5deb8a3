# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels for the 2^n-term permanent and Hafnian walks.

Mirrors ``_ref.py`` exactly; the reference module is the oracle for these.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx

BACKEND_NAME = "compiled"


cdef inline int _ctz(unsigned long long k) nogil:
    cdef int j = 0
    while not (k & 1):
        k >>= 1
        j += 1
    return j


def perm_ryser(a):
    """Permanent via the inclusion-exclusion sum, Gray-code ordered."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2, mode="c"] am = np.ascontiguousarray(a, dtype=np.complex128)
    cdef Py_ssize_t n = am.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    cdef cplx[:, ::1] A = am
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] wbuf = np.zeros(n, dtype=np.complex128)
    cdef cplx[::1] w = wbuf
    cdef cplx total = 0, comp = 0, term, y, t
    cdef unsigned long long k, top = (<unsigned long long>1) << n
    cdef int j, size_parity = 0
    cdef Py_ssize_t i
    for k in range(1, top):
        j = _ctz(k)
        if ((k ^ (k >> 1)) >> j) & 1:
            for i in range(n):
                w[i] = w[i] + A[i, j]
        else:
            for i in range(n):
                w[i] = w[i] - A[i, j]
        size_parity ^= 1
        term = 1
        for i in range(n):
            term = term * w[i]
        if (n - size_parity) & 1:
            term = -term
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return complex(total)


def perm_glynn(a):
    """Permanent via the polarization identity over 2^(n-1) sign vectors."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2, mode="c"] am = np.ascontiguousarray(a, dtype=np.complex128)
    cdef Py_ssize_t n = am.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if n == 1:
        return complex(am[0, 0])
    cdef cplx[:, ::1] A = am
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] vbuf = np.asarray(am.sum(axis=0), dtype=np.complex128)
    cdef cplx[::1] v = vbuf
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dbuf = np.ones(n, dtype=np.float64)
    cdef double[::1] delta = dbuf
    cdef cplx total = 0, comp = 0, term, y, t
    cdef double sign = 1.0
    cdef unsigned long long k, top = (<unsigned long long>1) << (n - 1)
    cdef int j
    cdef Py_ssize_t i, col
    term = 1
    for col in range(n):
        term = term * v[col]
    total = term
    for k in range(1, top):
        j = _ctz(k)
        i = j + 1
        delta[i] = -delta[i]
        for col in range(n):
            v[col] = v[col] + 2.0 * delta[i] * A[i, col]
        sign = -sign
        term = sign
        for col in range(n):
            term = term * v[col]
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return complex(total / <double>top)


def perm_glynn_batch(stack, chunk=4096):
    """Glynn permanents of a stack of identically sized matrices."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=3, mode="c"] sm = np.ascontiguousarray(stack, dtype=np.complex128)
    cdef Py_ssize_t b = sm.shape[0]
    cdef Py_ssize_t n = sm.shape[1]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(b, dtype=np.complex128)
    if n == 0:
        out[:] = 1.0
        return out
    if n == 1:
        return np.ascontiguousarray(sm[:, 0, 0])
    cdef cplx[:, :, ::1] A = sm
    cdef cplx[::1] o = out
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] vbuf = np.empty(n, dtype=np.complex128)
    cdef cplx[::1] v = vbuf
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dbuf = np.empty(n, dtype=np.float64)
    cdef double[::1] delta = dbuf
    cdef cplx total, comp, term, y, t, s
    cdef double sign
    cdef unsigned long long k, top = (<unsigned long long>1) << (n - 1)
    cdef int j
    cdef Py_ssize_t idx, i, col
    for idx in range(b):
        for col in range(n):
            s = 0
            for i in range(n):
                s = s + A[idx, i, col]
            v[col] = s
        for i in range(n):
            delta[i] = 1.0
        term = 1
        for col in range(n):
            term = term * v[col]
        total = term
        comp = 0
        sign = 1.0
        for k in range(1, top):
            j = _ctz(k)
            i = j + 1
            delta[i] = -delta[i]
            for col in range(n):
                v[col] = v[col] + 2.0 * delta[i] * A[idx, i, col]
            sign = -sign
            term = sign
            for col in range(n):
                term = term * v[col]
            y = term - comp
            t = total + y
            comp = (t - total) - y
            total = t
        o[idx] = total / <double>top
    return out


def haf_trace(a):
    """Hafnian via the power-trace subset sum over consecutive index pairs."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2, mode="c"] am = np.ascontiguousarray(a, dtype=np.complex128)
    cdef Py_ssize_t n2 = am.shape[0]
    if n2 == 0:
        return 1.0 + 0.0j
    cdef Py_ssize_t m = n2 // 2
    am = am.copy()
    np.fill_diagonal(am, 0.0)
    cdef cplx[:, ::1] A = am

    cdef cnp.ndarray[cnp.complex128_t, ndim=2] xb_b = np.empty((n2, n2), dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] cur_b = np.empty((n2, n2), dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] nxt_b = np.empty((n2, n2), dtype=np.complex128)
    cdef cplx[:, ::1] xb = xb_b
    cdef cplx[:, ::1] cur = cur_b
    cdef cplx[:, ::1] nxt = nxt_b
    cdef cnp.ndarray[cnp.int64_t, ndim=1] keep_b = np.empty(n2, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] swap_b = np.empty(n2, dtype=np.int64)
    cdef long long[::1] keep = keep_b
    cdef long long[::1] swap = swap_b
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] cser_b = np.empty(m + 1, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] eser_b = np.empty(m + 1, dtype=np.complex128)
    cdef cplx[::1] cser = cser_b
    cdef cplx[::1] eser = eser_b

    cdef cplx total = 0, comp = 0, term, y, t, tr, s
    cdef unsigned long long subset, top = (<unsigned long long>1) << m
    cdef Py_ssize_t j, r, cidx, kk, size, i
    for subset in range(1, top):
        size = 0
        for j in range(m):
            if (subset >> j) & 1:
                keep[size] = 2 * j
                keep[size + 1] = 2 * j + 1
                swap[size] = 2 * j + 1
                swap[size + 1] = 2 * j
                size += 2
        for r in range(size):
            for cidx in range(size):
                xb[r, cidx] = A[swap[r], keep[cidx]]
                cur[r, cidx] = xb[r, cidx]
        for kk in range(1, m + 1):
            tr = 0
            for r in range(size):
                tr = tr + cur[r, r]
            cser[kk] = tr / (2.0 * kk)
            if kk < m:
                for r in range(size):
                    for cidx in range(size):
                        s = 0
                        for i in range(size):
                            s = s + cur[r, i] * xb[i, cidx]
                        nxt[r, cidx] = s
                for r in range(size):
                    for cidx in range(size):
                        cur[r, cidx] = nxt[r, cidx]
        eser[0] = 1
        for kk in range(1, m + 1):
            s = 0
            for i in range(1, kk + 1):
                s = s + (<double>i) * cser[i] * eser[kk - i]
            eser[kk] = s / (<double>kk)
        term = eser[m]
        if (m - size // 2) & 1:
            term = -term
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return complex(total)
