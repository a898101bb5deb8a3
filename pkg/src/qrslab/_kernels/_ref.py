"""Pure-Python/NumPy kernels for the 2^n-term matrix-polynomial walks.

These are the fallback twins of the compiled kernels in ``_fast.pyx``. Both
implementations must agree to full precision; the test suite and the
benchmark exercise them side by side. The alternating 2^n-term sums lose
digits under naive accumulation, so every walk uses Kahan compensation.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "fallback"


def _kahan_add(total, comp, term):
    y = term - comp
    t = total + y
    comp = (t - total) - y
    return t, comp


def perm_ryser(a: np.ndarray) -> complex:
    """Permanent via the inclusion-exclusion sum, Gray-code ordered.

    Each of the 2^n - 1 column subsets costs O(n): the Gray step flips one
    column in the running row-sum vector.
    """
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    w = np.zeros(n, dtype=np.complex128)
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    size_parity = 0  # |S| mod 2 for the current Gray subset
    for k in range(1, 1 << n):
        j = (k & -k).bit_length() - 1
        if ((k ^ (k >> 1)) >> j) & 1:
            w += a[:, j]
        else:
            w -= a[:, j]
        size_parity ^= 1
        term = np.prod(w)
        if (n - size_parity) & 1:
            term = -term
        total, comp = _kahan_add(total, comp, term)
    return complex(total)


def perm_glynn(a: np.ndarray) -> complex:
    """Permanent via the polarization identity over 2^(n-1) sign vectors."""
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if n == 1:
        return complex(a[0, 0])
    # delta_0 fixed at +1; Gray-walk the remaining n-1 signs
    delta = np.ones(n, dtype=np.float64)
    v = a.sum(axis=0).astype(np.complex128)
    total = np.prod(v)
    comp = 0.0 + 0.0j
    sign = 1.0
    for k in range(1, 1 << (n - 1)):
        j = (k & -k).bit_length() - 1
        i = j + 1  # flipped sign index
        delta[i] = -delta[i]
        v += 2.0 * delta[i] * a[i, :]
        sign = -sign
        total, comp = _kahan_add(total, comp, sign * np.prod(v))
    return complex(total / (1 << (n - 1)))


def perm_glynn_batch(stack: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """Vectorized Glynn permanents for a stack of identically sized matrices.

    Enumerates all 2^(n-1) sign vectors up front, so it is meant for the
    small-n Monte Carlo moment studies (n <= ~12).
    """
    stack = np.asarray(stack, dtype=np.complex128)
    b, n, _ = stack.shape
    if n == 0:
        return np.ones(b, dtype=np.complex128)
    if n == 1:
        return stack[:, 0, 0].copy()
    ks = np.arange(1 << (n - 1), dtype=np.uint64)
    deltas = np.ones(((1 << (n - 1)), n), dtype=np.float64)
    for bit in range(n - 1):
        deltas[:, bit + 1] = 1.0 - 2.0 * ((ks >> np.uint64(bit)) & np.uint64(1)).astype(np.float64)
    signs = deltas.prod(axis=1)
    out = np.empty(b, dtype=np.complex128)
    for lo in range(0, b, chunk):
        part = stack[lo : lo + chunk]
        rowsums = np.einsum("sn,bnm->bsm", deltas, part)
        out[lo : lo + chunk] = rowsums.prod(axis=2) @ signs
    return out / (1 << (n - 1))


def _exp_series_coeff(c: np.ndarray, m: int) -> complex:
    """Coefficient of x^m in exp(sum_k c[k] x^k), c indexed from 1."""
    e = np.zeros(m + 1, dtype=np.complex128)
    e[0] = 1.0
    for j in range(1, m + 1):
        s = 0.0 + 0.0j
        for i in range(1, j + 1):
            s += i * c[i] * e[j - i]
        e[j] = s / j
    return complex(e[m])


def haf_trace(a: np.ndarray) -> complex:
    """Hafnian via the power-trace subset sum over index pairs.

    A 2m x 2m matrix costs O(m (2m)^3 2^m), i.e. sub-factorial. Indices are
    paired consecutively, (0,1), (2,3), ...; the diagonal never contributes
    and is zeroed internally.
    """
    a = np.asarray(a, dtype=np.complex128)
    n2 = a.shape[0]
    if n2 == 0:
        return 1.0 + 0.0j
    m = n2 // 2
    a = a.copy()
    np.fill_diagonal(a, 0.0)
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    for subset in range(1, 1 << m):
        pairs = [j for j in range(m) if (subset >> j) & 1]
        keep = [p for j in pairs for p in (2 * j, 2 * j + 1)]
        swapped = [p for j in pairs for p in (2 * j + 1, 2 * j)]
        xb = a[np.ix_(swapped, keep)]  # X @ B with X swapping each retained pair
        c = np.zeros(m + 1, dtype=np.complex128)
        cur = xb
        for k in range(1, m + 1):
            c[k] = np.trace(cur) / (2 * k)
            if k < m:
                cur = cur @ xb
        term = _exp_series_coeff(c, m)
        if (m - len(pairs)) & 1:
            term = -term
        total, comp = _kahan_add(total, comp, term)
    return complex(total)
