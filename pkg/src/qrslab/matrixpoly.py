"""Exact and randomized evaluation of permanents and Hafnians.

The permanent has three routes (brute force over permutations, Ryser,
Glynn) and the Hafnian two (perfect-matching enumeration, power-trace
subset sum); the cheap exact routes double as oracles for the fast ones.
The Gurvits estimator gives additive-error |Perm| estimates in O(n^2/eps^2).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import SizeLimitError
from .rng import RngStream

__all__ = [
    "EstimateWithError",
    "permanent_naive",
    "permanent_ryser",
    "permanent_glynn",
    "permanent_batch",
    "gurvits_estimate",
    "gurvits_sample_count",
    "hafnian_naive",
    "hafnian_fast",
]

NAIVE_PERMANENT_LIMIT = 10
FAST_PERMANENT_LIMIT = 30
NAIVE_HAFNIAN_LIMIT = 12
FAST_HAFNIAN_LIMIT = 32
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class EstimateWithError:
    """A randomized estimate with its empirical standard error."""

    value: complex
    standard_error: float
    sample_count: int

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if self.standard_error < 0:
            raise ValueError("standard_error must be >= 0")


def _square(a: np.ndarray, what: str) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{what} requires a square matrix, got shape {a.shape}")
    return a


@lru_cache(maxsize=None)
def _all_permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.intp)


def permanent_naive(a: np.ndarray) -> complex:
    """Sum over all permutations; the oracle route, O(n * n!)."""
    a = _square(a, "permanent")
    n = a.shape[0]
    if n > NAIVE_PERMANENT_LIMIT:
        raise SizeLimitError(f"naive permanent limited to n <= {NAIVE_PERMANENT_LIMIT}, got {n}")
    if n == 0:
        return 1.0 + 0.0j
    taus = _all_permutations(n)
    return complex(a[np.arange(n), taus].prod(axis=1).sum())


def permanent_ryser(a: np.ndarray) -> complex:
    """Inclusion-exclusion permanent with Gray-code column updates, O(n 2^n)."""
    a = _square(a, "permanent")
    if a.shape[0] > FAST_PERMANENT_LIMIT:
        raise SizeLimitError(f"permanent limited to n <= {FAST_PERMANENT_LIMIT}, got {a.shape[0]}")
    return _kernels.perm_ryser(a)


def permanent_glynn(a: np.ndarray) -> complex:
    """Polarization-identity permanent walking 2^(n-1) sign patterns."""
    a = _square(a, "permanent")
    if a.shape[0] > FAST_PERMANENT_LIMIT:
        raise SizeLimitError(f"permanent limited to n <= {FAST_PERMANENT_LIMIT}, got {a.shape[0]}")
    return _kernels.perm_glynn(a)


def permanent_batch(stack: np.ndarray) -> np.ndarray:
    """Permanents of a (k, n, n) stack of matrices, for moment studies."""
    stack = np.asarray(stack, dtype=np.complex128)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise ValueError(f"expected a (k, n, n) stack, got shape {stack.shape}")
    if stack.shape[1] > FAST_PERMANENT_LIMIT:
        raise SizeLimitError(f"permanent limited to n <= {FAST_PERMANENT_LIMIT}")
    return _kernels.perm_glynn_batch(stack)


def gurvits_sample_count(epsilon: float) -> int:
    return math.ceil(4.0 / epsilon**2)


def gurvits_estimate(a: np.ndarray, epsilon: float, rng: RngStream) -> EstimateWithError:
    """Unbiased randomized permanent estimate within +-epsilon * ||A||^n.

    Averages Glynn terms prod_j(x . A[:, j]) * prod_i(x_i) over uniform
    sign vectors x; ceil(4 / epsilon^2) samples give the additive-error
    guarantee with >= 95% empirical coverage.
    """
    a = _square(a, "gurvits estimate")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    n = a.shape[0]
    k = gurvits_sample_count(epsilon)
    if n == 0:
        return EstimateWithError(1.0 + 0.0j, 0.0, k)
    signs = rng.signs((k, n)).astype(np.float64)
    rowsums = signs @ a
    terms = rowsums.prod(axis=1) * signs.prod(axis=1)
    value = terms.mean()
    spread = float(np.sqrt(np.mean(np.abs(terms - value) ** 2) / k))
    return EstimateWithError(complex(value), spread, k)


def _symmetrized(a: np.ndarray, limit: int, what: str) -> np.ndarray:
    a = _square(a, what)
    n2 = a.shape[0]
    if n2 % 2:
        raise ValueError(f"{what} requires even dimension, got {n2}")
    if n2 > limit:
        raise SizeLimitError(f"{what} limited to dimension <= {limit}, got {n2}")
    if n2:
        asym = float(np.max(np.abs(a - a.T)))
        if asym > SYMMETRY_TOL:
            raise ValueError(f"{what} requires a symmetric matrix (defect {asym:.3e})")
    return (a + a.T) / 2.0


def hafnian_naive(a: np.ndarray) -> complex:
    """Sum over perfect matchings of the index set; (2n-1)!! terms.

    The diagonal is ignored: matchings never pair an index with itself.
    """
    a = _symmetrized(a, NAIVE_HAFNIAN_LIMIT, "naive Hafnian")
    n2 = a.shape[0]
    if n2 == 0:
        return 1.0 + 0.0j

    def match(indices):
        if not indices:
            return 1.0 + 0.0j
        first, rest = indices[0], indices[1:]
        total = 0.0 + 0.0j
        for pos, partner in enumerate(rest):
            remaining = rest[:pos] + rest[pos + 1 :]
            total += a[first, partner] * match(remaining)
        return total

    return match(tuple(range(n2)))


def hafnian_fast(a: np.ndarray) -> complex:
    """Exact Hafnian via the power-trace subset sum; sub-factorial cost."""
    a = _symmetrized(a, FAST_HAFNIAN_LIMIT, "Hafnian")
    return _kernels.haf_trace(a)
