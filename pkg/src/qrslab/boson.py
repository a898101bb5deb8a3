"""Fock and Gaussian boson sampling at desk scale.

Fock probabilities come from permanents of outcome submatrices of the
interferometer unitary; Gaussian probabilities come from Hafnians, through
two independent routes (the squeezed-input matrix A = U tanh(r) U^T and the
covariance-derived matrix M) that must agree on pure squeezed inputs. An
ancestral chained-marginal sampler draws exact Fock samples without ever
building the full table.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import SizeLimitError
from .linalg import require_unitary, submatrix
from .matrixpoly import hafnian_fast, permanent_ryser
from .rng import RngStream
from .samplers import DiscreteDistribution, SampleSet

__all__ = [
    "fock_space",
    "fock_space_size",
    "bs_probability",
    "bs_distribution",
    "bs_sample_ancestral",
    "GaussianState",
    "gbs_state_from_smss",
    "gbs_probability_hafnian_A",
    "gbs_probability_hafnian_M",
    "gbs_truncated_mass",
]

FOCK_PHOTON_LIMIT = 10
ANCESTRAL_PHOTON_LIMIT = 8
FOCK_TABLE_LIMIT = 200_000
GBS_PHOTON_LIMIT = 10  # covariance-route Hafnians reach dimension 2n <= 20


def fock_space_size(m: int, n: int, collision_free_only: bool = False) -> int:
    if collision_free_only:
        return math.comb(m, n)
    return math.comb(m + n - 1, n)


def fock_space(m: int, n: int, collision_free_only: bool = False) -> list[tuple[int, ...]]:
    """All length-m photon count tuples summing to n, first mode descending.

    With the collision-free flag only 0/1 patterns are kept.
    """
    if m < 1:
        raise ValueError("need at least one mode")
    if n < 0:
        raise ValueError("photon number must be non-negative")

    out: list[tuple[int, ...]] = []

    def rec(prefix: tuple[int, ...], modes_left: int, photons_left: int):
        if modes_left == 1:
            if not collision_free_only or photons_left <= 1:
                out.append(prefix + (photons_left,))
            return
        top = min(photons_left, 1) if collision_free_only else photons_left
        for s in range(top, -1, -1):
            rec(prefix + (s,), modes_left - 1, photons_left - s)

    rec((), m, n)
    return out


def _outcome_factorial(s) -> float:
    return float(np.prod([math.factorial(int(x)) for x in s])) if len(s) else 1.0


def bs_probability(u: np.ndarray, s) -> float:
    """P(S) = |Perm(U_{S,1_n})|^2 / prod_j s_j! for photons injected into the first n modes."""
    u = require_unitary(u)
    m = u.shape[0]
    s = tuple(int(x) for x in s)
    if len(s) != m:
        raise ValueError(f"outcome length {len(s)} does not match {m} modes")
    if any(x < 0 for x in s):
        raise ValueError("photon counts must be non-negative")
    n = sum(s)
    if n > FOCK_PHOTON_LIMIT:
        raise SizeLimitError(f"Fock probabilities limited to {FOCK_PHOTON_LIMIT} photons, got {n}")
    cols = [1] * n + [0] * (m - n)
    sub = submatrix(u, s, cols)
    perm = permanent_ryser(sub)
    return float(abs(perm) ** 2 / _outcome_factorial(s))


def bs_distribution(u: np.ndarray, n: int) -> DiscreteDistribution:
    """Full output table over the n-photon sample space (tuple labels)."""
    u = require_unitary(u)
    m = u.shape[0]
    if fock_space_size(m, n) > FOCK_TABLE_LIMIT:
        raise SizeLimitError(f"sample space larger than {FOCK_TABLE_LIMIT} outcomes")
    labels = fock_space(m, n)
    probs = np.array([bs_probability(u, s) for s in labels])
    return DiscreteDistribution(probs, labels=labels, atol=1e-8)


def _perm_minors(mat: np.ndarray) -> np.ndarray:
    """Permanents of `mat` with one column removed, for every column.

    `mat` is (t-1) x t; expanding the permanent of a t x t matrix along its
    last row reduces the candidate scan to a dot product with these minors.
    """
    t = mat.shape[1]
    if t == 1:
        return np.ones(1, dtype=complex)
    cols = np.arange(t)
    return np.array([permanent_ryser(mat[:, cols != c]) for c in range(t)])


def bs_sample_ancestral(
    u: np.ndarray, n: int, k: int, rng: RngStream, instance_id: str = ""
) -> SampleSet:
    """Exact Fock sampling by chaining photon-position marginals.

    Photons are placed one at a time: with the input columns visited in a
    fresh uniformly random order per sample, photon t lands in mode j with
    probability proportional to |Perm(U[rows so far + j, first t visited
    columns])|^2. Permanents of the shared t-1 rows are expanded into column
    minors once per step, so each candidate mode costs one dot product.
    """
    u = require_unitary(u)
    m = u.shape[0]
    if n > ANCESTRAL_PHOTON_LIMIT:
        raise SizeLimitError(f"ancestral sampling limited to {ANCESTRAL_PHOTON_LIMIT} photons")
    if not 1 <= n <= m:
        raise ValueError("need 1 <= photons <= modes")
    if k < 1:
        raise ValueError("k must be >= 1")
    t0 = time.perf_counter()
    outcomes = []
    for _ in range(k):
        order = rng.generator.permutation(n)
        rows: list[int] = []
        for t in range(1, n + 1):
            cols = order[:t]
            minors = _perm_minors(u[np.ix_(rows, cols)])
            weights = np.abs(u[:, cols] @ minors) ** 2
            total = weights.sum()
            j = int(np.searchsorted(np.cumsum(weights / total), rng.random(), side="right"))
            rows.append(min(j, m - 1))
        counts = np.bincount(rows, minlength=m)
        outcomes.append(tuple(int(c) for c in counts))
    return SampleSet(
        outcomes,
        instance_id=instance_id,
        sampler="ancestral",
        seed=rng.seed,
        wall_time=time.perf_counter() - t0,
    )


@dataclass(frozen=True)
class GaussianState:
    """A Gaussian state as its 2m x 2m covariance in (a_1..a_m, a^dag_1..a^dag_m) ordering.

    sigma_Q = sigma + 1/2 and M = [[0,1],[1,0]] (1 - sigma_Q^{-1}) are derived
    on construction; the vacuum has sigma = 1/2 and M = 0.
    """

    m: int
    sigma: np.ndarray

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=complex)
        if sigma.shape != (2 * self.m, 2 * self.m):
            raise ValueError(f"covariance shape {sigma.shape} does not match {self.m} modes")
        herm = float(np.max(np.abs(sigma - sigma.conj().T))) if sigma.size else 0.0
        if herm > 1e-10:
            raise ValueError(f"covariance not Hermitian (defect {herm:.3e})")
        object.__setattr__(self, "sigma", sigma)
        sigma_q = sigma + 0.5 * np.eye(2 * self.m)
        object.__setattr__(self, "sigma_q", sigma_q)
        try:
            inv = np.linalg.inv(sigma_q)
        except np.linalg.LinAlgError as exc:
            raise ValueError("sigma_Q is singular") from exc
        x = np.block(
            [
                [np.zeros((self.m, self.m)), np.eye(self.m)],
                [np.eye(self.m), np.zeros((self.m, self.m))],
            ]
        )
        object.__setattr__(self, "matrix_m", x @ (np.eye(2 * self.m) - inv))
        det = complex(np.linalg.det(sigma_q))
        if abs(det.imag) > 1e-9 * abs(det) or det.real <= 0:
            raise ValueError(f"invalid sigma_Q determinant {det}")
        object.__setattr__(self, "vacuum_overlap_factor", float(det.real ** -0.5))


def gbs_state_from_smss(u: np.ndarray, r) -> GaussianState:
    """Covariance of single-mode squeezed inputs sent through the interferometer.

    sigma = (1/2) diag(U, U*) Sigma Sigma^dag diag(U^dag, U^T) with Sigma the
    per-mode cosh/sinh block matrix; Sigma Sigma^dag reduces to cosh/sinh of 2r.
    """
    u = require_unitary(u)
    m = u.shape[0]
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (m,):
        raise ValueError(f"need one squeezing parameter per mode, got shape {r.shape}")
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise ValueError("squeezing parameters must be finite and non-negative")
    c2 = np.diag(np.cosh(2 * r))
    s2 = np.diag(np.sinh(2 * r))
    top = np.hstack([u @ c2 @ u.conj().T, u @ s2 @ u.T])
    bot = np.hstack([u.conj() @ s2 @ u.conj().T, u.conj() @ c2 @ u.T])
    sigma = 0.5 * np.vstack([top, bot])
    return GaussianState(m, sigma)


def _check_gbs_outcome(s, m: int) -> tuple[int, tuple[int, ...]]:
    s = tuple(int(x) for x in s)
    if len(s) != m:
        raise ValueError(f"outcome length {len(s)} does not match {m} modes")
    if any(x < 0 for x in s):
        raise ValueError("photon counts must be non-negative")
    n = sum(s)
    if n > GBS_PHOTON_LIMIT:
        raise SizeLimitError(f"Gaussian probabilities limited to {GBS_PHOTON_LIMIT} photons, got {n}")
    return n, s


def gbs_probability_hafnian_A(u: np.ndarray, r, s) -> float:
    """P(S) = |Haf(A_{S,S})|^2 / (prod_j s_j! prod_i cosh r_i) with A = U tanh(r) U^T.

    Odd total photon numbers are impossible for squeezed-vacuum inputs and
    return exactly 0.
    """
    u = require_unitary(u)
    m = u.shape[0]
    r = np.asarray(r, dtype=np.float64)
    n, s = _check_gbs_outcome(s, m)
    if n % 2:
        return 0.0
    a = u @ np.diag(np.tanh(r)) @ u.T
    sub = submatrix(a, s, s)
    haf = hafnian_fast(sub)
    return float(abs(haf) ** 2 / (_outcome_factorial(s) * np.prod(np.cosh(r))))


def gbs_probability_hafnian_M(state: GaussianState, s) -> float:
    """P(S) = det(sigma_Q)^{-1/2} Haf(M_S) / prod_j s_j! via the covariance route.

    M_S repeats the j-th and (m+j)-th rows and columns of M s_j times each.
    """
    n, s = _check_gbs_outcome(s, state.m)
    if n % 2:
        return 0.0
    pattern = list(s) + list(s)
    sub = submatrix(state.matrix_m, pattern, pattern)
    haf = complex(hafnian_fast(sub))
    val = state.vacuum_overlap_factor * haf / _outcome_factorial(s)
    if abs(val.imag) > 1e-9 * max(1.0, abs(val)):
        raise ValueError(f"non-real probability {val}")
    return max(float(val.real), 0.0)


def gbs_truncated_mass(state: GaussianState, cutoff: int) -> float:
    """Total probability of all outcomes with at most `cutoff` photons."""
    total = 0.0
    for n in range(0, cutoff + 1):
        if n % 2:
            continue
        for s in fock_space(state.m, n):
            total += gbs_probability_hafnian_M(state, s)
    return total
