"""IQP circuit families and their two closed-form amplitude routes.

An IQP circuit is diagonal in the Hadamard basis. Two instance families are
covered: degree-3 Boolean polynomials (Z/CZ/CCZ gates between Hadamard
layers) whose all-zero amplitude is the normalized gap of the polynomial,
and X-basis weight tables exp(i sum w_ij X_i X_j + i sum w_ii X_i) whose
all-zero amplitude is an imaginary-temperature Ising partition function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, Gate
from .errors import SizeLimitError
from .rng import RngStream

__all__ = [
    "IqpPolynomial",
    "IqpWeights",
    "build_iqp_poly_circuit",
    "build_iqp_weight_circuit",
    "iqp_gap_amplitude",
    "ising_partition_amplitude",
    "quadratic_poly_to_weights",
    "random_iqp_polynomial",
    "random_iqp_weights",
    "WEIGHT_ANGLE_SET",
]

BRUTE_FORCE_QUBIT_LIMIT = 24
_CHUNK = 1 << 16

# Default angle preset for weighted instances: multiples of pi/4.
WEIGHT_ANGLE_SET = tuple(k * math.pi / 4 for k in range(8))


@dataclass(frozen=True)
class IqpPolynomial:
    """A degree-3 Boolean polynomial over F2: index sets for each monomial order."""

    n: int
    cubic: frozenset[tuple[int, int, int]] = frozenset()
    quadratic: frozenset[tuple[int, int]] = frozenset()
    linear: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "cubic", frozenset(tuple(t) for t in self.cubic))
        object.__setattr__(self, "quadratic", frozenset(tuple(t) for t in self.quadratic))
        object.__setattr__(self, "linear", frozenset(int(i) for i in self.linear))
        for (i, j, k) in self.cubic:
            if not 0 <= i < j < k < self.n:
                raise ValueError(f"bad cubic term {(i, j, k)}")
        for (i, j) in self.quadratic:
            if not 0 <= i < j < self.n:
                raise ValueError(f"bad quadratic term {(i, j)}")
        for i in self.linear:
            if not 0 <= i < self.n:
                raise ValueError(f"bad linear term {i}")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """f(x) in F2 for an array of basis indices."""
        x = np.asarray(x, dtype=np.uint64)
        f = np.zeros(x.shape, dtype=np.uint8)
        for (i, j, k) in self.cubic:
            f ^= ((x >> np.uint64(i)) & (x >> np.uint64(j)) & (x >> np.uint64(k)) & np.uint64(1)).astype(np.uint8)
        for (i, j) in self.quadratic:
            f ^= ((x >> np.uint64(i)) & (x >> np.uint64(j)) & np.uint64(1)).astype(np.uint8)
        for i in self.linear:
            f ^= ((x >> np.uint64(i)) & np.uint64(1)).astype(np.uint8)
        return f


@dataclass(frozen=True)
class IqpWeights:
    """Symmetric weight table in radians; the diagonal holds vertex weights."""

    n: int
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        if w.shape != (self.n, self.n):
            raise ValueError(f"weight table shape {w.shape} does not match n={self.n}")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if not np.allclose(w, w.T, atol=1e-12):
            raise ValueError("weight table must be symmetric")
        object.__setattr__(self, "w", w)


def random_iqp_polynomial(n: int, rng: RngStream, density: float = 0.5) -> IqpPolynomial:
    """Each monomial present independently with the given probability."""
    cubic = [
        (i, j, k)
        for i in range(n)
        for j in range(i + 1, n)
        for k in range(j + 1, n)
        if rng.random() < density
    ]
    quadratic = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
    linear = [i for i in range(n) if rng.random() < density]
    return IqpPolynomial(n, frozenset(cubic), frozenset(quadratic), frozenset(linear))


def random_iqp_weights(n: int, rng: RngStream, angles=WEIGHT_ANGLE_SET) -> IqpWeights:
    """Symmetric weight table with entries drawn uniformly from a discrete angle set."""
    angles = np.asarray(angles, dtype=np.float64)
    w = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            w[i, j] = w[j, i] = angles[int(rng.integers(len(angles)))]
    return IqpWeights(n, w)


def build_iqp_poly_circuit(f: IqpPolynomial, instance_id: str = "") -> Circuit:
    """H layer, then Z/CZ/CCZ per linear/quadratic/cubic term, then H layer."""
    gates = [Gate("H", (q,)) for q in range(f.n)]
    gates += [Gate("Z", (i,)) for i in sorted(f.linear)]
    gates += [Gate("CZ", t) for t in sorted(f.quadratic)]
    gates += [Gate("CCZ", t) for t in sorted(f.cubic)]
    gates += [Gate("H", (q,)) for q in range(f.n)]
    return Circuit(f.n, tuple(gates), family="iqp_poly", instance_id=instance_id)


def build_iqp_weight_circuit(w: IqpWeights, instance_id: str = "") -> Circuit:
    """One ExpXX gate per nonzero edge weight, one ExpX per nonzero vertex weight.

    All gates commute, so the emission order is irrelevant.
    """
    gates = []
    for i in range(w.n):
        for j in range(i + 1, w.n):
            if w.w[i, j] != 0.0:
                gates.append(Gate("ExpXX", (i, j), (w.w[i, j],)))
    for i in range(w.n):
        if w.w[i, i] != 0.0:
            gates.append(Gate("ExpX", (i,), (w.w[i, i],)))
    return Circuit(w.n, tuple(gates), family="iqp_weights", instance_id=instance_id)


def iqp_gap_amplitude(f: IqpPolynomial) -> float:
    """<0|C_f|0> = 2^-n sum_x (-1)^f(x), the normalized gap of f."""
    if f.n > BRUTE_FORCE_QUBIT_LIMIT:
        raise SizeLimitError(f"gap evaluation limited to {BRUTE_FORCE_QUBIT_LIMIT} qubits")
    total = 1 << f.n
    ones = 0
    for lo in range(0, total, _CHUNK):
        xs = np.arange(lo, min(lo + _CHUNK, total), dtype=np.uint64)
        ones += int(f.evaluate(xs).sum())
    return (total - 2 * ones) / total


def ising_partition_amplitude(w: IqpWeights) -> complex:
    """<0|C_w|0> = 2^-n sum_{z in {+-1}^n} exp(i(sum_{i<j} w_ij z_i z_j + sum_i w_ii z_i))."""
    if w.n > BRUTE_FORCE_QUBIT_LIMIT:
        raise SizeLimitError(f"partition sum limited to {BRUTE_FORCE_QUBIT_LIMIT} qubits")
    n = w.n
    offdiag = np.triu(w.w, k=1)
    diag = np.diagonal(w.w)
    total = 1 << n
    acc = 0.0 + 0.0j
    for lo in range(0, total, _CHUNK):
        xs = np.arange(lo, min(lo + _CHUNK, total), dtype=np.uint64)
        z = 1.0 - 2.0 * ((xs[:, None] >> np.arange(n, dtype=np.uint64)[None, :]) & np.uint64(1)).astype(np.float64)
        energy = np.einsum("ci,ij,cj->c", z, offdiag, z) + z @ diag
        acc += np.exp(1j * energy).sum()
    return complex(acc / total)


def quadratic_poly_to_weights(f: IqpPolynomial) -> tuple[IqpWeights, complex]:
    """Rewrite a degree-<=2 polynomial instance in the weight-table language.

    Substituting x_i = (1 - z_i)/2 into exp(i pi f(x)) gives
    gap(f) = phase * Z_w / 2^n with w_ij = pi b_ij / 4 and vertex weights
    collecting the linear remainders; the returned phase makes the identity
    exact. Cubic terms have no two-body rewrite and are rejected.
    """
    if f.cubic:
        raise ValueError("only degree-<=2 polynomials map to a weight table")
    n = f.n
    w = np.zeros((n, n))
    linear = np.zeros(n)
    const = 0.0
    for (i, j) in f.quadratic:
        w[i, j] = w[j, i] = math.pi / 4.0
        linear[i] -= math.pi / 4.0
        linear[j] -= math.pi / 4.0
        const += math.pi / 4.0
    for i in f.linear:
        linear[i] -= math.pi / 2.0
        const += math.pi / 2.0
    np.fill_diagonal(w, linear)
    return IqpWeights(n, w), complex(np.exp(1j * const))
