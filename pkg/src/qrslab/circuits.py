"""Exact state-vector simulation of qubit circuits and the circuit generators.

Bit order is little-endian throughout: bit 0 of a basis index is qubit 0, so
the basis state with qubit q excited has index ``1 << q``. All serialized
bit strings are written qubit 0 first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import SizeLimitError
from .rng import RngStream
from .samplers import DiscreteDistribution, bits_to_index, index_to_bits

__all__ = [
    "Gate",
    "Circuit",
    "PauliString",
    "gate_matrix",
    "fsim_matrix",
    "exp_xx_matrix",
    "exp_x_matrix",
    "apply_gate",
    "simulate_state",
    "amplitude",
    "output_distribution",
    "hide_instance",
    "noisy_distribution_trajectories",
    "pauli_expectation",
    "build_sycamore_circuit",
    "build_haar_brickwork_circuit",
    "cluster_state_circuit",
    "cluster_stabilizers",
    "chain_edges",
    "grid_edges",
    "bits_to_index",
    "index_to_bits",
]

SIMULATION_QUBIT_LIMIT = 24
DISTRIBUTION_QUBIT_LIMIT = 20
TRAJECTORY_QUBIT_LIMIT = 16

_SQRT2 = math.sqrt(2.0)

# Fixed 2x2 blocks. The square roots are principal: eigenvalue -1 maps to +i.
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / _SQRT2
_SQRT_X = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
_SQRT_Y = 0.5 * np.array([[1 + 1j, -1 - 1j], [1 + 1j, 1 + 1j]])
_SQRT_W = 0.5 * np.array([[1 + 1j, -1j * _SQRT2], [_SQRT2, 1 + 1j]])

_FIXED_GATES = {
    "X": (_X, 1),
    "Y": (_Y, 1),
    "Z": (_Z, 1),
    "H": (_H, 1),
    "SqrtX": (_SQRT_X, 1),
    "SqrtY": (_SQRT_Y, 1),
    "SqrtW": (_SQRT_W, 1),
    "CZ": (np.diag([1, 1, 1, -1]).astype(complex), 2),
    "CCZ": (np.diag([1, 1, 1, 1, 1, 1, 1, -1]).astype(complex), 3),
}


def fsim_matrix(theta: float, phi: float) -> np.ndarray:
    """Swap-angle/conditional-phase entangler; iSWAP* is fsim(pi/2, pi/6)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array(
        [
            [1, 0, 0, 0],
            [0, c, -1j * s, 0],
            [0, -1j * s, c, 0],
            [0, 0, 0, np.exp(-1j * phi)],
        ],
        dtype=complex,
    )


def exp_xx_matrix(w: float) -> np.ndarray:
    """exp(i w X(x)X): cos(w) on the diagonal, i sin(w) on the anti-diagonal."""
    c, s = math.cos(w), 1j * math.sin(w)
    return np.array(
        [[c, 0, 0, s], [0, c, s, 0], [0, s, c, 0], [s, 0, 0, c]],
        dtype=complex,
    )


def exp_x_matrix(w: float) -> np.ndarray:
    c, s = math.cos(w), 1j * math.sin(w)
    return np.array([[c, s], [s, c]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    """One circuit gate: a name, target qubits, and numeric parameters.

    ``DiagonalPhase`` takes one angle per local basis state of its targets;
    ``Unitary`` is the escape hatch for an explicit matrix (stored in
    ``params`` as flattened real parts followed by imaginary parts).
    """

    name: str
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"duplicate targets in {self.name} gate: {self.targets}")
        if any(t < 0 for t in self.targets):
            raise ValueError("negative qubit index")
        gate_matrix(self)  # validates name/arity/params

    @property
    def arity(self) -> int:
        return len(self.targets)

    @staticmethod
    def unitary(matrix: np.ndarray, targets: Sequence[int]) -> "Gate":
        matrix = np.asarray(matrix, dtype=complex)
        k = len(targets)
        if matrix.shape != (2**k, 2**k):
            raise ValueError(f"matrix shape {matrix.shape} does not fit {k} targets")
        params = tuple(matrix.real.ravel()) + tuple(matrix.imag.ravel())
        return Gate("Unitary", tuple(targets), params)


def gate_matrix(gate: Gate) -> np.ndarray:
    """Dense matrix of a gate on its local basis (targets[0] = least significant bit)."""
    k = len(gate.targets)
    if gate.name in _FIXED_GATES:
        mat, arity = _FIXED_GATES[gate.name]
        if k != arity:
            raise ValueError(f"{gate.name} expects {arity} targets, got {k}")
        if gate.params:
            raise ValueError(f"{gate.name} takes no parameters")
        return mat
    if gate.name == "FSim":
        if k != 2 or len(gate.params) != 2:
            raise ValueError("FSim expects 2 targets and (theta, phi)")
        return fsim_matrix(*gate.params)
    if gate.name == "ExpXX":
        if k != 2 or len(gate.params) != 1:
            raise ValueError("ExpXX expects 2 targets and one weight")
        return exp_xx_matrix(gate.params[0])
    if gate.name == "ExpX":
        if k != 1 or len(gate.params) != 1:
            raise ValueError("ExpX expects 1 target and one weight")
        return exp_x_matrix(gate.params[0])
    if gate.name == "DiagonalPhase":
        if len(gate.params) != 2**k:
            raise ValueError(f"DiagonalPhase needs 2^{k} angles")
        return np.diag(np.exp(1j * np.asarray(gate.params)))
    if gate.name == "Unitary":
        dim = 2**k
        if len(gate.params) != 2 * dim * dim:
            raise ValueError("Unitary params must hold re+im of a 2^k x 2^k matrix")
        flat = np.asarray(gate.params)
        return (flat[: dim * dim] + 1j * flat[dim * dim :]).reshape(dim, dim)
    raise ValueError(f"unknown gate name: {gate.name}")


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[Gate, ...]
    family: str = "custom"
    instance_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(t >= self.n for t in g.targets):
                raise ValueError(f"gate {g.name} targets {g.targets} exceed width {self.n}")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "family": self.family,
            "instance_id": self.instance_id,
            "gates": [
                {"name": g.name, "targets": list(g.targets), "params": list(g.params)}
                for g in self.gates
            ],
        }

    @staticmethod
    def from_json(obj: dict) -> "Circuit":
        gates = tuple(
            Gate(g["name"], tuple(g["targets"]), tuple(g.get("params", ()))) for g in obj["gates"]
        )
        return Circuit(int(obj["n"]), gates, obj.get("family", "custom"), obj.get("instance_id", ""))


def apply_gate(state: np.ndarray, n: int, gate: Gate) -> np.ndarray:
    """Apply one gate in place (returns the possibly reallocated buffer)."""
    targets = gate.targets
    if gate.name in ("Z", "CZ", "CCZ"):
        idx = np.arange(state.size)
        mask = np.ones(state.size, dtype=bool)
        for t in targets:
            mask &= ((idx >> t) & 1).astype(bool)
        state[mask] *= -1.0
        return state
    if gate.name == "DiagonalPhase":
        idx = np.arange(state.size)
        local = np.zeros(state.size, dtype=np.int64)
        for i, t in enumerate(targets):
            local |= ((idx >> t) & 1) << i
        state *= np.exp(1j * np.asarray(gate.params))[local]
        return state
    u = gate_matrix(gate)
    k = len(targets)
    psi = state.reshape([2] * n)
    axes = [n - 1 - t for t in reversed(targets)]  # most significant local bit first
    psi = np.moveaxis(psi, axes, range(k))
    shape = psi.shape
    flat = psi.reshape(2**k, -1)
    flat = u @ flat
    psi = np.moveaxis(flat.reshape(shape), range(k), axes)
    return np.ascontiguousarray(psi).reshape(-1)


def simulate_state(circuit: Circuit) -> np.ndarray:
    """C|0...0> as a dense amplitude vector of length 2^n."""
    if circuit.n > SIMULATION_QUBIT_LIMIT:
        raise SizeLimitError(f"state vector limited to {SIMULATION_QUBIT_LIMIT} qubits")
    state = np.zeros(2**circuit.n, dtype=complex)
    state[0] = 1.0
    for gate in circuit.gates:
        state = apply_gate(state, circuit.n, gate)
    return state


def amplitude(circuit: Circuit, x: Sequence[int] | str) -> complex:
    """<x|C|0...0> for a bit string x (qubit 0 first)."""
    if len(x) != circuit.n:
        raise ValueError(f"bit string length {len(x)} does not match width {circuit.n}")
    return complex(simulate_state(circuit)[bits_to_index(x)])


def output_distribution(circuit: Circuit) -> DiscreteDistribution:
    """The full Born-rule table p(x) = |<x|C|0>|^2 over all 2^n strings."""
    if circuit.n > DISTRIBUTION_QUBIT_LIMIT:
        raise SizeLimitError(f"explicit tables limited to {DISTRIBUTION_QUBIT_LIMIT} qubits")
    amps = simulate_state(circuit)
    return DiscreteDistribution(np.abs(amps) ** 2, atol=1e-10)


def hide_instance(circuit: Circuit, y: Sequence[int] | str) -> Circuit:
    """Append X gates at positions where y is 1, relabeling every outcome x to x xor y."""
    if len(y) != circuit.n:
        raise ValueError(f"mask length {len(y)} does not match width {circuit.n}")
    bits = [int(b) for b in y]
    extra = tuple(Gate("X", (q,)) for q, b in enumerate(bits) if b)
    if not extra:
        return circuit
    tag = "".join(str(b) for b in bits)
    return replace(
        circuit,
        gates=circuit.gates + extra,
        instance_id=f"{circuit.instance_id}+X{tag}" if circuit.instance_id else f"+X{tag}",
    )


_PAULI_BLOCKS = {"X": _X, "Y": _Y, "Z": _Z}


def noisy_distribution_trajectories(
    circuit: Circuit, eps: float, n_traj: int, rng: RngStream
) -> DiscreteDistribution:
    """Trajectory-averaged output table under per-qubit depolarizing kicks.

    After every entangling gate (arity >= 2), each touched qubit suffers a
    uniformly random non-identity Pauli with probability eps. eps = 0 returns
    the exact ideal table regardless of n_traj.
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    if circuit.n > TRAJECTORY_QUBIT_LIMIT:
        raise SizeLimitError(f"trajectory averaging limited to {TRAJECTORY_QUBIT_LIMIT} qubits")
    if eps == 0.0:
        return output_distribution(circuit)
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    n = circuit.n
    acc = np.zeros(2**n)
    letters = ("X", "Y", "Z")
    for _ in range(n_traj):
        state = np.zeros(2**n, dtype=complex)
        state[0] = 1.0
        for gate in circuit.gates:
            state = apply_gate(state, n, gate)
            if gate.arity >= 2:
                for q in gate.targets:
                    if rng.random() < eps:
                        kick = letters[int(rng.integers(3))]
                        state = apply_gate(state, n, Gate(kick, (q,)))
        acc += np.abs(state) ** 2
    acc /= acc.sum()
    return DiscreteDistribution(acc, atol=1e-10)


@dataclass(frozen=True)
class PauliString:
    """A signed n-qubit Pauli word, e.g. sign * X(x)I(x)Z."""

    letters: str
    sign: int = 1

    def __post_init__(self):
        if any(c not in "IXYZ" for c in self.letters):
            raise ValueError(f"invalid Pauli letters: {self.letters}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def n(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n != other.n:
            raise ValueError("Pauli strings of different width")
        # i-power bookkeeping; products of commuting strings come out real
        phase_pow = 0
        out = []
        table = {
            ("X", "Y"): (1, "Z"),
            ("Y", "X"): (3, "Z"),
            ("Y", "Z"): (1, "X"),
            ("Z", "Y"): (3, "X"),
            ("Z", "X"): (1, "Y"),
            ("X", "Z"): (3, "Y"),
        }
        for a, b in zip(self.letters, other.letters):
            if a == "I":
                out.append(b)
            elif b == "I" or a == b:
                out.append("I" if a == b else a)
            else:
                p, r = table[(a, b)]
                phase_pow = (phase_pow + p) % 4
                out.append(r)
        if phase_pow % 2:
            raise ValueError("product is not Hermitian (imaginary phase)")
        sign = self.sign * other.sign * (1 if phase_pow == 0 else -1)
        return PauliString("".join(out), sign)


def pauli_expectation(psi: np.ndarray, pauli: PauliString) -> float:
    """<psi|P|psi> for a Hermitian signed Pauli string."""
    n = pauli.n
    if psi.shape != (2**n,):
        raise ValueError(f"state length {psi.shape} does not match Pauli width {n}")
    flip = 0
    ymask = 0
    zmask = 0
    for q, letter in enumerate(pauli.letters):
        if letter in ("X", "Y"):
            flip |= 1 << q
        if letter == "Y":
            ymask |= 1 << q
        if letter == "Z":
            zmask |= 1 << q
    idx = np.arange(psi.size)
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & (ymask | zmask)) & 1).astype(np.float64)
    pref = pauli.sign * (1j) ** int(bin(ymask).count("1"))
    val = pref * np.sum(np.conj(psi[idx ^ flip]) * signs * psi)
    if abs(val.imag) > 1e-9:
        raise ValueError(f"non-real expectation {val}; Pauli string not Hermitian?")
    return float(val.real)


# --------------------------------------------------------------------------
# Circuit generators
# --------------------------------------------------------------------------

SINGLE_QUBIT_POOL = ("SqrtX", "SqrtY", "SqrtW")
ISWAP_STAR_ANGLES = (math.pi / 2, math.pi / 6)


def grid_coupler_patterns(rows: int, cols: int) -> dict[str, list[tuple[int, int]]]:
    """The four period-4 grid pairings: right pairs from even/odd columns, down pairs from even/odd rows."""

    def q(r, c):
        return r * cols + c

    pats: dict[str, list[tuple[int, int]]] = {"A": [], "B": [], "C": [], "D": []}
    for r in range(rows):
        for c in range(cols - 1):
            pats["A" if c % 2 == 0 else "B"].append((q(r, c), q(r, c + 1)))
    for r in range(rows - 1):
        for c in range(cols):
            pats["C" if r % 2 == 0 else "D"].append((q(r, c), q(r + 1, c)))
    return pats


def build_sycamore_circuit(
    rows: int,
    cols: int,
    depth: int,
    rng: RngStream,
    pattern_sequence: Sequence[str] = ("A", "B", "C", "D"),
    instance_id: str = "",
) -> Circuit:
    """Random universal grid circuit: per cycle, fresh single-qubit gates from
    {sqrt(X), sqrt(Y), sqrt(W)} on every qubit (never repeating that qubit's
    previous choice) followed by iSWAP* entanglers on the cycle's coupler
    pattern.
    """
    n = rows * cols
    if n < 2:
        raise ValueError("grid must contain at least 2 qubits")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    patterns = grid_coupler_patterns(rows, cols)
    for key in pattern_sequence:
        if key not in patterns:
            raise ValueError(f"unknown coupler pattern {key!r}")
    gates: list[Gate] = []
    previous = [None] * n
    for cycle in range(depth):
        for q in range(n):
            choice = SINGLE_QUBIT_POOL[int(rng.integers(3))]
            while choice == previous[q]:
                choice = SINGLE_QUBIT_POOL[int(rng.integers(3))]
            previous[q] = choice
            gates.append(Gate(choice, (q,)))
        for a, b in patterns[pattern_sequence[cycle % len(pattern_sequence)]]:
            gates.append(Gate("FSim", (a, b), ISWAP_STAR_ANGLES))
    return Circuit(n, tuple(gates), family="universal", instance_id=instance_id)


def build_haar_brickwork_circuit(n: int, layers: int, rng: RngStream, instance_id: str = "") -> Circuit:
    """Brickwork of Haar-random two-qubit unitaries; a cheap 2-design proxy."""
    from .linalg import haar_unitary

    if n < 2:
        raise ValueError("need at least 2 qubits")
    gates = []
    for layer in range(layers):
        start = layer % 2
        for a in range(start, n - 1, 2):
            gates.append(Gate.unitary(haar_unitary(4, rng), (a, a + 1)))
    return Circuit(n, tuple(gates), family="custom", instance_id=instance_id)


def chain_edges(n: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(n - 1)]


def grid_edges(rows: int, cols: int) -> list[tuple[int, int]]:
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((r * cols + c, r * cols + c + 1))
            if r + 1 < rows:
                edges.append((r * cols + c, (r + 1) * cols + c))
    return edges


def cluster_state_circuit(n: int, edges: Iterable[tuple[int, int]], instance_id: str = "") -> Circuit:
    """Graph/cluster state preparation: H on every qubit, CZ on every edge."""
    gates = [Gate("H", (q,)) for q in range(n)]
    gates += [Gate("CZ", (min(a, b), max(a, b))) for a, b in edges]
    return Circuit(n, tuple(gates), family="custom", instance_id=instance_id)


def cluster_stabilizers(n: int, edges: Iterable[tuple[int, int]]) -> list[PauliString]:
    """S_i = X_i * prod_{j ~ i} Z_j for the graph state on the given edges."""
    neighbors: dict[int, set[int]] = {q: set() for q in range(n)}
    for a, b in edges:
        neighbors[a].add(b)
        neighbors[b].add(a)
    out = []
    for i in range(n):
        letters = ["I"] * n
        letters[i] = "X"
        for j in neighbors[i]:
            letters[j] = "Z"
        out.append(PauliString("".join(letters)))
    return out
