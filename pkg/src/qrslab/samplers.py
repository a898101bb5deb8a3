"""Explicit distributions and generic sampling strategies.

Samplers come in four flavours: exact inverse-CDF over a stored table,
rejection from an oracle, frugal (tail-clipping) rejection, and Metropolis
MCMC. A heavy-outcome spoofing baseline and the white-noise mixture round
out the toolbox. Every sampler takes an explicit RngStream and returns a
SampleSet carrying provenance.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DataError
from .rng import RngStream

__all__ = [
    "DiscreteDistribution",
    "SampleSet",
    "bits_to_index",
    "index_to_bits",
    "sample_exact",
    "sample_rejection",
    "sample_frugal",
    "sample_metropolis",
    "spoof_heavy",
    "mix_with_uniform",
    "clipped_distribution",
    "frugal_tvd_formula",
    "bitflip_proposal",
    "photon_move_proposal",
]


def bits_to_index(bits) -> int:
    """Little-endian bits (qubit 0 first) to a basis index."""
    if isinstance(bits, str):
        bits = [int(b) for b in bits]
    idx = 0
    for q, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError("bits must be 0/1")
        idx |= b << q
    return idx


def index_to_bits(idx: int, n: int) -> str:
    return "".join(str((idx >> q) & 1) for q in range(n))


class DiscreteDistribution:
    """An explicit probability table over a labeled finite sample space.

    Labels default to the integers 0..N-1 (the bit-string basis indices);
    boson-sampling tables label outcomes with photon-count tuples. The raw
    table must sum to 1 within `atol`; it is then renormalized exactly so
    downstream identities hold to machine precision. `raw_sum` keeps the
    pre-normalization mass for normalization checks.
    """

    def __init__(self, probs, labels=None, atol: float = 1e-8):
        probs = np.asarray(probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probs must be a non-empty 1-D array")
        if np.any(probs < -1e-12):
            raise ValueError(f"negative probability: {probs.min()}")
        probs = np.clip(probs, 0.0, None)
        self.raw_sum = float(probs.sum())
        if abs(self.raw_sum - 1.0) > atol:
            raise ValueError(f"probabilities sum to {self.raw_sum}, not 1 within {atol}")
        self.probs = probs / self.raw_sum
        self._labels = None if labels is None else list(labels)
        if self._labels is not None and len(self._labels) != probs.size:
            raise ValueError("labels length does not match probs")
        self._index = None
        self._cum = None

    @property
    def size(self) -> int:
        return self.probs.size

    @property
    def labels(self) -> list:
        if self._labels is None:
            return list(range(self.size))
        return self._labels

    def label(self, i: int):
        return i if self._labels is None else self._labels[i]

    def index_of(self, label) -> int:
        if self._labels is None:
            i = int(label)
            if not 0 <= i < self.size:
                raise KeyError(label)
            return i
        if self._index is None:
            self._index = {lab: i for i, lab in enumerate(self._labels)}
        return self._index[label]

    def prob_of(self, label) -> float:
        return float(self.probs[self.index_of(label)])

    @property
    def cumulative(self) -> np.ndarray:
        if self._cum is None:
            self._cum = np.cumsum(self.probs)
            self._cum[-1] = 1.0
        return self._cum

    def same_labels(self, other: "DiscreteDistribution") -> bool:
        if self.size != other.size:
            return False
        if self._labels is None and other._labels is None:
            return True
        return self.labels == other.labels

    def heavy_median(self) -> float:
        """Largest t such that at least half the outcomes satisfy p(x) >= t.

        This is the median of the table's probability values (ties included),
        so uniform samples land above it with frequency 1/2 and the heavy
        fraction of a uniform table is 1.
        """
        sorted_desc = np.sort(self.probs)[::-1]
        return float(sorted_desc[(self.size + 1) // 2 - 1])

    def entropy_nats(self) -> float:
        p = self.probs[self.probs > 0]
        return float(-np.sum(p * np.log(p)))

    def collision_probability(self) -> float:
        return float(np.sum(self.probs**2))

    def __repr__(self):
        return f"DiscreteDistribution(size={self.size})"


@dataclass
class SampleSet:
    """A tagged batch of outcomes plus provenance."""

    outcomes: list
    instance_id: str = ""
    sampler: str = ""
    seed: int | None = None
    wall_time: float = 0.0  # not serialized; reruns must be byte-identical
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.outcomes:
            raise ValueError("a SampleSet must contain at least one outcome")

    def __len__(self):
        return len(self.outcomes)

    def __iter__(self):
        return iter(self.outcomes)

    def header(self) -> dict:
        head = {
            "instance_id": self.instance_id,
            "sampler": self.sampler,
            "seed": self.seed,
            "k": len(self.outcomes),
        }
        if self.meta:
            head["meta"] = self.meta
        return head

    def to_jsonl(self) -> str:
        """One header record plus one outcome per line.

        Photon-count tuples serialize as JSON integer arrays; basis indices
        serialize as 0/1 text (qubit 0 first) when meta carries n_bits.
        """
        n_bits = self.meta.get("n_bits")
        lines = [json.dumps(self.header(), sort_keys=True, separators=(",", ":"))]
        for x in self.outcomes:
            if isinstance(x, tuple):
                lines.append(json.dumps(list(x), separators=(",", ":")))
            elif isinstance(x, (int, np.integer)):
                if n_bits is not None:
                    lines.append(json.dumps(index_to_bits(int(x), n_bits)))
                else:
                    lines.append(json.dumps(int(x)))
            else:
                lines.append(json.dumps(x, separators=(",", ":")))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_jsonl(text: str) -> "SampleSet":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = json.loads(lines[0])
        meta = head.get("meta", {})
        n_bits = meta.get("n_bits")
        outcomes = []
        for ln in lines[1:]:
            val = json.loads(ln)
            if isinstance(val, list):
                outcomes.append(tuple(val))
            elif isinstance(val, str) and n_bits is not None:
                outcomes.append(bits_to_index(val))
            else:
                outcomes.append(val)
        return SampleSet(
            outcomes,
            instance_id=head.get("instance_id", ""),
            sampler=head.get("sampler", ""),
            seed=head.get("seed"),
            meta=meta,
        )


def _finish(outcomes, sampler, rng: RngStream, instance_id: str, t0: float, meta=None) -> SampleSet:
    return SampleSet(
        outcomes,
        instance_id=instance_id,
        sampler=sampler,
        seed=rng.seed,
        wall_time=time.perf_counter() - t0,
        meta=meta or {},
    )


def sample_exact(dist: DiscreteDistribution, k: int, rng: RngStream, instance_id: str = "") -> SampleSet:
    """k i.i.d. draws by binary search over the cumulative table."""
    if k < 1:
        raise ValueError("k must be >= 1")
    t0 = time.perf_counter()
    idx = np.searchsorted(dist.cumulative, rng.random(k), side="right")
    idx = np.minimum(idx, dist.size - 1)
    if dist._labels is None:
        outcomes = [int(i) for i in idx]
    else:
        outcomes = [dist._labels[i] for i in idx]
    return _finish(outcomes, "exact", rng, instance_id, t0)


def _check_oracle_value(p: float) -> float:
    if p < 0.0 or p > 1.0 or not math.isfinite(p):
        raise DataError(f"oracle returned an invalid probability: {p}")
    return p


def _capped_rejection(prob_oracle, domain_size, c, k, rng, name, instance_id):
    """Propose uniformly, accept while u * c / N <= p(x).

    Exact when c/N dominates every probability; otherwise outcomes with
    p > c/N are accepted with certainty, which samples the clipped law.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    if k < 1:
        raise ValueError("k must be >= 1")
    t0 = time.perf_counter()
    tau = c / domain_size
    outcomes: list[int] = []
    proposals = 0
    batch = max(64, int(1.5 * k))
    while len(outcomes) < k:
        xs = rng.integers(0, domain_size, size=batch)
        us = rng.random(batch)
        for x, u in zip(xs, us):
            proposals += 1
            p = _check_oracle_value(float(prob_oracle(int(x))))
            if u * tau <= p:
                outcomes.append(int(x))
                if len(outcomes) == k:
                    break
    meta = {
        "acceptance_rate": k / proposals,
        "oracle_calls": proposals,
        "oracle_calls_per_sample": proposals / k,
        "c": c,
    }
    return _finish(outcomes, name, rng, instance_id, t0, meta)


def sample_rejection(
    prob_oracle: Callable[[int], float],
    domain_size: int,
    c: float,
    k: int,
    rng: RngStream,
    instance_id: str = "",
) -> SampleSet:
    """Rejection sampling with a uniform proposal scaled by c.

    Exactness requires c / domain_size >= max p(x) (caller's responsibility);
    the expected number of probability evaluations per sample is c.
    """
    if c < 1:
        raise ValueError("c must be >= 1 for a valid proposal bound")
    return _capped_rejection(prob_oracle, domain_size, c, k, rng, "rejection", instance_id)


def sample_frugal(
    prob_oracle: Callable[[int], float],
    domain_size: int,
    c: float,
    k: int,
    rng: RngStream,
    instance_id: str = "",
) -> SampleSet:
    """Frugal rejection: probabilities above c/N are clipped, never rejected.

    Samples the clipped law min(p, c/N)/Z; use `clipped_distribution` for the
    analytic law and its distance to the target.
    """
    return _capped_rejection(prob_oracle, domain_size, c, k, rng, "frugal", instance_id)


def clipped_distribution(dist: DiscreteDistribution, c: float) -> DiscreteDistribution:
    """The law actually sampled by frugal rejection at bound c."""
    if c <= 0:
        raise ValueError("c must be positive")
    tau = c / dist.size
    clipped = np.minimum(dist.probs, tau)
    z = clipped.sum()
    return DiscreteDistribution(clipped / z, labels=dist._labels, atol=1e-9)


def frugal_tvd_formula(c: float) -> float:
    """Tail-clipping error for exponentially distributed probabilities (L1 convention)."""
    return 2.0 * math.exp(-c / (1.0 - math.exp(-c)))


def sample_metropolis(
    prob_ratio_oracle: Callable[[object, object], float],
    proposal: Callable[[object, RngStream], object],
    burn_in: int,
    thinning: int,
    k: int,
    rng: RngStream,
    initial,
    instance_id: str = "",
) -> SampleSet:
    """Metropolis chain with a symmetric proposal; keeps every thinning-th state.

    The acceptance rule min{p(x')/p(x), 1} only ever queries the ratio, so
    unnormalized tables work. No mixing guarantee: validate with TVD tests.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if thinning < 1:
        raise ValueError("thinning must be >= 1")
    t0 = time.perf_counter()
    x = initial
    accepted = 0
    steps = 0
    outcomes = []

    def step(x):
        nonlocal accepted, steps
        steps += 1
        x_new = proposal(x, rng)
        if x_new == x:
            return x
        ratio = float(prob_ratio_oracle(x, x_new))
        if not math.isfinite(ratio) or ratio < 0:
            raise DataError(f"invalid probability ratio {ratio}")
        if ratio >= 1.0 or rng.random() < ratio:
            accepted += 1
            return x_new
        return x

    for _ in range(burn_in):
        x = step(x)
    for _ in range(k):
        for _ in range(thinning):
            x = step(x)
        outcomes.append(x)
    meta = {"acceptance_rate": accepted / steps, "burn_in": burn_in, "thinning": thinning}
    return _finish(outcomes, "metropolis", rng, instance_id, t0, meta)


def spoof_heavy(dist: DiscreteDistribution, k: int, rng: RngStream, instance_id: str = "") -> SampleSet:
    """i.i.d. draws from the renormalized above-median restriction of `dist`.

    The support is every outcome with p(x) >= median (ties included), the
    deterministic heavy-outcome spoofing baseline.
    """
    median = dist.heavy_median()
    mask = dist.probs >= median
    probs = np.where(mask, dist.probs, 0.0)
    restricted = DiscreteDistribution(probs / probs.sum(), labels=dist._labels, atol=1e-9)
    out = sample_exact(restricted, k, rng, instance_id)
    out.sampler = "spoof_heavy"
    out.meta["median"] = median
    out.meta["support_fraction"] = float(mask.mean())
    return out


def spoofed_law(dist: DiscreteDistribution) -> DiscreteDistribution:
    """The exact law spoof_heavy samples from."""
    median = dist.heavy_median()
    probs = np.where(dist.probs >= median, dist.probs, 0.0)
    return DiscreteDistribution(probs / probs.sum(), labels=dist._labels, atol=1e-9)


def mix_with_uniform(dist: DiscreteDistribution, lam: float) -> DiscreteDistribution:
    """The white-noise mixture (1 - lambda) p + lambda / N."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    probs = (1.0 - lam) * dist.probs + lam / dist.size
    return DiscreteDistribution(probs, labels=dist._labels, atol=1e-9)


def bitflip_proposal(n: int) -> Callable[[int, RngStream], int]:
    """Symmetric single-bit-flip proposal on n-bit basis indices."""

    def propose(x: int, rng: RngStream) -> int:
        return x ^ (1 << int(rng.integers(n)))

    return propose


def photon_move_proposal(m: int) -> Callable[[tuple, RngStream], tuple]:
    """Move one photon between a uniformly random ordered mode pair.

    Choosing the ordered pair first keeps the proposal symmetric; if the
    source mode is empty the chain stays put.
    """

    def propose(s: tuple, rng: RngStream) -> tuple:
        i = int(rng.integers(m))
        j = int(rng.integers(m - 1))
        if j >= i:
            j += 1
        if s[i] == 0:
            return s
        out = list(s)
        out[i] -= 1
        out[j] += 1
        return tuple(out)

    return propose
