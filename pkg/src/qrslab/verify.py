"""The verification battery for quantum random sampling.

Sample-based estimators (XEB family, cross-entropy difference, heavy and
binned outcome generation), table-based statistics (total-variation
distance, Porter-Thomas moments), boson-sampling discrimination tests
(row-norm estimator, Bayesian likelihood ratio), and quantum-verification
protocols (parent-Hamiltonian fidelity witness, direct fidelity
estimation). Every estimator returns a VerificationReport with a point
estimate, a standard error, and auxiliary values.

Cross-entropy quantities are computed in nats; the Porter-Thomas entropy
identities then read H = n - (1 - gamma) with the leading term counting
qubits and the deficit in nats, and the uniform-sample cross-entropy
difference is exactly 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .circuits import PauliString
from .errors import DataError
from .rng import RngStream
from .samplers import DiscreteDistribution, SampleSet

__all__ = [
    "EULER_GAMMA",
    "VerificationReport",
    "WitnessReport",
    "BogBins",
    "tvd",
    "xeb_linear",
    "xeb_linear_exact",
    "xeb_unbiased",
    "cross_entropy_difference",
    "uniform_deficit_nats",
    "hog_score",
    "bog_distance",
    "bog_distance_exact",
    "porter_thomas_stats",
    "row_norm_estimator",
    "row_norm_discriminate",
    "bayes_discriminate",
    "cluster_witness",
    "direct_fidelity_estimation",
]

EULER_GAMMA = 0.5772156649015329


@dataclass
class VerificationReport:
    """Point estimate, standard error, and decision metadata for one benchmark."""

    metric: str
    estimate: float
    stderr: float
    sample_count: int
    aux: dict = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.estimate):
            raise ValueError(f"estimate must be finite, got {self.estimate}")
        if self.stderr < 0:
            raise ValueError("standard error must be >= 0")

    def to_json(self) -> dict:
        return {
            "metric": self.metric,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "k": self.sample_count,
            "aux": self.aux,
        }


@dataclass
class WitnessReport:
    """A fidelity-witness evaluation, optionally next to the exact fidelity."""

    witness_value: float
    exact_fidelity: float | None = None
    stabilizer_expectations: list = field(default_factory=list)

    def __post_init__(self):
        if self.exact_fidelity is not None and self.witness_value > self.exact_fidelity + 1e-9:
            raise ValueError(
                f"witness {self.witness_value} exceeds fidelity {self.exact_fidelity}"
            )


def _mean_report(metric: str, values: np.ndarray, aux=None) -> VerificationReport:
    values = np.asarray(values, dtype=np.float64)
    k = values.size
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(k)) if k > 1 else 0.0
    return VerificationReport(metric, mean, stderr, k, aux or {})


def _outcomes(samples) -> list:
    if isinstance(samples, SampleSet):
        return samples.outcomes
    out = list(samples)
    if not out:
        raise ValueError("empty sample set")
    return out


def tvd(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Total-variation distance (1/2) sum |p - q| over a shared label set."""
    if not p.same_labels(q):
        raise ValueError("distributions are defined over different label sets")
    return float(0.5 * np.abs(p.probs - q.probs).sum())


def empirical_distribution(samples, reference: DiscreteDistribution) -> DiscreteDistribution:
    """Frequency table of samples over the reference label set."""
    counts = np.zeros(reference.size)
    for x in _outcomes(samples):
        counts[reference.index_of(x)] += 1
    return DiscreteDistribution(counts / counts.sum(), labels=reference._labels, atol=1e-9)


# --------------------------------------------------------------------------
# Cross-entropy family
# --------------------------------------------------------------------------


def xeb_linear(samples, ideal_prob: Callable, n: int) -> VerificationReport:
    """Linear cross-entropy fidelity: mean of 2^n P(x) - 1 over the samples."""
    xs = _outcomes(samples)
    d = float(2**n)
    scores = np.array([d * float(ideal_prob(x)) - 1.0 for x in xs])
    return _mean_report("xeb_linear", scores, {"n": n})


def xeb_linear_exact(q: DiscreteDistribution, p: DiscreteDistribution) -> float:
    """The estimator's expectation sum_x q(x) (N p(x) - 1), straight from tables."""
    if not q.same_labels(p):
        raise ValueError("distributions are defined over different label sets")
    return float(np.dot(q.probs, p.size * p.probs - 1.0))


def xeb_unbiased(samples, ideal_prob: Callable, n: int, ensemble_norm: float) -> VerificationReport:
    """Linear XEB rescaled by a caller-supplied ensemble normalization.

    The normalization is the ensemble estimate of 2^n sum_x E[P(x)^2] - 1,
    making the ideal value 1 even for ensembles with non-design moments.
    """
    if ensemble_norm <= 0:
        raise ValueError(f"ensemble_norm must be positive, got {ensemble_norm}")
    base = xeb_linear(samples, ideal_prob, n)
    return VerificationReport(
        "xeb_unbiased",
        base.estimate / ensemble_norm,
        base.stderr / ensemble_norm,
        base.sample_count,
        {"n": n, "ensemble_norm": ensemble_norm, "raw_xeb": base.estimate},
    )


def cross_entropy_difference(samples, ideal_dist: DiscreteDistribution) -> VerificationReport:
    """d_CE = mean_x log(1/P(x)) - H(P), in nats, with H exact from the table."""
    xs = _outcomes(samples)
    h = ideal_dist.entropy_nats()
    probs = np.array([ideal_dist.prob_of(x) for x in xs])
    if np.any(probs <= 0.0):
        raise DataError("sampled an outcome with zero ideal probability")
    scores = -np.log(probs) - h
    return _mean_report("cross_entropy_difference", scores, {"entropy_nats": h})


def uniform_deficit_nats(dist: DiscreteDistribution) -> float:
    """KL(P || uniform) in nats: how far the table's entropy sits below log N.

    For Haar-random states this deficit converges to 1 - gamma, which is the
    Porter-Thomas entropy identity with the leading term counting qubits.
    """
    return float(math.log(dist.size) - dist.entropy_nats())


# --------------------------------------------------------------------------
# Heavy and binned outcome generation
# --------------------------------------------------------------------------


def hog_score(samples, ideal_prob: Callable, median_value: float) -> VerificationReport:
    """Heavy-outcome score (2/ln 2)(heavy fraction - 1/2).

    Calibrated so exponentially distributed tables give 1 for ideal samples
    and 0 for uniform ones; the raw heavy fraction rides along in aux for
    ensembles where that calibration does not apply.
    """
    xs = _outcomes(samples)
    heavy = np.array([1.0 if float(ideal_prob(x)) >= median_value else 0.0 for x in xs])
    frac = float(heavy.mean())
    frac_err = float(heavy.std(ddof=1) / math.sqrt(heavy.size)) if heavy.size > 1 else 0.0
    scale = 2.0 / math.log(2.0)
    return VerificationReport(
        "hog",
        scale * (frac - 0.5),
        scale * frac_err,
        heavy.size,
        {"heavy_fraction": frac, "heavy_fraction_stderr": frac_err, "median": median_value},
    )


@dataclass(frozen=True)
class BogBins:
    """Probability bins equifilled under the exponential law p ~ N e^{-N p}.

    Boundaries are the closed form p_i = -ln(1 - i/m) / N with p_0 = 0 and
    p_m capped at 1.
    """

    n: int
    m_bins: int

    @property
    def domain_size(self) -> int:
        return 2**self.n

    @property
    def boundaries(self) -> np.ndarray:
        m = self.m_bins
        i = np.arange(1, m, dtype=np.float64)
        inner = -np.log1p(-i / m) / self.domain_size
        return np.concatenate([[0.0], inner, [1.0]])

    def equifill_defect(self) -> float:
        """Max deviation of the exponential mass per bin from 1/m."""
        d = self.domain_size
        cdf = 1.0 - np.exp(-d * self.boundaries)
        mass = np.diff(cdf)
        mass[-1] += math.exp(-d)  # cap at 1 truncates the tail
        return float(np.max(np.abs(mass - 1.0 / self.m_bins)))

    def bin_of(self, p: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.boundaries, p, side="right") - 1
        return np.clip(idx, 0, self.m_bins - 1)


def bog_distance(samples, ideal_prob: Callable, bins: BogBins) -> VerificationReport:
    """Binned-outcome distance: (1/2) sum_bins |empirical frequency - 1/m|.

    The reference fill 1/m is exact only for exponentially distributed
    tables; aux carries the per-bin counts so a table-specific reference
    (see `bog_distance_exact`) can be compared.
    """
    xs = _outcomes(samples)
    probs = np.array([float(ideal_prob(x)) for x in xs])
    which = bins.bin_of(probs)
    counts = np.bincount(which, minlength=bins.m_bins)
    freqs = counts / counts.sum()
    d = float(0.5 * np.abs(freqs - 1.0 / bins.m_bins).sum())
    return VerificationReport(
        "bog",
        d,
        0.0,
        len(xs),
        {"bin_counts": [int(c) for c in counts], "m_bins": bins.m_bins},
    )


def bog_distance_exact(q: DiscreteDistribution, p: DiscreteDistribution, bins: BogBins) -> float:
    """Analytic binned distance between a sampling law q and the equifill reference,
    binning outcomes by their ideal probability p."""
    if not q.same_labels(p):
        raise ValueError("distributions are defined over different label sets")
    which = bins.bin_of(p.probs)
    mass = np.bincount(which, weights=q.probs, minlength=bins.m_bins)
    return float(0.5 * np.abs(mass - 1.0 / bins.m_bins).sum())


# --------------------------------------------------------------------------
# Porter-Thomas statistics and anticoncentration
# --------------------------------------------------------------------------

ANTICONCENTRATION_ALPHAS = (0.25, 0.5, 1.0, 2.0)


def porter_thomas_stats(dist: DiscreteDistribution) -> VerificationReport:
    """Shape statistics of an explicit table against the exponential law.

    Reports the scaled second moment N sum p^2 (the collision probability
    times the domain size), and the fraction of outcome probabilities at or
    above alpha/N for alpha in {1/4, 1/2, 1, 2}.
    """
    n = dist.size
    collision = dist.collision_probability()
    fractions = {
        alpha: float(np.mean(dist.probs >= alpha / n)) for alpha in ANTICONCENTRATION_ALPHAS
    }
    return VerificationReport(
        "porter_thomas",
        n * collision,
        0.0,
        n,
        {
            "collision_probability": collision,
            "fractions": {str(a): f for a, f in fractions.items()},
            "entropy_nats": dist.entropy_nats(),
            "uniform_deficit_nats": uniform_deficit_nats(dist),
        },
    )


# --------------------------------------------------------------------------
# Boson-sampling discrimination
# --------------------------------------------------------------------------


def row_norm_estimator(x: np.ndarray) -> float:
    """R*(X) = n^{-n} prod_i ||row_i||^2; expectation 1 for unit-variance Gaussian X."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[0]
    norms = np.sum(np.abs(x) ** 2, axis=1)
    return float(np.prod(norms) / n**n)


def _collision_free_rows(s) -> list[int] | None:
    rows = []
    for j, cnt in enumerate(s):
        if cnt > 1:
            return None
        if cnt == 1:
            rows.append(j)
    return rows


def row_norm_discriminate(samples, u: np.ndarray, control_cap: int = 500_000) -> VerificationReport:
    """Row-norm discrimination of boson samples against uniform outcomes.

    For each collision-free sample, R* is evaluated on sqrt(m) U_{S,1_n} (the
    scaling that makes the submatrix approximately unit-variance Gaussian).
    The same statistics are computed for the uniform law over collision-free
    outcomes, exactly, by enumerating all C(m, n) patterns. The estimate is
    the gap in mean |R* - 1| between the samples and the uniform reference;
    aux carries the Pr[R* >= 1] fractions on both sides.
    """
    u = np.asarray(u, dtype=complex)
    m = u.shape[0]
    xs = _outcomes(samples)
    scaled = None
    devs = []
    heavies = []
    skipped = 0
    n = None
    for s in xs:
        rows = _collision_free_rows(s)
        if rows is None:
            skipped += 1
            continue
        if n is None:
            n = len(rows)
            scaled = m * np.abs(u[:, :n]) ** 2  # per-entry |.|^2 of sqrt(m) U
        r = float(np.prod(scaled[rows].sum(axis=1)) / n**n)
        devs.append(abs(r - 1.0))
        heavies.append(1.0 if r >= 1.0 else 0.0)
    if not devs:
        raise DataError("no collision-free samples to evaluate")
    devs = np.asarray(devs)
    heavies = np.asarray(heavies)

    if math.comb(m, n) > control_cap:
        raise DataError(f"uniform control enumeration over C({m},{n}) exceeds cap")
    row_norms = scaled.sum(axis=1) / n  # contribution of each mode's row
    ctrl_dev = 0.0
    ctrl_heavy = 0.0
    count = 0
    for combo in itertools.combinations(range(m), n):
        r = float(np.prod(row_norms[list(combo)]))
        ctrl_dev += abs(r - 1.0)
        ctrl_heavy += 1.0 if r >= 1.0 else 0.0
        count += 1
    ctrl_dev /= count
    ctrl_heavy /= count

    sample_heavy = float(heavies.mean())
    dev_err = float(devs.std(ddof=1) / math.sqrt(devs.size)) if devs.size > 1 else 0.0
    gap = float(devs.mean()) - ctrl_dev
    return VerificationReport(
        "row_norm",
        gap,
        dev_err,
        int(devs.size),
        {
            "mean_abs_dev": float(devs.mean()),
            "control_mean_abs_dev": ctrl_dev,
            "heavy_fraction": sample_heavy,
            "control_heavy_fraction": ctrl_heavy,
            "heavy_fraction_gap": sample_heavy - ctrl_heavy,
            "skipped_collisions": skipped,
            "photons": n,
        },
    )


def bayes_discriminate(samples, prob_p0: Callable, prob_q: Callable) -> VerificationReport:
    """Bayesian likelihood-ratio confidence for hypothesis P0 against Q.

    Works in log space; c = Pr(samples | P0) / (Pr | P0 + Pr | Q) > 1/2
    favours P0.
    """
    xs = _outcomes(samples)
    log_diff = 0.0
    for x in xs:
        p0 = float(prob_p0(x))
        q = float(prob_q(x))
        if p0 <= 0.0 and q <= 0.0:
            raise DataError(f"outcome {x!r} has zero probability under both hypotheses")
        if p0 <= 0.0:
            log_diff = -math.inf
        elif q <= 0.0:
            log_diff = math.inf
        else:
            log_diff += math.log(p0) - math.log(q)
    if log_diff == math.inf:
        c = 1.0
    elif log_diff == -math.inf:
        c = 0.0
    else:
        c = 1.0 / (1.0 + math.exp(-log_diff))
    return VerificationReport(
        "bayes", c, 0.0, len(xs), {"log_likelihood_difference": log_diff}
    )


# --------------------------------------------------------------------------
# Fidelity witnessing and direct fidelity estimation
# --------------------------------------------------------------------------


def cluster_witness(expectations: Sequence[float], n_qubits: int) -> WitnessReport:
    """Parent-Hamiltonian fidelity witness for an N-qubit stabilizer state.

    With H = -sum_i S_i, ground energy -N and gap 2, the witness value is
    1 - (N - sum <S_i>) / 2: equal to 1 iff every expectation is 1, and a
    lower bound on the fidelity for any state.
    """
    expectations = [float(e) for e in expectations]
    if len(expectations) != n_qubits:
        raise ValueError(f"expected {n_qubits} stabilizer expectations, got {len(expectations)}")
    for e in expectations:
        if not -1.0 - 1e-9 <= e <= 1.0 + 1e-9:
            raise DataError(f"stabilizer expectation {e} outside [-1, 1]")
    value = 1.0 - (n_qubits - sum(expectations)) / 2.0
    return WitnessReport(value, None, expectations)


def direct_fidelity_estimation(
    target_stabilizers: Sequence[PauliString],
    outcome_oracle: Callable[[PauliString], float],
    k: int,
    rng: RngStream,
) -> VerificationReport:
    """Stabilizer direct fidelity estimation.

    The target is 2^-n sum over its stabilizer group; sampling uniform
    subset products of the generators and averaging the measured +-1
    outcomes estimates the fidelity with standard error ~ 1/sqrt(k).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    gens = list(target_stabilizers)
    if not gens:
        raise ValueError("need at least one stabilizer generator")
    n = gens[0].n
    outcomes = np.empty(k)
    for trial in range(k):
        subset = rng.integers(0, 2, size=len(gens))
        element = PauliString("I" * n)
        for g, bit in zip(gens, subset):
            if bit:
                element = element * g
        val = float(outcome_oracle(element))
        if val not in (-1.0, 1.0):
            raise DataError(f"oracle must return +-1, got {val}")
        outcomes[trial] = val
    return _mean_report("direct_fidelity", outcomes, {"generators": len(gens)})
