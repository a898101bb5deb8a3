"""Configuration-driven campaign runner.

Subcommands:

* ``generate``: build a random instance (circuit / interferometer) from a
  JSON config, deterministically under the config seed.
* ``sample``: draw samples from the instance, applying configured noise.
* ``verify``: score the samples with the configured verifiers and compare
  against thresholds.
* ``oracle``: regenerate a named brute-force fixture with a content hash.
* ``report``: render a reports file as a text table.

Exit codes: 0 success, 1 verification threshold failed, 2 usage/config
error, 3 missing artifact. Config errors emit a machine-readable JSON line
on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import boson, circuits, iqp, linalg, matrixpoly, samplers, verify
from .errors import DataError, SizeLimitError
from .rng import RngStream

__all__ = ["main", "config_hash", "canonical_json"]

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_CONFIG = 2
EXIT_MISSING = 3

GBS_DEFAULT_CUTOFF = 4


class ConfigError(ValueError):
    pass


class MissingArtifact(FileNotFoundError):
    pass


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


def _load_json(path: Path, kind: str) -> dict:
    if not path.exists():
        raise MissingArtifact(f"{kind} not found: {path}")
    with open(path) as fh:
        return json.load(fh)


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(canonical_json(obj))
        fh.write("\n")


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def load_config(path: str, seed_override=None) -> dict:
    cfg = _load_json(Path(path), "config")
    _require(isinstance(cfg, dict), "config must be a JSON object")
    if seed_override is not None:
        cfg["seed"] = int(seed_override)
    _require("seed" in cfg, "config must carry a seed")
    _require(cfg.get("scheme") in {"universal", "iqp_poly", "iqp_weights", "fock_bs", "gaussian_bs"},
             f"unknown scheme {cfg.get('scheme')!r}")
    _require(isinstance(cfg.get("size"), dict), "config must carry a size object")
    return cfg


# --------------------------------------------------------------------------
# generate
# --------------------------------------------------------------------------


def build_instance(cfg: dict) -> dict:
    scheme = cfg["scheme"]
    size = cfg["size"]
    rng = RngStream(int(cfg["seed"]))
    instance_id = config_hash(cfg)[:12]
    if scheme == "universal":
        for key in ("rows", "cols", "depth"):
            _require(key in size, f"universal scheme needs size.{key}")
        circ = circuits.build_sycamore_circuit(
            int(size["rows"]), int(size["cols"]), int(size["depth"]), rng, instance_id=instance_id
        )
        _require(circ.n <= circuits.DISTRIBUTION_QUBIT_LIMIT, "grid too large for explicit tables")
        return {"scheme": scheme, "instance_id": instance_id, "circuit": circ.to_json()}
    if scheme == "iqp_poly":
        _require("n" in size, "iqp_poly scheme needs size.n")
        f = iqp.random_iqp_polynomial(int(size["n"]), rng, float(size.get("density", 0.5)))
        circ = iqp.build_iqp_poly_circuit(f, instance_id=instance_id)
        return {
            "scheme": scheme,
            "instance_id": instance_id,
            "circuit": circ.to_json(),
            "polynomial": {
                "n": f.n,
                "cubic": sorted(map(list, f.cubic)),
                "quadratic": sorted(map(list, f.quadratic)),
                "linear": sorted(f.linear),
            },
        }
    if scheme == "iqp_weights":
        _require("n" in size, "iqp_weights scheme needs size.n")
        w = iqp.random_iqp_weights(int(size["n"]), rng)
        circ = iqp.build_iqp_weight_circuit(w, instance_id=instance_id)
        return {
            "scheme": scheme,
            "instance_id": instance_id,
            "circuit": circ.to_json(),
            "weights": [[float(x) for x in row] for row in w.w],
        }
    if scheme == "fock_bs":
        _require("m" in size and "n" in size, "fock_bs scheme needs size.m and size.n")
        m, n = int(size["m"]), int(size["n"])
        _require(1 <= n <= min(m, boson.ANCESTRAL_PHOTON_LIMIT), "photon number out of range")
        u = linalg.haar_unitary(m, rng)
        return {
            "scheme": scheme,
            "instance_id": instance_id,
            "unitary": linalg.matrix_to_json(u),
            "photons": n,
        }
    # gaussian_bs
    _require("m" in size, "gaussian_bs scheme needs size.m")
    m = int(size["m"])
    if "r" in size and isinstance(size["r"], list):
        r = [float(x) for x in size["r"]]
        _require(len(r) == m, "squeezing list length must equal m")
    else:
        k = int(size.get("squeezed_modes", m))
        _require(0 <= k <= m, "squeezed_modes out of range")
        r = [float(size.get("r", 0.3))] * k + [0.0] * (m - k)
    u = linalg.haar_unitary(m, rng)
    state = boson.gbs_state_from_smss(u, np.asarray(r))
    return {
        "scheme": scheme,
        "instance_id": instance_id,
        "unitary": linalg.matrix_to_json(u),
        "squeezing": r,
        "sigma": linalg.matrix_to_json(state.sigma),
        "cutoff": int(size.get("cutoff", GBS_DEFAULT_CUTOFF)),
    }


def cmd_generate(cfg: dict, out: Path) -> int:
    instance = build_instance(cfg)
    _write_json(out / "instance.json", instance)
    print(f"wrote {out / 'instance.json'} (instance {instance['instance_id']})")
    return EXIT_OK


# --------------------------------------------------------------------------
# sample
# --------------------------------------------------------------------------


def _qubit_table(cfg: dict, instance: dict, rng: RngStream) -> samplers.DiscreteDistribution:
    circ = circuits.Circuit.from_json(instance["circuit"])
    noise = cfg.get("noise", {"kind": "none"})
    kind = noise.get("kind", "none")
    if kind == "none":
        return circuits.output_distribution(circ)
    if kind == "white":
        lam = float(noise["lambda"])
        return samplers.mix_with_uniform(circuits.output_distribution(circ), lam)
    if kind == "pauli":
        return circuits.noisy_distribution_trajectories(
            circ, float(noise["eps"]), int(noise.get("n_traj", 200)), rng
        )
    raise ConfigError(f"unknown noise kind {kind!r}")


def build_sampling_table(cfg: dict, instance: dict, rng: RngStream):
    """The explicit table a table-based sampler draws from, plus metadata."""
    scheme = instance["scheme"]
    if scheme in ("universal", "iqp_poly", "iqp_weights"):
        return _qubit_table(cfg, instance, rng), {}
    if scheme == "fock_bs":
        u = linalg.matrix_from_json(instance["unitary"])
        _require(cfg.get("noise", {"kind": "none"}).get("kind", "none") == "none",
                 "noise models are defined for qubit schemes only")
        return boson.bs_distribution(u, int(instance["photons"])), {}
    # gaussian_bs: truncated table, renormalized; the truncated mass is reported
    u = linalg.matrix_from_json(instance["unitary"])
    state = boson.gbs_state_from_smss(u, np.asarray(instance["squeezing"]))
    cutoff = int(instance.get("cutoff", GBS_DEFAULT_CUTOFF))
    labels, probs = [], []
    for n in range(0, cutoff + 1, 2):
        for s in boson.fock_space(state.m, n):
            labels.append(s)
            probs.append(boson.gbs_probability_hafnian_M(state, s))
    probs = np.asarray(probs)
    mass = float(probs.sum())
    dist = samplers.DiscreteDistribution(probs / mass, labels=labels, atol=1e-9)
    return dist, {"truncated_mass": mass, "cutoff": cutoff}


def draw_samples(cfg: dict, instance: dict) -> samplers.SampleSet:
    sampler_cfg = dict(cfg.get("sampler", {"name": "exact"}))
    name = sampler_cfg.pop("name", "exact")
    k = int(cfg.get("k", 1000))
    rng = RngStream(int(cfg["seed"])).child()
    instance_id = instance["instance_id"]

    if name == "ancestral":
        _require(instance["scheme"] == "fock_bs", "ancestral sampling applies to fock_bs only")
        u = linalg.matrix_from_json(instance["unitary"])
        return boson.bs_sample_ancestral(u, int(instance["photons"]), k, rng, instance_id=instance_id)

    dist, meta = build_sampling_table(cfg, instance, rng)
    if name == "exact":
        out = samplers.sample_exact(dist, k, rng, instance_id=instance_id)
    elif name in ("rejection", "frugal"):
        c = float(sampler_cfg.get("c", math.log(dist.size / 1e-3)))
        oracle = lambda i: float(dist.probs[i])  # noqa: E731
        fn = samplers.sample_rejection if name == "rejection" else samplers.sample_frugal
        out = fn(oracle, dist.size, c, k, rng, instance_id=instance_id)
        out.outcomes = [dist.label(i) for i in out.outcomes]
    elif name == "metropolis":
        burn_in = int(sampler_cfg.get("burn_in", 1000))
        thinning = int(sampler_cfg.get("thinning", 10))
        if instance["scheme"] == "fock_bs":
            proposal = samplers.photon_move_proposal(len(dist.labels[0]))
        else:
            proposal = samplers.bitflip_proposal(int(instance["circuit"]["n"]))
        ratio = lambda x, y: dist.prob_of(y) / max(dist.prob_of(x), 1e-300)  # noqa: E731
        initial = dist.label(int(np.argmax(dist.probs)))
        out = samplers.sample_metropolis(
            ratio, proposal, burn_in, thinning, k, rng, initial, instance_id=instance_id
        )
    elif name == "spoof":
        out = samplers.spoof_heavy(dist, k, rng, instance_id=instance_id)
    else:
        raise ConfigError(f"unknown sampler {name!r}")
    out.meta.update(meta)
    if instance["scheme"] in ("universal", "iqp_poly", "iqp_weights"):
        out.meta["n_bits"] = int(instance["circuit"]["n"])  # 0/1-text serialization
    return out


def cmd_sample(cfg: dict, out: Path) -> int:
    instance = _load_json(out / "instance.json", "instance")
    sample_set = draw_samples(cfg, instance)
    path = out / "samples.jsonl"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(sample_set.to_jsonl())
    print(f"wrote {path} ({len(sample_set)} samples via {sample_set.sampler})")
    return EXIT_OK


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------

QUBIT_VERIFIERS = {"xeb_linear", "xeb_unbiased", "cross_entropy", "hog", "bog", "porter_thomas",
                   "tvd_empirical", "bayes_uniform"}
FOCK_VERIFIERS = {"row_norm", "tvd_empirical", "bayes_uniform", "porter_thomas", "hog"}


def run_verifier(vcfg: dict, instance: dict, sample_set, table) -> verify.VerificationReport:
    name = vcfg.get("name")
    scheme = instance["scheme"]
    is_qubit = scheme in ("universal", "iqp_poly", "iqp_weights")
    allowed = QUBIT_VERIFIERS if is_qubit else FOCK_VERIFIERS
    _require(name in allowed, f"verifier {name!r} does not apply to scheme {scheme!r}")
    n = int(instance["circuit"]["n"]) if is_qubit else None
    if name == "xeb_linear":
        return verify.xeb_linear(sample_set, table.prob_of, n)
    if name == "xeb_unbiased":
        return verify.xeb_unbiased(sample_set, table.prob_of, n, float(vcfg["ensemble_norm"]))
    if name == "cross_entropy":
        return verify.cross_entropy_difference(sample_set, table)
    if name == "hog":
        return verify.hog_score(sample_set, table.prob_of, table.heavy_median())
    if name == "bog":
        bins = verify.BogBins(n, int(vcfg.get("m_bins", 16)))
        return verify.bog_distance(sample_set, table.prob_of, bins)
    if name == "porter_thomas":
        return verify.porter_thomas_stats(table)
    if name == "tvd_empirical":
        emp = verify.empirical_distribution(sample_set, table)
        return verify.VerificationReport("tvd_empirical", verify.tvd(emp, table), 0.0, len(sample_set))
    if name == "bayes_uniform":
        uniform = 1.0 / table.size
        return verify.bayes_discriminate(sample_set, table.prob_of, lambda x: uniform)
    if name == "row_norm":
        u = linalg.matrix_from_json(instance["unitary"])
        return verify.row_norm_discriminate(sample_set, u)
    raise ConfigError(f"unknown verifier {name!r}")


def _threshold_ok(report: verify.VerificationReport, vcfg: dict) -> bool:
    ok = True
    if "min" in vcfg:
        ok = ok and report.estimate >= float(vcfg["min"])
    if "max" in vcfg:
        ok = ok and report.estimate <= float(vcfg["max"])
    return ok


def cmd_verify(cfg: dict, out: Path) -> int:
    instance = _load_json(out / "instance.json", "instance")
    samples_path = out / "samples.jsonl"
    if not samples_path.exists():
        raise MissingArtifact(f"samples not found: {samples_path}")
    sample_set = samplers.SampleSet.from_jsonl(samples_path.read_text())
    rng = RngStream(int(cfg["seed"])).child()
    table, _ = build_sampling_table({**cfg, "noise": {"kind": "none"}}, instance, rng)

    reports = []
    all_ok = True
    for vcfg in cfg.get("verifiers", []):
        report = run_verifier(vcfg, instance, sample_set, table)
        ok = _threshold_ok(report, vcfg)
        all_ok = all_ok and ok
        entry = report.to_json()
        entry["passed"] = ok
        for key in ("min", "max"):
            if key in vcfg:
                entry[key] = float(vcfg[key])
        reports.append(entry)
    _write_json(out / "reports.json", reports)

    record = {
        "config_hash": config_hash(cfg),
        "instance_id": instance["instance_id"],
        "artifacts": {
            "instance": hashlib.sha256((out / "instance.json").read_bytes()).hexdigest(),
            "samples": hashlib.sha256(samples_path.read_bytes()).hexdigest(),
            "reports": hashlib.sha256((out / "reports.json").read_bytes()).hexdigest(),
        },
    }
    record["content_hash"] = hashlib.sha256(canonical_json(record).encode()).hexdigest()
    record["timestamp"] = time.time()  # excluded from content_hash
    _write_json(out / "run_record.json", record)

    for entry in reports:
        print(f"{'PASS' if entry['passed'] else 'FAIL'} {entry['metric']}: "
              f"{entry['estimate']:.6g} +- {entry['stderr']:.3g}")
    return EXIT_OK if all_ok else EXIT_VERIFY_FAIL


# --------------------------------------------------------------------------
# oracle fixtures
# --------------------------------------------------------------------------


def _fixture_permanents() -> dict:
    rng = RngStream(20240101)
    rows = []
    for n in range(2, 7):
        for _ in range(3):
            a = linalg.ginibre_matrix(n, n, 1.0, rng)
            val = matrixpoly.permanent_naive(a)
            rows.append({"matrix": linalg.matrix_to_json(a), "permanent": [val.real, val.imag]})
    return {"entries": rows}


def _fixture_hom() -> dict:
    u = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    table = boson.bs_distribution(u, 2)
    return {
        "outcomes": [list(s) for s in table.labels],
        "probabilities": [float(p) for p in table.probs],
    }


def _fixture_fock_counts() -> dict:
    rows = []
    for m in range(1, 9):
        for n in range(0, 9):
            rows.append(
                {
                    "m": m,
                    "n": n,
                    "count": len(boson.fock_space(m, n)),
                    "collision_free": len(boson.fock_space(m, n, True)) if n <= m else 0,
                }
            )
    return {"entries": rows}


def _fixture_tmss() -> dict:
    u = np.array([[1, 1j], [1j, 1]], dtype=complex) / math.sqrt(2)
    rows = []
    for r in (0.2, 0.5, 0.9):
        for n in range(0, 5):
            analytic = math.tanh(r) ** (2 * n) / math.cosh(r) ** 2
            computed = boson.gbs_probability_hafnian_A(u, [r, r], (n, n)) if n <= 3 else analytic
            rows.append({"r": r, "n": n, "analytic": analytic, "hafnian_route": computed})
    return {"entries": rows}


def _fixture_frugal() -> dict:
    rng = RngStream(20240202)
    n = 10
    rows = []
    for c in (4.0, 6.0, 10.0):
        tvds = []
        for _ in range(200):
            p = rng.generator.exponential(size=2**n)
            dist = samplers.DiscreteDistribution(p / p.sum(), atol=1e-9)
            tvds.append(verify.tvd(samplers.clipped_distribution(dist, c), dist))
        rows.append({"c": c, "mean_clipped_tvd_half": float(np.mean(tvds)),
                     "formula_l1": samplers.frugal_tvd_formula(c)})
    return {"entries": rows}


def _fixture_bog() -> dict:
    bins = verify.BogBins(12, 16)
    return {"n": 12, "m_bins": 16, "boundaries": [float(b) for b in bins.boundaries],
            "equifill_defect": bins.equifill_defect()}


def _fixture_iqp_gaps() -> dict:
    rng = RngStream(20240303)
    rows = []
    for _ in range(5):
        f = iqp.random_iqp_polynomial(6, rng)
        rows.append(
            {
                "cubic": sorted(map(list, f.cubic)),
                "quadratic": sorted(map(list, f.quadratic)),
                "linear": sorted(f.linear),
                "gap": iqp.iqp_gap_amplitude(f),
            }
        )
    return {"n": 6, "entries": rows}


FIXTURES = {
    "permanent-naive-table": _fixture_permanents,
    "hom-table": _fixture_hom,
    "fock-space-counts": _fixture_fock_counts,
    "tmss-pnn-table": _fixture_tmss,
    "frugal-clip-tvd": _fixture_frugal,
    "bog-boundaries": _fixture_bog,
    "iqp-gap-table": _fixture_iqp_gaps,
}


def cmd_oracle(name: str, out: Path) -> int:
    if name not in FIXTURES:
        raise ConfigError(f"unknown fixture {name!r}; known: {sorted(FIXTURES)}")
    payload = FIXTURES[name]()
    obj = {
        "name": name,
        "payload": payload,
        "content_hash": hashlib.sha256(canonical_json(payload).encode()).hexdigest(),
    }
    path = out / "fixtures" / f"{name}.json"
    _write_json(path, obj)
    print(f"wrote {path} (hash {obj['content_hash'][:12]})")
    return EXIT_OK


# --------------------------------------------------------------------------
# report rendering
# --------------------------------------------------------------------------


def cmd_report(out: Path) -> int:
    reports = _load_json(out / "reports.json", "reports")
    header = f"{'metric':<24} {'estimate':>12} {'stderr':>10} {'k':>8}  status"
    print(header)
    print("-" * len(header))
    for entry in reports:
        status = "pass" if entry.get("passed", True) else "FAIL"
        print(
            f"{entry['metric']:<24} {entry['estimate']:>12.6g} {entry['stderr']:>10.3g} "
            f"{entry['k']:>8}  {status}"
        )
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qrslab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("generate", "sample", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the experiment config JSON")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=".", help="artifact directory")
    p = sub.add_parser("oracle")
    p.add_argument("fixture", help="fixture name to regenerate")
    p.add_argument("--out", default=".", help="artifact directory")
    p = sub.add_parser("report")
    p.add_argument("--out", default=".", help="artifact directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(getattr(args, "out", "."))
    try:
        if args.command == "generate":
            return cmd_generate(load_config(args.config, args.seed), out)
        if args.command == "sample":
            return cmd_sample(load_config(args.config, args.seed), out)
        if args.command == "verify":
            return cmd_verify(load_config(args.config, args.seed), out)
        if args.command == "oracle":
            return cmd_oracle(args.fixture, out)
        if args.command == "report":
            return cmd_report(out)
        raise ConfigError(f"unknown command {args.command!r}")
    except MissingArtifact as exc:
        print(canonical_json({"error": "missing_artifact", "detail": str(exc)}), file=sys.stderr)
        return EXIT_MISSING
    except (ConfigError, SizeLimitError, DataError, ValueError, KeyError) as exc:
        print(canonical_json({"error": "config", "detail": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
