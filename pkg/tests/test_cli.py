import json
from pathlib import Path

import pytest

from qrslab.cli import EXIT_CONFIG, EXIT_MISSING, EXIT_OK, EXIT_VERIFY_FAIL, FIXTURES, config_hash, main


def write_config(path: Path, **overrides) -> Path:
    cfg = {
        "scheme": "universal",
        "size": {"rows": 2, "cols": 2, "depth": 4},
        "sampler": {"name": "exact"},
        "noise": {"kind": "none"},
        "k": 5000,
        "seed": 11,
        "verifiers": [{"name": "xeb_linear", "min": 0.1}],
    }
    cfg.update(overrides)
    p = path / "config.json"
    p.write_text(json.dumps(cfg))
    return p


def run_pipeline(tmp, cfg_path, out_name="run"):
    out = tmp / out_name
    assert main(["generate", "--config", str(cfg_path), "--out", str(out)]) == EXIT_OK
    assert main(["sample", "--config", str(cfg_path), "--out", str(out)]) == EXIT_OK
    code = main(["verify", "--config", str(cfg_path), "--out", str(out)])
    return out, code


class TestGenerate:
    def test_deterministic_bytes(self, tmp_path):
        cfg = write_config(tmp_path)
        main(["generate", "--config", str(cfg), "--out", str(tmp_path / "a")])
        main(["generate", "--config", str(cfg), "--out", str(tmp_path / "b")])
        assert (tmp_path / "a/instance.json").read_bytes() == (tmp_path / "b/instance.json").read_bytes()

    def test_universal_gate_count(self, tmp_path):
        cfg = write_config(tmp_path)
        main(["generate", "--config", str(cfg), "--out", str(tmp_path / "run")])
        inst = json.loads((tmp_path / "run/instance.json").read_text())
        singles = [g for g in inst["circuit"]["gates"] if len(g["targets"]) == 1]
        assert len(singles) == 16

    def test_fock_instance_structure(self, tmp_path):
        cfg = write_config(tmp_path, scheme="fock_bs", size={"m": 6, "n": 3})
        main(["generate", "--config", str(cfg), "--out", str(tmp_path / "run")])
        inst = json.loads((tmp_path / "run/instance.json").read_text())
        assert inst["unitary"]["rows"] == 6
        assert inst["photons"] == 3

    def test_bad_scheme_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, scheme="nope")
        assert main(["generate", "--config", str(cfg), "--out", str(tmp_path / "x")]) == EXIT_CONFIG

    def test_seed_override_changes_instance(self, tmp_path):
        cfg = write_config(tmp_path)
        main(["generate", "--config", str(cfg), "--out", str(tmp_path / "a")])
        main(["generate", "--config", str(cfg), "--seed", "999", "--out", str(tmp_path / "b")])
        a = json.loads((tmp_path / "a/instance.json").read_text())
        b = json.loads((tmp_path / "b/instance.json").read_text())
        assert a["instance_id"] != b["instance_id"]


class TestSampleAndVerify:
    def test_pipeline_passes_and_reruns_identically(self, tmp_path):
        cfg = write_config(tmp_path)
        out1, code1 = run_pipeline(tmp_path, cfg, "r1")
        out2, code2 = run_pipeline(tmp_path, cfg, "r2")
        assert code1 == code2 == EXIT_OK
        for name in ("instance.json", "samples.jsonl", "reports.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        rec1 = json.loads((out1 / "run_record.json").read_text())
        rec2 = json.loads((out2 / "run_record.json").read_text())
        assert rec1["content_hash"] == rec2["content_hash"]
        assert rec1["config_hash"] == config_hash(json.loads(cfg.read_text()))

    def test_zero_samples_is_config_error(self, tmp_path):
        cfg = write_config(tmp_path, k=0)
        out = tmp_path / "run"
        main(["generate", "--config", str(cfg), "--out", str(out)])
        assert main(["sample", "--config", str(cfg), "--out", str(out)]) == EXIT_CONFIG

    def test_missing_instance_exits_3(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["sample", "--config", str(cfg), "--out", str(tmp_path / "void")]) == EXIT_MISSING

    def test_missing_samples_exits_3(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "run"
        main(["generate", "--config", str(cfg), "--out", str(out)])
        assert main(["verify", "--config", str(cfg), "--out", str(out)]) == EXIT_MISSING

    def test_failing_threshold_exits_1(self, tmp_path):
        # uniform white noise cannot reach an XEB of 0.5
        cfg = write_config(
            tmp_path,
            noise={"kind": "white", "lambda": 1.0},
            verifiers=[{"name": "xeb_linear", "min": 0.5}],
        )
        out, code = run_pipeline(tmp_path, cfg)
        assert code == EXIT_VERIFY_FAIL
        reports = json.loads((out / "reports.json").read_text())
        assert reports[0]["passed"] is False

    def test_verifier_scheme_mismatch_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, verifiers=[{"name": "row_norm"}])
        out = tmp_path / "run"
        main(["generate", "--config", str(cfg), "--out", str(out)])
        main(["sample", "--config", str(cfg), "--out", str(out)])
        assert main(["verify", "--config", str(cfg), "--out", str(out)]) == EXIT_CONFIG

    def test_fock_pipeline_with_ancestral_sampler(self, tmp_path):
        cfg = write_config(
            tmp_path,
            scheme="fock_bs",
            size={"m": 6, "n": 2},
            sampler={"name": "ancestral"},
            k=2000,
            verifiers=[{"name": "row_norm", "min": -1.0}, {"name": "tvd_empirical", "max": 0.2}],
        )
        out, code = run_pipeline(tmp_path, cfg)
        assert code == EXIT_OK
        head = (out / "samples.jsonl").read_text().splitlines()[0]
        assert json.loads(head)["sampler"] == "ancestral"

    def test_gaussian_pipeline_reports_truncation(self, tmp_path):
        cfg = write_config(
            tmp_path,
            scheme="gaussian_bs",
            size={"m": 3, "r": 0.4, "squeezed_modes": 3, "cutoff": 4},
            sampler={"name": "exact"},
            k=2000,
            verifiers=[],
        )
        out, code = run_pipeline(tmp_path, cfg)
        assert code == EXIT_OK
        head = json.loads((out / "samples.jsonl").read_text().splitlines()[0])
        assert head["meta"]["truncated_mass"] > 0.99
        inst = json.loads((out / "instance.json").read_text())
        assert inst["sigma"]["rows"] == 6  # 2m x 2m covariance rides along

    def test_metropolis_and_spoof_samplers_run(self, tmp_path):
        for sampler in ({"name": "metropolis", "burn_in": 200, "thinning": 5}, {"name": "spoof"}):
            cfg = write_config(tmp_path, sampler=sampler, k=1000, verifiers=[])
            out, code = run_pipeline(tmp_path, cfg, out_name=f"run_{sampler['name']}")
            assert code == EXIT_OK

    def test_white_noise_scales_xeb(self, tmp_path):
        lam = 0.5
        cfg = write_config(
            tmp_path,
            noise={"kind": "white", "lambda": lam},
            k=40_000,
            verifiers=[{"name": "xeb_linear"}],
        )
        out, _ = run_pipeline(tmp_path, cfg, "noisy")
        noisy = json.loads((out / "reports.json").read_text())[0]
        cfg2 = write_config(tmp_path, k=40_000, verifiers=[{"name": "xeb_linear"}])
        out2, _ = run_pipeline(tmp_path, cfg2, "clean")
        clean = json.loads((out2 / "reports.json").read_text())[0]
        tol = 3 * (noisy["stderr"] + clean["stderr"])
        assert abs(noisy["estimate"] - (1 - lam) * clean["estimate"]) < tol


class TestOracleFixtures:
    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_fixture_regenerates_identically(self, tmp_path, name):
        assert main(["oracle", name, "--out", str(tmp_path / "a")]) == EXIT_OK
        assert main(["oracle", name, "--out", str(tmp_path / "b")]) == EXIT_OK
        fa = json.loads((tmp_path / f"a/fixtures/{name}.json").read_text())
        fb = json.loads((tmp_path / f"b/fixtures/{name}.json").read_text())
        assert fa["content_hash"] == fb["content_hash"]

    def test_unknown_fixture_exits_2(self, tmp_path):
        assert main(["oracle", "no-such-fixture", "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_hom_fixture_values(self, tmp_path):
        main(["oracle", "hom-table", "--out", str(tmp_path)])
        payload = json.loads((tmp_path / "fixtures/hom-table.json").read_text())["payload"]
        table = dict(zip(map(tuple, payload["outcomes"]), payload["probabilities"]))
        assert table[(1, 1)] <= 1e-12
        assert table[(2, 0)] == pytest.approx(0.5)


class TestReportRendering:
    def test_report_table(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out, _ = run_pipeline(tmp_path, cfg)
        capsys.readouterr()
        assert main(["report", "--out", str(out)]) == EXIT_OK
        text = capsys.readouterr().out
        assert "xeb_linear" in text and "pass" in text

    def test_report_missing_exits_3(self, tmp_path):
        assert main(["report", "--out", str(tmp_path)]) == EXIT_MISSING
