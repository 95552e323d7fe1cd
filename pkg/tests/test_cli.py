import json

import numpy as np
import pytest

from opaqnd.cli import (
    ConfigError,
    ExperimentConfig,
    load_preset,
    main,
    parse_config,
    run_experiment,
    seed_policy,
)


class TestParsing:
    def test_all_presets_parse(self):
        for exp in ("qnd-protocol", "povm-purity", "gkp-generate", "opo-trajectories", "validate"):
            cfg = parse_config(load_preset(exp))
            assert cfg.experiment == exp

    def test_readout_preset_values(self):
        cfg = parse_config(load_preset("qnd-protocol"))
        assert cfg.system["Delta"] == 150.0
        assert cfg.system["g_eff"] == 1.0
        assert cfg.protocol["t"] == 1.0
        assert cfg.protocol["alpha"] == 0.7
        assert cfg.protocol["pump_width"] == 0.25
        assert cfg.truncation == {"n_signal": 40, "n_pump": 50}
        p = cfg.system_params()
        assert p.Delta == pytest.approx(150.0)
        assert p.g_eff == pytest.approx(1.0)

    def test_roundtrip_lossless(self):
        cfg = parse_config(load_preset("qnd-protocol"))
        again = parse_config(json.dumps(cfg.to_dict()))
        assert again == cfg
        assert again.canonical_json() == cfg.canonical_json()

    def test_empty_document_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("")
        with pytest.raises(ConfigError, match="experiment"):
            parse_config("{}")

    def test_unknown_keys_rejected(self):
        base = json.loads(load_preset("povm-purity"))
        base["unexpected"] = 1
        with pytest.raises(ConfigError, match="unexpected"):
            parse_config(json.dumps(base))
        base = json.loads(load_preset("povm-purity"))
        base["protocol"]["typo_key"] = 1
        with pytest.raises(ConfigError, match="typo_key"):
            parse_config(json.dumps(base))

    def test_unphysical_mismatch_rejected(self):
        base = json.loads(load_preset("povm-purity"))
        base["system"] = {"delta": 1.0, "beta": 2.0}  # delta <= r
        with pytest.raises(ConfigError, match="squeezed-basis"):
            parse_config(json.dumps(base))

    def test_both_parameter_forms_rejected_together(self):
        base = json.loads(load_preset("povm-purity"))
        base["system"] = {"Delta": 10.0, "delta": 20.0}
        with pytest.raises(ConfigError):
            parse_config(json.dumps(base))


class TestSeedPolicy:
    def test_streams_differ_by_index(self):
        a = seed_policy(42, 0).normal(size=8)
        b = seed_policy(42, 1).normal(size=8)
        assert not np.allclose(a, b)

    def test_streams_differ_by_base(self):
        a = seed_policy(42, 3).normal(size=8)
        b = seed_policy(43, 3).normal(size=8)
        assert not np.allclose(a, b)

    def test_reproducible(self):
        assert np.array_equal(seed_policy(7, 2).normal(size=8), seed_policy(7, 2).normal(size=8))


def _small_purity_config(tmp_path, seed=42):
    return ExperimentConfig(
        experiment="povm-purity",
        seed=seed,
        output_dir=str(tmp_path),
        threads=1,
        system={"Delta": 150.0, "g_eff": 1.0},
        truncation={"n_signal": 30, "n_pump": 2},
        protocol={"d": 1.0, "widths": [0.5, 0.25], "n_max": 6},
    )


class TestRunExperiment:
    def test_povm_purity_artifacts_and_determinism(self, tmp_path):
        m1 = run_experiment(_small_purity_config(tmp_path / "a"))
        m2 = run_experiment(_small_purity_config(tmp_path / "b"))
        assert all(m1["checks"].values())
        by_path_1 = {f["path"]: f["sha256"] for f in m1["files"]}
        by_path_2 = {f["path"]: f["sha256"] for f in m2["files"]}
        assert by_path_1 == by_path_2  # byte-identical outputs
        text = (tmp_path / "a" / "purity.csv").read_text()
        assert text.startswith("# opaqnd")
        assert "units:" in text and "formula:" in text
        header = next(l for l in text.splitlines() if not l.startswith("#"))
        assert header.split(",") == ["p_b", "purity_w0.5", "purity_w0.25"]

    def test_manifest_checksums_match_files(self, tmp_path):
        import hashlib

        m = run_experiment(_small_purity_config(tmp_path))
        for entry in m["files"]:
            digest = hashlib.sha256((tmp_path / entry["path"]).read_bytes()).hexdigest()
            assert digest == entry["sha256"]
        assert (tmp_path / "manifest.json").exists()
        assert m["config_hash"]

    def test_qnd_experiment_reduced(self, tmp_path):
        cfg = ExperimentConfig(
            experiment="qnd-protocol",
            seed=1,
            output_dir=str(tmp_path),
            threads=1,
            system={"Delta": 150.0, "g_eff": 1.0},
            truncation={"n_signal": 25, "n_pump": 35},
            protocol={"t": 1.0, "alpha": 0.5, "pump_width": 0.25,
                      "wigner": True, "wigner_points": 41},
        )
        m = run_experiment(cfg)
        assert all(m["checks"].values()), m["checks"]
        produced = {f["path"] for f in m["files"]}
        assert {"outcome_density.csv", "conditional_fidelity.csv", "metadata.json"} <= produced
        assert "wigner_signal_initial.csv" in produced
        assert "wigner_conditional_0.axes.csv" in produced
        meta = json.loads((tmp_path / "metadata.json").read_text())
        assert meta["fidelities"]["0"] > 0.9

    def test_gkp_experiment_reduced(self, tmp_path):
        cfg = ExperimentConfig(
            experiment="gkp-generate",
            seed=1,
            output_dir=str(tmp_path),
            threads=1,
            system={"Delta": 100.0, "g_eff": 1.0},
            truncation={"n_signal": 90, "n_pump": 2},
            protocol={"pump_width_db": 10.0, "eps": 0.05, "phi": 0.5,
                      "grid_half_width": 8.0, "grid_step": 0.02, "wigner": False},
        )
        m = run_experiment(cfg)
        assert all(m["checks"].values()), m["checks"]
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["db_x_stabilizer"] == pytest.approx(10.0, abs=1.0)
        assert report["fidelity_exact_vs_kraus"] > 0.999


class TestMain:
    def test_validate_exit_zero(self, tmp_path, capsys):
        code = main(["validate", "--out", str(tmp_path)])
        out = capsys.readouterr().out
        assert code == 0
        assert "PASS" in out and "FAIL" not in out

    def test_bad_config_exit_two(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["validate", "--config", str(bad)]) == 2

    def test_mismatched_subcommand_exit_two(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(load_preset("povm-purity"))
        assert main(["validate", "--config", str(cfg)]) == 2

    def test_purity_run_via_main(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        payload = json.loads(load_preset("povm-purity"))
        payload["output_dir"] = str(tmp_path / "out")
        payload["truncation"] = {"n_signal": 30, "n_pump": 2}
        payload["protocol"]["n_max"] = 6
        cfg.write_text(json.dumps(payload))
        assert main(["povm-purity", "--config", str(cfg), "--seed", "7"]) == 0
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["config"]["seed"] == 7
