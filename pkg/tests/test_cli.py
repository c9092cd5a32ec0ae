"""Job configuration, file outputs, determinism, and the command line."""

import json

import numpy as np
import pytest

from mqcecho import cli, jobs
from mqcecho.core import ResourceLimitError


def sweep_raw(out_dir, n_seeds=3, points=9):
    return {
        "job": "disorder-sweep",
        "model": {"model": "rfti", "n_spins": 8, "disorder_sigma": 0.1},
        "analysis": {"omega_min": 0.6, "omega_max": 1.4,
                     "omega_points": points, "n_seeds": n_seeds},
        "output": {"directory": str(out_dir)},
    }


class TestConfigParsing:
    def test_defaults(self):
        cfg = jobs.config_from_dict({"job": "fotoc-curve"})
        assert cfg.model.model == "lmg"
        assert cfg.model.n_spins == 50
        assert cfg.protocol.steps is None
        assert cfg.analysis.fd_step == 1e-4
        assert cfg.output.formats == ("csv", "json")

    def test_nested_fields(self):
        cfg = jobs.config_from_dict({
            "job": "echo",
            "model": {"model": "tfi", "n_spins": 6, "omega": 2.0},
            "protocol": {"tau": 5.0, "steps": 400},
            "seed": 11,
            "workers": 2,
        })
        assert cfg.model_kind().name == "TFI"
        assert cfg.protocol.steps == 400
        assert cfg.seed == 11

    def test_unknown_top_level_field(self):
        with pytest.raises(jobs.UsageError, match="bogus: unknown field"):
            jobs.config_from_dict({"job": "echo", "bogus": 1})

    def test_unknown_section_field_path(self):
        with pytest.raises(jobs.UsageError, match="model.bogus: unknown field"):
            jobs.config_from_dict({"job": "echo", "model": {"bogus": 1}})

    def test_type_error_names_path(self):
        with pytest.raises(jobs.UsageError, match="model.n_spins: expected an integer"):
            jobs.config_from_dict({"job": "echo", "model": {"n_spins": "ten"}})

    def test_float_accepts_int(self):
        cfg = jobs.config_from_dict({"job": "echo", "model": {"omega": 2}})
        assert cfg.model.omega == 2.0

    def test_list_coercion_and_errors(self):
        cfg = jobs.config_from_dict({
            "job": "laa-ramp", "protocol": {"taus": [1, 2.5]}})
        assert cfg.protocol.taus == (1.0, 2.5)
        with pytest.raises(jobs.UsageError, match=r"protocol.taus\[1\]"):
            jobs.config_from_dict({
                "job": "laa-ramp", "protocol": {"taus": [1, "x"]}})

    def test_bool_is_not_an_integer(self):
        with pytest.raises(jobs.UsageError, match="seed: expected an integer"):
            jobs.config_from_dict({"job": "echo", "seed": True})

    def test_kind_rejects_unknown_job(self):
        cfg = jobs.config_from_dict({"job": "ground-spectrum"})
        assert cfg.kind() is jobs.JobKind.GROUND_SPECTRUM
        bad = jobs.JobConfig(job="nope")
        with pytest.raises(jobs.UsageError, match="job: unknown job"):
            bad.kind()


class TestOverrides:
    def test_merge_is_deep(self):
        base = {"model": {"n_spins": 8, "omega": 1.0}, "seed": 0}
        out = jobs.merge_overrides(base, {"model": {"omega": 2.0}})
        assert out["model"] == {"n_spins": 8, "omega": 2.0}
        assert base["model"]["omega"] == 1.0

    def test_assignment_parses_json_values(self):
        raw = jobs.apply_assignment({}, "model.n_spins=12")
        assert raw == {"model": {"n_spins": 12}}
        raw = jobs.apply_assignment({}, "protocol.taus=[1, 2]")
        assert raw == {"protocol": {"taus": [1, 2]}}
        raw = jobs.apply_assignment({}, "model.model=tfi")
        assert raw == {"model": {"model": "tfi"}}

    def test_assignment_requires_equals(self):
        with pytest.raises(jobs.UsageError, match="key=value"):
            jobs.apply_assignment({}, "model.n_spins")


class TestValidation:
    def check(self, raw, pattern):
        with pytest.raises(jobs.UsageError, match=pattern):
            jobs.run_job(jobs.config_from_dict(raw))

    def test_field_paths_in_messages(self, tmp_path):
        out = {"directory": str(tmp_path)}
        self.check({"job": "echo", "model": {"model": "xy"}, "output": out},
                   "model.model: unknown model")
        self.check({"job": "echo", "protocol": {"tau": -1}, "output": out},
                   "protocol.tau: must be positive")
        self.check({"job": "echo", "protocol": {"schedule": "cubic"}, "output": out},
                   "protocol.schedule: choose laa or linear")
        self.check({"job": "derivative-scan", "analysis": {"fd_step": 0.0},
                    "output": out}, "analysis.fd_step: must be positive")
        self.check({"job": "derivative-scan", "analysis": {"peak_side": "up"},
                    "output": out}, "analysis.peak_side: choose positive or negative")
        self.check({"job": "derivative-scan",
                    "analysis": {"omega_min": 2.0, "omega_max": 1.0},
                    "output": out}, "analysis.omega_min: grid needs")
        self.check({"job": "derivative-scan", "analysis": {"omega_points": 2},
                    "output": out}, "analysis.omega_points: scans need")
        self.check({"job": "disorder-sweep",
                    "model": {"model": "rfti", "n_spins": 6},
                    "analysis": {"n_seeds": 0}, "output": out},
                   "analysis.n_seeds: need at least one")
        self.check({"job": "echo", "output": {"directory": ""}},
                   "output.directory: must not be empty")
        self.check({"job": "echo", "output": {"directory": "x", "formats": ["xml"]}},
                   "output.formats: unknown formats")
        self.check({"job": "echo", "seed": -1, "output": out},
                   "seed: must be a nonnegative integer")
        self.check({"job": "scaling-fit", "model": {"model": "lmg"},
                    "analysis": {"sizes": [50, 100, 200]}, "output": out},
                   "analysis.sizes: scaling fits need at least 4")
        self.check({"job": "scaling-fit", "model": {"model": "rfti", "n_spins": 8},
                    "output": out}, "model.model: scaling-fit supports")
        self.check({"job": "disorder-sweep", "model": {"model": "tfi", "n_spins": 8},
                    "output": out}, "model.model: disorder-sweep needs")


class TestResultTable:
    def test_rejects_ragged_rows(self):
        with pytest.raises(ValueError, match="cells for"):
            jobs.ResultTable(("a", "b"), ((1.0,),))

    def test_csv_has_units_header_and_plain_floats(self):
        table = jobs.ResultTable(
            ("omega/chi (1)", "I_0 (1)"), ((0.5, 0.25), (1.0, 1.0)))
        text = table.csv_text()
        lines = text.splitlines()
        assert lines[0] == "omega/chi (1),I_0 (1)"
        assert lines[1] == "0.5,0.25"
        assert text.endswith("\n")

    def test_numpy_cells_serialize_as_plain_types(self):
        table = jobs.ResultTable(
            ("m (1)", "I (1)"), ((np.int64(3), np.float64(0.125)),))
        assert table.csv_text().splitlines()[1] == "3,0.125"


class TestRunJobFiles:
    def test_writes_all_three_files(self, tmp_path):
        res = jobs.run_job(jobs.config_from_dict(sweep_raw(tmp_path)))
        names = sorted(p.name for p in res.paths)
        assert names == ["manifest.json", "results.csv", "summary.json"]
        for p in res.paths:
            assert p.exists()

    def test_csv_only_still_emits_manifest(self, tmp_path):
        raw = sweep_raw(tmp_path)
        raw["output"]["formats"] = ["csv"]
        res = jobs.run_job(jobs.config_from_dict(raw))
        names = sorted(p.name for p in res.paths)
        assert names == ["manifest.json", "results.csv"]

    def test_manifest_contents(self, tmp_path):
        raw = sweep_raw(tmp_path)
        raw["seed"] = 5
        res = jobs.run_job(jobs.config_from_dict(raw))
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["tool"] == "mqcecho"
        assert manifest["job"] == "disorder-sweep"
        assert manifest["seeds"] == [5, 6, 7]
        assert manifest["version"]
        # the stored config is fully resolved, defaults included
        assert manifest["config"]["protocol"]["tau"] == 10.0
        assert manifest["config"]["model"]["disorder_sigma"] == 0.1
        assert "timestamp" not in json.dumps(manifest).lower()

    def test_seeded_rerun_is_byte_identical(self, tmp_path):
        res_a = jobs.run_job(jobs.config_from_dict(sweep_raw(tmp_path / "a")))
        res_b = jobs.run_job(jobs.config_from_dict(sweep_raw(tmp_path / "b")))
        assert res_a.manifest["config"]["model"] == res_b.manifest["config"]["model"]
        for name in ("results.csv", "summary.json"):
            assert (tmp_path / "a" / name).read_bytes() == \
                (tmp_path / "b" / name).read_bytes()

    def test_worker_count_does_not_change_results(self, tmp_path):
        raw1 = sweep_raw(tmp_path / "w1")
        raw1["workers"] = 1
        raw3 = sweep_raw(tmp_path / "w3")
        raw3["workers"] = 3
        jobs.run_job(jobs.config_from_dict(raw1))
        jobs.run_job(jobs.config_from_dict(raw3))
        assert (tmp_path / "w1" / "results.csv").read_bytes() == \
            (tmp_path / "w3" / "results.csv").read_bytes()
        assert (tmp_path / "w1" / "summary.json").read_bytes() == \
            (tmp_path / "w3" / "summary.json").read_bytes()


class TestMemoryBudget:
    def test_refusal_names_required_budget(self, tmp_path, monkeypatch):
        monkeypatch.setenv(jobs.MEMORY_BUDGET_ENV, "1000000")
        raw = {"job": "ground-spectrum",
               "model": {"model": "tfi", "n_spins": 20, "omega": 1.0},
               "output": {"directory": str(tmp_path)}}
        with pytest.raises(ResourceLimitError, match=r"needs about \d+ bytes"):
            jobs.run_job(jobs.config_from_dict(raw))

    def test_small_run_fits_budget(self, tmp_path, monkeypatch):
        monkeypatch.setenv(jobs.MEMORY_BUDGET_ENV, str(10 ** 8))
        res = jobs.run_job(jobs.config_from_dict(sweep_raw(tmp_path)))
        assert res.summary["n_seeds"] == 3

    def test_garbage_budget_is_a_usage_error(self, tmp_path, monkeypatch):
        monkeypatch.setenv(jobs.MEMORY_BUDGET_ENV, "lots")
        with pytest.raises(jobs.UsageError, match="byte count"):
            jobs.run_job(jobs.config_from_dict(sweep_raw(tmp_path)))


class TestCatalog:
    def test_required_entries_and_tags(self):
        by_name = {e.name: e for e in jobs.list_jobs()}
        assert "long-running" in by_name["fig3-tfi-n20"].runtime
        assert "fast" in by_name["figS1-laa-ramps"].runtime
        figs5 = by_name["figS5-rfti-disorder"]
        assert figs5.config().analysis.n_seeds == 100
        assert "long-running" in figs5.runtime

    def test_every_entry_builds_a_valid_config(self):
        for entry in jobs.list_jobs():
            cfg = entry.config()
            cfg.kind()
            cfg.model_kind()
            jobs._validate(cfg)


class TestCommandLine:
    def test_list_exits_zero(self, capsys):
        assert cli.main(["list"]) == 0
        out = capsys.readouterr().out
        assert "figS1-laa-ramps" in out
        assert "fig3-tfi-n20" in out

    def test_unknown_job_is_usage_error(self, capsys):
        assert cli.main(["no-such-job"]) == 2
        assert "usage error: job" in capsys.readouterr().err

    def test_bad_field_path_in_stderr(self, tmp_path, capsys):
        rc = cli.main(["disorder-sweep", "--set", "model.n_spins=oops",
                       "--out", str(tmp_path)])
        assert rc == 2
        assert "model.n_spins" in capsys.readouterr().err

    def test_memory_refusal_exit_code(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv(jobs.MEMORY_BUDGET_ENV, "1000")
        rc = cli.main(["ground-spectrum", "--set", "model.model=tfi",
                       "--set", "model.n_spins=20", "--out", str(tmp_path)])
        assert rc == 3
        assert "refused" in capsys.readouterr().err

    def test_run_with_config_file_and_overrides(self, tmp_path, capsys):
        cfg_file = tmp_path / "job.json"
        cfg_file.write_text(json.dumps(sweep_raw(tmp_path / "ignored")))
        rc = cli.main(["disorder-sweep", "--config", str(cfg_file),
                       "--set", "analysis.n_seeds=2",
                       "--out", str(tmp_path / "run"), "--seed", "3"])
        assert rc == 0
        manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
        # --set beats the file; --out and --seed beat both
        assert manifest["seeds"] == [3, 4]
        assert manifest["config"]["output"]["directory"] == str(tmp_path / "run")
        out = capsys.readouterr().out
        assert "results.csv" in out

    def test_catalog_preset_resolves(self, tmp_path):
        raw = cli._resolve_raw_config(
            cli._build_parser().parse_args(
                ["figS1-laa-ramps", "--out", str(tmp_path)]))
        cfg = jobs.config_from_dict(raw)
        assert cfg.kind() is jobs.JobKind.LAA_RAMP
        assert cfg.protocol.taus == (3.0, 10.0, 30.0, 100.0)
        assert cfg.output.directory == str(tmp_path)


class TestJobOutputsPhysics:
    def test_ground_spectrum_rows_sum_to_one(self, tmp_path):
        raw = {"job": "ground-spectrum",
               "model": {"model": "lmg", "n_spins": 12},
               "analysis": {"omega_min": 0.4, "omega_max": 2.0,
                            "omega_points": 3},
               "output": {"directory": str(tmp_path)}}
        res = jobs.run_job(jobs.config_from_dict(raw))
        text = (tmp_path / "results.csv").read_text().splitlines()
        assert text[0] == "omega/chi (1),m (1),I_m (1),order_param (2<|Sz|>/N)"
        by_omega = {}
        for line in text[1:]:
            om, m, im, order = line.split(",")
            by_omega.setdefault(om, 0.0)
            by_omega[om] += float(im)
        for om, total in by_omega.items():
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_ideal_echo_job_returns_unity(self, tmp_path):
        raw = {"job": "echo",
               "model": {"model": "lmg", "n_spins": 10, "omega": 0.01},
               "protocol": {"tau": 2.0, "omega_start": 20.0,
                            "omega_stop": 0.01, "steps": 150},
               "output": {"directory": str(tmp_path)}}
        res = jobs.run_job(jobs.config_from_dict(raw))
        assert res.summary["return_fidelity"] == pytest.approx(1.0, abs=1e-9)

    def test_pseudo_echo_job_reports_curvature_bound(self, tmp_path):
        raw = {"job": "pseudo-echo",
               "model": {"model": "lmg", "n_spins": 10, "omega": 0.01},
               "protocol": {"tau": 2.0, "omega_start": 20.0,
                            "omega_stop": 0.01, "steps": 150},
               "output": {"directory": str(tmp_path)}}
        res = jobs.run_job(jobs.config_from_dict(raw))
        curv = res.summary["curvature"]
        assert curv["bound_holds"]
        assert curv["pseudo_moment"] <= curv["true_moment"] + 1e-9
        assert curv["qfi_lower_bound"] == pytest.approx(
            2.0 * curv["pseudo_moment"])

    def test_derivative_scan_finds_small_chain_peak(self, tmp_path):
        raw = {"job": "derivative-scan",
               "model": {"model": "tfi", "n_spins": 8, "omega": 1.0},
               "analysis": {"omega_min": 0.6, "omega_max": 1.4,
                            "omega_points": 9},
               "output": {"directory": str(tmp_path)}}
        res = jobs.run_job(jobs.config_from_dict(raw))
        assert res.summary["peak"] is not None
        assert 0.8 < res.summary["peak"]["position"] < 1.1
