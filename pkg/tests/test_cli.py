"""Config parsing, seed derivation, report determinism, plot-data contracts."""

import json
import math

import numpy as np
import pytest

from semproc.cli import (
    ConfigError,
    emit_plotdata,
    main,
    numeric_bytes,
    parse_config,
    run_experiment,
    write_report,
)
from semproc.seeds import derive_seed


class TestDeriveSeed:
    def test_empty_path_is_identity(self):
        for s in (0, 1, 42, 2**64 - 1, 2**63):
            assert derive_seed(s, []) == s % 2**64 or derive_seed(s, []) == s

    def test_distinct_labels_distinct_seeds(self):
        rng = np.random.default_rng(0)
        seen = {}
        root = 1234
        collisions = 0
        for i in range(300_000):
            label = int(rng.integers(0, 2**50))
            v = derive_seed(root, [label])
            if v in seen and seen[v] != label:
                collisions += 1
            seen[v] = label
        assert collisions == 0

    def test_path_order_matters(self):
        assert derive_seed(5, ["a", 1]) != derive_seed(5, [1, "a"])
        assert derive_seed(5, ["a"]) != derive_seed(5, ["b"])

    def test_type_prefix_separates_str_from_int(self):
        assert derive_seed(5, ["1"]) != derive_seed(5, [1])

    def test_streams_uncorrelated(self):
        a = np.random.default_rng(derive_seed(9, ["stream", 0])).random(10**4)
        b = np.random.default_rng(derive_seed(9, ["stream", 1])).random(10**4)
        rho = float(np.corrcoef(a, b)[0, 1])
        assert abs(rho) < 0.03

    def test_label_types_validated(self):
        with pytest.raises(TypeError):
            derive_seed(1, [3.14])
        with pytest.raises(TypeError):
            derive_seed(1, [True])


class TestConfig:
    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("ulln", {"replicatez": 3})

    def test_fuzzed_typo_keys_always_rejected(self):
        rng = np.random.default_rng(1)
        base = list(parse_config("ulln", {}).keys())
        for _ in range(100):
            key = base[int(rng.integers(len(base)))]
            pos = int(rng.integers(len(key)))
            typo = key[:pos] + chr(97 + int(rng.integers(26))) + key[pos:]
            if typo in base:
                continue
            with pytest.raises(ConfigError):
                parse_config("ulln", {typo: 1})

    def test_unknown_experiment_lists_registry(self):
        with pytest.raises(ConfigError) as err:
            parse_config("nope", {})
        msg = str(err.value)
        for name in ("ulln", "fclt", "covering", "bounds", "kiefer", "selftest"):
            assert name in msg

    def test_type_checking(self):
        with pytest.raises(ConfigError):
            parse_config("ulln", {"replicates": "many"})
        cfg = parse_config("kiefer", {"tolerance": 1})
        assert isinstance(cfg["tolerance"], float)

    def test_defaults_filled_and_echoed(self):
        cfg = parse_config("ulln", {"seed": 9})
        assert cfg["seed"] == 9 and cfg["centering"] == "lambda_n"


class TestRunExperiment:
    def test_deterministic_numeric_bytes(self):
        cfg = {"members": 40, "seed": 3, "n_list": [10, 50], "witness_max_n": 8}
        a = run_experiment("bounds", dict(cfg))
        b = run_experiment("bounds", dict(cfg))
        assert numeric_bytes(a) == numeric_bytes(b)
        assert a["pass"] is True

    def test_ledger_entries_cite_tolerance(self):
        rep = run_experiment("bounds", {"members": 20, "seed": 1,
                                        "n_list": [10], "witness_max_n": 4})
        assert rep["ledger"]
        for entry in rep["ledger"]:
            assert set(entry) >= {"name", "observed", "bound", "tolerance", "ok"}

    def test_report_schema(self, tmp_path):
        rep = run_experiment("kiefer", {"draws": 5000, "seed": 2, "tolerance": 0.1})
        path = tmp_path / "r.json"
        write_report(rep, str(path))
        back = json.loads(path.read_text())
        assert back["schema_version"] == 1
        assert back["experiment"] == "kiefer"
        assert "wall_clock_seconds" in back["meta"]
        assert back["config"]["draws"] == 5000


class TestPlotData:
    def test_ulln_csv_schema(self, tmp_path):
        rep = run_experiment("ulln", {"n_schedule": [20, 50], "replicates": 5, "seed": 1})
        paths = emit_plotdata(rep, str(tmp_path / "u"))
        lines = open(paths[0]).read().strip().split("\n")
        assert lines[0] == "n,mean,median,q95,max,bound"
        assert len(lines) == 3

    def test_empty_schedule_header_only(self, tmp_path):
        rep = run_experiment("ulln", {"n_schedule": [], "replicates": 5, "seed": 1})
        paths = emit_plotdata(rep, str(tmp_path / "e"))
        lines = open(paths[0]).read().strip().split("\n")
        assert lines == ["n,mean,median,q95,max,bound"]

    def test_fclt_csv_schemas(self, tmp_path):
        rep = run_experiment("fclt", {
            "n": 150, "replicates": 300, "seed": 8, "alpha_list": [0.2, 0.5],
            "net_u": 0.45, "modulus_replicates": 5,
            "cov_tolerance": 0.3, "ks_tolerance": 0.3,
        })
        paths = emit_plotdata(rep, str(tmp_path / "f"))
        mod = open(paths[0]).read().strip().split("\n")
        lin = open(paths[1]).read().strip().split("\n")
        assert mod[0] == "alpha,mean_modulus" and len(mod) == 3
        assert lin[0] == "n,lindeberg_ratio" and len(lin) >= 2


class TestMainEntry:
    def test_usage_error_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"not_a_key": 1}))
        code = main(["bounds", "--config", str(bad)])
        assert code == 2

    def test_small_run_exit_0(self, tmp_path):
        code = main(["bounds", "--set", "members=20", "--set", "n_list=[10]",
                     "--set", "witness_max_n=4", "--out", str(tmp_path / "b.json")])
        assert code == 0
        assert (tmp_path / "b.json").exists()

    def test_flag_overrides(self, tmp_path):
        out = tmp_path / "u.json"
        code = main(["ulln", "--seed", "4", "--n-schedule", "20,40",
                     "--replicates", "4", "--out", str(out)])
        assert code == 0
        rep = json.loads(out.read_text())
        assert rep["config"]["n_schedule"] == [20, 40]
        assert rep["config"]["seed"] == 4


class TestDocsQuickstart:
    def test_quickstart_config_zero_bound_violations(self, tmp_path):
        # the README quickstart config, shrunk to test scale; the bound
        # ledger must be violation-free
        cfg = {
            "class": "bvector",
            "j": 0,
            "parity": "odd",
            "model": "uniform01",
            "n_schedule": [100, 400],
            "replicates": 25,
            "seed": 404,
            "centering": "lambda_n",
            "net_u": 0.2,
        }
        path = tmp_path / "ulln.json"
        path.write_text(json.dumps(cfg))
        out = tmp_path / "report.json"
        code = main(["ulln", "--config", str(path), "--out", str(out),
                     "--plot-prefix", str(tmp_path / "ulln")])
        assert code == 0
        rep = json.loads(out.read_text())
        assert rep["pass"] is True
        assert all(entry["ok"] for entry in rep["ledger"])
        assert (tmp_path / "ulln_convergence.csv").exists()
