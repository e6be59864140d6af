"""
Tests for the stocon command line
Author: Jay Guwalani
"""

import json
import os
import sys

import numpy as np
import pandas as pd
import pytest

# Add src to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

import main as main_module
from config.experiment import ExperimentConfig
from main import EXIT_CONFIG_ERROR, EXIT_OK, ExperimentRunner, main, parse_assignments
from stocon.analysis import certify
from stocon.core import ContractionCertificate, DomainBox, Provenance, make_constant_metric, make_identity_metric
from stocon.errors import ConfigError
from stocon.models import FitzHughNagumoNetwork

QUICK_OU = ["run", "--model", "ou", "--paths", "40", "--dt", "0.01", "--tmax", "0.5", "--seed", "3"]


def write_cert(path, lam, c, metric=None):
    cert = ContractionCertificate(rate_lambda=lam, bound_c=c, metric=metric or make_identity_metric(1),
                                  domain=DomainBox.cube(1, 1.0, t_max=1.0, sample_count=4),
                                  provenance=Provenance.DECLARED)
    path.write_text(cert.to_json(), encoding="utf-8")
    return str(path)


class TestRunCommand:

    def test_ou_writes_artifacts(self, tmp_path):
        code = main(QUICK_OU + ["--out", str(tmp_path)])
        assert code in (0, 1)
        for name in ("stats.csv", "envelope.csv", "certificate.json", "report.json"):
            assert (tmp_path / name).exists()
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["model"] == "ou"
        assert report["seed"] == 3
        assert report["n_paths"] == 40
        assert report["certificate"]["lambda"] == pytest.approx(1.0)
        assert report["pass"] == (code == EXIT_OK)
        stats = pd.read_csv(tmp_path / "stats.csv")
        assert list(stats.columns) == ["t", "msd", "stderr"]

    def test_parameter_overrides_reach_the_model(self, tmp_path):
        main(QUICK_OU + ["--lambda", "2.0", "--sigma", "0.5", "--out", str(tmp_path)])
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["params"]["lambda"] == 2.0
        assert report["certificate"]["C"] == pytest.approx(0.25)

    def test_output_is_independent_of_thread_count(self, tmp_path, monkeypatch):
        outputs = []
        for threads in ("1", "3"):
            monkeypatch.setenv("STOCON_THREADS", threads)
            monkeypatch.setenv("STOCON_BATCH_SIZE", "8")
            out = tmp_path / threads
            main(QUICK_OU + ["--out", str(out)])
            outputs.append((out / "stats.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_unknown_preset(self, tmp_path):
        assert main(["run", "--preset", "no-such-preset", "--out", str(tmp_path)]) == EXIT_CONFIG_ERROR

    def test_preset_and_config_are_exclusive(self, tmp_path):
        code = main(["run", "--preset", "paper-fig1", "--config", "x.yaml", "--out", str(tmp_path)])
        assert code == EXIT_CONFIG_ERROR

    def test_model_must_match_preset(self, tmp_path):
        assert main(["run", "--preset", "paper-fig1", "--model", "ou", "--out", str(tmp_path)]) == EXIT_CONFIG_ERROR

    def test_invalid_path_count(self, tmp_path):
        assert main(["run", "--model", "ou", "--paths", "1", "--out", str(tmp_path)]) == EXIT_CONFIG_ERROR

    def test_parse_assignments(self):
        assert parse_assignments(["k=40", "c = 30"]) == {"k": 40.0, "c": 30.0}
        with pytest.raises(ConfigError):
            parse_assignments(["k"])
        with pytest.raises(ConfigError):
            parse_assignments(["k=forty"])


class TestCombineCommand:

    def test_feedback_to_file(self, tmp_path):
        c1 = write_cert(tmp_path / "c1.json", 2.0, 0.5)
        c2 = write_cert(tmp_path / "c2.json", 3.0, 0.25)
        out = tmp_path / "combined.json"
        assert main(["combine", c1, c2, "--rule", "feedback", "--k", "4", "--out", str(out)]) == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["lambda"] == pytest.approx(2.0)
        assert doc["C"] == pytest.approx(1.5)
        assert doc["provenance"] == "Combined"

    def test_hierarchical_to_stdout(self, tmp_path, capsys):
        c1 = write_cert(tmp_path / "c1.json", 1.0, 1.0)
        c2 = write_cert(tmp_path / "c2.json", 1.0, 1.0)
        assert main(["combine", c1, c2, "--rule", "hierarchical", "--bound-k", "2"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["C"] == pytest.approx(2.0)

    def test_hierarchical_needs_bound(self, tmp_path):
        c1 = write_cert(tmp_path / "c1.json", 1.0, 1.0)
        c2 = write_cert(tmp_path / "c2.json", 1.0, 1.0)
        assert main(["combine", c1, c2, "--rule", "hierarchical"]) == EXIT_CONFIG_ERROR

    def test_parallel_metric_mismatch(self, tmp_path):
        c1 = write_cert(tmp_path / "c1.json", 1.0, 1.0)
        c2 = write_cert(tmp_path / "c2.json", 1.0, 1.0, metric=make_constant_metric([[2.0]]))
        assert main(["combine", c1, c2, "--rule", "parallel"]) == EXIT_CONFIG_ERROR

    def test_small_gain_not_applicable(self, tmp_path):
        c1 = write_cert(tmp_path / "c1.json", 1.0, 1.0)
        c2 = write_cert(tmp_path / "c2.json", 1.0, 1.0)
        code = main(["combine", c1, c2, "--rule", "small-gain", "--s12", "1", "--s21", "1"])
        assert code == EXIT_CONFIG_ERROR

    def test_needs_two_certificates(self, tmp_path):
        c1 = write_cert(tmp_path / "c1.json", 1.0, 1.0)
        assert main(["combine", c1, "--rule", "feedback"]) == EXIT_CONFIG_ERROR


class TestExperimentRunner:

    @staticmethod
    def quick(template, **extra):
        doc = {"name": template, "model": {"template": template},
               "sim": {"dt": 0.001, "t_max": 1.0, "n_paths": 20, "seed": 2, "record_stride": 100},
               "check": {"generator_samples": 0}}
        doc.update(extra)
        return ExperimentConfig.model_validate(doc)

    def test_declared_certificate_skips_estimation(self, monkeypatch):
        def estimate(*args, **kwargs):
            raise AssertionError("declared certificates are not estimated")
        monkeypatch.setattr(main_module, "certify", estimate)
        config = self.quick("ou", certificate={"declared": {"lambda": 0.5, "C": 2.0}})
        result = ExperimentRunner(config).run()
        assert result.certificate.provenance == Provenance.DECLARED
        assert (result.certificate.rate_lambda, result.certificate.bound_c) == (0.5, 2.0)
        assert result.envelope.c_over_lambda == pytest.approx(4.0)

    def test_declared_certificate_from_config_file(self, tmp_path):
        path = tmp_path / "declared.yaml"
        path.write_text("name: declared-ou\nmodel:\n  template: ou\n"
                        "certificate:\n  declared:\n    lambda: 1.0\n    C: 1.0\n")
        out = tmp_path / "out"
        code = main(["run", "--config", str(path), "--paths", "40", "--dt", "0.01", "--tmax", "0.5",
                     "--out", str(out)])
        assert code in (0, 1)
        doc = json.loads((out / "certificate.json").read_text())
        assert doc["provenance"] == "Declared"
        assert (doc["lambda"], doc["C"]) == (1.0, 1.0)

    def test_overclaimed_declared_certificate_fails_generator_check(self):
        config = self.quick("ou", certificate={"declared": {"lambda": 3.0, "C": 1.0}},
                            check={"generator_samples": 2000})
        result = ExperimentRunner(config).run()
        assert result.checks["generator"]["violations"] > 0
        assert not result.passed

    def test_pilot_points_reach_certification(self, monkeypatch):
        seen = []

        def recording_certify(system, metric, dom, extra_points=None, seed=0):
            seen.append(extra_points)
            return certify(system, metric, dom, extra_points, seed=seed)
        monkeypatch.setattr(main_module, "certify", recording_certify)

        ExperimentRunner(self.quick("ou")).run()
        states, times = seen[-1]
        assert len(times) > 0 and states.shape == (len(times), 1)
        assert np.all(np.abs(states) <= 5.0) and np.all(times <= 1.0)
        # a pair starting at 2 and 0 visits states the box samples miss exactly
        assert np.any(states[:, 0] == 2.0)

        ExperimentRunner(self.quick("ou", certificate={"harvest": False})).run()
        assert seen[-1] is None

    def test_network_sampled_rate_uses_projected_pilot_states(self, monkeypatch):
        seen = []
        original = FitzHughNagumoNetwork.sampled_rate

        def recording_rate(self, dom, extra_points=None):
            seen.append(extra_points)
            return original(self, dom, extra_points)
        monkeypatch.setattr(FitzHughNagumoNetwork, "sampled_rate", recording_rate)

        ExperimentRunner(self.quick("fn-pair")).run()
        states, _ = seen[-1]
        assert states.shape[1] == 2
        # initial state (1, 0, -1, 0) projects to (sqrt(2), 0)
        assert np.any(np.all(np.isclose(states, [np.sqrt(2.0), 0.0]), axis=1))

    def test_tightened_observable_bound_fails(self, monkeypatch):
        config = self.quick("fn-pair", check={"generator_samples": 0, "t_min": 0.5})
        assert ExperimentRunner(config).run().checks["v_gap"]["post_transient_bound"] > 0

        monkeypatch.setattr(FitzHughNagumoNetwork, "sync_bound", property(lambda self: 0.0))
        result = ExperimentRunner(config).run()
        check = result.checks["v_gap"]
        assert not check["pass"]
        assert check["post_transient_mean"] > check["post_transient_bound"] == 0.0
        assert not result.passed
