import json
import math

import pytest

from smoothlab.errors import ConfigError, OutOfRegimeError, SizeLimitError
from smoothlab.experiments import (
    COLUMNS,
    ExperimentConfig,
    config_from_echo,
    run_experiment,
    verify_replay,
)
from smoothlab.reports import Report, to_csv, to_json


def roundtrip(report, per_trial=True):
    return json.loads(to_json(report, per_trial=per_trial))


class TestConfig:
    def test_echo_roundtrip(self):
        cfg = ExperimentConfig(kind="matrix_tail", d=3, sigma_grid=(1.0,),
                               thresholds=(10.0,), trials=5, master_seed=2)
        assert config_from_echo(cfg.echo()) == cfg

    def test_validation_errors(self):
        with pytest.raises(ConfigError):
            run_experiment(ExperimentConfig(kind="nope"))
        bad = [
            ExperimentConfig(kind="matrix_tail", d=3, sigma_grid=(1.0,),
                             thresholds=(), trials=5),
            ExperimentConfig(kind="matrix_tail", d=3, sigma_grid=(),
                             thresholds=(1.0,), trials=5),
            ExperimentConfig(kind="matrix_tail", d=0, sigma_grid=(1.0,),
                             thresholds=(1.0,), trials=5),
            ExperimentConfig(kind="matrix_tail", d=3, sigma_grid=(1.0,),
                             thresholds=(1.0,), trials=0),
            ExperimentConfig(kind="matrix_tail", d=3, sigma_grid=(-1.0,),
                             thresholds=(1.0,), trials=5),
        ]
        for cfg in bad:
            with pytest.raises(ConfigError):
                run_experiment(cfg)


class TestMatrixTail:
    CFG = ExperimentConfig(kind="matrix_tail", d=3, sigma_grid=(1.0, 0.5),
                           thresholds=(5.0, 10.0, 20.0), trials=300, master_seed=7)

    def test_shape_and_bounds(self):
        report = run_experiment(self.CFG)
        assert report.schema == "matrix_tail.v1"
        assert report.columns == COLUMNS["matrix_tail"]
        assert len(report.rows) == 6
        for row in report.rows:
            assert 0.0 <= row["empirical"] <= 1.0
            assert row["bound_conj1"] == pytest.approx(
                math.sqrt(3) / (row["threshold"] * row["sigma"]))
            if row["sigma"] == 1.0:
                assert row["bound_edelman"] == pytest.approx(
                    math.sqrt(3) / row["threshold"])
            else:
                assert row["bound_edelman"] is None

    def test_exceedance_monotone_in_threshold(self):
        report = run_experiment(self.CFG)
        for sigma in self.CFG.sigma_grid:
            ps = [r["empirical"] for r in report.rows if r["sigma"] == sigma]
            assert ps == sorted(ps, reverse=True)

    def test_deterministic_and_parallel_equal(self):
        a = run_experiment(self.CFG, jobs=1)
        b = run_experiment(self.CFG, jobs=3)
        assert a.rows == b.rows
        assert a.per_trial == b.per_trial

    def test_replay(self):
        report = run_experiment(self.CFG)
        assert verify_replay(roundtrip(report))


class TestRademacherTail:
    def test_exhaustive_d2_singularity(self):
        cfg = ExperimentConfig(kind="rademacher_tail", d=2, thresholds=(2.0,),
                               exhaustive=True)
        report = run_experiment(cfg)
        assert report.rows[0]["singularity_freq"] == 0.5
        assert report.rows[0]["bound_status"] == "conjectural"

    def test_exhaustive_budget(self):
        cfg = ExperimentConfig(kind="rademacher_tail", d=5, thresholds=(2.0,),
                               exhaustive=True)
        with pytest.raises(SizeLimitError):
            run_experiment(cfg)

    def test_sampled(self):
        cfg = ExperimentConfig(kind="rademacher_tail", d=4, thresholds=(3.0,),
                               trials=400, master_seed=1)
        report = run_experiment(cfg)
        assert 0.0 <= report.rows[0]["empirical"] <= 1.0
        assert verify_replay(roundtrip(report))


class TestShadowSize:
    def test_runs_in_regime(self):
        sigma = 0.9 * math.sqrt(1.0 / (9 * 3 * math.log(8)))
        cfg = ExperimentConfig(kind="shadow_size", n=8, d=3, sigma_grid=(sigma,),
                               trials=5, master_seed=3, center_source="box")
        report = run_experiment(cfg)
        row = report.rows[0]
        assert row["bounded_trials"] + row["unbounded_trials"] == 5
        if row["bounded_trials"]:
            assert row["mean_vertices"] <= row["bound_expected_vertices"]
        assert verify_replay(roundtrip(report))

    def test_out_of_regime(self):
        cfg = ExperimentConfig(kind="shadow_size", n=8, d=3, sigma_grid=(1.0,),
                               trials=2, center_source="box")
        with pytest.raises(OutOfRegimeError):
            run_experiment(cfg)


class TestSimplexPivots:
    def test_oracle_agreement(self):
        cfg = ExperimentConfig(kind="simplex_pivots", n=6, d=2, sigma_grid=(0.1,),
                               trials=10, master_seed=5, center_source="box")
        report = run_experiment(cfg)
        row = report.rows[0]
        assert row["oracle_match_frac"] == 1.0
        assert row["hull_bound_violations"] == 0
        assert verify_replay(roundtrip(report))


class TestPerceptronTail:
    def test_runs(self):
        cfg = ExperimentConfig(kind="perceptron_tail", n=6, d=2, sigma_grid=(0.2,),
                               thresholds=(2.0, 10.0), trials=40, master_seed=9,
                               center_source="ones")
        report = run_experiment(cfg)
        for row in report.rows:
            assert row["iteration_bound_violations"] == 0
            assert 0.0 <= row["bound_blum_dunagan"] <= 1.0
        assert verify_replay(roundtrip(report))

    def test_regime_gate(self):
        cfg = ExperimentConfig(kind="perceptron_tail", n=6, d=2, sigma_grid=(0.9,),
                               thresholds=(2.0,), trials=5, center_source="ones")
        with pytest.raises(OutOfRegimeError):
            run_experiment(cfg)


class TestSubmatrixLemma:
    def test_both_sides_reported(self):
        sigma = 0.5 * math.sqrt(1.0 / (9 * 3 * math.log(6)))
        cfg = ExperimentConfig(kind="submatrix_lemma", n=6, d=3, sigma_grid=(sigma,),
                               trials=10, master_seed=4, center_source="box")
        report = run_experiment(cfg)
        row = report.rows[0]
        assert 0 <= row["mean_indicator_sum"] <= math.comb(6, 3)
        assert row["rhs"] == math.ceil((6 - 3 - 1) / 2) * math.comb(6, 2)
        assert 0.0 <= row["event_freq"] <= 1.0
        assert verify_replay(roundtrip(report))

    def test_budget(self):
        cfg = ExperimentConfig(kind="submatrix_lemma", n=60, d=20,
                               sigma_grid=(0.01,), trials=1, center_source="box")
        with pytest.raises(SizeLimitError):
            run_experiment(cfg)


class TestSmoothedProfile:
    def test_zero_sigma_collapses_to_deterministic(self):
        cfg = ExperimentConfig(kind="smoothed_profile", n=6, d=2,
                               sigma_grid=(0.0,), trials=3, master_seed=1,
                               measure="simplex_pivots")
        report = run_experiment(cfg)
        centers = [r for r in report.rows if not r["is_smoothed_estimate"]]
        for row in centers:
            assert row["confidence_halfwidth"] == 0.0
        maxima = [r for r in report.rows if r["is_smoothed_estimate"]]
        assert len(maxima) == 1
        assert maxima[0]["mean_measure"] == max(r["mean_measure"] for r in centers)

    def test_perceptron_measure(self):
        cfg = ExperimentConfig(kind="smoothed_profile", n=6, d=2,
                               sigma_grid=(0.1,), trials=4, master_seed=2,
                               measure="perceptron_iterations")
        report = run_experiment(cfg)
        assert all(r["mean_measure"] >= 0 for r in report.rows)
        assert verify_replay(roundtrip(report))


class TestSerialization:
    def test_csv_contract(self):
        cfg = ExperimentConfig(kind="matrix_tail", d=2, sigma_grid=(1.0,),
                               thresholds=(4.0,), trials=20, master_seed=0)
        text = to_csv(run_experiment(cfg))
        lines = text.splitlines()
        assert lines[0] == "# schema=matrix_tail.v1"
        assert lines[1] == ("sigma,threshold,empirical,stderr,"
                            "bound_edelman,bound_sst,bound_thm43,bound_conj1")

    def test_csv_cells(self):
        report = Report(schema="x.v1", config={}, columns=["a", "b", "c", "d"],
                        rows=[{"a": math.inf, "b": None, "c": True, "d": 0.1}])
        assert to_csv(report).splitlines()[2] == "inf,,true,0.1"

    def test_json_roundtrips_infinity(self):
        report = Report(schema="x.v1", config={}, columns=["a"],
                        rows=[{"a": math.inf}])
        assert json.loads(to_json(report))["rows"][0]["a"] == math.inf

    def test_replay_detects_tampering(self):
        cfg = ExperimentConfig(kind="matrix_tail", d=2, sigma_grid=(1.0,),
                               thresholds=(4.0,), trials=20, master_seed=0)
        doc = roundtrip(run_experiment(cfg))
        doc["rows"][0]["empirical"] = 0.123456
        assert not verify_replay(doc)
