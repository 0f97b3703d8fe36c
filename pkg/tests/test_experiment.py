import json
import os

import pytest

from dacsearch.experiment import (
    ExperimentConfig,
    ExperimentError,
    build_report,
    format_report_table,
    load_records,
    run_experiment,
)
from dacsearch.generators import gen_pi_n, gen_transport
from dacsearch.tasks import save_task


@pytest.fixture
def pi_experiment(tmp_path):
    task_path = tmp_path / "pi12.graph"
    save_task(gen_pi_n(12), task_path)
    config = ExperimentConfig(
        instances=[str(task_path)],
        policies=["argmin-mu", "alt:01", "alt:10", "single:0", "single:1"],
        seeds=[0],
        max_expansions=100_000,
        out_dir=str(tmp_path / "results"),
    )
    return config


class TestRunExperiment:
    def test_expansion_columns_match_known_counts(self, pi_experiment):
        report = run_experiment(pi_experiment)
        mean_exp = {
            policy: list(scores["mean_expansions"].values())[0]
            for policy, scores in report["policies"].items()
        }
        cluster = 2**10
        assert mean_exp["argmin-mu"] == 2
        assert mean_exp["alt:10"] == cluster + 3
        assert mean_exp["single:0"] == cluster + 3
        assert mean_exp["alt:01"] == 2
        assert mean_exp["single:1"] == 2

    def test_rerun_is_identical_and_resumes(self, pi_experiment):
        first = run_experiment(pi_experiment)
        # mark run files so a rerun that recomputed them would be detected
        runs_dir = os.path.join(pi_experiment.out_dir, "runs")
        stamps = {}
        for name in os.listdir(runs_dir):
            path = os.path.join(runs_dir, name)
            os.utime(path, (1, 1))
            stamps[name] = os.path.getmtime(path)
        second = run_experiment(pi_experiment)
        assert first == second
        for name, stamp in stamps.items():
            assert os.path.getmtime(os.path.join(runs_dir, name)) == stamp

    def test_empty_instances_give_empty_report(self, tmp_path):
        config = ExperimentConfig(
            instances=[], policies=["argmin-mu"], out_dir=str(tmp_path / "empty")
        )
        report = run_experiment(config)
        assert report["policies"] == {}

    def test_missing_task_fails_fast(self, tmp_path):
        config = ExperimentConfig(
            instances=[str(tmp_path / "nope.graph")],
            policies=["argmin-mu"],
            out_dir=str(tmp_path / "r"),
        )
        with pytest.raises(ExperimentError):
            run_experiment(config)

    def test_invalid_policy_fails_fast(self, tmp_path):
        task_path = tmp_path / "t.graph"
        save_task(gen_pi_n(4), task_path)
        config = ExperimentConfig(
            instances=[str(task_path)],
            policies=["warp:9"],
            out_dir=str(tmp_path / "r"),
        )
        with pytest.raises(Exception):
            run_experiment(config)

    def test_emits_csv_json_and_table(self, pi_experiment):
        run_experiment(pi_experiment)
        out = pi_experiment.out_dir
        assert os.path.exists(os.path.join(out, "records.csv"))
        assert os.path.exists(os.path.join(out, "report.json"))
        assert os.path.exists(os.path.join(out, "report.txt"))
        with open(os.path.join(out, "report.json")) as fh:
            report = json.load(fh)
        assert "best_as" in report

    def test_parallel_workers_match_sequential(self, tmp_path):
        task_path = tmp_path / "t.graph"
        save_task(gen_pi_n(8), task_path)
        base = dict(
            instances=[str(task_path)],
            policies=["argmin-mu", "single:0", "alt:01"],
            seeds=[0, 1],
            max_expansions=10_000,
        )
        seq = run_experiment(ExperimentConfig(out_dir=str(tmp_path / "seq"), **base))
        par = run_experiment(ExperimentConfig(out_dir=str(tmp_path / "par"), workers=3, **base))
        # wall times differ between runs; compare the deterministic parts
        for policy in seq["policies"]:
            assert (
                seq["policies"][policy]["mean_expansions"]
                == par["policies"][policy]["mean_expansions"]
            )
            assert seq["policies"][policy]["coverage"] == par["policies"][policy]["coverage"]


class TestReportAggregation:
    def test_best_as_dominates_members(self, tmp_path):
        paths = []
        for i, seed in enumerate((3, 4)):
            p = tmp_path / f"tr{i}.sas"
            save_task(gen_transport(3, 2, seed).task, p)
            paths.append(str(p))
        config = ExperimentConfig(
            instances=paths,
            policies=["single:0", "single:1", "single:2", "single:3"],
            max_expansions=5_000,
            out_dir=str(tmp_path / "results"),
        )
        report = run_experiment(config)
        oracle = report["best_as"]["single"]["per_instance_coverage"]
        for policy, scores in report["policies"].items():
            for inst, cov in scores["per_instance_coverage"].items():
                assert oracle[inst] >= cov

    def test_quality_baseline_is_best_found_cost(self, tmp_path):
        p = tmp_path / "tr.sas"
        save_task(gen_transport(3, 2, 7).task, p)
        config = ExperimentConfig(
            instances=[str(p)],
            policies=["argmin-mu", "rnd:1"],
            max_expansions=5_000,
            out_dir=str(tmp_path / "results"),
        )
        report = run_experiment(config)
        records = load_records(config.out_dir)
        best = min(r.cost for r in records if r.solved)
        for r in records:
            if r.solved and r.cost == best:
                assert report["policies"][r.policy]["quality"] == pytest.approx(1.0)

    def test_table_formatting(self, tmp_path):
        p = tmp_path / "t.graph"
        save_task(gen_pi_n(4), p)
        config = ExperimentConfig(
            instances=[str(p)], policies=["argmin-mu"], out_dir=str(tmp_path / "results")
        )
        report = run_experiment(config)
        table = format_report_table(report)
        assert "argmin-mu" in table and "coverage" in table


class TestConfigFiles:
    def test_toml_config(self, tmp_path):
        task_path = tmp_path / "t.graph"
        save_task(gen_pi_n(4), task_path)
        cfg = tmp_path / "exp.toml"
        cfg.write_text(
            f'instances = ["{task_path}"]\n'
            'policies = ["argmin-mu", "alt:01"]\n'
            "seeds = [0, 1]\n"
            "max_expansions = 1000\n"
            f'out_dir = "{tmp_path / "results"}"\n'
        )
        config = ExperimentConfig.from_file(str(cfg))
        assert config.policies == ["argmin-mu", "alt:01"]
        assert config.seeds == [0, 1]

    def test_json_config(self, tmp_path):
        cfg = tmp_path / "exp.json"
        cfg.write_text(json.dumps({"instances": [], "policies": ["argmin-mu"]}))
        config = ExperimentConfig.from_file(str(cfg))
        assert config.policies == ["argmin-mu"]

    def test_unknown_keys_rejected(self, tmp_path):
        cfg = tmp_path / "exp.json"
        cfg.write_text(json.dumps({"instances": [], "policies": [], "surprise": 1}))
        with pytest.raises(ExperimentError):
            ExperimentConfig.from_file(str(cfg))

    def test_nonpositive_budget_rejected(self):
        with pytest.raises(ExperimentError):
            ExperimentConfig(instances=[], policies=[], max_expansions=0)
