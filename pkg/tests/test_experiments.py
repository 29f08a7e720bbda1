import json
import math

import pytest

from rigor.experiments import (Check, ExperimentConfig, closure_density_probe, full_grid,
                               min_degree_concentration, run_experiment, run_trial)
from rigor.graph import Graph
from rigor.thresholds import a_of_c


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(n=1, p=0.5)
    with pytest.raises(ValueError):
        ExperimentConfig(n=10, p=0.5, trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(n=10, p=1.5)
    cfg = ExperimentConfig.from_c(100, 3)
    assert cfg.c == pytest.approx(3)


def test_complete_trial():
    r = run_trial(ExperimentConfig(n=20, p=1.0), 0)
    assert r.delta == 19 and r.d_max == 19 and r.delta_rigid is True
    assert r.edges == 190 and r.edge_criterion_dmax == 19
    assert r.bootstrap_certified_d == 19


def test_empty_trial():
    r = run_trial(ExperimentConfig(n=20, p=0.0), 0)
    assert r.delta == 0 and r.d_max == 0 and r.edges == 0
    assert r.bootstrap_certified_d == 0


@pytest.mark.parametrize("i", range(5))
def test_record_inequalities(i):
    r = run_trial(ExperimentConfig.from_c(100, 3, master_seed=11), i)
    assert r.d_max <= r.delta
    assert r.d_max <= r.edge_criterion_dmax
    assert r.bootstrap_certified_d <= r.d_max
    # binary-search transcript is consistent with the reported maximum
    for d, ok in r.probes:
        assert ok == (d <= r.d_max)


def test_explicit_grid_matches_binary_search():
    cfg_b = ExperimentConfig.from_c(40, 4, master_seed=5, trials=4)
    cfg_f = ExperimentConfig.from_c(40, 4, master_seed=5, trials=4, d_grid=full_grid(40))
    rb, rf = run_experiment(cfg_b, threads=1), run_experiment(cfg_f, threads=1)
    for a, b in zip(rb.records, rf.records):
        assert a.d_max == b.d_max
        assert [ok for _, ok in b.probes] == [d <= b.d_max for d, _ in b.probes]


def test_trial_is_deterministic_and_single_trial_experiment_matches():
    cfg = ExperimentConfig.from_c(60, 3, master_seed=3)
    res = run_experiment(cfg)
    assert len(res.records) == 1
    assert res.records[0] == run_trial(cfg, 0)
    assert res.summary["trials"] == 1


def test_records_byte_identical_and_thread_independent(tmp_path):
    cfg = ExperimentConfig.from_c(60, 4, trials=6, master_seed=9)
    a = run_experiment(cfg, threads=1)
    b = run_experiment(cfg, threads=3)
    a.write(tmp_path / "a.jsonl", tmp_path / "a.json")
    b.write(tmp_path / "b.jsonl", tmp_path / "b.json")
    assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    lines = (tmp_path / "a.jsonl").read_text().splitlines()
    assert [json.loads(x)["trial_index"] for x in lines] == list(range(6))


def test_record_field_order():
    r = run_trial(ExperimentConfig(n=10, p=0.5), 0)
    keys = list(json.loads(r.to_json()))
    assert keys[:14] == ["trial_index", "derived_seed", "n", "p", "c", "delta", "edges", "d_max",
                         "d_pred", "edge_criterion_dmax", "delta_rigid", "bootstrap_certified_d",
                         "closure_density", "elapsed_ms"]


def test_timings_only_on_request():
    assert run_trial(ExperimentConfig(n=10, p=0.5), 0).elapsed_ms is None
    t = run_trial(ExperimentConfig(n=10, p=0.5, record_timings=True), 0).elapsed_ms
    assert set(t) >= {"sample", "d_max"}


def test_summary_fields():
    cfg = ExperimentConfig.from_c(50, 8, trials=3, master_seed=1, d_grid=full_grid(50))
    s = run_experiment(cfg).summary
    for key in ("delta_rigid_fraction", "ratio_mean", "ratio_std", "edge_agreement_rate",
                "pair_agreement_rate", "bootstrap_success_rate", "disagreements"):
        assert key in s
    assert 0 <= s["pair_agreement_rate"] <= 1
    json.dumps(s)


def test_bootstrap_target_dimension():
    cfg = ExperimentConfig.from_c(60, 8, trials=2, master_seed=2, bootstrap_d=5)
    res = run_experiment(cfg)
    for r in res.records:
        assert r.bootstrap_target_d == 5
        assert r.bootstrap_target_ok == (r.d_max >= 5)
    assert res.summary["bootstrap_success_rate"] is not None


def test_closure_density_check():
    cfg = ExperimentConfig.from_c(40, 6, trials=2, checks=frozenset({Check.CLOSURE_DENSITY}),
                                  density_d=2, density_a_size=10)
    for r in run_experiment(cfg).records:
        assert r.closure_density >= 0
        assert r.d_max is None


def test_closure_density_probe_examples():
    assert closure_density_probe(Graph.complete(8), 3, ()) == 28
    assert closure_density_probe(Graph(8), 2, {0, 1, 2}) == 0
    with pytest.raises(ValueError):
        closure_density_probe(Graph.complete(10), 2, range(10))


def test_concentration_forced_complete():
    n = 30
    res = min_degree_concentration(n, (n - 1) / math.log(n) + 1, 3, 1)
    assert res["p"] == 1.0
    assert res["deltas"] == [n - 1] * 3


def test_concentration_small():
    res = min_degree_concentration(500, 3, 5, 7)
    assert len(res["normalized"]) == 5
    assert res["a_c"] == pytest.approx(a_of_c(3))
