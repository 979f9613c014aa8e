import json
import math

import numpy as np
import pytest

from socialsearch.harness import (ExperimentConfig, ExperimentError, AggregateStats, MetricStats, aggregate,
                                  compare, expected_random_fraction, run_all, run_experiment)
from socialsearch.oracle import GroundTruth, Precomputed
from socialsearch.search import Budget, Exhaust, RandomSearchConfig, RecallTarget, StsConfig
from socialsearch.survey import ImageRecord, SurveyManifest
from socialsearch.geo import Coordinate
from socialsearch.synth import SynthParams, generate


def order_statistic_mc(n, m, r, reps, seed=0):
    """Mean 1-based position of the r-th positive in uniform random orderings."""
    rng = np.random.default_rng(seed)
    labels = np.zeros(n, dtype=bool)
    labels[:m] = True
    pos = [np.flatnonzero(rng.permutation(labels))[r - 1] + 1 for _ in range(reps)]
    return np.mean(pos)


def test_expected_fraction_closed_form():
    assert expected_random_fraction(100, 100, 1.0) == 1.0
    assert expected_random_fraction(2000, 200, 0.95) == pytest.approx(190 * 2001 / (201 * 2000))
    assert expected_random_fraction(2000, 200, 0.95) == pytest.approx(0.945746, abs=1e-6)
    assert expected_random_fraction(39492, 1644, 0.95) == pytest.approx(0.9495, abs=1e-4)


def test_expected_fraction_against_monte_carlo():
    mc = order_statistic_mc(2000, 200, 190, 4000) / 2000
    assert mc == pytest.approx(expected_random_fraction(2000, 200, 0.95), abs=0.003)


@pytest.mark.parametrize("args", [(10, 0, 0.5), (10, 11, 0.5), (10, 5, 0.0), (10, 5, 1.2)])
def test_expected_fraction_domain(args):
    with pytest.raises(ValueError):
        expected_random_fraction(*args)


@pytest.fixture(scope="module")
def clustered():
    return generate(SynthParams(600, n_clusters=3, positives_per_cluster_mean=20, seed=2))


def test_single_repeat_has_zero_std(clustered):
    cfg = ExperimentConfig(clustered, StsConfig(k=10, d=0.6, stop=RecallTarget(0.95)), repeats=1, base_seed=4)
    stats = run_experiment(cfg)
    (run,) = stats.runs
    assert run["seed"] == 4
    for m, s in stats.metrics.items():
        assert s.std == 0.0 and s.mean == s.min == s.max == run[m]


def test_seeds_and_bounds(clustered):
    cfg = ExperimentConfig(clustered, StsConfig(k=10, d=0.6, stop=RecallTarget(0.95)), repeats=6, base_seed=100)
    stats = run_experiment(cfg)
    assert [r["seed"] for r in stats.runs] == list(range(100, 106))
    for m, s in stats.metrics.items():
        assert s.min <= s.mean <= s.max and s.std >= 0
        assert s.std == pytest.approx(np.std(stats.values(m), ddof=1))
    assert all(r["pct_images_analyzed"] <= 1.0 for r in stats.runs)


def test_parallel_matches_serial(clustered):
    cfg = ExperimentConfig(clustered, StsConfig(k=5, d=0.6, stop=RecallTarget(0.9)), repeats=4, base_seed=1)
    assert run_experiment(cfg).dumps() == run_experiment(cfg, workers=2).dumps()


def test_rebuild_index_matches(clustered):
    cfg = ExperimentConfig(clustered, StsConfig(k=10, d=0.6, stop=RecallTarget(0.95)), repeats=2)
    fast = run_experiment(cfg)
    slow = run_experiment(ExperimentConfig(clustered, cfg.algorithm, repeats=2, index="rebuild"))
    assert fast.dumps() == slow.dumps()


def test_json_round_trip_and_reproducible(clustered):
    cfg = ExperimentConfig(SynthParams(300, n_clusters=2, positives_per_cluster_mean=15, seed=5),
                           RandomSearchConfig(stop=RecallTarget(0.95)), repeats=3, base_seed=7)
    text = run_experiment(cfg).dumps()
    assert text == run_experiment(cfg).dumps()
    obj = json.loads(text)
    assert list(obj) == ["aggregate", "experiment", "runs"]
    assert set(obj["aggregate"]["pct_images_analyzed"]) == {"max", "mean", "min", "std"}
    assert AggregateStats.from_json(obj).dumps() == text


def test_exhaust_finds_every_positive(clustered):
    stats = run_experiment(ExperimentConfig(clustered, StsConfig(k=10, stop=Exhaust()), repeats=2))
    assert stats["pct_positive_images_found"].mean == 1.0
    assert stats["pct_images_analyzed"].max == 1.0


def test_run_error_names_seed(clustered):
    cfg = ExperimentConfig(clustered, StsConfig(), oracle=Precomputed(0), predictions={}, repeats=2, base_seed=9)
    with pytest.raises(ExperimentError) as exc:
        run_experiment(cfg)
    assert exc.value.seed == 9


def test_compare_identical_is_zero(clustered):
    cfg = ExperimentConfig(clustered, StsConfig(stop=RecallTarget(0.95)), repeats=3)
    report = compare(run_experiment(cfg), run_experiment(cfg))
    assert all(d.delta == 0 for d in report.deltas.values())
    assert report.passed


def test_compare_sts_against_random(clustered):
    stop = RecallTarget(0.95)
    sts = run_experiment(ExperimentConfig(clustered, StsConfig(stop=stop), repeats=5))
    rnd = run_experiment(ExperimentConfig(clustered, RandomSearchConfig(stop=stop), repeats=5))
    report = compare(sts, rnd, {"pct_images_analyzed": (None, -0.3)})
    assert report.deltas["pct_images_analyzed"].delta < 0
    assert report.deltas["pct_images_analyzed"].passed and report.passed
    failing = compare(sts, rnd, {"pct_images_analyzed": (0.0, None)})
    assert not failing.passed


def test_compare_pooled_std():
    a = AggregateStats({"manifest": {}, "algorithm": {"stop": "exhaust"}}, ({},) * 3,
                       {m: MetricStats(0.5, 0.1, 0.4, 0.6) for m in
                        ("pct_images_analyzed", "pct_positive_images_found", "pct_animals_detected")})
    b = AggregateStats(a.experiment, ({},) * 5,
                       {m: MetricStats(0.2, 0.3, 0.0, 0.5) for m in a.metrics})
    d = compare(a, b).deltas["pct_images_analyzed"]
    assert d.delta == pytest.approx(0.3)
    assert d.pooled_std == pytest.approx(math.sqrt((2 * 0.01 + 4 * 0.09) / 6))


def test_compare_rejects_different_bases(clustered):
    a = run_experiment(ExperimentConfig(clustered, StsConfig(stop=RecallTarget(0.95)), repeats=1))
    b = run_experiment(ExperimentConfig(clustered, StsConfig(stop=Budget(10)), repeats=1))
    with pytest.raises(ValueError, match="not comparable"):
        compare(a, b)
    with pytest.raises(ValueError, match="unknown metrics"):
        compare(a, a, {"speed": (0, 1)})


def test_all_positive_survey_strategy_irrelevant():
    recs = tuple(ImageRecord(f"i{j:03d}", Coordinate(60 + (j % 20) * 0.7, -80 + (j // 20) * 0.7), 1)
                 for j in range(200))
    m = SurveyManifest("allpos", recs)
    stop = RecallTarget(0.95)
    sts = run_experiment(ExperimentConfig(m, StsConfig(stop=stop), repeats=3))
    rnd = run_experiment(ExperimentConfig(m, RandomSearchConfig(stop=stop), repeats=3))
    d = compare(sts, rnd).deltas["pct_images_analyzed"]
    assert d.delta == 0 and d.mean_a == pytest.approx(0.95)


def test_zero_positive_metrics_are_null():
    m = generate(SynthParams(40, n_clusters=0, seed=1))
    stats = run_experiment(ExperimentConfig(m, RandomSearchConfig(stop=Budget(4)), repeats=2))
    obj = json.loads(stats.dumps())
    assert obj["aggregate"]["pct_positive_images_found"]["mean"] is None
    assert obj["runs"][0]["pct_images_analyzed"] == 0.1


def test_run_all_keeps_traces(clustered):
    results = run_all(ExperimentConfig(clustered, StsConfig(stop=Budget(12)), repeats=3))
    assert [r.trace.n_evaluated for r in results] == [12, 12, 12]
    assert aggregate(ExperimentConfig(clustered, StsConfig(stop=Budget(12)), repeats=3), clustered,
                     results[::-1]).runs[0]["run_index"] == 0
