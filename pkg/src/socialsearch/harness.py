"""Repeated-run experiments, aggregate statistics and comparisons.

Run ``i`` of an experiment uses seed ``base_seed + i`` so that any single run
can be replayed on its own. Aggregates use the sample standard deviation.
"""

from __future__ import annotations

import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Optional, Union

from .oracle import GroundTruth, OracleSpec, bind
from .search import RandomSearchConfig, RunTrace, StsConfig, run_random_search, run_sts
from .survey import SurveyManifest, parse_manifest, parse_predictions
from .synth import SynthParams, generate

METRICS = ("pct_images_analyzed", "pct_positive_images_found", "pct_animals_detected")


class ExperimentError(RuntimeError):
    def __init__(self, seed, cause):
        self.seed = seed
        super().__init__(f"run with seed {seed} failed: {cause}")


@dataclass(frozen=True)
class ExperimentConfig:
    manifest: Union[SurveyManifest, SynthParams, str, Path]
    algorithm: Union[StsConfig, RandomSearchConfig]
    oracle: OracleSpec = field(default_factory=GroundTruth)
    repeats: int = 20
    base_seed: int = 0
    predictions: Union[Mapping[str, int], str, Path, None] = None
    index: str = "tombstone"  # KD-tree strategy for STS runs; traces are identical either way

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")

    def describe(self, manifest: SurveyManifest) -> dict:
        if isinstance(self.manifest, SynthParams):
            source = {"synth": self.manifest.describe()}
        elif isinstance(self.manifest, SurveyManifest):
            source = {"name": self.manifest.name}
        else:
            source = {"path": str(self.manifest)}
        algo = self.algorithm.describe()
        algo.pop("seed")
        return {
            "manifest": {**source, **manifest.totals(), "metric": manifest.metric.value},
            "oracle": self.oracle.describe(),
            "algorithm": algo,
            "repeats": self.repeats,
            "base_seed": self.base_seed,
        }


@dataclass(frozen=True)
class RunResult:
    run_index: int
    seed: int
    trace: RunTrace

    def summary(self) -> dict:
        return {"run_index": self.run_index, "seed": self.seed,
                "n_evaluated": self.trace.n_evaluated, "stop_reason": self.trace.stop_reason,
                **self.trace.metrics()}


@dataclass(frozen=True)
class MetricStats:
    mean: float
    std: float
    min: float
    max: float

    @classmethod
    def of(cls, values):
        values = list(values)
        if any(math.isnan(v) for v in values):
            return cls(math.nan, math.nan, math.nan, math.nan)
        std = statistics.stdev(values) if len(values) > 1 else 0.0
        return cls(statistics.fmean(values), std, min(values), max(values))


@dataclass(frozen=True)
class AggregateStats:
    experiment: dict
    runs: tuple[dict, ...]
    metrics: dict[str, MetricStats]

    def __getitem__(self, metric) -> MetricStats:
        return self.metrics[metric]

    def values(self, metric) -> list[float]:
        return [r[metric] for r in self.runs]

    def basis(self) -> dict:
        """What two experiments must share to be comparable."""
        return {"manifest": self.experiment["manifest"],
                "stop": self.experiment["algorithm"]["stop"]}

    def to_json(self) -> dict:
        return {
            "experiment": self.experiment,
            "runs": [dict(r) for r in self.runs],
            "aggregate": {m: _json_floats(vars(s)) for m, s in self.metrics.items()},
        }

    def dumps(self) -> str:
        return json.dumps(_json_floats(self.to_json()), indent=2, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, obj) -> "AggregateStats":
        metrics = {m: MetricStats(*(_nan(obj["aggregate"][m][k]) for k in ("mean", "std", "min", "max")))
                   for m in METRICS}
        runs = tuple({k: _nan(v) if k in METRICS else v for k, v in r.items()} for r in obj["runs"])
        return cls(obj["experiment"], runs, metrics)


def _nan(v):
    return math.nan if v is None else v


def _json_floats(obj):
    """Replace NaN with None so the output is strict JSON."""
    if isinstance(obj, float) and math.isnan(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_floats(v) for v in obj]
    return obj


def load_manifest(source, metric=None) -> SurveyManifest:
    if isinstance(source, SurveyManifest):
        return source
    if isinstance(source, SynthParams):
        return generate(source) if metric is None else generate(source, metric=metric)
    path = Path(source)
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_manifest(fh, name=path.stem) if metric is None else parse_manifest(fh, metric, path.stem)


def _load_predictions(source):
    if source is None or isinstance(source, Mapping):
        return source
    with open(source, newline="", encoding="utf-8") as fh:
        return parse_predictions(fh)


def _one_run(args):
    manifest, oracle_spec, predictions, algorithm, index, run_index, seed = args
    oracle = bind(oracle_spec, manifest, predictions)
    try:
        if isinstance(algorithm, StsConfig):
            trace = run_sts(manifest, oracle, replace(algorithm, seed=seed), index=index)
        else:
            trace = run_random_search(manifest, oracle, seed, algorithm.stop)
    except Exception as exc:
        raise ExperimentError(seed, exc) from exc
    return RunResult(run_index, seed, trace)


def run_all(config: ExperimentConfig, manifest: Optional[SurveyManifest] = None,
            workers: int = 1) -> list[RunResult]:
    """Execute every run of an experiment, ordered by run index."""
    manifest = manifest if manifest is not None else load_manifest(config.manifest)
    predictions = _load_predictions(config.predictions)
    jobs = [(manifest, config.oracle, predictions, config.algorithm, config.index, i, config.base_seed + i)
            for i in range(config.repeats)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_one_run, jobs))
    return [_one_run(job) for job in jobs]


def aggregate(config: ExperimentConfig, manifest: SurveyManifest, results: list[RunResult]) -> AggregateStats:
    results = sorted(results, key=lambda r: r.run_index)
    runs = tuple(r.summary() for r in results)
    metrics = {m: MetricStats.of(run[m] for run in runs) for m in METRICS}
    return AggregateStats(config.describe(manifest), runs, metrics)


def run_experiment(config: ExperimentConfig, workers: int = 1) -> AggregateStats:
    manifest = load_manifest(config.manifest)
    return aggregate(config, manifest, run_all(config, manifest, workers))


def expected_random_fraction(n_images: int, n_positive: int, recall_target: float) -> float:
    """Expected fraction of a survey random search evaluates to reach a recall target.

    The r-th positive of a uniform random permutation sits at expected
    position r (N + 1) / (m + 1), where r is the smallest count with
    r / m >= recall_target.
    """
    if not 0 < n_positive <= n_images:
        raise ValueError(f"need 0 < n_positive <= n_images, got {n_positive}, {n_images}")
    if not 0 < recall_target <= 1:
        raise ValueError(f"recall_target must lie in (0, 1], got {recall_target}")
    r = min(n_positive, math.ceil(recall_target * n_positive))
    # Guard float round-off in the ceiling so r agrees with the stop rule's ratio test.
    while r > 1 and (r - 1) / n_positive >= recall_target:
        r -= 1
    while r / n_positive < recall_target:
        r += 1
    return r * (n_images + 1) / ((n_positive + 1) * n_images)


@dataclass(frozen=True)
class MetricDelta:
    mean_a: float
    mean_b: float
    delta: float  # mean_a - mean_b
    pooled_std: float
    passed: Optional[bool]  # None when no threshold was set for this metric


@dataclass(frozen=True)
class ComparisonReport:
    deltas: dict[str, MetricDelta]

    @property
    def passed(self) -> bool:
        return all(d.passed is not False for d in self.deltas.values())

    def to_json(self) -> dict:
        return _json_floats({"passed": self.passed, "metrics": {m: vars(d) for m, d in self.deltas.items()}})


def compare(a: AggregateStats, b: AggregateStats,
            thresholds: Optional[Mapping[str, tuple[Optional[float], Optional[float]]]] = None
            ) -> ComparisonReport:
    """Per-metric ``a - b`` deltas of the means.

    ``thresholds`` maps a metric to ``(low, high)`` bounds on its delta
    (either may be None); a metric passes when its delta lies within them.
    """
    if a.basis() != b.basis():
        raise ValueError(f"experiments are not comparable: {a.basis()} vs {b.basis()}")
    thresholds = thresholds or {}
    unknown = set(thresholds) - set(METRICS)
    if unknown:
        raise ValueError(f"unknown metrics in thresholds: {sorted(unknown)}")
    deltas = {}
    for m in METRICS:
        sa, sb = a[m], b[m]
        na, nb = len(a.runs), len(b.runs)
        if na + nb > 2:
            pooled = math.sqrt(((na - 1) * sa.std ** 2 + (nb - 1) * sb.std ** 2) / (na + nb - 2))
        else:
            pooled = 0.0
        delta = sa.mean - sb.mean
        verdict = None
        if m in thresholds:
            low, high = thresholds[m]
            verdict = (low is None or delta >= low) and (high is None or delta <= high)
        deltas[m] = MetricDelta(sa.mean, sb.mean, delta, pooled, verdict)
    return ComparisonReport(deltas)
