"""Social target search and the random-search baseline.

The search alternates two phases over the pool ``C`` of unevaluated images:

1. sample batches of ``k`` images uniformly without replacement until one of
   them is positive;
2. breadth-first expansion: pop the oldest positive, take its ``k`` nearest
   unevaluated neighbours within distance ``d``, evaluate all of them and
   queue the positive ones, until the queue drains.

A pass is one phase 1 followed by one phase 2. Passes repeat (sharing the
visited set) until the stop rule fires, the pool empties, or the configured
number of passes is spent. The stop rule is checked after every evaluation.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Union

from . import kdtree, seeding
from .geo import Coordinate
from .kdtree import IndexedPoint
from .oracle import DetectionResult, Oracle
from .survey import SurveyManifest


class EmptySurveyError(ValueError):
    pass


class Phase(str, enum.Enum):
    SAMPLE = "sample"
    BFS = "bfs"


class RecallBasis(str, enum.Enum):
    POSITIVE_IMAGES = "positive_images"
    ANIMALS = "animals"


@dataclass(frozen=True)
class Exhaust:
    def __str__(self):
        return "exhaust"


@dataclass(frozen=True)
class RecallTarget:
    """Stop once a fraction of the ground-truth positives has been evaluated.

    This peeks at the manifest's ground truth, so it is an evaluation device,
    not something a field deployment could use.
    """

    fraction: float
    basis: RecallBasis = RecallBasis.POSITIVE_IMAGES

    def __post_init__(self):
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError(f"recall fraction must lie in (0, 1], got {self.fraction}")
        object.__setattr__(self, "basis", RecallBasis(self.basis))

    def __str__(self):
        return f"recall:{self.fraction!r}:{self.basis.value}"


@dataclass(frozen=True)
class Budget:
    max_evaluations: int

    def __post_init__(self):
        if self.max_evaluations < 1:
            raise ValueError("budget must be a positive number of evaluations")

    def __str__(self):
        return f"budget:{self.max_evaluations}"


StopRule = Union[Exhaust, RecallTarget, Budget]


def parse_stop_rule(text: str) -> StopRule:
    """Parse ``exhaust``, ``budget:N`` or ``recall:F[:basis]``."""
    parts = text.strip().split(":")
    try:
        if parts == ["exhaust"]:
            return Exhaust()
        if parts[0] == "budget" and len(parts) == 2:
            return Budget(int(parts[1]))
        if parts[0] == "recall" and len(parts) in (2, 3):
            basis = RecallBasis(parts[2]) if len(parts) == 3 else RecallBasis.POSITIVE_IMAGES
            return RecallTarget(float(parts[1]), basis)
    except ValueError as exc:
        raise ValueError(f"bad stop rule {text!r}: {exc}") from None
    raise ValueError(f"bad stop rule {text!r}; expected exhaust, budget:N or recall:F:basis")


@dataclass(frozen=True)
class StsConfig:
    k: int = 10
    d: float = 0.6
    restarts: Optional[int] = None  # None: keep making passes until the stop rule fires or C is empty
    seed: int = 0
    stop: StopRule = field(default_factory=Exhaust)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not self.d >= 0:
            raise ValueError(f"d must be >= 0, got {self.d}")
        if self.restarts is not None and self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")

    def describe(self):
        return {"algorithm": "sts", "k": self.k, "d": self.d, "restarts": self.restarts,
                "seed": self.seed, "stop": str(self.stop)}


@dataclass(frozen=True)
class TraceStep:
    step_index: int
    image_id: str
    coord: Coordinate
    phase: Phase
    parent_image_id: Optional[str]
    result: DetectionResult

    def to_json(self):
        return {
            "step_index": self.step_index,
            "image_id": self.image_id,
            "lat": self.coord.lat,
            "lon": self.coord.lon,
            "phase": self.phase.value,
            "parent_image_id": self.parent_image_id,
            "predicted_count": self.result.predicted_count,
            "is_positive": self.result.is_positive,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            step_index=int(obj["step_index"]),
            image_id=str(obj["image_id"]),
            coord=Coordinate(obj["lat"], obj["lon"]),
            phase=Phase(obj["phase"]),
            parent_image_id=obj.get("parent_image_id"),
            result=DetectionResult(int(obj["predicted_count"]), bool(obj["is_positive"])),
        )


@dataclass
class RunTrace:
    steps: list[TraceStep]
    config: dict
    totals: dict
    positives_found: int = 0
    animals_found: int = 0
    stop_reason: str = "exhausted"  # "stop_rule", "exhausted" (C empty) or "passes" (restart budget spent)
    passes: int = 0

    @property
    def n_evaluated(self) -> int:
        return len(self.steps)

    @property
    def recall_unreachable(self) -> bool:
        """A recall target was set but the run ended without meeting it."""
        return self.config.get("stop", "").startswith("recall") and self.stop_reason != "stop_rule"

    def metrics(self) -> dict:
        return {
            "pct_images_analyzed": _ratio(self.n_evaluated, self.totals["n_images"]),
            "pct_positive_images_found": _ratio(self.positives_found, self.totals["n_positive"]),
            "pct_animals_detected": _ratio(self.animals_found, self.totals["n_animals"]),
        }


def _ratio(num, den):
    return num / den if den else math.nan


class _StopSearch(Exception):
    pass


class _Evaluator:
    """Evaluates images, records trace steps and applies the stop rule."""

    def __init__(self, manifest: SurveyManifest, oracle: Oracle, stop: StopRule, trace: RunTrace):
        self.manifest = manifest
        self.oracle = oracle
        self.stop = stop
        self.trace = trace
        self.n_positive = manifest.n_positive
        self.n_animals = manifest.n_animals

    def __call__(self, image_id, phase, parent=None) -> DetectionResult:
        result = self.oracle.evaluate(image_id)
        rec = self.manifest[image_id]
        trace = self.trace
        trace.steps.append(TraceStep(len(trace.steps), image_id, rec.coord, phase, parent, result))
        if rec.animal_count > 0:
            trace.positives_found += 1
            trace.animals_found += rec.animal_count
        if self._should_stop():
            trace.stop_reason = "stop_rule"
            raise _StopSearch
        return result

    def _should_stop(self):
        stop = self.stop
        if isinstance(stop, Budget):
            return self.trace.n_evaluated >= stop.max_evaluations
        if isinstance(stop, RecallTarget):
            if stop.basis is RecallBasis.POSITIVE_IMAGES:
                found, total = self.trace.positives_found, self.n_positive
            else:
                found, total = self.trace.animals_found, self.n_animals
            return total > 0 and found / total >= stop.fraction
        return False


def _check_inputs(manifest, oracle):
    if manifest.n_images == 0:
        raise EmptySurveyError("cannot search an empty survey")
    if oracle.manifest is not manifest and oracle.manifest != manifest:
        raise ValueError("oracle is bound to a different manifest")


def run_sts(manifest: SurveyManifest, oracle: Oracle, config: StsConfig,
            *, index: str = "rebuild") -> RunTrace:
    """Run one social target search.

    ``index="rebuild"`` rebuilds the KD-tree over the remaining pool before
    every expansion. ``index="tombstone"`` builds it once and hides visited
    images at query time; both produce identical traces.
    """
    if index not in ("rebuild", "tombstone"):
        raise ValueError(f"unknown index strategy {index!r}")
    _check_inputs(manifest, oracle)
    trace = RunTrace([], config.describe(), manifest.totals())
    evaluate = _Evaluator(manifest, oracle, config.stop, trace)
    rng = seeding.stream(config.seed, seeding.DOMAIN_SAMPLING)
    points = {r.image_id: IndexedPoint(r.image_id, r.coord) for r in manifest.records}
    remaining = set(points)
    queue: deque[str] = deque()
    metric = manifest.metric
    full_tree = kdtree.build(points.values()) if index == "tombstone" else None

    try:
        while remaining and (config.restarts is None or trace.passes < config.restarts):
            trace.passes += 1

            while not queue and remaining:
                pool = sorted(remaining)
                picks = rng.permutation(len(pool))[: min(config.k, len(pool))]
                batch = [pool[i] for i in picks]
                for image_id in batch:
                    remaining.discard(image_id)
                    if evaluate(image_id, Phase.SAMPLE).is_positive:
                        queue.append(image_id)

            while queue:
                parent = queue.popleft()
                if not remaining:
                    continue
                if full_tree is None:
                    tree = kdtree.build(points[i] for i in remaining)
                    hits = kdtree.query_knn_within(tree, points[parent].coord, config.k,
                                                   config.d, metric)
                else:
                    hits = kdtree.query_knn_within(full_tree, points[parent].coord, config.k,
                                                   config.d, metric,
                                                   exclude=lambda i: i not in remaining)
                for p, _ in hits:
                    assert p.image_id != parent
                    remaining.discard(p.image_id)
                    if evaluate(p.image_id, Phase.BFS, parent).is_positive:
                        queue.append(p.image_id)
    except _StopSearch:
        return trace

    trace.stop_reason = "exhausted" if not remaining else "passes"
    return trace


@dataclass(frozen=True)
class RandomSearchConfig:
    seed: int = 0
    stop: StopRule = field(default_factory=Exhaust)

    def describe(self):
        return {"algorithm": "random", "seed": self.seed, "stop": str(self.stop)}


def run_random_search(manifest: SurveyManifest, oracle: Oracle, seed: int = 0,
                      stop: StopRule = Exhaust()) -> RunTrace:
    """Evaluate images in a uniformly random order until ``stop`` fires."""
    _check_inputs(manifest, oracle)
    trace = RunTrace([], RandomSearchConfig(seed, stop).describe(), manifest.totals())
    evaluate = _Evaluator(manifest, oracle, stop, trace)
    rng = seeding.stream(seed, seeding.DOMAIN_SAMPLING)
    pool = sorted(r.image_id for r in manifest.records)
    trace.passes = 1
    try:
        for i in rng.permutation(len(pool)):
            evaluate(pool[i], Phase.SAMPLE)
    except _StopSearch:
        return trace
    trace.stop_reason = "exhausted"
    return trace
