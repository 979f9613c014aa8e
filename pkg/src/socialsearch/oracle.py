"""Detection oracles: stand-ins for running a detector on an acquired image.

An oracle maps an image id to a predicted instance count and a positive flag.
Three flavours are provided:

* ground truth, positive iff the image has at least one annotated animal;
* precomputed predictions read from a CSV, positive iff the count exceeds a
  threshold (``> 5`` reproduces the "more than 5 predicted instances" rule);
* a noisy detector, ``Binomial(animals, detect_prob) + Poisson(fp_rate)``,
  drawn from a per-image stream so repeated evaluations agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Union

from . import seeding
from .survey import SurveyManifest


class UnknownImageError(KeyError):
    pass


class MissingPredictionError(ValueError):
    pass


@dataclass(frozen=True)
class DetectionResult:
    predicted_count: int
    is_positive: bool


@dataclass(frozen=True)
class GroundTruth:
    def describe(self):
        return {"kind": "ground-truth"}


@dataclass(frozen=True)
class Precomputed:
    threshold: int = 0

    def __post_init__(self):
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")

    def describe(self):
        return {"kind": "precomputed", "threshold": self.threshold}


@dataclass(frozen=True)
class Noisy:
    detect_prob: float
    fp_rate: float
    threshold: int = 0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.detect_prob <= 1.0:
            raise ValueError(f"detect_prob must lie in [0, 1], got {self.detect_prob}")
        if not self.fp_rate >= 0.0:
            raise ValueError(f"fp_rate must be >= 0, got {self.fp_rate}")
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")

    def describe(self):
        return {"kind": "noisy", "detect_prob": self.detect_prob, "fp_rate": self.fp_rate,
                "threshold": self.threshold, "seed": self.seed}


OracleSpec = Union[GroundTruth, Precomputed, Noisy]


class Oracle:
    """An oracle spec bound to the manifest (and predictions) it answers for."""

    def __init__(self, spec: OracleSpec, manifest: SurveyManifest,
                 predictions: Optional[Mapping[str, int]] = None):
        if isinstance(spec, Precomputed) and predictions is None:
            raise ValueError("precomputed oracle needs a predictions table")
        self.spec = spec
        self.manifest = manifest
        self.predictions = dict(predictions) if predictions is not None else None

    def evaluate(self, image_id: str) -> DetectionResult:
        if image_id not in self.manifest:
            raise UnknownImageError(image_id)
        spec = self.spec
        if isinstance(spec, GroundTruth):
            count = self.manifest[image_id].animal_count
            return DetectionResult(count, count > 0)
        if isinstance(spec, Precomputed):
            try:
                count = self.predictions[image_id]
            except KeyError:
                raise MissingPredictionError(f"no prediction row for image {image_id!r}") from None
            return DetectionResult(count, count > spec.threshold)
        rng = seeding.stream(spec.seed, seeding.DOMAIN_ORACLE, image_id)
        count = int(rng.binomial(self.manifest[image_id].animal_count, spec.detect_prob))
        count += int(rng.poisson(spec.fp_rate))
        return DetectionResult(count, count > spec.threshold)


def bind(spec: OracleSpec, manifest: SurveyManifest,
         predictions: Optional[Mapping[str, int]] = None) -> Oracle:
    return Oracle(spec, manifest, predictions)
