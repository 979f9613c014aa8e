"""Social target search over geo-referenced survey images."""

from .geo import Coordinate, DistanceMetric, distance
from .kdtree import IndexedPoint, KdTree, build, query_knn_within
from .oracle import DetectionResult, GroundTruth, Noisy, Precomputed, bind
from .search import (Budget, Exhaust, Phase, RecallBasis, RecallTarget, RunTrace, StsConfig,
                     TraceStep, parse_stop_rule, run_random_search, run_sts)
from .survey import ImageRecord, SurveyManifest, parse_manifest, write_manifest
from .synth import SynthParams, generate

__version__ = "0.1.0"
