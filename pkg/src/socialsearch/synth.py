"""Synthetic surveys with clustered positive images (Thomas cluster process).

Parent centres are uniform in the bounding box. Each parent scatters a
Poisson number of positive images with isotropic Gaussian offsets, clipped to
the box. Every positive carries ``1 + Poisson(animals_per_positive_mean - 1)``
animals. The rest of the survey is uniform background with no animals.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import seeding
from .geo import Coordinate, DistanceMetric
from .survey import ImageRecord, SurveyManifest


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class SynthParams:
    n_images: int
    bbox: tuple[float, float, float, float] = (60.0, 75.0, -90.0, -60.0)  # lat_min, lat_max, lon_min, lon_max
    n_clusters: int = 5
    positives_per_cluster_mean: float = 40.0
    cluster_radius: float = 0.15
    animals_per_positive_mean: float = 4.0
    seed: int = 0
    overflow: str = "error"  # or "saturate": keep only the first n_images positives

    def __post_init__(self):
        object.__setattr__(self, "bbox", tuple(float(v) for v in self.bbox))
        lat_min, lat_max, lon_min, lon_max = self.bbox
        if self.n_images < 1:
            raise SynthError("n_images must be positive")
        if not (lat_min < lat_max and lon_min < lon_max):
            raise SynthError(f"degenerate bbox {self.bbox}")
        Coordinate(lat_min, lon_min), Coordinate(lat_max, lon_max)
        if self.n_clusters < 0:
            raise SynthError("n_clusters must be >= 0")
        if self.positives_per_cluster_mean <= 0:
            raise SynthError("positives_per_cluster_mean must be positive")
        if self.cluster_radius < 0:
            raise SynthError("cluster_radius must be >= 0")
        if self.animals_per_positive_mean < 1:
            raise SynthError("animals_per_positive_mean must be >= 1")
        if self.overflow not in ("error", "saturate"):
            raise SynthError(f"overflow must be 'error' or 'saturate', got {self.overflow!r}")

    def describe(self):
        out = asdict(self)
        out["bbox"] = list(self.bbox)
        return out


def generate(params: SynthParams, name: str | None = None,
             metric: DistanceMetric = DistanceMetric.DEGREE_EUCLIDEAN) -> SurveyManifest:
    rng = seeding.stream(params.seed, seeding.DOMAIN_SYNTH)
    lat_min, lat_max, lon_min, lon_max = params.bbox
    lo = np.array([lat_min, lon_min])
    hi = np.array([lat_max, lon_max])

    parents = rng.uniform(lo, hi, size=(params.n_clusters, 2))
    sizes = rng.poisson(params.positives_per_cluster_mean, size=params.n_clusters)
    n_drawn = int(sizes.sum())
    if n_drawn > params.n_images and params.overflow == "error":
        raise SynthError(
            f"{n_drawn} positives generated for a {params.n_images}-image survey; "
            "lower n_clusters or positives_per_cluster_mean")

    offsets = rng.normal(0.0, params.cluster_radius, size=(n_drawn, 2))
    positives = np.clip(np.repeat(parents, sizes, axis=0) + offsets, lo, hi)
    counts = 1 + rng.poisson(params.animals_per_positive_mean - 1, size=n_drawn)
    n_pos = min(n_drawn, params.n_images)
    positives, counts = positives[:n_pos], counts[:n_pos]
    background = rng.uniform(lo, hi, size=(params.n_images - n_pos, 2))

    coords = np.clip(np.round(np.vstack([positives, background]), 8), lo, hi)
    animals = np.concatenate([counts, np.zeros(params.n_images - n_pos, dtype=counts.dtype)])
    # Shuffle so image ids carry no information about cluster membership.
    order = rng.permutation(params.n_images)
    width = max(5, len(str(params.n_images - 1)))
    records = tuple(
        ImageRecord(f"img_{i:0{width}d}", Coordinate(float(coords[j, 0]), float(coords[j, 1])),
                    int(animals[j]))
        for i, j in enumerate(order)
    )
    return SurveyManifest(name or f"synth-{params.seed}", records, metric)
