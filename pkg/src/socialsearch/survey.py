"""Survey manifests: the candidate image centres plus per-image ground truth.

Manifest CSV (UTF-8) header: ``image_id,lat,lon,animal_count``.
Predictions CSV header: ``image_id,predicted_count``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, TextIO

from .geo import Coordinate, DistanceMetric, InvalidCoordinateError

MANIFEST_HEADER = ["image_id", "lat", "lon", "animal_count"]
PREDICTIONS_HEADER = ["image_id", "predicted_count"]


class ManifestError(ValueError):
    """Malformed manifest or predictions data. ``row`` is the 1-based CSV line, if known."""

    def __init__(self, message, row=None):
        self.row = row
        super().__init__(f"row {row}: {message}" if row is not None else message)


@dataclass(frozen=True)
class ImageRecord:
    image_id: str
    coord: Coordinate
    animal_count: int

    def __post_init__(self):
        if self.animal_count < 0:
            raise ValueError(f"{self.image_id}: animal_count must be >= 0")


@dataclass(frozen=True)
class SurveyManifest:
    name: str
    records: tuple[ImageRecord, ...]
    metric: DistanceMetric = DistanceMetric.DEGREE_EUCLIDEAN
    _by_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        records = tuple(self.records)
        object.__setattr__(self, "records", records)
        by_id = {}
        for rec in records:
            if rec.image_id in by_id:
                raise ManifestError(f"duplicate image_id {rec.image_id!r}")
            by_id[rec.image_id] = rec
        object.__setattr__(self, "_by_id", by_id)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, image_id: str) -> ImageRecord:
        return self._by_id[image_id]

    def __contains__(self, image_id):
        return image_id in self._by_id

    @property
    def n_images(self) -> int:
        return len(self.records)

    @property
    def n_positive(self) -> int:
        return sum(1 for r in self.records if r.animal_count > 0)

    @property
    def n_animals(self) -> int:
        return sum(r.animal_count for r in self.records)

    def totals(self) -> dict:
        return {"n_images": self.n_images, "n_positive": self.n_positive, "n_animals": self.n_animals}


def _parse_int(text, what, row):
    try:
        value = int(text)
    except ValueError:
        raise ManifestError(f"{what} {text!r} is not an integer", row) from None
    if value < 0:
        raise ManifestError(f"{what} {value} is negative", row)
    return value


def _parse_float(text, what, row):
    try:
        value = float(text)
    except ValueError:
        raise ManifestError(f"{what} {text!r} is not a number", row) from None
    if not math.isfinite(value):
        raise ManifestError(f"{what} {text!r} is not finite", row)
    return value


def _rows(source: TextIO, header: list[str]):
    reader = csv.reader(source)
    try:
        first = next(reader)
    except StopIteration:
        raise ManifestError("empty input, expected header " + ",".join(header), 1) from None
    if first != header:
        raise ManifestError(f"header {first!r} does not match {','.join(header)!r}", 1)
    for row in reader:
        if not row:
            continue
        if len(row) != len(header):
            raise ManifestError(f"expected {len(header)} columns, got {len(row)}", reader.line_num)
        yield reader.line_num, row


def parse_manifest(
    source: TextIO,
    metric: DistanceMetric = DistanceMetric.DEGREE_EUCLIDEAN,
    name: str = "survey",
) -> SurveyManifest:
    records = []
    seen = set()
    for line, (image_id, lat, lon, count) in _rows(source, MANIFEST_HEADER):
        if not image_id:
            raise ManifestError("empty image_id", line)
        if image_id in seen:
            raise ManifestError(f"duplicate image_id {image_id!r}", line)
        seen.add(image_id)
        try:
            coord = Coordinate(_parse_float(lat, "lat", line), _parse_float(lon, "lon", line))
        except InvalidCoordinateError as exc:
            raise ManifestError(str(exc), line) from None
        records.append(ImageRecord(image_id, coord, _parse_int(count, "animal_count", line)))
    return SurveyManifest(name, tuple(records), metric)


def format_degrees(value: float) -> str:
    """Shortest fixed-point text (at most 8 fraction digits) that reads back as ``value``."""
    text = f"{value:.8f}".rstrip("0")
    if text.endswith("."):
        text += "0"
    if float(text) != value:
        text = repr(value)
    return text


def write_manifest(manifest: SurveyManifest, sink: TextIO) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(MANIFEST_HEADER)
    for rec in manifest.records:
        writer.writerow([rec.image_id, format_degrees(rec.coord.lat),
                         format_degrees(rec.coord.lon), rec.animal_count])


def parse_predictions(source: TextIO) -> dict[str, int]:
    predictions = {}
    for line, (image_id, count) in _rows(source, PREDICTIONS_HEADER):
        if image_id in predictions:
            raise ManifestError(f"duplicate image_id {image_id!r}", line)
        predictions[image_id] = _parse_int(count, "predicted_count", line)
    return predictions


def write_predictions(predictions: Iterable[tuple[str, int]], sink: TextIO) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(PREDICTIONS_HEADER)
    for image_id, count in predictions:
        writer.writerow([image_id, int(count)])
