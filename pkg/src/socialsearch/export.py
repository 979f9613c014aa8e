"""Trace files (one JSON step per line) and GeoJSON exploration maps."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, TextIO

from .search import TraceStep


class TraceFormatError(ValueError):
    pass


def write_trace(steps: Iterable[TraceStep], sink: TextIO) -> None:
    for step in steps:
        sink.write(json.dumps(step.to_json(), sort_keys=True) + "\n")


def read_trace(source: TextIO) -> list[TraceStep]:
    steps = []
    for lineno, line in enumerate(source, 1):
        if not line.strip():
            continue
        try:
            steps.append(TraceStep.from_json(json.loads(line)))
        except (ValueError, KeyError, TypeError) as exc:
            raise TraceFormatError(f"line {lineno}: {exc}") from None
    for i, step in enumerate(steps):
        if step.step_index != i:
            raise TraceFormatError(f"step {i} has step_index {step.step_index}")
    return steps


def trace_to_geojson(steps: Iterable[TraceStep]) -> dict:
    features = [
        {
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [s.coord.lon, s.coord.lat]},
            "properties": {
                "step_index": s.step_index,
                "image_id": s.image_id,
                "phase": s.phase.value,
                "positive": s.result.is_positive,
                "parent_image_id": s.parent_image_id,
            },
        }
        for s in steps
    ]
    return {"type": "FeatureCollection", "features": features}


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
