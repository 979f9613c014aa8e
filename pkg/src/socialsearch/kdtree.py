"""Two-dimensional KD-tree with bounded k-nearest-neighbour queries.

Nodes split at the median, alternating latitude (even depth) and longitude
(odd depth). Ties on the split axis are ordered by the other axis and then by
image id, so a build is fully determined by the set of points it is given.

Query results are ordered by (distance, image_id) and contain at most ``k``
points with distance <= ``d``. The pruning bound is inclusive, so a query
returns exactly what a linear scan followed by a stable sort would.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional

from .geo import Coordinate, DistanceMetric, degree_margins, distance


class DuplicateImageIdError(ValueError):
    pass


@dataclass(frozen=True)
class IndexedPoint:
    image_id: str
    coord: Coordinate


class _Node:
    __slots__ = ("point", "axis", "value", "left", "right")

    def __init__(self, point: IndexedPoint, axis: int, left, right):
        self.point = point
        self.axis = axis
        self.value = point.coord.lat if axis == 0 else point.coord.lon
        self.left = left
        self.right = right


def _lat_key(p: IndexedPoint):
    return (p.coord.lat, p.coord.lon, p.image_id)


def _lon_key(p: IndexedPoint):
    return (p.coord.lon, p.coord.lat, p.image_id)


class KdTree:
    """Immutable KD-tree. Build with :func:`build`."""

    def __init__(self, root: Optional[_Node], size: int):
        self._root = root
        self.size = size

    def __len__(self):
        return self.size

    @property
    def depth(self) -> int:
        def _depth(node):
            if node is None:
                return 0
            return 1 + max(_depth(node.left), _depth(node.right))

        return _depth(self._root)

    def __iter__(self) -> Iterator[IndexedPoint]:
        """In-order traversal (left subtree, node, right subtree)."""
        stack = []
        node = self._root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            yield node.point
            node = node.right

    def check_invariants(self):
        """Raise AssertionError if any node violates the split ordering."""

        def _walk(node):
            if node is None:
                return []
            left = _walk(node.left)
            right = _walk(node.right)
            ax = node.axis
            for p in left:
                assert tuple(p.coord)[ax] <= node.value, (p, node.point)
            for p in right:
                assert tuple(p.coord)[ax] >= node.value, (p, node.point)
            return left + [node.point] + right

        _walk(self._root)


def build(points: Iterable[IndexedPoint]) -> KdTree:
    points = list(points)
    seen = set()
    for p in points:
        if p.image_id in seen:
            raise DuplicateImageIdError(f"duplicate image_id {p.image_id!r}")
        seen.add(p.image_id)

    # Presort once per axis; each level partitions both lists stably, so the
    # whole build is O(n log n).
    by_lat = sorted(points, key=_lat_key)
    by_lon = sorted(points, key=_lon_key)
    root = _build(by_lat, by_lon, 0)
    return KdTree(root, len(points))


def _build(by_lat, by_lon, depth):
    n = len(by_lat)
    if n == 0:
        return None
    axis = depth % 2
    primary, secondary = (by_lat, by_lon) if axis == 0 else (by_lon, by_lat)
    mid = n // 2
    median = primary[mid]
    if n == 1:
        return _Node(median, axis, None, None)
    left_ids = {p.image_id for p in primary[:mid]}
    left_p, right_p = primary[:mid], primary[mid + 1:]
    left_s, right_s = [], []
    for p in secondary:
        if p.image_id in left_ids:
            left_s.append(p)
        elif p is not median:
            right_s.append(p)
    if axis == 0:
        left = _build(left_p, left_s, depth + 1)
        right = _build(right_p, right_s, depth + 1)
    else:
        left = _build(left_s, left_p, depth + 1)
        right = _build(right_s, right_p, depth + 1)
    return _Node(median, axis, left, right)


def query_knn_within(
    tree: KdTree,
    q: Coordinate,
    k: int,
    d: float,
    metric: DistanceMetric = DistanceMetric.DEGREE_EUCLIDEAN,
    *,
    exclude: Optional[Callable[[str], bool]] = None,
) -> list[tuple[IndexedPoint, float]]:
    """The ``k`` nearest points to ``q`` with distance <= ``d``.

    ``exclude`` optionally hides points by image id, which lets a caller keep
    one tree and tombstone visited points instead of rebuilding.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if d < 0 or math.isnan(d):
        raise ValueError(f"d must be >= 0, got {d}")
    if tree._root is None:
        return []

    best: list[tuple[float, str, IndexedPoint]] = []
    qv = (q.lat, q.lon)
    margins = list(degree_margins(metric, q, d))
    bound = d

    def visit(node):
        nonlocal bound
        p = node.point
        if exclude is None or not exclude(p.image_id):
            dist = distance(metric, q, p.coord)
            if dist <= bound:
                entry = (dist, p.image_id, p)
                if len(best) < k:
                    bisect.insort(best, entry)
                elif entry < best[-1]:
                    bisect.insort(best, entry)
                    best.pop()
                if len(best) == k and best[-1][0] < bound:
                    bound = best[-1][0]
                    margins[:] = degree_margins(metric, q, bound)
        diff = qv[node.axis] - node.value
        near, far = (node.left, node.right) if diff < 0 else (node.right, node.left)
        if near is not None:
            visit(near)
        # A far-side point is at least |diff| away along this axis; ties at
        # exactly the bound may still win on image id, so prune strictly.
        if far is not None and abs(diff) <= margins[node.axis]:
            visit(far)

    visit(tree._root)
    return [(p, dist) for dist, _, p in best]


def brute_force_knn_within(
    points: Iterable[IndexedPoint],
    q: Coordinate,
    k: int,
    d: float,
    metric: DistanceMetric = DistanceMetric.DEGREE_EUCLIDEAN,
) -> list[tuple[IndexedPoint, float]]:
    """Linear-scan reference for :func:`query_knn_within`."""
    hits = []
    for p in points:
        dist = distance(metric, q, p.coord)
        if dist <= d:
            hits.append((dist, p.image_id, p))
    hits.sort(key=lambda h: (h[0], h[1]))
    return [(p, dist) for dist, _, p in hits[:k]]
