# %% [markdown]
# # Bounded nearest-neighbour queries
#
# The search expands from each positive image to its `k` nearest unevaluated
# neighbours that lie within distance `d`. This script builds the KD-tree on
# a handful of image centres and checks one query against a linear scan.

# %%
import numpy as np

from socialsearch import Coordinate, DistanceMetric, IndexedPoint, build, query_knn_within
from socialsearch.kdtree import brute_force_knn_within

rng = np.random.default_rng(0)
points = [IndexedPoint(f"img_{i:03d}", Coordinate(lat, lon))
          for i, (lat, lon) in enumerate(zip(rng.uniform(68, 72, 300), rng.uniform(-70, -62, 300)))]
tree = build(points)
print(f"{tree.size} points, depth {tree.depth}")

# %% [markdown]
# Ten nearest neighbours within 0.6 degrees of a query point. Distances are
# Euclidean in degree space, so 0.6 degrees is ~66 km north-south but only
# ~20 km east-west at these latitudes.

# %%
q = Coordinate(70.0, -66.0)
hits = query_knn_within(tree, q, k=10, d=0.6)
for p, dist in hits:
    print(f"  {p.image_id}  ({p.coord.lat:.3f}, {p.coord.lon:.3f})  {dist:.3f} deg")
assert hits == brute_force_knn_within(points, q, 10, 0.6)

# %% [markdown]
# The same query in kilometres with the haversine metric (66 km radius).

# %%
hav = query_knn_within(tree, q, k=10, d=66.0, metric=DistanceMetric.HAVERSINE_KM)
print(f"{len(hav)} neighbours within 66 km; farthest {hav[-1][1]:.1f} km" if hav else "none within 66 km")
