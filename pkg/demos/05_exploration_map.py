# %% [markdown]
# # Exporting an exploration map
#
# Every run can be written as a trace (one JSON object per evaluated image)
# and turned into a GeoJSON FeatureCollection for any map viewer. Colour the
# points by `positive` and `phase` to see random sampling give way to
# expansion around each cluster.

# %%
import io
import json

from socialsearch import GroundTruth, RecallTarget, StsConfig, SynthParams, bind, generate, run_sts
from socialsearch.export import read_trace, trace_to_geojson, write_trace

survey = generate(SynthParams(n_images=2000, seed=0))
trace = run_sts(survey, bind(GroundTruth(), survey), StsConfig(k=10, d=0.6, seed=3, stop=RecallTarget(0.95)))

buf = io.StringIO()
write_trace(trace.steps, buf)
steps = read_trace(io.StringIO(buf.getvalue()))
collection = trace_to_geojson(steps)
print(f"{len(collection['features'])} features; first:")
print(json.dumps(collection["features"][0], indent=1))
