# %% [markdown]
# # Social target search against random search
#
# Both strategies run until 95% of the images containing animals have been
# evaluated. Random search has to look at ~95% of the survey to get there;
# the social search spends its budget around the clusters it finds.

# %%
from socialsearch import GroundTruth, RecallTarget, StsConfig, SynthParams, generate
from socialsearch.harness import ExperimentConfig, compare, expected_random_fraction, run_experiment
from socialsearch.search import RandomSearchConfig

survey = generate(SynthParams(n_images=2000, seed=0))
stop = RecallTarget(0.95)

sts = run_experiment(ExperimentConfig(survey, StsConfig(k=10, d=0.6, stop=stop), GroundTruth(), repeats=10))
rnd = run_experiment(ExperimentConfig(survey, RandomSearchConfig(stop=stop), GroundTruth(), repeats=10))

for name, stats in (("social search", sts), ("random search", rnd)):
    a, w = stats["pct_images_analyzed"], stats["pct_animals_detected"]
    print(f"{name:14s} analyzed {100 * a.mean:5.1f} +- {100 * a.std:.1f}%   "
          f"animals {100 * w.mean:5.1f} +- {100 * w.std:.1f}%")

# %% [markdown]
# Random search has a closed form: the r-th of m positives in a random
# ordering of N images sits at position r (N + 1) / (m + 1) on average.

# %%
print("analytic random fraction: %.4f" % expected_random_fraction(survey.n_images, survey.n_positive, 0.95))
report = compare(sts, rnd, {"pct_images_analyzed": (None, -0.30)})
print("analyzed delta %.3f, verdict %s" % (report.deltas["pct_images_analyzed"].delta, report.passed))
