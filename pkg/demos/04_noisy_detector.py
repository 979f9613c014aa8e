# %% [markdown]
# # Searching with an imperfect detector
#
# A real detector misses animals and hallucinates others. Here each image's
# predicted count is Binomial(animals, 0.7) + Poisson(0.5) and an image only
# counts as positive with more than 5 predicted instances. Missed positives
# break the chains the search follows, so five search passes are allowed.

# %%
from socialsearch import GroundTruth, Noisy, RecallTarget, StsConfig, SynthParams, generate
from socialsearch.harness import ExperimentConfig, run_experiment

survey = generate(SynthParams(n_images=2000, seed=0))
stop = RecallTarget(0.95)
rows = {
    "ground truth": ExperimentConfig(survey, StsConfig(k=10, d=0.6, stop=stop), GroundTruth(), repeats=10),
    "noisy, 5 passes": ExperimentConfig(survey, StsConfig(k=10, d=0.6, restarts=5, stop=stop),
                                        Noisy(detect_prob=0.7, fp_rate=0.5, threshold=5, seed=0), repeats=10),
}
for name, cfg in rows.items():
    s = run_experiment(cfg)
    print(f"{name:16s} analyzed {100 * s['pct_images_analyzed'].mean:5.1f}%  "
          f"positives found {100 * s['pct_positive_images_found'].mean:5.1f}%  "
          f"animals {100 * s['pct_animals_detected'].mean:5.1f}%")
