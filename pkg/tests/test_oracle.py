import pytest
from hypothesis import given, settings, strategies as st

from socialsearch.geo import Coordinate
from socialsearch.oracle import (GroundTruth, MissingPredictionError, Noisy, Precomputed,
                                 UnknownImageError, bind)
from socialsearch.survey import ImageRecord, SurveyManifest
from socialsearch.synth import SynthParams, generate


def manifest_of(*counts):
    return SurveyManifest("m", tuple(ImageRecord(f"i{n}", Coordinate(70, -68 + n * 0.01), c)
                                     for n, c in enumerate(counts)))


def test_ground_truth():
    o = bind(GroundTruth(), manifest_of(0, 4))
    assert (o.evaluate("i0").predicted_count, o.evaluate("i0").is_positive) == (0, False)
    assert (o.evaluate("i1").predicted_count, o.evaluate("i1").is_positive) == (4, True)


def test_precomputed_threshold_is_strict():
    o = bind(Precomputed(threshold=5), manifest_of(0, 0), {"i0": 5, "i1": 6})
    assert o.evaluate("i0").is_positive is False
    assert o.evaluate("i1").is_positive is True


def test_precomputed_missing_row():
    o = bind(Precomputed(5), manifest_of(0, 0), {"i0": 1})
    with pytest.raises(MissingPredictionError, match="i1"):
        o.evaluate("i1")


def test_precomputed_requires_table():
    with pytest.raises(ValueError):
        bind(Precomputed(5), manifest_of(0))


def test_unknown_image():
    with pytest.raises(UnknownImageError):
        bind(GroundTruth(), manifest_of(0)).evaluate("nope")


def test_noisy_degenerate_is_ground_truth():
    o = bind(Noisy(1.0, 0.0, threshold=0, seed=3), manifest_of(7))
    r = o.evaluate("i0")
    assert (r.predicted_count, r.is_positive) == (7, True)


@pytest.mark.parametrize("kwargs", [dict(detect_prob=1.1, fp_rate=0), dict(detect_prob=0.5, fp_rate=-1),
                                    dict(detect_prob=0.5, fp_rate=0, threshold=-1)])
def test_noisy_validation(kwargs):
    with pytest.raises(ValueError):
        Noisy(**kwargs)


def test_noisy_idempotent_and_seeded():
    m = generate(SynthParams(300, seed=2))
    a = bind(Noisy(0.7, 0.5, 5, seed=1), m)
    again = bind(Noisy(0.7, 0.5, 5, seed=1), m)
    other = bind(Noisy(0.7, 0.5, 5, seed=2), m)
    ids = [r.image_id for r in m.records]
    first = [a.evaluate(i) for i in ids]
    assert first == [a.evaluate(i) for i in reversed(ids)][::-1]
    assert first == [again.evaluate(i) for i in ids]
    assert first != [other.evaluate(i) for i in ids]


def test_noisy_moments():
    # Binomial(10, 0.7) + Poisson(0.5): mean 7.5, variance 2.1 + 0.5
    m = manifest_of(*([10] * 4000))
    o = bind(Noisy(0.7, 0.5, seed=9), m)
    counts = [o.evaluate(r.image_id).predicted_count for r in m.records]
    mean = sum(counts) / len(counts)
    var = sum((c - mean) ** 2 for c in counts) / (len(counts) - 1)
    assert abs(mean - 7.5) < 4 * (2.6 / 4000) ** 0.5
    assert abs(var - 2.6) < 0.25


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 8), st.integers(0, 8))
def test_threshold_monotone(seed, t1, t2):
    lo, hi = sorted((t1, t2))
    m = generate(SynthParams(60, n_clusters=2, positives_per_cluster_mean=8, seed=seed % 100))
    o_lo = bind(Noisy(0.6, 1.5, lo, seed), m)
    o_hi = bind(Noisy(0.6, 1.5, hi, seed), m)
    for r in m.records:
        assert not (o_hi.evaluate(r.image_id).is_positive and not o_lo.evaluate(r.image_id).is_positive)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 1000))
def test_degenerate_noisy_equals_ground_truth_on_any_survey(seed):
    m = generate(SynthParams(80, n_clusters=3, positives_per_cluster_mean=5, seed=seed))
    gt, nz = bind(GroundTruth(), m), bind(Noisy(1.0, 0.0, 0, seed), m)
    assert all(gt.evaluate(r.image_id) == nz.evaluate(r.image_id) for r in m.records)
