"""Trace checks shared by the search property tests and the acceptance suite."""

from socialsearch.geo import distance
from socialsearch.search import Phase


def check_trace(trace, manifest, k, d):
    steps = trace.steps
    ids = [s.image_id for s in steps]
    assert len(ids) == len(set(ids)), "an image was evaluated twice"
    assert [s.step_index for s in steps] == list(range(len(steps)))

    positive_at = {}
    per_parent = {}
    last_parent_rank = -1
    for t, s in enumerate(steps):
        if s.phase is Phase.SAMPLE:
            assert s.parent_image_id is None
        else:
            parent = s.parent_image_id
            assert parent in positive_at, "expanded an image that was not an earlier positive"
            assert distance(manifest.metric, manifest[parent].coord, s.coord) <= d, "neighbour beyond d"
            rank = positive_at[parent]
            assert rank >= last_parent_rank, "parents not dequeued in FIFO order"
            last_parent_rank = rank
            per_parent[parent] = per_parent.get(parent, 0) + 1
            assert per_parent[parent] <= k
        if s.result.is_positive:
            positive_at[s.image_id] = len(positive_at)

    assert trace.n_evaluated == len(steps)
    gt_pos = [manifest[i].animal_count > 0 for i in ids]
    assert trace.positives_found == sum(gt_pos)
    assert trace.animals_found == sum(manifest[i].animal_count for i in ids)
