import pytest

from socialsearch.geo import Coordinate
from socialsearch.survey import ImageRecord, SurveyManifest

# Four positives within 0.3 degrees of each other; sixteen negatives on a
# coarse grid, every one more than 1 degree from everything else.
CLUSTER = {
    "img_03": ((70.0, -68.0), 2),
    "img_08": ((70.1, -68.0), 5),
    "img_11": ((70.0, -67.8), 1),
    "img_17": ((70.25, -67.95), 3),
}
GRID_LATS = (66.0, 68.0, 72.0, 74.0)
GRID_LONS = (-74.0, -71.0, -65.0, -62.0)


def make_fixture():
    negatives = [f"img_{i:02d}" for i in range(20) if f"img_{i:02d}" not in CLUSTER]
    grid = [(a, b) for a in GRID_LATS for b in GRID_LONS]
    recs = {nid: ImageRecord(nid, Coordinate(*xy), 0) for nid, xy in zip(negatives, grid)}
    for cid, (xy, count) in CLUSTER.items():
        recs[cid] = ImageRecord(cid, Coordinate(*xy), count)
    return SurveyManifest("fixture20", tuple(recs[k] for k in sorted(recs)))


@pytest.fixture
def fixture20():
    return make_fixture()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
