import os
from typing import List, Tuple

import pytest

# Keep a developer's .env from leaking into the suite
os.environ["PARETO_DEBUG_ASSERT"] = "false"

from pareto_preprocess.config import settings  # noqa: E402
from pareto_preprocess.core.schema import Instance, Point, QueueOrder, Region  # noqa: E402

Box = Tuple[str, float, float, float, float]


def make_instance(boxes: List[Box], points: List[Tuple[float, float]]) -> Instance:
    regions = [Region(id=i, xmin=a, ymin=b, xmax=c, ymax=d) for i, a, b, c, d in boxes]
    return Instance(
        regions=regions,
        points=[Point(x=x, y=y, id=r.id) for r, (x, y) in zip(regions, points)],
    )


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch):
    monkeypatch.setenv("PARETO_DEBUG_ASSERT", "false")
    monkeypatch.setattr(settings, "debug_assert", False)
    monkeypatch.setattr(settings, "queue_order", QueueOrder.FIFO)
    monkeypatch.setattr(settings, "retrieval_cost", 10.0)
    monkeypatch.setattr(settings, "ratio_retrieval", 8.0)
    monkeypatch.setattr(settings, "ratio_predicates", 8.0)


@pytest.fixture
def i1() -> Instance:
    return make_instance([("A", 0, 0, 1, 1)], [(0.5, 0.5)])


@pytest.fixture
def i2() -> Instance:
    return make_instance(
        [("A", 0, 0, 1, 1), ("B", 2, 2, 3, 3)], [(0.5, 0.5), (2.5, 2.5)]
    )


@pytest.fixture
def i3() -> Instance:
    return make_instance(
        [("A", 0, 4, 2, 6), ("B", 3, 0, 4, 6), ("C", 5, 1.5, 6, 3)],
        [(1, 4.5), (3.5, 5), (5.5, 2.9)],
    )


@pytest.fixture
def i4() -> Instance:
    return make_instance(
        [("A", 0, 8, 1, 9), ("B", 2, 6, 3, 7), ("C", 4, 4, 5, 5), ("D", 6, 0, 7, 9)],
        [(0.5, 8.5), (2.5, 6.5), (4.5, 4.5), (6.5, 0.5)],
    )


@pytest.fixture
def i5() -> Instance:
    return make_instance(
        [("A", 0, 6, 1, 7), ("B", 2, 4, 3, 5), ("C", 4, 2, 5, 3), ("D", 6, 0, 7, 1)],
        [(0.5, 6.5), (2.5, 4.5), (4.5, 2.5), (6.5, 0.5)],
    )


@pytest.fixture
def dead_blocker() -> Instance:
    # A's point dominates U, the only other region that looks down on T
    return make_instance(
        [("A", 0, 8, 4, 9), ("U", 0.2, 6, 1, 7), ("T", 0.5, 2, 5, 3)],
        [(3.9, 8.5), (0.6, 6.5), (4.5, 2.5)],
    )
