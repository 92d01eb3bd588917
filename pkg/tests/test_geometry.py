import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pareto_preprocess.core.errors import (
    ContainmentViolation,
    GeneralPositionViolation,
    InvariantViolation,
)
from pareto_preprocess.core.geometry import (
    BoundaryLocator,
    clip_region,
    dominates,
    dominates_region,
    guaranteed_boundary,
    halfslab_intersects,
    intervals_overlap,
    pareto_front_bruteforce,
    staircase_of,
    validate_instance,
)
from pareto_preprocess.core.schema import Orientation, Point, Region, RegionKind

from conftest import make_instance


def P(x, y):
    return Point(x=x, y=y)


def test_dominates_examples():
    assert dominates(P(2, 2), P(1, 1))
    assert dominates(P(1, 1), P(1, 1))
    assert not dominates(P(2, 0), P(1, 1))


def test_dominates_region_examples(i3):
    a = i3.regions[0]
    assert dominates_region(P(5, 7), a)
    assert not dominates_region(P(1.9, 7), a)
    truncated_b = Region(id="B", xmin=3, ymin=1.5, xmax=4, ymax=6)
    assert not dominates_region(P(5.5, 2.9), truncated_b)


def test_pareto_front_bruteforce_fixtures(i2, i3, i4):
    assert pareto_front_bruteforce(i2.points).coords() == [(2.5, 2.5)]
    assert pareto_front_bruteforce(i3.points).coords() == [(3.5, 5), (5.5, 2.9)]
    assert len(pareto_front_bruteforce(i4.points)) == 4


def test_staircase_sweep_matches_bruteforce(i3, i4):
    for inst in (i3, i4):
        assert staircase_of(inst.points).coords() == pareto_front_bruteforce(
            inst.points
        ).coords()


def test_guaranteed_boundary_fixtures(i2, i3, i5):
    assert guaranteed_boundary(i2.regions).coords() == [(2, 2)]
    assert guaranteed_boundary(i3.regions).coords() == [(0, 4), (5, 1.5)]
    assert len(guaranteed_boundary(i5.regions)) == 4


def test_halfslab_examples(i3):
    a, b, c = i3.regions
    assert halfslab_intersects(b, a, Orientation.HORIZONTAL)
    assert not halfslab_intersects(a, b, Orientation.VERTICAL)
    assert not halfslab_intersects(c, a, Orientation.HORIZONTAL)
    assert not halfslab_intersects(a, a, Orientation.HORIZONTAL)


def test_touching_intervals_do_not_overlap():
    assert not intervals_overlap(0, 1, 1, 2)
    assert intervals_overlap(0, 2, 1, 3)
    assert intervals_overlap(1.5, 1.5, 1, 2)
    assert not intervals_overlap(1, 1, 1, 2)


def test_clip_region_strips_and_death():
    r = Region(id="r", xmin=0, ymin=0, xmax=2, ymax=2)
    assert clip_region(r, [P(3, 1)]).ymin == 1
    assert clip_region(r, [P(1, 3)]).xmin == 1
    assert clip_region(r, [P(2, 2)]) is None
    assert clip_region(r, [P(-1, 5)]) is r
    with pytest.raises(InvariantViolation):
        clip_region(r, [P(1, 1)])


def test_boundary_locator_agrees_with_clip_region(i3, i4, i5):
    for inst in (i3, i4, i5):
        boundary = guaranteed_boundary(inst.regions)
        locator = BoundaryLocator(boundary)
        for r in inst.regions:
            others = [v for v in boundary.vertices if v.xy != r.bottom_left.xy]
            assert locator.clip(r) == clip_region(r, others)


def test_locator_truncates_b_of_i3(i3):
    locator = BoundaryLocator(guaranteed_boundary(i3.regions))
    clipped = locator.clip(i3.regions[1])
    assert (clipped.xmin, clipped.ymin, clipped.xmax, clipped.ymax) == (3, 1.5, 4, 6)


def test_point_region_is_never_its_own_dominator():
    q = Region.from_point("q", P(5, 5))
    assert q.kind == RegionKind.POINT
    locator = BoundaryLocator(staircase_of([P(0, 10), P(5, 5)]))
    assert locator.clip(q) is q


def test_validate_instance_passes_fixtures(i1, i2, i3, i4, i5):
    for inst in (i1, i2, i3, i4, i5):
        assert validate_instance(inst).ok


def test_validate_reports_containment(i3):
    bad = make_instance(
        [("A", 0, 4, 2, 6), ("B", 3, 0, 4, 6), ("C", 5, 1.5, 6, 3)],
        [(1, 4.5), (3.5, 5), (10, 10)],
    )
    with pytest.raises(ContainmentViolation) as exc:
        validate_instance(bad)
    assert exc.value.ids == ["C"]


def test_validate_reports_shared_coordinate():
    shifted = make_instance(
        [("A", 1, 4, 3, 6), ("B", 3, 0, 4, 6), ("C", 5, 1.5, 6, 3)],
        [(2, 4.5), (3.5, 5), (5.5, 2.9)],
    )
    with pytest.raises(GeneralPositionViolation) as exc:
        validate_instance(shifted)
    assert {"A", "B"} <= set(exc.value.ids)


def test_validate_reports_overlap_without_raising():
    overlapping = make_instance(
        [("A", 0, 0, 2, 2), ("B", 1, 1, 3, 3)], [(0.5, 0.5), (2.5, 2.5)]
    )
    report = validate_instance(overlapping, raise_on_error=False)
    assert report.overlapping == [("A", "B")]
    assert not report.ok


@given(
    st.lists(
        st.integers(min_value=0, max_value=500), min_size=1, max_size=40, unique=True
    ),
    st.randoms(use_true_random=False),
)
@settings(max_examples=60, deadline=None)
def test_staircase_sweep_matches_bruteforce_property(xs, rnd):
    ys = list(xs)
    rnd.shuffle(ys)
    points = [P(float(x), float(y)) for x, y in zip(xs, ys)]
    swept = staircase_of(points)
    assert swept.is_valid()
    assert swept.coords() == pareto_front_bruteforce(points).coords()
