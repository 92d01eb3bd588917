"""Dominance predicates, staircases and instance validation.

Every other module builds on these primitives. Predicates compare input values
exactly; general position is checked once by ``validate_instance``.
"""

import bisect
import logging
from collections import defaultdict
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from sortedcontainers import SortedKeyList

from pareto_preprocess.core.errors import (
    ContainmentViolation,
    DisjointnessViolation,
    GeneralPositionViolation,
    InvariantViolation,
)
from pareto_preprocess.core.schema import (
    Instance,
    Orientation,
    Point,
    Region,
    RegionKind,
    Staircase,
)

logger = logging.getLogger(__name__)


def dominates(p: Point, q: Point) -> bool:
    return p.x >= q.x and p.y >= q.y


def dominates_region(p: Point, r: Region) -> bool:
    return p.x >= r.xmax and p.y >= r.ymax


def intervals_overlap(a0: float, a1: float, b0: float, b1: float) -> bool:
    """Positive-measure overlap; a degenerate interval must sit strictly inside."""
    if max(a0, b0) < min(a1, b1):
        return True
    if a0 == a1 and b0 < a0 < b1:
        return True
    if b0 == b1 and a0 < b0 < a1:
        return True
    return False


def regions_overlap(a: Region, b: Region) -> bool:
    return intervals_overlap(a.xmin, a.xmax, b.xmin, b.xmax) and intervals_overlap(
        a.ymin, a.ymax, b.ymin, b.ymax
    )


def pareto_front_bruteforce(points: Sequence[Point]) -> Staircase:
    """O(n^2) reference front: the maximal points ordered by increasing x."""
    if not points:
        return Staircase(vertices=[])
    xy = np.array([p.xy for p in points], dtype=float)
    ge = (xy[None, :, 0] >= xy[:, None, 0]) & (xy[None, :, 1] >= xy[:, None, 1])
    np.fill_diagonal(ge, False)
    maximal = ~ge.any(axis=1)
    survivors = [p for p, keep in zip(points, maximal) if keep]
    survivors.sort(key=lambda p: p.x)
    return Staircase(vertices=survivors)


def staircase_of(points: Iterable[Point]) -> Staircase:
    """Maximal points by a single sweep from the right."""
    ordered = sorted(points, key=lambda p: (-p.x, -p.y))
    vertices: List[Point] = []
    best_y = float("-inf")
    for p in ordered:
        if p.y > best_y:
            vertices.append(p)
            best_y = p.y
    vertices.reverse()
    return Staircase(vertices=vertices)


def guaranteed_boundary(regions: Sequence[Region]) -> Staircase:
    return staircase_of(r.bottom_left for r in regions)


def halfslab_intersects(
    source: Region, target: Region, orientation: Orientation
) -> bool:
    if source.id == target.id:
        return False
    if orientation == Orientation.HORIZONTAL:
        return target.xmax <= source.xmin and intervals_overlap(
            source.ymin, source.ymax, target.ymin, target.ymax
        )
    return target.ymax <= source.ymin and intervals_overlap(
        source.xmin, source.xmax, target.xmin, target.xmax
    )


def clip_region(region: Region, points: Iterable[Point]) -> Optional[Region]:
    """Remove the part of ``region`` dominated by any of ``points``.

    Returns None when a point dominates the top right vertex. The remainder is a
    rectangle as long as no point lies strictly inside the region.
    """
    xmin, ymin = region.xmin, region.ymin
    for q in points:
        if dominates_region(q, region):
            return None
        if q.x <= region.xmin or q.y <= region.ymin:
            continue
        if q.x >= region.xmax:
            ymin = max(ymin, q.y)
        elif q.y >= region.ymax:
            xmin = max(xmin, q.x)
        else:
            raise InvariantViolation(
                f"point ({q.x}, {q.y}) lies inside region {region.id}"
            )
    if xmin == region.xmin and ymin == region.ymin:
        return region
    return region.with_extent(xmin, ymin, region.xmax, region.ymax)


class BoundaryLocator:
    """Binary searches on a staircase (x ascending, y descending)."""

    def __init__(self, boundary: Staircase) -> None:
        self.xs = [v.x for v in boundary.vertices]
        self.neg_ys = [-v.y for v in boundary.vertices]
        self.ys = [v.y for v in boundary.vertices]
        self.searches = 0

    def clip(self, region: Region) -> Optional[Region]:
        """Same contract as clip_region against every staircase vertex."""
        self.searches += 2
        xmin, ymin = region.xmin, region.ymin
        idx = bisect.bisect_left(self.xs, region.xmax)
        if (
            idx < len(self.xs)
            and self.xs[idx] == region.xmin
            and self.ys[idx] == region.ymin
        ):
            idx += 1
        if idx < len(self.xs):
            if self.ys[idx] >= region.ymax:
                return None
            if self.ys[idx] > region.ymin:
                ymin = self.ys[idx]
        k = bisect.bisect_right(self.neg_ys, -region.ymax)
        if k > 0 and self.xs[k - 1] > region.xmin:
            xmin = self.xs[k - 1]
        if xmin == region.xmin and ymin == region.ymin:
            return region
        return region.with_extent(xmin, ymin, region.xmax, region.ymax)


class ValidationReport(BaseModel):
    overlapping: List[Tuple[str, str]] = Field(
        default_factory=list, description="Pairs of regions sharing interior"
    )
    outside: List[str] = Field(
        default_factory=list, description="Regions whose point lies outside"
    )
    coordinate_clashes: List[Tuple[str, str]] = Field(
        default_factory=list, description="Pairs sharing an x or y coordinate"
    )

    @property
    def ok(self) -> bool:
        return not (self.overlapping or self.outside or self.coordinate_clashes)


def _overlapping_pairs(regions: Sequence[Region]) -> List[Tuple[str, str]]:
    pairs: List[Tuple[str, str]] = []
    active: SortedKeyList = SortedKeyList(key=lambda r: r.xmax)
    for r in sorted(regions, key=lambda r: (r.xmin, r.xmax)):
        while active and active[0].xmax <= r.xmin and not (
            active[0].xmax == r.xmin and r.is_degenerate
        ):
            active.pop(0)
        for other in active:
            if regions_overlap(other, r):
                pairs.append((other.id, r.id))
        active.add(r)
    return pairs


def _coordinate_clashes(inst: Instance) -> List[Tuple[str, str]]:
    """Shared coordinates that make two objects face each other.

    Regions clash when they share an x value and their closed y-intervals meet
    (or the symmetric case). Points clash on any shared coordinate, and with a
    foreign region whose edge they lie on.
    """
    clashes: List[Tuple[str, str]] = []
    by_id = {r.id: r for r in inst.regions}
    for axis in ("x", "y"):
        edges: Dict[float, List[str]] = defaultdict(list)
        for r in inst.regions:
            lo, hi = (r.xmin, r.xmax) if axis == "x" else (r.ymin, r.ymax)
            edges[lo].append(r.id)
            if hi != lo:
                edges[hi].append(r.id)

        def across(r: Region) -> Tuple[float, float]:
            return (r.ymin, r.ymax) if axis == "x" else (r.xmin, r.xmax)

        for ids in edges.values():
            for i, a in enumerate(ids):
                for b in ids[i + 1 :]:
                    lo_a, hi_a = across(by_id[a])
                    lo_b, hi_b = across(by_id[b])
                    if a != b and lo_a <= hi_b and lo_b <= hi_a:
                        clashes.append((a, b))

        seen: Dict[float, str] = {}
        for r, p in zip(inst.regions, inst.points):
            value, other = (p.x, p.y) if axis == "x" else (p.y, p.x)
            if value in seen:
                clashes.append((f"point:{seen[value]}", f"point:{r.id}"))
            seen[value] = r.id
            for owner in edges.get(value, []):
                lo, hi = across(by_id[owner])
                if owner != r.id and lo <= other <= hi:
                    clashes.append((owner, f"point:{r.id}"))
    return clashes


def validate_instance(inst: Instance, raise_on_error: bool = True) -> ValidationReport:
    """Checks disjointness, containment and general position of an instance."""
    report = ValidationReport(overlapping=_overlapping_pairs(inst.regions))
    if inst.points:
        if len(inst.points) != len(inst.regions):
            report.outside.extend(r.id for r in inst.regions[len(inst.points) :])
        for r, p in zip(inst.regions, inst.points):
            if not r.contains(p):
                report.outside.append(r.id)
    report.coordinate_clashes = _coordinate_clashes(inst)

    if report.ok or not raise_on_error:
        return report
    logger.debug(f"Instance validation failed: {report.model_dump()}")
    if report.overlapping:
        ids = sorted({i for pair in report.overlapping for i in pair})
        raise DisjointnessViolation(
            f"regions overlap: {report.overlapping}", ids=ids, report=report
        )
    if report.outside:
        raise ContainmentViolation(
            f"points outside their regions: {report.outside}",
            ids=report.outside,
            report=report,
        )
    ids = sorted({i for pair in report.coordinate_clashes for i in pair})
    raise GeneralPositionViolation(
        f"shared coordinates: {report.coordinate_clashes}", ids=ids, report=report
    )


def sentinel_pair(regions: Sequence[Region]) -> Tuple[Region, Region]:
    """Anchor point-regions up-left and down-right of the bounding box."""
    xmin = min(r.xmin for r in regions)
    xmax = max(r.xmax for r in regions)
    ymin = min(r.ymin for r in regions)
    ymax = max(r.ymax for r in regions)
    left = Region.from_point(
        "S_left", Point(x=xmin - 1.0, y=ymax + 1.0), kind=RegionKind.SENTINEL
    )
    right = Region.from_point(
        "S_right", Point(x=xmax + 1.0, y=ymin - 1.0), kind=RegionKind.SENTINEL
    )
    return left, right
