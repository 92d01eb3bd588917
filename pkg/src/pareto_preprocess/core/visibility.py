"""Vertical and horizontal visibility by sweeping painted intervals."""

import logging
import math
from typing import Dict, List, Sequence, Set, Tuple

from sortedcontainers import SortedDict

from pareto_preprocess.core.geometry import intervals_overlap
from pareto_preprocess.core.schema import Arrow, Orientation, Region

logger = logging.getLogger(__name__)


class OpCounter:
    """Counts elementary steps; searches on a structure of size s cost log2(s+1)."""

    def __init__(self) -> None:
        self.ops = 0.0

    def charge(self, amount: float = 1.0) -> None:
        self.ops += amount

    def charge_search(self, size: int) -> None:
        self.ops += math.log2(size + 1)

    def charge_sort(self, size: int) -> None:
        if size > 1:
            self.ops += size * math.log2(size)


def _pieces_touching(
    painted: SortedDict, lo: float, hi: float, counter: OpCounter
) -> List[Tuple[float, float, int]]:
    counter.charge_search(len(painted))
    idx = max(painted.bisect_right(lo) - 1, 0)
    pieces: List[Tuple[float, float, int]] = []
    keys = painted.keys()
    while idx < len(keys):
        start = keys[idx]
        if start > hi:
            break
        end, owner = painted[start]
        pieces.append((start, end, owner))
        idx += 1
    return pieces


def _paint(
    painted: SortedDict, lo: float, hi: float, owner: int, counter: OpCounter
) -> None:
    for start, end, old in _pieces_touching(painted, lo, hi, counter):
        if end <= lo or start >= hi:
            continue
        del painted[start]
        counter.charge_search(len(painted))
        if start < lo:
            painted[start] = (lo, old)
        if end > hi:
            painted[hi] = (end, old)
    painted[lo] = (hi, owner)
    counter.charge_search(len(painted))


def sweep_spans(
    regions: Sequence[Region], orientation: Orientation, counter: OpCounter
) -> List[Dict[int, List[Tuple[float, float]]]]:
    """Visible intervals per arrow for one orientation.

    ``out[u][w]`` lists the stretches of the sweep axis along which ``u``
    sees ``w``. Vertical arrows point from a region to the regions it sees
    below it; horizontal arrows point from a region to the regions it sees
    on its left. Degenerate regions receive arrows but never cast any.
    """
    vertical = orientation == Orientation.VERTICAL

    def span(r: Region) -> Tuple[float, float]:
        return (r.xmin, r.xmax) if vertical else (r.ymin, r.ymax)

    order = sorted(
        range(len(regions)),
        key=lambda i: (
            (-regions[i].ymax, -regions[i].ymin)
            if vertical
            else (-regions[i].xmax, -regions[i].xmin)
        ),
    )
    counter.charge_sort(len(order))

    out: List[Dict[int, List[Tuple[float, float]]]] = [{} for _ in regions]
    painted: SortedDict = SortedDict()
    for i in order:
        lo, hi = span(regions[i])
        for start, end, owner in _pieces_touching(painted, lo, hi, counter):
            if intervals_overlap(start, end, lo, hi):
                out[owner].setdefault(i, []).append((max(start, lo), min(end, hi)))
        if not regions[i].is_degenerate and lo < hi:
            _paint(painted, lo, hi, i, counter)
    logger.debug(
        f"{orientation.value} sweep over {len(regions)} regions: "
        f"{sum(len(s) for s in out)} arrows"
    )
    return out


def sweep_arrows(
    regions: Sequence[Region], orientation: Orientation, counter: OpCounter
) -> List[Set[int]]:
    """Out-arrows per region index for one orientation."""
    return [set(d) for d in sweep_spans(regions, orientation, counter)]


def visibility_bruteforce(
    regions: Sequence[Region], orientation: Orientation
) -> List[Set[int]]:
    """Cubic reference: subtract blockers from each candidate pair's shared span."""
    vertical = orientation == Orientation.VERTICAL
    out: List[Set[int]] = [set() for _ in regions]
    for i, src in enumerate(regions):
        if src.is_degenerate:
            continue
        for j, dst in enumerate(regions):
            if i == j:
                continue
            if vertical:
                if dst.ymax > src.ymin:
                    continue
                lo, hi = src.xmin, src.xmax
                tlo, thi = dst.xmin, dst.xmax
            else:
                if dst.xmax > src.xmin:
                    continue
                lo, hi = src.ymin, src.ymax
                tlo, thi = dst.ymin, dst.ymax
            if not intervals_overlap(lo, hi, tlo, thi):
                continue
            gaps = [(lo, hi)]
            for k, blk in enumerate(regions):
                if k in (i, j) or blk.is_degenerate:
                    continue
                if vertical:
                    between = blk.ymin >= dst.ymax and blk.ymax <= src.ymin
                    blo, bhi = blk.xmin, blk.xmax
                else:
                    between = blk.xmin >= dst.xmax and blk.xmax <= src.xmin
                    blo, bhi = blk.ymin, blk.ymax
                if not between:
                    continue
                remaining = []
                for a, b in gaps:
                    if bhi <= a or blo >= b:
                        remaining.append((a, b))
                        continue
                    if a < blo:
                        remaining.append((a, blo))
                    if bhi < b:
                        remaining.append((bhi, b))
                gaps = remaining
            if any(intervals_overlap(a, b, tlo, thi) for a, b in gaps):
                out[i].add(j)
    return out


def bruteforce_visibility(regions: Sequence[Region]) -> List[Arrow]:
    arrows = []
    for orientation in (Orientation.VERTICAL, Orientation.HORIZONTAL):
        for src, targets in enumerate(visibility_bruteforce(regions, orientation)):
            arrows.extend(
                Arrow(source=src, target=t, orientation=orientation)
                for t in sorted(targets)
            )
    return sorted(arrows, key=lambda a: (a.source, a.target, a.orientation.value))


def bruteforce_sources(regions: Sequence[Region]) -> List[int]:
    indeg = [0] * len(regions)
    for arrow in bruteforce_visibility(regions):
        indeg[arrow.target] += 1
    return [i for i, d in enumerate(indeg) if d == 0]


def bruteforce_subproblems(regions: Sequence[Region]) -> List[Tuple[int, int]]:
    """Consecutive source pairs of the recomputed dependency graph."""
    sources = bruteforce_sources(regions)
    return list(zip(sources, sources[1:]))
