"""Lower-bound quantities, brute-force oracles and run verification."""

import itertools
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

from pareto_preprocess.config import settings
from pareto_preprocess.core.errors import LimitExceeded, VerificationFailure
from pareto_preprocess.core.geometry import dominates_region, pareto_front_bruteforce
from pareto_preprocess.core.reconstruct import RetrievalOracle, resolve
from pareto_preprocess.core.schema import (
    AuxStructure,
    CostLedger,
    DependencyGraph,
    FrontTypeCount,
    ImplicitFront,
    Instance,
    ParetoCostReport,
    Point,
    Region,
    TildeCondition,
    TildeMember,
    TruncatedSet,
    VerificationReport,
)
from pareto_preprocess.core.visibility import (  # noqa: F401
    bruteforce_subproblems,
    bruteforce_visibility,
)

logger = logging.getLogger(__name__)

Segment = Tuple[float, float, float, float]


def _points_by_index(ts: TruncatedSet, inst: Instance) -> Dict[int, Point]:
    by_id = {r.id: p for r, p in zip(inst.regions, inst.points)}
    return {i: by_id[ts.originals[i].id] for i in range(1, ts.n + 1)}


def front_edges(front: Sequence[Point], far: float) -> List[Tuple[Segment, Point]]:
    """Closed staircase edges, each paired with the vertex that defines it.

    The leftward ray belongs to the first vertex, a vertical drop to the vertex
    above it, a horizontal run to the vertex it ends at, the downward ray to the
    last vertex. ``far`` stands in for infinity.
    """
    if not front:
        return []
    edges: List[Tuple[Segment, Point]] = [
        ((-far, front[0].y, front[0].x, front[0].y), front[0])
    ]
    for p, q in zip(front, front[1:]):
        edges.append(((p.x, q.y, p.x, p.y), p))
        edges.append(((p.x, q.y, q.x, q.y), q))
    edges.append(((front[-1].x, -far, front[-1].x, front[-1].y), front[-1]))
    return edges


def _segment_hits(seg: Segment, r: Region) -> bool:
    x0, y0, x1, y1 = seg
    return x0 <= r.xmax and r.xmin <= x1 and y0 <= r.ymax and r.ymin <= y1


def interesting_set(
    ts: TruncatedSet, g: DependencyGraph, inst: Instance
) -> List[TildeMember]:
    points = _points_by_index(ts, inst)
    front = pareto_front_bruteforce(list(points.values())).vertices
    far = 1.0 + max(
        abs(c) for r in ts.regions for c in (r.xmin, r.xmax, r.ymin, r.ymax)
    )
    edges = front_edges(front, far)

    members = []
    for i in range(1, ts.n + 1):
        region = ts.regions[i]
        hits = [owner for seg, owner in edges if _segment_hits(seg, region)]
        if not hits:
            continue
        conditions = []
        if ts.flagged[i]:
            conditions.append(TildeCondition.FLAGGED)
        if any(owner.xy != points[i].xy for owner in hits):
            conditions.append(TildeCondition.CROSSED_BY_FOREIGN_EDGE)
        if g.out_targets(i):
            conditions.append(TildeCondition.NOT_SINK)
        if conditions:
            v_set, h_set = conditioned_visibility(ts, g, inst, i, points)
            members.append(
                TildeMember(
                    index=i,
                    region_id=ts.originals[i].id,
                    conditions=conditions,
                    v_size=len(v_set),
                    h_size=len(h_set),
                )
            )
    return members


def conditioned_visibility(
    ts: TruncatedSet,
    g: DependencyGraph,
    inst: Instance,
    i: int,
    points: Optional[Dict[int, Point]] = None,
) -> Tuple[List[int], List[int]]:
    """V_i(P) and H_i(P) by direct scan."""
    points = points or _points_by_index(ts, inst)
    left = [points[j] for j in range(1, i + 1) if j in points]
    right = [points[j] for j in range(i, ts.n + 1) if j in points]
    v_set = [
        t
        for t in g.v_sets[i]
        if t == i or any(dominates_region(p, ts.regions[t]) for p in left)
    ]
    h_set = [
        t
        for t in g.h_sets[i]
        if t == i or any(dominates_region(p, ts.regions[t]) for p in right)
    ]
    return v_set, h_set


def pareto_cost(
    ts: TruncatedSet,
    g: DependencyGraph,
    inst: Instance,
    retrieval_cost: Optional[float] = None,
) -> ParetoCostReport:
    cost = settings.retrieval_cost if retrieval_cost is None else retrieval_cost
    members = interesting_set(ts, g, inst)
    cp = sum(cost + math.log2(m.v_size) + math.log2(m.h_size) for m in members)
    return ParetoCostReport(members=members, retrieval_cost=cost, cp=cp)


def retrieval_lower_bound(report: ParetoCostReport) -> int:
    return math.ceil(len(report.members) / 3)


def _axis_candidates(lo: float, hi: float, values: List[float]) -> List[float]:
    if lo == hi:
        return [lo]
    cuts = sorted(set(values))
    found = {
        (a + b) / 2.0 for a, b in zip(cuts, cuts[1:]) if lo < (a + b) / 2.0 < hi
    }
    eps = (hi - lo) * 1e-3
    found.update((lo + eps, hi - eps))
    return sorted(found)


def candidate_grid(regions: Sequence[Region]) -> List[List[Point]]:
    xs = [c for r in regions for c in (r.xmin, r.xmax)]
    ys = [c for r in regions for c in (r.ymin, r.ymax)]
    return [
        [
            Point(x=x, y=y, id=r.id)
            for x in _axis_candidates(r.xmin, r.xmax, xs)
            for y in _axis_candidates(r.ymin, r.ymax, ys)
        ]
        for r in regions
    ]


def _front_type(points: Sequence[Point]) -> Tuple[int, ...]:
    return tuple(
        idx
        for idx, p in enumerate(points)
        if not any(
            j != idx and q.x >= p.x and q.y >= p.y and q.xy != p.xy
            for j, q in enumerate(points)
        )
    )


def enumerate_front_types(
    regions: Sequence[Region],
    limit: Optional[int] = None,
    max_placements: Optional[int] = None,
) -> FrontTypeCount:
    """Distinct front index sequences over every placement on the candidate grid."""
    limit = settings.front_type_limit if limit is None else limit
    max_placements = settings.max_placements if max_placements is None else max_placements
    if len(regions) > limit:
        raise LimitExceeded(f"{len(regions)} regions exceed the limit of {limit}")
    grid = candidate_grid(regions)
    placements = math.prod(len(cands) for cands in grid)
    if placements > max_placements:
        raise LimitExceeded(f"{placements} placements exceed {max_placements}")
    types = {_front_type(combo) for combo in itertools.product(*grid)}
    logger.debug(f"{len(types)} front types over {placements} placements")
    return FrontTypeCount(
        count=len(types),
        candidate_grid={
            r.id: [p.xy for p in cands] for r, cands in zip(regions, grid)
        },
    )


def verify_run(
    inst: Instance,
    aux: AuxStructure,
    front: ImplicitFront,
    ledger: CostLedger,
    retrieval_cost: Optional[float] = None,
    ratios: Optional[Tuple[float, float]] = None,
) -> VerificationReport:
    """Checks front equality, the retrieval lower bound and the cost ratios."""
    ratio_r, ratio_p = ratios or (settings.ratio_retrieval, settings.ratio_predicates)
    ts, g = aux.truncated, aux.graph
    resolved = resolve(front, RetrievalOracle(inst, ts))
    expected = pareto_front_bruteforce(inst.points)
    matches = resolved.coords() == expected.coords()
    if not matches:
        raise VerificationFailure(
            "a", f"front {resolved.coords()} differs from {expected.coords()}"
        )

    report = pareto_cost(ts, g, inst, retrieval_cost)
    lower = retrieval_lower_bound(report)
    if ledger.retrievals < lower:
        raise VerificationFailure(
            "b", f"{ledger.retrievals} retrievals beat the lower bound {lower}"
        )

    tilde = len(report.members)
    retrieval_ratio = ledger.retrievals / max(1, tilde)
    log_terms = sum(
        1 + math.log2(m.v_size) + math.log2(m.h_size) for m in report.members
    )
    predicate_ratio = ledger.predicate_evals / max(1.0, log_terms)
    if retrieval_ratio > ratio_r:
        raise VerificationFailure(
            "c", f"retrieval ratio {retrieval_ratio:.2f} exceeds {ratio_r}"
        )
    if predicate_ratio > ratio_p:
        raise VerificationFailure(
            "c", f"predicate ratio {predicate_ratio:.2f} exceeds {ratio_p}"
        )
    logger.info(
        f"Verified run: {ledger.retrievals} retrievals, |tilde|={tilde}, "
        f"ratios {retrieval_ratio:.2f}/{predicate_ratio:.2f}"
    )
    return VerificationReport(
        front_matches=matches,
        retrievals=ledger.retrievals,
        retrieval_lower_bound=lower,
        tilde_size=tilde,
        retrieval_ratio=retrieval_ratio,
        predicate_ratio=predicate_ratio,
    )
