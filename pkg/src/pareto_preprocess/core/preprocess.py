"""Preprocessing: classify, truncate, visibility, cull, compound, subproblem tree.

Runs on the regions alone and produces the auxiliary structure handed to
reconstruction.
"""

import bisect
import logging
from collections import deque
from typing import Dict, List, Optional, Sequence, Set, Tuple

from pareto_preprocess.core.errors import EmptyAfterTruncation, PreprocessError
from pareto_preprocess.core.geometry import (
    BoundaryLocator,
    dominates,
    guaranteed_boundary,
    halfslab_intersects,
    sentinel_pair,
)
from pareto_preprocess.core.schema import (
    AuxStructure,
    CanonicalComponent,
    CanonicalSet,
    DependencyGraph,
    Orientation,
    Region,
    RegionLabel,
    SubproblemNode,
    SubproblemTree,
    TruncatedSet,
)
from pareto_preprocess.core.visibility import OpCounter, sweep_arrows, sweep_spans

logger = logging.getLogger(__name__)


def classify(
    regions: Sequence[Region], counter: Optional[OpCounter] = None
) -> List[RegionLabel]:
    """Negative, positive or potential label per region, in input order."""
    counter = counter or OpCounter()
    counter.charge_sort(len(regions))
    locator = BoundaryLocator(guaranteed_boundary(regions))
    hit: Set[int] = set()
    for orientation in (Orientation.VERTICAL, Orientation.HORIZONTAL):
        for targets in sweep_arrows(regions, orientation, counter):
            hit.update(targets)

    labels = []
    for idx, r in enumerate(regions):
        counter.charge_search(len(locator.xs))
        clipped = locator.clip(r)
        if clipped is None:
            labels.append(RegionLabel.NEGATIVE)
        elif clipped is not r or idx in hit:
            labels.append(RegionLabel.POTENTIAL)
        else:
            labels.append(RegionLabel.POSITIVE)
    return labels


def classify_regions_bruteforce(regions: Sequence[Region]) -> List[RegionLabel]:
    labels = []
    for r in regions:
        others = [s for s in regions if s.id != r.id]
        if any(dominates(s.bottom_left, r.top_right) for s in others):
            labels.append(RegionLabel.NEGATIVE)
        elif any(
            halfslab_intersects(s, r, o)
            for s in others
            for o in (Orientation.HORIZONTAL, Orientation.VERTICAL)
        ):
            labels.append(RegionLabel.POTENTIAL)
        else:
            labels.append(RegionLabel.POSITIVE)
    return labels


def truncate(
    regions: Sequence[Region], counter: Optional[OpCounter] = None
) -> TruncatedSet:
    counter = counter or OpCounter()
    counter.charge_sort(len(regions))
    locator = BoundaryLocator(guaranteed_boundary(regions))

    kept: List[Tuple[Region, Region, bool]] = []
    for r in regions:
        counter.charge_search(len(locator.xs))
        clipped = locator.clip(r)
        if clipped is not None:
            kept.append((clipped, r, clipped is not r))
    if not kept:
        raise EmptyAfterTruncation(f"all {len(regions)} regions are negative")

    kept.sort(key=lambda item: (item[0].xmin, -item[0].ymin))
    counter.charge_sort(len(kept))
    left, right = sentinel_pair([item[0] for item in kept])
    logger.debug(
        f"Truncation kept {len(kept)} of {len(regions)} regions, "
        f"{sum(flag for _, _, flag in kept)} flagged"
    )
    return TruncatedSet(
        regions=[left] + [item[0] for item in kept] + [right],
        flagged=[False] + [item[2] for item in kept] + [False],
        originals=[left] + [item[1] for item in kept] + [right],
    )


Spans = List[Dict[int, List[Tuple[float, float]]]]


def build_graph(
    regions: Sequence[Region],
    v_spans: Spans,
    h_spans: Spans,
    counter: OpCounter,
) -> DependencyGraph:
    """Assemble visibility sets and the search attributes from swept spans."""
    size = len(regions)
    v_sets = [sorted(set(v_spans[i]) | {i}) for i in range(size)]
    h_sets = [sorted(set(h_spans[i]) | {i}) for i in range(size)]

    xmins = [r.xmin for r in regions]
    v_next = []
    for i, r in enumerate(regions):
        counter.charge_search(size)
        nxt = bisect.bisect_left(xmins, r.xmax)
        v_next.append(min(max(nxt, i + 1), size - 1))

    h_prev = [0] * size
    by_ymin = sorted(range(size), key=lambda k: -regions[k].ymin)
    by_ymax = sorted(range(size), key=lambda k: -regions[k].ymax)
    counter.charge_sort(size)
    counter.charge_sort(size)
    best, runner_up, ptr = -1, -1, 0
    for i in by_ymax:
        while ptr < size and regions[by_ymin[ptr]].ymin >= regions[i].ymax:
            k = by_ymin[ptr]
            if k > best:
                best, runner_up = k, best
            elif k > runner_up:
                runner_up = k
            ptr += 1
        # a point region sits on its own slab boundary
        if 0 <= best < i:
            h_prev[i] = best
        elif best == i and runner_up >= 0:
            h_prev[i] = runner_up
        else:
            h_prev[i] = 0

    back_ref: List[Optional[int]] = [None] * size
    fwd_ref: List[Optional[int]] = [None] * size
    for j in range(size):
        for t in v_sets[j]:
            if t != j and (back_ref[t] is None or j > back_ref[t]):  # type: ignore[operator]
                back_ref[t] = j
        for t in h_sets[j]:
            if t != j and (fwd_ref[t] is None or j < fwd_ref[t]):  # type: ignore[operator]
                fwd_ref[t] = j
        counter.charge(len(v_sets[j]) + len(h_sets[j]))

    return DependencyGraph(
        v_sets=v_sets,
        h_sets=h_sets,
        v_next=v_next,
        h_prev=h_prev,
        back_ref=back_ref,
        fwd_ref=fwd_ref,
        v_spans=list(v_spans),
        h_spans=list(h_spans),
    )


def visibility_sets(
    ts: TruncatedSet, counter: Optional[OpCounter] = None
) -> DependencyGraph:
    return region_graph(ts.regions, counter)


def region_graph(
    regions: Sequence[Region], counter: Optional[OpCounter] = None
) -> DependencyGraph:
    counter = counter or OpCounter()
    v_spans = sweep_spans(regions, Orientation.VERTICAL, counter)
    h_spans = sweep_spans(regions, Orientation.HORIZONTAL, counter)
    return build_graph(regions, v_spans, h_spans, counter)


def crossed_indices(g: DependencyGraph) -> List[bool]:
    """Whether some arrow jumps over index i in either direction."""
    size = len(g)
    diff = [0] * (size + 1)
    for arrow in g.arrows():
        lo, hi = sorted((arrow.source, arrow.target))
        if hi - lo > 1:
            diff[lo + 1] += 1
            diff[hi] -= 1
    crossed, depth = [], 0
    for i in range(size):
        depth += diff[i]
        crossed.append(depth > 0)
    return crossed


def cull(ts: TruncatedSet, g: DependencyGraph) -> Tuple[List[int], List[Tuple[int, int]]]:
    """Separators and the maximal intervals between them.

    A separator is isolated and no arrow passes over it, so the intervals on
    either side never share an arrow.
    """
    indeg = g.in_degrees()
    crossed = crossed_indices(g)
    separators: List[int] = []
    spans: List[Tuple[int, int]] = []
    start: Optional[int] = None
    for i in range(1, ts.n + 1):
        if indeg[i] == 0 and not g.out_targets(i) and not crossed[i]:
            separators.append(i)
            if start is not None:
                spans.append((start, i - 1))
                start = None
        elif start is None:
            start = i
    if start is not None:
        spans.append((start, ts.n))
    return separators, spans


def _compound_region(ts: TruncatedSet, run: List[int]) -> Region:
    boxes = [ts.regions[i] for i in run]
    return Region(
        id=f"compound:{ts.origin(run[0])}..{ts.origin(run[-1])}",
        xmin=min(b.xmin for b in boxes),
        ymin=min(b.ymin for b in boxes),
        xmax=max(b.xmax for b in boxes),
        ymax=max(b.ymax for b in boxes),
    )


def compound(
    span: Tuple[int, int],
    ts: TruncatedSet,
    g: DependencyGraph,
    counter: Optional[OpCounter] = None,
) -> CanonicalComponent:
    """Merge runs of consecutive sinks and re-target arrows onto local indices."""
    counter = counter or OpCounter()
    lo, hi = span
    runs: List[List[int]] = []
    prev_sink = False
    for i in range(lo, hi + 1):
        sink = not g.out_targets(i)
        if sink and prev_sink:
            runs[-1].append(i)
        else:
            runs.append([i])
        prev_sink = sink

    last = ts.n + 1
    regions = [ts.regions[0]]
    members: List[List[int]] = [[0]]
    flags = [False]
    local: Dict[int, int] = {0: 0, last: len(runs) + 1}
    for pos, run in enumerate(runs, start=1):
        if len(run) > 1:
            regions.append(_compound_region(ts, run))
            logger.debug(f"Compound region {regions[-1].id} over {len(run)} sinks")
        else:
            regions.append(ts.regions[run[0]])
        members.append(run)
        flags.append(len(run) > 1)
        for t in run:
            local[t] = pos
    regions.append(ts.regions[last])
    members.append([last])
    flags.append(False)

    v_out: Spans = [{} for _ in regions]
    h_out: Spans = [{} for _ in regions]
    for pos, run in enumerate(runs, start=1):
        for t in run:
            for dst, spans_of in ((v_out, g.v_spans[t]), (h_out, g.h_spans[t])):
                for target, pieces in spans_of.items():
                    if target not in local:
                        raise PreprocessError(
                            f"arrow {t}->{target} leaves component {span}"
                        )
                    dst[pos].setdefault(local[target], []).extend(pieces)
            counter.charge(len(g.v_sets[t]) + len(g.h_sets[t]))

    return CanonicalComponent(
        span=span,
        regions=regions,
        members=members,
        compound=flags,
        graph=build_graph(regions, v_out, h_out, counter),
    )


def build_subproblem_tree(
    component: CanonicalComponent, counter: Optional[OpCounter] = None
) -> SubproblemTree:
    """Recursive refinement of the component by removing boundary out-arrows."""
    counter = counter or OpCounter()
    g = component.graph
    size = len(component.regions)
    out = [g.out_targets(i) for i in range(size)]
    indeg = g.in_degrees()
    removed = [False] * size

    nodes = [SubproblemNode(lo=0, hi=size - 1)]
    sources = [i for i in range(size) if indeg[i] == 0]
    pending = deque([(0, sources)])
    while pending:
        node_id, cuts = pending.popleft()
        node = nodes[node_id]
        for a, b in zip(cuts, cuts[1:]):
            nodes.append(SubproblemNode(lo=a, hi=b))
            child_id = len(nodes) - 1
            node.children.append(child_id)
            counter.charge()
            if b - a < 2:
                continue
            for end in (a, b):
                if not removed[end]:
                    removed[end] = True
                    for t in out[end]:
                        indeg[t] -= 1
            fresh = {t for end in (a, b) for t in out[end] if a < t < b and indeg[t] == 0}
            if fresh:
                pending.append((child_id, sorted({a, b} | fresh)))
            else:
                logger.debug(f"Subproblem [{a},{b}] has no new source; kept as leaf")

    return _with_handles(SubproblemTree(nodes=nodes))


def _with_handles(tree: SubproblemTree) -> SubproblemTree:
    ending_at: Dict[int, int] = {}
    starting_at: Dict[int, int] = {}
    order = deque([0])
    while order:
        node_id = order.popleft()
        node = tree.nodes[node_id]
        ending_at.setdefault(node.hi, node_id)
        starting_at.setdefault(node.lo, node_id)
        order.extend(node.children)
    return tree.model_copy(update={"ending_at": ending_at, "starting_at": starting_at})


def preprocess(regions: Sequence[Region]) -> AuxStructure:
    counter = OpCounter()
    labels = classify(regions, counter)
    ts = truncate(regions, counter)
    g = visibility_sets(ts, counter)
    separators, spans = cull(ts, g)
    components = []
    for span in spans:
        comp = compound(span, ts, g, counter)
        components.append(
            comp.model_copy(update={"tree": build_subproblem_tree(comp, counter)})
        )
    logger.info(
        f"Preprocessed {len(regions)} regions: {ts.n} truncated, "
        f"{len(separators)} separators, {len(components)} components"
    )
    return AuxStructure(
        labels={r.id: label for r, label in zip(regions, labels)},
        truncated=ts,
        graph=g,
        canonical=CanonicalSet(components=components, separators=separators),
        preprocess_ops=counter.ops,
    )
