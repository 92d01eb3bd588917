"""Reconstruction phase: metered retrievals turned into the implicit front.

Each culled component is solved independently from the seeds given by its
subproblem tree. A subproblem ``[i, j]`` retrieves its two endpoints, finds the
first region right of ``i`` and the last region left of ``j`` that the new
points do not dominate, and splits at those of them, and of the tree
boundaries in between, that no live arrow reaches any more. Compound regions
are never endpoints; they are drained at the end with galloping searches over
their members.
"""

import bisect
import logging
from collections import deque
from typing import (
    Callable,
    Deque,
    Dict,
    Iterable,
    List,
    NamedTuple,
    Optional,
    Set,
    Tuple,
)

import numpy as np
from sortedcontainers import SortedDict

from pareto_preprocess.config import settings
from pareto_preprocess.core.errors import (
    InvariantViolation,
    OracleContainmentViolation,
    ResolutionMismatch,
)
from pareto_preprocess.core.geometry import clip_region, dominates, dominates_region
from pareto_preprocess.core.preprocess import build_subproblem_tree
from pareto_preprocess.core.schema import (
    AuxStructure,
    CanonicalComponent,
    CostLedger,
    FrontEntry,
    FrontEntryKind,
    ImplicitFront,
    Instance,
    Point,
    QueueOrder,
    Region,
    RegionKind,
    Staircase,
    SubproblemTree,
    TruncatedSet,
)
from pareto_preprocess.core.search import (
    galloping_prefix_search,
    galloping_suffix_search,
)
from pareto_preprocess.core.visibility import bruteforce_sources

logger = logging.getLogger(__name__)

Pieces = List[Tuple[float, float]]
Incoming = List[Tuple[int, Pieces]]


class RetrievalOracle:
    """True points by truncated index. Charging is the caller's business."""

    def __init__(self, instance: Instance, truncated: TruncatedSet) -> None:
        self.truncated = truncated
        self._points = {r.id: p for r, p in zip(instance.regions, instance.points)}

    def retrieve(self, index: int) -> Point:
        original = self.truncated.originals[index]
        if original.kind == RegionKind.SENTINEL:
            return original.bottom_left
        p = self._points[original.id]
        if not original.contains(p):
            raise OracleContainmentViolation(
                f"point {p.xy} lies outside region {original.id}"
            )
        return p


class Subproblem(NamedTuple):
    lo: int
    hi: int


class _Deferred(NamedTuple):
    left: Point
    right: Point


def _max_x(a: Point, b: Point) -> Point:
    return a if a.x >= b.x else b


def _max_y(a: Point, b: Point) -> Point:
    return a if a.y >= b.y else b


def _dominated_by_any(p: Point, others: Iterable[Point]) -> bool:
    return any(q.xy != p.xy and dominates(q, p) for q in others)


class _Records:
    """Prefix maxima of one coordinate over points keyed by index.

    Mirrored records answer suffix queries by negating the index.
    """

    def __init__(self, key: Callable[[Point], float], mirrored: bool) -> None:
        self._key = key
        self._sign = -1 if mirrored else 1
        self._records: SortedDict = SortedDict()

    def add(self, index: int, p: Point) -> None:
        records, key = self._records, self._key(p)
        pos = records.bisect_left(self._sign * index)
        if pos and self._key(records.peekitem(pos - 1)[1]) >= key:
            return
        while pos < len(records):
            signed, q = records.peekitem(pos)
            if self._key(q) > key:
                break
            del records[signed]
        records[self._sign * index] = p

    def best_before(self, bound: int) -> Optional[Point]:
        pos = self._records.bisect_left(self._sign * bound)
        return self._records.peekitem(pos - 1)[1] if pos else None


class PointTrackers:
    """Rightmost known point before an index, highest known point after it.

    Only points inside their own truncated region are tracked; both sentinel
    corners are present from the start.
    """

    def __init__(self, ts: TruncatedSet) -> None:
        self._x = _Records(lambda p: p.x, mirrored=False)
        self._y = _Records(lambda p: p.y, mirrored=True)
        for index in (0, ts.n + 1):
            self.add(index, ts.regions[index].bottom_left)

    def add(self, index: int, p: Point) -> None:
        self._x.add(index, p)
        self._y.add(index, p)

    def x_max(self, before: int) -> Point:
        found = self._x.best_before(before)
        if found is None:
            raise InvariantViolation(f"no tracked point before index {before}")
        return found

    def y_max(self, after: int) -> Point:
        found = self._y.best_before(after)
        if found is None:
            raise InvariantViolation(f"no tracked point after index {after}")
        return found


class ReconstructionState:
    """Single-owner session: retrieval cache, ledger and membership decisions."""

    def __init__(
        self,
        aux: AuxStructure,
        oracle: RetrievalOracle,
        debug: Optional[bool] = None,
        queue_order: Optional[QueueOrder] = None,
        queue_seed: Optional[int] = None,
    ) -> None:
        self.aux = aux
        self.ts = aux.truncated
        self.oracle = oracle
        self.debug = settings.debug_assert if debug is None else debug
        self.queue_order = QueueOrder(queue_order or settings.queue_order)
        self.rng = np.random.default_rng(
            settings.queue_seed if queue_seed is None else queue_seed
        )
        self.ledger = CostLedger()
        self.trackers = PointTrackers(self.ts)
        self.retrieved: Dict[int, Point] = {}
        self.on_front: Dict[int, bool] = {}
        self.ranges: List[FrontEntry] = []
        self.encountered: Set[int] = set()
        self._incoming: Optional[Tuple[List[Incoming], List[Incoming]]] = None

    def retrieve(self, index: int) -> Point:
        if index not in self.retrieved:
            p = self.oracle.retrieve(index)
            self.retrieved[index] = p
            self.ledger.retrievals += 1
            if self.ts.regions[index].contains(p):
                self.trackers.add(index, p)
            logger.debug(f"Retrieved region {index}: {p.xy}")
        return self.retrieved[index]

    def charge_evals(self, count: int) -> None:
        self.ledger.predicate_evals += count

    def witnesses(self, index: int) -> Tuple[Point, Point]:
        return self.trackers.x_max(before=index), self.trackers.y_max(after=index)

    def current_box(self, index: int) -> Optional[Region]:
        """What is left of an unretrieved region after every known point."""
        if index in (0, self.ts.n + 1) or index in self.retrieved:
            return None
        return clip_region(self.ts.regions[index], self.witnesses(index))

    def decide(
        self, index: int, p: Point, witnesses: Optional[Iterable[Point]] = None
    ) -> None:
        """Record whether ``p`` can still be a front vertex; refutations stick."""
        truncated = self.ts.regions[index]
        found = self.witnesses(index) if witnesses is None else tuple(witnesses)
        dominated = _dominated_by_any(p, found) or (
            self.ts.flagged[index] and not truncated.contains(p)
        )
        self.on_front[index] = self.on_front.get(index, True) and not dominated

    def incoming(self, index: int) -> Tuple[Incoming, Incoming]:
        """Vertical and horizontal in-arrows of a truncated region, with spans."""
        if self._incoming is None:
            g = self.aux.graph
            size = len(g)
            v_in: List[Incoming] = [[] for _ in range(size)]
            h_in: List[Incoming] = [[] for _ in range(size)]
            for src in range(size):
                for table, spans in ((v_in, g.v_spans), (h_in, g.h_spans)):
                    for target, pieces in (spans[src] if spans else {}).items():
                        table[target].append((src, pieces))
            self._incoming = (v_in, h_in)
        return self._incoming[0][index], self._incoming[1][index]

    def _arrow_live(
        self, src: int, dst: Region, pieces: Pieces, vertical: bool
    ) -> bool:
        box = self.current_box(src)
        if box is None:
            return False
        lo_s, hi_s = (box.xmin, box.xmax) if vertical else (box.ymin, box.ymax)
        lo_d, hi_d = (dst.xmin, dst.xmax) if vertical else (dst.ymin, dst.ymax)
        for a, b in pieces:
            if a == b:
                if lo_s < a < hi_s and lo_d <= a <= hi_d:
                    return True
            elif max(a, lo_s, lo_d) < min(b, hi_s, hi_d):
                return True
        return False

    def is_source_now(
        self, comp: CanonicalComponent, local: int, side: Optional[str] = None
    ) -> bool:
        """Whether a live region has no live in-arrow left.

        An arrow is live while its tail is unretrieved and both clipped boxes
        still share part of a recorded sight line. ``side`` "f" looks at
        horizontal in-arrows only, "g" at vertical ones only.
        """
        index = comp.truncated_index(local)
        box = self.current_box(index)
        if box is None:
            return False
        v_in, h_in = self.incoming(index)
        scans = []
        if side in (None, "g"):
            scans.append((v_in, True))
        if side in (None, "f"):
            scans.append((h_in, False))
        for arrows, vertical in scans:
            for src, pieces in arrows:
                self.ledger.step_ops += 1
                if self._arrow_live(src, box, pieces, vertical):
                    return False
        return True

    def _finalize(self) -> None:
        for index, p in sorted(self.retrieved.items()):
            self.decide(index, p)
            if not self.debug:
                continue
            expected = not (
                _dominated_by_any(p, self.retrieved.values())
                or (self.ts.flagged[index] and not self.ts.regions[index].contains(p))
            )
            if expected != self.on_front[index]:
                raise InvariantViolation(
                    f"membership of region {index} is {self.on_front[index]}, "
                    f"all retrieved points say {expected}"
                )

    def run(self) -> Tuple[ImplicitFront, CostLedger]:
        runs = [_ComponentRun(self, comp) for comp in self.aux.canonical.components]
        for component_run in runs:
            component_run.solve()
        for component_run in runs:
            component_run.handle_compounds()

        entries: List[FrontEntry] = list(self.ranges)
        for index in self.aux.canonical.separators:
            if self.ts.flagged[index]:
                self.retrieve(index)
            else:
                entries.append(FrontEntry(kind=FrontEntryKind.UNRETRIEVED, index=index))

        self._finalize()
        for index, keep in self.on_front.items():
            if keep:
                entries.append(
                    FrontEntry(
                        kind=FrontEntryKind.RETRIEVED,
                        index=index,
                        point=self.retrieved[index],
                    )
                )
        entries.sort(key=lambda e: e.index)
        logger.info(
            f"Reconstruction done: {len(entries)} entries, "
            f"{self.ledger.retrievals} retrievals, "
            f"{self.ledger.predicate_evals} predicate evaluations"
        )
        return ImplicitFront(entries=entries), self.ledger


class _ComponentRun:
    def __init__(self, state: ReconstructionState, comp: CanonicalComponent) -> None:
        self.state = state
        self.comp = comp
        self.regions = comp.regions
        self.graph = comp.graph
        self.tree: SubproblemTree = comp.tree or build_subproblem_tree(comp)
        self.last = len(comp.regions) - 1
        self.deferred: Dict[int, _Deferred] = {}
        self._child_los: Dict[int, List[int]] = {}
        self._f_memo: Dict[Tuple[int, Tuple[float, float]], int] = {}
        self._g_memo: Dict[Tuple[int, Tuple[float, float]], int] = {}

    def _settle(self, local: int) -> Point:
        if local in (0, self.last):
            return self.regions[local].bottom_left
        index = self.comp.truncated_index(local)
        p = self.state.retrieve(index)
        self.state.decide(index, p)
        self.state.encountered.add(index)
        return p

    def x_ref(self, local: int) -> Point:
        """Rightmost known point up to and including ``local``."""
        if local == 0:
            return self.state.trackers.x_max(before=self.comp.span[0])
        return self.state.trackers.x_max(before=self.comp.members[local][-1] + 1)

    def y_ref(self, local: int) -> Point:
        """Highest known point from ``local`` on."""
        if local == self.last:
            return self.state.trackers.y_max(after=self.comp.span[1])
        return self.state.trackers.y_max(after=self.comp.members[local][0] - 1)

    def local_box(self, local: int) -> Optional[Region]:
        """Live part of an item; the bounding box of live members for compounds."""
        if not self.comp.compound[local]:
            return self.state.current_box(self.comp.truncated_index(local))
        boxes = [self.state.current_box(m) for m in self.comp.members[local]]
        alive = [b for b in boxes if b is not None]
        if not alive:
            return None
        return alive[0].with_extent(
            min(b.xmin for b in alive),
            min(b.ymin for b in alive),
            max(b.xmax for b in alive),
            max(b.ymax for b in alive),
        )

    def find_f(self, i: int, x_ref: Point, j: int) -> int:
        """First vertical successor of ``i`` that ``x_ref`` leaves open, at most ``j``.

        Falls back to the first region clear of the slab of ``i``.
        """
        key = (i, x_ref.xy)
        if key not in self._f_memo:
            succ = [t for t in self.graph.v_sets[i] if t > i]
            k = galloping_prefix_search(
                succ,
                lambda t: dominates_region(x_ref, self.regions[t]),
                charge=self.state.charge_evals,
            )
            self._f_memo[key] = succ[k] if k < len(succ) else self.graph.v_next[i]
        return min(self._f_memo[key], j)

    def find_g(self, j: int, y_ref: Point, i: int) -> int:
        """Last horizontal predecessor of ``j`` that ``y_ref`` leaves open."""
        key = (j, y_ref.xy)
        if key not in self._g_memo:
            pred = [t for t in self.graph.h_sets[j] if t < j]
            k = galloping_suffix_search(
                pred,
                lambda t: dominates_region(y_ref, self.regions[t]),
                charge=self.state.charge_evals,
            )
            self._g_memo[key] = (
                pred[len(pred) - 1 - k] if k < len(pred) else self.graph.h_prev[j]
            )
        return max(self._g_memo[key], i)

    def node_of(self, i: int, j: int) -> int:
        """Deepest subproblem-tree node whose interval holds ``[i, j]``."""
        tree = self.tree
        node_id = 0
        start, end = tree.starting_at.get(i), tree.ending_at.get(j)
        if start is not None and tree.nodes[start].hi >= j:
            node_id = start
        elif end is not None and tree.nodes[end].lo <= i:
            node_id = end
        while True:
            self.state.ledger.step_ops += 1
            children = tree.nodes[node_id].children
            if node_id not in self._child_los:
                self._child_los[node_id] = [tree.nodes[c].lo for c in children]
            k = bisect.bisect_right(self._child_los[node_id], i) - 1
            if k < 0 or tree.nodes[children[k]].hi < j:
                return node_id
            node_id = children[k]

    def _defer(self, local: int, left: Point, right: Point) -> None:
        known = self.deferred.get(local)
        if known is not None:
            left, right = _max_x(known.left, left), _max_y(known.right, right)
        self.deferred[local] = _Deferred(left, right)

    def _window_sources(self, i: int, j: int) -> List[int]:
        """Sources among the live items strictly inside ``[i, j]``, recomputed."""
        state = self.state
        local = [Region.from_point("lo", self._settle(i))]
        owners: List[Optional[int]] = [i]
        for t in range(i + 1, j):
            for m in self.comp.members[t]:
                box = state.current_box(m)
                if box is not None:
                    local.append(box)
                    owners.append(None if self.comp.compound[t] else t)
        local.append(Region.from_point("hi", self._settle(j)))
        owners.append(j)
        found = (owners[k] for k in bruteforce_sources(local))
        return [t for t in found if t is not None and t not in (i, j)]

    def _check_cuts(self, i: int, j: int, cuts: List[int]) -> None:
        expected = [i] + self._window_sources(i, j) + [j]
        if expected != cuts:
            raise InvariantViolation(
                f"subproblem [{i},{j}] splits into "
                f"{list(zip(cuts, cuts[1:]))}, recomputed visibility gives "
                f"{list(zip(expected, expected[1:]))}"
            )

    def step(self, sub: Subproblem) -> List[Subproblem]:
        state, compound = self.state, self.comp.compound
        i, j = sub.lo, sub.hi
        state.ledger.step_ops += 1
        self._settle(i)
        self._settle(j)
        if j - i < 2:
            return []

        xi, yj = self.x_ref(i), self.y_ref(j)
        f, g = self.find_f(i, xi, j), self.find_g(j, yj, i)
        while i < f < j and compound[f]:
            self._defer(f, xi, yj)
            f += 1
        while i < g < j and compound[g]:
            self._defer(g, xi, yj)
            g -= 1

        node_id = self.node_of(i, j)
        candidates = {f, g}
        for child in self.tree.nodes[node_id].children:
            candidates.update((self.tree.nodes[child].lo, self.tree.nodes[child].hi))
        logger.debug(f"Subproblem [{i},{j}] under tree node {node_id}: f={f} g={g}")

        cuts, live = [i], []
        for c in sorted(t for t in candidates if i < t < j):
            state.ledger.step_ops += 1
            if compound[c]:
                if self.local_box(c) is not None:
                    self._defer(c, xi, yj)
                continue
            if state.current_box(self.comp.truncated_index(c)) is None:
                continue
            live.append(c)
            if state.is_source_now(self.comp, c):
                cuts.append(c)
        cuts.append(j)
        if len(cuts) == 2 and live:
            logger.warning(
                f"No candidate of subproblem [{i},{j}] is a source; "
                f"splitting at every live region"
            )
            cuts = [i] + [
                t
                for t in range(i + 1, j)
                if not compound[t] and self.local_box(t) is not None
            ] + [j]
        if state.debug:
            self._check_cuts(i, j, cuts)

        children = []
        for a, b in zip(cuts, cuts[1:]):
            if b - a < 2:
                self._settle(a)
                self._settle(b)
            else:
                children.append(Subproblem(a, b))
        return children

    def _seeds(self) -> List[Subproblem]:
        start = (self.x_ref(0), self.y_ref(self.last))
        cuts = [self.tree.root.lo] + [hi for _, hi in self.tree.intervals(0)]
        kept = []
        for t in cuts:
            if self.comp.compound[t]:
                self._defer(t, *start)
            else:
                kept.append(t)
        seeds = []
        for a, b in zip(kept, kept[1:]):
            if b - a < 2:
                self._settle(a)
                self._settle(b)
            else:
                seeds.append(Subproblem(a, b))
        return seeds

    def _pop(self, queue: Deque[Subproblem]) -> Subproblem:
        order = self.state.queue_order
        if order == QueueOrder.LIFO:
            return queue.pop()
        if order == QueueOrder.RANDOM:
            idx = int(self.state.rng.integers(len(queue)))
            queue.rotate(-idx)
            item = queue.popleft()
            queue.rotate(idx)
            return item
        return queue.popleft()

    def solve(self) -> None:
        queue: Deque[Subproblem] = deque(self._seeds())
        while queue:
            self.state.ledger.step_ops += 1
            queue.extend(self.step(self._pop(queue)))
        self._settle_leftovers()

    def _settle_leftovers(self) -> None:
        for local in range(1, self.last):
            self.state.ledger.step_ops += 1
            if self.comp.compound[local] or self.local_box(local) is None:
                continue
            if self.state.debug:
                raise InvariantViolation(
                    f"region {self.comp.truncated_index(local)} is still open "
                    f"after its component was solved"
                )
            logger.warning(f"Settling open item {local} of component {self.comp.span}")
            self._settle(local)

    def handle_compounds(self) -> None:
        for local, is_compound in enumerate(self.comp.compound):
            if is_compound:
                self.handle_compound(local)

    def handle_compound(self, local: int) -> None:
        """Settle the members of a compound region against the known points."""
        state, trackers = self.state, self.state.trackers
        members = self.comp.members[local]
        left = trackers.x_max(before=members[0])
        right = trackers.y_max(after=members[-1])
        stored = self.deferred.get(local)
        if stored is not None:
            left, right = _max_x(stored.left, left), _max_y(stored.right, right)
        boxes = [state.ts.regions[m] for m in members]
        # dominated members form an interval of the staircase; anchor it at the end
        head = dominates_region(left, boxes[0])
        pre = galloping_prefix_search(
            boxes,
            lambda b: head and dominates_region(left, b),
            charge=state.charge_evals,
            check=state.debug,
        )
        rest = boxes[pre:]
        tail = bool(rest) and dominates_region(right, rest[-1])
        suf = galloping_suffix_search(
            rest,
            lambda b: tail and dominates_region(right, b),
            charge=state.charge_evals,
            check=state.debug,
        )
        state.charge_evals(2)

        run: List[int] = []
        for m in members[pre : len(members) - suf]:
            state.ledger.step_ops += 1
            box = state.ts.regions[m]
            x_ref = _max_x(left, trackers.x_max(before=m))
            y_ref = _max_y(right, trackers.y_max(after=m))
            clipped = clip_region(box, (x_ref, y_ref))
            if clipped is None:
                self._flush(run)
                continue
            if clipped is not box or state.ts.flagged[m]:
                self._flush(run)
                state.encountered.add(m)
                state.decide(m, state.retrieve(m))
                continue
            run.append(m)
        self._flush(run)

    def _flush(self, run: List[int]) -> None:
        if len(run) == 1:
            self.state.ranges.append(
                FrontEntry(kind=FrontEntryKind.UNRETRIEVED, index=run[0])
            )
        elif run:
            self.state.ranges.append(
                FrontEntry(kind=FrontEntryKind.RANGE, index=run[0], last=run[-1])
            )
        run.clear()


def reconstruct(
    aux: AuxStructure,
    oracle: RetrievalOracle,
    debug: Optional[bool] = None,
    queue_order: Optional[QueueOrder] = None,
    queue_seed: Optional[int] = None,
) -> Tuple[ImplicitFront, CostLedger]:
    state = ReconstructionState(aux, oracle, debug, queue_order, queue_seed)
    return state.run()


def resolve(front: ImplicitFront, oracle: RetrievalOracle) -> Staircase:
    """Explicit staircase of an implicit front; uncharged."""
    vertices = []
    for entry in front.entries:
        for index in entry.indices():
            if entry.kind == FrontEntryKind.RETRIEVED and entry.point is not None:
                vertices.append(entry.point)
            else:
                vertices.append(oracle.retrieve(index))
    staircase = Staircase(vertices=vertices)
    if not staircase.is_valid():
        raise ResolutionMismatch(
            f"resolved front is not a staircase: {staircase.coords()}"
        )
    return staircase
