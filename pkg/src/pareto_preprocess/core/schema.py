from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class RegionKind(str, Enum):
    RECTANGLE = "rectangle"
    POINT = "point"
    SENTINEL = "sentinel"


class Orientation(str, Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


class RegionLabel(str, Enum):
    NEGATIVE = "negative"
    POSITIVE = "positive"
    POTENTIAL = "potential"


class Point(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float = Field(..., description="x coordinate", allow_inf_nan=False)
    y: float = Field(..., description="y coordinate", allow_inf_nan=False)
    id: Optional[str] = Field(None, description="Id of the region holding the point")

    @property
    def xy(self) -> Tuple[float, float]:
        return (self.x, self.y)


class Region(BaseModel):
    """Closed axis-aligned rectangle; degenerate rectangles are point regions."""

    model_config = ConfigDict(frozen=True)

    id: str = Field(..., description="Stable original identifier")
    xmin: float = Field(..., allow_inf_nan=False)
    ymin: float = Field(..., allow_inf_nan=False)
    xmax: float = Field(..., allow_inf_nan=False)
    ymax: float = Field(..., allow_inf_nan=False)
    kind: RegionKind = Field(RegionKind.RECTANGLE, description="Region kind")

    @model_validator(mode="before")
    @classmethod
    def _infer_kind(cls, data: Any) -> Any:
        if isinstance(data, dict) and "kind" not in data:
            degenerate = data.get("xmin") == data.get("xmax") and data.get(
                "ymin"
            ) == data.get("ymax")
            data = {
                **data,
                "kind": RegionKind.POINT if degenerate else RegionKind.RECTANGLE,
            }
        return data

    @model_validator(mode="after")
    def _check_extent(self) -> "Region":
        if self.xmin > self.xmax or self.ymin > self.ymax:
            raise ValueError(f"region {self.id} has inverted extent")
        degenerate = self.xmin == self.xmax and self.ymin == self.ymax
        if self.kind == RegionKind.POINT and not degenerate:
            raise ValueError(f"point region {self.id} must be degenerate")
        if self.kind == RegionKind.RECTANGLE and degenerate:
            raise ValueError(f"rectangle {self.id} is degenerate; use kind=point")
        return self

    @classmethod
    def from_point(
        cls, region_id: str, p: Point, kind: RegionKind = RegionKind.POINT
    ) -> "Region":
        return cls(id=region_id, xmin=p.x, ymin=p.y, xmax=p.x, ymax=p.y, kind=kind)

    @property
    def top_right(self) -> Point:
        return Point(x=self.xmax, y=self.ymax)

    @property
    def bottom_left(self) -> Point:
        return Point(x=self.xmin, y=self.ymin)

    @property
    def is_degenerate(self) -> bool:
        return self.xmin == self.xmax and self.ymin == self.ymax

    def contains(self, p: Point) -> bool:
        return self.xmin <= p.x <= self.xmax and self.ymin <= p.y <= self.ymax

    def with_extent(
        self, xmin: float, ymin: float, xmax: float, ymax: float
    ) -> "Region":
        kind = self.kind
        if kind == RegionKind.RECTANGLE and xmin == xmax and ymin == ymax:
            kind = RegionKind.POINT
        return Region(id=self.id, xmin=xmin, ymin=ymin, xmax=xmax, ymax=ymax, kind=kind)


class Instance(BaseModel):
    regions: List[Region] = Field(..., description="Uncertainty regions, any order")
    points: List[Point] = Field(
        default_factory=list, description="Hidden true points aligned with regions"
    )

    @model_validator(mode="after")
    def _align_points(self) -> "Instance":
        # points carrying ids are re-ordered to follow the region list
        if self.points and all(p.id is not None for p in self.points):
            by_id: Dict[str, Point] = {p.id: p for p in self.points if p.id}
            if set(by_id) == {r.id for r in self.regions}:
                self.points = [by_id[r.id] for r in self.regions]
        return self

    def point_of(self, region_id: str) -> Point:
        for region, point in zip(self.regions, self.points):
            if region.id == region_id:
                return point
        raise KeyError(region_id)

    def with_ids(self) -> "Instance":
        points = [
            Point(x=p.x, y=p.y, id=r.id) for r, p in zip(self.regions, self.points)
        ]
        return Instance(regions=list(self.regions), points=points)


class Staircase(BaseModel):
    model_config = ConfigDict(frozen=True)

    vertices: List[Point] = Field(
        default_factory=list, description="Increasing x, decreasing y"
    )

    def coords(self) -> List[Tuple[float, float]]:
        return [v.xy for v in self.vertices]

    def is_valid(self) -> bool:
        return all(
            a.x < b.x and a.y > b.y for a, b in zip(self.vertices, self.vertices[1:])
        )

    def __len__(self) -> int:
        return len(self.vertices)


class TruncatedSet(BaseModel):
    """Non-negative regions clipped to the guaranteed boundary, with anchors.

    Index 0 and index ``n + 1`` hold the sentinel anchors.
    """

    regions: List[Region] = Field(..., description="Sentinel-anchored, index order")
    flagged: List[bool] = Field(..., description="Region was clipped by truncation")
    originals: List[Region] = Field(
        ..., description="Untruncated region per index (sentinels map to themselves)"
    )

    @property
    def n(self) -> int:
        return len(self.regions) - 2

    def origin(self, index: int) -> Optional[str]:
        if self.regions[index].kind == RegionKind.SENTINEL:
            return None
        return self.originals[index].id

    def index_of(self, region_id: str) -> int:
        for idx, r in enumerate(self.originals):
            if r.id == region_id and r.kind != RegionKind.SENTINEL:
                return idx
        raise KeyError(region_id)


class Arrow(BaseModel):
    model_config = ConfigDict(frozen=True)

    source: int
    target: int
    orientation: Orientation


class DependencyGraph(BaseModel):
    """Visibility arrows with the per-region search attributes."""

    v_sets: List[List[int]] = Field(
        ..., description="Vertically visible successors, index order, self included"
    )
    h_sets: List[List[int]] = Field(
        ..., description="Horizontally visible predecessors, index order, self included"
    )
    v_next: List[int] = Field(
        ..., description="First region whose xmin is at or right of the slab's xmax"
    )
    h_prev: List[int] = Field(
        ..., description="Last earlier region whose ymin is at or above the slab's ymax"
    )
    back_ref: List[Optional[int]] = Field(..., description="Highest j with i in V_j")
    fwd_ref: List[Optional[int]] = Field(..., description="Lowest j with i in H_j")
    v_spans: List[Dict[int, List[Tuple[float, float]]]] = Field(
        default_factory=list, description="Visible x-intervals per vertical arrow"
    )
    h_spans: List[Dict[int, List[Tuple[float, float]]]] = Field(
        default_factory=list, description="Visible y-intervals per horizontal arrow"
    )

    def __len__(self) -> int:
        return len(self.v_sets)

    def out_targets(self, i: int) -> List[int]:
        return sorted({t for t in self.v_sets[i] + self.h_sets[i] if t != i})

    def arrows(self) -> List[Arrow]:
        found = []
        for i in range(len(self)):
            found.extend(
                Arrow(source=i, target=t, orientation=Orientation.VERTICAL)
                for t in self.v_sets[i]
                if t != i
            )
            found.extend(
                Arrow(source=i, target=t, orientation=Orientation.HORIZONTAL)
                for t in self.h_sets[i]
                if t != i
            )
        return found

    def in_degrees(self) -> List[int]:
        degrees = [0] * len(self)
        for i in range(len(self)):
            for t in self.out_targets(i):
                degrees[t] += 1
        return degrees

    def sources(self) -> List[int]:
        return [i for i, d in enumerate(self.in_degrees()) if d == 0]

    def sinks(self) -> List[int]:
        return [i for i in range(len(self)) if not self.out_targets(i)]


class SubproblemNode(BaseModel):
    lo: int
    hi: int
    children: List[int] = Field(default_factory=list, description="Child node ids")


class SubproblemTree(BaseModel):
    nodes: List[SubproblemNode] = Field(..., description="Node 0 is the root")
    ending_at: Dict[int, int] = Field(
        default_factory=dict, description="Highest node whose interval ends at i"
    )
    starting_at: Dict[int, int] = Field(
        default_factory=dict, description="Highest node whose interval starts at i"
    )

    @property
    def root(self) -> SubproblemNode:
        return self.nodes[0]

    def intervals(self, node_id: int = 0) -> List[Tuple[int, int]]:
        node = self.nodes[node_id]
        return [(self.nodes[c].lo, self.nodes[c].hi) for c in node.children]

    def leaves(self) -> List[Tuple[int, int]]:
        found: List[Tuple[int, int]] = []
        stack = [0]
        while stack:
            node = self.nodes[stack.pop()]
            if node.children:
                stack.extend(reversed(node.children))
            else:
                found.append((node.lo, node.hi))
        return found


class CanonicalComponent(BaseModel):
    """One culled component: anchors, regions and compound regions, local indices."""

    span: Tuple[int, int] = Field(..., description="Truncated index range, inclusive")
    regions: List[Region] = Field(..., description="Anchor, items, anchor")
    members: List[List[int]] = Field(..., description="Truncated indices per item")
    compound: List[bool] = Field(..., description="Item is a compound region")
    graph: DependencyGraph
    tree: Optional[SubproblemTree] = None

    def truncated_index(self, local: int) -> int:
        if self.compound[local]:
            raise ValueError(f"local index {local} is a compound region")
        return self.members[local][0]


class CanonicalSet(BaseModel):
    components: List[CanonicalComponent] = Field(default_factory=list)
    separators: List[int] = Field(
        default_factory=list, description="Source-and-sink truncated indices"
    )


class AuxStructure(BaseModel):
    """Everything reconstruction needs, computed from the regions alone."""

    labels: Dict[str, RegionLabel] = Field(..., description="Label per original id")
    truncated: TruncatedSet
    graph: DependencyGraph
    canonical: CanonicalSet
    preprocess_ops: float = Field(0.0, description="Metered preprocessing steps")


class QueueOrder(str, Enum):
    FIFO = "fifo"
    LIFO = "lifo"
    RANDOM = "random"


class FrontEntryKind(str, Enum):
    RETRIEVED = "retrieved"
    UNRETRIEVED = "unretrieved"
    RANGE = "range"


class FrontEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: FrontEntryKind
    index: int = Field(..., description="Truncated index (first index for ranges)")
    last: Optional[int] = Field(None, description="Last truncated index of a range")
    point: Optional[Point] = Field(None, description="Known point of retrieved entries")

    def indices(self) -> List[int]:
        if self.kind == FrontEntryKind.RANGE and self.last is not None:
            return list(range(self.index, self.last + 1))
        return [self.index]


class ImplicitFront(BaseModel):
    """Front in index order; entries may still refer to unretrieved points."""

    entries: List[FrontEntry] = Field(default_factory=list)

    def indices(self) -> List[int]:
        return [i for e in self.entries for i in e.indices()]

    def __len__(self) -> int:
        return len(self.indices())


class CostLedger(BaseModel):
    retrievals: int = Field(0, description="Distinct charged retrievals")
    predicate_evals: int = Field(0, description="Dominance tests inside galloping")
    step_ops: int = Field(0, description="Queue, window and tree navigation steps")

    def weighted_cost(self, retrieval_cost: float) -> float:
        return self.retrievals * retrieval_cost + self.predicate_evals + self.step_ops


class TildeCondition(str, Enum):
    FLAGGED = "flagged"
    CROSSED_BY_FOREIGN_EDGE = "crossed_by_foreign_edge"
    NOT_SINK = "not_sink"


class TildeMember(BaseModel):
    index: int = Field(..., description="Truncated index")
    region_id: str
    conditions: List[TildeCondition]
    v_size: int = Field(1, ge=1, description="|V_i(P)|")
    h_size: int = Field(1, ge=1, description="|H_i(P)|")


class ParetoCostReport(BaseModel):
    members: List[TildeMember] = Field(default_factory=list)
    retrieval_cost: float = Field(..., description="C used for the cost value")
    cp: float = Field(0.0, description="Sum of C + log2|V_i(P)| + log2|H_i(P)|")

    @property
    def tilde(self) -> List[int]:
        return [m.index for m in self.members]


class FrontTypeCount(BaseModel):
    count: int = Field(..., ge=1)
    candidate_grid: Dict[str, List[Tuple[float, float]]] = Field(
        ..., description="Candidate placements per region id"
    )


class VerificationReport(BaseModel):
    front_matches: bool
    retrievals: int
    retrieval_lower_bound: int
    tilde_size: int
    retrieval_ratio: float
    predicate_ratio: float


class CostValue(BaseModel):
    C: float = Field(..., description="Retrieval cost used")
    value: float


class RunReport(BaseModel):
    front: List[FrontEntry]
    ledger: CostLedger
    tilde_size: int
    cp: CostValue


class BoundRatios(BaseModel):
    retrieval: float
    predicates: float


class BoundReport(BaseModel):
    tilde: List[int]
    cp: float
    retrieval_lb: int
    front_types: Optional[int] = None
    ratios: BoundRatios
    members: List[TildeMember] = Field(default_factory=list)


class BenchRecord(BaseModel):
    n: int
    preprocess_ops: float
    retrievals: int
    predicate_evals: int
    wall_times: Dict[str, float] = Field(
        default_factory=dict, description="Advisory seconds per phase"
    )
