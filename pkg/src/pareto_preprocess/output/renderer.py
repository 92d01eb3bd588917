import logging
import os
from typing import Any, Dict, List, Optional, Sequence, Set

from jinja2 import Environment, FileSystemLoader, select_autoescape

from pareto_preprocess.core.geometry import guaranteed_boundary, pareto_front_bruteforce
from pareto_preprocess.core.schema import (
    AuxStructure,
    ImplicitFront,
    Instance,
    Point,
    Region,
    RegionLabel,
)

logger = logging.getLogger(__name__)

TEMPLATES_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "templates")


class SceneRenderer:
    """Writes the debug picture of an instance; element order is stable."""

    def __init__(
        self, templates_dir: str = TEMPLATES_DIR, size: int = 800, margin: int = 20
    ) -> None:
        self.env = Environment(
            loader=FileSystemLoader(templates_dir),
            autoescape=select_autoescape(["html", "xml", "j2"]),
        )
        self.size = size
        self.margin = margin

    def _frame(self, regions: Sequence[Region]) -> Any:
        xmin = min(r.xmin for r in regions)
        ymin = min(r.ymin for r in regions)
        span = max(
            max(r.xmax for r in regions) - xmin, max(r.ymax for r in regions) - ymin
        ) or 1.0
        scale = (self.size - 2 * self.margin) / span
        top = self.size - self.margin

        def to_svg(x: float, y: float) -> Dict[str, float]:
            return {
                "x": round(self.margin + (x - xmin) * scale, 3),
                "y": round(top - (y - ymin) * scale, 3),
            }

        return to_svg, scale

    def render_svg(
        self,
        inst: Instance,
        aux: AuxStructure,
        front: Optional[ImplicitFront] = None,
        retrieved: Optional[Set[int]] = None,
    ) -> str:
        to_svg, scale = self._frame(inst.regions)
        ts = aux.truncated

        def box(r: Region, **extra: Any) -> Dict[str, Any]:
            corner = to_svg(r.xmin, r.ymax)
            return {
                "id": r.id,
                **corner,
                "w": round((r.xmax - r.xmin) * scale, 3),
                "h": round((r.ymax - r.ymin) * scale, 3),
                **extra,
            }

        def polyline(points: Sequence[Point]) -> str:
            coords = [to_svg(p.x, p.y) for p in points]
            return " ".join(f"{c['x']},{c['y']}" for c in coords)

        flagged = {ts.originals[i].id for i in range(1, ts.n + 1) if ts.flagged[i]}
        regions = [
            box(
                r,
                negative=aux.labels.get(r.id) == RegionLabel.NEGATIVE,
                flagged=r.id in flagged,
            )
            for r in inst.regions
        ]
        truncated = [box(ts.regions[i]) for i in range(1, ts.n + 1)]

        arrows: List[Dict[str, Any]] = []
        for arrow in aux.graph.arrows():
            src, dst = ts.regions[arrow.source], ts.regions[arrow.target]
            a = to_svg((src.xmin + src.xmax) / 2, (src.ymin + src.ymax) / 2)
            b = to_svg((dst.xmin + dst.xmax) / 2, (dst.ymin + dst.ymax) / 2)
            arrows.append(
                {
                    "orientation": arrow.orientation.value,
                    "x1": a["x"],
                    "y1": a["y"],
                    "x2": b["x"],
                    "y2": b["y"],
                }
            )

        retrieved = retrieved or set()
        if front is not None:
            retrieved |= {e.index for e in front.entries if e.point is not None}
        by_id = {r.id: p for r, p in zip(inst.regions, inst.points)}
        marks = []
        for i in range(1, ts.n + 1):
            p = by_id.get(ts.originals[i].id)
            if p is not None:
                marks.append({**to_svg(p.x, p.y), "retrieved": i in retrieved})

        template = self.env.get_template("scene.svg.j2")
        return template.render(
            width=self.size,
            height=self.size,
            regions=regions,
            truncated=truncated,
            boundary=polyline(guaranteed_boundary(inst.regions).vertices),
            arrows=arrows,
            front=polyline(pareto_front_bruteforce(inst.points).vertices)
            if front is not None
            else "",
            points=marks,
        )


def render_svg(
    inst: Instance,
    aux: AuxStructure,
    front: Optional[ImplicitFront] = None,
    retrieved: Optional[Set[int]] = None,
) -> str:
    return SceneRenderer().render_svg(inst, aux, front, retrieved)
