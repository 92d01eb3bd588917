import logging
from enum import Enum
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from pareto_preprocess.config import settings
from pareto_preprocess.core.errors import (
    GenerationRetryExceeded,
    InstanceValidationError,
)
from pareto_preprocess.core.geometry import validate_instance
from pareto_preprocess.core.schema import Instance, Point, Region

logger = logging.getLogger(__name__)

Box = Tuple[float, float, float, float]


class GeneratorMode(str, Enum):
    SPLIT = "split"
    STAIRCASE = "staircase"
    GADGET_FIGS = "gadget-figs"


class PointMode(str, Enum):
    UNIFORM = "uniform"
    CORNERS = "corners"
    ADVERSARIAL_BL = "adversarial-bl"


class GeneratorConfig(BaseModel):
    seed: int = Field(0, ge=0, lt=2**64, description="Random seed")
    n: int = Field(8, ge=1, description="Number of regions")
    mode: GeneratorMode = Field(GeneratorMode.SPLIT, description="Region layout")
    point_mode: PointMode = Field(PointMode.UNIFORM, description="Point placement")


class InstanceGenerator:
    """Random disjoint instances; every returned instance passes validation."""

    def __init__(self, config: GeneratorConfig, side: float = 1000.0) -> None:
        self.config = config
        self.side = side
        self.attempt = 0

    def generate(self) -> Instance:
        attempts = max(1, settings.generator_attempts)
        try:
            for attempt in Retrying(
                stop=stop_after_attempt(attempts),
                retry=retry_if_exception_type((InstanceValidationError, ValueError)),
                before_sleep=lambda retry_state: logger.warning(
                    f"Generated instance rejected: "
                    f"{retry_state.outcome.exception()}. Retrying... "
                    f"(Attempt {retry_state.attempt_number})"
                ),
            ):
                with attempt:
                    self.attempt = attempt.retry_state.attempt_number - 1
                    inst = self._draw()
                    validate_instance(inst)
        except RetryError as e:
            raise GenerationRetryExceeded(
                f"no valid instance for {self.config.model_dump()} "
                f"after {attempts} attempts"
            ) from e
        return inst

    def _draw(self) -> Instance:
        rng = np.random.default_rng([self.config.seed, self.attempt])
        layout = {
            GeneratorMode.SPLIT: self._split,
            GeneratorMode.STAIRCASE: self._staircase,
            GeneratorMode.GADGET_FIGS: self._gadgets,
        }[self.config.mode]
        boxes = layout(rng)
        regions = [
            Region(
                id=f"R{k}",
                xmin=round(b[0], 6),
                ymin=round(b[1], 6),
                xmax=round(b[2], 6),
                ymax=round(b[3], 6),
            )
            for k, b in enumerate(boxes)
        ]
        points = [self._place(rng, r) for r in regions]
        return Instance(regions=regions, points=points)

    def _split(self, rng: np.random.Generator) -> List[Box]:
        cells: List[Box] = [(0.0, 0.0, self.side, self.side)]
        while len(cells) < self.config.n:
            cells.sort(key=lambda c: (c[2] - c[0]) * (c[3] - c[1]))
            x0, y0, x1, y1 = cells.pop()
            cut = float(rng.uniform(0.3, 0.7))
            if x1 - x0 >= y1 - y0:
                xm = x0 + cut * (x1 - x0)
                cells += [(x0, y0, xm, y1), (xm, y0, x1, y1)]
            else:
                ym = y0 + cut * (y1 - y0)
                cells += [(x0, y0, x1, ym), (x0, ym, x1, y1)]
        return [self._shrink(rng, c) for c in cells]

    def _shrink(self, rng: np.random.Generator, cell: Box) -> Box:
        x0, y0, x1, y1 = cell
        mx = rng.uniform(0.02, 0.3, size=2) * (x1 - x0)
        my = rng.uniform(0.02, 0.3, size=2) * (y1 - y0)
        return (x0 + mx[0], y0 + my[0], x1 - mx[1], y1 - my[1])

    def _staircase(self, rng: np.random.Generator) -> List[Box]:
        n = self.config.n
        slot = self.side / n
        boxes = []
        for k in range(n):
            x0 = k * slot + rng.uniform(0.05, 0.3) * slot
            x1 = (k + 1) * slot - rng.uniform(0.05, 0.3) * slot
            y0 = (n - 1 - k) * slot + rng.uniform(0.0, 0.1) * slot
            # tall columns reach exactly one slot up into the left neighbour
            tall = k % 3 != 2
            y1 = y0 + rng.uniform(*((1.2, 1.8) if tall else (0.3, 0.85))) * slot
            boxes.append((x0, y0, x1, y1))
        return boxes

    def _gadgets(self, rng: np.random.Generator) -> List[Box]:
        groups = -(-self.config.n // 4)
        unit = self.side / (10 * groups)
        boxes: List[Box] = []
        for q in range(groups):
            ox, oy = 10 * q * unit, 12 * (groups - 1 - q) * unit
            for i in range(3):
                jit = rng.uniform(0.0, 0.2, size=4) * unit
                boxes.append(
                    (
                        ox + 2 * i * unit + jit[0],
                        oy + (8 - 2 * i) * unit + jit[1],
                        ox + (2 * i + 1) * unit - jit[2],
                        oy + (9 - 2 * i) * unit - jit[3],
                    )
                )
            jit = rng.uniform(0.0, 0.2, size=4) * unit
            boxes.append(
                (
                    ox + 6 * unit + jit[0],
                    oy + jit[1],
                    ox + 7 * unit - jit[2],
                    oy + 9 * unit - jit[3],
                )
            )
        return boxes[: self.config.n]

    def _place(self, rng: np.random.Generator, r: Region) -> Point:
        w, h = r.xmax - r.xmin, r.ymax - r.ymin
        mode = self.config.point_mode
        if mode == PointMode.CORNERS:
            eps = rng.uniform(1e-4, 1e-3, size=2)
            right, top = rng.integers(0, 2, size=2)
            x = r.xmax - eps[0] * w if right else r.xmin + eps[0] * w
            y = r.ymax - eps[1] * h if top else r.ymin + eps[1] * h
        elif mode == PointMode.ADVERSARIAL_BL:
            u = rng.uniform(0.001, 0.05, size=2)
            x, y = r.xmin + u[0] * w, r.ymin + u[1] * h
        else:
            u = rng.uniform(0.0, 1.0, size=2)
            x, y = r.xmin + u[0] * w, r.ymin + u[1] * h
        x = min(max(round(float(x), 6), r.xmin), r.xmax)
        y = min(max(round(float(y), 6), r.ymin), r.ymax)
        return Point(x=x, y=y, id=r.id)


def generate(config: GeneratorConfig) -> Instance:
    return InstanceGenerator(config).generate()
