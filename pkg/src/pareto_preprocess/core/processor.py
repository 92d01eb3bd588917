import concurrent.futures
import logging
import time
from typing import List, Optional, Sequence, Tuple

from rich.progress import BarColumn, Progress, SpinnerColumn, TaskID, TextColumn

from pareto_preprocess.config import settings
from pareto_preprocess.core.analysis import (
    enumerate_front_types,
    pareto_cost,
    retrieval_lower_bound,
    verify_run,
)
from pareto_preprocess.core.errors import LimitExceeded
from pareto_preprocess.core.generator import (
    GeneratorConfig,
    GeneratorMode,
    PointMode,
    generate,
)
from pareto_preprocess.core.geometry import validate_instance
from pareto_preprocess.core.preprocess import preprocess
from pareto_preprocess.core.reconstruct import RetrievalOracle, reconstruct
from pareto_preprocess.core.schema import (
    AuxStructure,
    BenchRecord,
    BoundRatios,
    BoundReport,
    CostLedger,
    CostValue,
    ImplicitFront,
    Instance,
    RunReport,
    VerificationReport,
)

logger = logging.getLogger(__name__)


class ParetoProcessor:
    """Runs the pipeline phases on one instance and builds the reports."""

    def __init__(
        self,
        retrieval_cost: Optional[float] = None,
        debug: Optional[bool] = None,
        ratios: Optional[Tuple[float, float]] = None,
    ) -> None:
        self.retrieval_cost = (
            settings.retrieval_cost if retrieval_cost is None else retrieval_cost
        )
        self.debug = settings.debug_assert if debug is None else debug
        self.ratios = ratios or (settings.ratio_retrieval, settings.ratio_predicates)

    def prepare(self, inst: Instance) -> AuxStructure:
        validate_instance(inst)
        return preprocess(inst.regions)

    def run(
        self, inst: Instance, aux: Optional[AuxStructure] = None
    ) -> Tuple[AuxStructure, ImplicitFront, CostLedger]:
        aux = aux or self.prepare(inst)
        oracle = RetrievalOracle(inst, aux.truncated)
        front, ledger = reconstruct(aux, oracle, debug=self.debug)
        return aux, front, ledger

    def run_report(self, inst: Instance) -> RunReport:
        aux, front, ledger = self.run(inst)
        cost = pareto_cost(aux.truncated, aux.graph, inst, self.retrieval_cost)
        return RunReport(
            front=front.entries,
            ledger=ledger,
            tilde_size=len(cost.members),
            cp=CostValue(C=self.retrieval_cost, value=cost.cp),
        )

    def verify(self, inst: Instance) -> VerificationReport:
        aux, front, ledger = self.run(inst)
        return verify_run(
            inst, aux, front, ledger, self.retrieval_cost, ratios=self.ratios
        )

    def bound(self, inst: Instance) -> BoundReport:
        aux = self.prepare(inst)
        cost = pareto_cost(aux.truncated, aux.graph, inst, self.retrieval_cost)
        try:
            front_types: Optional[int] = enumerate_front_types(inst.regions).count
        except LimitExceeded as e:
            logger.debug(f"Front type enumeration skipped: {e}")
            front_types = None
        return BoundReport(
            tilde=cost.tilde,
            cp=cost.cp,
            retrieval_lb=retrieval_lower_bound(cost),
            front_types=front_types,
            ratios=BoundRatios(retrieval=self.ratios[0], predicates=self.ratios[1]),
            members=cost.members,
        )


def measure_preprocess(
    n: int,
    seed: int = 0,
    mode: GeneratorMode = GeneratorMode.SPLIT,
    point_mode: PointMode = PointMode.UNIFORM,
    reconstruct_run: bool = True,
) -> BenchRecord:
    """Counts for one generated instance; times are advisory."""
    inst = generate(GeneratorConfig(seed=seed, n=n, mode=mode, point_mode=point_mode))
    started = time.perf_counter()
    aux = preprocess(inst.regions)
    wall = {"preprocess": time.perf_counter() - started}
    ledger = CostLedger()
    if reconstruct_run:
        started = time.perf_counter()
        _, ledger = reconstruct(aux, RetrievalOracle(inst, aux.truncated), debug=False)
        wall["reconstruct"] = time.perf_counter() - started
    return BenchRecord(
        n=n,
        preprocess_ops=aux.preprocess_ops,
        retrievals=ledger.retrievals,
        predicate_evals=ledger.predicate_evals,
        wall_times=wall,
    )


def _bench_one(
    n: int,
    seed: int,
    mode: GeneratorMode,
    point_mode: PointMode,
    progress: Progress,
    task_id: TaskID,
) -> BenchRecord:
    """Worker function for parallel benchmarking."""
    record = measure_preprocess(n, seed, mode, point_mode)
    progress.advance(task_id)
    return record


def bench(
    sizes: Sequence[int],
    seed: int = 0,
    mode: GeneratorMode = GeneratorMode.SPLIT,
    point_mode: PointMode = PointMode.UNIFORM,
    workers: Optional[int] = None,
) -> List[BenchRecord]:
    workers = workers or settings.bench_workers
    logger.info(f"Benchmarking {len(sizes)} sizes with {workers} workers...")
    with Progress(
        SpinnerColumn(),
        BarColumn(),
        TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
        TextColumn("[progress.description]{task.description}"),
        transient=True,
    ) as progress:
        main_task = progress.add_task(
            f"[cyan]Measuring {len(sizes)} instance sizes...", total=len(sizes)
        )
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            future_to_index = {
                executor.submit(
                    _bench_one, n, seed, mode, point_mode, progress, main_task
                ): i
                for i, n in enumerate(sizes)
            }
            results = []
            for future in concurrent.futures.as_completed(future_to_index):
                results.append((future_to_index[future], future.result()))

    results.sort(key=lambda x: x[0])
    return [record for _, record in results]
