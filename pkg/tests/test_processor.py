import math
import statistics

from pareto_preprocess.core.generator import GeneratorMode
from pareto_preprocess.core.processor import ParetoProcessor, bench, measure_preprocess


def test_processor_run_report(i4):
    report = ParetoProcessor(retrieval_cost=10.0).run_report(i4)
    assert report.ledger.retrievals == 1
    assert report.tilde_size == 1
    assert report.cp.value == 10.0


def test_processor_bound_counts_front_types(i4):
    bound = ParetoProcessor().bound(i4)
    assert bound.tilde == [4]
    assert bound.retrieval_lb == 1
    assert bound.front_types is not None and bound.front_types >= 1


def test_measure_preprocess_without_reconstruction():
    record = measure_preprocess(16, seed=2, reconstruct_run=False)
    assert record.n == 16
    assert record.retrievals == 0
    assert record.preprocess_ops > 0
    assert set(record.wall_times) == {"preprocess"}


def test_bench_keeps_size_order():
    records = bench([8, 4, 16], seed=1, mode=GeneratorMode.STAIRCASE, workers=2)
    assert [r.n for r in records] == [8, 4, 16]
    assert all("reconstruct" in r.wall_times for r in records)


def test_preprocess_ops_grow_like_n_log_n():
    sizes = [2**k for k in range(10, 15)]
    ratios = []
    for n in sizes:
        record = measure_preprocess(
            n, seed=3, mode=GeneratorMode.STAIRCASE, reconstruct_run=False
        )
        ratios.append(record.preprocess_ops / (n * math.log2(n)))
    c = statistics.median(ratios)
    assert all(c / 2 <= r <= 2 * c for r in ratios)
