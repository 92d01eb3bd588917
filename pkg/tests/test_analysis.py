import itertools
import math

import numpy as np
import pytest

from pareto_preprocess.core.analysis import (
    bruteforce_subproblems,
    bruteforce_visibility,
    candidate_grid,
    conditioned_visibility,
    enumerate_front_types,
    front_edges,
    interesting_set,
    pareto_cost,
    retrieval_lower_bound,
    verify_run,
)
from pareto_preprocess.core.errors import LimitExceeded, VerificationFailure
from pareto_preprocess.core.generator import GeneratorConfig, GeneratorMode, generate
from pareto_preprocess.core.preprocess import preprocess
from pareto_preprocess.core.reconstruct import RetrievalOracle, reconstruct
from pareto_preprocess.core.schema import (
    CostLedger,
    FrontEntry,
    FrontEntryKind,
    ImplicitFront,
    Point,
    TildeCondition,
)

from conftest import make_instance


def cost_of(inst, retrieval_cost=10.0):
    aux = preprocess(inst.regions)
    return pareto_cost(aux.truncated, aux.graph, inst, retrieval_cost)


def run(inst):
    aux = preprocess(inst.regions)
    front, ledger = reconstruct(aux, RetrievalOracle(inst, aux.truncated))
    return aux, front, ledger


@pytest.fixture
def i4_high():
    return make_instance(
        [("A", 0, 8, 1, 9), ("B", 2, 6, 3, 7), ("C", 4, 4, 5, 5), ("D", 6, 0, 7, 9)],
        [(0.5, 8.5), (2.5, 6.5), (4.5, 4.5), (6.5, 8.6)],
    )


def test_front_edges_owners():
    a, b = Point(x=1, y=3), Point(x=2, y=1)
    edges = front_edges([a, b], far=10)
    assert [seg for seg, _ in edges] == [
        (-10, 3, 1, 3),
        (1, 1, 1, 3),
        (1, 1, 2, 1),
        (2, -10, 2, 1),
    ]
    assert [owner for _, owner in edges] == [a, a, b, b]
    assert front_edges([], far=10) == []


def test_tilde_i3(i3):
    report = cost_of(i3)
    assert report.tilde == [1, 2, 3]
    by_index = {m.index: m for m in report.members}
    assert by_index[1].conditions == [TildeCondition.CROSSED_BY_FOREIGN_EDGE]
    assert by_index[2].conditions == [
        TildeCondition.FLAGGED,
        TildeCondition.CROSSED_BY_FOREIGN_EDGE,
        TildeCondition.NOT_SINK,
    ]
    assert by_index[3].conditions == [TildeCondition.NOT_SINK]
    assert report.cp == pytest.approx(30.0)
    assert retrieval_lower_bound(report) == 1


def test_tilde_i4_only_holds_the_tall_region(i4):
    report = cost_of(i4)
    assert [m.region_id for m in report.members] == ["D"]
    assert report.cp == pytest.approx(10.0)


def test_tilde_empty_for_separators(i2, i5):
    for inst in (i2, i5):
        report = cost_of(inst)
        assert report.members == []
        assert report.cp == 0
        assert retrieval_lower_bound(report) == 0


def test_conditioned_visibility_counts_dominated_predecessors(i4_high):
    aux = preprocess(i4_high.regions)
    v_set, h_set = conditioned_visibility(aux.truncated, aux.graph, i4_high, 4)
    assert v_set == [4]
    assert h_set == [2, 3, 4]
    report = pareto_cost(aux.truncated, aux.graph, i4_high, 10.0)
    assert report.tilde == [1, 4]
    assert report.cp == pytest.approx(20.0 + math.log2(3))


def test_cost_scales_with_retrieval_cost(i3):
    assert cost_of(i3, retrieval_cost=1.0).cp == pytest.approx(3.0)


def test_candidate_grid_stays_inside_regions(i3):
    for region, cands in zip(i3.regions, candidate_grid(i3.regions)):
        assert cands
        assert all(region.contains(p) for p in cands)


def test_front_types_small_instances(i1, i2, i3):
    assert enumerate_front_types(i1.regions).count == 1
    assert enumerate_front_types(i2.regions).count == 1
    result = enumerate_front_types(i3.regions)
    assert result.count == 3
    assert set(result.candidate_grid) == {"A", "B", "C"}


def test_front_types_limits(i3):
    with pytest.raises(LimitExceeded):
        enumerate_front_types(i3.regions, limit=2)
    with pytest.raises(LimitExceeded):
        enumerate_front_types(i3.regions, max_placements=10)


def test_bruteforce_visibility_matches_graph(i3, i4):
    for inst in (i3, i4):
        aux = preprocess(inst.regions)
        expected = sorted(
            aux.graph.arrows(),
            key=lambda a: (a.source, a.target, a.orientation.value),
        )
        assert bruteforce_visibility(aux.truncated.regions) == expected


def test_bruteforce_subproblems(i3, i4):
    assert bruteforce_subproblems(preprocess(i3.regions).truncated.regions) == [
        (0, 3),
        (3, 4),
    ]
    assert bruteforce_subproblems(preprocess(i4.regions).truncated.regions) == [
        (0, 4),
        (4, 5),
    ]


@pytest.mark.parametrize("name", ["i3", "i4", "i5"])
def test_verify_run_fixtures(name, request):
    inst = request.getfixturevalue(name)
    aux, front, ledger = run(inst)
    report = verify_run(inst, aux, front, ledger, 10.0, ratios=(1.0, 8.0))
    assert report.front_matches
    assert report.retrievals >= report.retrieval_lower_bound
    assert report.retrieval_ratio <= 1.0


def test_verify_run_i3_values(i3):
    aux, front, ledger = run(i3)
    report = verify_run(i3, aux, front, ledger, 10.0)
    assert report.retrievals == 3
    assert report.tilde_size == 3
    assert report.retrieval_ratio == pytest.approx(1.0)


def test_verify_run_wrong_front(i3):
    aux, _, ledger = run(i3)
    partial = ImplicitFront(
        entries=[
            FrontEntry(
                kind=FrontEntryKind.RETRIEVED, index=2, point=Point(x=3.5, y=5, id="B")
            )
        ]
    )
    with pytest.raises(VerificationFailure) as exc:
        verify_run(i3, aux, partial, ledger)
    assert exc.value.clause == "a"


def test_verify_run_below_lower_bound(i3):
    aux, front, _ = run(i3)
    with pytest.raises(VerificationFailure) as exc:
        verify_run(i3, aux, front, CostLedger())
    assert exc.value.clause == "b"


def test_verify_run_ratio_exceeded(i3):
    aux, front, ledger = run(i3)
    with pytest.raises(VerificationFailure) as exc:
        verify_run(i3, aux, front, ledger, ratios=(0.5, 8.0))
    assert exc.value.clause == "c"


def test_interesting_set_log_terms_stay_below_front_type_entropy():
    rng = np.random.default_rng(0)
    checked = 0
    for seed in range(1000):
        if checked == 200:
            break
        mode = GeneratorMode.SPLIT if seed % 2 else GeneratorMode.STAIRCASE
        inst = generate(GeneratorConfig(seed=seed, n=3 + (seed % 4 == 0), mode=mode))
        try:
            count = enumerate_front_types(inst.regions, max_placements=4096).count
        except LimitExceeded:
            continue
        aux = preprocess(inst.regions)
        placements = list(itertools.product(*candidate_grid(inst.regions)))
        if len(placements) > 48:
            picks = rng.choice(len(placements), size=48, replace=False)
            placements = [placements[k] for k in picks]
        for combo in placements:
            placed = inst.model_copy(update={"points": list(combo)})
            members = interesting_set(aux.truncated, aux.graph, placed)
            assert math.prod(m.v_size * m.h_size for m in members) <= count**2
        checked += 1
    assert checked == 200
