"""Galloping (doubling then binary) search for monotone predicates."""

import logging
from typing import Callable, Optional, Sequence, TypeVar

from pareto_preprocess.core.errors import PredicateNotMonotone

logger = logging.getLogger(__name__)

T = TypeVar("T")


def _gallop(size: int, test: Callable[[int], bool]) -> int:
    if size == 0 or not test(0):
        return 0
    good, probe = 0, 1
    while probe < size and test(probe):
        good, probe = probe, 2 * probe + 1
    lo, hi = good + 1, min(probe, size)
    while lo < hi:
        mid = (lo + hi) // 2
        if test(mid):
            lo = mid + 1
        else:
            hi = mid
    return lo


def _check_prefix(size: int, at: Callable[[int], bool], k: int) -> None:
    for idx in range(size):
        if at(idx) != (idx < k):
            raise PredicateNotMonotone(
                f"predicate is {at(idx)} at position {idx} but the split is {k}"
            )


def galloping_prefix_search(
    seq: Sequence[T],
    pred: Callable[[T], bool],
    charge: Optional[Callable[[int], None]] = None,
    check: bool = False,
) -> int:
    """Length of the true prefix of ``pred`` over ``seq``.

    Uses O(log(k + 2)) evaluations; ``charge`` receives the evaluation count.
    With ``check`` the answer is cross-checked by a full (uncharged) scan.
    """
    evals = 0

    def test(idx: int) -> bool:
        nonlocal evals
        evals += 1
        return pred(seq[idx])

    k = _gallop(len(seq), test)
    if charge is not None:
        charge(evals)
    if check:
        _check_prefix(len(seq), lambda idx: pred(seq[idx]), k)
    return k


def galloping_suffix_search(
    seq: Sequence[T],
    pred: Callable[[T], bool],
    charge: Optional[Callable[[int], None]] = None,
    check: bool = False,
) -> int:
    """Length of the true suffix, probing from the high end."""
    evals = 0
    last = len(seq) - 1

    def test(idx: int) -> bool:
        nonlocal evals
        evals += 1
        return pred(seq[last - idx])

    k = _gallop(len(seq), test)
    if charge is not None:
        charge(evals)
    if check:
        _check_prefix(len(seq), lambda idx: pred(seq[last - idx]), k)
    return k
