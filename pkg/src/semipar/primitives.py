"""Bulk array primitives: scan, reduce, filter, partition, comparison sort.

Each primitive charges work linear in its input (``WORK_FACTOR`` bounds the
constant) and rounds logarithmic in its input, matching the cost model of a
bulk-synchronous execution.  Numpy arrays take vectorized fast paths; any
sequence with a user-supplied combiner falls back to a generic path with the
same charged cost.
"""

from __future__ import annotations

import math
import operator
from typing import Any, Callable, Sequence

import numpy as np

from .meter import WorkMeter

# Upper bound on charged-work / input-size for the linear primitives
# (scan and partition touch each element twice: sweep + write-back).
WORK_FACTOR = 2


def _log_rounds(size: int) -> int:
    return max(1, math.ceil(math.log2(size))) if size > 1 else 1


def _charge(meter: WorkMeter | None, label: str, ops: int, rounds: int) -> None:
    if meter is not None:
        meter.charge(label, ops)
        meter.tick(rounds)


def scan(
    a: Sequence[Any] | np.ndarray,
    op: Callable[[Any, Any], Any] = operator.add,
    identity: Any = 0,
    meter: WorkMeter | None = None,
    label: str = "scan",
):
    """Exclusive prefix combine of ``a`` under ``op``; returns (prefix, total).

    ``prefix[i]`` is the fold of ``a[0:i]``; ``total`` is the fold of all of
    ``a``.  Empty input yields an empty prefix and ``identity``.
    """
    n = len(a)
    _charge(meter, label, WORK_FACTOR * n, _log_rounds(n))
    if n == 0:
        empty = np.empty(0, dtype=a.dtype) if isinstance(a, np.ndarray) else []
        return empty, identity
    if isinstance(a, np.ndarray) and op is operator.add:
        total = a.sum(dtype=a.dtype)
        prefix = np.empty_like(a)
        prefix[0] = identity
        np.cumsum(a[:-1], dtype=a.dtype, out=prefix[1:])
        return prefix, total
    prefix = []
    acc = identity
    for x in a:
        prefix.append(acc)
        acc = op(acc, x)
    if isinstance(a, np.ndarray):
        prefix = np.asarray(prefix, dtype=a.dtype)
    return prefix, acc


def reduce(
    a: Sequence[Any] | np.ndarray,
    f: Callable[[Any, Any], Any] = operator.add,
    identity: Any = 0,
    meter: WorkMeter | None = None,
    label: str = "reduce",
):
    """Fold of ``a`` under the associative combiner ``f``."""
    n = len(a)
    _charge(meter, label, n, _log_rounds(n))
    if isinstance(a, np.ndarray) and op_is_add(f):
        return a.sum(dtype=a.dtype) if n else identity
    acc = identity
    for x in a:
        acc = f(acc, x)
    return acc


def op_is_add(f: Callable) -> bool:
    return f is operator.add


def filter_(
    a: Sequence[Any] | np.ndarray,
    p: Callable[[Any], bool] | np.ndarray,
    meter: WorkMeter | None = None,
    label: str = "filter",
):
    """Elements of ``a`` satisfying ``p``, in input order.

    ``p`` may be a boolean mask (vectorized path) or a per-element predicate.
    """
    n = len(a)
    _charge(meter, label, WORK_FACTOR * n, _log_rounds(n))
    if isinstance(a, np.ndarray):
        mask = p if isinstance(p, np.ndarray) else np.fromiter(
            (bool(p(x)) for x in a), dtype=bool, count=n
        )
        return a[mask]
    return [x for x in a if p(x)]


def partition_by(
    a: Sequence[Any] | np.ndarray,
    p: Callable[[Any], bool] | np.ndarray,
    meter: WorkMeter | None = None,
    label: str = "partition",
):
    """Permute ``a`` so p-satisfying elements come first; returns (out, split)."""
    n = len(a)
    _charge(meter, label, WORK_FACTOR * n, _log_rounds(n))
    if isinstance(a, np.ndarray):
        mask = p if isinstance(p, np.ndarray) else np.fromiter(
            (bool(p(x)) for x in a), dtype=bool, count=n
        )
        out = np.concatenate([a[mask], a[~mask]]) if n else a.copy()
        return out, int(mask.sum()) if n else 0
    yes = [x for x in a if p(x)]
    no = [x for x in a if not p(x)]
    return yes + no, len(yes)


def comparison_sort(
    a: Sequence[Any] | np.ndarray,
    less: Callable[[Any, Any], bool] | None = None,
    meter: WorkMeter | None = None,
    label: str = "comparison_sort",
):
    """Sorted permutation of ``a``; charges mergesort cost |a|*ceil(log2|a|)."""
    n = len(a)
    _charge(meter, label, n * _log_rounds(n), _log_rounds(n))
    if isinstance(a, np.ndarray):
        if less is not None:
            raise ValueError("custom comparators unsupported on ndarray input")
        return np.sort(a, kind="stable")
    if less is None:
        return sorted(a)
    import functools

    return sorted(a, key=functools.cmp_to_key(lambda x, y: -1 if less(x, y) else (1 if less(y, x) else 0)))


def argsort_by_key(
    keys: np.ndarray,
    meter: WorkMeter | None = None,
    label: str = "comparison_sort",
) -> np.ndarray:
    """Sorting permutation of ``keys``; charged like comparison_sort."""
    n = len(keys)
    _charge(meter, label, n * _log_rounds(n), _log_rounds(n))
    return np.argsort(keys, kind="stable")
