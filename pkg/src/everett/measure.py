"""Squared-modulus weights on superposition terms and on label subsets.

The weight of a coefficient X is |X|^2, and the weight of a subset of an
orthogonal superposition is the sum of its members' weights. Values are
carried as :class:`MeasureValue` (linear and natural-log form side by side)
because branch-class weights underflow long before the counts get large.
"""
from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

from .hilbert import BasisLabel, StateVector

ADDITIVITY_TOL = 1e-10
MAX_PARTITION_PARTS = 16


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class MeasureValue:
    linear: float
    log: float
    flags: tuple[str, ...] = ()

    @classmethod
    def from_linear(cls, value: float, flags: tuple[str, ...] = ()) -> MeasureValue:
        value = float(value)
        return cls(value, math.log(value) if value > 0 else -math.inf, flags)

    @classmethod
    def from_log(cls, log_value: float, flags: tuple[str, ...] = ()) -> MeasureValue:
        log_value = float(log_value)
        return cls(math.exp(log_value) if log_value > -math.inf else 0.0, log_value, flags)

    @classmethod
    def zero(cls, *flags: str) -> MeasureValue:
        return cls(0.0, -math.inf, tuple(flags))

    def __float__(self) -> float:
        return self.linear


# A selector is any deterministic predicate on basis labels.
Selector = Callable[[BasisLabel], bool]


def everything(label: BasisLabel) -> bool:
    return True


def labels_in(labels: Iterable) -> Selector:
    chosen = frozenset(BasisLabel(tuple(o), tuple(m)) for o, m in labels)
    return lambda label: label in chosen


def memory_is(record: Sequence) -> Selector:
    record = tuple(record)
    return lambda label: label.memory_part == record


def record_counts_are(counts: Sequence[int], symbols: Sequence) -> Selector:
    """Labels whose memory holds symbols[i] exactly counts[i] times."""
    counts = tuple(counts)
    symbols = tuple(symbols)

    def sel(label: BasisLabel) -> bool:
        return tuple(label.memory_part.count(s) for s in symbols) == counts and (
            len(label.memory_part) == sum(counts)
        )

    return sel


def negate(sel: Selector) -> Selector:
    return lambda label: not sel(label)


def coeff_measure(x: complex) -> MeasureValue:
    """|x|^2. Depends on |x| only."""
    r = abs(complex(x))
    if not math.isfinite(r):
        raise ValueError("coefficient must be finite")
    return MeasureValue.from_linear(r * r)


def subset_measure(s: StateVector, sel: Selector) -> MeasureValue:
    return MeasureValue.from_linear(math.fsum(abs(a) ** 2 for lab, a in s.terms.items() if sel(lab)))


def total_measure(s: StateVector) -> MeasureValue:
    return subset_measure(s, everything)


def verify_additivity(
    s: StateVector, partition: Sequence[Selector], tol: float = ADDITIVITY_TOL
) -> bool:
    """Check that merging any group of parts gives the sum of their weights.

    The partition has to be disjoint and cover every label of ``s``; every
    nonempty union of parts is compared, so at most
    ``MAX_PARTITION_PARTS`` parts are accepted.
    """
    parts = list(partition)
    if len(parts) > MAX_PARTITION_PARTS:
        raise PartitionError(f"partition error: at most {MAX_PARTITION_PARTS} parts")
    owner: dict[BasisLabel, int] = {}
    for lab in s.terms:
        hits = [i for i, sel in enumerate(parts) if sel(lab)]
        if len(hits) > 1:
            raise PartitionError(f"partition error: {lab} matched by parts {hits}")
        if not hits:
            raise PartitionError(f"partition error: {lab} not covered")
        owner[lab] = hits[0]

    part_weight = [subset_measure(s, sel).linear for sel in parts]
    for size in range(1, len(parts) + 1):
        for group in itertools.combinations(range(len(parts)), size):
            members = set(group)
            merged = math.fsum(abs(a) ** 2 for lab, a in s.terms.items() if owner[lab] in members)
            if abs(merged - math.fsum(part_weight[i] for i in group)) > tol:
                return False
    return abs(math.fsum(part_weight) - total_measure(s).linear) <= tol
