"""Sequential measurement of N identically prepared systems.

Each step records the outcome of one object system in the observer's memory
register: |α^i⟩|[r]⟩ → |α^i⟩|[r α^i]⟩. After N steps the joint state is a
superposition of M**N branches, the branch with record (p, q, ..., r) having
amplitude C_p C_q ... C_r. Branches are grouped into count classes
(n_1, ..., n_M); a class holds N!/Π n_i! branches of equal weight, so its
total weight is the multinomial expression computed by :func:`class_measure`.

Outcome symbols are the integers 1..M throughout; kernels work 0-based
internally.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from .hilbert import BasisLabel, Space, StateVector, _raw, make_state
from .measure import MeasureValue

EXACT_BRANCH_LIMIT = 2**20
MAX_CLASSES = 20_000_000
NORM_TOL = 1e-10

FORBIDDEN_FLAG = "outcome with zero coefficient recorded"


class HistoryDepthError(ValueError):
    pass


class InvalidClassError(ValueError):
    pass


class EnsembleTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class Coefficients:
    """Amplitudes C_1..C_M of the prepared state Σ C_i|α^i⟩."""

    values: tuple[complex, ...]

    def __post_init__(self):
        vals = tuple(complex(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ValueError("need at least one coefficient")
        if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in vals):
            raise ValueError("coefficients must be finite")
        total = math.fsum(abs(v) ** 2 for v in vals)
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"Σ|C_i|^2 = {total!r}, expected 1")

    @classmethod
    def from_measures(cls, weights: Sequence[float]) -> Coefficients:
        """Real nonnegative amplitudes with |C_i|^2 = weights[i] (renormalised)."""
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or w.sum() <= 0:
            raise ValueError("weights must be nonnegative and not all zero")
        return cls(tuple(np.sqrt(w / w.sum())))

    @classmethod
    def normalized(cls, amplitudes: Sequence[complex]) -> Coefficients:
        a = np.asarray(amplitudes, dtype=complex)
        return cls(tuple(a / np.linalg.norm(a)))

    @property
    def m(self) -> int:
        return len(self.values)

    @property
    def symbols(self) -> tuple[int, ...]:
        return tuple(range(1, self.m + 1))

    @property
    def space(self) -> Space:
        return Space.of(self.symbols)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.complex128)

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.array) ** 2

    @property
    def log_weights(self) -> np.ndarray:
        w = self.weights
        with np.errstate(divide="ignore"):
            return np.where(w > 0, np.log(np.where(w > 0, w, 1.0)), -np.inf)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)

    def prepared_state(self) -> StateVector:
        return make_state({((i,), ()): c for i, c in zip(self.symbols, self.values)}, self.space)


@dataclass(frozen=True)
class Branch:
    register: tuple[int, ...]
    amplitude: complex

    @property
    def weight(self) -> float:
        return abs(self.amplitude) ** 2


@dataclass(frozen=True)
class CountClass:
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if any(c < 0 for c in counts):
            raise InvalidClassError(f"invalid class: negative count in {counts}")

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def m(self) -> int:
        return len(self.counts)

    def fractions(self) -> tuple[float, ...]:
        return tuple(c / self.total for c in self.counts)


def measure_step(s: StateVector, coeffs: Coefficients) -> StateVector:
    """Record the next unrecorded object system in memory.

    If every object in a term has already been recorded, a fresh system
    prepared in ``coeffs`` is brought in first, so repeated calls starting
    from the blank memory build up the sequential experiment one system at a
    time. Object kets are kept in the labels.
    """
    if not s.terms:
        return s
    depths = {len(lab.memory_part) for lab in s.terms}
    if len(depths) != 1:
        raise HistoryDepthError(f"history depth error: ragged register lengths {sorted(depths)}")
    k = depths.pop()
    n_objects = {len(lab.object_part) for lab in s.terms}
    if n_objects == {k}:
        fresh = list(zip(coeffs.symbols, coeffs.values))
        terms = {
            BasisLabel(lab.object_part + (sym,), lab.memory_part): amp * c
            for lab, amp in s.terms.items()
            for sym, c in fresh
        }
    elif n_objects == {k + 1}:
        terms = dict(s.terms)
    else:
        raise HistoryDepthError(
            f"history depth error: {sorted(n_objects)} object systems against {k} records"
        )
    out = {}
    for lab, amp in terms.items():
        out[BasisLabel(lab.object_part, lab.memory_part + (lab.object_part[k],))] = amp
    for lab in out:
        s.space.check(lab)
    return _raw(out, s.space, s.roles | {"object", "memory"}, s.norm_factor)


def blank_observer(coeffs: Coefficients) -> StateVector:
    return make_state({((), ()): 1.0}, coeffs.space, ["memory"])


class BranchEnsemble:
    """All branches after N sequential measurements.

    ``mode == "exact"`` keeps every nonzero branch (records as an int array,
    symbols 1..M, plus amplitudes). ``mode == "class"`` keeps nothing and
    answers through the count-class formula.
    """

    def __init__(self, n: int, coeffs: Coefficients, registers=None, amplitudes=None):
        self.n = n
        self.coeffs = coeffs
        self.registers = registers
        self.amplitudes = amplitudes

    @property
    def mode(self) -> str:
        return "class" if self.registers is None else "exact"

    def __len__(self) -> int:
        if self.registers is None:
            raise TypeError("class-mode ensemble has no explicit branch list")
        return self.registers.shape[0]

    @cached_property
    def branches(self) -> list[Branch]:
        if self.registers is None:
            raise TypeError("class-mode ensemble has no explicit branch list")
        return [Branch(tuple(int(x) for x in r), complex(a)) for r, a in zip(self.registers, self.amplitudes)]

    def total_measure(self) -> float:
        if self.registers is None:
            _, logm = class_table(self.coeffs, self.n)
            return float(np.exp(logsumexp(logm)))
        return math.fsum(np.abs(self.amplitudes) ** 2)

    def grouped_measures(self) -> dict[tuple[int, ...], float]:
        """Sum of branch weights per count class (exact mode only)."""
        if self.registers is None:
            raise TypeError("grouping needs exact mode")
        counts = _kernels.register_counts(self.registers - 1, self.coeffs.m)
        uniq, inverse = np.unique(counts, axis=0, return_inverse=True)
        sums = np.bincount(inverse.ravel(), weights=np.abs(self.amplitudes) ** 2, minlength=len(uniq))
        return {tuple(int(x) for x in u): float(w) for u, w in zip(uniq, sums)}

    def to_state(self) -> StateVector:
        """Joint object ⊗ memory state; object kets mirror the record."""
        terms = {
            BasisLabel(tuple(int(x) for x in r), tuple(int(x) for x in r)): a
            for r, a in zip(self.registers, self.amplitudes)
        }
        return _raw(terms, self.coeffs.space, frozenset({"object", "memory"}))


def run_sequence(coeffs: Coefficients, n: int, mode: str = "exact") -> BranchEnsemble:
    if n < 0:
        raise ValueError("n must be nonnegative")
    if mode == "class":
        return BranchEnsemble(n, coeffs)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    support = coeffs.support
    if len(support) ** n > EXACT_BRANCH_LIMIT:
        raise EnsembleTooLargeError(
            f"{len(support)}**{n} branches exceeds {EXACT_BRANCH_LIMIT}; use class mode"
        )
    # zero-coefficient branches are never generated
    local = _kernels.branch_registers(n, len(support))
    registers = support[local] + 1
    amplitudes = _kernels.branch_amplitudes(coeffs.array[support], local)
    return BranchEnsemble(n, coeffs, registers, amplitudes)


def class_count(c: CountClass) -> int:
    """N!/Π n_i! as an exact integer."""
    remaining = c.total
    out = 1
    for ni in c.counts:
        out *= math.comb(remaining, ni)
        remaining -= ni
    return out


def log_class_count(c: CountClass) -> float:
    return math.lgamma(c.total + 1) - math.fsum(math.lgamma(ni + 1) for ni in c.counts)


def class_of(branch: Branch | Sequence[int], m: int) -> CountClass:
    register = branch.register if isinstance(branch, Branch) else tuple(branch)
    counts = [0] * m
    for sym in register:
        counts[sym - 1] += 1
    return CountClass(tuple(counts))


def _check_class(coeffs: Coefficients, c: CountClass) -> None:
    if c.m != coeffs.m:
        raise InvalidClassError(f"invalid class: {c.m} counts for {coeffs.m} outcomes")


def class_measure(coeffs: Coefficients, c: CountClass) -> MeasureValue:
    """(N!/Π n_i!) Π |C_i|^{2 n_i}, evaluated in log space.

    A class that records an outcome whose coefficient is zero gets weight
    zero and carries ``FORBIDDEN_FLAG``.
    """
    _check_class(coeffs, c)
    w = coeffs.weights
    if any(ni > 0 and w[i] == 0 for i, ni in enumerate(c.counts)):
        return MeasureValue.zero(FORBIDDEN_FLAG)
    logm = _kernels.log_class_measures(np.array([c.counts], dtype=np.int64), coeffs.log_weights)[0]
    return MeasureValue.from_log(min(float(logm), 0.0))


@lru_cache(maxsize=16)
def _compositions(n: int, m: int) -> np.ndarray:
    arr = _kernels.compositions(n, m)
    arr.setflags(write=False)
    return arr


def class_table(coeffs: Coefficients, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Every admissible count class at size ``n`` with its log weight.

    Rows follow lexicographic order of (n_1, ..., n_{M-1}). Classes that
    would record a zero-coefficient outcome are skipped. The count array may
    be a shared read-only cache entry.
    """
    support = coeffs.support
    k = _kernels.n_compositions(n, len(support))
    if k > MAX_CLASSES:
        raise EnsembleTooLargeError(f"{k} count classes exceeds {MAX_CLASSES}")
    local = _compositions(n, len(support))
    if len(support) == coeffs.m:
        counts = local
    else:
        counts = np.zeros((local.shape[0], coeffs.m), dtype=np.int64)
        counts[:, support] = local
    logm = _kernels.log_class_measures(local, coeffs.log_weights[support])
    return counts, logm


def class_completeness(coeffs: Coefficients, n: int) -> float:
    """Σ over all classes of the class weight; 1 up to rounding."""
    _, logm = class_table(coeffs, n)
    return float(np.exp(logsumexp(logm)))
