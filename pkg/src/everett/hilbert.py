"""Labelled state vectors over an object ⊗ observer-memory basis.

States are sparse: a mapping from :class:`BasisLabel` to complex amplitude.
Distinct labels are orthonormal by construction, so there is no Gram matrix
anywhere. Operators are small dense matrices over an explicit label list.
"""
from __future__ import annotations

import math
from collections.abc import Hashable, Iterable, Mapping
from dataclasses import dataclass
from types import MappingProxyType
from typing import NamedTuple

import numpy as np

NORM_TOL = 1e-10
UNITARY_TOL = 1e-10

OBJECT = "object"
MEMORY = "memory"


class LabelError(ValueError):
    """A label uses a symbol outside the declared alphabet, or two states
    live over different alphabets."""


class RoleCollisionError(ValueError):
    pass


class BasisCoverageError(ValueError):
    pass


class ZeroVectorError(ValueError):
    pass


class BasisLabel(NamedTuple):
    """One orthonormal basis ket: object symbols plus the memory record."""

    object_part: tuple
    memory_part: tuple

    def __str__(self) -> str:
        obj = ",".join(str(s) for s in self.object_part)
        mem = " ".join(str(s) for s in self.memory_part)
        return f"|{obj}⟩|[{mem}]⟩"


@dataclass(frozen=True)
class Space:
    """Closed alphabets for the object factor and for memory records."""

    objects: frozenset
    memory: frozenset

    @classmethod
    def of(cls, objects: Iterable[Hashable], memory: Iterable[Hashable] | None = None) -> Space:
        objects = frozenset(objects)
        return cls(objects, objects if memory is None else frozenset(memory))

    def check(self, label: BasisLabel) -> None:
        bad = [s for s in label.object_part if s not in self.objects]
        bad += [s for s in label.memory_part if s not in self.memory]
        if bad:
            raise LabelError(f"label error: symbols {bad!r} not in declared alphabet")


def _as_label(key) -> BasisLabel:
    if isinstance(key, BasisLabel):
        return key
    obj, mem = key
    return BasisLabel(tuple(obj), tuple(mem))


def _infer_roles(labels: Iterable[BasisLabel]) -> frozenset:
    roles = set()
    for lab in labels:
        if lab.object_part:
            roles.add(OBJECT)
        if lab.memory_part:
            roles.add(MEMORY)
    return frozenset(roles)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Sparse ket. ``terms`` never stores exact zeros.

    Instances built by :func:`make_state` are normalised; linear combinations
    (``+``, ``-``, scalar ``*``) are not renormalised, so they can be used to
    check linearity of operators.
    """

    terms: Mapping[BasisLabel, complex]
    space: Space
    roles: frozenset = frozenset()
    norm_factor: float = 1.0

    @property
    def dimension(self) -> int:
        return len(self.terms)

    @property
    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.terms.values()))

    def amplitude(self, label) -> complex:
        return self.terms.get(_as_label(label), 0j)

    def labels(self) -> list[BasisLabel]:
        return list(self.terms)

    def _combine(self, other: StateVector, sign: float) -> StateVector:
        _same_space(self, other)
        out = dict(self.terms)
        for lab, amp in other.terms.items():
            out[lab] = out.get(lab, 0j) + sign * amp
        return _raw(out, self.space, self.roles | other.roles)

    def __add__(self, other: StateVector) -> StateVector:
        return self._combine(other, 1.0)

    def __sub__(self, other: StateVector) -> StateVector:
        return self._combine(other, -1.0)

    def __mul__(self, scalar: complex) -> StateVector:
        return _raw({k: scalar * v for k, v in self.terms.items()}, self.space, self.roles)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        body = " + ".join(f"({a:.6g}){lab}" for lab, a in self.terms.items())
        return f"StateVector({body or '0'})"


def _raw(terms: dict, space: Space, roles: frozenset, norm_factor: float = 1.0) -> StateVector:
    clean = {k: complex(v) for k, v in terms.items() if v != 0}
    return StateVector(MappingProxyType(clean), space, roles, norm_factor)


def _same_space(s1: StateVector, s2: StateVector) -> None:
    if s1.space != s2.space:
        raise LabelError("label error: states are over different alphabets")


def make_state(terms: Mapping, space: Space, roles: Iterable[str] | None = None) -> StateVector:
    """Build a normalised state from ``{label: amplitude}``.

    Keys may be :class:`BasisLabel` or ``(object_part, memory_part)`` pairs.
    The factor that was applied to reach unit norm is kept on
    ``norm_factor``.
    """
    parsed: dict[BasisLabel, complex] = {}
    for key, amp in terms.items():
        lab = _as_label(key)
        space.check(lab)
        amp = complex(amp)
        if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
            raise ValueError(f"non-finite amplitude for {lab}")
        parsed[lab] = parsed.get(lab, 0j) + amp
    norm = math.sqrt(sum(abs(a) ** 2 for a in parsed.values()))
    if norm == 0.0:
        raise ZeroVectorError("zero vector")
    factor = 1.0 / norm
    role_set = _infer_roles(parsed) if roles is None else frozenset(roles)
    return _raw({k: v * factor for k, v in parsed.items()}, space, role_set, factor)


def object_state(space: Space, amplitudes: Mapping[Hashable, complex]) -> StateVector:
    """Single object system, e.g. ``{"live": a, "dead": b}``; no memory factor."""
    return make_state({((sym,), ()): amp for sym, amp in amplitudes.items()}, space, [OBJECT])


def memory_state(space: Space, records: Mapping[tuple, complex] | None = None) -> StateVector:
    """Observer memory on its own; the default is the blank record ``|[]⟩``."""
    records = {(): 1.0} if records is None else records
    return make_state({((), tuple(rec)): amp for rec, amp in records.items()}, space, [MEMORY])


def tensor(s1: StateVector, s2: StateVector) -> StateVector:
    _same_space(s1, s2)
    if s1.roles & s2.roles:
        raise RoleCollisionError(f"role collision: both factors carry {sorted(s1.roles & s2.roles)}")
    out = {}
    for l1, a1 in s1.terms.items():
        for l2, a2 in s2.terms.items():
            out[BasisLabel(l1.object_part + l2.object_part, l1.memory_part + l2.memory_part)] = a1 * a2
    return _raw(out, s1.space, s1.roles | s2.roles, s1.norm_factor * s2.norm_factor)


def inner(s1: StateVector, s2: StateVector) -> complex:
    """⟨s1|s2⟩, conjugate-linear in ``s1``."""
    _same_space(s1, s2)
    small, big = (s1, s2) if len(s1.terms) <= len(s2.terms) else (s2, s1)
    total = 0j
    for lab in small.terms:
        if lab in big.terms:
            total += s1.terms[lab].conjugate() * s2.terms[lab]
    return total


def max_deviation(s1: StateVector, s2: StateVector) -> float:
    """Largest componentwise |difference| between two states."""
    _same_space(s1, s2)
    keys = set(s1.terms) | set(s2.terms)
    return max((abs(s1.amplitude(k) - s2.amplitude(k)) for k in keys), default=0.0)


class LinearOperator:
    """Dense square matrix over an ordered list of basis labels.

    ``verified_unitary`` starts False and is only ever switched on by
    :func:`is_unitary`.
    """

    __slots__ = ("matrix", "basis", "_index", "verified_unitary")

    def __init__(self, matrix, basis: Iterable):
        basis = tuple(_as_label(b) for b in basis)
        mat = np.array(matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {mat.shape}")
        if mat.shape[0] != len(basis):
            raise ValueError("basis length does not match matrix size")
        if len(set(basis)) != len(basis):
            raise LabelError("label error: duplicate basis labels")
        mat.setflags(write=False)
        self.matrix = mat
        self.basis = basis
        self._index = {lab: i for i, lab in enumerate(basis)}
        self.verified_unitary = False

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, label) -> int:
        return self._index[_as_label(label)]

    def __repr__(self) -> str:
        return f"LinearOperator(dim={self.dim}, verified_unitary={self.verified_unitary})"


def identity_operator(basis: Iterable) -> LinearOperator:
    basis = tuple(basis)
    return LinearOperator(np.eye(len(basis)), basis)


def unitarity_residual(op: LinearOperator) -> float:
    """max |(U†U − I)_jk|."""
    m = op.matrix
    return float(np.max(np.abs(m.conj().T @ m - np.eye(op.dim))))


def is_unitary(op: LinearOperator, tol: float = UNITARY_TOL) -> bool:
    ok = unitarity_residual(op) <= tol
    if ok:
        op.verified_unitary = True
    return ok


def apply(op: LinearOperator, s: StateVector) -> StateVector:
    vec = np.zeros(op.dim, dtype=np.complex128)
    for lab, amp in s.terms.items():
        try:
            vec[op._index[lab]] = amp
        except KeyError:
            raise BasisCoverageError(f"basis coverage error: {lab} not in operator basis") from None
    out = op.matrix @ vec
    return _raw({op.basis[i]: out[i] for i in np.flatnonzero(out)}, s.space, s.roles, s.norm_factor)
