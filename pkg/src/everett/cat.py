"""Cat-in-a-box observation operators.

Joint basis: cat ∈ {live, dead} times observer memory ∈ {blank, rec_live,
rec_dead, rec_plus, rec_minus}, ten orthonormal labels. Memory records are
ordinary registers of length 0 or 1 (``()``, ``("live",)``, ...).

``U`` copies the cat's state into a blank memory and is linear, so a cat in
a|live⟩ + b|dead⟩ ends up as a|live⟩|[live]⟩ + b|dead⟩|[dead]⟩: the observer
branches, and each branch record is the same one a definite cat produces.

``U′`` is the hypothetical observer that records the superpositions
a|live⟩ ± b|dead⟩ themselves. It only extends to a unitary when those two
inputs are orthogonal, i.e. |a| = |b|; fed a definite cat it leaves the
observer split over rec_plus and rec_minus with no definite record.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from .hilbert import (
    BasisLabel,
    LinearOperator,
    Space,
    StateVector,
    apply,
    is_unitary,
    max_deviation,
    memory_state,
    object_state,
    tensor,
    unitarity_residual,
)
from .measure import MeasureValue, memory_is, subset_measure

LIVE, DEAD = "live", "dead"
CAT_OBJECTS = (LIVE, DEAD)

BLANK: tuple = ()
REC_LIVE = (LIVE,)
REC_DEAD = (DEAD,)
REC_PLUS = ("plus",)
REC_MINUS = ("minus",)
MEMORY_RECORDS = (BLANK, REC_LIVE, REC_DEAD, REC_PLUS, REC_MINUS)
RECORD_NAMES = {
    BLANK: "blank",
    REC_LIVE: "rec_live",
    REC_DEAD: "rec_dead",
    REC_PLUS: "rec_plus",
    REC_MINUS: "rec_minus",
}

CAT_SPACE = Space.of(CAT_OBJECTS, (LIVE, DEAD, "plus", "minus"))
CAT_BASIS = tuple(BasisLabel((obj,), rec) for obj in CAT_OBJECTS for rec in MEMORY_RECORDS)

TOL = 1e-10


class NoUnitaryCompletionError(ValueError):
    """Raised when a|l⟩+b|d⟩ and a|l⟩−b|d⟩ are not orthogonal."""

    def __init__(self, overlap: complex):
        self.overlap = overlap
        super().__init__(
            f"non-orthogonal Φ basis: no unitary completion "
            f"(overlap |a|^2-|b|^2 = {overlap.real:.17g})"
        )


class InvalidBasisTransform(ValueError):
    pass


@dataclass(frozen=True)
class SuperpositionParams:
    a: complex
    b: complex

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        total = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(total - 1.0) > TOL:
            raise ValueError(f"|a|^2 + |b|^2 = {total!r}, expected 1")

    @classmethod
    def from_a_sq(cls, a_sq: float) -> SuperpositionParams:
        """Real nonnegative a, b with |a|^2 = a_sq."""
        return cls(math.sqrt(a_sq), math.sqrt(1.0 - a_sq))

    def require_nonzero(self) -> None:
        if self.a == 0 or self.b == 0:
            raise ValueError("a and b must be non-zero")

    @property
    def overlap(self) -> complex:
        """⟨a l + b d | a l − b d⟩ = |a|^2 − |b|^2."""
        return complex(abs(self.a) ** 2 - abs(self.b) ** 2)


def record_name(record: tuple) -> str:
    if record in RECORD_NAMES:
        return RECORD_NAMES[record]
    return "[" + " ".join(str(s) for s in record) + "]"


def cat_state(a: complex, b: complex) -> StateVector:
    return object_state(CAT_SPACE, {LIVE: a, DEAD: b})


def joint(obj: StateVector, record: tuple = BLANK) -> StateVector:
    return tensor(obj, memory_state(CAT_SPACE, {record: 1.0}))


def _index(obj: str, record: tuple) -> int:
    return CAT_OBJECTS.index(obj) * len(MEMORY_RECORDS) + MEMORY_RECORDS.index(record)


def _swap_permutation(pairs) -> np.ndarray:
    perm = np.eye(len(CAT_BASIS))
    for i, j in pairs:
        perm[[i, j]] = perm[[j, i]]
    return perm


def build_record_unitary() -> LinearOperator:
    """U: |γ⟩|blank⟩ ↔ |γ⟩|rec_γ⟩ for γ in {live, dead}; identity elsewhere."""
    perm = _swap_permutation(
        [(_index(LIVE, BLANK), _index(LIVE, REC_LIVE)), (_index(DEAD, BLANK), _index(DEAD, REC_DEAD))]
    )
    op = LinearOperator(perm, CAT_BASIS)
    if not is_unitary(op, TOL):
        raise RuntimeError("record operator completion is not unitary")
    return op


def observe_superposition(p: SuperpositionParams) -> StateVector:
    """U applied to (a|live⟩ + b|dead⟩)|blank⟩."""
    return apply(build_record_unitary(), joint(cat_state(p.a, p.b)))


def _phi_frame(p: SuperpositionParams) -> np.ndarray:
    # columns: a|l⟩ + b|d⟩, a|l⟩ − b|d⟩ in the (live, dead) basis
    return np.array([[p.a, p.a], [p.b, -p.b]], dtype=np.complex128)


def phi_observer_map(p: SuperpositionParams) -> LinearOperator:
    """The linear map fixed by U′(a l ± b d)|blank⟩ = (a l ± b d)|rec_±⟩.

    Built in the frame {a l + b d, a l − b d} as the permutation that swaps
    blank with rec_+ (resp. rec_−) and fixes everything else, then moved back
    to the {live, dead} frame. Only unitary when |a| = |b|; no check here.
    """
    p.require_nonzero()
    frame = np.kron(_phi_frame(p), np.eye(len(MEMORY_RECORDS)))
    perm = _swap_permutation(
        [(_index(LIVE, BLANK), _index(LIVE, REC_PLUS)), (_index(DEAD, BLANK), _index(DEAD, REC_MINUS))]
    )
    return LinearOperator(frame @ perm @ np.linalg.inv(frame), CAT_BASIS)


def build_phi_observer(p: SuperpositionParams) -> LinearOperator:
    p.require_nonzero()
    if abs(p.overlap) > TOL:
        raise NoUnitaryCompletionError(p.overlap)
    op = phi_observer_map(p)
    if not is_unitary(op, TOL):
        raise RuntimeError(f"U′ completion failed unitarity: residual {unitarity_residual(op):.3e}")
    return op


def closed_form_definite(p: SuperpositionParams, which: str) -> StateVector:
    """U′|which⟩|blank⟩ written out by hand.

    live: (1/2a) [(a l + b d)|rec_+⟩ + (a l − b d)|rec_−⟩]
    dead: (1/2b) [(a l + b d)|rec_+⟩ − (a l − b d)|rec_−⟩]
    """
    plus = joint(cat_state(p.a, p.b), REC_PLUS)
    minus = joint(cat_state(p.a, -p.b), REC_MINUS)
    if which == LIVE:
        return (1 / (2 * p.a)) * (plus + minus)
    if which == DEAD:
        return (1 / (2 * p.b)) * (plus - minus)
    raise ValueError(f"which must be 'live' or 'dead', got {which!r}")


def uprime_on_definite(p: SuperpositionParams, which: str) -> StateVector:
    if which not in CAT_OBJECTS:
        raise ValueError(f"which must be 'live' or 'dead', got {which!r}")
    op = build_phi_observer(p)
    out = apply(op, joint(cat_state(*((1, 0) if which == LIVE else (0, 1)))))
    dev = max_deviation(out, closed_form_definite(p, which))
    if dev > TOL:
        raise RuntimeError(f"U′|{which}⟩ disagrees with the closed form by {dev:.3e}")
    return out


def branch_measures(s: StateVector) -> dict[str, MeasureValue]:
    records = {lab.memory_part for lab in s.terms}
    ordered = [r for r in MEMORY_RECORDS if r in records]
    ordered += sorted((r for r in records if r not in RECORD_NAMES), key=str)
    return {record_name(r): subset_measure(s, memory_is(r)) for r in ordered}


def memory_measures_in_basis(s: StateVector, v: np.ndarray) -> dict[str, float]:
    """Memory-record weights with the cat factor expanded in the columns of ``v``.

    weight(m) = Σ_k |⟨e_k, m | s⟩|^2 where e_k = Σ_j v[j, k] |cat_j⟩.
    """
    v = np.asarray(v, dtype=np.complex128)
    out = {}
    records = {lab.memory_part for lab in s.terms}
    for rec in [r for r in MEMORY_RECORDS if r in records] + sorted(records - set(MEMORY_RECORDS), key=str):
        column = np.array([s.amplitude(((obj,), rec)) for obj in CAT_OBJECTS])
        out[record_name(rec)] = math.fsum(np.abs(v.conj().T @ column) ** 2)
    return out


def _check_basis_transform(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (2, 2):
        raise InvalidBasisTransform(f"invalid basis transform: shape {v.shape}")
    if np.max(np.abs(v.conj().T @ v - np.eye(2))) > TOL:
        raise InvalidBasisTransform("invalid basis transform: not unitary")
    return v


def basis_invariance_deviation(p: SuperpositionParams, v) -> float:
    v = _check_basis_transform(v)
    s = observe_superposition(p)
    ref = {k: m.linear for k, m in branch_measures(s).items()}
    rotated = memory_measures_in_basis(s, v)
    return max(abs(ref[k] - rotated[k]) for k in ref)


def basis_invariance_check(p: SuperpositionParams, v, tol: float = TOL) -> bool:
    return basis_invariance_deviation(p, v) <= tol


def random_object_unitaries(count: int, seed: int) -> list[np.ndarray]:
    """Haar-distributed 2×2 unitaries from one seeded generator."""
    rng = np.random.default_rng(seed)
    return [unitary_group.rvs(2, random_state=rng) for _ in range(count)]


def definite_inputs(p: SuperpositionParams) -> dict[str, StateVector]:
    """The four cat inputs (with blank memory) that U′ is probed with."""
    return {
        "live": joint(cat_state(1, 0)),
        "dead": joint(cat_state(0, 1)),
        "plus": joint(cat_state(p.a, p.b)),
        "minus": joint(cat_state(p.a, -p.b)),
    }


def state_rows(s: StateVector) -> list[tuple[str, str, complex]]:
    """(cat, record name, amplitude) in canonical basis order."""
    return [
        (lab.object_part[0], record_name(lab.memory_part), s.amplitude(lab))
        for lab in CAT_BASIS
        if lab in s.terms
    ]

