import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import unitary_group

from everett.hilbert import (
    BasisCoverageError,
    BasisLabel,
    LabelError,
    LinearOperator,
    RoleCollisionError,
    Space,
    ZeroVectorError,
    apply,
    identity_operator,
    inner,
    is_unitary,
    make_state,
    max_deviation,
    memory_state,
    object_state,
    tensor,
)

CAT = Space.of(["live", "dead"])
OUTCOMES = Space.of([1, 2, 3])
L = (("live",), ())
D = (("dead",), ())


def test_single_term_state_is_already_normalised():
    s = make_state({L: 1.0}, CAT)
    assert s.dimension == 1
    assert s.amplitude(L) == 1.0
    assert s.norm_factor == 1.0


def test_equal_weights_normalise_to_inverse_root_two():
    s = make_state({L: 1, D: 1}, CAT)
    assert s.amplitude(L) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert s.amplitude(D) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert s.norm_factor == pytest.approx(1 / math.sqrt(2))


def test_three_four_five():
    s = make_state({L: 3, D: 4}, CAT)
    assert s.amplitude(L) == pytest.approx(0.6, abs=1e-15)
    assert s.amplitude(D) == pytest.approx(0.8, abs=1e-15)


def test_zero_vector_rejected():
    with pytest.raises(ZeroVectorError, match="zero vector"):
        make_state({L: 0, D: 0}, CAT)


def test_symbol_outside_alphabet_rejected():
    with pytest.raises(LabelError, match="label error"):
        make_state({(("zombie",), ()): 1}, CAT)


def test_tensor_with_blank_memory():
    s = tensor(object_state(OUTCOMES, {1: 1.0}), memory_state(OUTCOMES))
    assert dict(s.terms) == {BasisLabel((1,), ()): 1.0}


def test_tensor_distributes():
    s = tensor(object_state(OUTCOMES, {1: 1, 2: 1}), memory_state(OUTCOMES))
    assert s.dimension == 2
    for sym in (1, 2):
        assert s.amplitude(((sym,), ())) == pytest.approx(1 / math.sqrt(2))


def test_tensor_refuses_two_object_factors():
    a = object_state(OUTCOMES, {1: 1})
    with pytest.raises(RoleCollisionError, match="role collision"):
        tensor(a, a)


def test_tensor_requires_same_alphabet():
    with pytest.raises(LabelError):
        tensor(object_state(CAT, {"live": 1}), memory_state(OUTCOMES))


def _random_state(rng, space, roles, k):
    syms = sorted(space.objects)
    amps = rng.normal(size=k) + 1j * rng.normal(size=k)
    if roles == "object":
        return object_state(space, dict(zip(syms[:k], amps)))
    return memory_state(space, {(s,): a for s, a in zip(syms[:k], amps)})


@given(st.integers(0, 2**32 - 1))
def test_tensor_norm_is_product_of_norms(seed):
    rng = np.random.default_rng(seed)
    s1 = rng.uniform(0.1, 3) * _random_state(rng, OUTCOMES, "object", 3)
    s2 = rng.uniform(0.1, 3) * _random_state(rng, OUTCOMES, "memory", 2)
    prod = tensor(s1, s2)
    brute = sum(abs(a1 * a2) ** 2 for a1 in s1.terms.values() for a2 in s2.terms.values())
    assert prod.norm**2 == pytest.approx(brute, rel=1e-12)
    assert prod.norm == pytest.approx(s1.norm * s2.norm, rel=1e-12)


def test_inner_of_distinct_labels_vanishes():
    assert inner(make_state({L: 1}, CAT), make_state({D: 1}, CAT)) == 0


@given(st.integers(0, 2**32 - 1))
def test_inner_of_state_with_itself_is_one(seed):
    s = _random_state(np.random.default_rng(seed), OUTCOMES, "object", 3)
    assert abs(inner(s, s) - 1) <= 1e-10


@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False, min_magnitude=1e-3),
       st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False, min_magnitude=1e-3))
def test_inner_of_plus_and_minus_superpositions(a, b):
    norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
    a, b = a / norm, b / norm
    plus = make_state({L: a, D: b}, CAT)
    minus = make_state({L: a, D: -b}, CAT)
    dense_plus, dense_minus = np.array([a, b]), np.array([a, -b])
    assert inner(plus, minus) == pytest.approx(np.vdot(dense_plus, dense_minus), abs=1e-12)
    assert inner(plus, minus) == pytest.approx(abs(a) ** 2 - abs(b) ** 2, abs=1e-12)


def test_inner_is_conjugate_linear_in_first_slot():
    s = make_state({L: 1}, CAT)
    assert inner(1j * s, s) == pytest.approx(-1j)
    assert inner(s, 1j * s) == pytest.approx(1j)


def test_identity_leaves_state_alone():
    s = make_state({L: 0.6, D: 0.8j}, CAT)
    out = apply(identity_operator([L, D]), s)
    assert max_deviation(out, s) == 0


def test_apply_needs_basis_coverage():
    op = identity_operator([L])
    with pytest.raises(BasisCoverageError, match="basis coverage"):
        apply(op, make_state({L: 1, D: 1}, CAT))


def test_is_unitary_examples():
    ident = identity_operator([L, D])
    assert not ident.verified_unitary
    assert is_unitary(ident, 1e-10)
    assert ident.verified_unitary
    diag = LinearOperator(np.diag([1.0, 2.0]), [L, D])
    assert not is_unitary(diag, 1e-10)
    assert not diag.verified_unitary


def test_operator_matrix_is_read_only():
    op = identity_operator([L, D])
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 2


# -- properties over random unitaries on a small outcome/record basis -------

BASIS = [BasisLabel((i,), r) for i in (1, 2, 3) for r in ((), (1,), (2,))]


def _random_basis_state(rng, scale=1.0):
    amps = rng.normal(size=len(BASIS)) + 1j * rng.normal(size=len(BASIS))
    return scale * make_state(dict(zip(BASIS, amps)), OUTCOMES)


def _random_unitary_op(rng):
    op = LinearOperator(unitary_group.rvs(len(BASIS), random_state=rng), BASIS)
    assert is_unitary(op, 1e-10)
    return op


@given(st.integers(0, 2**32 - 1))
def test_norm_preserved_by_verified_unitaries(seed):
    rng = np.random.default_rng(seed)
    op = _random_unitary_op(rng)
    assert abs(apply(op, _random_basis_state(rng)).norm - 1) <= 1e-10


@given(st.integers(0, 2**32 - 1))
def test_apply_is_linear(seed):
    rng = np.random.default_rng(seed)
    op = LinearOperator(rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9)), BASIS)
    s1, s2 = _random_basis_state(rng), _random_basis_state(rng)
    alpha, beta = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
    lhs = apply(op, alpha * s1 + beta * s2)
    rhs = alpha * apply(op, s1) + beta * apply(op, s2)
    assert max_deviation(lhs, rhs) <= 1e-12


@given(st.integers(0, 2**32 - 1))
def test_inner_product_preserved_by_unitaries(seed):
    rng = np.random.default_rng(seed)
    op = _random_unitary_op(rng)
    s1, s2 = _random_basis_state(rng), _random_basis_state(rng)
    assert abs(inner(apply(op, s1), apply(op, s2)) - inner(s1, s2)) <= 1e-10
