import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from everett.hilbert import BasisLabel, Space, make_state
from everett.measure import (
    MeasureValue,
    PartitionError,
    coeff_measure,
    everything,
    labels_in,
    memory_is,
    negate,
    record_counts_are,
    subset_measure,
    total_measure,
    verify_additivity,
)

SPACE = Space.of(range(8))
XI = [BasisLabel((i,), ()) for i in range(8)]


def test_unit_coefficient():
    assert coeff_measure(1).linear == 1.0
    assert coeff_measure(1).log == 0.0


def test_squared_modulus():
    assert coeff_measure(0.6 + 0j).linear == pytest.approx(0.36, rel=1e-15)


@given(st.floats(-10, 10))
def test_phase_does_not_matter(theta):
    x = cmath.exp(1j * theta) / math.sqrt(2)
    assert coeff_measure(x).linear == pytest.approx(0.5, rel=1e-14)
    assert coeff_measure(x) == coeff_measure(abs(x))


def test_zero_coefficient_has_log_minus_inf():
    m = coeff_measure(0)
    assert m.linear == 0 and m.log == -math.inf


@given(st.floats(1e-300, 1.0))
def test_linear_and_log_forms_agree(x):
    m = MeasureValue.from_linear(x)
    assert math.exp(m.log) == pytest.approx(m.linear, rel=1e-9)
    back = MeasureValue.from_log(m.log)
    assert back.linear == pytest.approx(x, rel=1e-9)


def test_half_of_two_term_superposition():
    s = make_state({XI[0]: 1, XI[1]: 1}, SPACE)
    assert subset_measure(s, labels_in([XI[0]])).linear == pytest.approx(0.5)


def test_empty_selection_is_zero():
    s = make_state({XI[0]: 1}, SPACE)
    assert subset_measure(s, memory_is((5,))).linear == 0.0


def test_record_subset_of_branched_state():
    a, b = math.sqrt(0.3), math.sqrt(0.7)
    space = Space.of(["live", "dead"])
    s = make_state({(("live",), ("live",)): a, (("dead",), ("dead",)): b}, space)
    assert subset_measure(s, memory_is(("live",))).linear == pytest.approx(0.3, abs=1e-15)


@given(st.integers(0, 2**32 - 1), st.integers(0, 255))
def test_complement_law(seed, mask):
    rng = np.random.default_rng(seed)
    s = make_state(dict(zip(XI, rng.normal(size=8) + 1j * rng.normal(size=8))), SPACE)
    sel = lambda lab: bool(mask >> lab.object_part[0] & 1)  # noqa: E731
    assert subset_measure(s, sel).linear + subset_measure(s, negate(sel)).linear == pytest.approx(1, abs=1e-12)


def test_record_count_selector():
    sel = record_counts_are((2, 1), (1, 2))
    assert sel(BasisLabel((1, 2, 1), (1, 2, 1)))
    assert not sel(BasisLabel((1, 2, 2), (1, 2, 2)))


def test_two_part_split_is_additive():
    s = make_state({XI[0]: 1, XI[1]: 2j, XI[2]: -1}, SPACE)
    part = labels_in([XI[0]])
    assert verify_additivity(s, [part, negate(part)])


def test_single_element_made_of_two_halves():
    # Y|η⟩ = (1/√2)|ξ1⟩ + (1/√2)|ξ2⟩ has weight 1 = 0.5 + 0.5
    s = make_state({XI[1]: 1 / math.sqrt(2), XI[2]: 1 / math.sqrt(2)}, SPACE)
    parts = [labels_in([XI[1]]), labels_in([XI[2]])]
    assert subset_measure(s, everything).linear == pytest.approx(1.0)
    assert [subset_measure(s, p).linear for p in parts] == pytest.approx([0.5, 0.5])
    assert verify_additivity(s, parts)


@given(st.integers(0, 2**32 - 1))
def test_random_three_part_partition(seed):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=8) + 1j * rng.normal(size=8)
    s = make_state(dict(zip(XI, amps)), SPACE)
    owner = rng.integers(0, 3, size=8)
    parts = [labels_in([XI[i] for i in range(8) if owner[i] == k]) for k in range(3)]
    assert verify_additivity(s, parts)
    direct = np.abs(amps / np.linalg.norm(amps)) ** 2
    for k in range(3):
        assert subset_measure(s, parts[k]).linear == pytest.approx(direct[owner == k].sum(), abs=1e-12)


def test_overlapping_parts_rejected():
    s = make_state({XI[0]: 1, XI[1]: 1}, SPACE)
    with pytest.raises(PartitionError, match="partition error"):
        verify_additivity(s, [everything, labels_in([XI[0]])])


def test_uncovered_label_rejected():
    s = make_state({XI[0]: 1, XI[1]: 1}, SPACE)
    with pytest.raises(PartitionError):
        verify_additivity(s, [labels_in([XI[0]])])


def test_total_measure_of_constructed_state():
    s = make_state({XI[i]: i + 1j for i in range(8)}, SPACE)
    assert abs(total_measure(s).linear - 1) <= 1e-10
