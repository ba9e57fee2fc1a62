from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaugeval.ordvalues import INFINITY, ConvexSubgroup, Value, lex_compare, vmin

rationals = st.fractions(min_value=-100, max_value=100, max_denominator=50)


def values(rank):
    return st.tuples(*([rationals] * rank)).map(Value)


def test_basic_arithmetic():
    a = Value.of(1, Fraction(1, 2))
    b = Value.of(Fraction(3, 2), 0)
    assert a + b == Value.of(Fraction(5, 2), Fraction(1, 2))
    assert a - b == Value.of(Fraction(-1, 2), Fraction(1, 2))
    assert -a == Value.of(-1, Fraction(-1, 2))
    assert a.scale(2) == Value.of(2, 1)
    assert a.scale(Fraction(1, 2)) == Value.of(Fraction(1, 2), Fraction(1, 4))


def test_lex_order_examples():
    assert Value.of(0, 100) < Value.of(1, -100)
    assert Value.of(1, -1) < Value.of(1, 0)
    assert not Value.of(1, 0) < Value.of(1, 0)
    assert lex_compare(Value.of(2), Value.of(3)) == -1
    assert lex_compare(Value.of(3), Value.of(3)) == 0


def test_infinity_rules():
    a = Value.of(7, -2)
    assert a < INFINITY
    assert INFINITY > a
    assert not INFINITY < INFINITY
    assert INFINITY <= INFINITY
    assert INFINITY + a is INFINITY
    assert a + INFINITY is INFINITY
    assert INFINITY.scale(Fraction(1, 3)) is INFINITY
    assert vmin(a, INFINITY) == a
    assert vmin(INFINITY, INFINITY) is INFINITY
    with pytest.raises(ArithmeticError):
        INFINITY - INFINITY


def test_rank_mismatch_rejected():
    with pytest.raises(ValueError):
        Value.of(1) + Value.of(1, 2)
    with pytest.raises(ValueError):
        Value.of(1) < Value.of(1, 2)


@given(values(2), values(2), values(2))
def test_order_translation_invariant(a, b, c):
    assert (a < b) == (a + c < b + c)


@given(values(2), values(2))
def test_order_total(a, b):
    assert (a < b) + (b < a) + (a == b) == 1


@given(values(3), values(3))
def test_addition_commutes(a, b):
    assert a + b == b + a


@given(values(2))
def test_negation_reverses(a):
    z = Value.zero(2)
    if a < z:
        assert -a > z
    if a > z:
        assert -a < z


class TestConvexSubgroup:
    def test_tail_block_membership(self):
        delta = ConvexSubgroup(rank=3, kept_coords=1)
        assert delta.contains(Value.of(0, 5, -7))
        assert not delta.contains(Value.of(Fraction(1, 9), 0, 0))
        assert not delta.contains(INFINITY)

    def test_quotient_map(self):
        delta = ConvexSubgroup(rank=3, kept_coords=2)
        assert delta.quotient_map(Value.of(1, 2, 3)) == Value.of(1, 2)
        assert delta.quotient_map(INFINITY) is INFINITY
        assert delta.zero_tail(Value.of(1, 2, 3)) == Value.of(1, 2, 0)
        assert delta.tail_part(Value.of(1, 2, 3)) == Value.of(0, 0, 3)

    def test_degenerate_blocks(self):
        everything = ConvexSubgroup(rank=2, kept_coords=0)
        trivial = ConvexSubgroup(rank=2, kept_coords=2)
        assert everything.is_everything() and not everything.is_trivial()
        assert trivial.is_trivial() and not trivial.is_everything()
        assert everything.contains(Value.of(4, 5))
        assert trivial.contains(Value.of(0, 0))
        assert not trivial.contains(Value.of(0, 1))

    def test_bad_kept_coords(self):
        with pytest.raises(ValueError):
            ConvexSubgroup(rank=2, kept_coords=3)

    @given(values(3), values(3))
    def test_quotient_is_homomorphism(self, a, b):
        delta = ConvexSubgroup(rank=3, kept_coords=2)
        assert delta.quotient_map(a + b) == delta.quotient_map(a) + delta.quotient_map(b)

    @given(values(3), values(3))
    def test_quotient_strict_order_pulls_back(self, a, b):
        # coarse strict inequality forces fine strict inequality
        delta = ConvexSubgroup(rank=3, kept_coords=1)
        if delta.quotient_map(a) < delta.quotient_map(b):
            assert a < b

    @given(values(2))
    def test_membership_matches_quotient_kernel(self, a):
        delta = ConvexSubgroup(rank=2, kept_coords=1)
        assert delta.contains(a) == delta.quotient_map(a).is_zero()
