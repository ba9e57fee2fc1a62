import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaugeval.ordvalues import INFINITY, ConvexSubgroup, Value, vmin
from gaugeval.valfields import (
    CoarsenedValuedField,
    FiniteField,
    FunctionField,
    NotInValueGroupError,
    QuadraticExtension,
    RationalField,
    UnsupportedFieldError,
    check_unique_extension,
    coarsen_field,
)

nonzero_rationals = st.fractions(min_value=-400, max_value=400, max_denominator=60).filter(
    lambda x: x != 0
)


def sample_value_group(field, rng, tries=30):
    """A few random value-group elements, via valuations of random elements."""
    out = []
    for _ in range(tries):
        a = field.random_element(rng)
        if not field.is_zero(a):
            out.append(field.valuate(a))
    return out


class TestRationalField:
    def test_frozen_examples(self):
        F = RationalField(3)
        assert F.valuate(Fraction(18)) == Value.of(2)
        assert F.valuate(Fraction(4, 5)) == Value.of(0)
        assert F.residue(Fraction(4, 5)) == 2
        assert F.valuate(Fraction(0)) is INFINITY
        assert F.residue(Fraction(9, 2)) == F.residue_field.zero

    def test_negative_valuation_residue_rejected(self):
        F = RationalField(3)
        with pytest.raises(ValueError):
            F.residue(Fraction(1, 3))

    @given(nonzero_rationals, nonzero_rationals)
    def test_valuation_axioms(self, a, b):
        F = RationalField(5)
        assert F.valuate(a * b) == F.valuate(a) + F.valuate(b)
        if a + b != 0:
            assert F.valuate(a + b) >= vmin(F.valuate(a), F.valuate(b))

    @given(nonzero_rationals, nonzero_rationals)
    def test_residue_multiplicative_on_units(self, a, b):
        F = RationalField(7)
        zero = F.zero_value()
        if F.valuate(a) == zero and F.valuate(b) == zero:
            assert F.residue(a * b) == F.residue(a) * F.residue(b)

    def test_section(self):
        F = RationalField(3)
        assert F.monomial_section(Value.of(2)) == Fraction(9)
        assert F.monomial_section(Value.of(-1)) == Fraction(1, 3)
        with pytest.raises(NotInValueGroupError):
            F.monomial_section(Value.of(Fraction(1, 2)))

    def test_lift_residue_roundtrip(self):
        F = RationalField(5)
        k = F.residue_field
        for x in k.elements():
            assert F.residue(F.lift(x)) == x

    def test_trivial_valuation(self):
        F = RationalField()
        assert F.is_trivially_valued()
        assert F.valuate(Fraction(18)) == Value.of(0)
        assert F.residue(Fraction(4, 5)) == Fraction(4, 5)
        assert F.residue_field is F


class TestFiniteField:
    def test_prime_field(self):
        k = FiniteField(3)
        assert [int(x.coeffs[0]) for x in k.elements()] == [0, 1, 2]
        assert k.coerce(2) * k.coerce(2) == k.coerce(1)
        assert k.coerce(Fraction(4, 5)) == k.coerce(2)

    def test_degree_two(self):
        k = FiniteField(5, (3, 0, 1))  # u^2 = -3 = 2
        assert k.size == 25
        u = k.generator()
        assert u * u == k.coerce(2)
        assert len(list(k.elements())) == 25
        for x in k.elements():
            if not x.is_zero():
                assert x * x.inverse() == k.one

    def test_reducible_modulus_rejected(self):
        with pytest.raises(ValueError):
            FiniteField(5, (4, 0, 1))  # u^2 = 1 has roots

    def test_frobenius_root(self):
        k = FiniteField(3, (1, 0, 1))  # u^2 = -1
        for x in k.elements():
            assert k.frobenius_root(x) ** 3 == x


class TestFunctionField:
    def setup_method(self):
        self.Q = RationalField(rank=2)
        self.F = FunctionField(
            self.Q, ["x", "y"], [Value.of(1, 0), Value.of(0, 1)], rank=2
        )

    def test_frozen_monomial_example(self):
        x, y = self.F.gen(0), self.F.gen(1)
        f = 3 * x**2 * y + x**3
        assert self.F.valuate(f) == Value.of(2, 1)

    def test_one_variable_residue(self):
        Q = RationalField(rank=1)
        F = FunctionField(Q, ["x"], [Value.of(1)], rank=1)
        x = F.gen()
        elem = (x + 2) / (x + 1)
        assert F.valuate(elem) == Value.of(0)
        assert F.residue(elem) == Fraction(2)

    def test_valuation_axioms_random(self):
        rng = random.Random(7)
        for _ in range(40):
            a = self.F.random_element(rng)
            b = self.F.random_element(rng)
            if self.F.is_zero(a) or self.F.is_zero(b):
                continue
            assert self.F.valuate(a * b) == self.F.valuate(a) + self.F.valuate(b)
            if not self.F.is_zero(a + b):
                assert self.F.valuate(a + b) >= vmin(
                    self.F.valuate(a), self.F.valuate(b)
                )

    def test_residue_field_and_lift(self):
        assert self.F.residue_field is self.Q
        assert self.F.residue(self.F.coerce(Fraction(3, 4))) == Fraction(3, 4)
        assert self.F.lift(Fraction(3, 4)) == self.F.coerce(Fraction(3, 4))

    def test_section(self):
        t = self.F.monomial_section(Value.of(2, -1))
        x, y = self.F.gen(0), self.F.gen(1)
        assert t == x**2 / y
        assert self.F.valuate(t) == Value.of(2, -1)
        with pytest.raises(NotInValueGroupError):
            self.F.monomial_section(Value.of(Fraction(1, 2), 0))

    def test_section_multiplicative_random(self):
        rng = random.Random(3)
        vals = sample_value_group(self.F, rng, tries=12)
        for g in vals:
            for h in vals:
                assert self.F.monomial_section(g) * self.F.monomial_section(
                    h
                ) == self.F.monomial_section(g + h)

    def test_dependent_weights_rejected(self):
        with pytest.raises(UnsupportedFieldError):
            FunctionField(
                RationalField(rank=1), ["x", "y"], [Value.of(1), Value.of(1)], rank=1
            )

    def test_prime_constants(self):
        k = FiniteField(3)
        F = FunctionField(k, ["x"], [Value.of(1)], rank=1)
        x = F.gen()
        elem = (x + 2) / (x + 1)
        assert F.residue(elem) == k.coerce(2)
        assert F.char == 3


class TestQuadraticExtension:
    def test_unramified_sqrt2_5adic(self):
        F = RationalField(5)
        L = QuadraticExtension(F, 0, -2)  # t^2 = 2
        assert L.certificate == "unramified"
        z = L.from_parts(1, 1)  # 1 + sqrt2
        assert L.valuate(z) == Value.of(0)
        assert L.residue_field.size == 25
        # residue of 1 + sqrt2 is 1 + u with u^2 = 2
        r = L.residue(z)
        assert r == L.residue_field.from_coeffs((1, 1))
        assert L.valuate(L.from_parts(3, 1)) == Value.of(0)

    def test_ramified_sqrt3_3adic(self):
        F = RationalField(3)
        L = QuadraticExtension(F, 0, -3)  # t^2 = 3
        assert L.certificate == "ramified"
        assert L.valuate(L.gen) == Value.of(Fraction(1, 2))
        assert L.valuate(L.from_parts(3, 2)) == Value.of(Fraction(1, 2))
        assert L.residue_field.p == 3
        assert L.in_value_group(Value.of(Fraction(3, 2)))
        assert not L.in_value_group(Value.of(Fraction(1, 4)))

    def test_norm_valuation_identity(self):
        # v_L(z) = (1/2) v(N(z)) for both certificates
        rng = random.Random(11)
        for L in (
            QuadraticExtension(RationalField(5), 0, -2),
            QuadraticExtension(RationalField(3), 0, -3),
        ):
            for _ in range(40):
                z = L.random_element(rng)
                if z.is_zero():
                    continue
                n = z.norm()
                assert L.valuate(z) == L.base.valuate(n).scale(Fraction(1, 2))

    def test_split_counterexample(self):
        F = RationalField(7)
        L = QuadraticExtension(F, 0, -2)
        assert L.certificate == "split"
        report = check_unique_extension(L)
        assert report["unique"] is False
        assert sorted(report["counterexample"]["residue_roots"]) == ["3", "4"]
        with pytest.raises(UnsupportedFieldError):
            L.valuate(L.gen)

    def test_wild_rejected(self):
        with pytest.raises(UnsupportedFieldError):
            QuadraticExtension(RationalField(2), 0, -2)

    def test_unique_reports(self):
        assert check_unique_extension(
            QuadraticExtension(RationalField(5), 0, -2)
        ) == {"unique": True, "certificate": "unramified"}
        rep = check_unique_extension(QuadraticExtension(RationalField(3), 0, -3))
        assert rep["unique"] and rep["certificate"] == "ramified"

    def test_section_multiplicative(self):
        L = QuadraticExtension(RationalField(3), 0, -3)
        half = Value.of(Fraction(1, 2))
        assert L.monomial_section(half) == L.gen
        assert L.monomial_section(half) * L.monomial_section(half) == L.monomial_section(
            Value.of(1)
        )
        assert L.monomial_section(Value.of(Fraction(3, 2))) == L.gen * 3

    def test_ramified_over_function_field(self):
        Q = RationalField(rank=2)
        F = FunctionField(Q, ["x", "y"], [Value.of(1, 0), Value.of(0, 1)], rank=2)
        L = QuadraticExtension(F, 0, -F.gen(0))  # t^2 = x
        assert L.certificate == "ramified"
        assert L.valuate(L.gen) == Value.of(Fraction(1, 2), 0)
        assert L.residue_field is Q

    def test_unramified_char0_residue(self):
        # t^2 = -1 over Q(x) x-adic: residue field is the number field Q(i)
        Q = RationalField(rank=1)
        F = FunctionField(Q, ["x"], [Value.of(1)], rank=1)
        L = QuadraticExtension(F, 0, 1)  # t^2 + 1 = 0
        assert L.certificate == "unramified"
        R = L.residue_field
        assert isinstance(R, QuadraticExtension)
        assert R.is_trivially_valued()
        i = R.gen
        assert i * i == R.coerce(-1)

    def test_trivial_base(self):
        Q = RationalField()
        L = QuadraticExtension(Q, 0, -2)
        assert L.certificate == "trivial"
        assert L.valuate(L.gen) == Value.of(0)
        with pytest.raises(UnsupportedFieldError):
            QuadraticExtension(Q, 0, -4)  # t^2 = 4 reducible


class TestCoarsening:
    def setup_method(self):
        Q = RationalField(rank=2)
        self.F = FunctionField(
            Q, ["x", "y"], [Value.of(1, 0), Value.of(0, 1)], rank=2
        )
        self.sub = ConvexSubgroup(rank=2, kept_coords=1)
        self.W = coarsen_field(self.F, self.sub)

    def test_coarse_valuation(self):
        x, y = self.F.gen(0), self.F.gen(1)
        assert self.W.valuate(x) == Value.of(1, 0)
        assert self.W.valuate(y) == Value.of(0, 0)
        assert self.W.valuate(x**2 / y**5) == Value.of(2, 0)

    def test_residue_is_function_field_with_finer_valuation(self):
        R = self.W.residue_field
        assert isinstance(R, FunctionField)
        assert R.variables == ("y",)
        # u(y) sits inside the subgroup
        assert R.valuate(R.gen()) == Value.of(0, 1)

    def test_residue_map(self):
        x, y = self.F.gen(0), self.F.gen(1)
        elem = (y + x) / (1 - y)
        r = self.W.residue(elem)
        R = self.W.residue_field
        yy = R.gen()
        assert r == yy / (1 - yy)
        assert self.W.residue(x / (x + x * y)) == 1 / (1 + yy)

    def test_lift_roundtrip(self):
        R = self.W.residue_field
        yy = R.gen()
        r = (yy**2 + 2) / (yy + 5)
        assert self.W.residue(self.W.lift(r)) == r

    def test_degenerate_coarsenings(self):
        trivial = coarsen_field(self.F, ConvexSubgroup(rank=2, kept_coords=2))
        assert trivial.residue_field is self.F.residue_field
        x = self.F.gen(0)
        assert trivial.valuate(x) == self.F.valuate(x)
        everything = coarsen_field(self.F, ConvexSubgroup(rank=2, kept_coords=0))
        assert everything.residue_field is self.F
        assert everything.valuate(x) == Value.of(0, 0)
        assert everything.is_trivially_valued()

    def test_coarse_section(self):
        t = self.W.monomial_section(Value.of(3, 0))
        x = self.F.gen(0)
        assert t == x**3
        with pytest.raises(NotInValueGroupError):
            self.W.monomial_section(Value.of(0, 1))
