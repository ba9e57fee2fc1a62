"""Graded rings of value functions: radicals, tameness, induced involutions,
homogeneous isotropy, and idempotent ideal generators."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaugeval import linalg
from gaugeval.ordvalues import Value
from gaugeval.valfields import (
    FiniteField,
    FunctionField,
    RationalField,
    UnsupportedFieldError,
)
from gaugeval.valnorms import LacunarySpanFunction, Norm
from gaugeval.invalg import (
    Algebra,
    AlgebraError,
    Involution,
    conjugation_involution,
    cyclic_group_algebra,
    involution_from_images,
    matrix_algebra,
    quadratic_etale_algebra,
    quaternion_algebra,
    transpose_involution,
)
from gaugeval.grassoc import (
    AnisotropyVerdict,
    GradedDefectError,
    InvarianceError,
    algebra_radical,
    build_graded,
    check_graded_semisimple,
    check_surmultiplicative,
    check_tame,
    graded_anisotropy,
    ideal_idempotent,
    induce_involution,
    involution_anisotropy,
)

Q2 = RationalField(2)
Q3 = RationalField(3)
QTRIV = RationalField()
F2 = FiniteField(2)
F3 = FiniteField(3)


def V(*coords):
    return Value.of(*coords)


HALF = Value((Fraction(1, 2),))
MHALF = Value((Fraction(-1, 2),))


def triangular_algebra(field, n):
    pairs = [(i, j) for i in range(n) for j in range(n) if i <= j]
    idx = {pq: t for t, pq in enumerate(pairs)}
    d = len(pairs)
    table = [[[field.zero] * d for _ in range(d)] for _ in range(d)]
    for a, (i, j) in enumerate(pairs):
        for b, (k, l) in enumerate(pairs):
            if j == k:
                table[a][b][idx[(i, l)]] = field.one
    unit = [field.zero] * d
    for i in range(n):
        unit[idx[(i, i)]] = field.one
    return Algebra(field, d, table, unit=unit)


def division_graded():
    """(-1,-3) quaternions over the 3-adics with the reduced-norm gauge."""
    F = RationalField(3)
    D = quaternion_algebra(F, Fraction(-1), Fraction(-3))
    phi = Norm.standard(F, 4, [V(0), V(0), HALF, HALF])
    return D, phi, build_graded(D, phi)


def split_graded():
    """(-1,-1) quaternions over the 3-adics; split, all-zero gauge."""
    F = RationalField(3)
    A = quaternion_algebra(F, Fraction(-1), Fraction(-1))
    phi = Norm.standard(F, 4)
    return A, phi, build_graded(A, phi)


class TestCharpoly:
    def test_diagonal(self):
        m = [[Fraction(2), Fraction(0)], [Fraction(0), Fraction(5)]]
        # (x-2)(x-5) = x^2 - 7x + 10
        assert linalg.charpoly(m, QTRIV) == [Fraction(10), Fraction(-7), Fraction(1)]

    def test_nilpotent(self):
        m = [[0, 1, 0], [0, 0, 1], [0, 0, 0]]
        m = [[Fraction(c) for c in r] for r in m]
        assert linalg.charpoly(m, QTRIV) == [Fraction(0)] * 3 + [Fraction(1)]

    def test_companion(self):
        # companion matrix of x^3 - 2x - 5
        m = [[0, 0, 5], [1, 0, 2], [0, 1, 0]]
        m = [[Fraction(c) for c in r] for r in m]
        assert linalg.charpoly(m, QTRIV) == [
            Fraction(-5), Fraction(-2), Fraction(0), Fraction(1)
        ]

    def test_finite_field(self):
        one, zero = F2.one, F2.zero
        m = [[one, one], [one, zero]]
        # x^2 + x + 1 over F_2 (trace 1, det 1)
        got = linalg.charpoly(m, F2)
        assert got == [one, one, one]

    def test_determinant_term(self):
        rng = random.Random(11)
        for _ in range(10):
            n = rng.randint(1, 4)
            m = [[Fraction(rng.randint(-4, 4)) for _ in range(n)]
                 for _ in range(n)]
            cp = linalg.charpoly(m, QTRIV)
            det = _det(m)
            assert cp[0] == (-1) ** n * det
            assert cp[n] == 1
            assert cp[n - 1] == -sum(m[k][k] for k in range(n))


def _det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    out = Fraction(0)
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        out += (-1) ** j * rows[0][j] * _det(minor)
    return out


class TestRadical:
    def test_group_algebra_char_two(self):
        alg = cyclic_group_algebra(F2, 2)
        rad = algebra_radical(alg)
        assert len(rad) == 1
        # spanned by 1 + g
        assert rad[0] in [(F2.one, F2.one)]

    def test_group_algebra_char_three(self):
        alg = cyclic_group_algebra(F3, 3)
        assert len(algebra_radical(alg)) == 2

    def test_matrix_algebra_semisimple(self):
        assert algebra_radical(matrix_algebra(F2, 2)) == []

    def test_quartic_coefficients(self):
        F4 = FiniteField(2, modulus=(1, 1, 1))
        alg = cyclic_group_algebra(F4, 2)
        assert len(algebra_radical(alg)) == 1

    def test_triangular_char_two(self):
        alg = triangular_algebra(F2, 2)
        rad = algebra_radical(alg)
        assert len(rad) == 1
        assert rad[0] == (F2.zero, F2.one, F2.zero)

    def test_triangular_rationals(self):
        alg = triangular_algebra(QTRIV, 3)
        assert len(algebra_radical(alg)) == 3

    def test_small_characteristic_needs_finite_field(self):
        F = FunctionField(FiniteField(3), ("t",), [V(1)], rank=1)
        alg = cyclic_group_algebra(F, 3)
        with pytest.raises(UnsupportedFieldError):
            algebra_radical(alg)


class TestBuildGraded:
    def test_division_structure(self):
        _, phi, G = division_graded()
        assert G.classes == [[0, 1], [2, 3]]
        assert G.zero_class == 0
        assert G.component_dims() == [2, 2]
        assert G.dim == 4

    def test_division_table(self):
        _, _, G = division_graded()
        K = G.residue
        two = K.coerce(2)
        # i*i = -1, j*j = -3 -> residue -1, jk = 3i -> residue i
        assert G.compressed.table[1][1][0] == two
        assert G.compressed.table[2][2][0] == two
        assert G.compressed.table[2][3][1] == K.one
        assert G.compressed.table[3][2][1] == two
        assert G.compressed.unit == (K.one, K.zero, K.zero, K.zero)

    def test_surmultiplicativity_rejected(self):
        F = RationalField(3)
        A = quaternion_algebra(F, Fraction(-1), Fraction(-1))
        phi = Norm.standard(F, 4, [V(0), V(0), HALF, HALF])
        ok, witness = check_surmultiplicative(A, phi)
        assert not ok and witness["pair"] == (2, 2)
        with pytest.raises(AlgebraError):
            build_graded(A, phi)

    def test_unit_value_must_be_zero(self):
        F = RationalField(3)
        A = matrix_algebra(F, 2)
        phi = Norm.standard(F, 4, [V(1)] * 4)
        with pytest.raises(AlgebraError):
            build_graded(A, phi)

    def test_dense_value_function_rejected(self):
        F = FunctionField(QTRIV, ("t",), [V(1)], rank=1)
        vf = LacunarySpanFunction(F)
        A = quadratic_etale_algebra(F, F.zero, F.one)
        with pytest.raises(GradedDefectError) as err:
            build_graded(A, vf)
        assert err.value.certificate is not None

    def test_lift_round_trip(self):
        _, phi, G = division_graded()
        K = G.residue
        vec = (K.zero, K.zero, K.one, K.coerce(2))
        for degree in (HALF, Value((Fraction(3, 2),))):
            x = G.lift_homogeneous(vec, degree)
            assert phi.evaluate(x) == degree
            level, entries = G.residue_of(x)
            assert level == degree and entries == vec

    def test_degree_zero_part_is_nine_element_field(self):
        _, _, G = division_graded()
        a0 = G.a0()
        assert a0.dim == 2 and G.a0_members() == [0, 1]
        K = G.residue
        # generator i with i^2 = -1; multiplicative order 4 forces F_9
        i = (K.zero, K.one)
        sq = a0.mul(i, i)
        assert sq == (K.coerce(2), K.zero)
        assert algebra_radical(a0) == []
        assert len(a0.center_basis()) == 2

    def test_dump_stable(self):
        _, _, G = division_graded()
        text = G.dump()
        assert text.splitlines()[0] == "residue field: F_3"
        assert "class 0 (zero class): indices [0, 1] degrees [(0), (0)]" in text
        assert "(2,3) -> 1:1" in text
        assert text == G.dump()


class TestGradedSemisimplicity:
    def test_division_semisimple(self):
        _, _, G = division_graded()
        rep = check_graded_semisimple(G)
        assert rep.semisimple and rep.method == "semilinear"

    def test_split_semisimple(self):
        _, _, G = split_graded()
        assert check_graded_semisimple(G).semisimple

    def test_triangular_not_semisimple(self):
        alg = triangular_algebra(QTRIV, 2)
        G = build_graded(alg, Norm.standard(QTRIV, 3))
        rep = check_graded_semisimple(G)
        assert not rep.semisimple
        assert rep.method == "trace_form"
        assert rep.witness == [(Fraction(0), Fraction(1), Fraction(0))]
        # the witness spans a square-zero ideal
        w = rep.witness[0]
        assert G.compressed.mul(w, w) == (Fraction(0),) * 3

    def test_triangular_graded_witness(self):
        alg = triangular_algebra(Q3, 2)
        phi = Norm.standard(Q3, 3, [V(0), HALF, V(0)])
        G = build_graded(alg, phi)
        assert G.classes == [[0, 2], [1]]
        rep = check_graded_semisimple(G)
        assert not rep.semisimple
        w = rep.witness[0]
        assert G.support_class(w) == 1

    def test_ramified_field_stays_semisimple(self):
        # sqrt(-2) over the 2-adics: the compressed algebra has an ungraded
        # radical but the graded ring is a graded field, so the classwise
        # intersections must all vanish
        A = quadratic_etale_algebra(Q2, Fraction(0), Fraction(2))
        phi = Norm.standard(Q2, 2, [V(0), HALF])
        G = build_graded(A, phi)
        assert len(algebra_radical(G.compressed)) == 1
        assert check_graded_semisimple(G).semisimple


class TestTameness:
    def test_division_tame(self):
        _, _, G = division_graded()
        rep = check_tame(G)
        assert rep.tame and rep.semisimple
        assert rep.center_dim_graded == rep.center_dim_source == 1
        assert rep.ramification_index == 1

    def test_tamely_ramified_quadratic(self):
        A = quadratic_etale_algebra(Q3, Fraction(0), Fraction(3))
        G = build_graded(A, Norm.standard(Q3, 2, [V(0), HALF]))
        rep = check_tame(G)
        assert rep.tame
        assert rep.ramification_index == 2
        assert rep.center_dim_graded == rep.center_dim_source == 2

    def test_wildly_ramified_raises(self):
        A = quadratic_etale_algebra(Q2, Fraction(0), Fraction(2))
        G = build_graded(A, Norm.standard(Q2, 2, [V(0), HALF]))
        with pytest.raises(UnsupportedFieldError):
            check_tame(G)

    def test_shifted_matrix_gauge_tame(self):
        M = matrix_algebra(Q3, 2)
        phi = Norm.standard(Q3, 4, [V(0), HALF, MHALF, V(0)])
        G = build_graded(M, phi)
        assert G.classes == [[0, 3], [1, 2]]
        assert check_tame(G).tame

    def test_residue_characteristic_zero(self):
        M = matrix_algebra(QTRIV, 2)
        G = build_graded(M, Norm.standard(QTRIV, 4))
        rep = check_tame(G)
        assert rep.tame and rep.separable

    def test_not_semisimple_not_tame(self):
        alg = triangular_algebra(QTRIV, 2)
        G = build_graded(alg, Norm.standard(QTRIV, 3))
        assert not check_tame(G).tame


class TestInducedInvolution:
    def test_division_conjugation(self):
        D, _, G = division_graded()
        gi = induce_involution(G, conjugation_involution(D))
        K = G.residue
        two = K.coerce(2)
        # residue of conjugation: fixes 1, negates i, j, k
        assert gi.apply((K.one, K.zero, K.zero, K.zero)) == (
            K.one, K.zero, K.zero, K.zero
        )
        assert gi.apply((K.zero, K.one, K.zero, K.zero)) == (
            K.zero, two, K.zero, K.zero
        )

    def test_degree_zero_restriction_unitary(self):
        D, _, G = division_graded()
        gi = induce_involution(G, conjugation_involution(D))
        prof = gi.a0_profile()
        # nontrivial on the nine-element degree-zero field
        assert prof.kind == "second"

    def test_invariance_failure_witnessed(self):
        M = matrix_algebra(Q3, 2)
        phi = Norm.standard(Q3, 4, [V(0), HALF, MHALF, V(0)])
        G = build_graded(M, phi)
        with pytest.raises(InvarianceError) as err:
            induce_involution(G, transpose_involution(M))
        assert err.value.witness is not None

    def test_transpose_on_balanced_gauge(self):
        M = matrix_algebra(Q3, 2)
        phi = Norm.standard(Q3, 4)
        G = build_graded(M, phi)
        gi = induce_involution(G, transpose_involution(M))
        prof = gi.a0_profile()
        assert prof.kind == "first" and prof.type_ == "orthogonal"

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 3 ** 4 - 1), st.integers(0, 3 ** 4 - 1))
    def test_antimultiplicative_on_samples(self, a, b):
        D, _, G = division_graded()
        gi = induce_involution(G, conjugation_involution(D))
        K = G.residue
        x = tuple(K.coerce((a // 3 ** t) % 3) for t in range(4))
        y = tuple(K.coerce((b // 3 ** t) % 3) for t in range(4))
        lhs = gi.apply(G.compressed.mul(x, y))
        rhs = G.compressed.mul(gi.apply(y), gi.apply(x))
        assert lhs == rhs


class TestAnisotropy:
    def test_division_anisotropic(self):
        D, _, G = division_graded()
        gi = induce_involution(G, conjugation_involution(D))
        verdict = graded_anisotropy(gi)
        assert verdict.status == "anisotropic"
        methods = [c["method"] for c in verdict.certificate["classes"]]
        assert methods == ["exhaustive", "exhaustive"]

    def test_split_isotropic_with_witness(self):
        A, _, G = split_graded()
        gi = induce_involution(G, conjugation_involution(A))
        verdict = graded_anisotropy(gi)
        assert verdict.status == "isotropic"
        w = verdict.witness["vector"]
        img = gi.apply(w)
        assert G.compressed.is_zero_vec(G.compressed.mul(img, w))

    def test_hand_witness_one_plus_i_plus_j(self):
        A, _, G = split_graded()
        gi = induce_involution(G, conjugation_involution(A))
        K = G.residue
        t = (K.one, K.one, K.one, K.zero)
        assert G.compressed.is_zero_vec(G.compressed.mul(gi.apply(t), t))

    def test_component_swap_probe_over_rationals(self):
        # two orthogonal idempotents exchanged by the involution: the basis
        # probe finds the isotropic vector without any enumeration
        z, o = QTRIV.zero, QTRIV.one
        table = [[[o, z], [z, z]], [[z, z], [z, o]]]
        alg = Algebra(QTRIV, 2, table, unit=(o, o))
        swap = involution_from_images(alg, [(z, o), (o, z)])
        verdict = involution_anisotropy(alg, swap)
        assert verdict.status == "isotropic"
        assert verdict.witness["kind"] == "basis_probe"

    def test_definite_certificate_over_rationals(self):
        # conjugation on definite rational quaternions: trace form is
        # 4(x0^2+x1^2+x2^2+x3^2), positive definite
        H = quaternion_algebra(QTRIV, Fraction(-1), Fraction(-1))
        verdict = involution_anisotropy(H, conjugation_involution(H))
        assert verdict.status == "anisotropic"
        cert = verdict.certificate["classes"][0]
        assert cert["method"] == "definite" and cert["sign"] == 1

    def test_undecided_is_honest(self):
        # split rational quaternions: conjugation is isotropic but no probe
        # or certificate applies over an infinite field
        H = quaternion_algebra(QTRIV, Fraction(1), Fraction(1))
        verdict = involution_anisotropy(H, conjugation_involution(H))
        assert verdict.status in ("isotropic", "undecided")
        if verdict.status == "undecided":
            assert any(
                c["method"] == "none" for c in verdict.certificate["classes"]
            )

    def test_budget_exhaustion(self):
        D, _, G = division_graded()
        gi = induce_involution(G, conjugation_involution(D))
        verdict = graded_anisotropy(gi, budget=3)
        assert verdict.status == "undecided"


class TestIdealIdempotent:
    def test_row_ideal(self):
        M = matrix_algebra(Q3, 2)
        G = build_graded(M, Norm.standard(Q3, 4))
        K = G.residue
        gen = (K.zero, K.zero, K.one, K.zero)
        e, report = ideal_idempotent(G, [gen])
        assert e == (K.zero, K.zero, K.zero, K.one)
        assert report["ideal_dim"] == 2 and not report["full"]

    def test_row_ideal_shifted_gauge(self):
        M = matrix_algebra(Q3, 2)
        phi = Norm.standard(Q3, 4, [V(0), HALF, MHALF, V(0)])
        G = build_graded(M, phi)
        K = G.residue
        e, report = ideal_idempotent(G, [(K.zero, K.zero, K.one, K.zero)])
        assert e == (K.zero, K.zero, K.zero, K.one)
        assert report["ideal_dim"] == 2

    def test_full_ideal_gives_unit(self):
        M = matrix_algebra(Q3, 2)
        G = build_graded(M, Norm.standard(Q3, 4))
        K = G.residue
        e, report = ideal_idempotent(G, [G.compressed.unit])
        assert e == G.compressed.unit and report["full"]

    def test_requires_semisimple(self):
        alg = triangular_algebra(QTRIV, 2)
        G = build_graded(alg, Norm.standard(QTRIV, 3))
        K = G.residue
        with pytest.raises(AlgebraError):
            ideal_idempotent(G, [(K.one, K.zero, K.zero)])

    def test_requires_graded_simple(self):
        # split etale algebra t^2 = 1: center has the idempotent (1 + t)/2
        A = quadratic_etale_algebra(QTRIV, Fraction(0), Fraction(-1))
        G = build_graded(A, Norm.standard(QTRIV, 2))
        K = G.residue
        with pytest.raises(AlgebraError):
            ideal_idempotent(G, [(K.one, K.zero)])

    def test_division_ring_only_trivial_ideals(self):
        D, _, G = division_graded()
        K = G.residue
        gen = (K.zero, K.one, K.zero, K.zero)
        e, report = ideal_idempotent(G, [gen])
        assert e == G.compressed.unit and report["full"]


class TestGradedProducts:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3 ** 2 - 1), st.integers(1, 3 ** 2 - 1),
           st.integers(0, 1), st.integers(0, 1))
    def test_compression_respects_products(self, a, b, ca, cb):
        """Residue of a product of homogeneous lifts is the compressed
        product, or the compressed product is zero and the value jumps."""
        _, phi, G = division_graded()
        K = G.residue
        members_a = G.classes[ca]
        members_b = G.classes[cb]
        x = [K.zero] * 4
        x[members_a[0]] = K.coerce(a % 3)
        x[members_a[1]] = K.coerce(a // 3)
        y = [K.zero] * 4
        y[members_b[0]] = K.coerce(b % 3)
        y[members_b[1]] = K.coerce(b // 3)
        if all(K.is_zero(c) for c in x) or all(K.is_zero(c) for c in y):
            return
        lx = G.lift_homogeneous(tuple(x))
        ly = G.lift_homogeneous(tuple(y))
        prod = G.source.mul(lx, ly)
        expected = G.compressed.mul(tuple(x), tuple(y))
        bound = phi.evaluate(lx) + phi.evaluate(ly)
        if G.compressed.is_zero_vec(expected):
            assert phi.evaluate(prod) > bound
        else:
            level, entries = G.residue_of(prod)
            assert level == bound and entries == expected

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3 ** 2 - 1), st.integers(0, 1))
    def test_homogeneous_products_stay_homogeneous(self, a, ca):
        _, _, G = division_graded()
        K = G.residue
        members = G.classes[ca]
        x = [K.zero] * 4
        x[members[0]] = K.coerce(a % 3)
        x[members[1]] = K.coerce(a // 3)
        if all(K.is_zero(c) for c in x):
            return
        for j in range(4):
            prod = G.compressed.mul(tuple(x), G.compressed.basis_vector(j))
            if not G.compressed.is_zero_vec(prod):
                assert G.support_class(prod) is not None
