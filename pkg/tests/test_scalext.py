"""Scalar extension: Galois data, separability idempotents, twisted
centralizer decompositions, residue blocks, isotropy verdicts, and descent
of norms along explicit quadratic extensions."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaugeval.ordvalues import Value
from gaugeval.valfields import (
    FunctionField,
    QuadraticExtension,
    RationalField,
    UnsupportedFieldError,
)
from gaugeval.valnorms import Norm, norms_equal
from gaugeval.invalg import (
    AlgebraError,
    Involution,
    matrix_algebra,
    quaternion_algebra,
    tensor_algebra,
    transpose_involution,
)
from gaugeval.scalext import (
    GaloisExtensionData,
    biquadratic_galois_data,
    d_iota_decomposition,
    descent_equivalence,
    embed_extension,
    embedded_idempotents,
    extended_invariance,
    isotropy_criterion,
    quadratic_galois_data,
    residue_idempotent_structure,
    separability_idempotent,
    simple_tensor,
    tensor_graded_check,
)

Q3 = RationalField(3)
Q5 = RationalField(5)
QTRIV = RationalField()
HALF = Fraction(1, 2)


def V(*coords):
    return Value.of(*coords)


def rational_plane():
    return FunctionField(QTRIV, ("x", "y"), [V(1, 0), V(0, 1)], rank=2)


def rational_line():
    return FunctionField(QTRIV, ("x",), [V(1)], rank=1)


def diagonal_involution(alg, *signs):
    F = alg.field
    rows = [[F.zero] * alg.dim for _ in range(alg.dim)]
    for k, s in enumerate(signs):
        rows[k][k] = F.one if s > 0 else -F.one
    return Involution(alg, rows)


def symbol_instance():
    """The valued quaternion (x, y) with its embedded square root of x."""
    F = rational_plane()
    D = quaternion_algebra(F, F.coerce("x"), F.coerce("y"))
    vD = Norm.standard(F, 4, [V(0, 0), V(HALF, 0), V(0, HALF), V(HALF, HALF)])
    L = QuadraticExtension(F, 0, F.coerce("-x"))
    data = quadratic_galois_data(L)
    emb = embed_extension(data, D, vD, [D.unit, D.basis_vector(1)])
    return F, D, data, emb


def unramified_instance():
    """The rational quaternions over Q(x) with x-adic values, all zero."""
    F = rational_line()
    D = quaternion_algebra(F, F.coerce(-1), F.coerce(-1))
    vD = Norm.standard(F, 4)
    L = QuadraticExtension(F, 0, F.coerce(1))
    data = quadratic_galois_data(L)
    emb = embed_extension(data, D, vD, [D.unit, D.basis_vector(1)])
    return F, D, data, emb


class TestGaloisData:
    def test_quadratic_trivial_gram(self):
        data = quadratic_galois_data(QuadraticExtension(QTRIV, 0, -2))
        assert data.identity == "id"
        assert data.gram == [
            [Fraction(2), Fraction(0)], [Fraction(0), Fraction(4)]
        ]
        assert data.compose("conj", "conj") == "id"
        assert data.inverse("conj") == "conj"

    def test_quadratic_unramified(self):
        data = quadratic_galois_data(QuadraticExtension(Q5, 0, -2))
        assert data.norm.values == [V(0), V(0)]
        assert data.graded.a0().dim == 2

    def test_quadratic_ramified(self):
        F = rational_plane()
        data = quadratic_galois_data(QuadraticExtension(F, 0, F.coerce("-x")))
        assert data.norm.values == [V(0, 0), V(HALF, 0)]
        assert data.graded.a0().dim == 1

    def test_split_extension_rejected(self):
        Q7 = RationalField(7)
        with pytest.raises(UnsupportedFieldError):
            quadratic_galois_data(QuadraticExtension(Q7, 0, -2))

    def test_biquadratic_values(self):
        data = biquadratic_galois_data(Q5, 2, 5)
        assert data.norm.values == [V(0), V(0), V(HALF), V(HALF)]
        assert set(data.names) == {"id", "s-", "t-", "st-"}
        assert data.compose("s-", "t-") == "st-"
        assert data.compose("st-", "t-") == "s-"

    def test_biquadratic_rejects_colliding_residues(self):
        # both layers unramified over v_5 with residue generators that
        # merge, so the all-zero value function is not a valuation
        with pytest.raises(UnsupportedFieldError):
            biquadratic_galois_data(Q5, 2, 3)

    def test_group_order_must_match(self):
        ext = QuadraticExtension(QTRIV, 0, -2)
        data = quadratic_galois_data(ext)
        with pytest.raises(AlgebraError):
            GaloisExtensionData(
                data.algebra, data.norm, {"id": data.action["id"]}
            )

    def test_duplicate_action_rejected(self):
        ext = QuadraticExtension(QTRIV, 0, -2)
        data = quadratic_galois_data(ext)
        with pytest.raises(AlgebraError):
            GaloisExtensionData(
                data.algebra, data.norm,
                {"id": data.action["id"], "conj": data.action["id"]},
            )

    def test_as_involution_applies_action(self):
        data = quadratic_galois_data(QuadraticExtension(QTRIV, 0, -2))
        conj = data.as_involution("conj")
        assert conj.apply((Fraction(1), Fraction(3))) == (
            Fraction(1), Fraction(-3)
        )


class TestSeparabilityIdempotent:
    def test_sqrt2_idempotent_frozen(self):
        data = quadratic_galois_data(QuadraticExtension(QTRIV, 0, -2))
        fam = separability_idempotent(data)
        assert fam.principal == (
            Fraction(1, 2), Fraction(0), Fraction(0), Fraction(1, 4)
        )
        assert fam.members["conj"] == (
            Fraction(1, 2), Fraction(0), Fraction(0), Fraction(-1, 4)
        )

    def test_ramified_idempotent_frozen(self):
        _, _, data, _ = symbol_instance()
        F = data.algebra.field
        fam = separability_idempotent(data)
        assert fam.principal == (
            F.coerce(HALF), F.zero, F.zero, F.coerce("1/(2*x)")
        )

    def test_biquadratic_dual_base(self):
        data = biquadratic_galois_data(Q5, 2, 5)
        fam = separability_idempotent(data)
        e = fam.principal
        diag = [e[0], e[5], e[10], e[15]]
        assert diag == [
            Fraction(1, 4), Fraction(1, 8), Fraction(1, 20), Fraction(1, 40)
        ]
        off = [c for k, c in enumerate(e) if k % 5 != 0]
        assert all(c == 0 for c in off)

    def test_family_is_a_complete_orthogonal_system(self):
        data = biquadratic_galois_data(Q5, 2, 5)
        fam = separability_idempotent(data)
        T = fam.tensor
        total = T.zero_vec()
        for name, e in fam.members.items():
            assert T.is_idempotent(e)
            total = T.add(total, e)
            for other, f in fam.members.items():
                if other != name:
                    assert T.is_zero_vec(T.mul(e, f))
        assert total == T.unit

    @given(st.integers(-5, 5), st.integers(-5, 5))
    @settings(max_examples=25, deadline=None)
    def test_exchange_identity_on_random_elements(self, a, b):
        data = quadratic_galois_data(QuadraticExtension(QTRIV, 0, -2))
        fam = separability_idempotent(data)
        L, T = data.algebra, fam.tensor
        x = (Fraction(a), Fraction(b))
        for name, e in fam.members.items():
            left = T.mul(e, simple_tensor(L, L, x, L.unit))
            right = T.mul(e, simple_tensor(L, L, L.unit, data.apply(name, x)))
            assert left == right

    def test_degenerate_trace_form_raises(self):
        from gaugeval.valfields import FiniteField

        F2 = FiniteField(2, rank=1)
        F = FunctionField(F2, ("u",), [V(1)], rank=1)
        from gaugeval.invalg import quadratic_etale_algebra

        alg = quadratic_etale_algebra(F, F.zero, F.coerce("-u"))
        ident = [[F.one, F.zero], [F.zero, F.one]]
        unipotent = [[F.one, F.zero], [F.one, F.one]]
        # char 2: the extension is inseparable and has no honest conjugation;
        # a stand-in matrix of order two reaches the trace form guard
        data = GaloisExtensionData(
            alg, Norm.standard(F, 2), {"id": ident, "conj": unipotent},
            check=False,
        )
        with pytest.raises(UnsupportedFieldError):
            separability_idempotent(data)


class TestEmbedding:
    def test_embed_carries_vectors(self):
        _, D, data, emb = symbol_instance()
        F = D.field
        img = emb.embed((F.coerce(2), F.coerce("y")))
        assert img == (F.coerce(2), F.coerce("y"), F.zero, F.zero)

    def test_non_multiplicative_images_rejected(self):
        F, D, data, _ = symbol_instance()
        vD = Norm.standard(
            F, 4, [V(0, 0), V(HALF, 0), V(0, HALF), V(HALF, HALF)]
        )
        with pytest.raises(AlgebraError):
            embed_extension(data, D, vD, [D.unit, D.basis_vector(2)])

    def test_wrong_valuation_restriction_rejected(self):
        F, D, data, _ = symbol_instance()
        flat = Norm.standard(F, 4)
        with pytest.raises(AlgebraError):
            embed_extension(data, D, flat, [D.unit, D.basis_vector(1)])


class TestDecomposition:
    def setup_method(self):
        self.rng = random.Random(7)

    def test_symbol_lines_frozen(self):
        F, D, data, emb = symbol_instance()
        fam = separability_idempotent(data)
        dec = d_iota_decomposition(emb, fam, rng=self.rng)
        one, zero = F.one, F.zero
        assert dec.spaces["id"] == [
            (one, zero, zero, zero), (zero, one, zero, zero)
        ]
        assert dec.spaces["conj"] == [
            (zero, zero, one, zero), (zero, zero, zero, one)
        ]
        assert dec.psi == {"id": V(0, 0), "conj": V(0, HALF)}
        assert dec.centralizer_values == [V(0, 0), V(HALF, 0)]
        assert dec.psi_injective
        assert dec.totally_ramified
        assert dec.ramification_index == 2 == dec.relative_dim
        assert dec.min_formula_samples == 8
        assert dec.block_pairs_checked == 4

    def test_unramified_psi_collapses(self):
        F, D, data, emb = unramified_instance()
        fam = separability_idempotent(data)
        dec = d_iota_decomposition(emb, fam, rng=self.rng)
        assert dec.psi == {"id": V(0), "conj": V(0)}
        assert not dec.psi_injective
        assert not dec.totally_ramified
        assert dec.ramification_index == 1
        assert dec.relative_dim == 2

    def test_decomposition_without_family_skips_blocks(self):
        _, _, data, emb = symbol_instance()
        dec = d_iota_decomposition(emb)
        assert dec.block_pairs_checked == 0
        assert dec.min_formula_samples == 0
        assert dec.psi_injective


class TestResidueStructure:
    def setup_method(self):
        self.rng = random.Random(11)

    def test_symbol_residues_frozen(self):
        _, _, data, emb = symbol_instance()
        fam = separability_idempotent(data)
        dec = d_iota_decomposition(emb, fam)
        rs = residue_idempotent_structure(emb, fam, dec)
        assert rs.graded.a0().dim == 2
        assert rs.residue_idempotents["id"] == (HALF, HALF)
        assert rs.residue_idempotents["conj"] == (HALF, -HALF)
        assert rs.corner_dims == {"id": 1, "conj": 1}
        assert rs.primitive == {"id": True, "conj": True}
        assert rs.diagonal_only
        assert rs.psi_pattern_checked
        assert rs.block_dims[("id", "conj")] == 0

    def test_unramified_blocks_all_meet(self):
        _, _, data, emb = unramified_instance()
        fam = separability_idempotent(data)
        dec = d_iota_decomposition(emb, fam)
        rs = residue_idempotent_structure(emb, fam, dec)
        assert rs.graded.a0().dim == 8
        assert rs.corner_dims == {"id": 2, "conj": 2}
        assert all(d == 2 for d in rs.block_dims.values())
        assert not rs.diagonal_only
        assert len(rs.residue_idempotents) == 2

    def test_graded_exchange_identity(self):
        # the exchange property survives to the compressed graded ring,
        # checked through residues of the embedded generators
        _, D, data, emb = symbol_instance()
        fam = separability_idempotent(data)
        rs = residue_idempotent_structure(emb, fam)
        G = rs.graded
        A = G.source
        L = data.algebra
        alpha = G.phi
        e_members = embedded_idempotents(fam, emb)
        for name, e in e_members.items():
            _, res_e = alpha.residue_vector(e)
            for i in range(L.dim):
                x = L.basis_vector(i)
                left_vec = simple_tensor(D, L, emb.embed(x), L.unit)
                right_vec = simple_tensor(
                    D, L, D.unit, data.apply(name, x)
                )
                _, res_l = alpha.residue_vector(left_vec)
                _, res_r = alpha.residue_vector(right_vec)
                got_l = G.compressed.mul(tuple(res_e), tuple(res_l))
                got_r = G.compressed.mul(tuple(res_e), tuple(res_r))
                assert got_l == got_r


class TestIsotropy:
    def setup_method(self):
        self.rng = random.Random(5)

    def test_totally_ramified_central_is_anisotropic(self):
        _, D, data, emb = symbol_instance()
        sigma = diagonal_involution(D, 1, 1, 1, -1)
        verdict = isotropy_criterion(emb, sigma, "id", rng=self.rng)
        assert verdict.status == "anisotropic"
        assert verdict.method == "division corner certificate"
        assert verdict.sigma_l == "id"
        assert verdict.details["totally_ramified"]
        assert bool(verdict)

    def test_moved_idempotent_gives_witness(self):
        F, D, data, emb = symbol_instance()
        sigma = diagonal_involution(D, 1, -1, 1, 1)
        verdict = isotropy_criterion(emb, sigma, "id", rng=self.rng)
        assert verdict.status == "isotropic"
        assert verdict.method == "orthogonal idempotent witness"
        assert verdict.sigma_l == "conj"
        assert not bool(verdict)
        # re-verify the witness from scratch
        L = data.algebra
        A = tensor_algebra(D, L)
        tau = (sigma, data.as_involution("id"))
        from gaugeval.invalg import tensor_involution

        tau = tensor_involution(A, *tau)
        z = verdict.witness
        assert not A.is_zero_vec(z)
        assert A.is_zero_vec(A.mul(tau.apply(z), z))

    def test_fallback_certifies_through_residue(self):
        _, D, data, emb = unramified_instance()
        sigma = diagonal_involution(D, 1, -1, -1, -1)
        verdict = isotropy_criterion(emb, sigma, "conj", rng=self.rng)
        assert verdict.status == "anisotropic"
        assert verdict.method == "residue enumeration"
        assert verdict.sigma_l == "conj"
        assert not verdict.details["totally_ramified"]

    def test_fallback_can_stay_undecided(self):
        _, D, data, emb = unramified_instance()
        sigma = diagonal_involution(D, 1, 1, -1, 1)
        verdict = isotropy_criterion(emb, sigma, "id", rng=self.rng)
        assert verdict.status == "undecided"
        assert not bool(verdict)

    def test_unstable_involution_rejected(self):
        F, D, data, emb = symbol_instance()
        rows = [[F.zero] * 4 for _ in range(4)]
        rows[0][0] = F.one
        rows[2][1] = F.one  # sends the embedded generator to j
        rows[1][2] = F.one
        rows[3][3] = F.one
        sigma = Involution(D, rows, check=False)
        with pytest.raises(AlgebraError):
            isotropy_criterion(emb, sigma, "id")


class TestDescent:
    def unram(self):
        return QuadraticExtension(Q5, 0, -2)

    def ram(self):
        return QuadraticExtension(Q3, 0, -3)

    def test_descended_instance_all_true(self):
        K = self.unram()
        alpha = Norm(K, 2, [(K.one, K.zero), (K.one, K.gen)], [V(0), V(0)])
        rep = descent_equivalence(K, alpha)
        assert rep.tensor_equal and rep.descended_base and rep.chi_injective
        assert rep.descends
        assert rep.chi_bijective
        assert rep.value_groups_match
        assert rep.dominates
        assert not rep.immediate
        assert rep.restriction_values == [V(0), V(0)]

    def test_twisted_base_all_false(self):
        # the norm separates (1, 0) and (1, xi) by a jump the rational
        # subspace cannot see: descent fails in all three forms
        K = self.unram()
        alpha = Norm(K, 2, [(K.one, K.zero), (K.one, K.gen)], [V(0), V(1)])
        rep = descent_equivalence(K, alpha)
        assert not rep.tensor_equal
        assert not rep.descended_base
        assert not rep.chi_injective
        assert rep.dominates
        assert rep.class_ranks == [(V(0), 2, 4)]
        assert rep.restriction_values == [V(0), V(0)]

    def test_ramified_positive(self):
        K = self.ram()
        assert K.certificate == "ramified"
        alpha = Norm(K, 2, [(K.one, K.zero), (K.zero, K.one)],
                     [V(0), V(HALF)])
        rep = descent_equivalence(K, alpha)
        assert rep.tensor_equal and rep.descended_base and rep.chi_injective
        assert rep.chi_bijective

    def test_ramified_negative(self):
        K = self.ram()
        alpha = Norm(K, 2, [(K.one, K.zero), (K.one, K.gen)],
                     [V(0), V(1)])
        rep = descent_equivalence(K, alpha)
        assert not rep.descends
        assert not rep.descended_base

    def test_candidate_matches_restriction(self):
        K = self.unram()
        alpha = Norm(K, 2, [(K.one, K.zero), (K.one, K.gen)], [V(0), V(0)])
        rep = descent_equivalence(K, alpha)
        candidate = Norm(K, 2, rep.restriction_base, rep.restriction_values)
        assert norms_equal(alpha, candidate)

    def test_randomized_conditions_agree(self):
        rng = random.Random(23)
        pool = [V(0), V(1), V(HALF), V(Fraction(3, 2))]
        for K in (self.unram(), self.ram()):
            gamma = K.gamma_t
            values_pool = [
                v for v in pool
                if K.certificate == "ramified" or v.coords[0].denominator == 1
            ]
            for _ in range(5):
                while True:
                    base = [
                        tuple(K.random_element(rng) for _ in range(2))
                        for _ in range(2)
                    ]
                    try:
                        alpha = Norm(
                            K, 2, base,
                            [values_pool[rng.randrange(len(values_pool))]
                             for _ in range(2)],
                        )
                        break
                    except ValueError:
                        continue
                rep = descent_equivalence(K, alpha)  # raises on disagreement
                assert (
                    rep.tensor_equal == rep.descended_base == rep.chi_injective
                )
                assert rep.dominates

    def test_norm_over_wrong_field_rejected(self):
        K = self.unram()
        alpha = Norm.standard(Q5, 2)
        with pytest.raises(AlgebraError):
            descent_equivalence(K, alpha)


class TestTensorGraded:
    def test_quaternion_times_quadratic(self):
        from gaugeval.invalg import quadratic_etale_algebra

        F = rational_plane()
        A = quaternion_algebra(F, F.coerce("x"), F.coerce("y"))
        phiA = Norm.standard(
            F, 4, [V(0, 0), V(HALF, 0), V(0, HALF), V(HALF, HALF)]
        )
        B = quadratic_etale_algebra(F, F.zero, F.coerce("-x"))
        phiB = Norm.standard(F, 2, [V(0, 0), V(HALF, 0)])
        rep = tensor_graded_check(
            A, phiA, B, phiB,
            diagonal_involution(A, 1, 1, 1, -1),
            diagonal_involution(B, 1, -1),
        )
        assert rep.tables_agree
        assert rep.involutions_agree

    def test_without_involutions(self):
        from gaugeval.invalg import quadratic_etale_algebra

        F = rational_plane()
        B = quadratic_etale_algebra(F, F.zero, F.coerce("-x"))
        phiB = Norm.standard(F, 2, [V(0, 0), V(HALF, 0)])
        C = quadratic_etale_algebra(F, F.zero, F.coerce("-y"))
        phiC = Norm.standard(F, 2, [V(0, 0), V(0, HALF)])
        rep = tensor_graded_check(B, phiB, C, phiC)
        assert rep.tables_agree
        assert rep.involutions_agree is None


class TestExtendedInvariance:
    def test_invariance_survives_extension(self):
        F = rational_plane()
        A = quaternion_algebra(F, F.coerce("x"), F.coerce("y"))
        phi = Norm.standard(
            F, 4, [V(0, 0), V(HALF, 0), V(0, HALF), V(HALF, HALF)]
        )
        data = quadratic_galois_data(QuadraticExtension(F, 0, F.coerce("-y")))
        base_rep, ext_rep = extended_invariance(
            data, A, phi, diagonal_involution(A, 1, 1, 1, -1)
        )
        assert base_rep.invariant
        assert ext_rep.invariant

    def test_non_invariant_base_stays_non_invariant(self):
        F = rational_plane()
        M = matrix_algebra(F, 2)
        sigma = transpose_involution(M)
        phi = Norm.standard(F, 4, [V(0, 0), V(1, 0), V(2, 0), V(0, 0)])
        data = quadratic_galois_data(QuadraticExtension(F, 0, F.coerce("-y")))
        base_rep, ext_rep = extended_invariance(data, M, phi, sigma)
        assert not base_rep.invariant
        assert not ext_rep.invariant
