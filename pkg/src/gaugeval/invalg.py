"""Finite-dimensional algebras over valued fields, with involutions.

Algebras are given by structure constants over a ``ValuedField``; elements are
plain coordinate tuples.  The module provides the usual presets (matrix
algebras, quaternion algebras, quadratic etale algebras, matrices over a
division preset, tensor products), involutions with kind/type classification,
hermitian forms with their adjoint involutions, value functions on
endomorphism algebras, and candidate valuations obtained from reduced norms
on quaternion presets together with the certificates that decide whether the
candidate really is a valuation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from gaugeval import linalg
from gaugeval.ordvalues import INFINITY, Value, vmin
from gaugeval.valfields import FunctionField, RationalField, ValuedField
from gaugeval.valnorms import Norm


class AlgebraError(ValueError):
    pass


class Algebra:
    """Structure-constant algebra: b_i b_j = sum_k table[i][j][k] b_k."""

    def __init__(self, field: ValuedField, dim: int, table, unit=None,
                 preset=None, basis_names=None, check: bool = True):
        self.field = field
        self.dim = dim
        self.table = tuple(
            tuple(tuple(field.coerce(c) for c in cell) for cell in row)
            for row in table
        )
        if len(self.table) != dim or any(
            len(row) != dim or any(len(cell) != dim for cell in row)
            for row in self.table
        ):
            raise AlgebraError("structure constant table must be dim^3")
        self.preset = preset
        self.basis_names = tuple(basis_names) if basis_names else tuple(
            f"b{i}" for i in range(dim)
        )
        if unit is None:
            unit = self._solve_unit()
        self.unit = tuple(field.coerce(c) for c in unit)
        if check:
            self._check_unit()
            self._check_associative()

    # --- construction checks
    def _solve_unit(self):
        # u with u * b_j = b_j for all j; uniqueness then forced
        rows = []
        rhs = []
        for j in range(self.dim):
            for k in range(self.dim):
                rows.append([self.table[i][j][k] for i in range(self.dim)])
                rhs.append(self.field.one if k == j else self.field.zero)
        sol = linalg.solve(rows, rhs, self.field)
        if sol is None:
            raise AlgebraError("algebra has no unit element")
        return sol

    def _check_unit(self):
        for j in range(self.dim):
            b = self.basis_vector(j)
            if self.mul(self.unit, b) != b or self.mul(b, self.unit) != b:
                raise AlgebraError("unit law fails")

    def _check_associative(self):
        for i in range(self.dim):
            bi = self.basis_vector(i)
            for j in range(self.dim):
                bj = self.basis_vector(j)
                ij = self.mul(bi, bj)
                for k in range(self.dim):
                    bk = self.basis_vector(k)
                    if self.mul(ij, bk) != self.mul(bi, self.mul(bj, bk)):
                        raise AlgebraError(
                            f"associativity fails on basis triple {i},{j},{k}"
                        )

    # --- elements
    def zero_vec(self):
        return tuple(self.field.zero for _ in range(self.dim))

    def basis_vector(self, i):
        return tuple(
            self.field.one if k == i else self.field.zero
            for k in range(self.dim)
        )

    def coerce_vec(self, seq):
        seq = tuple(self.field.coerce(c) for c in seq)
        if len(seq) != self.dim:
            raise AlgebraError("coordinate length mismatch")
        return seq

    def scalar(self, c):
        c = self.field.coerce(c)
        return tuple(c * u for u in self.unit)

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x, y):
        return tuple(a - b for a, b in zip(x, y))

    def neg(self, x):
        return tuple(-a for a in x)

    def scale(self, x, c):
        c = self.field.coerce(c)
        return tuple(c * a for a in x)

    def mul(self, x, y):
        out = [self.field.zero] * self.dim
        for i, xi in enumerate(x):
            if self.field.is_zero(xi):
                continue
            row = self.table[i]
            for j, yj in enumerate(y):
                if self.field.is_zero(yj):
                    continue
                coeff = xi * yj
                for k, c in enumerate(row[j]):
                    if not self.field.is_zero(c):
                        out[k] = out[k] + coeff * c
        return tuple(out)

    def is_zero_vec(self, x):
        return all(self.field.is_zero(c) for c in x)

    def is_idempotent(self, e):
        return self.mul(e, e) == tuple(e)

    def power(self, x, n: int):
        out = self.unit
        for _ in range(n):
            out = self.mul(out, x)
        return out

    # --- linear-algebraic views
    def left_regular(self, x):
        """Matrix rows M with (x y)_k = sum_j M[k][j] y_j."""
        cols = [self.mul(x, self.basis_vector(j)) for j in range(self.dim)]
        return [[cols[j][k] for j in range(self.dim)] for k in range(self.dim)]

    def right_regular(self, x):
        cols = [self.mul(self.basis_vector(j), x) for j in range(self.dim)]
        return [[cols[j][k] for j in range(self.dim)] for k in range(self.dim)]

    def regular_trace(self, x):
        m = self.left_regular(x)
        out = self.field.zero
        for k in range(self.dim):
            out = out + m[k][k]
        return out

    def inverse(self, x):
        """Two-sided inverse, or None.  One-sided suffices in finite dim."""
        sol = linalg.solve(self.left_regular(x), list(self.unit), self.field)
        return None if sol is None else tuple(sol)

    def center_basis(self):
        stacked = []
        for i in range(self.dim):
            left = self.left_regular(self.basis_vector(i))
            right = self.right_regular(self.basis_vector(i))
            for k in range(self.dim):
                stacked.append(
                    [left[k][j] - right[k][j] for j in range(self.dim)]
                )
        return [tuple(v) for v in linalg.kernel_basis(stacked, self.field)]

    # --- ideals, desk-scale simplicity probe
    def two_sided_ideal(self, gens):
        rows = [list(g) for g in gens]
        while True:
            basis = linalg.row_space_basis(rows, self.field)
            new_rows = [list(b) for b in basis]
            grew = False
            for b in basis:
                for i in range(self.dim):
                    bi = self.basis_vector(i)
                    for prod in (self.mul(bi, tuple(b)), self.mul(tuple(b), bi)):
                        if linalg.in_span(new_rows, list(prod), self.field) is None:
                            new_rows.append(list(prod))
                            grew = True
            rows = new_rows
            if not grew:
                return linalg.row_space_basis(rows, self.field)

    def is_simple_probe(self, rng=None, trials: int = 4):
        """No proper ideal among desk-scale candidate generators.

        Candidates: basis vectors, unit-minus-basis differences (catches
        augmentation-type ideals whose natural generators are not basis
        vectors), and optional random samples.  Sound when it answers False;
        True is a probe, not a proof.
        """
        gens = [self.basis_vector(i) for i in range(self.dim)]
        gens.extend(
            self.sub(self.unit, self.basis_vector(i)) for i in range(self.dim)
        )
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                gens.append(
                    self.sub(self.basis_vector(i), self.basis_vector(j))
                )
        if rng is not None:
            for _ in range(trials):
                gens.append(self.random_element(rng))
        for g in gens:
            if self.is_zero_vec(g):
                continue
            if len(self.two_sided_ideal([g])) != self.dim:
                return False
        return True

    def random_element(self, rng, complexity: int = 1):
        return tuple(
            self.field.random_element(rng, complexity) for _ in range(self.dim)
        )

    def describe(self):
        return f"Algebra(dim={self.dim}, preset={self.preset})"

    __repr__ = describe


# ---------------------------------------------------------------------------
# presets


def field_as_algebra(field: ValuedField) -> Algebra:
    return Algebra(field, 1, [[[field.one]]], unit=[field.one],
                   preset=("field",), basis_names=("1",), check=False)


def matrix_algebra(field: ValuedField, n: int) -> Algebra:
    dim = n * n

    def idx(i, j):
        return i * n + j

    zero = field.zero
    one = field.one
    table = [[[zero] * dim for _ in range(dim)] for _ in range(dim)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    if j == k:
                        table[idx(i, j)][idx(k, l)][idx(i, l)] = one
    unit = [zero] * dim
    for i in range(n):
        unit[idx(i, i)] = one
    names = [f"E{i+1}{j+1}" for i in range(n) for j in range(n)]
    return Algebra(field, dim, table, unit=unit, preset=("matrix", n),
                   basis_names=names, check=False)


def quaternion_algebra(field: ValuedField, a, b) -> Algebra:
    """Basis 1, i, j, k with i^2 = a, j^2 = b, ij = k = -ji."""
    if field.char == 2:
        raise AlgebraError("quaternion presets need characteristic != 2")
    a = field.coerce(a)
    b = field.coerce(b)
    zero, one = field.zero, field.one

    # monomials i^p j^q, p,q in {0,1}; index p*2 + q... order 1, i, j, k
    def reduce(p, q, coeff):
        if p >= 2:
            coeff = coeff * a
            p -= 2
        if q >= 2:
            coeff = coeff * b
            q -= 2
        return p, q, coeff

    index_of = {(0, 0): 0, (1, 0): 1, (0, 1): 2, (1, 1): 3}
    table = [[[zero] * 4 for _ in range(4)] for _ in range(4)]
    for (p1, q1), idx1 in index_of.items():
        for (p2, q2), idx2 in index_of.items():
            # (i^p1 j^q1)(i^p2 j^q2) = (-1)^(q1 p2) i^(p1+p2) j^(q1+q2)
            sign = -one if (q1 * p2) % 2 else one
            p, q, coeff = reduce(p1 + p2, q1 + q2, sign)
            table[idx1][idx2][index_of[(p, q)]] = coeff
    return Algebra(field, 4, table, unit=[one, zero, zero, zero],
                   preset=("quaternion", a, b),
                   basis_names=("1", "i", "j", "k"), check=False)


def quadratic_etale_algebra(field: ValuedField, b, c) -> Algebra:
    """F[t]/(t^2 + b t + c), basis (1, t)."""
    b = field.coerce(b)
    c = field.coerce(c)
    zero, one = field.zero, field.one
    table = [
        [[one, zero], [zero, one]],
        [[zero, one], [-c, -b]],
    ]
    return Algebra(field, 2, table, unit=[one, zero],
                   preset=("quadratic", b, c), basis_names=("1", "t"),
                   check=False)


def cyclic_group_algebra(field: ValuedField, n: int) -> Algebra:
    zero, one = field.zero, field.one
    table = [[[zero] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            table[i][j][(i + j) % n] = one
    unit = [one] + [zero] * (n - 1)
    names = tuple(f"g{i}" for i in range(n))
    return Algebra(field, n, table, unit=unit, preset=("group", n),
                   basis_names=names, check=False)


def matrix_over(inner: Algebra, n: int) -> Algebra:
    """M_n(D) for a structure-constant D; basis E_ij (x) d_b."""
    field = inner.field
    d = inner.dim
    dim = n * n * d

    def idx(i, j, b):
        return (i * n + j) * d + b

    zero = field.zero
    table = [[[zero] * dim for _ in range(dim)] for _ in range(dim)]
    for i in range(n):
        for j in range(n):
            for b in range(d):
                for k in range(n):
                    for l in range(n):
                        if j != k:
                            continue
                        for b2 in range(d):
                            prod = inner.table[b][b2]
                            row = table[idx(i, j, b)][idx(k, l, b2)]
                            for b3, coeff in enumerate(prod):
                                if not field.is_zero(coeff):
                                    row[idx(i, l, b3)] = coeff
    unit = [zero] * dim
    for i in range(n):
        for b, c in enumerate(inner.unit):
            unit[idx(i, i, b)] = c
    names = tuple(
        f"E{i+1}{j+1}*{inner.basis_names[b]}"
        for i in range(n) for j in range(n) for b in range(d)
    )
    return Algebra(field, dim, table, unit=unit,
                   preset=("matrix_over", n, inner.preset),
                   basis_names=names, check=False)


def tensor_algebra(a: Algebra, b: Algebra) -> Algebra:
    if a.field is not b.field:
        raise AlgebraError("tensor factors must share a field")
    field = a.field
    dim = a.dim * b.dim

    def idx(i, j):
        return i * b.dim + j

    zero = field.zero
    table = [[[zero] * dim for _ in range(dim)] for _ in range(dim)]
    for i in range(a.dim):
        for j in range(b.dim):
            for k in range(a.dim):
                for l in range(b.dim):
                    pa = a.table[i][k]
                    pb = b.table[j][l]
                    row = table[idx(i, j)][idx(k, l)]
                    for m, ca in enumerate(pa):
                        if field.is_zero(ca):
                            continue
                        for p, cb in enumerate(pb):
                            if not field.is_zero(cb):
                                row[idx(m, p)] = row[idx(m, p)] + ca * cb
    unit = [zero] * dim
    for i, ca in enumerate(a.unit):
        for j, cb in enumerate(b.unit):
            unit[idx(i, j)] = ca * cb
    names = tuple(
        f"{a.basis_names[i]}(x){b.basis_names[j]}"
        for i in range(a.dim) for j in range(b.dim)
    )
    return Algebra(field, dim, table, unit=unit,
                   preset=("tensor", a.preset, b.preset),
                   basis_names=names, check=False)


# ---------------------------------------------------------------------------
# involutions


@dataclass
class InvolutionProfile:
    kind: str  # "first" | "second"
    type_: str | None  # "orthogonal" | "symplectic" | "unitary" | None
    sym_dim: int | None = None


class Involution:
    """F-linear anti-automorphism of order <= 2, as a matrix on the basis."""

    def __init__(self, algebra: Algebra, rows, check: bool = True):
        self.algebra = algebra
        field = algebra.field
        self.rows = [
            [field.coerce(c) for c in row] for row in rows
        ]
        if len(self.rows) != algebra.dim or any(
            len(r) != algebra.dim for r in self.rows
        ):
            raise AlgebraError("involution matrix must be dim x dim")
        if check:
            self.validate()

    def apply(self, x):
        return tuple(linalg.mat_vec(self.rows, list(x), self.algebra.field))

    def validate(self):
        alg = self.algebra
        if self.apply(alg.unit) != alg.unit:
            raise AlgebraError("involution must fix the unit")
        square = linalg.mat_mul(self.rows, self.rows, alg.field)
        ident = linalg.identity(alg.dim, alg.field)
        if square != ident:
            raise AlgebraError("involution must square to the identity")
        for i in range(alg.dim):
            bi = alg.basis_vector(i)
            si = self.apply(bi)
            for j in range(alg.dim):
                bj = alg.basis_vector(j)
                lhs = self.apply(alg.mul(bi, bj))
                rhs = alg.mul(self.apply(bj), si)
                if lhs != rhs:
                    raise AlgebraError(
                        f"anti-multiplicativity fails on basis pair {i},{j}"
                    )

    def fixed_space_basis(self):
        field = self.algebra.field
        n = self.algebra.dim
        ident = linalg.identity(n, field)
        diff = [
            [self.rows[k][i] - ident[k][i] for i in range(n)] for k in range(n)
        ]
        return linalg.kernel_basis(diff, field)

    def symd_contains_unit(self):
        """Solve x + sigma(x) = 1; None if the unit is outside the image."""
        field = self.algebra.field
        n = self.algebra.dim
        ident = linalg.identity(n, field)
        mat = [
            [self.rows[k][i] + ident[k][i] for i in range(n)] for k in range(n)
        ]
        return linalg.solve(mat, list(self.algebra.unit), field)

    def classify(self) -> InvolutionProfile:
        alg = self.algebra
        center = alg.center_basis()
        fixes_center = all(self.apply(z) == tuple(z) for z in center)
        kind = "first" if fixes_center else "second"
        if kind == "second":
            return InvolutionProfile(kind, "unitary")
        if len(center) != 1:
            return InvolutionProfile(kind, None)
        deg = math.isqrt(alg.dim)
        if deg * deg != alg.dim:
            return InvolutionProfile(kind, None)
        sym_dim = len(self.fixed_space_basis())
        if alg.field.char == 2:
            type_ = "symplectic" if self.symd_contains_unit() else "orthogonal"
            return InvolutionProfile(kind, type_, sym_dim)
        if 2 * sym_dim == deg * (deg + 1):
            return InvolutionProfile(kind, "orthogonal", sym_dim)
        if 2 * sym_dim == deg * (deg - 1):
            return InvolutionProfile(kind, "symplectic", sym_dim)
        return InvolutionProfile(kind, None, sym_dim)


def classify_involution(algebra: Algebra, sigma: Involution) -> InvolutionProfile:
    if sigma.algebra is not algebra:
        raise AlgebraError("involution belongs to a different algebra")
    return sigma.classify()


def involution_from_images(algebra: Algebra, images, check: bool = True):
    field = algebra.field
    cols = [algebra.coerce_vec(img) for img in images]
    rows = [
        [cols[i][k] for i in range(algebra.dim)] for k in range(algebra.dim)
    ]
    return Involution(algebra, rows, check=check)


def transpose_involution(alg: Algebra) -> Involution:
    if not (alg.preset and alg.preset[0] == "matrix"):
        raise AlgebraError("transpose needs a matrix preset")
    n = alg.preset[1]
    images = []
    for i in range(n):
        for j in range(n):
            images.append(alg.basis_vector(j * n + i))
    return involution_from_images(alg, images, check=False)


def conjugation_involution(alg: Algebra) -> Involution:
    if not (alg.preset and alg.preset[0] == "quaternion"):
        raise AlgebraError("conjugation needs a quaternion preset")
    field = alg.field
    one, zero = field.one, field.zero
    rows = [
        [one, zero, zero, zero],
        [zero, -one, zero, zero],
        [zero, zero, -one, zero],
        [zero, zero, zero, -one],
    ]
    return Involution(alg, rows, check=False)


def quadratic_conjugation(alg: Algebra) -> Involution:
    """Nontrivial algebra automorphism of F[t]/(t^2+bt+c) as an involution:
    t -> -b - t.  (Commutative, so automorphism = anti-automorphism.)"""
    if not (alg.preset and alg.preset[0] == "quadratic"):
        raise AlgebraError("needs a quadratic preset")
    b = alg.preset[1]
    field = alg.field
    images = [alg.unit, (-b, -field.one)]
    return involution_from_images(alg, images, check=False)


def tensor_involution(tensor: Algebra, sa: Involution, sb: Involution) -> Involution:
    field = tensor.field
    da = sa.algebra.dim
    db = sb.algebra.dim
    if tensor.dim != da * db:
        raise AlgebraError("tensor algebra dimension mismatch")
    rows = [[field.zero] * tensor.dim for _ in range(tensor.dim)]
    for k in range(da):
        for l in range(db):
            for i in range(da):
                for j in range(db):
                    rows[k * db + l][i * db + j] = (
                        sa.rows[k][i] * sb.rows[l][j]
                    )
    return Involution(tensor, rows, check=False)


def conjugation_by_unit(alg: Algebra, u) -> list:
    """Matrix rows of x -> u x u^{-1}; raises if u is not invertible."""
    u_inv = alg.inverse(u)
    if u_inv is None:
        raise AlgebraError("conjugating element is not invertible")
    cols = [
        alg.mul(alg.mul(u, alg.basis_vector(j)), u_inv)
        for j in range(alg.dim)
    ]
    return [[cols[j][k] for j in range(alg.dim)] for k in range(alg.dim)]


def involution_norm(alg: Algebra, sigma: Involution, x):
    """x * sigma(x); lands in the symmetric elements."""
    return alg.mul(x, sigma.apply(x))


# ---------------------------------------------------------------------------
# linear algebra over a (possibly noncommutative) coefficient algebra


class _WrappedElement:
    """Algebra element with operator syntax; division means right-inverse
    multiplication and is only used as (one / x) inside elimination."""

    __slots__ = ("alg", "vec")

    def __init__(self, alg, vec):
        self.alg = alg
        self.vec = tuple(vec)

    def __add__(self, other):
        return _WrappedElement(self.alg, self.alg.add(self.vec, other.vec))

    def __sub__(self, other):
        return _WrappedElement(self.alg, self.alg.sub(self.vec, other.vec))

    def __neg__(self):
        return _WrappedElement(self.alg, self.alg.neg(self.vec))

    def __mul__(self, other):
        return _WrappedElement(self.alg, self.alg.mul(self.vec, other.vec))

    def __truediv__(self, other):
        inv = self.alg.inverse(other.vec)
        if inv is None:
            raise ZeroDivisionError("element is not invertible")
        return _WrappedElement(self.alg, self.alg.mul(self.vec, inv))

    def __eq__(self, other):
        return isinstance(other, _WrappedElement) and self.vec == other.vec

    def __hash__(self):
        return hash(self.vec)

    def __repr__(self):
        return f"w{self.vec!r}"


class _WrappedField:
    """Field-protocol adapter so linalg routines run over an algebra."""

    def __init__(self, alg):
        self.alg = alg
        self.zero = _WrappedElement(alg, alg.zero_vec())
        self.one = _WrappedElement(alg, alg.unit)

    def is_zero(self, w):
        return self.alg.is_zero_vec(w.vec)


def d_matrix_mul(alg: Algebra, a, b):
    n = len(a)
    m = len(b[0])
    inner = len(b)
    out = [[alg.zero_vec() for _ in range(m)] for _ in range(n)]
    for i in range(n):
        for k in range(inner):
            if alg.is_zero_vec(a[i][k]):
                continue
            for j in range(m):
                out[i][j] = alg.add(out[i][j], alg.mul(a[i][k], b[k][j]))
    return out


def d_matrix_inverse(alg: Algebra, a):
    wf = _WrappedField(alg)
    wrapped = [[_WrappedElement(alg, c) for c in row] for row in a]
    inv = linalg.invert(wrapped, wf)
    if inv is None:
        return None
    return [[w.vec for w in row] for row in inv]


def d_solve(alg: Algebra, rows, rhs):
    """Solve sum_j rows[k][j] c_j = rhs_k over the algebra.

    Entries multiply the unknowns from the left; this is the coordinate
    convention of right modules, and all elimination steps in ``rref`` are
    left-multiplications, so the routine stays sound over a noncommutative
    coefficient algebra."""
    wf = _WrappedField(alg)
    wrapped = [[_WrappedElement(alg, c) for c in row] for row in rows]
    wrhs = [_WrappedElement(alg, c) for c in rhs]
    sol = linalg.solve(wrapped, wrhs, wf)
    if sol is None:
        return None
    return [w.vec for w in sol]


# ---------------------------------------------------------------------------
# module norms over (D, w)


class ModuleNorm:
    """Norm on a free right D-module V = D^m with a D-splitting base.

    ``w`` is a Norm on D's coordinate space over F whose splitting base
    doubles as the homogeneous D-basis used for End constructions;
    evaluation only uses w as a value function.
    """

    def __init__(self, algebra: Algebra, w: Norm, m: int, base, values):
        self.algebra = algebra
        self.w = w
        self.m = m
        self.base = [tuple(algebra.coerce_vec(c) for c in vec) for vec in base]
        self.values = list(values)
        if len(self.base) != m or len(self.values) != m:
            raise AlgebraError("need one base vector and value per dimension")

    @classmethod
    def standard(cls, algebra: Algebra, w: Norm, m: int, values=None):
        if values is None:
            values = [Value.zero(algebra.field.rank)] * m
        base = []
        for i in range(m):
            vec = [algebra.zero_vec()] * m
            vec[i] = algebra.unit
            base.append(tuple(vec))
        return cls(algebra, w, m, base, values)

    def expand(self, x):
        x = [self.algebra.coerce_vec(c) for c in x]
        rows = [
            [self.base[i][j] for i in range(self.m)] for j in range(self.m)
        ]
        sol = d_solve(self.algebra, rows, x)
        if sol is None:
            raise AlgebraError("vector outside the span of the base")
        return sol

    def evaluate(self, x):
        coords = self.expand(x)
        out = INFINITY
        for c, gamma in zip(coords, self.values):
            if not self.algebra.is_zero_vec(c):
                out = vmin(out, gamma + self.w.evaluate(c))
        return out


def end_value_function(alpha: ModuleNorm):
    """(End algebra, its norm): base maps e_j -> e_i d_b with values
    gamma_i + delta_b - gamma_j, conjugated into standard coordinates."""
    D = alpha.algebra
    m = alpha.m
    w = alpha.w
    end_alg = matrix_over(D, m)
    # change of base: columns are alpha's base vectors
    P = [[alpha.base[i][j] for i in range(m)] for j in range(m)]
    P_inv = d_matrix_inverse(D, P)
    if P_inv is None:
        raise AlgebraError("module base is not invertible")
    base_vectors = []
    values = []
    for i in range(m):
        for j in range(m):
            for b in range(len(w.base)):
                d_b = tuple(w.base[b])
                E = [[D.zero_vec() for _ in range(m)] for _ in range(m)]
                E[i][j] = d_b
                M = d_matrix_mul(D, d_matrix_mul(D, P, E), P_inv)
                coords = []
                for r in range(m):
                    for s in range(m):
                        coords.extend(M[r][s])
                base_vectors.append(tuple(coords))
                values.append(alpha.values[i] + w.values[b] - alpha.values[j])
    norm = Norm(D.field, end_alg.dim, base_vectors, values)
    return end_alg, norm


def end_norm_of_field_norm(alpha: Norm):
    """End norm when the coefficient algebra is the base field itself."""
    D = field_as_algebra(alpha.field)
    w = Norm.standard(alpha.field, 1)
    base = [tuple((c,) for c in vec) for vec in alpha.base]
    module = ModuleNorm(D, w, alpha.dim, base, list(alpha.values))
    return end_value_function(module)


# ---------------------------------------------------------------------------
# hermitian forms


class HermitianForm:
    """h(x, y) = sum_ij theta(x_i) G_ij y_j on V = D^m."""

    def __init__(self, algebra: Algebra, theta: Involution, gram,
                 skew: bool = False, check: bool = True):
        self.algebra = algebra
        self.theta = theta
        self.gram = [
            [algebra.coerce_vec(c) for c in row] for row in gram
        ]
        self.m = len(self.gram)
        self.skew = skew
        if any(len(row) != self.m for row in self.gram):
            raise AlgebraError("Gram matrix must be square")
        if check:
            self.validate()

    def validate(self):
        for i in range(self.m):
            for j in range(self.m):
                want = self.theta.apply(self.gram[i][j])
                have = self.gram[j][i]
                if self.skew:
                    have = self.algebra.neg(have)
                if tuple(want) != tuple(have):
                    raise AlgebraError("Gram matrix fails hermitian symmetry")

    def apply(self, x, y):
        alg = self.algebra
        out = alg.zero_vec()
        for i in range(self.m):
            xi = self.theta.apply(alg.coerce_vec(x[i]))
            for j in range(self.m):
                yj = alg.coerce_vec(y[j])
                out = alg.add(out, alg.mul(alg.mul(xi, self.gram[i][j]), yj))
        return out

    def gram_inverse(self):
        return d_matrix_inverse(self.algebra, self.gram)

    def is_nondegenerate(self):
        return self.gram_inverse() is not None

    def adjoint_involution(self, end_alg: Algebra | None = None):
        """Involution f -> G^{-1} theta(f)^T G on M_m(D)."""
        alg = self.algebra
        g_inv = self.gram_inverse()
        if g_inv is None:
            raise AlgebraError("degenerate hermitian form has no adjoint")
        if end_alg is None:
            end_alg = matrix_over(alg, self.m)
        d = alg.dim
        m = self.m
        images = []
        for i in range(m):
            for j in range(m):
                for b in range(d):
                    F = [[alg.zero_vec() for _ in range(m)] for _ in range(m)]
                    F[i][j] = alg.basis_vector(b)
                    Ft = [
                        [self.theta.apply(F[s][r]) for s in range(m)]
                        for r in range(m)
                    ]
                    M = d_matrix_mul(alg, d_matrix_mul(alg, g_inv, Ft), self.gram)
                    coords = []
                    for r in range(m):
                        for s in range(m):
                            coords.extend(M[r][s])
                    images.append(tuple(coords))
        # skew forms use the same formula: the two sign flips cancel
        return end_alg, involution_from_images(end_alg, images)

    def dual_module_norm(self, alpha: ModuleNorm) -> ModuleNorm:
        """Dual base e^#_i with h(e^#_i, e_j) = delta_ij; values -gamma_i."""
        alg = self.algebra
        m = self.m
        B = [[alpha.base[i][j] for i in range(m)] for j in range(m)]  # columns
        M = d_matrix_mul(alg, self.gram, B)
        N = d_matrix_inverse(alg, M)
        if N is None:
            raise AlgebraError("degenerate pairing; no dual base")
        base = []
        for i in range(m):
            vec = tuple(self.theta.apply(N[i][k]) for k in range(m))
            base.append(vec)
        dual = ModuleNorm(alg, alpha.w, m, base, [-g for g in alpha.values])
        # certify the defining adjunction on all base pairs
        for i in range(m):
            for j in range(m):
                val = self.apply(dual.base[i], alpha.base[j])
                want = alg.unit if i == j else alg.zero_vec()
                if tuple(val) != tuple(want):
                    raise AlgebraError("dual base certification failed")
        return dual


# ---------------------------------------------------------------------------
# reduced norms on quaternion presets


def legendre_symbol(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def _split_p(x: Fraction, p: int):
    n = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        n += 1
    while den % p == 0:
        den //= p
        n -= 1
    return n, Fraction(num, den)


def hilbert_symbol(a, b, p) -> int:
    """(a, b)_p over the p-adic rationals; p = 0 means the real place."""
    a = Fraction(a)
    b = Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero entries")
    if p == 0:
        return -1 if a < 0 and b < 0 else 1
    alpha, u = _split_p(a, p)
    beta, w = _split_p(b, p)
    if p != 2:
        un = u.numerator * u.denominator
        wn = w.numerator * w.denominator
        eps = (p - 1) // 2
        out = (-1) ** (alpha * beta * eps)
        out *= legendre_symbol(un, p) ** (beta % 2)
        out *= legendre_symbol(wn, p) ** (alpha % 2)
        return out

    def unit_mod8(x: Fraction) -> int:
        n = x.numerator % 8
        d = x.denominator % 8
        return (n * pow(d, -1, 8)) % 8

    uu = unit_mod8(u)
    ww = unit_mod8(w)
    eps_u = (uu - 1) // 2 % 2
    eps_w = (ww - 1) // 2 % 2
    omega_u = (uu * uu - 1) // 8 % 2
    omega_w = (ww * ww - 1) // 8 % 2
    exp = eps_u * eps_w + alpha * omega_w + beta * omega_u
    return (-1) ** (exp % 2)


@dataclass
class NormValuationReport:
    values_on_basis: list
    certificate: dict
    is_valuation: bool | None
    counterexample: tuple | None


class ReducedNormValue:
    """Candidate w(z) = (1/2) v(Nrd z) on a quaternion preset."""

    def __init__(self, alg: Algebra):
        if not (alg.preset and alg.preset[0] == "quaternion"):
            raise AlgebraError("reduced-norm valuations need a quaternion preset")
        self.alg = alg
        self.field = alg.field
        self.a = alg.preset[1]
        self.b = alg.preset[2]

    def reduced_norm(self, z):
        z = self.alg.coerce_vec(z)
        z0, z1, z2, z3 = z
        return (
            z0 * z0 - self.a * z1 * z1 - self.b * z2 * z2
            + self.a * self.b * z3 * z3
        )

    def evaluate(self, z):
        n = self.reduced_norm(z)
        if self.field.is_zero(n):
            return INFINITY
        return self.field.valuate(n).scale(Fraction(1, 2))

    def basis_values(self):
        return [self.evaluate(self.alg.basis_vector(i)) for i in range(4)]

    def report(self, search_radius: int = 2) -> NormValuationReport:
        vals = self.basis_values()
        field = self.field
        if isinstance(field, RationalField) and field.p is not None:
            sym = hilbert_symbol(self.a, self.b, field.p)
            cert = {"kind": "hilbert", "p": field.p, "symbol": sym}
            if sym == -1:
                return NormValuationReport(vals, cert, True, None)
            counter = self._ultrametric_counterexample(search_radius)
            return NormValuationReport(vals, cert, False, counter)
        if isinstance(field, FunctionField):
            cosets = []
            for v in vals:
                if not any(
                    field.in_value_group(v - u) for u in cosets
                ):
                    cosets.append(v)
            cert = {"kind": "index_count", "cosets": len(cosets)}
            if len(cosets) == 4:
                # four distinct cosets: homogeneous products never cancel,
                # so the coordinate-min formula is multiplicative
                return NormValuationReport(vals, cert, True, None)
            return NormValuationReport(vals, cert, None, None)
        return NormValuationReport(vals, {"kind": "none"}, None, None)

    def _ultrametric_counterexample(self, radius: int):
        coeffs = range(-radius, radius + 1)
        pool = []
        for z0 in coeffs:
            for z1 in coeffs:
                for z2 in coeffs:
                    vec = (z0, z1, z2, 0)
                    if any(vec):
                        pool.append(self.alg.coerce_vec(vec))
        for x in pool:
            vx = self.evaluate(x)
            for y in pool:
                vy = self.evaluate(y)
                s = self.alg.add(x, y)
                if self.alg.is_zero_vec(s):
                    continue
                vs = self.evaluate(s)
                floor = min(vx, vy)
                if vs < floor:
                    return (x, y)
        return None


def reduced_norm_valuation(alg: Algebra) -> ReducedNormValue:
    return ReducedNormValue(alg)


# ---------------------------------------------------------------------------
# symmetric idempotents and corner algebras


def symmetric_idempotent_split(alg: Algebra, sigma: Involution):
    """A sigma-symmetric idempotent e with 0 != e != 1, with 1-e, or None.

    Searches the diagonal projection candidates of matrix presets; division
    presets report none by design (no nontrivial idempotents exist there
    once division-ness is certified elsewhere).
    """
    preset = alg.preset or ("",)
    candidates = []
    if preset[0] == "matrix":
        n = preset[1]
        for i in range(n):
            candidates.append(alg.basis_vector(i * n + i))
    elif preset[0] == "matrix_over":
        n = preset[1]
        d = alg.dim // (n * n)
        for i in range(n):
            e = [alg.field.zero] * alg.dim
            for b in range(d):
                e[(i * n + i) * d + b] = alg.unit[(i * n + i) * d + b]
            candidates.append(tuple(e))
    elif preset[0] in ("quaternion", "field"):
        return None
    for e in candidates:
        if alg.is_zero_vec(e) or e == alg.unit:
            continue
        if not alg.is_idempotent(e):
            continue
        if sigma.apply(e) == e:
            f = alg.sub(alg.unit, e)
            return e, f
    return None


@dataclass
class CornerAlgebra:
    algebra: Algebra
    inclusion: list  # rows: corner basis in ambient coordinates
    idempotent: tuple

    def include(self, x):
        field = self.algebra.field
        out = [field.zero] * len(self.inclusion[0])
        for c, row in zip(x, self.inclusion):
            if not field.is_zero(c):
                out = [o + c * r for o, r in zip(out, row)]
        return tuple(out)

    def restrict(self, ambient_vec, ambient: Algebra):
        coords = linalg.in_span(
            [list(r) for r in self.inclusion], list(ambient_vec),
            ambient.field,
        )
        if coords is None:
            raise AlgebraError("vector outside the corner")
        return tuple(coords)


def corner_algebra(alg: Algebra, e) -> CornerAlgebra:
    """e A e with unit e, presented on a basis of the corner subspace."""
    e = alg.coerce_vec(e)
    if not alg.is_idempotent(e):
        raise AlgebraError("corner needs an idempotent")
    spanning = [
        list(alg.mul(alg.mul(e, alg.basis_vector(i)), e))
        for i in range(alg.dim)
    ]
    basis = linalg.row_space_basis(spanning, alg.field)
    k = len(basis)
    rows = [list(b) for b in basis]
    table = []
    for x in basis:
        row = []
        for y in basis:
            prod = alg.mul(tuple(x), tuple(y))
            coords = linalg.in_span(rows, list(prod), alg.field)
            if coords is None:
                raise AlgebraError("corner is not multiplicatively closed")
            row.append(tuple(coords))
        table.append(tuple(row))
    unit_coords = linalg.in_span(rows, list(e), alg.field)
    if unit_coords is None:
        raise AlgebraError("idempotent outside its own corner")
    corner = Algebra(alg.field, k, table, unit=unit_coords,
                     preset=("corner",) + (alg.preset or ()), check=False)
    return CornerAlgebra(corner, [tuple(r) for r in rows], e)


def corner_involution(corner: CornerAlgebra, ambient: Algebra,
                      sigma: Involution) -> Involution:
    """Restriction of sigma to e A e; needs sigma(e) = e."""
    if sigma.apply(corner.idempotent) != corner.idempotent:
        raise AlgebraError("idempotent is not symmetric under the involution")
    images = []
    for row in corner.inclusion:
        img = sigma.apply(row)
        images.append(corner.restrict(img, ambient))
    return involution_from_images(corner.algebra, images, check=False)
