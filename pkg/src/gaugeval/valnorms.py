"""Value functions and norms on finite-dimensional spaces over valued fields.

A *value function* alpha on V sends nonzero vectors to the value group and 0
to INFINITY, with alpha(x+y) >= min(alpha(x), alpha(y)) and
alpha(x c) = alpha(x) + v(c).  A *norm* is a value function admitting a
splitting base (e_i): alpha(sum e_i c_i) = min_i (alpha(e_i) + v(c_i)).

Norms here are always materialized with an explicit splitting base, which
keeps every later computation (graded pieces, duals, compositions) exact.
Two norms agree pointwise iff each one's min formula dominates on the other's
base, so norm equality is a finite check (``norms_equal``).
"""

from __future__ import annotations

from dataclasses import dataclass

from gaugeval import linalg
from gaugeval.ordvalues import INFINITY, ConvexSubgroup, Value, vmin
from gaugeval.valfields import (
    CoarsenedValuedField,
    FunctionField,
    ValuedField,
    coarsen_field,
)


class Norm:
    """A norm given by a splitting base inside the coordinate space F^dim.

    ``base`` may have fewer than ``dim`` vectors, in which case the norm
    lives on their span and evaluation outside the span is an error.
    """

    def __init__(self, field: ValuedField, dim: int, base, values, validate=True):
        self.field = field
        self.dim = dim
        self.base = [tuple(field.coerce(c) for c in vec) for vec in base]
        self.values = list(values)
        if len(self.base) != len(self.values):
            raise ValueError("one value per base vector")
        self.span_dim = len(self.base)
        self._inv = None
        if validate:
            if self.span_dim == dim:
                inv = linalg.invert([list(v) for v in self.base], field)
                if inv is None:
                    raise ValueError("base vectors are linearly dependent")
                # base rows B: x = c @ B, so c = x @ B^{-1}; keep B^{-1}
                self._inv = inv
            elif linalg.rank([list(v) for v in self.base], field) != self.span_dim:
                raise ValueError("base vectors are linearly dependent")

    @classmethod
    def standard(cls, field: ValuedField, dim: int, values=None) -> "Norm":
        if values is None:
            values = [Value.zero(field.rank)] * dim
        base = []
        for i in range(dim):
            vec = [field.zero] * dim
            vec[i] = field.one
            base.append(tuple(vec))
        out = cls(field, dim, base, values, validate=False)
        out._inv = linalg.identity(dim, field)
        return out

    def expand(self, x):
        """Coordinates of x in the splitting base."""
        x = [self.field.coerce(c) for c in x]
        if self._inv is not None:
            return linalg.mat_vec(linalg.transpose(self._inv), x, self.field)
        sol = linalg.solve(
            [list(col) for col in zip(*self.base)], x, self.field
        )
        if sol is None:
            raise ValueError("vector outside the span of the base")
        return sol

    def evaluate(self, x):
        coords = self.expand(x)
        out = INFINITY
        for c, gamma in zip(coords, self.values):
            if not self.field.is_zero(c):
                out = vmin(out, gamma + self.field.valuate(c))
        return out

    def residue_vector(self, x):
        """(level, entries) with entries in the residue field, indexed by the
        base; entry_i is the residue of the normalized i-th coordinate at the
        minimal level.  Zero vectors are rejected."""
        coords = self.expand(x)
        level = INFINITY
        vals = []
        for c, gamma in zip(coords, self.values):
            if self.field.is_zero(c):
                vals.append(None)
            else:
                v = gamma + self.field.valuate(c)
                vals.append(v)
                level = vmin(level, v)
        if level is INFINITY:
            raise ValueError("residue vector of the zero vector")
        kbar = self.field.residue_field
        entries = []
        for c, v in zip(coords, vals):
            if v is None or v > level:
                entries.append(kbar.zero)
            else:
                section = self.field.monomial_section(self.field.valuate(c))
                entries.append(self.field.residue(c / section))
        return level, entries

    def shift(self, gamma: Value) -> "Norm":
        out = Norm(self.field, self.dim, self.base, [v + gamma for v in self.values],
                   validate=False)
        out._inv = self._inv
        return out

    def with_field(self, new_field) -> "Norm":
        out = Norm(new_field, self.dim, self.base, list(self.values), validate=False)
        return out

    def value_set_cosets(self):
        """Base values grouped by coset of the field's value group."""
        groups = []
        for i, gamma in enumerate(self.values):
            for g in groups:
                if self.field.in_value_group(gamma - self.values[g[0]]):
                    g.append(i)
                    break
            else:
                groups.append([i])
        return groups

    def __repr__(self):
        return f"Norm(dim={self.dim}, values={self.values})"


def norm_geq(a: Norm, b: Norm) -> bool:
    """a(x) >= b(x) everywhere.  Finite: check a on b's splitting base.

    Sufficiency uses only the ultrametric inequality for a and the exact min
    formula for b, so the check is one-sided and sound in both directions."""
    return all(a.evaluate(vec) >= gamma for vec, gamma in zip(b.base, b.values))


def norms_equal(a: Norm, b: Norm) -> bool:
    """Pointwise equality of two norms via cross-evaluation of bases."""
    return norm_geq(a, b) and norm_geq(b, a)


def tensor_norm(a: Norm, b: Norm) -> Norm:
    """Norm on V (x) W with base e_i (x) f_j; index (i,j) -> i*dim(W)+j."""
    if a.field is not b.field:
        raise ValueError("tensor factors must share a field")
    field = a.field
    dim = a.dim * b.dim
    base, values = [], []
    for vec_a, ga in zip(a.base, a.values):
        for vec_b, gb in zip(b.base, b.values):
            tensor = [field.zero] * dim
            for i, xa in enumerate(vec_a):
                if field.is_zero(xa):
                    continue
                for j, xb in enumerate(vec_b):
                    tensor[i * b.dim + j] = xa * xb
            base.append(tuple(tensor))
            values.append(ga + gb)
    return Norm(field, dim, base, values, validate=False)


def restrict_norm(ambient: Norm, rows) -> Norm:
    """Splitting base of ambient restricted to the span of ``rows``.

    Valued echelon: work in expansion coordinates, fully eliminate the pivot
    coordinate of every accepted vector (value-safe because pivots support
    the minimum), then the residue vectors are echelon and hence graded
    independent.  Restriction of a norm is always a norm; no search.
    """
    field = ambient.field
    done = []  # (expansion coords, value, pivot index)
    for row in rows:
        c = ambient.expand(row)
        for d, _, pivot in done:
            f = c[pivot]
            if not field.is_zero(f):
                factor = f / d[pivot]
                c = [x - factor * y for x, y in zip(c, d)]
        if all(field.is_zero(x) for x in c):
            continue  # dependent row; span basis only
        level = INFINITY
        vals = []
        for x, gamma in zip(c, ambient.values):
            if field.is_zero(x):
                vals.append(None)
            else:
                v = gamma + field.valuate(x)
                vals.append(v)
                level = vmin(level, v)
        pivot = next(i for i, v in enumerate(vals) if v is not None and v == level)
        done.append((c, level, pivot))
    base = []
    for c, _, _ in done:
        vec = [field.zero] * ambient.dim
        for coeff, bvec in zip(c, ambient.base):
            if not field.is_zero(coeff):
                vec = [x + coeff * y for x, y in zip(vec, bvec)]
        base.append(tuple(vec))
    return Norm(field, ambient.dim, base, [lv for _, lv, _ in done])


# ---------------------------------------------------------------------------
# composition with a convex subgroup


@dataclass
class CompositionReport:
    """beta = (quotient map) . alpha together with its finer components."""

    sub: ConvexSubgroup
    coarse_field: CoarsenedValuedField
    beta: Norm
    component_indices: list
    components: list  # Norms over the u-valued residue field of (F, w)

    def dimension_identity(self) -> bool:
        return sum(n.span_dim for n in self.components) == self.beta.span_dim

    def beta_matches(self, alpha: Norm, vectors) -> bool:
        """beta agrees with (quotient map) . alpha on the given vectors."""
        for x in vectors:
            got = self.beta.evaluate(x)
            want = alpha.evaluate(x)
            if want is not INFINITY:
                want = self.sub.zero_tail(want)
            if got != want:
                return False
        return True


def coarsen_norm(alpha: Norm, sub: ConvexSubgroup) -> CompositionReport:
    """Compose alpha with the quotient by a convex subgroup.

    Returns the coarse norm beta (same base, tail-zeroed values, coarse
    valuation on coefficients) and one component norm per coset of coarse
    base values; the component for a coset lives over the residue field of
    (F, w) with its finer valuation and keeps the full fine values, one
    representative coset at a time.
    """
    W = coarsen_field(alpha.field, sub)
    beta_vals = [sub.zero_tail(v) for v in alpha.values]
    beta = Norm(W, alpha.dim, alpha.base, beta_vals, validate=False)
    beta._inv = alpha._inv
    # group base indices by coset of the coarse value group
    groups = []
    for i in range(len(alpha.base)):
        placed = False
        for g in groups:
            if W.in_value_group(beta_vals[i] - beta_vals[g[0]]):
                g.append(i)
                placed = True
                break
        if not placed:
            groups.append([i])
    R = W.residue_field
    components = []
    for g in groups:
        lam = beta_vals[g[0]]
        vals = []
        for i in g:
            section = W.monomial_section(beta_vals[i] - lam)
            vals.append(alpha.values[i] - alpha.field.valuate(section))
        components.append(Norm.standard(R, len(g), vals))
    return CompositionReport(sub, W, beta, groups, components)


# ---------------------------------------------------------------------------
# the deliberate non-norm: a dense 2-dimensional subspace


class LacunarySpanFunction:
    """Value function on F^2 given by (c1,c2) -> value of c1 + c2*s.

    Here F is a monomial-valued rational function field, one designated
    variable y plays the role of a series variable, and
    s = sum_{n>=1} y^(n(n+1)/2) is a lacunary (hence irrational) series.
    F sits densely (in the y-direction) inside its Laurent completion, so the
    graded space of the span of (1, s) collapses to dimension 1: this value
    function is *not* a norm, and it carries its own defect certificate in
    the form of a collapse chain of approximants with growing values.
    """

    MAX_SCAN = 10000

    def __init__(self, field: FunctionField, series_var: int | None = None):
        self.field = field
        self.dim = 2
        if series_var is None:
            series_var = len(field.variables) - 1
        self.series_var = series_var
        self.gamma_y = field.weights[series_var]
        if not self.gamma_y > Value.zero(field.rank):
            raise ValueError("series variable must have positive weight")

    # --- series helpers
    @staticmethod
    def triangular(n: int) -> int:
        return n * (n + 1) // 2

    def partial_sum(self, k: int):
        y = self.field.gen(self.series_var)
        out = self.field._field.zero
        for n in range(1, k + 1):
            out = out + y ** self.triangular(n)
        return out

    def _split_terms(self, poly):
        """map: y-exponent -> list of (other-exponent tuple, coeff)."""
        out = {}
        for mono, coeff in poly.terms():
            j = mono[self.series_var]
            rest = tuple(
                e for i, e in enumerate(mono) if i != self.series_var
            )
            out.setdefault(j, []).append((rest, coeff))
        return out

    def _rest_value(self, rest_mono):
        acc = Value.zero(self.field.rank)
        pos = 0
        for i, w in enumerate(self.field.weights):
            if i == self.series_var:
                continue
            e = rest_mono[pos]
            pos += 1
            if e:
                acc = acc + w.scale(e)
        return acc

    def _series_value(self, p_terms, q_terms):
        """Value of P + Q*s as an iterated Laurent series, exactly."""
        # coefficient of y^j is P_j + sum_{T_n <= j} Q_{j - T_n}
        max_p = max(p_terms, default=-1)
        max_q = max(q_terms, default=-1)
        if max_p < 0 and max_q < 0:
            return INFINITY
        floor = None  # global lower bound for rest-values of any coefficient
        for terms in list(p_terms.values()) + list(q_terms.values()):
            for rest, _ in terms:
                rv = self._rest_value(rest)
                if floor is None or rv < floor:
                    floor = rv
        best = INFINITY
        j = 0
        while j <= self.MAX_SCAN:
            stop_bound = floor + self.gamma_y.scale(j)
            if best is not INFINITY and stop_bound > best:
                break
            bucket = {}
            for rest, coeff in p_terms.get(j, []):
                bucket[rest] = bucket.get(rest, 0) + coeff
            n = 1
            while self.triangular(n) <= j:
                for rest, coeff in q_terms.get(j - self.triangular(n), []):
                    bucket[rest] = bucket.get(rest, 0) + coeff
                n += 1
            for rest, coeff in bucket.items():
                if coeff:
                    v = self._rest_value(rest) + self.gamma_y.scale(j)
                    best = vmin(best, v)
            j += 1
        else:
            raise AssertionError("series scan exceeded MAX_SCAN; unexpected input")
        return best

    def evaluate(self, vec):
        c1 = self.field.coerce(vec[0])
        c2 = self.field.coerce(vec[1])
        if self.field.is_zero(c1) and self.field.is_zero(c2):
            return INFINITY
        p = c1.numer * c2.denom
        q = c2.numer * c1.denom
        den = c1.denom * c2.denom
        num_val = self._series_value(self._split_terms(p), self._split_terms(q))
        return num_val - self.field._poly_valuation(den)

    # --- certificate
    def collapse_chain(self, length: int = 5):
        """Vectors w_k = (partial_sum(k), -1) with strictly growing values,
        all congruent modulo the line spanned by e_1: the graded image of
        e_2 falls into the graded line of e_1 at every level, so the graded
        dimension is 1 < 2."""
        chain = []
        for k in range(length):
            vec = (self.partial_sum(k), self.field.coerce(-1))
            chain.append((vec, self.evaluate(vec)))
        return chain

    def defect_certificate(self) -> dict:
        chain = self.collapse_chain()
        values = [repr(v) for _, v in chain]
        return {
            "kind": "dense_span_collapse",
            "collapse_values": values,
            "graded_dimension": 1,
            "space_dimension": 2,
        }

    def coarse_norm(self, sub: ConvexSubgroup) -> Norm:
        """The composition with the quotient by ``sub`` when the series
        variable lies inside the subgroup: the series residue is irrational
        over the coarse residue field, so (e1, e2) is a coarse splitting
        base with values 0."""
        if not sub.contains(self.gamma_y):
            raise ValueError("series variable must lie in the subgroup")
        W = coarsen_field(self.field, sub)
        return Norm.standard(W, 2)

    def component_rules(self, sub: ConvexSubgroup):
        """Component value functions of the coarse composition: the single
        component (both coarse values are 0) is the dense-span rule over the
        residue field of (F,w) with its finer valuation."""
        W = coarsen_field(self.field, sub)
        R = W.residue_field
        idx = R.variables.index(self.field.variables[self.series_var])
        return [LacunarySpanFunction(R, series_var=idx)]


# ---------------------------------------------------------------------------
# norm checking


@dataclass
class NormCheck:
    is_norm: bool | None
    norm: Norm | None = None
    witness: dict | None = None
    reason: str = ""


def check_norm(vf, rows=None, budget: int = 1 << 16) -> NormCheck:
    """Decide whether a value function is a norm.

    Dispatch: explicit Norm objects are norms by construction; restrictions
    are computed by the valued echelon; rules carrying a defect certificate
    report it; everything else falls back to a budgeted search over finite
    residue fields (may return ``is_norm=None`` for undecided).
    """
    if isinstance(vf, Norm):
        if rows is not None:
            restricted = restrict_norm(vf, rows)
            return NormCheck(True, restricted, reason="restriction of a norm")
        return NormCheck(True, vf, reason="explicit splitting base")
    if hasattr(vf, "defect_certificate"):
        return NormCheck(
            False,
            None,
            witness=vf.defect_certificate(),
            reason="carries a defect certificate",
        )
    return _check_norm_generic(vf, budget)


def _check_norm_generic(vf, budget: int) -> NormCheck:
    """Greedy splitting-base search for a black-box value function.

    Needs a finite residue field; reduction candidates are enumerated at the
    residue level.  A reduction chain that exceeds the budget is reported as
    undecided, never as a verdict.
    """
    field = vf.field
    kbar = field.residue_field
    if not kbar.is_finite:
        return NormCheck(None, reason="generic search needs a finite residue field")
    dim = vf.dim
    basis = []
    for i in range(dim):
        vec = [field.zero] * dim
        vec[i] = field.one
        basis.append(vec)
    accepted = []  # (vector, value)
    steps = 0
    for vec in basis:
        current = list(vec)
        while True:
            steps += 1
            if steps > budget:
                return NormCheck(None, reason="budget exceeded during reduction")
            gamma = vf.evaluate(current)
            if gamma is INFINITY:
                break
            candidates = [
                (bvec, bval)
                for bvec, bval in accepted
                if field.in_value_group(gamma - bval)
            ]
            improved = None
            for combo in _residue_combinations(kbar, len(candidates)):
                if all(kbar.is_zero(c) for c in combo):
                    continue
                trial = list(current)
                for (bvec, bval), cbar in zip(candidates, combo):
                    if kbar.is_zero(cbar):
                        continue
                    c = field.lift(cbar) * field.monomial_section(gamma - bval)
                    trial = [t - c * b for t, b in zip(trial, bvec)]
                if vf.evaluate(trial) > gamma:
                    improved = trial
                    break
            if improved is None:
                accepted.append((tuple(current), gamma))
                break
            current = improved
    if len(accepted) == dim:
        norm = Norm(field, dim, [v for v, _ in accepted], [g for _, g in accepted])
        return NormCheck(True, norm, reason="greedy search found a splitting base")
    return NormCheck(None, reason="reduction stalled without a certificate")


def _residue_combinations(kbar, n):
    if n == 0:
        return
    elems = list(kbar.elements())

    def rec(prefix):
        if len(prefix) == n:
            yield list(prefix)
            return
        for e in elems:
            yield from rec(prefix + [e])

    yield from rec([])
