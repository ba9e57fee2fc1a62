"""Exactly valued fields.

Each field object bundles its element arithmetic with a valuation into a fixed
lex-ordered Q^rank, a residue field (itself a trivially valued field object),
a residue/lift pair, and an exactly multiplicative monomial section of the
value group.  The section is what later makes associated graded objects finite
and exact, so fields whose section cannot be made multiplicative are rejected
at construction instead of producing approximate gradings.

Supported kinds: Q (p-adic or trivial), finite fields F_p and F_p^d (trivially
valued), rational function fields k(x_1..x_s) with monomial valuations whose
weight vectors are Q-linearly independent, quadratic extensions with an
unramified or tamely ramified certificate, and coarsenings of any of these by
a convex subgroup of the value group.
"""

from __future__ import annotations

import math
from fractions import Fraction

from sympy.polys.domains import GF, QQ
from sympy.polys.fields import field as _sympy_field

from gaugeval import linalg
from gaugeval.ordvalues import INFINITY, ConvexSubgroup, Value, ValueInfinity, vmin


class NotInValueGroupError(ValueError):
    pass


class UnsupportedFieldError(ValueError):
    pass


class _FractionProtocol:
    """linalg field protocol for plain Fractions."""

    zero = Fraction(0)
    one = Fraction(1)

    @staticmethod
    def is_zero(a):
        return a == 0


QQ_PROTO = _FractionProtocol()


def fraction_padic_valuation(x: Fraction, p: int) -> int:
    if x == 0:
        raise ZeroDivisionError("valuation of zero")
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


# ---------------------------------------------------------------------------
# finite field elements


class FFElement:
    """Element of F_p[x]/(modulus), stored as a coefficient tuple."""

    __slots__ = ("parent", "coeffs")

    def __init__(self, parent, coeffs):
        self.parent = parent
        self.coeffs = tuple(c % parent.p for c in coeffs)

    def _check(self, other):
        if isinstance(other, int):
            return self.parent.coerce(other)
        if isinstance(other, FFElement) and other.parent is self.parent:
            return other
        return None

    def __add__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return FFElement(self.parent, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return FFElement(self.parent, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return FFElement(self.parent, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self.parent._mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.parent.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return self ** (self.parent.size - 2)

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def __eq__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.parent.p, self.parent.modulus, self.coeffs))

    def __repr__(self):
        if self.parent.degree == 1:
            return str(self.coeffs[0])
        name = self.parent.gen_name
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                head = "" if c == 1 else f"{c}*"
                parts.append(f"{head}{name}" + (f"^{i}" if i > 1 else ""))
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# base class


class ValuedField:
    """Common interface; see module docstring for the contract."""

    rank: int

    # --- elements
    def coerce(self, x):
        raise NotImplementedError

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def is_zero(self, a) -> bool:
        raise NotImplementedError

    # --- valuation data
    def valuate(self, a):
        raise NotImplementedError

    def residue(self, a):
        raise NotImplementedError

    def lift(self, r):
        raise NotImplementedError

    @property
    def residue_field(self) -> "ValuedField":
        raise NotImplementedError

    def monomial_section(self, gamma):
        raise NotImplementedError

    def in_value_group(self, gamma) -> bool:
        raise NotImplementedError

    def is_trivially_valued(self) -> bool:
        return False

    # --- metadata
    char: int
    residue_char: int
    is_finite = False
    # Declared, never decided: widens report wording only, computations
    # ignore it.  Trivially valued fields qualify automatically.
    henselian_like = False

    def elements(self):
        raise UnsupportedFieldError("element enumeration needs a finite field")

    def random_element(self, rng, complexity: int = 1):
        raise NotImplementedError

    def description(self) -> str:
        return type(self).__name__

    def zero_value(self):
        return Value.zero(self.rank)

    def __repr__(self):
        return self.description()


# ---------------------------------------------------------------------------
# rationals


class RationalField(ValuedField):
    """Q with a p-adic or trivial valuation into Q^rank (first coordinate)."""

    def __init__(self, p=None, rank: int = 1):
        if p is not None and (
            p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1))
        ):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.rank = rank
        self.char = 0
        self.residue_char = 0 if p is None else p
        self._residue_field = None

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, (int, str)):
            return Fraction(x)
        raise TypeError(f"cannot coerce {x!r} into Q")

    def is_zero(self, a):
        return a == 0

    def is_trivially_valued(self):
        return self.p is None

    def valuate(self, a):
        if a == 0:
            return INFINITY
        if self.p is None:
            return self.zero_value()
        m = fraction_padic_valuation(a, self.p)
        return Value((Fraction(m),) + (Fraction(0),) * (self.rank - 1))

    @property
    def residue_field(self):
        if self.p is None:
            return self
        if self._residue_field is None:
            self._residue_field = FiniteField(self.p, rank=self.rank)
        return self._residue_field

    def residue(self, a):
        if self.p is None:
            return a
        v = self.valuate(a)
        if v is INFINITY or v > self.zero_value():
            return self.residue_field.zero
        if v < self.zero_value():
            raise ValueError("residue of an element of negative valuation")
        num = a.numerator % self.p
        den = a.denominator % self.p
        return self.residue_field.coerce(num * pow(den, -1, self.p))

    def lift(self, r):
        if self.p is None:
            return r
        return Fraction(r.coeffs[0])

    def monomial_section(self, gamma):
        if not self.in_value_group(gamma):
            raise NotInValueGroupError(f"{gamma} not in the value group")
        if self.p is None:
            return Fraction(1)
        return Fraction(self.p) ** int(gamma.coords[0])

    def in_value_group(self, gamma):
        if isinstance(gamma, ValueInfinity) or gamma.rank != self.rank:
            return False
        if self.p is None:
            return gamma.is_zero()
        return gamma.coords[0].denominator == 1 and all(
            c == 0 for c in gamma.coords[1:]
        )

    def random_element(self, rng, complexity: int = 1):
        bound = 20 * complexity
        num = rng.randint(-bound, bound)
        den = rng.randint(1, bound)
        return Fraction(num, den)

    def description(self):
        if self.p is None:
            return "Q (trivial valuation)"
        return f"Q with {self.p}-adic valuation"


# ---------------------------------------------------------------------------
# finite fields


class FiniteField(ValuedField):
    """F_p or F_p[x]/(modulus), trivially valued.

    ``modulus`` is a monic coefficient tuple (c_0, ..., c_{d-1}, 1); omitted
    for the prime field.  Irreducibility is verified for degrees 2 and 3 by
    the root test.
    """

    def __init__(self, p: int, modulus=None, rank: int = 1, gen_name: str = "u"):
        if p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.rank = rank
        self.gen_name = gen_name
        if modulus is None:
            modulus = (0, 1)
        modulus = tuple(c % p for c in modulus[:-1]) + (modulus[-1],)
        if modulus[-1] != 1:
            raise ValueError("modulus must be monic")
        self.modulus = modulus
        self.degree = len(modulus) - 1
        if self.degree in (2, 3):
            for a in range(p):
                if self._eval_modulus(a) % p == 0:
                    raise ValueError("modulus has a root; not irreducible")
        elif self.degree > 3:
            raise UnsupportedFieldError("finite extension degree > 3")
        self.size = p**self.degree
        self.char = p
        self.residue_char = p
        self.is_finite = True

    def _eval_modulus(self, a):
        acc = 0
        for c in reversed(self.modulus):
            acc = acc * a + c
        return acc

    def coerce(self, x):
        if isinstance(x, FFElement) and x.parent is self:
            return x
        if isinstance(x, int):
            return FFElement(self, (x,) + (0,) * (self.degree - 1))
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError("denominator divisible by p")
            return self.coerce(x.numerator) / self.coerce(x.denominator)
        raise TypeError(f"cannot coerce {x!r} into {self.description()}")

    def from_coeffs(self, coeffs):
        coeffs = list(coeffs) + [0] * (self.degree - len(coeffs))
        return FFElement(self, coeffs)

    def _mul(self, a: FFElement, b: FFElement):
        d = self.degree
        raw = [0] * (2 * d - 1)
        for i, ai in enumerate(a.coeffs):
            if ai == 0:
                continue
            for j, bj in enumerate(b.coeffs):
                raw[i + j] += ai * bj
        # reduce x^k for k >= d using the monic modulus
        for k in range(2 * d - 2, d - 1, -1):
            c = raw[k] % self.p
            if c:
                for j in range(d):
                    raw[k - d + j] -= c * self.modulus[j]
            raw[k] = 0
        return FFElement(self, raw[:d])

    def is_zero(self, a):
        return a.is_zero()

    def is_trivially_valued(self):
        return True

    def valuate(self, a):
        return INFINITY if a.is_zero() else self.zero_value()

    @property
    def residue_field(self):
        return self

    def residue(self, a):
        return a

    def lift(self, r):
        return r

    def monomial_section(self, gamma):
        if not self.in_value_group(gamma):
            raise NotInValueGroupError(f"{gamma} not in the value group")
        return self.one

    def in_value_group(self, gamma):
        return isinstance(gamma, Value) and gamma.rank == self.rank and gamma.is_zero()

    def generator(self):
        return FFElement(self, (0, 1) + (0,) * (self.degree - 2))

    def elements(self):
        def rec(prefix):
            if len(prefix) == self.degree:
                yield FFElement(self, prefix)
                return
            for c in range(self.p):
                yield from rec(prefix + (c,))

        yield from rec(())

    def frobenius_root(self, a: FFElement):
        """The p-th root (inverse of Frobenius; finite fields are perfect)."""
        return a ** (self.p ** (self.degree - 1))

    def random_element(self, rng, complexity: int = 1):
        return FFElement(self, tuple(rng.randrange(self.p) for _ in range(self.degree)))

    def description(self):
        if self.degree == 1:
            return f"F_{self.p}"
        return f"F_{self.size} = F_{self.p}[{self.gen_name}]/({self._modulus_str()})"

    def _modulus_str(self):
        name = self.gen_name
        parts = []
        for i, c in enumerate(self.modulus):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*{name}" if c != 1 else name)
            else:
                parts.append(f"{c}*{name}^{i}" if c != 1 else f"{name}^{i}")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# rational function fields with monomial (Gauss) valuations


class FunctionField(ValuedField):
    """k(x_1..x_s) with v(sum c_m x^m) = min_m (m . weights), constants a unit.

    The weight vectors must be Q-linearly independent in Q^rank; then every
    polynomial has a single-monomial leading form, the Gauss formula is
    multiplicative, and the residue field is the constant field exactly.
    Elements are sympy FracElement objects (canonical gcd-reduced quotients).
    """

    def __init__(self, constants: ValuedField, variables, weights, rank: int):
        if not constants.is_trivially_valued():
            raise UnsupportedFieldError("constant field must be trivially valued")
        if len(variables) != len(weights):
            raise ValueError("one weight vector per variable")
        self.constants = constants
        self.variables = tuple(variables)
        self.weights = tuple(weights)
        self.rank = rank
        for w in weights:
            if w.rank != rank:
                raise ValueError("weight rank mismatch")
        wmat = [list(w.coords) for w in weights]
        if wmat and linalg.rank(wmat, QQ_PROTO) != len(weights):
            raise UnsupportedFieldError(
                "monomial weights must be Q-linearly independent"
            )
        if isinstance(constants, RationalField):
            domain = QQ
        elif isinstance(constants, FiniteField) and constants.degree == 1:
            domain = GF(constants.p)
        else:
            raise UnsupportedFieldError("constants must be Q or a prime field")
        self._domain = domain
        created = _sympy_field(",".join(self.variables), domain)
        self._field = created[0]
        self._gens = created[1:]
        self.char = constants.char
        self.residue_char = constants.char

    # --- sympy coefficient conversion
    def _const_to_coeff(self, c):
        if isinstance(self.constants, RationalField):
            c = self.constants.coerce(c) if not isinstance(c, Fraction) else c
            return self._domain(c.numerator, c.denominator)
        if isinstance(c, FFElement):
            return self._domain(c.coeffs[0])
        if isinstance(c, Fraction):
            if c.denominator != 1:
                return self._domain(c.numerator) / self._domain(c.denominator)
            c = c.numerator
        return self._domain(int(c))

    def _coeff_to_const(self, c):
        if isinstance(self.constants, RationalField):
            return Fraction(int(c.numerator), int(c.denominator))
        return self.constants.coerce(int(c))

    def gen(self, i=0):
        return self._gens[i]

    def coerce(self, x):
        if hasattr(x, "field") and getattr(x, "field", None) is self._field:
            return x
        if isinstance(x, (int, Fraction)):
            f = Fraction(x)
            return (
                self._field.one
                * self._const_to_coeff(f)
            )
        if isinstance(x, FFElement):
            return self._field.one * self._const_to_coeff(x)
        if isinstance(x, str):
            import sympy

            return self._field.from_expr(sympy.sympify(x))
        raise TypeError(f"cannot coerce {x!r} into {self.description()}")

    def is_zero(self, a):
        return not a

    def is_trivially_valued(self):
        return not self.variables

    def _mono_value(self, mono):
        acc = Value.zero(self.rank)
        for e, w in zip(mono, self.weights):
            if e:
                acc = acc + w.scale(e)
        return acc

    def _poly_valuation(self, poly):
        best = None
        for mono, _ in poly.terms():
            val = self._mono_value(mono)
            if best is None or val < best:
                best = val
        return best

    def _leading(self, poly):
        """(monomial, coefficient) of the unique value-minimal term."""
        best = None
        for mono, coeff in poly.terms():
            val = self._mono_value(mono)
            if best is None or val < best[0]:
                best = (val, mono, coeff)
        return best

    def valuate(self, a):
        if not a:
            return INFINITY
        return self._poly_valuation(a.numer) - self._poly_valuation(a.denom)

    @property
    def residue_field(self):
        return self.constants

    def residue(self, a):
        v = self.valuate(a)
        if v is INFINITY or v > self.zero_value():
            return self.constants.zero
        if v < self.zero_value():
            raise ValueError("residue of an element of negative valuation")
        _, mn, cn = self._leading(a.numer)
        _, md, cd = self._leading(a.denom)
        if mn != md:
            raise AssertionError("leading monomials must agree at valuation zero")
        num = self._coeff_to_const(cn)
        den = self._coeff_to_const(cd)
        return num / den

    def lift(self, r):
        return self._field.one * self._const_to_coeff(r)

    def _solve_weights(self, gamma):
        if not self.variables:
            return () if gamma.is_zero() else None
        wmat = [[w.coords[i] for w in self.weights] for i in range(self.rank)]
        sol = linalg.solve(wmat, list(gamma.coords), QQ_PROTO)
        if sol is None:
            return None
        if any(s.denominator != 1 for s in sol):
            return None
        return tuple(int(s) for s in sol)

    def monomial_section(self, gamma):
        exps = self._solve_weights(gamma)
        if exps is None:
            raise NotInValueGroupError(f"{gamma} not in the value group")
        elem = self._field.one
        for g, e in zip(self._gens, exps):
            if e:
                elem = elem * g**e
        return elem

    def in_value_group(self, gamma):
        if isinstance(gamma, ValueInfinity) or gamma.rank != self.rank:
            return False
        return self._solve_weights(gamma) is not None

    def random_element(self, rng, complexity: int = 1):
        def rand_poly():
            poly = self._field.zero
            for _ in range(rng.randint(1, 2 + complexity)):
                mono = self._field.one
                for g in self._gens:
                    mono = mono * g ** rng.randint(0, complexity)
                poly = poly + mono * self._const_to_coeff(
                    Fraction(rng.randint(-9, 9))
                    if self.char == 0
                    else rng.randrange(self.char)
                )
            return poly

        num = rand_poly()
        den = self._field.zero
        while not den:
            den = rand_poly()
        return num / den

    def description(self):
        base = "Q" if self.char == 0 else f"F_{self.char}"
        ws = " ".join(f"{v}:{w}" for v, w in zip(self.variables, self.weights))
        return f"{base}({', '.join(self.variables)}) with monomial valuation {ws}"


# ---------------------------------------------------------------------------
# quadratic extensions


class QEElement:
    """a0 + a1*t in a quadratic extension, t a root of x^2 + b x + c."""

    __slots__ = ("parent", "a0", "a1")

    def __init__(self, parent, a0, a1):
        self.parent = parent
        self.a0 = a0
        self.a1 = a1

    def _check(self, other):
        if isinstance(other, QEElement) and other.parent is self.parent:
            return other
        if isinstance(other, (int, Fraction)):
            return self.parent.coerce(other)
        try:
            base_elem = self.parent.base.coerce(other)
        except TypeError:
            return None
        return QEElement(self.parent, base_elem, self.parent.base.zero)

    def __add__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return QEElement(self.parent, self.a0 + o.a0, self.a1 + o.a1)

    __radd__ = __add__

    def __neg__(self):
        return QEElement(self.parent, -self.a0, -self.a1)

    def __sub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        b, c = self.parent.minpoly_b, self.parent.minpoly_c
        cross = self.a1 * o.a1
        return QEElement(
            self.parent,
            self.a0 * o.a0 - c * cross,
            self.a0 * o.a1 + self.a1 * o.a0 - b * cross,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def conjugate(self):
        b = self.parent.minpoly_b
        return QEElement(self.parent, self.a0 - b * self.a1, -self.a1)

    def norm(self):
        b, c = self.parent.minpoly_b, self.parent.minpoly_c
        return self.a0 * self.a0 - b * self.a0 * self.a1 + c * self.a1 * self.a1

    def trace(self):
        b = self.parent.minpoly_b
        return self.a0 + self.a0 - b * self.a1

    def inverse(self):
        n = self.norm()
        if self.parent.base.is_zero(n):
            raise ZeroDivisionError("inverse of zero")
        conj = self.conjugate()
        return QEElement(self.parent, conj.a0 / n, conj.a1 / n)

    def is_zero(self):
        base = self.parent.base
        return base.is_zero(self.a0) and base.is_zero(self.a1)

    def __eq__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self.a0 == o.a0 and self.a1 == o.a1

    def __hash__(self):
        return hash((id(self.parent), repr(self.a0), repr(self.a1)))

    def __repr__(self):
        return f"({self.a0}) + ({self.a1})*{self.parent.gen_name}"


class QuadraticExtension(ValuedField):
    """F[t]/(t^2 + b t + c) with the unique valuation extension when certified.

    Certificates:
      'trivial'    base trivially valued (extension trivially valued too);
      'unramified' residue polynomial separable irreducible over the residue
                   field; residue field extends, value group does not;
      'ramified'   b = 0, d := -c an exact monomial-section value with
                   v(d)/2 outside the value group, residue char != 2; the
                   value group gains v(d)/2, the residue field is unchanged.
      'split'      residue polynomial separable with roots in the residue
                   field: two distinct extensions exist; valuation methods
                   refuse to run and check_unique_extension reports the
                   counterexample.
    """

    def __init__(self, base: ValuedField, b, c, gen_name: str = "t"):
        self.base = base
        self.minpoly_b = base.coerce(b)
        self.minpoly_c = base.coerce(c)
        self.gen_name = gen_name
        self.rank = base.rank
        self.char = base.char
        self.residue_char = base.residue_char
        self.certificate = None
        self.split_witness = None
        self._residue_field = None
        self.gamma_t = None
        self._classify()

    # --- certificate computation
    def _classify(self):
        base = self.base
        if base.is_trivially_valued():
            if self._has_root_in(base, self.minpoly_b, self.minpoly_c):
                raise UnsupportedFieldError("minimal polynomial is reducible")
            self.certificate = "trivial"
            self.gamma_t = base.zero_value()
            self._residue_field = self
            return
        if base.is_zero(self.minpoly_c):
            raise UnsupportedFieldError("minimal polynomial x(x+b) is reducible")
        zero = base.zero_value()
        vb = base.valuate(self.minpoly_b)
        vc = base.valuate(self.minpoly_c)
        # ramified candidates first: x^2 - d with v(d)/2 outside the value group
        if base.is_zero(self.minpoly_b) and not base.in_value_group(
            vc.scale(Fraction(1, 2))
        ):
            d = -self.minpoly_c
            vd = vc
            if base.residue_char == 2:
                raise UnsupportedFieldError("wild ramification (residue char 2)")
            if d != base.monomial_section(vd):
                raise UnsupportedFieldError(
                    "d must be an exact monomial-section value for a "
                    "multiplicative section of the extension"
                )
            self.certificate = "ramified"
            self.gamma_t = vd.scale(Fraction(1, 2))
            self._residue_field = base.residue_field
            return
        if not (vb >= zero and vc >= zero):
            raise UnsupportedFieldError(
                "minimal polynomial coefficients must have nonnegative valuation"
            )
        Fbar = base.residue_field
        bbar = base.residue(self.minpoly_b)
        cbar = base.residue(self.minpoly_c)
        if base.residue_char == 2 and Fbar.is_zero(bbar):
            raise UnsupportedFieldError(
                "inseparable residue polynomial (residue char 2, b residue 0)"
            )
        root = self._find_root(Fbar, bbar, cbar)
        if root is None:
            self.certificate = "unramified"
            self.gamma_t = zero
            self._residue_field = self._build_unramified_residue(bbar, cbar)
            return
        other = -bbar - root
        if other == root:
            raise UnsupportedFieldError(
                "residue polynomial has a double root; "
                "normalize the minimal polynomial first"
            )
        self.certificate = "split"
        self.split_witness = (root, other)

    @staticmethod
    def _has_root_in(field, b, c):
        # only used over trivially valued base fields, where we can test
        # small candidates exactly for Q and everything for finite fields
        if field.is_finite:
            return any(
                field.is_zero(x * x + b * x + c) for x in field.elements()
            )
        if isinstance(field, RationalField):
            # rational root bound via discriminant square test
            disc = b * b - 4 * c
            if disc < 0:
                return False
            num, den = disc.numerator, disc.denominator
            rn = _isqrt_exact(num)
            rd = _isqrt_exact(den)
            return rn is not None and rd is not None
        return False

    @staticmethod
    def _find_root(field, b, c):
        if field.is_finite:
            for x in field.elements():
                if field.is_zero(x * x + b * x + c):
                    return x
            return None
        if isinstance(field, RationalField):
            disc = b * b - 4 * c
            if disc < 0:
                return None
            rn = _isqrt_exact(disc.numerator)
            rd = _isqrt_exact(disc.denominator)
            if rn is None or rd is None:
                return None
            return (-b + Fraction(rn, rd)) / 2
        if isinstance(field, FunctionField):
            # a root would force the discriminant to be a square; test on the
            # polynomial degree parity of the discriminant's leading data
            disc = b * b - 4 * c
            if field.is_zero(disc):
                return None
            sq = _function_field_sqrt(field, disc)
            if sq is None:
                return None
            return (-b + sq) / field.coerce(2)
        raise UnsupportedFieldError("residue root search unsupported here")

    def _build_unramified_residue(self, bbar, cbar):
        Fbar = self.base.residue_field
        if isinstance(Fbar, FiniteField) and Fbar.degree == 1:
            modulus = (cbar.coeffs[0], bbar.coeffs[0], 1)
            return FiniteField(Fbar.p, modulus, rank=self.rank, gen_name=self.gen_name)
        if isinstance(Fbar, (RationalField, FunctionField)) or Fbar.is_trivially_valued():
            return QuadraticExtension(Fbar, bbar, cbar, gen_name=self.gen_name)
        raise UnsupportedFieldError("unramified residue construction unsupported")

    def _require_unique(self):
        if self.certificate == "split":
            raise UnsupportedFieldError(
                "valuation does not extend uniquely (split residue polynomial)"
            )

    # --- field protocol
    def coerce(self, x):
        if isinstance(x, QEElement) and x.parent is self:
            return x
        return QEElement(self, self.base.coerce(x), self.base.zero)

    def from_parts(self, a0, a1):
        return QEElement(self, self.base.coerce(a0), self.base.coerce(a1))

    @property
    def gen(self):
        return QEElement(self, self.base.zero, self.base.one)

    def is_zero(self, a):
        return a.is_zero()

    def is_trivially_valued(self):
        return self.certificate == "trivial"

    def valuate(self, a):
        self._require_unique()
        if a.is_zero():
            return INFINITY
        if self.certificate == "trivial":
            return self.zero_value()
        return vmin(
            self.base.valuate(a.a0), self.base.valuate(a.a1) + self.gamma_t
        )

    @property
    def residue_field(self):
        self._require_unique()
        return self._residue_field

    def residue(self, a):
        self._require_unique()
        if self.certificate == "trivial":
            return a
        v = self.valuate(a)
        zero = self.zero_value()
        if v is INFINITY or v > zero:
            return self._residue_field.zero
        if v < zero:
            raise ValueError("residue of an element of negative valuation")
        if self.certificate == "ramified":
            return self.base.residue(a.a0)
        r0 = self.base.residue(a.a0)
        r1 = self.base.residue(a.a1)
        if isinstance(self._residue_field, FiniteField):
            return self._residue_field.from_coeffs((r0.coeffs[0], r1.coeffs[0]))
        return QEElement(self._residue_field, r0, r1)

    def lift(self, r):
        self._require_unique()
        if self.certificate == "trivial":
            return r
        if self.certificate == "ramified":
            return QEElement(self, self.base.lift(r), self.base.zero)
        if isinstance(self._residue_field, FiniteField):
            prime = self.base.residue_field
            r0 = prime.coerce(r.coeffs[0])
            r1 = prime.coerce(r.coeffs[1])
            return QEElement(self, self.base.lift(r0), self.base.lift(r1))
        return QEElement(self, self.base.lift(r.a0), self.base.lift(r.a1))

    def monomial_section(self, gamma):
        self._require_unique()
        if self.certificate in ("trivial", "unramified"):
            return self.coerce(self.base.monomial_section(gamma))
        if self.base.in_value_group(gamma):
            return self.coerce(self.base.monomial_section(gamma))
        shifted = gamma - self.gamma_t
        if self.base.in_value_group(shifted):
            return self.gen * self.base.monomial_section(shifted)
        raise NotInValueGroupError(f"{gamma} not in the value group")

    def in_value_group(self, gamma):
        self._require_unique()
        if isinstance(gamma, ValueInfinity):
            return False
        if self.base.in_value_group(gamma):
            return True
        if self.certificate == "ramified":
            return self.base.in_value_group(gamma - self.gamma_t)
        return False

    def random_element(self, rng, complexity: int = 1):
        return QEElement(
            self,
            self.base.random_element(rng, complexity),
            self.base.random_element(rng, complexity),
        )

    def description(self):
        b, c = self.minpoly_b, self.minpoly_c
        return (
            f"({self.base.description()})[{self.gen_name}]/"
            f"({self.gen_name}^2 + ({b})*{self.gen_name} + ({c})) [{self.certificate}]"
        )


def _isqrt_exact(n: int):
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def _function_field_sqrt(field: FunctionField, a):
    """Exact square root in k(x..) if one exists, else None (sympy factor)."""
    import sympy

    expr = sympy.sympify(str(a))
    candidate = sympy.sqrt(sympy.factor(expr))
    candidate = sympy.simplify(candidate)
    if candidate.has(sympy.Pow) and any(
        isinstance(p.exp, sympy.Rational) and p.exp.q != 1
        for p in candidate.atoms(sympy.Pow)
    ):
        return None
    try:
        elem = field.coerce(str(candidate))
    except Exception:
        return None
    if elem * elem == a:
        return elem
    return None


def check_unique_extension(ext: QuadraticExtension) -> dict:
    """Report the valuation-extension certificate of a quadratic extension."""
    if ext.certificate == "split":
        r1, r2 = ext.split_witness
        return {
            "unique": False,
            "certificate": "split",
            "counterexample": {
                "residue_roots": [repr(r1), repr(r2)],
                "reason": "residue polynomial splits with distinct roots; "
                "each root induces a different extension of the valuation",
            },
        }
    out = {"unique": True, "certificate": ext.certificate}
    if ext.certificate == "ramified":
        out["uniformizer_value"] = repr(ext.gamma_t)
    return out


# ---------------------------------------------------------------------------
# coarsening


class CoarsenedValuedField(ValuedField):
    """(F, w) where w is v followed by the quotient by a convex subgroup.

    Values are kept in embedded form (tail coordinates zeroed, rank
    unchanged) so coarse and fine values remain directly comparable.  The
    residue field of w carries the induced finer valuation u with values in
    the subgroup; it is exposed through ``residue_field`` as a valued field.
    """

    def __init__(self, base: ValuedField, sub: ConvexSubgroup):
        if sub.rank != base.rank:
            raise ValueError("subgroup rank mismatch")
        self.base = base
        self.sub = sub
        self.rank = base.rank
        self.char = base.char
        self._residue_field = None
        self._survivors = None
        if sub.is_trivial():
            self._residue_field = base.residue_field
            self.residue_char = base.residue_char
        elif sub.is_everything():
            self._residue_field = base
            self.residue_char = base.char
        else:
            if not isinstance(base, FunctionField):
                raise UnsupportedFieldError(
                    "proper coarsening implemented for monomial function fields"
                )
            survivors, dead = [], []
            for i, w in enumerate(base.weights):
                if sub.contains(w):
                    survivors.append(i)
                else:
                    dead.append(i)
            dead_heads = [list(sub.zero_tail(base.weights[i]).coords) for i in dead]
            if dead_heads and linalg.rank(dead_heads, QQ_PROTO) != len(dead):
                raise UnsupportedFieldError(
                    "coarsened weights must stay Q-linearly independent"
                )
            self._survivors = survivors
            self._dead = dead
            self._residue_field = FunctionField(
                base.constants,
                [base.variables[i] for i in survivors],
                [base.weights[i] for i in survivors],
                rank=base.rank,
            )
            self.residue_char = base.char

    def coerce(self, x):
        return self.base.coerce(x)

    def is_zero(self, a):
        return self.base.is_zero(a)

    def is_trivially_valued(self):
        return self.sub.is_everything() or self.base.is_trivially_valued()

    def valuate(self, a):
        v = self.base.valuate(a)
        return self.sub.zero_tail(v)

    @property
    def residue_field(self):
        return self._residue_field

    def residue(self, a):
        zero = self.zero_value()
        v = self.valuate(a)
        if v is INFINITY or v > zero:
            return self._residue_field.zero
        if v < zero:
            raise ValueError("residue of an element of negative valuation")
        if self.sub.is_trivial():
            return self.base.residue(a)
        if self.sub.is_everything():
            return a
        return self._function_field_residue(a)

    def _w_leading(self, poly):
        """(w-value, dead monomial exponents, survivor subpolynomial)."""
        base = self.base
        best = None
        groups = {}
        for mono, coeff in poly.terms():
            val = self.sub.zero_tail(base._mono_value(mono))
            key = tuple(mono[i] for i in self._dead)
            groups.setdefault((val, key), []).append((mono, coeff))
            if best is None or val < best:
                best = val
        chosen = [
            (key, terms) for (val, key), terms in groups.items() if val == best
        ]
        if len(chosen) != 1:
            raise AssertionError("dead-head independence must force one group")
        key, terms = chosen[0]
        target = self._residue_field
        out = target._field.zero
        for mono, coeff in terms:
            piece = target._field.one * coeff
            for pos, i in enumerate(self._survivors):
                if mono[i]:
                    piece = piece * target._gens[pos] ** mono[i]
            out = out + piece
        return best, key, out

    def _function_field_residue(self, a):
        vn, kn, pn = self._w_leading(a.numer)
        vd, kd, pd = self._w_leading(a.denom)
        if kn != kd:
            raise AssertionError("dead monomials must cancel at w-value zero")
        return pn / pd

    def lift(self, r):
        if self.sub.is_trivial():
            return self.base.lift(r)
        if self.sub.is_everything():
            return r
        target = self.base
        out = target._field.zero
        num = target._field.zero
        den = target._field.zero
        for mono, coeff in r.numer.terms():
            piece = target._field.one * coeff
            for pos, i in enumerate(self._survivors):
                if mono[pos]:
                    piece = piece * target._gens[i] ** mono[pos]
            num = num + piece
        for mono, coeff in r.denom.terms():
            piece = target._field.one * coeff
            for pos, i in enumerate(self._survivors):
                if mono[pos]:
                    piece = piece * target._gens[i] ** mono[pos]
            den = den + piece
        out = num / den
        return out

    def monomial_section(self, gamma):
        if self.sub.is_everything():
            if gamma.is_zero():
                return self.base.one
            raise NotInValueGroupError("trivial valuation has value group 0")
        if self.sub.is_trivial():
            return self.base.monomial_section(gamma)
        if not self.sub.zero_tail(gamma) == gamma:
            raise NotInValueGroupError("coarse values have zero tail")
        heads = [list(self.sub.zero_tail(self.base.weights[i]).coords) for i in self._dead]
        wmat = [[row[j] for row in heads] for j in range(self.rank)]
        if not heads:
            if gamma.is_zero():
                return self.base.one
            raise NotInValueGroupError(f"{gamma} not in the coarse value group")
        sol = linalg.solve(wmat, list(gamma.coords), QQ_PROTO)
        if sol is None or any(s.denominator != 1 for s in sol):
            raise NotInValueGroupError(f"{gamma} not in the coarse value group")
        elem = self.base._field.one
        for idx, e in zip(self._dead, sol):
            if e:
                elem = elem * self.base._gens[idx] ** int(e)
        return elem

    def in_value_group(self, gamma):
        try:
            self.monomial_section(gamma)
            return True
        except NotInValueGroupError:
            return False

    def random_element(self, rng, complexity: int = 1):
        return self.base.random_element(rng, complexity)

    def description(self):
        return (
            f"{self.base.description()} coarsened by tail block "
            f"(kept={self.sub.kept_coords})"
        )


def coarsen_field(base: ValuedField, sub: ConvexSubgroup) -> CoarsenedValuedField:
    return CoarsenedValuedField(base, sub)
