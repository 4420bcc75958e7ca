"""Exact coefficient field Q(i)(k, w, W, S, C) with S = sinh k, C = cosh k.

Elements are stored as ``num / den`` where

* ``num`` is a polynomial in the ring ``QQ[C, I, S, w, k, W]`` reduced modulo
  ``C**2 - S**2 - 1`` and ``I**2 + 1`` (so C- and I-degree are at most one);
* ``den`` is a product of irreducible, primitive polynomials in ``S, w, k, W``
  with positive leading coefficient, kept in factored form.

Denominators never contain ``C`` or ``I``: division rationalizes by the
conjugates ``C -> -C`` and ``I -> -I``.  With every common factor cancelled this
representation is unique, so structural identity is field equality.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache, reduce

from sympy import QQ
from sympy.polys.orderings import lex
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import ring

__all__ = [
    "GENERATORS",
    "ScalarCoeff",
    "DivisionByZero",
    "PoleAtPoint",
    "BranchPole",
    "DispersionMode",
    "const",
    "gen",
    "group_velocity",
    "dispersion_w2",
    "cosh_multiple",
    "sinh_multiple",
]

GENERATORS = ("C", "I", "S", "w", "k", "W")
RING, _C, _I, _S, _w, _k, _W = ring(",".join(GENERATORS), QQ, lex)
_PELL = _C**2 - _S**2 - 1
_IUNIT = _I**2 + 1
_GB = [_PELL, _IUNIT]

# positions in monomial exponent tuples
_IC, _II, _IS, _IW_, _IK, _IWE = range(6)

POLE_TOL = 1e-12


class DivisionByZero(ZeroDivisionError):
    pass


class PoleAtPoint(ArithmeticError):
    pass


class BranchPole(ArithmeticError):
    """A denominator factor vanishes identically on the dispersion branch.

    Happens when an unreduced quotient was rationalized by a conjugate that is
    zero on the branch; reduce numerator and denominator before dividing.
    """


class DispersionMode:
    FREE = "free"
    REDUCED = "reduced"


def _reduce(p):
    if p.degree(_C) < 2 and p.degree(_I) < 2:
        return p
    return p.rem(_GB)


def _conj_C(p):
    return RING({m: (-c if m[_IC] % 2 else c) for m, c in p.items()})


def _conj_I(p):
    return RING({m: (-c if m[_II] % 2 else c) for m, c in p.items()})


def _poly_key(p):
    return tuple(p.terms())


def _normalize_factor(f):
    """Split ``f`` into (rational unit, primitive factor with positive LC)."""
    content, prim = f.primitive()
    if prim.LC < 0:
        content, prim = -content, -prim
    return content, prim


@lru_cache(maxsize=4096)
def _factor(D):
    """Irreducible factorization of a C,I-free polynomial: (unit, ((f, e), ...))."""
    unit, facs = D.factor_list()
    out = []
    for f, e in facs:
        c, prim = _normalize_factor(f)
        unit *= c**e
        out.append((prim, e))
    return unit, tuple(out)


def _sorted_den(d):
    return tuple(sorted(((f, e) for f, e in d.items() if e), key=lambda fe: _poly_key(fe[0])))


class ScalarCoeff:
    """Immutable normalized element of the coefficient field."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=()):
        # trusted constructor: callers pass normalized data
        self.num = num
        self.den = den
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def from_parts(cls, num, den_factors=None):
        """Normalize ``num / prod(f**e)`` where the factors are arbitrary C,I-free polys."""
        num = _reduce(RING(num))
        if not num:
            return ZERO
        d = {}
        for f, e in (den_factors or {}).items():
            unit, facs = _factor(f)
            num = num.quo_ground(unit**e)
            for g, ge in facs:
                d[g] = d.get(g, 0) + ge * e
        return cls._cancel(num, d)

    @classmethod
    def _cancel(cls, num, d):
        if not num:
            return ZERO
        for f in list(d):
            e = d[f]
            while e:
                try:
                    num = num.exquo(f)
                except ExactQuotientFailed:
                    break
                e -= 1
            d[f] = e
        return cls(num, _sorted_den(d))

    # structure ----------------------------------------------------------

    def den_poly(self):
        return reduce(lambda a, fe: a * fe[0] ** fe[1], self.den, RING.one)

    def is_zero(self):
        return not self.num

    def is_one(self):
        return not self.den and self.num == RING.one

    def is_real(self):
        return self.num.degree(_I) < 1

    def is_constant(self):
        """True for rational (or Gaussian rational) constants."""
        return not self.den and all(m[_IC] == m[_IS] == m[_IW_] == m[_IK] == m[_IWE] == 0 for m in self.num.monoms())

    def degree(self, name):
        g = RING.gens[GENERATORS.index(name)]
        return max(self.num.degree(g), max((f.degree(g) * e for f, e in self.den), default=0))

    def num_degree(self, name):
        return self.num.degree(RING.gens[GENERATORS.index(name)])

    def den_degree(self, name):
        g = RING.gens[GENERATORS.index(name)]
        return sum(f.degree(g) * e for f, e in self.den)

    def as_fraction(self):
        """Rational value of a constant element."""
        if not self.is_constant() or self.num.degree(_I) > 0:
            raise ValueError(f"{self} is not a rational constant")
        c = self.num.coeff(1) if self.num else 0
        return Fraction(int(QQ.numer(c)), int(QQ.denom(c))) if c else Fraction(0)

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not self.num:
            return other
        if not other.num:
            return self
        if self.den == other.den:
            return ScalarCoeff._cancel(self.num + other.num, dict(self.den))
        d1, d2 = dict(self.den), dict(other.den)
        lcm = {f: max(d1.get(f, 0), d2.get(f, 0)) for f in set(d1) | set(d2)}
        m1 = reduce(lambda a, f: a * f ** (lcm[f] - d1.get(f, 0)), lcm, RING.one)
        m2 = reduce(lambda a, f: a * f ** (lcm[f] - d2.get(f, 0)), lcm, RING.one)
        return ScalarCoeff._cancel(self.num * m1 + other.num * m2, lcm)

    __radd__ = __add__

    def __neg__(self):
        return ScalarCoeff(-self.num, self.den)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return ZERO
        d = dict(self.den)
        for f, e in other.den:
            d[f] = d.get(f, 0) + e
        return ScalarCoeff._cancel(_reduce(self.num * other.num), d)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise DivisionByZero("division by the zero coefficient")
        m = self.num
        mult = RING.one
        if m.degree(_C) > 0:
            cc = _conj_C(m)
            mult = cc
            m = _reduce(m * cc)
        if m.degree(_I) > 0:
            ci = _conj_I(m)
            mult = _reduce(mult * ci)
            m = _reduce(m * ci)
        num = _reduce(self.den_poly() * mult)
        return ScalarCoeff.from_parts(num, {m: 1})

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        return ScalarCoeff(_conj_I(self.num), self.den)

    def real_part(self):
        return ScalarCoeff._cancel(RING({m: c for m, c in self.num.items() if not m[_II]}), dict(self.den))

    def imag_part(self):
        """Coefficient of I (a real element)."""
        num = RING({(m[0], 0) + m[2:]: c for m, c in self.num.items() if m[_II]})
        return ScalarCoeff._cancel(num, dict(self.den))

    # comparison ---------------------------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return False
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((_poly_key(self.num), tuple((_poly_key(f), e) for f, e in self.den)))
        return self._hash

    def sort_key(self):
        return (_poly_key(self.num), tuple((_poly_key(f), e) for f, e in self.den))

    # substitutions ------------------------------------------------------

    def reduce_dispersion(self):
        """Eliminate w**2 via the dispersion relation; result has w-degree <= 1."""
        return _reduce_dispersion(self)

    def normalize(self):
        return ScalarCoeff.from_parts(self.num, {f: e for f, e in self.den})

    def subs(self, **values):
        """Substitute generators by ScalarCoeff (or numbers); e.g. ``subs(W=...)``."""
        vals = {g: _coerce(v) for g, v in values.items()}

        def sub_poly(p):
            total = ZERO
            for mon, c in p.terms():
                t = ScalarCoeff(RING({(0,) * 6: c}))
                rest = list(mon)
                for name, val in vals.items():
                    i = GENERATORS.index(name)
                    if rest[i]:
                        t = t * val ** rest[i]
                        rest[i] = 0
                total = total + t * ScalarCoeff.from_parts(RING({tuple(rest): 1}))
            return total

        out = sub_poly(self.num)
        for f, e in self.den:
            out = out / sub_poly(f) ** e
        return out

    def gravity_limit(self):
        """Limit W -> infinity (1/W = 0); raises if the element diverges."""
        dn = self.num.degree(_W)
        dd = self.den_degree("W")
        if dd > dn:
            return ZERO
        if dd < dn:
            raise ValueError("coefficient diverges as W -> infinity")
        top_num = RING({m[:5] + (0,): c for m, c in self.num.items() if m[_IWE] == dn})
        out = ScalarCoeff.from_parts(top_num)
        for f, e in self.den:
            df = f.degree(_W)
            top = RING({m[:5] + (0,): c for m, c in f.items() if m[_IWE] == df})
            out = out / ScalarCoeff.from_parts(top) ** e
        return out

    def diff_k(self):
        """Partial derivative in k with S' = C, C' = S; w and W are held fixed."""

        def dp(p):
            return ScalarCoeff.from_parts(p.diff(_k) + p.diff(_S) * _C + p.diff(_C) * _S)

        num = ScalarCoeff.from_parts(self.num)
        log_den = ZERO
        den = ONE
        for f, e in self.den:
            log_den = log_den + dp(f) * e / ScalarCoeff.from_parts(f)
            den = den * ScalarCoeff.from_parts(f) ** e
        return (dp(self.num) - num * log_den) / den

    # numerics -----------------------------------------------------------

    def evaluate(self, k, W, w=None):
        """Numeric value at wavenumber ``k`` and Weber number ``W``.

        ``w`` defaults to the positive root of the dispersion relation.
        """
        if w is None:
            w = math.sqrt((k + k**3 / W) * math.tanh(k))
        point = (math.cosh(k), 1j, math.sinh(k), w, k, W)
        den = 1.0
        for f, e in self.den:
            den *= _eval_poly(f, point) ** e
        if abs(den) < POLE_TOL:
            raise PoleAtPoint(f"denominator vanishes at k={k}, W={W}")
        val = _eval_poly(self.num, point) / den
        if self.num.degree(_I) < 1:
            return float(val.real)
        return complex(val)

    # rendering ----------------------------------------------------------

    def __str__(self):
        from .render import scalar_text

        return scalar_text(self)

    def __repr__(self):
        return f"ScalarCoeff({self})"


def _eval_poly(p, point):
    total = 0j
    for mon, c in p.terms():
        t = complex(float(c))
        for v, e in zip(point, mon):
            if e:
                t *= v**e
        total += t
    return total


def _coerce(x):
    if isinstance(x, ScalarCoeff):
        return x
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        if not x:
            return ZERO
        return ScalarCoeff(RING(QQ(x.numerator, x.denominator)))
    return NotImplemented


def const(value):
    """Rational constant as a coefficient."""
    return _coerce(Fraction(value))


def gen(name):
    """Generator ``name`` in {C, I, S, w, k, W} as a coefficient."""
    return ScalarCoeff(RING.gens[GENERATORS.index(name)])


ZERO = ScalarCoeff(RING.zero)
ONE = ScalarCoeff(RING.one)
ScalarCoeff.ZERO = ZERO
ScalarCoeff.ONE = ONE

C, I, S, w, k, W = (gen(g) for g in GENERATORS)


def dispersion_w2():
    """Right-hand side of the dispersion relation, (k + k^3/W) tanh k."""
    return (k + k**3 / W) * S / C


_W2 = None
_FACTOR_CACHE = {}


def _reduce_poly(p):
    global _W2
    if _W2 is None:
        _W2 = dispersion_w2()
    if p.degree(_w) < 2:
        return ScalarCoeff.from_parts(p)
    by_deg = {}
    for m, c in p.items():
        j = m[_IW_]
        key = m[:3] + (0,) + m[4:]
        by_deg.setdefault(j, {})[key] = c
    out = ZERO
    for j, part in sorted(by_deg.items()):
        out = out + ScalarCoeff.from_parts(RING(part)) * _W2 ** (j // 2) * (w if j % 2 else ONE)
    return out


def _reduce_dispersion(z):
    if z.num.degree(_w) < 2 and all(f.degree(_w) == 0 for f, _ in z.den):
        return z
    out = _reduce_poly(z.num)
    for f, e in z.den:
        if f.degree(_w) == 0:
            out = out / ScalarCoeff(f) ** e
            continue
        inv = _FACTOR_CACHE.get(f)
        if inv is None:
            red = _reduce_poly(f)
            a, b = _split_w(red)
            if a.is_zero() and b.is_zero():
                raise BranchPole(f"factor {f} vanishes on the dispersion branch")
            if b.is_zero():
                inv = a.inverse()
            else:
                inv = (a - w * b) / (a * a - _W2 * b * b)
            _FACTOR_CACHE[f] = inv
        out = out * inv**e
    # products of inverted factors can bring w^2 back; denominators are w-free now
    if out.num.degree(_w) >= 2:
        out = _reduce_dispersion(out)
    return out


def _split_w(z):
    """Write a w-degree <= 1 element with w-free denominator as a + w*b."""
    a = {m: c for m, c in z.num.items() if not m[_IW_]}
    b = {m[:3] + (0,) + m[4:]: c for m, c in z.num.items() if m[_IW_]}
    d = dict(z.den)
    return ScalarCoeff._cancel(RING(a), dict(d)), ScalarCoeff._cancel(RING(b), dict(d))


def cosh_multiple(m):
    """cosh(m k) as a polynomial in S, C (Pell-reduced)."""
    m = abs(m)
    p = ((_C + _S) ** m + (_C - _S) ** m).quo_ground(QQ(2))
    return ScalarCoeff.from_parts(p)


def sinh_multiple(m):
    """sinh(m k) as a polynomial in S, C (Pell-reduced)."""
    sign = -1 if m < 0 else 1
    m = abs(m)
    p = ((_C + _S) ** m - (_C - _S) ** m).quo_ground(QQ(2))
    return ScalarCoeff.from_parts(p) * sign


def group_velocity():
    """d w / d k on the dispersion branch, in closed form."""
    return (ONE / (2 * w)) * ((1 + 3 * k**2 / W) * S / C + (k + k**3 / W) / C**2)
