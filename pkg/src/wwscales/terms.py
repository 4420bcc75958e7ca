"""Multi-scale term algebra.

A term is ``coeff * Y**p * V(m' k Y) * (amplitude product) * e^{i m theta}`` with
``Y = y + 1``, ``V`` one of 1, cosh, sinh and ``theta = k x0 - w t0``.  A
:class:`FieldExpr` is a finite sum of such terms, merged on everything except the
coefficient.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Optional

from .coeff import ONE, ZERO, ScalarCoeff, cosh_multiple, const, k, sinh_multiple, w, I

__all__ = [
    "Amp",
    "FieldExpr",
    "Truncation",
    "TruncationExceeded",
    "DEFAULT_TRUNCATION",
    "ONE_V",
    "amp",
    "slow_var",
]


class TruncationExceeded(ValueError):
    pass


@dataclass(frozen=True)
class Truncation:
    """Largest slow-variable index kept for space (x_n) and time (t_n)."""

    space: int = 3
    time: int = 4

    def check(self, var):
        kind, n = var[0], int(var[1:])
        limit = self.space if kind == "x" else self.time
        if n < 1 or n > limit:
            raise TruncationExceeded(f"slow variable {var} outside truncation {self}")


DEFAULT_TRUNCATION = Truncation()


def slow_var(name):
    if name[0] not in "xt" or not name[1:].isdigit():
        raise ValueError(f"not a slow variable: {name!r}")
    return name


def _var_key(v):
    return (0 if v[0] == "x" else 1, int(v[1:]))


REAL_FAMILIES = frozenset({"psi", "xi"})


class Amp(NamedTuple):
    """Slow amplitude factor: family 'A' (complex carrier), 'psi' or 'xi' (real)."""

    symbol: str
    index: int
    conj: bool = False
    deriv: tuple = ()

    def d(self, var, times=1):
        counts = dict(self.deriv)
        counts[var] = counts.get(var, 0) + times
        return self._replace(deriv=tuple(sorted(counts.items(), key=lambda vc: _var_key(vc[0]))))

    def count(self, var):
        return dict(self.deriv).get(var, 0)

    def bare(self):
        return self._replace(deriv=())

    def conjugate(self):
        if self.symbol in REAL_FAMILIES:
            return self
        return self._replace(conj=not self.conj)

    def order(self):
        """Total derivative order."""
        return sum(c for _, c in self.deriv)


def amp(symbol, index, *derivs, conj=False):
    """Amplitude factor with derivatives given as var names, e.g. amp('A', 1, 'x1', 'x1')."""
    a = Amp(symbol, index, conj and symbol not in REAL_FAMILIES, ())
    for v in derivs:
        a = a.d(slow_var(v))
    return a


# vertical structure: (kind, m') with kind 0 = one, 1 = cosh, 2 = sinh
ONE_V = (0, 0)


def _vert(kind, m):
    if kind == 0 or m == 0:
        return ONE_V
    return (kind, m)


class FieldExpr:
    """Immutable normalized sum of multi-scale terms."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        # terms: dict key -> ScalarCoeff, key = (harmonic, ypow, vertical, amps)
        self._terms = {kk: c for kk, c in (terms or {}).items() if not c.is_zero()}
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def term(cls, coeff=ONE, *, harmonic=0, ypow=0, vertical=ONE_V, amps=()):
        coeff = coeff if isinstance(coeff, ScalarCoeff) else const(coeff)
        return cls({(harmonic, ypow, vertical, _canon_amps(amps)): coeff})

    @classmethod
    def scalar(cls, coeff):
        return cls.term(coeff)

    @classmethod
    def amp(cls, a, coeff=ONE, harmonic=0):
        return cls.term(coeff, harmonic=harmonic, amps=(a,))

    @classmethod
    def sum(cls, exprs: Iterable["FieldExpr"]):
        acc = {}
        for e in exprs:
            for key, c in e._terms.items():
                acc[key] = acc[key] + c if key in acc else c
        return cls(acc)

    # container protocol -------------------------------------------------

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: _term_sort_key(kv[0]))

    def keys(self):
        return self._terms.keys()

    def coeff_of(self, key):
        return self._terms.get(key, ZERO)

    def __len__(self):
        return len(self._terms)

    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def harmonics(self):
        return sorted({key[0] for key in self._terms})

    def amplitudes(self):
        return sorted({a.bare()._replace(conj=False) for key in self._terms for a, _ in key[3]})

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, ScalarCoeff)):
            other = FieldExpr.scalar(other)
        if not isinstance(other, FieldExpr):
            return NotImplemented
        acc = dict(self._terms)
        for key, c in other._terms.items():
            acc[key] = acc[key] + c if key in acc else c
        return FieldExpr(acc)

    __radd__ = __add__

    def __neg__(self):
        return FieldExpr({key: -c for key, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = c if isinstance(c, ScalarCoeff) else const(c)
        if c.is_zero():
            return FieldExpr()
        return FieldExpr({key: v * c for key, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, ScalarCoeff)):
            return self.scale(other)
        if not isinstance(other, FieldExpr):
            return NotImplemented
        acc = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                for key, c in _mul_keys(k1, k2):
                    c = c * c1 * c2
                    acc[key] = acc[key] + c if key in acc else c
        return FieldExpr(acc)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n):
        out = FieldExpr.scalar(ONE)
        for _ in range(n):
            out = out * self
        return out

    def map_coeffs(self, fn: Callable[[ScalarCoeff], ScalarCoeff]):
        return FieldExpr({key: fn(c) for key, c in self._terms.items()})

    # comparison ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, ScalarCoeff)):
            other = FieldExpr.scalar(other)
        if not isinstance(other, FieldExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # conjugation --------------------------------------------------------

    def conjugate(self):
        out = {}
        for (m, p, v, amps), c in self._terms.items():
            key = (-m, p, v, _canon_amps_pw((a.conjugate(), e) for a, e in amps))
            out[key] = c.conjugate()
        return FieldExpr(out)

    def is_real(self):
        return self.conjugate() == self

    def real_closure(self):
        """self + c.c."""
        return self + self.conjugate()

    # fast derivatives ---------------------------------------------------

    def d_fast(self, var):
        if var == "x0":
            return FieldExpr({key: c * (I * k * key[0]) for key, c in self._terms.items() if key[0]})
        if var == "t0":
            return FieldExpr({key: c * (-I * w * key[0]) for key, c in self._terms.items() if key[0]})
        if var == "y":
            acc = {}
            for (m, p, v, amps), c in self._terms.items():
                parts = []
                if p:
                    parts.append(((m, p - 1, v, amps), c * p))
                kind, mm = v
                if kind:
                    nv = (3 - kind, mm)
                    parts.append(((m, p, nv, amps), c * (k * mm)))
                for key, cc in parts:
                    acc[key] = acc[key] + cc if key in acc else cc
            return FieldExpr(acc)
        raise ValueError(f"unknown fast variable {var!r}")

    def laplace0(self):
        return self.d_fast("x0").d_fast("x0") + self.d_fast("y").d_fast("y")

    # slow derivatives ---------------------------------------------------

    def d_slow(self, var, truncation: Truncation = DEFAULT_TRUNCATION):
        if not self._terms:
            return self
        truncation.check(var)
        acc = {}
        for (m, p, v, amps), c in self._terms.items():
            for i, (a, e) in enumerate(amps):
                rest = list(amps[:i]) + ([(a, e - 1)] if e > 1 else []) + list(amps[i + 1:])
                new = _canon_amps_pw(rest + [(a.d(var), 1)])
                key = (m, p, v, new)
                cc = c * e
                acc[key] = acc[key] + cc if key in acc else cc
        return FieldExpr(acc)

    def d(self, var, truncation: Truncation = DEFAULT_TRUNCATION):
        if var in ("x0", "t0", "y"):
            return self.d_fast(var)
        return self.d_slow(var, truncation)

    # t0 integration and harmonic bookkeeping ----------------------------

    def integrate_t0(self):
        """(antiderivative of the m != 0 part, secular harmonic-0 part)."""
        anti, secular = {}, {}
        for key, c in self._terms.items():
            m = key[0]
            if m:
                anti[key] = c / (-I * w * m)
            else:
                secular[key] = c
        return FieldExpr(anti), FieldExpr(secular)

    def harmonic_coeff(self, m):
        """Terms at harmonic ``m`` with the phase factor removed."""
        return FieldExpr({(0,) + key[1:]: c for key, c in self._terms.items() if key[0] == m})

    def harmonic_part(self, m):
        return FieldExpr({key: c for key, c in self._terms.items() if key[0] == m})

    def with_harmonic(self, m):
        """Multiply by e^{i m theta}."""
        return FieldExpr({(key[0] + m,) + key[1:]: c for key, c in self._terms.items()})

    # vertical restriction -----------------------------------------------

    def restrict_surface(self):
        """Set y = 0 (Y = 1)."""
        acc = {}
        for (m, p, (kind, mm), amps), c in self._terms.items():
            if kind == 1:
                c = c * cosh_multiple(mm)
            elif kind == 2:
                c = c * sinh_multiple(mm)
            key = (m, 0, ONE_V, amps)
            acc[key] = acc[key] + c if key in acc else c
        return FieldExpr(acc)

    def restrict_bottom(self):
        """Set y = -1 (Y = 0)."""
        acc = {}
        for (m, p, (kind, mm), amps), c in self._terms.items():
            if p or kind == 2:
                continue
            key = (m, 0, ONE_V, amps)
            acc[key] = acc[key] + c if key in acc else c
        return FieldExpr(acc)

    def is_y_free(self):
        return all(key[1] == 0 and key[2] == ONE_V for key in self._terms)

    # amplitude substitution ---------------------------------------------

    def map_factors(self, fn: Callable[[Amp], Optional["FieldExpr"]], truncation=DEFAULT_TRUNCATION):
        """Replace amplitude factors: ``fn(factor)`` returns a FieldExpr or None (keep)."""
        out = []
        cache = {}
        for (m, p, v, amps), c in self._terms.items():
            keep = []
            repl = []
            for a, e in amps:
                if a not in cache:
                    cache[a] = fn(a)
                r = cache[a]
                if r is None:
                    keep.append((a, e))
                else:
                    repl.append((r, e))
            if not repl:
                out.append(FieldExpr({(m, p, v, amps): c}))
                continue
            t = FieldExpr({(m, p, v, _canon_amps_pw(keep)): c})
            for r, e in repl:
                for _ in range(e):
                    t = t * r
                    if t.is_zero():
                        break
            out.append(t)
        return FieldExpr.sum(out)

    def subs_amp(self, symbol, index, replacement: Optional["FieldExpr"] = None, truncation=DEFAULT_TRUNCATION):
        """Substitute the slow function (symbol, index) by ``replacement`` (0 if None).

        Derivatives of the symbol become derivatives of the replacement; the
        conjugated symbol receives the conjugated replacement.
        """
        repl_conj = replacement.conjugate() if replacement is not None else None

        def fn(a):
            if a.symbol != symbol or a.index != index:
                return None
            if replacement is None:
                return FieldExpr()
            r = repl_conj if a.conj else replacement
            for var, n in a.deriv:
                for _ in range(n):
                    r = r.d(var, truncation)
            return r

        return self.map_factors(fn, truncation)

    def rename_amp(self, symbol, index, new_index):
        def fn(a):
            if a.symbol == symbol and a.index == index:
                return FieldExpr.amp(a._replace(index=new_index))
            return None

        return self.map_factors(fn)

    def contains(self, symbol, index=None):
        return any(
            a.symbol == symbol and (index is None or a.index == index)
            for key in self._terms
            for a, _ in key[3]
        )

    # rendering ----------------------------------------------------------

    def __str__(self):
        from .syntax import expr_text

        return expr_text(self)

    def __repr__(self):
        return f"FieldExpr({self})"


# helpers -----------------------------------------------------------------


def _canon_amps(amps):
    return _canon_amps_pw((a, 1) for a in amps)


def _canon_amps_pw(pairs):
    counts = {}
    for a, e in pairs:
        if e:
            counts[a] = counts.get(a, 0) + e
    return tuple(sorted(counts.items()))


def _term_sort_key(key):
    m, p, v, amps = key
    return (abs(m), -m, amps, p, v)


def _mul_vertical(v1, v2):
    """Product-to-sum for vertical factors: list of (coeff, vertical)."""
    (a, m1), (b, m2) = v1, v2
    if a == 0:
        return [(ONE, v2)]
    if b == 0:
        return [(ONE, v1)]
    half = const(1) / 2
    s, d = m1 + m2, m1 - m2
    if a == 1 and b == 1:
        return [(half, (1, s)), (half, _vert(1, abs(d)))]
    if a == 2 and b == 2:
        return [(half, (1, s)), (-half, _vert(1, abs(d)))]
    # one sinh, one cosh: sinh(x)cosh(y) = (sinh(x+y) + sinh(x-y))/2
    if a == 1:
        d = -d  # sinh is the second factor
    out = [(half, (2, s))]
    if d:
        out.append((half if d > 0 else -half, (2, abs(d))))
    return out


def _mul_keys(k1, k2):
    m1, p1, v1, a1 = k1
    m2, p2, v2, a2 = k2
    amps = _canon_amps_pw(list(a1) + list(a2))
    return [((m1 + m2, p1 + p2, v, amps), c) for c, v in _mul_vertical(v1, v2)]
