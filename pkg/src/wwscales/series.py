"""Lazy power series in epsilon whose coefficients are field expressions.

Components are computed on demand and memoized.  Products evaluate the
lower-order factor first and skip the pair when it vanishes, so slow
derivatives beyond the truncation are never formed for factors that are zero.
"""
from __future__ import annotations

from math import factorial
from fractions import Fraction

from .coeff import ONE, const
from .terms import DEFAULT_TRUNCATION, FieldExpr

_ZERO = FieldExpr()


class Series:
    def __init__(self, fn, min_order=1):
        self._fn = fn
        self.min_order = min_order
        self._memo = {}

    def __getitem__(self, j):
        if j < self.min_order:
            return _ZERO
        if j not in self._memo:
            self._memo[j] = self._fn(j)
        return self._memo[j]

    # combinators ----------------------------------------------------------

    @classmethod
    def known(cls, components):
        """Series with the given components (dict order -> FieldExpr); others zero."""
        comps = dict(components)
        return cls(lambda j: comps.get(j, _ZERO), min(comps, default=1))

    def __add__(self, other):
        return Series(lambda j: self[j] + other[j], min(self.min_order, other.min_order))

    def __sub__(self, other):
        return Series(lambda j: self[j] - other[j], min(self.min_order, other.min_order))

    def __neg__(self):
        return Series(lambda j: -self[j], self.min_order)

    def scale(self, c):
        return Series(lambda j: self[j].scale(c), self.min_order)

    def map(self, fn):
        return Series(lambda j: fn(self[j]), self.min_order)

    def __mul__(self, other):
        lo = self.min_order + other.min_order

        def comp(j):
            acc = []
            for i in range(self.min_order, j - other.min_order + 1):
                if i <= j - i:
                    a = self[i]
                    if a.is_zero():
                        continue
                    b = other[j - i]
                else:
                    b = other[j - i]
                    if b.is_zero():
                        continue
                    a = self[i]
                if not b.is_zero():
                    acc.append(a * b)
            return FieldExpr.sum(acc)

        return Series(comp, lo)

    def power(self, q):
        out = Series.known({0: FieldExpr.scalar(ONE)})
        for _ in range(q):
            out = out * self
        return out

    def d(self, kind, truncation=DEFAULT_TRUNCATION):
        """Total derivative d/dx (kind 'x') or d/dt (kind 't') = sum_a eps^a d/d{kind}_a."""

        def comp(j):
            acc = []
            for a in range(0, j - self.min_order + 1):
                f = self[j - a]
                if f.is_zero():
                    continue
                acc.append(f.d(f"{kind}{a}", truncation))
            return FieldExpr.sum(acc)

        return Series(comp, self.min_order)

    def d2(self, kind, truncation=DEFAULT_TRUNCATION):
        """Second total derivative; the lower-index partial is applied first."""

        def comp(j):
            acc = []
            for a in range(0, j - self.min_order + 1):
                for b in range(a, j - self.min_order - a + 1):
                    f = self[j - a - b]
                    if f.is_zero():
                        continue
                    g = f.d(f"{kind}{a}", truncation)
                    if g.is_zero():
                        continue
                    g = g.d(f"{kind}{b}", truncation)
                    acc.append(g if a == b else g.scale(2))
            return FieldExpr.sum(acc)

        return Series(comp, self.min_order)

    def dy(self, times=1):
        def comp(j):
            f = self[j]
            for _ in range(times):
                f = f.d_fast("y")
            return f

        return Series(comp, self.min_order)


def binomial(alpha, r):
    """Generalized binomial coefficient C(alpha, r) for rational alpha."""
    out = Fraction(1)
    for i in range(r):
        out *= (Fraction(alpha) - i) / (i + 1)
    return out


def power_series(s, coeffs):
    """sum_r coeffs(r) * s**r for a series with min_order >= 1."""
    if s.min_order < 1:
        raise ValueError("argument must vanish at order zero")
    cache = {0: Series.known({0: FieldExpr.scalar(ONE)})}

    def pw(r):
        if r not in cache:
            cache[r] = pw(r - 1) * s
        return cache[r]

    def comp(j):
        acc = [FieldExpr.scalar(ONE)] if j == 0 else []
        r = 1
        while r * s.min_order <= j:
            c = coeffs(r)
            if c:
                t = pw(r)[j]
                if not t.is_zero():
                    acc.append(t.scale(const(c)))
            r += 1
        return FieldExpr.sum(acc)

    return Series(comp, 0)


def surface_value(s, eta, depth):
    """Value at y = eta of a y-dependent series, Taylor-expanded about y = 0 to ``depth``."""
    base = s.map(lambda f: f.restrict_surface())
    if depth <= 0:
        return base
    out = base
    for q in range(1, depth + 1):
        dq = s.dy(q).map(lambda f: f.restrict_surface())
        out = out + (eta.power(q) * dq).scale(const(Fraction(1, factorial(q))))
    return out
