"""Deterministic plain-text and LaTeX renderers for coefficients and field expressions."""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd

from .coeff import GENERATORS

_LATEX_GEN = {"C": r"\cosh k", "I": "i", "S": r"\sinh k", "w": "w", "k": "k", "W": "W"}


def _frac(c):
    return Fraction(int(c.numerator), int(c.denominator))


def _monomial_text(mon):
    parts = []
    for name, e in zip(GENERATORS, mon):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def poly_text(p):
    """Canonical infix text of a ring polynomial (terms in lex order)."""
    if not p:
        return "0"
    out = []
    for mon, c in p.terms():
        c = _frac(c)
        body = _monomial_text(mon)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if body:
            coef = "" if a == 1 else f"{a}*"
            piece = coef + body
        else:
            piece = str(a)
        out.append((sign, piece))
    text = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, piece in out[1:]:
        text += f" {sign} {piece}"
    return text


def _wrap(s):
    return s if (" " not in s and "/" not in s) else f"({s})"


def scalar_text(z):
    num = poly_text(z.num)
    if not z.den:
        return num
    dens = []
    for f, e in z.den:
        s = _wrap(poly_text(f))
        dens.append(s if e == 1 else f"{s}^{e}")
    den = "*".join(dens)
    if len(dens) > 1 or not (den.startswith("(") and den.endswith(")")):
        den = f"({den})"
    return f"{_wrap(num)}/{den}"


_LATEX_ORDER = ("I", "k", "w", "W", "C", "S")


def _monomial_latex(mon):
    exps = dict(zip(GENERATORS, mon))
    parts = []
    for name in _LATEX_ORDER:
        e = exps[name]
        if not e:
            continue
        g = _LATEX_GEN[name]
        if e == 1:
            parts.append(g)
        elif name in "CS":
            fn, arg = g.split(" ")
            parts.append(f"{fn}^{{{e}}} {arg}")
        else:
            parts.append(f"{g}^{{{e}}}")
    return " ".join(parts)


def _content(p):
    """Rational content with the sign of the leading term, and the primitive part."""
    coeffs = [_frac(c) for _, c in p.terms()]
    num = reduce(gcd, (abs(c.numerator) for c in coeffs))
    den = reduce(lambda a, b: a * b // gcd(a, b), (c.denominator for c in coeffs))
    q = Fraction(num, den) * (1 if coeffs[0] > 0 else -1)
    return q, p.quo_ground(p.ring.domain.convert(q) if hasattr(p.ring.domain, "convert") else q)


def poly_latex(p):
    if not p:
        return "0"
    text = ""
    for i, (mon, c) in enumerate(p.terms()):
        c = _frac(c)
        body = _monomial_latex(mon)
        a = abs(c)
        if a.denominator != 1:
            coef = rf"\frac{{{a.numerator}}}{{{a.denominator}}}"
        else:
            coef = "" if (a == 1 and body) else str(a)
        piece = f"{coef} {body}".strip()
        if i == 0:
            text = ("-" if c < 0 else "") + piece
        else:
            text += (" - " if c < 0 else " + ") + piece
    return text


def _den_factor_latex(f, e):
    # S^2 + 1 is cosh^2 k
    if poly_text(f) == "S^2 + 1":
        return rf"\cosh^{{{2 * e}}} k"
    if len(f.terms()) == 1 and f.LC == 1:
        ((mon, _),) = f.terms()
        return _monomial_latex(tuple(x * e for x in mon))
    s = poly_latex(f)
    if len(f.terms()) > 1:
        s = rf"\left({s}\right)"
    return s if e == 1 else f"{s}^{{{e}}}"


def scalar_latex(z):
    """LaTeX for a coefficient; the rational content is pulled in front of the fraction."""
    if not z.num:
        return "0"
    q, prim = _content(z.num)
    sign = "-" if q < 0 else ""
    q = abs(q)
    top = poly_latex(prim)
    dens = [_den_factor_latex(f, e) for f, e in z.den]
    if q.denominator != 1:
        dens.insert(0, str(q.denominator))
    if q.numerator != 1:
        top = f"{q.numerator}" + (rf"\left({top}\right)" if len(prim.terms()) > 1 else ("" if top == "1" else f" {top}"))
    if not dens:
        return sign + top
    return sign + rf"\frac{{{top}}}{{{' '.join(dens)}}}"


# field expressions -------------------------------------------------------

_LETTER_LATEX = {"A": "A", "B": "B", "B~": r"\widetilde{B}"}


def _var_latex(v):
    return f"{v[0]}_{v[1:]}"


def amp_latex(a, names=None):
    """Slow amplitude with subscript derivatives; ``names`` maps 'A3' to a display letter."""
    ders = "".join(_var_latex(v) * c if c <= 2 else f"{_var_latex(v)}^{{{c}}}" for v, c in a.deriv)
    if a.symbol == "A":
        base = _LETTER_LATEX.get((names or {}).get(f"A{a.index}"), f"A_{{{a.index}}}")
        if a.conj:
            base = rf"\overline{{{base}}}"
        return f"{base}_{{{ders}}}" if ders else base
    sym = r"\psi" if a.symbol == "psi" else r"\xi"
    return f"{sym}_{{{a.index}{',' + ders if ders else ''}}}"


def _phase_latex(m):
    if m == 1:
        return r"e^{i\theta}"
    if m == -1:
        return r"e^{-i\theta}"
    return rf"e^{{{m}i\theta}}"


def term_latex(key, c, names=None):
    m, p, (kind, mm), amps = key
    factors = []
    if p:
        factors.append("(y+1)" if p == 1 else f"(y+1)^{{{p}}}")
    if kind:
        fn = r"\cosh" if kind == 1 else r"\sinh"
        factors.append(f"{fn}[{'' if mm == 1 else mm}k(y+1)]")
    for a, e in amps:
        s = amp_latex(a, names)
        factors.append(s if e == 1 else f"({s})^{{{e}}}" if a.deriv or a.conj else f"{s}^{{{e}}}")
    if m:
        factors.append(_phase_latex(m))
    body = " ".join(factors)
    coef = scalar_latex(c)
    if body and coef in ("1", "-1"):
        return ("-" if coef == "-1" else "") + body
    if body and not coef.lstrip("-").startswith(r"\frac") and (" + " in coef or " - " in coef):
        coef = rf"\left({coef}\right)"
    return f"{coef} {body}".strip()


def expr_latex(expr, names=None, per_line=3):
    """LaTeX for a field expression, broken into aligned lines of ``per_line`` terms."""
    if expr.is_zero():
        return "0"
    pieces = [term_latex(key, c, names) for key, c in expr.items()]
    lines = []
    for i in range(0, len(pieces), per_line):
        chunk = pieces[i : i + per_line]
        text = chunk[0] if i == 0 or chunk[0].startswith("-") else "+ " + chunk[0]
        for t in chunk[1:]:
            text += " " + t if t.startswith("-") else " + " + t
        lines.append(text)
    if len(lines) == 1:
        return lines[0]
    return r"\begin{aligned}&" + r"\\ &".join(lines) + r"\end{aligned}"
