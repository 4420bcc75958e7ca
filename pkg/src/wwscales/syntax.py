"""Canonical text form of coefficients and field expressions, and its parser.

Scalar grammar (also used by ``wwscales eval``)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom (('^' | '**') '-'? INT)?
    atom   := NUMBER | NAME | FUNC '(' expr ')' | '(' expr ')'

Names are the generators ``C S w k W I`` (``i`` is accepted for ``I``); the
functions ``sinh cosh tanh coth sech csch`` take an integer multiple of ``k``.

Field expressions are written term by term, ``(coeff) * factor * ...`` joined
by `` + ``, with factors ``Y^p``, ``cosh(mkY)``, ``sinh(mkY)``, ``E^m`` (the
phase ``e^{i m theta}``) and amplitudes such as ``A3~[x1^2,t1]^2`` (``~``
marks the complex conjugate).
"""
from __future__ import annotations

import re

from .coeff import ONE, ScalarCoeff, const, cosh_multiple, gen, sinh_multiple
from .render import scalar_text
from .terms import ONE_V, Amp, FieldExpr, _canon_amps_pw

__all__ = ["ParseError", "parse_scalar", "parse_expr", "expr_text", "amp_text"]


class ParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")
_FUNCS = ("sinh", "cosh", "tanh", "coth", "sech", "csch")


def _tokenize(text):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        pos = m.end()
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", "^" if op == "**" else op))
    return out


class _ScalarParser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0
        self.text = text

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ParseError(f"expected {value or kind} in {self.text!r}, got {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self):
        val = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input in {self.text!r}")
        return val

    def expr(self):
        val = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            val = val * rhs if op == "*" else val / rhs
        return val

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            exp = self.take("num")[1]
            if "." in exp:
                raise ParseError("exponents must be integers")
            base = base ** (sign * int(exp))
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            if "." in val:
                from fractions import Fraction

                return const(Fraction(val))
            return const(int(val))
        if kind == "name":
            self.take()
            if val in _FUNCS:
                self.take("op", "(")
                arg = self.expr()
                self.take("op", ")")
                return _hyperbolic(val, arg)
            if val == "i":
                val = "I"
            if val not in ("C", "S", "w", "k", "W", "I"):
                raise ParseError(f"unknown name {val!r}")
            return gen(val)
        if (kind, val) == ("op", "("):
            self.take()
            v = self.expr()
            self.take("op", ")")
            return v
        raise ParseError(f"unexpected token {val!r} in {self.text!r}")


def _hyperbolic(fn, arg):
    ratio = arg / gen("k")
    if not ratio.is_constant() or not ratio.is_real():
        raise ParseError(f"{fn} needs an integer multiple of k")
    m = ratio.as_fraction()
    if m.denominator != 1 or m == 0:
        raise ParseError(f"{fn} needs a nonzero integer multiple of k")
    m = int(m)
    ch, sh = cosh_multiple(m), sinh_multiple(m)
    return {"sinh": sh, "cosh": ch, "tanh": sh / ch, "coth": ch / sh, "sech": ONE / ch, "csch": ONE / sh}[fn]


def parse_scalar(text) -> ScalarCoeff:
    return _ScalarParser(text).parse()


# field expressions -------------------------------------------------------


def amp_text(a: Amp):
    s = f"{a.symbol}{a.index}{'~' if a.conj else ''}"
    if a.deriv:
        s += "[" + ",".join(v if c == 1 else f"{v}^{c}" for v, c in a.deriv) + "]"
    return s


def _term_text(key, c):
    m, p, (kind, mm), amps = key
    parts = [f"({scalar_text(c)})"]
    if p:
        parts.append(f"Y^{p}")
    if kind:
        fn = "cosh" if kind == 1 else "sinh"
        parts.append(f"{fn}({'' if mm == 1 else mm}kY)")
    for a, e in amps:
        parts.append(amp_text(a) + (f"^{e}" if e > 1 else ""))
    if m:
        parts.append(f"E^{m}")
    return " * ".join(parts)


def expr_text(e: FieldExpr):
    if e.is_zero():
        return "0"
    return " + ".join(_term_text(key, c) for key, c in e.items())


def _split_top(text, sep):
    out, depth, start, i = [], 0, 0, 0
    while i < len(text):
        ch = text[i]
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif depth == 0 and text.startswith(sep, i):
            out.append(text[start:i])
            i += len(sep)
            start = i
            continue
        i += 1
    out.append(text[start:])
    return out


_AMP = re.compile(r"^(A|psi|xi)(\d+)(~?)(?:\[([^\]]*)\])?(?:\^(\d+))?$")
_VERT = re.compile(r"^(cosh|sinh)\((\d*)kY\)$")


def _parse_factor(tok, state):
    if tok.startswith("Y^"):
        state["p"] += int(tok[2:])
        return
    if tok.startswith("E^"):
        state["m"] += int(tok[2:])
        return
    mv = _VERT.match(tok)
    if mv:
        if state["v"] != ONE_V:
            raise ParseError("at most one vertical factor per term")
        state["v"] = (1 if mv.group(1) == "cosh" else 2, int(mv.group(2) or 1))
        return
    ma = _AMP.match(tok)
    if not ma:
        raise ParseError(f"bad factor {tok!r}")
    sym, idx, cj, ders, pw = ma.groups()
    a = Amp(sym, int(idx), bool(cj), ())
    if ders:
        for d in ders.split(","):
            v, _, n = d.partition("^")
            a = a.d(v.strip(), int(n) if n else 1)
    state["amps"].append((a, int(pw) if pw else 1))


def parse_expr(text) -> FieldExpr:
    text = text.strip()
    if text == "0":
        return FieldExpr()
    acc = []
    for chunk in _split_top(text, " + "):
        chunk = chunk.strip()
        if not chunk.startswith("("):
            raise ParseError(f"term must start with a parenthesised coefficient: {chunk!r}")
        pieces = _split_top(chunk, " * ")
        coeff = parse_scalar(pieces[0])
        state = {"p": 0, "m": 0, "v": ONE_V, "amps": []}
        for tok in pieces[1:]:
            _parse_factor(tok.strip(), state)
        acc.append(FieldExpr({(state["m"], state["p"], state["v"], _canon_amps_pw(state["amps"])): coeff}))
    return FieldExpr.sum(acc)
