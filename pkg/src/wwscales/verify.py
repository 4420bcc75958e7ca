"""Checks of a derivation ledger against the reference catalog, and amplitude-equation extraction."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import bisect

from . import catalog as cat
from .coeff import ONE, ZERO, ScalarCoeff, W, const, dispersion_w2, group_velocity, w
from .hierarchy import Ledger, build_level, roundtrip_residuals
from .render import scalar_text
from .terms import Amp, FieldExpr, amp

WITNESS = (1.0, 2.0)


class UnknownLabel(KeyError):
    pass


class MissingLedgerEntry(LookupError):
    pass


class NonreducibleForm(ValueError):
    pass


@dataclass(frozen=True)
class CheckResult:
    label: str
    passed: bool
    summary: str
    gating: bool = True
    expected: str = ""
    derived: str = ""
    numbers: tuple = ()  # ((name, value), ...)
    note: str = ""
    diff: str = ""  # derived - expected, normalized, on failure


# algebra helpers ---------------------------------------------------------


def reduced(e: FieldExpr) -> FieldExpr:
    return e.map_coeffs(lambda c: c.reduce_dispersion())


def ratio(a: FieldExpr, b: FieldExpr, modulo_dispersion=False) -> Optional[ScalarCoeff]:
    """Nonzero scalar r with a == r*b, or None."""
    if modulo_dispersion:
        a, b = reduced(a), reduced(b)
    if a.is_zero() or b.is_zero() or set(a.keys()) != set(b.keys()):
        return None
    key = next(iter(b.keys()))
    r = a.coeff_of(key) / b.coeff_of(key)
    if modulo_dispersion:
        r = r.reduce_dispersion()
        ok = reduced(a - b.scale(r)).is_zero()
    else:
        ok = a == b.scale(r)
    return r if ok else None


def _reshape(a: Amp, counts):
    deriv = tuple((v, c) for v, c in sorted(counts.items(), key=lambda vc: (vc[0][0] != "x", int(vc[0][1:]))) if c)
    return a._replace(deriv=deriv)


def solve_for(expr: FieldExpr, symbol, index):
    """Solve expr = 0 for the bare factor (symbol, index) appearing linearly."""
    target = amp(symbol, index)
    coeff, rest = ZERO, []
    for key, c in expr.items():
        m, p, v, amps = key
        if amps == ((target, 1),):
            coeff = c
        elif any(a.symbol == symbol and a.index == index for a, _ in amps):
            raise NonreducibleForm(f"{symbol}{index} does not enter linearly")
        else:
            rest.append(FieldExpr({key: c}))
    if coeff.is_zero():
        raise NonreducibleForm(f"{symbol}{index} absent")
    return FieldExpr.sum(rest).scale(-ONE / coeff)


def wave_rule(expr: FieldExpr, index=1):
    """Replace psi_index t1-pairs by x1-pairs (psi_t1t1 = psi_x1x1)."""

    def fn(a):
        if a.symbol != "psi" or a.index != index or a.count("t1") < 2:
            return None
        counts = dict(a.deriv)
        j = counts["t1"] // 2
        counts["t1"] -= 2 * j
        counts["x1"] = counts.get("x1", 0) + 2 * j
        return FieldExpr.amp(_reshape(a, counts))

    return expr.map_factors(fn)


def transport_rule(expr: FieldExpr, index, speed: ScalarCoeff):
    """A_index: each t1 derivative becomes -speed times an x1 derivative."""

    def fn(a):
        if a.symbol != "A" or a.index != index or not a.count("t1"):
            return None
        counts = dict(a.deriv)
        j = counts.pop("t1")
        counts["x1"] = counts.get("x1", 0) + j
        return FieldExpr.amp(_reshape(a, counts), (-speed) ** j)

    return expr.map_factors(fn)


def unidirectional(expr: FieldExpr, indices=(1, 2, 3)):
    """psi_i depending on x1 - t1 and x2 - t2: t1 -> -x1, t2 -> -x2."""

    def fn(a):
        if a.symbol != "psi" or a.index not in indices:
            return None
        counts = dict(a.deriv)
        sign = 1
        for t, x in (("t1", "x1"), ("t2", "x2")):
            j = counts.pop(t, 0)
            if j:
                counts[x] = counts.get(x, 0) + j
                sign *= (-1) ** j
        if sign == 1 and counts == dict(a.deriv):
            return None
        return FieldExpr.amp(_reshape(a, counts), const(sign))

    return expr.map_factors(fn)


def carrier_terms(expr: FieldExpr, min_factors=1):
    """Terms carrying at least ``min_factors`` carrier-amplitude factors."""
    return FieldExpr(
        {key: c for key, c in expr.items() if sum(e for a, e in key[3] if a.symbol == "A") >= min_factors}
    )


# ledger access -----------------------------------------------------------


def _require(ledger: Ledger, order, source, harmonic):
    c = ledger.find(order, source, harmonic)
    if c is None:
        have = max(ledger.records, default=0)
        raise MissingLedgerEntry(f"no {source} harmonic-{harmonic} constraint at order {order} (ledger reaches order {have})")
    return c


def _need_order(ledger, n):
    if n not in ledger.records:
        raise MissingLedgerEntry(f"ledger does not reach order {n}")


# extraction --------------------------------------------------------------


@dataclass(frozen=True)
class TransportForm:
    order: int
    index: int
    speed: ScalarCoeff  # x1 coefficient / t1 coefficient, unreduced
    speed_reduced: ScalarCoeff
    matches_group_velocity: bool


def derive_transport(ledger: Ledger, order=3, reduce=True) -> TransportForm:
    """First-harmonic condition at ``order`` as A_t1 + V A_x1 = 0."""
    c = _require(ledger, order, "dynamic", 1)
    e = c.state(order)
    idx = {a.index for key in e.keys() for a, _ in key[3] if a.symbol == "A"}
    if len(idx) != 1:
        raise NonreducibleForm(f"order-{order} first-harmonic condition involves carriers {sorted(idx)}")
    (i,) = idx
    ct = e.coeff_of((0, 0, (0, 0), ((amp("A", i, "t1"), 1),)))
    cx = e.coeff_of((0, 0, (0, 0), ((amp("A", i, "x1"), 1),)))
    if ct.is_zero() or len(e) != 2 or cx.is_zero():
        raise NonreducibleForm(f"order-{order} first-harmonic condition is not a transport equation: {e}")
    speed = cx / ct
    vg = group_velocity()
    if reduce:
        sr = (cx.reduce_dispersion() / ct.reduce_dispersion()).reduce_dispersion()
        match = (sr - vg.reduce_dispersion()).reduce_dispersion().is_zero()
    else:
        sr = speed
        match = speed == vg
    return TransportForm(order, i, speed, sr, match)


def implicit_group_velocity():
    """dw/dk from implicit differentiation of w^2 = D(k): D'(k) / (2 w)."""
    return dispersion_w2().diff_k() / (2 * w)


def finite_difference_vg(k, W, h=1e-5):
    def omega(kk):
        return math.sqrt((kk + kk**3 / W) * math.tanh(kk))

    return (omega(k + h) - omega(k - h)) / (2 * h)


def wave_equation_psi1(ledger: Ledger, route="solve"):
    """Eliminate xi2 between the order-2 closure and the order-3 secularity condition."""
    r7 = _require(ledger, 2, "dynamic", 0).state(2)
    r8 = _require(ledger, 3, "kinematic", 0).state(3)
    if route == "solve":
        xi2 = solve_for(r7, "xi", 2)
        return r8.subs_amp("xi", 2, xi2)
    # differentiate the closure along t1 and subtract
    c8 = r8.coeff_of((0, 0, (0, 0), ((amp("xi", 2, "t1"), 1),)))
    c7 = r7.coeff_of((0, 0, (0, 0), ((amp("xi", 2), 1),)))
    return r8 - r7.d("t1").scale(c8 / c7)


@dataclass(frozen=True)
class KdvForm:
    u_t3: ScalarCoeff
    u_x3: ScalarCoeff
    u_ux1: ScalarCoeff
    u_x1x1x1: ScalarCoeff
    coupling: FieldExpr
    eliminated: FieldExpr  # secularity condition after removing xi2, xi3, xi4 and the wave rule


def eliminate_xi(ledger: Ledger):
    _need_order(ledger, 5)
    r7 = _require(ledger, 2, "dynamic", 0).state(5)
    r9 = _require(ledger, 3, "dynamic", 0).state(5)
    r12 = _require(ledger, 4, "dynamic", 0).state(5)
    r10 = _require(ledger, 5, "kinematic", 0).state(5)
    xi2 = solve_for(r7, "xi", 2)
    xi3 = solve_for(r9.subs_amp("xi", 2, xi2), "xi", 3)
    xi4 = solve_for(r12.subs_amp("xi", 2, xi2).subs_amp("xi", 3, xi3), "xi", 4)
    out = r10.subs_amp("xi", 2, xi2).subs_amp("xi", 3, xi3).subs_amp("xi", 4, xi4)
    return wave_rule(out)


def extract_kdv(ledger: Ledger) -> KdvForm:
    elim = eliminate_xi(ledger)
    uni = unidirectional(elim)
    key = lambda *amps: (0, 0, (0, 0), tuple(sorted(amps)))
    u = amp("psi", 1, "x1")
    slots = {
        "t3": key((amp("psi", 1, "x1", "t3"), 1)),
        "x3": key((amp("psi", 1, "x1", "x3"), 1)),
        "nl": key((u, 1), (amp("psi", 1, "x1", "x1"), 1)),
        "disp": key((amp("psi", 1, "x1", "x1", "x1", "x1"), 1)),
    }
    coupling = carrier_terms(uni)
    rest = uni - coupling - FieldExpr({k_: uni.coeff_of(k_) for k_ in slots.values()})
    if not rest.is_zero():
        raise NonreducibleForm(f"terms outside the KdV form: {rest}")
    lead = uni.coeff_of(slots["t3"])
    if lead.is_zero():
        raise NonreducibleForm("no u_t3 term")
    c = {name: uni.coeff_of(k_) / lead for name, k_ in slots.items()}
    return KdvForm(c["t3"], c["x3"], c["nl"], c["disp"], coupling.scale(ONE / lead), elim)


@dataclass(frozen=True)
class LsForm:
    time_coeff: ScalarCoeff  # coefficient of A_t2 (reduced)
    A_speed: ScalarCoeff  # A_x2 / A_t2 (reduced)
    B_time_coeff: ScalarCoeff
    B_speed: ScalarCoeff
    Ck: ScalarCoeff
    coupling: ScalarCoeff  # coefficient of A psi1_x1
    cubic: FieldExpr
    carrier: int
    partner: int


def extract_ls(ledger: Ledger) -> LsForm:
    _need_order(ledger, 5)
    e = _require(ledger, 5, "dynamic", 1).state(5)
    carriers = [n for n in ledger.carriers() if n <= 4]
    if len(carriers) != 2:
        raise NonreducibleForm(f"expected carrier and partner amplitudes, found {carriers}")
    a, b = carriers
    e = reduced(transport_rule(e, a, group_velocity()))
    key = lambda *amps: (0, 0, (0, 0), tuple(sorted(amps)))
    slots = {
        "At2": key((amp("A", a, "t2"), 1)),
        "Ax2": key((amp("A", a, "x2"), 1)),
        "Bt1": key((amp("A", b, "t1"), 1)),
        "Bx1": key((amp("A", b, "x1"), 1)),
        "Axx": key((amp("A", a, "x1", "x1"), 1)),
        "cpl": key((amp("A", a), 1), (amp("psi", 1, "x1"), 1)),
    }
    v = {name: e.coeff_of(k_).reduce_dispersion() for name, k_ in slots.items()}
    cubic = carrier_terms(e, 3)
    rest = e - cubic - FieldExpr({k_: e.coeff_of(k_) for k_ in slots.values()})
    if not reduced(rest).is_zero():
        raise NonreducibleForm(f"terms outside the LS form: {rest}")
    if v["At2"].is_zero() or v["Bt1"].is_zero():
        raise NonreducibleForm("missing slow-time derivative")
    return LsForm(
        v["At2"],
        (v["Ax2"] / v["At2"]).reduce_dispersion(),
        v["Bt1"],
        (v["Bx1"] / v["Bt1"]).reduce_dispersion(),
        v["Axx"],
        v["cpl"],
        cubic,
        a,
        b,
    )


def same_order_table(ledger: Ledger):
    """Per order: does an LS-type (second slow derivative of a carrier, first harmonic)
    or KdV-type (fourth x1 derivative of psi1, harmonic 0) condition appear?"""
    out = {}
    for n in sorted(ledger.records):
        ls = ledger.find(n, "dynamic", 1)
        kdv = ledger.find(n, "kinematic", 0)
        has_ls = ls is not None and any(
            a.symbol == "A" and a.order() >= 2 for key in ls.state(n).keys() for a, _ in key[3]
        )
        has_kdv = kdv is not None and any(
            a.symbol == "psi" and a.index == 1 and a.count("x1") >= 4 for key in kdv.state(n).keys() for a, _ in key[3]
        )
        out[n] = (has_ls, has_kdv)
    return out


# templates ---------------------------------------------------------------


@dataclass(frozen=True)
class Template:
    name: str
    required: tuple  # slot names that must be nonzero


TEMPLATES = (
    Template("cubic Schroedinger-KdV system", ("ls.cubic", "ls.coupling", "kdv.coupling")),
    Template("linear Schroedinger-KdV system", ("ls.coupling", "kdv.coupling")),
)


def template_slots(ls: LsForm, kdv: KdvForm):
    return {
        "ls.cubic": not ls.cubic.is_zero(),
        "ls.coupling": not ls.coupling.is_zero(),
        "kdv.coupling": not kdv.coupling.is_zero(),
    }


def template_nonderivability(slots):
    """Map template name -> list of required slots that are empty (empty list: derivable)."""
    return {t.name: [s for s in t.required if not slots[s]] for t in TEMPLATES}


# resonance ---------------------------------------------------------------


@dataclass(frozen=True)
class Root:
    k: float
    W: float
    residual: float


def resonance_scan(bracket: Optional[ScalarCoeff] = None, k_values=(0.5, 1.0, 2.0), W_range=(0.05, 50.0), samples=400, xtol=1e-12):
    """Zeros in W of the dispersion-reduced second-harmonic bracket, by sign change and bisection."""
    g = (bracket or cat.vanishing_bracket()).reduce_dispersion()
    needs_w = g.degree("w") > 0 or g.den_degree("w") > 0

    def value(kk, WW):
        if needs_w:
            return g.evaluate(kk, WW)
        return g.evaluate(kk, WW, w=0.0)

    lo, hi = W_range
    roots = []
    for kk in k_values:
        grid = np.linspace(lo, hi, samples)
        vals = []
        for WW in grid:
            try:
                vals.append(value(kk, WW))
            except (ArithmeticError, ValueError):
                vals.append(float("nan"))
        for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
            if not (np.isfinite(fa) and np.isfinite(fb)):
                continue
            if fa == 0.0:
                roots.append(Root(kk, float(a), 0.0))
            elif fa * fb < 0:
                r = bisect(lambda WW: value(kk, WW), a, b, xtol=xtol)
                res = abs(value(kk, r))
                if res < 1e-6:  # skip sign changes across poles
                    roots.append(Root(kk, float(r), res))
    return roots


# checks ------------------------------------------------------------------


def _eq_check(label, derived, expected, mode="exact", note=""):
    if mode == "exact":
        ok = derived == expected
        r = ONE if ok else None
    else:
        r = ratio(derived, expected, modulo_dispersion=(mode == "reduced"))
        ok = r is not None
    summary = "identical" if (ok and mode == "exact") else (f"equal up to factor {scalar_text(r)}" if ok else "mismatch")
    diff = "" if ok else str(derived - expected)
    return CheckResult(label, ok, summary, True, str(expected), str(derived), note=note, diff=diff)


def _displayed_systems(n, snap, W_=W):
    """Right-hand sides of the order-n system exactly as printed in the reference, from the history snapshot."""
    if n == 1:
        z = FieldExpr()
        return {"laplace": z, "kinematic": z, "dynamic": z, "bottom": z}
    phi = {m: p for m, (p, _) in snap.items()}
    eta = {m: e for m, (_, e) in snap.items()}

    def D(e, *vs):
        for v in vs:
            e = e.d(v)
        return e

    s = lambda e: e.restrict_surface()
    half = const(1) / 2
    iW = ONE / W_
    z = FieldExpr()
    if n == 2:
        lap = -D(phi[1], "x0", "x1").scale(2)
        kin = -D(eta[1], "t1") - s(D(phi[1], "x0")) * D(eta[1], "x0")
        dyn = -(
            s(D(phi[1], "t1"))
            + (s(D(phi[1], "x0")) ** 2 + s(D(phi[1], "y")) ** 2).scale(half)
            - D(eta[1], "x0", "x1").scale(2 * iW)
        )
    elif n == 3:
        lap = -D(phi[2], "x0", "x1").scale(2) - D(phi[1], "x1", "x1")
        kin = -D(eta[2], "t1")
        dyn = -(s(D(phi[2], "t1")) + s(D(phi[1], "t2")) - D(eta[2], "x0", "x1").scale(2 * iW))
    elif n == 4:
        lap = -D(phi[3], "x0", "x1").scale(2) - D(phi[2], "x0", "x2").scale(2) - D(phi[2], "x1", "x1") - D(phi[1], "x1", "x2").scale(2)
        kin = -D(eta[3], "t1") - D(eta[2], "t2") - s(D(phi[1], "x1")) * D(eta[2], "x0") - s(D(phi[2], "x0")) * D(eta[2], "x0")
        dyn = -(
            s(D(phi[3], "t1"))
            + s(D(phi[2], "t2"))
            + s(D(phi[1], "t3"))
            + ((s(D(phi[1], "x1")) + s(D(phi[2], "x0"))) ** 2 + s(D(phi[2], "y")) ** 2).scale(half)
            - (D(eta[3], "x0", "x1").scale(2) + D(eta[2], "x0", "x2").scale(2) + D(eta[2], "x1", "x1")).scale(iW)
        )
    elif n == 5:
        lap = (
            -D(phi[4], "x0", "x1").scale(2)
            - D(phi[3], "x0", "x2").scale(2)
            - D(phi[3], "x1", "x1")
            - D(phi[2], "x1", "x2").scale(2)
            - D(phi[1], "x2", "x2")
            - D(phi[1], "x1", "x3").scale(2)
        )
        kin = -D(eta[4], "t1") - D(eta[3], "t2") - D(eta[2], "t3") - s(D(phi[1], "x1")) * D(eta[2], "x1")
        dyn = -(
            s(D(phi[4], "t1"))
            + s(D(phi[3], "t2"))
            + s(D(phi[2], "t3"))
            + s(D(phi[1], "t4"))
            + s(D(phi[1], "x1")) * (s(D(phi[1], "x2")) + s(D(phi[2], "x1")) + s(D(phi[3], "x0")))
            - (
                D(eta[4], "x0", "x1").scale(2)
                + D(eta[3], "x0", "x2").scale(2)
                + D(eta[3], "x1", "x1")
                + D(eta[2], "x1", "x2").scale(2)
            ).scale(iW)
        )
    else:
        raise MissingLedgerEntry(f"no printed system for order {n}")
    return {"laplace": lap, "kinematic": kin, "dynamic": dyn, "bottom": z}


# printed equations known to leave out a nonzero term (non-gating)
PRINTED_OMISSIONS = {(5, "kinematic"): "the printed order-5 kinematic condition has no psi1_x1 * eta3_x0 term"}


def system_audit(ledger: Ledger, n):
    level = ledger.levels[n]
    shown = _displayed_systems(n, ledger.snapshots[n])
    out = {}
    for eq, expected in shown.items():
        got = getattr(level, f"residual_{eq}")
        out[eq] = (got == expected, got - expected)
    return out


def roundtrip_check(ledger: Ledger):
    """Rebuild each level from its snapshot and confirm the solved fields satisfy it."""
    from .hierarchy import SolutionRecord

    bad = []
    for n, rec in sorted(ledger.records.items()):
        hist = {m: SolutionRecord(m, p, e, (), (), p, e) for m, (p, e) in ledger.snapshots[n].items()}
        level = build_level(n, hist, ledger.problem)
        if level != ledger.levels[n]:
            bad.append(f"order {n}: level rebuild differs")
            continue
        kin = ledger.find(n, "kinematic", 0)
        dyn = [(c.harmonic, c.derived) for c in ledger.constraints if c.order == n and c.source == "dynamic"]
        res = roundtrip_residuals(level, rec.phi_raw, rec.eta_raw, kin.lhs if kin else FieldExpr(), dyn)
        bad += [f"order {n}: {eq}" for eq, r in res.items() if not r.is_zero()]
    return bad


def _theorem(ledger, order):
    ev = [e for e in ledger.events if e.kind == "amplitude-vanishing" and e.order == order]
    if not ev:
        _need_order(ledger, order)
        raise MissingLedgerEntry(f"no vanishing event at order {order}")
    return ev[0]


def theorem_A_vanishes(ledger: Ledger, order):
    ev = _theorem(ledger, order)
    expected = cat.vanishing_bracket_reduced()
    same = (ev.reduced - expected.reduce_dispersion()).reduce_dispersion().is_zero()
    nonzero = not ev.reduced.is_zero()
    ok = nonzero and same and abs(ev.witness) > 1
    return CheckResult(
        f"A-vanishing-{order}",
        ok,
        f"A{ev.index} := 0; reduced coefficient nonzero, value {ev.witness:.10g} at (k, W) = (1, 2)",
        expected=str(expected),
        derived=str(ev.reduced),
        numbers=(("G_reduced(1,2)", ev.witness),),
    )


def _check_dispersion(L):
    c = _require(L, 1, "dynamic", 1)
    expected = FieldExpr.amp(amp("A", 1), cat.dispersion_relation())
    return _eq_check("dispersion", c.lhs, expected, "proportional")


def _check_F2(L):
    r = _eq_check("F2", _require(L, 2, "dynamic", 1).lhs, cat.F2())
    other = _require(L, 2, "dynamic", 1).lhs == cat.F2_variant()
    return r.__class__(**{**r.__dict__, "note": f"overview variant with (1 + k cosh k) matches: {other}"})


def _check_transport(L):
    tf = derive_transport(L, 3)
    raw = derive_transport(L, 3, reduce=False)
    implicit = implicit_group_velocity() == group_velocity()
    vg = group_velocity().evaluate(*WITNESS)
    ratio_val = tf.speed_reduced.evaluate(*WITNESS)
    fd = finite_difference_vg(*WITNESS)
    ok = tf.matches_group_velocity and implicit and abs(ratio_val - fd) < 1e-6
    again = derive_transport(L, 4).matches_group_velocity if 4 in L.records else None
    return CheckResult(
        "transport",
        ok and again is not False,
        f"A_t1 + V A_x1 = 0 with V = Vg modulo dispersion (unreduced identical: {raw.matches_group_velocity}); again at order 4: {again}",
        expected=str(group_velocity()),
        derived=str(tf.speed_reduced),
        numbers=(("V(1,2)", ratio_val), ("Vg(1,2)", vg), ("fd dw/dk(1,2)", fd)),
    )


def _check_wave(L):
    a = wave_equation_psi1(L, "solve")
    b = wave_equation_psi1(L, "differentiate")
    ra, rb = ratio(a, cat.wave_psi1()), ratio(b, cat.wave_psi1())
    ok = ra is not None and rb is not None
    return CheckResult("wave-psi1", ok, "both elimination routes give psi1_t1t1 - psi1_x1x1 = 0" if ok else "mismatch", expected=str(cat.wave_psi1()), derived=str(a))


def _check_wave2(L):
    r7 = _require(L, 2, "dynamic", 0).state(4)
    r9 = _require(L, 3, "dynamic", 0).state(4)
    ns = _require(L, 4, "kinematic", 0).state(4)
    xi2 = solve_for(r7, "xi", 2)
    xi3 = solve_for(r9, "xi", 3)
    got = ns.subs_amp("xi", 2, xi2).subs_amp("xi", 3, xi3)
    return _eq_check("wave-psi2", got, cat.wave_psi2(), "proportional")


def _check_kdv(L):
    f = extract_kdv(L)
    exp = cat.kdv_coefficients()
    got = (f.u_t3, f.u_x3, f.u_ux1, f.u_x1x1x1)
    ok = all(g == e for g, e in zip(got, exp)) and f.coupling.is_zero()
    return CheckResult(
        "kdv",
        ok,
        "u_t3 + u_x3 + u u_x1 + (" + scalar_text(f.u_x1x1x1) + ") u_x1x1x1 = 0, coupling " + ("empty" if f.coupling.is_zero() else "present"),
        expected="(1, 1, 1, " + scalar_text(exp[3]) + ")",
        derived="(" + ", ".join(scalar_text(g) for g in got) + ")",
        numbers=(("dispersive coefficient at W=2", f.u_x1x1x1.evaluate(*WITNESS)),),
    )


def _check_kdv_critical(L):
    f = extract_kdv(L)
    v = f.u_x1x1x1.subs(W=3)
    return CheckResult("kdv-critical", v.is_zero(), f"dispersive coefficient at W = 3 is {scalar_text(v)}")


def _check_kdv_elimination(L):
    got = eliminate_xi(L)
    expected = wave_rule(cat.kdv_elimination())
    r = _eq_check("kdv-elimination", got, expected, "proportional", note="printed psi3 bracket carries fourth derivatives; second derivatives used")
    printed = ratio(got, wave_rule(cat.kdv_elimination(as_printed=True))) is not None
    return r.__class__(**{**r.__dict__, "note": r.note + f"; printed form matches: {printed}"})


def _check_Ck(L):
    f = extract_ls(L)
    exp = cat.Ck().reduce_dispersion()
    ok = (f.Ck - exp).reduce_dispersion().is_zero()
    a, b = f.Ck.evaluate(*WITNESS), cat.Ck().evaluate(*WITNESS)
    rel = abs(a - b) / abs(b)
    return CheckResult(
        "Ck",
        ok and rel < 1e-12,
        f"C(k) identical modulo dispersion; relative numeric difference {rel:.2e}",
        expected=str(exp),
        derived=str(f.Ck),
        numbers=(("C(1,2) derived", a), ("C(1,2) reference", b)),
    )


def _check_ls(L):
    f = extract_ls(L)
    vg = group_velocity().reduce_dispersion()
    tc = cat.ls_time_coefficient().reduce_dispersion()
    parts = {
        "A_t2 coefficient": (f.time_coeff - tc).reduce_dispersion().is_zero(),
        "A_x2/A_t2 = Vg": (f.A_speed - vg).reduce_dispersion().is_zero(),
        "B_t1 coefficient": (f.B_time_coeff - tc).reduce_dispersion().is_zero(),
        "B_x1/B_t1 = Vg": (f.B_speed - vg).reduce_dispersion().is_zero(),
        "cubic slot empty": f.cubic.is_zero(),
        "coupling present": not f.coupling.is_zero(),
    }
    ok = all(parts.values())
    return CheckResult("ls", ok, "; ".join(f"{k_}: {v}" for k_, v in parts.items()), derived=f"A = A{f.carrier}, B = A{f.partner}")


def _check_ls_coupling(L):
    f = extract_ls(L)
    exp = cat.ls_coupling().reduce_dispersion()
    r = (f.coupling / exp).reduce_dispersion()
    ok = r.is_one()
    return CheckResult(
        "ls-coupling",
        ok,
        f"A psi1_x1 coefficient is {scalar_text(r)} times the printed w/tanh k",
        gating=False,
        expected=str(exp),
        derived=str(f.coupling),
        note="the printed order-5 kinematic condition drops psi1_x1 * eta3_x0, which halves this coefficient",
    )


def _check_same_order(L):
    t = same_order_table(L)
    ls = [n for n, (a, _) in t.items() if a]
    kdv = [n for n, (_, b) in t.items() if b]
    ok = ls == [5] and kdv == [5]
    return CheckResult("same-order", ok, f"LS-type condition at orders {ls}; KdV-type at orders {kdv}; LS absent at order 4: {4 in t and not t[4][0]}")


def _check_roundtrip(L):
    bad = roundtrip_check(L)
    stored = [f"order {n}: {eq}" for n, r in L.roundtrip.items() for eq, v in r.items() if not v.is_zero()]
    ok = not bad and not stored
    return CheckResult("roundtrip", ok, "all orders close modulo recorded constraints" if ok else "; ".join(bad + stored))


def _check_systems(L, n):
    audit = system_audit(L, n)
    gating_fail = [eq for eq, (ok, _) in audit.items() if not ok and (n, eq) not in PRINTED_OMISSIONS]
    flagged = [eq for eq, (ok, _) in audit.items() if not ok and (n, eq) in PRINTED_OMISSIONS]
    note = "; ".join(f"{eq}: {PRINTED_OMISSIONS[(n, eq)]}, difference {audit[eq][1]}" for eq in flagged)
    return CheckResult(f"system-{n}", not gating_fail, f"printed residuals reproduced except {flagged}" if flagged else ("printed residuals reproduced" if not gating_fail else f"mismatch in {gating_fail}"), note=note)


def _check_printed_kinematic5(L):
    audit = system_audit(L, 5)
    ok, diff = audit["kinematic"]
    return CheckResult("kinematic-5-reference", ok, "printed order-5 kinematic right-hand side is complete" if ok else f"printed right-hand side differs by {diff}", gating=False, note=PRINTED_OMISSIONS[(5, "kinematic")])


def _check_templates(L):
    ls, kdv = extract_ls(L), extract_kdv(L)
    verdict = template_nonderivability(template_slots(ls, kdv))
    ok = all(verdict.values())
    return CheckResult("templates", ok, "; ".join(f"{name}: empty slots {missing}" for name, missing in verdict.items()))


def _state_check(label, order, source, harmonic, expected_fn, at=None, mode="proportional"):
    def fn(L):
        c = _require(L, order, source, harmonic)
        return _eq_check(label, c.state(at or order), expected_fn(), mode)

    return fn


CHECKS: dict[str, tuple[int, Callable]] = {
    "dispersion": (1, _check_dispersion),
    "F2": (2, _check_F2),
    "G2": (2, lambda L: _eq_check("G2", _require(L, 2, "dynamic", 2).lhs, cat.G2())),
    "H2": (2, lambda L: _eq_check("H2", _require(L, 2, "dynamic", 0).lhs, cat.H2())),
    "A-vanishing-2": (2, lambda L: theorem_A_vanishes(L, 2)),
    "closure-2": (2, _state_check("closure-2", 2, "dynamic", 0, cat.closure_2, mode="exact")),
    "secularity-3": (3, _state_check("secularity-3", 3, "kinematic", 0, cat.secularity_3)),
    "first-harmonic-3": (3, lambda L: _eq_check("first-harmonic-3", _require(L, 3, "dynamic", 1).derived, cat.first_harmonic_3())),
    "closure-3": (3, _state_check("closure-3", 3, "dynamic", 0, cat.closure_3, mode="exact")),
    "transport": (3, _check_transport),
    "wave-psi1": (3, _check_wave),
    "secularity-4": (4, _state_check("secularity-4", 4, "kinematic", 0, cat.secularity_4)),
    "wave-psi2": (4, _check_wave2),
    "G4": (4, lambda L: _eq_check("G4", _require(L, 4, "dynamic", 2).lhs, cat.G4())),
    "A-vanishing-4": (4, lambda L: theorem_A_vanishes(L, 4)),
    "closure-4": (4, _state_check("closure-4", 4, "dynamic", 0, cat.closure_4, mode="exact")),
    "secularity-5": (5, _state_check("secularity-5", 5, "kinematic", 0, cat.secularity_5)),
    "closure-5": (5, _state_check("closure-5", 5, "dynamic", 0, cat.closure_5, mode="exact")),
    "kdv-elimination": (5, _check_kdv_elimination),
    "kdv": (5, _check_kdv),
    "kdv-critical": (5, _check_kdv_critical),
    "Ck": (5, _check_Ck),
    "ls": (5, _check_ls),
    "ls-coupling": (5, _check_ls_coupling),
    "same-order": (5, _check_same_order),
    "templates": (5, _check_templates),
    "roundtrip": (1, _check_roundtrip),
    **{f"system-{n}": (n, (lambda n: lambda L: _check_systems(L, n))(n)) for n in range(1, 6)},
    "kinematic-5-reference": (5, _check_printed_kinematic5),
}


DESCRIPTIONS = {
    "dispersion": "order 1, first harmonic: w^2 = (k + k^3/W) tanh k",
    "F2": "order 2, first-harmonic coefficient F (with the homogeneous amplitude B)",
    "G2": "order 2, second-harmonic coefficient G",
    "H2": "order 2, mean-flow coefficient H",
    "A-vanishing-2": "order 2: G = 0 forces A = 0; B is renamed A",
    "closure-2": "order 2 mean flow after A = 0: psi1_t1 + xi2 = 0",
    "secularity-3": "order 3 kinematic secularity: xi2_t1 + psi1_x1x1 = 0",
    "first-harmonic-3": "order 3 first-harmonic condition before rewriting with Vg",
    "closure-3": "order 3 mean flow: psi2_t1 + psi1_t2 + xi3 = 0",
    "transport": "A_t1 + Vg A_x1 = 0 with Vg = dw/dk",
    "wave-psi1": "eliminating xi2: psi1_t1t1 - psi1_x1x1 = 0",
    "secularity-4": "order 4 kinematic secularity",
    "wave-psi2": "eliminating xi2, xi3 at order 4",
    "G4": "order 4 second-harmonic coefficient (same bracket as G)",
    "A-vanishing-4": "order 4: A = 0 again; B, B~ become A, B",
    "closure-4": "order 4 mean flow after the second vanishing event",
    "secularity-5": "order 5 kinematic secularity (the long psi relation)",
    "closure-5": "order 5 mean-flow remainder",
    "kdv-elimination": "eliminating xi2, xi3, xi4 from the order-5 secularity condition",
    "kdv": "u_t3 + u_x3 + u u_x1 + (1/6 - 1/(2W)) u_x1x1x1 = 0, no coupling",
    "kdv-critical": "KdV dispersive coefficient vanishes at W = 3",
    "Ck": "C(k), coefficient of A_x1x1 in the linear Schroedinger equation",
    "ls": "linear Schroedinger equation: time brackets, Vg ratios, empty cubic slot",
    "ls-coupling": "coefficient of A psi1_x1 against the reference value w/tanh k",
    "same-order": "LS and KdV both appear at order 5 and only there",
    "templates": "coupled NLS-KdV and LS-KdV templates are not derivable",
    "roundtrip": "solved fields satisfy every level modulo recorded constraints",
    **{f"system-{n}": f"order-{n} residuals against the reference system" for n in range(1, 6)},
    "kinematic-5-reference": "completeness of the reference order-5 kinematic right-hand side",
}


def check(ledger: Ledger, label: str) -> CheckResult:
    if label not in CHECKS:
        raise UnknownLabel(label)
    need, fn = CHECKS[label]
    _need_order(ledger, need)
    return fn(ledger)


def run_checks(ledger: Ledger, labels=None):
    """Run the catalog; checks needing orders beyond the ledger are skipped."""
    out = []
    for label in labels or CHECKS:
        need, _ = CHECKS[label]
        if need > max(ledger.records, default=0):
            continue
        try:
            out.append(check(ledger, label))
        except (NonreducibleForm, MissingLedgerEntry) as exc:
            out.append(CheckResult(label, False, f"{type(exc).__name__}: {exc}"))
    return out
