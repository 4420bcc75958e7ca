"""Order-by-order Euler hierarchy: residual construction, level solvers, constraint ledger.

Unknowns at order n are the potential phi_n (y-dependent) and the elevation
eta_n.  The carrier amplitude introduced as the homogeneous Laplace solution at
order n is ``A_n`` internally (``A1`` is the first-order carrier); the reports
map surviving carriers to the letters A, B, B~ after each vanishing event.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .coeff import ONE, I, S, W, ScalarCoeff, const, k, w
from .series import Series, binomial, power_series, surface_value
from .terms import DEFAULT_TRUNCATION, ONE_V, FieldExpr, Truncation, amp

MAX_SUPPORTED_ORDER = 5
MAX_HARMONIC = 2

TAGS = ("dispersion", "algebraic-harmonic", "secularity", "transport", "closure")


class PipelineError(RuntimeError):
    pass


class UnsupportedOrder(PipelineError):
    pass


class MissingHistory(PipelineError):
    pass


class UnsolvableForcing(PipelineError):
    pass


class ResonanceDetected(PipelineError):
    pass


class HarmonicOverflow(PipelineError):
    pass


@dataclass(frozen=True)
class EulerProblem:
    """Configuration of one derivation run.

    ``surface`` selects how boundary conditions are evaluated at y = eta:
    ``"flat"`` evaluates the fields at y = 0 (the convention of the reference
    displays), ``"taylor"`` expands about y = 0 to depth n - 1 at order n.
    """

    max_order: int = 5
    include_homogeneous: bool = True
    surface: str = "flat"
    truncation: Truncation = DEFAULT_TRUNCATION

    def __post_init__(self):
        if not 1 <= self.max_order <= MAX_SUPPORTED_ORDER:
            raise UnsupportedOrder(f"max_order must be in 1..{MAX_SUPPORTED_ORDER}, got {self.max_order}")
        if self.surface not in ("flat", "taylor"):
            raise ValueError(f"unknown surface mode {self.surface!r}")

    def taylor_depth(self, n):
        return 0 if self.surface == "flat" else n - 1


# records -----------------------------------------------------------------


@dataclass(frozen=True)
class HierarchyLevel:
    """Right-hand sides of the order-n system after moving known terms across.

    Linear parts:  laplace0(phi_n) = residual_laplace;
    eta_n,t0 - phi_n,y = residual_kinematic at y = 0;
    phi_n,t0 + eta_n - eta_n,x0x0 / W = residual_dynamic at y = 0;
    phi_n,y = residual_bottom at y = -1.
    """

    order: int
    residual_laplace: FieldExpr
    residual_kinematic: FieldExpr
    residual_dynamic: FieldExpr
    residual_bottom: FieldExpr

    @property
    def id(self):
        return f"L{self.order}"


@dataclass(frozen=True)
class Constraint:
    id: str
    order: int
    source: str  # "kinematic" | "dynamic"
    harmonic: int
    tag: str
    lhs: FieldExpr  # as derived
    current: FieldExpr  # after eliminations and later substitution events
    notes: tuple = ()
    trail: tuple = ()  # ((event order, expression after that event), ...)

    @property
    def derived(self):
        """Form at creation, after same-level eliminations but before any event."""
        return self.trail[0][1] if self.trail else self.current

    def state(self, order):
        """Form after all events raised at orders <= ``order``."""
        out = self.trail[0][1]
        for o, e in self.trail[1:]:
            if o <= order:
                out = e
        return out

    def is_satisfied(self):
        return self.current.is_zero()


@dataclass(frozen=True)
class SolutionRecord:
    order: int
    phi: FieldExpr
    eta: FieldExpr
    fresh_symbols: tuple
    constraint_ids: tuple
    phi_raw: FieldExpr
    eta_raw: FieldExpr

    @property
    def id(self):
        return f"S{self.order}"


@dataclass(frozen=True)
class SubstitutionEvent:
    id: str
    kind: str  # "derived-zero" | "amplitude-vanishing"
    order: int
    symbol: str
    index: int
    constraint_id: str
    coefficient: Optional[ScalarCoeff] = None
    reduced: Optional[ScalarCoeff] = None
    witness: Optional[float] = None
    renaming: tuple = ()  # ((internal name, display letter), ...)


@dataclass
class Ledger:
    problem: EulerProblem
    levels: dict = field(default_factory=dict)
    records: dict = field(default_factory=dict)
    constraints: list = field(default_factory=list)
    events: list = field(default_factory=list)
    roundtrip: dict = field(default_factory=dict)
    snapshots: dict = field(default_factory=dict)  # order -> {m: (phi_m, eta_m)} used to build that level

    def constraint(self, cid):
        for c in self.constraints:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def find(self, order, source, harmonic):
        for c in self.constraints:
            if (c.order, c.source, c.harmonic) == (order, source, harmonic):
                return c
        return None

    def killed(self):
        return {e.index for e in self.events if e.kind == "amplitude-vanishing"}

    def carriers(self):
        """Surviving carrier indices in order of introduction."""
        dead = self.killed()
        return [n for n in sorted(self.records) if ("A", n) in self.records[n].fresh_symbols and n not in dead]

    def display_names(self):
        return carrier_letters(self.carriers())

    def apply(self, fn, order):
        """Apply an expression map (an event raised at ``order``) to every record and constraint."""
        for n, rec in list(self.records.items()):
            self.records[n] = replace(rec, phi=fn(rec.phi), eta=fn(rec.eta))
        out = []
        for c in self.constraints:
            new = fn(c.current)
            trail = c.trail + ((order, new),) if new != c.current else c.trail
            out.append(replace(c, current=new, trail=trail))
        self.constraints = out


LETTERS = ("A", "B", "B~")


def carrier_letters(indices):
    return {f"A{n}": LETTERS[i] if i < len(LETTERS) else f"A{n}" for i, n in enumerate(indices)}


# residuals ---------------------------------------------------------------


def _check_harmonics(expr, what):
    for m in expr.harmonics():
        if abs(m) > MAX_HARMONIC:
            raise HarmonicOverflow(f"{what} carries harmonic {m}")


def build_level(n, history, problem: EulerProblem = EulerProblem()) -> HierarchyLevel:
    """Order-n residuals from the records of orders < n (unknowns of order n set to zero)."""
    if not 1 <= n <= problem.max_order:
        raise UnsupportedOrder(f"order {n} outside 1..{problem.max_order}")
    missing = [m for m in range(1, n) if m not in history]
    if missing:
        raise MissingHistory(f"order {n} needs solutions for orders {missing}")
    tr = problem.truncation
    phi = Series.known({m: history[m].phi for m in range(1, n)})
    eta = Series.known({m: history[m].eta for m in range(1, n)})
    depth = problem.taylor_depth(n)

    def at_surface(s):
        return surface_value(s, eta, depth)

    lap = phi.d2("x", tr)
    kin = eta.d("t", tr) - at_surface(phi.dy()) + at_surface(phi.d("x", tr)) * eta.d("x", tr)
    eta_x = eta.d("x", tr)
    curvature = power_series(eta_x * eta_x, lambda r: binomial(Fraction(-3, 2), r))
    phi_x = at_surface(phi.d("x", tr))
    phi_y = at_surface(phi.dy())
    dyn = (
        at_surface(phi.d("t", tr))
        + (phi_x * phi_x + phi_y * phi_y).scale(const(Fraction(1, 2)))
        + eta
        - (eta.d2("x", tr) * curvature).scale(ONE / W)
    )
    bottom = phi.dy().map(lambda f: f.restrict_bottom())
    level = HierarchyLevel(n, -lap[n], -kin[n], -dyn[n], -bottom[n])
    for name in ("residual_laplace", "residual_kinematic", "residual_dynamic", "residual_bottom"):
        _check_harmonics(getattr(level, name), f"{name} at order {n}")
    return level


# solvers -----------------------------------------------------------------


def homogeneous_profile():
    """Coefficient of cosh(kY) e^{i theta} per unit surface amplitude: -i w / (k sinh k)."""
    return -I * w / (k * S)


def _particular(rhs):
    sol = FieldExpr()
    rest = rhs
    for _ in range(10_000):
        if rest.is_zero():
            return sol
        key, c = max(rest.items(), key=lambda kv: kv[0][1])
        m, p, (kind, mm), amps = key
        if m == 0:
            if kind:
                raise UnsolvableForcing(f"harmonic-0 hyperbolic forcing {key}")
            u = FieldExpr({(0, p + 2, ONE_V, amps): c / const((p + 1) * (p + 2))})
        else:
            if kind == 0 or mm != abs(m):
                raise UnsolvableForcing(f"forcing outside the ansatz family: {key}")
            u = FieldExpr({(m, p + 1, (3 - kind, mm), amps): c / (const(2 * (p + 1) * mm) * k)})
        sol = sol + u
        rest = rest - u.laplace0()
    raise UnsolvableForcing("particular solution did not terminate")


def solve_laplace(level: HierarchyLevel, problem: EulerProblem = EulerProblem()):
    """phi_n = particular + bottom correction + homogeneous parts; returns (phi_n, fresh symbols)."""
    n = level.order
    phi = _particular(level.residual_laplace)
    # bottom condition phi_y = residual_bottom at Y = 0
    mismatch = phi.d_fast("y").restrict_bottom() - level.residual_bottom
    for (m, _, _, amps), c in mismatch.items():
        if m == 0:
            raise UnsolvableForcing("harmonic-0 bottom flux cannot be removed")
        mm = abs(m)
        phi = phi - FieldExpr({(m, 0, (2, mm), amps): c / (const(mm) * k)})
    fresh = []
    if n == 1 or problem.include_homogeneous:
        carrier = FieldExpr.term(homogeneous_profile(), harmonic=1, vertical=(1, 1), amps=(amp("A", n),))
        phi = phi + carrier.real_closure()
        fresh.append(("A", n))
    phi = phi + FieldExpr.amp(amp("psi", n))
    fresh.append(("psi", n))
    return phi, tuple(fresh)


def solve_kinematic(level: HierarchyLevel, phi_n: FieldExpr):
    """(eta_n, secular part); the secular part must vanish."""
    forcing = phi_n.d_fast("y").restrict_surface() + level.residual_kinematic
    anti, secular = forcing.integrate_t0()
    eta = anti + FieldExpr.amp(amp("xi", level.order))
    return eta, secular


def dynamic_balance(level: HierarchyLevel, phi_n, eta_n):
    """Left side minus right side of the order-n dynamic condition."""
    return (
        phi_n.d_fast("t0").restrict_surface()
        + eta_n
        - eta_n.d_fast("x0").d_fast("x0").scale(ONE / W)
        - level.residual_dynamic
    )


def solve_dynamic(level: HierarchyLevel, phi_n, eta_n, fresh):
    """Harmonic components of the dynamic balance as (harmonic, lhs, current, tag, notes)."""
    n = level.order
    bal = dynamic_balance(level, phi_n, eta_n)
    out = []
    for m in bal.harmonics():
        if m < 0:
            continue
        lhs = bal.harmonic_coeff(m)
        if m and bal.harmonic_coeff(-m) != lhs.conjugate():
            raise PipelineError(f"order {n} harmonic {m} is not conjugate-consistent")
        current, notes = lhs, ()
        if m == 0:
            tag = "closure"
        elif m == 1 and n == 1:
            tag = "dispersion"
        elif m == 1:
            tag = "transport"
            if ("A", n) in fresh:
                key = (0, 0, ONE_V, ((amp("A", n), 1),))
                cb = lhs.coeff_of(key)
                if not cb.reduce_dispersion().is_zero():
                    raise PipelineError(f"order {n}: homogeneous amplitude coefficient survives dispersion")
                current = lhs - FieldExpr({key: cb})
                notes = (f"A{n} coefficient vanishes by dispersion",)
        elif m == 2:
            tag = "algebraic-harmonic"
        else:
            raise HarmonicOverflow(f"order {n} dynamic condition carries harmonic {m}")
        out.append((m, lhs, current, tag, notes))
    return out


def _rebuild(components):
    """sum_m current_m e^{i m theta} + c.c. for m > 0, plus the m = 0 part."""
    acc = []
    for m, expr in components:
        part = expr.with_harmonic(m)
        acc.append(part if m == 0 else part.real_closure())
    return FieldExpr.sum(acc)


def roundtrip_residuals(level, phi_n, eta_n, kin_secular, dyn_components):
    """Each of the four order-n equations minus the recorded constraints; all zero when consistent."""
    lap = phi_n.laplace0() - level.residual_laplace
    bottom = phi_n.d_fast("y").restrict_bottom() - level.residual_bottom
    kin = (
        eta_n.d_fast("t0")
        - phi_n.d_fast("y").restrict_surface()
        - level.residual_kinematic
        + kin_secular
    )
    dyn = dynamic_balance(level, phi_n, eta_n) - _rebuild(dyn_components)
    dyn = dyn.map_coeffs(lambda c: c.reduce_dispersion())
    return {"laplace": lap, "bottom": bottom, "kinematic": kin, "dynamic": dyn}


# events ------------------------------------------------------------------


def _single_term(expr):
    if len(expr) != 1:
        return None
    ((key, c),) = expr.items()
    return key, c


def resolve_amplitude_vanishing(ledger: Ledger, constraint: Constraint, witness_point=(1.0, 2.0)):
    """Algebraic second-harmonic constraint c*A_j^2 = 0 with c != 0 forces A_j = 0."""
    st = _single_term(constraint.current)
    if st is None:
        raise PipelineError(f"{constraint.id} is not of the form c*A^2: {constraint.current}")
    (m, p, v, amps), c = st
    if len(amps) != 1 or amps[0][1] != 2 or amps[0][0].symbol != "A" or amps[0][0].deriv:
        raise PipelineError(f"{constraint.id} is not of the form c*A^2: {constraint.current}")
    a = amps[0][0]
    reduced = c.reduce_dispersion()
    if reduced.is_zero():
        raise ResonanceDetected(f"{constraint.id}: reduced second-harmonic coefficient vanishes identically")
    witness = reduced.evaluate(*witness_point)
    ledger.apply(lambda e: e.subs_amp("A", a.index), constraint.order)
    ev_id = f"E{len(ledger.events) + 1}"
    provisional = SubstitutionEvent(ev_id, "amplitude-vanishing", constraint.order, "A", a.index, constraint.id)
    ledger.events.append(provisional)
    names = ledger.display_names()
    event = replace(
        provisional,
        coefficient=c,
        reduced=reduced,
        witness=witness,
        renaming=tuple(sorted(names.items(), key=lambda kv: int(kv[0][1:]))),
    )
    ledger.events[-1] = event
    return event


def _derived_zero(ledger: Ledger, constraint: Constraint):
    """A closure constraint c*xi_n = 0 (c a nonzero scalar) fixes xi_n = 0."""
    st = _single_term(constraint.current)
    if st is None:
        return None
    (m, p, v, amps), c = st
    if m or len(amps) != 1 or amps[0][1] != 1:
        return None
    a = amps[0][0]
    if a.deriv or a.symbol != "xi":
        return None
    ledger.apply(lambda e: e.subs_amp("xi", a.index), constraint.order)
    event = SubstitutionEvent(
        f"E{len(ledger.events) + 1}", "derived-zero", constraint.order, "xi", a.index, constraint.id, coefficient=c
    )
    ledger.events.append(event)
    return event


# driver ------------------------------------------------------------------


def solve_order(ledger: Ledger, n):
    problem = ledger.problem
    ledger.snapshots[n] = {m: (r.phi, r.eta) for m, r in ledger.records.items()}
    level = build_level(n, ledger.records, problem)
    phi, fresh = solve_laplace(level, problem)
    eta, secular = solve_kinematic(level, phi)
    dyn = solve_dynamic(level, phi, eta, fresh)

    new = []
    if not secular.is_zero():
        new.append(Constraint(f"o{n}.kin.m0", n, "kinematic", 0, "secularity", secular, secular, (), ((n, secular),)))
    for m, lhs, current, tag, notes in dyn:
        new.append(Constraint(f"o{n}.dyn.m{m}", n, "dynamic", m, tag, lhs, current, notes, ((n, current),)))

    ledger.levels[n] = level
    ledger.roundtrip[n] = roundtrip_residuals(level, phi, eta, secular, [(m, cur) for m, _, cur, _, _ in dyn])
    ledger.records[n] = SolutionRecord(n, phi, eta, fresh, tuple(c.id for c in new), phi, eta)
    ledger.constraints.extend(new)

    for c in new:
        c = ledger.constraint(c.id)
        if c.tag == "closure":
            _derived_zero(ledger, c)
        elif c.tag == "algebraic-harmonic":
            resolve_amplitude_vanishing(ledger, c)
    return level


def run_pipeline(max_order=None, problem: Optional[EulerProblem] = None) -> Ledger:
    problem = problem or EulerProblem()
    if max_order is not None and max_order != problem.max_order:
        problem = replace(problem, max_order=max_order)
    ledger = Ledger(problem)
    for n in range(1, problem.max_order + 1):
        solve_order(ledger, n)
    return ledger
