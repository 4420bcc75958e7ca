from dataclasses import replace

import pytest

from wwscales import catalog as cat
from wwscales.coeff import ONE, S, const, k, w
from wwscales.hierarchy import (
    HierarchyLevel,
    EulerProblem,
    MissingHistory,
    ResonanceDetected,
    UnsolvableForcing,
    UnsupportedOrder,
    build_level,
    homogeneous_profile,
    resolve_amplitude_vanishing,
    run_pipeline,
    solve_laplace,
)
from wwscales.syntax import parse_expr
from wwscales.terms import FieldExpr, amp


def _level(n, laplace, bottom=FieldExpr()):
    return HierarchyLevel(n, laplace, FieldExpr(), FieldExpr(), bottom)


def test_order_one_is_homogeneous():
    lv = build_level(1, {})
    for r in (lv.residual_laplace, lv.residual_kinematic, lv.residual_dynamic, lv.residual_bottom):
        assert r.is_zero()


def test_unsupported_and_missing():
    with pytest.raises(UnsupportedOrder):
        EulerProblem(max_order=6)
    with pytest.raises(UnsupportedOrder):
        build_level(4, {}, EulerProblem(max_order=3))
    with pytest.raises(MissingHistory):
        build_level(3, {})


def test_order_two_kinematic_residual():
    led = run_pipeline(max_order=1)
    lv = build_level(2, led.snapshots.get(2, led.records))
    kin = lv.residual_kinematic
    # -eta1_t1 - phi1_x0 eta1_x0 with the order-1 fields before xi1 := 0 is applied
    assert kin.harmonic_coeff(1) == parse_expr("(-1) * A1[t1]")
    # (i k)(-i w C/(k S)) A * (i k) A, negated
    assert kin.harmonic_coeff(2) == parse_expr("(-I*k*w*cosh(k)/sinh(k)) * A1^2")


def test_laplace_resonant_forcing():
    rhs = FieldExpr.term(-2 * w / S, harmonic=1, vertical=(1, 1), amps=(amp("A", 1, "x1"),))
    phi, fresh = solve_laplace(_level(2, rhs))
    part = phi - FieldExpr.term(homogeneous_profile(), harmonic=1, vertical=(1, 1), amps=(amp("A", 2),)).real_closure()
    part = part - FieldExpr.amp(amp("psi", 2))
    assert part == FieldExpr.term(-w / (k * S), harmonic=1, ypow=1, vertical=(2, 1), amps=(amp("A", 1, "x1"),))
    assert fresh == (("A", 2), ("psi", 2))
    assert phi.laplace0() == rhs


def test_laplace_slow_forcing():
    rhs = FieldExpr.amp(amp("psi", 1, "x1", "x1"), -ONE)
    phi, _ = solve_laplace(_level(3, rhs), EulerProblem(include_homogeneous=False))
    assert phi == parse_expr("(-1/2) * Y^2 * psi1[x1^2] + (1) * psi3")
    rhs = FieldExpr.term(const(1) / 2, ypow=2, amps=(amp("psi", 1, "x1", "x1", "x1", "x1"),))
    phi, _ = solve_laplace(_level(5, rhs), EulerProblem(include_homogeneous=False))
    assert phi.coeff_of((0, 4, (0, 0), ((amp("psi", 1, "x1", "x1", "x1", "x1"), 1),))) == const(1) / 24


def test_laplace_rejects_outside_ansatz():
    bad = FieldExpr.term(ONE, harmonic=1, vertical=(1, 2), amps=(amp("A", 1),))
    with pytest.raises(UnsolvableForcing):
        solve_laplace(_level(2, bad))
    with pytest.raises(UnsolvableForcing):
        solve_laplace(_level(2, FieldExpr.term(ONE, vertical=(1, 1))))


def test_bottom_condition(ledger):
    for rec in ledger.records.values():
        assert rec.phi_raw.d_fast("y").restrict_bottom().is_zero()


def test_laplace_solutions_match_residuals(ledger):
    for n, rec in ledger.records.items():
        assert rec.phi_raw.laplace0() == ledger.levels[n].residual_laplace


def test_constraints_are_y_free_and_consistent(ledger):
    for c in ledger.constraints:
        for (m, p, v, _), _ in c.lhs.items():
            assert m == 0 and p == 0 and v == (0, 0)


def test_roundtrip_zero(ledger):
    assert set(ledger.roundtrip) == {1, 2, 3, 4, 5}
    for n, r in ledger.roundtrip.items():
        assert all(e.is_zero() for e in r.values()), n


def test_eta1_before_events():
    led = run_pipeline(max_order=1)
    assert led.records[1].eta_raw == parse_expr("(1) * xi1 + (1) * A1 * E^1 + (1) * A1~ * E^-1")
    assert [e.symbol + str(e.index) for e in led.events] == ["xi1"]


def test_vanishing_events(ledger):
    van = [e for e in ledger.events if e.kind == "amplitude-vanishing"]
    assert [(e.order, e.index) for e in van] == [(2, 1), (4, 2)]
    assert dict(van[0].renaming) == {"A2": "A"}
    assert dict(van[1].renaming) == {"A3": "A", "A4": "B"}
    for e in van:
        assert abs(e.witness - 2.3831337754) < 1e-9
    assert ledger.records[1].eta.is_zero()
    assert ledger.records[1].phi == parse_expr("(1) * psi1")


def test_resonance_guard():
    led = run_pipeline(max_order=2)
    c = led.find(2, "dynamic", 2)
    # w^2 - (k + k^3/W) tanh k is nonzero as an element but vanishes on the branch
    fake = parse_expr("(1) * A1^2").scale(cat.dispersion_relation())
    assert not cat.dispersion_relation().is_zero()
    with pytest.raises(ResonanceDetected):
        resolve_amplitude_vanishing(led, replace(c, current=fake))


def test_resonance_W_annihilates_bracket():
    g = cat.vanishing_bracket_reduced()
    assert g.subs(W=cat.negative_resonance_W()).is_zero()


def test_max_order_three_has_transport_data(ledger3):
    assert max(ledger3.records) == 3
    c = ledger3.find(3, "dynamic", 1)
    assert c is not None and c.tag == "transport"
    assert ledger3.find(3, "kinematic", 0).tag == "secularity"


def test_harmonics_bounded(ledger):
    for lv in ledger.levels.values():
        for r in (lv.residual_laplace, lv.residual_kinematic, lv.residual_dynamic):
            assert all(abs(m) <= 2 for m in r.harmonics())


def test_taylor_mode_runs():
    led = run_pipeline(problem=EulerProblem(max_order=3, surface="taylor"))
    assert all(all(e.is_zero() for e in r.values()) for r in led.roundtrip.values())


def test_suppressed_homogeneous_breaks_balance():
    led = run_pipeline(problem=EulerProblem(max_order=3, include_homogeneous=False))
    assert ("A", 2) not in led.records[2].fresh_symbols
    assert led.carriers() == []


def test_deterministic():
    a, b = run_pipeline(max_order=3), run_pipeline(max_order=3)
    assert [str(c.current) for c in a.constraints] == [str(c.current) for c in b.constraints]
