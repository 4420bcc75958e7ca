"""Reference equations, transcribed into internal amplitude names.

Carrier letters depend on the epoch: at order 2 the carrier is A1 and the new
homogeneous amplitude is A2; after the first vanishing event A2 is the carrier
and A3 the new amplitude; after the second, A3 and A4 play those roles and A5
is the newest.  Coefficients are written with the scalar grammar of
:mod:`wwscales.syntax`.
"""
from __future__ import annotations

from .coeff import ONE, C, S, W, const, group_velocity, k, w
from .syntax import parse_expr, parse_scalar
from .terms import FieldExpr, amp

# (1 + k coth k) is abbreviated as P below
_P = "(1 + k*coth(k))"


def _e(text):
    return parse_expr(text)


def dispersion_constraint():
    """(-w^2 cosh k/(k sinh k) + 1 + k^2/W) A = 0."""
    return _e("(-w^2*cosh(k)/(k*sinh(k)) + 1 + k^2/W) * A1")


def dispersion_relation():
    """w^2 - (k + k^3/W) tanh k, the canonical form of the relation."""
    return parse_scalar("w^2 - (k + k^3/W)*tanh(k)")


def F2():
    return _e(
        f"(I*w^2/k - I/k*(1 + k^2/W)*{_P} - 2*I*k/W) * A1[x1]"
        " + (-I*w/(k*tanh(k)) - I/w*(1 + k^2/W)) * A1[t1]"
        " + (-w^2/(k*tanh(k)) + 1 + k^2/W) * A2"
    )


def F2_variant():
    """Variant printed in the overview, with cosh k in place of coth k."""
    return _e(
        "(I*w^2/k - 2*I*k/W - I/k*(1 + k^2/W)*(1 + k*cosh(k))) * A1[x1]"
        " + (-I*w/(k*tanh(k)) - I/w*(1 + k^2/W)) * A1[t1]"
        " + (-w^2/(k*tanh(k)) + 1 + k^2/W) * A2"
    )


def G2():
    return _e("(1/2*w^2/tanh(k)^2 - 1/2*w^2 + (1 + 4*k^2/W)*k/(2*tanh(k))) * A1^2")


def H2():
    return _e("(1) * psi1[t1] + (w^2/tanh(k)^2 + w^2) * A1 * A1~ + (1) * xi2")


def closure_2():
    return _e("(1) * psi1[t1] + (1) * xi2")


def secularity_3():
    return _e("(1) * xi2[t1] + (1) * psi1[x1^2]")


def first_harmonic_3():
    """Order-3 first-harmonic condition; carrier A2."""
    return _e(
        f"(I*w^2/k - I/k*(1 + k^2/W)*{_P} - 2*I*k/W) * A2[x1]"
        " + (-I*w/(k*tanh(k)) - I/w*(1 + k^2/W)) * A2[t1]"
    )


def closure_3():
    return _e("(1) * psi2[t1] + (1) * psi1[t2] + (1) * xi3")


def transport(index):
    """A_t1 + Vg A_x1 = 0 for carrier ``index``."""
    return FieldExpr.amp(amp("A", index, "t1")) + FieldExpr.amp(amp("A", index, "x1"), group_velocity())


def wave_psi1():
    return _e("(1) * psi1[t1^2] + (-1) * psi1[x1^2]")


def secularity_4():
    return _e("(1) * psi2[x1^2] + (2) * psi1[x1,x2] + (1) * xi3[t1] + (1) * xi2[t2]")


def wave_psi2():
    return _e("(1) * psi2[t1^2] + (-1) * psi2[x1^2] + (2) * psi1[t1,t2] + (-2) * psi1[x1,x2]")


def G4():
    """Second-harmonic part of the order-4 dynamic condition; carrier A2."""
    return _e("(1/2*w^2/tanh(k)^2 - 1/2*w^2 + (1 + 4*k^2/W)*k/(2*tanh(k))) * A2^2")


def closure_4():
    return _e(
        "(-1/2) * psi1[x1^2,t1] + (1) * psi3[t1] + (1) * psi2[t2] + (1) * psi1[t3]"
        " + (1/2) * psi1[x1]^2 + (1) * xi4 + (-1/W) * xi2[x1^2]"
    )


def secularity_5():
    return _e(
        "(1/6) * psi1[x1^4] + (-1) * psi3[x1^2] + (-2) * psi2[x1,x2] + (-1) * psi1[x2^2]"
        " + (-2) * psi1[x1,x3] + (-1) * xi4[t1] + (-1) * xi3[t2] + (-1) * xi2[t3]"
        " + (-1) * psi1[x1] * xi2[x1]"
    )


def kdv_elimination(as_printed=False):
    """Result of eliminating xi2, xi3, xi4 from secularity_5.

    The printed display differentiates psi3 four times in its second bracket;
    the consistent form (and the default here) uses second derivatives.
    """
    p3 = "(1) * psi3[t1^4] + (-1) * psi3[x1^4]" if as_printed else "(1) * psi3[t1^2] + (-1) * psi3[x1^2]"
    return _e(
        "(1/W - 1/3) * psi1[x1^4] + " + p3 + " + (2) * psi2[t1,t2] + (-2) * psi2[x1,x2]"
        " + (2) * psi1[t1,t3] + (-2) * psi1[x1,x3] + (1) * psi1[t2^2] + (-1) * psi1[x2^2]"
        " + (2) * psi1[x1] * psi1[x1,t1]"
    )


def closure_5():
    """Harmonic-0 remainder of the order-5 dynamic condition."""
    return _e(
        "(-1/2) * psi2[x1^2,t1] + (-1) * psi1[x1,x2,t1] + (1) * psi4[t1] + (-1/2) * psi1[x1^2,t2]"
        " + (1) * psi3[t2] + (1) * psi2[t3] + (1) * psi1[t4] + (-1/W) * xi3[x1^2]"
        " + (-2/W) * xi2[x1,x2] + (1) * xi5 + (1) * psi1[x1] * psi1[x2] + (1) * psi1[x1] * psi2[x1]"
    )


def kdv_coefficients():
    """(u_t3, u_x3, u u_x1, u_x1x1x1) coefficients of the reference KdV equation."""
    return (ONE, ONE, ONE, const(1) / 6 - ONE / (2 * W))


def Ck():
    """Coefficient of A_x1x1 in the first-harmonic order-5 condition, after transport."""
    T = S / C
    Vg = group_velocity()
    coth = C / S
    return (
        -Vg * Vg / (k * T)
        + Vg * (w / k + w / (k * k * T) * (ONE + k * coth) + 2 * k / (w * W))
        - w * w / (k * k * T * T)
        - (3 + 2 * k * coth) / W
    )


def ls_time_coefficient():
    """Coefficient of the bracket (A_t2 + Vg A_x2) and of (B_t1 + Vg B_x1)."""
    return -2 * parse_scalar("I*w") / (k * S / C)


def ls_coupling():
    """Coefficient of A psi1_x1 as displayed."""
    return w * C / S


def vanishing_bracket():
    """Second-harmonic coefficient of A^2 (identical at orders 2 and 4)."""
    return parse_scalar("1/2*w^2/tanh(k)^2 - 1/2*w^2 + (1 + 4*k^2/W)*k/(2*tanh(k))")


def vanishing_bracket_reduced():
    """The same bracket after eliminating w^2: strictly positive for k, W > 0."""
    return parse_scalar("(k + k^3/W)/(2*sinh(k)*cosh(k)) + (1 + 4*k^2/W)*k*cosh(k)/(2*sinh(k))")


def negative_resonance_W():
    """W at which the reduced bracket vanishes; negative for every real k != 0."""
    return -(k * k) * (1 + 4 * C * C) / (1 + C * C)
