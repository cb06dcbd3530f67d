"""Closed-form distances against independent oracles.

The elliptic integral is compared with direct quadrature of its defining
integrand and with frozen reference values; the Fock constants are checked
as exact rationals and against the area above the Fock radial CDF, which
is what they measure.
"""

import math
from fractions import Fraction

import pytest

from qmonge import (
    Fock,
    PhasePoint,
    ORIGIN,
    dist_coherent,
    dist_fock,
    dist_thermal,
    dist_vacuum_squeezed,
    elliptic_e,
    fock_constant,
    radial_cdf,
)
from qmonge.numerics import adaptive_simpson

SQRT_PI = math.sqrt(math.pi)


# ------------------------------------------------------ elliptic integral --


def test_elliptic_e_endpoints():
    assert elliptic_e(0.0) == pytest.approx(math.pi / 2.0, rel=1e-15)
    assert elliptic_e(1.0) == 1.0


def test_elliptic_e_frozen_values():
    # reference values of int_0^{pi/2} sqrt(1 - m sin^2 t) dt
    assert elliptic_e(0.5) == pytest.approx(1.3506438810476755, rel=1e-14)
    assert elliptic_e(0.75) == pytest.approx(1.2110560275684594, rel=1e-14)
    assert elliptic_e(8.0 / 9.0) == pytest.approx(1.1137411017129382, rel=1e-14)


def test_elliptic_e_matches_defining_integral():
    for m in (0.1, 0.3, 0.6, 0.9, 0.99):
        direct = adaptive_simpson(
            lambda t: math.sqrt(1.0 - m * math.sin(t) ** 2), 0.0, math.pi / 2.0, tol=1e-13
        )
        assert elliptic_e(m) == pytest.approx(direct, abs=1e-12)


def test_elliptic_e_rejects_bad_parameter():
    with pytest.raises(ValueError):
        elliptic_e(-0.1)
    with pytest.raises(ValueError):
        elliptic_e(1.1)


# -------------------------------------------------------- coherent states --


def test_dist_coherent_is_center_separation():
    a = PhasePoint(1.0, 2.0)
    b = PhasePoint(4.0, -2.0)
    assert dist_coherent(a, b).value == 5.0
    assert dist_coherent(a, a).value == 0.0
    # independent of the order p, including the sup-displacement case
    for p in (1.0, 1.5, 2.0, math.inf):
        r = dist_coherent(a, b, p)
        assert r.value == 5.0
        assert r.p == p
        assert r.method == "analytic"


def test_dist_coherent_rejects_bad_p():
    with pytest.raises(ValueError):
        dist_coherent(ORIGIN, PhasePoint(1.0, 0.0), 0.5)
    with pytest.raises(ValueError):
        dist_coherent(ORIGIN, PhasePoint(1.0, 0.0), math.nan)


# ------------------------------------------------------- vacuum / squeezed --


def test_vacuum_squeezed_order_one():
    # (s/sqrt(pi)) E(m) at m = (s^2+2s)/(s^2+2s+1); frozen from the
    # elliptic references above
    assert dist_vacuum_squeezed(1.0).value == pytest.approx(0.6832651958468492, rel=1e-13)
    assert dist_vacuum_squeezed(2.0).value == pytest.approx(1.2567222567108838, rel=1e-13)
    assert dist_vacuum_squeezed(0.5).value == pytest.approx(0.3729631564451643, rel=1e-13)
    r = dist_vacuum_squeezed(1.0)
    assert r.diagnostics["elliptic_parameter"] == pytest.approx(0.75, rel=1e-15)
    assert dist_vacuum_squeezed(0.0).value == 0.0


def test_vacuum_squeezed_order_two():
    # sqrt(s^2/2 (1 + 1/(s+1)^2))
    assert dist_vacuum_squeezed(1.0, 2.0).value == pytest.approx(
        math.sqrt(0.625), rel=1e-15
    )
    for s in (0.5, 1.0, 2.0, 5.0):
        want = math.sqrt(0.5 * s * s * (1.0 + 1.0 / (s + 1.0) ** 2))
        assert dist_vacuum_squeezed(s, 2.0).value == pytest.approx(want, rel=1e-15)


def test_vacuum_squeezed_sup_displacement():
    for s in (0.5, 1.0, 3.0):
        assert dist_vacuum_squeezed(s, math.inf).value == s


def test_vacuum_squeezed_order_relations():
    # D_1 <= D_2 <= D_inf for every s > 0
    for s in (0.25, 1.0, 2.0, 8.0):
        d1 = dist_vacuum_squeezed(s, 1.0).value
        d2 = dist_vacuum_squeezed(s, 2.0).value
        dinf = dist_vacuum_squeezed(s, math.inf).value
        assert d1 <= d2 <= dinf


def test_vacuum_squeezed_large_s_slope():
    # E(m) -> 1 as s grows, so D_1 / s -> 1/sqrt(pi)
    s = 1000.0
    assert abs(dist_vacuum_squeezed(s).value / s - 1.0 / SQRT_PI) <= 1e-2


def test_vacuum_squeezed_unsupported_order():
    with pytest.raises(ValueError):
        dist_vacuum_squeezed(1.0, 1.5)
    with pytest.raises(ValueError):
        dist_vacuum_squeezed(-1.0)


# ---------------------------------------------------------------- thermal --


def test_dist_thermal_closed_form():
    # (sqrt(pi)/2) |sqrt(n1+1) - sqrt(n2+1)|
    assert dist_thermal(1.0, 3.0).value == pytest.approx(0.5191397135900157, rel=1e-14)
    assert dist_thermal(0.0, 3.0).value == pytest.approx(SQRT_PI / 2.0, rel=1e-14)
    assert dist_thermal(2.0, 2.0).value == 0.0
    assert dist_thermal(3.0, 1.0).value == dist_thermal(1.0, 3.0).value
    with pytest.raises(ValueError):
        dist_thermal(-1.0, 0.0)


# ------------------------------------------------------------ Fock states --


def test_fock_constants_exact():
    assert fock_constant(0) == Fraction(1, 2)
    assert fock_constant(1) == Fraction(3, 4)
    assert fock_constant(2) == Fraction(15, 16)
    assert fock_constant(3) == Fraction(35, 32)
    assert fock_constant(4) == Fraction(315, 256)
    with pytest.raises(ValueError):
        fock_constant(-1)


def test_fock_constant_is_area_above_radial_cdf():
    # sqrt(pi) C_n = int_0^inf (1 - F_n(r)) dr for the Fock radial CDF
    for n in (0, 1, 2, 4):
        F = radial_cdf(Fock(n))
        area = adaptive_simpson(lambda r: 1.0 - F(r), 0.0, F.tail_radius + 2.0, tol=1e-12)
        assert area == pytest.approx(SQRT_PI * float(fock_constant(n)), abs=1e-9)


def test_dist_fock_values():
    assert dist_fock(0, 1).value == pytest.approx(SQRT_PI / 4.0, rel=1e-15)
    assert dist_fock(1, 0).value == dist_fock(0, 1).value
    assert dist_fock(3, 3).value == 0.0
    # distances accumulate along the Fock ladder: |C_m - C_n| telescopes
    d02 = dist_fock(0, 2).value
    assert d02 == pytest.approx(dist_fock(0, 1).value + dist_fock(1, 2).value, rel=1e-14)


def test_fock_constants_grow_like_sqrt():
    # C_n ~ sqrt(n/pi) for large n, so consecutive gaps shrink
    gaps = [
        float(fock_constant(n + 1) - fock_constant(n)) for n in range(8)
    ]
    assert all(g > 0 for g in gaps)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
