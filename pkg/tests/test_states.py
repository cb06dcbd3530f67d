"""State families, Husimi sampling, grids, and radial distribution functions.

Point values of the densities are checked against hand-evaluated closed
forms, masses against the unit normalization, and the radial CDFs against
direct quadrature of their own densities.
"""

import math

import numpy as np
import pytest

from qmonge import (
    Coherent,
    CoverageError,
    Fock,
    GridSpec,
    HusimiField,
    ORIGIN,
    PhasePoint,
    Squeezed,
    Thermal,
    husimi_grid,
    husimi_value,
    is_rotationally_symmetric,
    radial_cdf,
    shared_window,
    state_center,
    window_margin,
)
from qmonge.numerics import adaptive_simpson


# ----------------------------------------------------------- state specs --


def test_phase_point_basics():
    a = PhasePoint(3.0, -4.0)
    assert a.radius() == 5.0
    assert a.distance(PhasePoint(0.0, 0.0)) == 5.0
    assert PhasePoint(1.0, 2.0) == PhasePoint(1.0, 2.0)
    with pytest.raises(ValueError):
        PhasePoint(math.nan, 0.0)
    with pytest.raises(ValueError):
        PhasePoint(0.0, math.inf)


def test_state_validation():
    with pytest.raises(ValueError):
        Squeezed(-0.5)
    with pytest.raises(ValueError):
        Squeezed(1.0, math.nan)
    with pytest.raises(ValueError):
        Fock(-1)
    with pytest.raises(ValueError):
        Fock(1.5)
    with pytest.raises(ValueError):
        Thermal(-0.1)
    # boundary cases are legitimate states
    Squeezed(0.0)
    Fock(0)
    Thermal(0.0)


def test_state_center_and_symmetry():
    assert state_center(Coherent(PhasePoint(1.0, 2.0))) == PhasePoint(1.0, 2.0)
    assert state_center(Fock(3)) == ORIGIN
    assert state_center(Thermal(2.0)) == ORIGIN
    assert is_rotationally_symmetric(Fock(2))
    assert is_rotationally_symmetric(Thermal(0.5))
    assert is_rotationally_symmetric(Coherent(ORIGIN))
    assert not is_rotationally_symmetric(Coherent(PhasePoint(0.1, 0.0)))
    assert not is_rotationally_symmetric(Squeezed(1.0))


# --------------------------------------------------------- point values --


def test_husimi_coherent_point_value():
    # exp(-(0.75^2 + 1.25^2))/pi = exp(-2.125)/pi
    st = Coherent(PhasePoint(1.0, -0.5))
    got = husimi_value(st, PhasePoint(0.25, 0.75))
    assert got == pytest.approx(0.038016694535571806, rel=1e-14)
    # peak height 1/pi at the center
    assert husimi_value(st, PhasePoint(1.0, -0.5)) == pytest.approx(1.0 / math.pi, rel=1e-14)


def test_husimi_squeezed_point_value():
    # theta = 0, s = 1: exp(-(x1/2)^2 - (2 x2)^2)/pi at (1.2, 0.3)
    st = Squeezed(1.0)
    got = husimi_value(st, PhasePoint(1.2, 0.3))
    assert got == pytest.approx(0.15493805519432194, rel=1e-14)
    # s = 0 collapses to the coherent Gaussian
    st0 = Squeezed(0.0, 0.7, PhasePoint(0.4, -0.2))
    ref = Coherent(PhasePoint(0.4, -0.2))
    for pt in (PhasePoint(0.0, 0.0), PhasePoint(1.0, 1.0), PhasePoint(-0.3, 2.0)):
        assert husimi_value(st0, pt) == pytest.approx(husimi_value(ref, pt), rel=1e-13)


def test_husimi_squeezed_rotation():
    # rotating the axes by theta rotates the density: H_theta(R x) = H_0(x)
    s, theta = 1.5, 0.6
    c, t = math.cos(theta), math.sin(theta)
    st0 = Squeezed(s)
    st = Squeezed(s, theta)
    for x1, x2 in ((0.5, 0.2), (-1.0, 0.8), (2.0, -0.4)):
        rot = PhasePoint(c * x1 - t * x2, t * x1 + c * x2)
        assert husimi_value(st, rot) == pytest.approx(
            husimi_value(st0, PhasePoint(x1, x2)), rel=1e-13
        )


def test_husimi_fock_point_value():
    # n = 2 at r = 1: 1 * exp(-1) / (pi * 2!) = exp(-1)/(2 pi)
    got = husimi_value(Fock(2), PhasePoint(1.0, 0.0))
    assert got == pytest.approx(0.05854983152431917, rel=1e-14)
    # the density vanishes at the origin for n >= 1 and is finite there
    assert husimi_value(Fock(1), ORIGIN) == 0.0
    assert husimi_value(Fock(0), ORIGIN) == pytest.approx(1.0 / math.pi, rel=1e-14)


def test_husimi_thermal_point_value():
    # nbar = 3 at r = 2: exp(-4/4)/(4 pi)
    got = husimi_value(Thermal(3.0), PhasePoint(2.0, 0.0))
    assert got == pytest.approx(0.029274915762159584, rel=1e-14)
    # nbar = 0 is the vacuum
    assert husimi_value(Thermal(0.0), PhasePoint(0.3, 0.4)) == pytest.approx(
        husimi_value(Coherent(ORIGIN), PhasePoint(0.3, 0.4)), rel=1e-14
    )


# ----------------------------------------------------------------- grids --


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(ORIGIN, 0.0, 4, 4)
    with pytest.raises(ValueError):
        GridSpec(ORIGIN, -0.1, 4, 4)
    with pytest.raises(ValueError):
        GridSpec(ORIGIN, 0.5, 0, 4)


def test_window_cell_centered():
    g = GridSpec.window(ORIGIN, 2.0, 0.5)
    assert g.nx == g.ny == 8
    xs = g.x1_coords()
    # cell centers tile [-2, 2] edge to edge
    assert xs[0] == pytest.approx(-1.75)
    assert xs[-1] == pytest.approx(1.75)
    assert np.allclose(np.diff(xs), 0.5)
    # off-center windows shift with the center
    g2 = GridSpec.window(PhasePoint(1.0, -1.0), 2.0, 0.5)
    assert g2.x1_coords()[0] == pytest.approx(-0.75)
    assert g2.x2_coords()[0] == pytest.approx(-2.75)


def test_node_window_hits_center_and_edges():
    g = GridSpec.node_window(ORIGIN, 2.0, 0.5)
    xs = g.x1_coords()
    assert g.nx == 9
    assert xs[0] == pytest.approx(-2.0)
    assert xs[-1] == pytest.approx(2.0)
    assert 0.0 in xs


def test_grid_indexing_convention():
    # values[i, j] pairs with (x1_coords[i], x2_coords[j])
    g = GridSpec(PhasePoint(1.0, 10.0), 0.5, 3, 4)
    X1, X2 = g.mesh()
    assert X1.shape == (3, 4)
    assert X1[2, 0] == pytest.approx(2.0)
    assert X2[0, 3] == pytest.approx(11.5)


def test_husimi_grid_mass_and_renormalization():
    g = GridSpec.window(ORIGIN, 7.0, 0.25)
    for st in (Coherent(ORIGIN), Squeezed(0.4), Thermal(0.3), Fock(2)):
        f = husimi_grid(st, g)
        assert abs(f.raw_mass - 1.0) < 1e-6
        # stored values always integrate to exactly one
        assert f.mass == pytest.approx(1.0, abs=1e-12)


def test_husimi_grid_coverage_error():
    g = GridSpec.window(ORIGIN, 1.0, 0.25)
    with pytest.raises(CoverageError):
        husimi_grid(Thermal(3.0), g)


def test_window_margin_captures_mass():
    # each family's auto margin misses at most ~1e-6 of the mass
    for st in (Coherent(PhasePoint(0.5, -1.0)), Squeezed(2.0), Thermal(4.0), Fock(5)):
        r = window_margin(st)
        # dx small enough that the midpoint rule resolves the narrowest width
        g = GridSpec.window(state_center(st), r, min(r / 60.0, 0.1))
        f = husimi_grid(st, g)
        assert f.raw_mass > 1.0 - 5e-6


def test_shared_window_covers_both_states():
    a = Coherent(PhasePoint(-1.0, 0.0))
    b = Coherent(PhasePoint(3.0, 0.0))
    g = shared_window([a, b], 0.25)
    # margin 6 on both sides of both centers
    assert g.x1_coords()[0] <= -7.0 + 0.25
    assert g.x1_coords()[-1] >= 9.0 - 0.25
    # explicit radius wins over the auto margin
    g2 = shared_window([a, b], 0.25, radius=2.0)
    assert g2.x1_coords()[0] >= -3.0 - 0.25
    f = husimi_grid(a, g)
    assert abs(f.raw_mass - 1.0) < 1e-6


def test_fock_field_is_rotationally_symmetric():
    g = GridSpec.node_window(ORIGIN, 6.0, 0.25)
    f = husimi_grid(Fock(3), g)
    # node grid is symmetric under both axis flips; the density must be too
    assert np.allclose(f.values, f.values[::-1, :], rtol=1e-12, atol=0.0)
    assert np.allclose(f.values, f.values[:, ::-1], rtol=1e-12, atol=0.0)
    assert np.allclose(f.values, f.values.T, rtol=1e-12, atol=0.0)


# ------------------------------------------------------------ round trips --


def test_field_csv_round_trip():
    g = GridSpec.window(PhasePoint(0.5, -0.25), 3.0, 0.5)
    f = husimi_grid(Coherent(PhasePoint(0.5, -0.25)), g)
    back = HusimiField.from_csv(f.to_csv())
    assert back.grid.nx == f.grid.nx and back.grid.ny == f.grid.ny
    assert back.grid.dx == pytest.approx(f.grid.dx, rel=1e-15)
    assert np.array_equal(back.values, f.values)


def test_field_json_round_trip():
    g = GridSpec.window(ORIGIN, 4.0, 0.5)
    f = husimi_grid(Thermal(0.5), g)
    back = HusimiField.from_json_obj(f.to_json_obj())
    assert back.grid == f.grid
    assert np.array_equal(back.values, f.values)


# ------------------------------------------------------------ radial CDFs --


def test_radial_cdf_thermal_closed_form():
    F = radial_cdf(Thermal(3.0))
    # F(r) = 1 - exp(-r^2/4)
    for r in (0.0, 0.5, 1.0, 2.0, 4.0):
        assert F(r) == pytest.approx(1.0 - math.exp(-r * r / 4.0), abs=1e-15)
    assert F(2.0) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-14)


def test_radial_cdf_fock_closed_form():
    F = radial_cdf(Fock(1))
    # survival exp(-r^2)(1 + r^2)
    for r in (0.3, 1.0, 2.5):
        assert F(r) == pytest.approx(1.0 - math.exp(-r * r) * (1.0 + r * r), abs=1e-14)


def test_radial_cdf_matches_density_quadrature():
    # integrating the radial density recovers the CDF
    for st in (Thermal(1.5), Fock(2), Coherent(ORIGIN)):
        F = radial_cdf(st)
        for r in (0.8, 1.7, 3.0):
            val = adaptive_simpson(F.density, 0.0, r, tol=1e-12)
            assert val == pytest.approx(F(r), abs=1e-9)


def test_radial_cdf_quantile_inverts():
    for st in (Thermal(2.0), Fock(3)):
        F = radial_cdf(st)
        for t in (0.01, 0.25, 0.5, 0.9, 0.999):
            assert F(F.quantile(t)) == pytest.approx(t, abs=1e-9)
    assert radial_cdf(Thermal(1.0)).quantile(0.0) == 0.0


def test_radial_cdf_tail_radius():
    F = radial_cdf(Fock(4))
    assert 1.0 - F(F.tail_radius) <= 1.01e-12
    assert F.support[0] == 0.0
    assert F.support[1] == F.tail_radius


def test_radial_cdf_rejects_asymmetric_states():
    with pytest.raises(ValueError):
        radial_cdf(Squeezed(1.0))
    with pytest.raises(ValueError):
        radial_cdf(Coherent(PhasePoint(1.0, 0.0)))
