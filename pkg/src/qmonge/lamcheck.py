"""Finite-difference verification of candidate transport potentials.

A map T(x) = x + grad(phi)(x) pushes the density Q1 onto Q2 exactly when
the potential satisfies the Monge-Ampere-type balance equation

    phi_11 + phi_22 + phi_11*phi_22 - phi_12^2
        = Q1(x) / Q2(x + grad(phi)(x)) - 1,

and a displacement field w that is optimal for the order-p cost must obey
the pointwise Euler condition

    w1_2 (w1^2 (p-1) + w2^2) - w2_1 (w2^2 (p-1) + w1^2)
        + (p-2)(w2_2 - w1_1) w1 w2 = 0,

which at p = 2 reduces to rot(w) = 0.  This module measures discrete
residuals of those equations on sampled fields; it never solves for phi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .serialize import grid_csv_text
from .states import GridSpec, HusimiField, PhasePoint

__all__ = [
    "ScalarField2D",
    "VectorField2D",
    "sample_scalar",
    "translation_potential",
    "squeeze_potential",
    "squeeze_field",
    "grad",
    "lam_residual",
    "curl_residual",
    "euler_residual",
    "frechet_displacement",
    "DENSITY_FLOOR",
]

# LAM's right side is evaluated only where the target density exceeds this,
# since the ratio Q1/Q2 blows up in the Gaussian tails where no mass lives.
DENSITY_FLOOR = 1e-12


@dataclass(frozen=True)
class ScalarField2D:
    """Real scalar field sampled on a grid; NaN marks masked nodes."""

    grid: GridSpec
    values: np.ndarray

    def to_json_obj(self) -> dict:
        g = self.grid
        return {
            "origin": {"x1": g.origin.x1, "x2": g.origin.x2},
            "dx": g.dx,
            "nx": g.nx,
            "ny": g.ny,
            "values": [None if math.isnan(v) else float(v) for v in self.values.reshape(-1)],
        }

    def to_csv(self) -> str:
        return grid_csv_text(self.grid.x1_coords(), self.grid.x2_coords(), self.values)

    def max_abs(self) -> float:
        """Largest |value| over unmasked nodes."""
        return float(np.nanmax(np.abs(self.values)))


@dataclass(frozen=True)
class VectorField2D:
    """Two-component field (w1, w2) sampled on a grid."""

    grid: GridSpec
    w1: np.ndarray
    w2: np.ndarray


def sample_scalar(grid: GridSpec, fn: Callable) -> ScalarField2D:
    """Sample fn(x1, x2) on the grid (fn must accept numpy arrays)."""
    X1, X2 = grid.mesh()
    return ScalarField2D(grid, np.asarray(fn(X1, X2), dtype=float))


def translation_potential(grid: GridSpec, shift) -> ScalarField2D:
    """Potential of the rigid translation by shift: phi = s1*x1 + s2*x2."""
    if not isinstance(shift, PhasePoint):
        shift = PhasePoint(*shift)
    return sample_scalar(grid, lambda x1, x2: shift.x1 * x1 + shift.x2 * x2)


def squeeze_potential(grid: GridSpec, s: float, theta: float = 0.0) -> ScalarField2D:
    """Potential whose map sends the vacuum onto the squeezed state (s, theta).

    In axes rotated by theta, phi = s*u1^2/2 - s*u2^2/(2(s+1)); the induced
    map stretches u1 by (s+1) and shrinks u2 by the same factor, matching
    the squeezed Husimi Gaussian that is wide along the theta axis.
    """
    if s < 0:
        raise ValueError("squeezing parameter s must be >= 0")
    c, t = math.cos(theta), math.sin(theta)

    def fn(x1, x2):
        u1 = c * x1 + t * x2
        u2 = -t * x1 + c * x2
        return 0.5 * s * u1 * u1 - s * u2 * u2 / (2.0 * (s + 1.0))

    return sample_scalar(grid, fn)


def squeeze_field(grid: GridSpec, s: float, theta: float = 0.0) -> VectorField2D:
    """Displacement field of the squeeze map, w = grad of squeeze_potential."""
    c, t = math.cos(theta), math.sin(theta)
    X1, X2 = grid.mesh()
    u1 = c * X1 + t * X2
    u2 = -t * X1 + c * X2
    g1 = s * u1
    g2 = -s * u2 / (s + 1.0)
    return VectorField2D(grid, c * g1 - t * g2, t * g1 + c * g2)


def _require_grid(grid: GridSpec):
    if grid.nx < 3 or grid.ny < 3:
        raise ValueError("need at least a 3x3 grid for finite differences")


def _d_x1(values: np.ndarray, dx: float) -> np.ndarray:
    out = np.empty_like(values)
    out[1:-1, :] = (values[2:, :] - values[:-2, :]) / (2.0 * dx)
    out[0, :] = (values[1, :] - values[0, :]) / dx
    out[-1, :] = (values[-1, :] - values[-2, :]) / dx
    return out


def _d_x2(values: np.ndarray, dx: float) -> np.ndarray:
    out = np.empty_like(values)
    out[:, 1:-1] = (values[:, 2:] - values[:, :-2]) / (2.0 * dx)
    out[:, 0] = (values[:, 1] - values[:, 0]) / dx
    out[:, -1] = (values[:, -1] - values[:, -2]) / dx
    return out


def grad(phi: ScalarField2D) -> VectorField2D:
    """Discrete gradient: central differences inside, one-sided at the edges."""
    _require_grid(phi.grid)
    dx = phi.grid.dx
    return VectorField2D(phi.grid, _d_x1(phi.values, dx), _d_x2(phi.values, dx))


def _bilinear(grid: GridSpec, values: np.ndarray, x1: np.ndarray, x2: np.ndarray):
    """Bilinear interpolation of grid values; NaN outside the sample hull."""
    fi = (x1 - grid.origin.x1) / grid.dx
    fj = (x2 - grid.origin.x2) / grid.dx
    inside = (fi >= 0) & (fi <= grid.nx - 1) & (fj >= 0) & (fj <= grid.ny - 1)
    fi = np.clip(fi, 0, grid.nx - 1)
    fj = np.clip(fj, 0, grid.ny - 1)
    i0 = np.clip(np.floor(fi).astype(int), 0, grid.nx - 2)
    j0 = np.clip(np.floor(fj).astype(int), 0, grid.ny - 2)
    ti = fi - i0
    tj = fj - j0
    out = (
        values[i0, j0] * (1 - ti) * (1 - tj)
        + values[i0 + 1, j0] * ti * (1 - tj)
        + values[i0, j0 + 1] * (1 - ti) * tj
        + values[i0 + 1, j0 + 1] * ti * tj
    )
    return np.where(inside, out, np.nan)


def lam_residual(phi: ScalarField2D, q1: HusimiField, q2: HusimiField) -> ScalarField2D:
    """Residual of the balance equation, left side minus right side.

    Second derivatives of phi use central differences; the target density
    is read at the displaced points x + grad(phi) by bilinear
    interpolation.  Boundary nodes, nodes whose displaced point leaves the
    grid, and nodes where either density falls below DENSITY_FLOOR are
    masked with NaN: the ratio carries no information where a density
    vanishes, and interpolation in a far Gaussian tail can sit above the
    floor even though the true density is already below it.
    """
    if phi.grid != q1.grid or phi.grid != q2.grid:
        raise ValueError("potential and densities must share one grid")
    _require_grid(phi.grid)
    dx = phi.grid.dx
    f = phi.values
    p11 = np.full_like(f, np.nan)
    p22 = np.full_like(f, np.nan)
    p12 = np.full_like(f, np.nan)
    p11[1:-1, :] = (f[2:, :] - 2.0 * f[1:-1, :] + f[:-2, :]) / dx**2
    p22[:, 1:-1] = (f[:, 2:] - 2.0 * f[:, 1:-1] + f[:, :-2]) / dx**2
    p12[1:-1, 1:-1] = (f[2:, 2:] - f[2:, :-2] - f[:-2, 2:] + f[:-2, :-2]) / (4.0 * dx**2)
    left = p11 + p22 + p11 * p22 - p12 * p12

    w = grad(phi)
    X1, X2 = phi.grid.mesh()
    with np.errstate(invalid="ignore"):
        q2_disp = _bilinear(q2.grid, q2.values, X1 + w.w1, X2 + w.w2)
        usable = (
            np.isfinite(q2_disp)
            & (q2_disp >= DENSITY_FLOOR)
            & (q1.values >= DENSITY_FLOOR)
            & (q2.values >= DENSITY_FLOOR)
        )
        right = np.where(usable, q1.values / np.where(usable, q2_disp, 1.0) - 1.0, np.nan)
        residual = left - right
    return ScalarField2D(phi.grid, residual)


def curl_residual(w: VectorField2D) -> float:
    """Largest |d(w1)/dx2 - d(w2)/dx1| over interior nodes."""
    _require_grid(w.grid)
    dx = w.grid.dx
    rot = _d_x2(w.w1, dx) - _d_x1(w.w2, dx)
    return float(np.abs(rot[1:-1, 1:-1]).max())


def euler_residual(w: VectorField2D, p: float) -> ScalarField2D:
    """Pointwise optimality condition for order-p cost; boundary masked.

    Zero everywhere means the field passes the necessary first-order test;
    at p = 2 the condition collapses to vanishing curl.
    """
    if p < 1:
        raise ValueError("order p must be >= 1")
    _require_grid(w.grid)
    dx = w.grid.dx
    w1, w2 = w.w1, w.w2
    w1_2 = _d_x2(w1, dx)
    w2_1 = _d_x1(w2, dx)
    w1_1 = _d_x1(w1, dx)
    w2_2 = _d_x2(w2, dx)
    res = (
        w1_2 * (w1 * w1 * (p - 1.0) + w2 * w2)
        - w2_1 * (w2 * w2 * (p - 1.0) + w1 * w1)
        + (p - 2.0) * (w2_2 - w1_1) * w1 * w2
    )
    out = np.full_like(res, np.nan)
    out[1:-1, 1:-1] = res[1:-1, 1:-1]
    return ScalarField2D(w.grid, out)


def frechet_displacement(phi: ScalarField2D, q1: HusimiField) -> float:
    """Root of the quadratic displacement cost, sqrt(int |grad phi|^2 Q1).

    The integral uses the 2D trapezoid rule on the shared grid; for the
    optimal quadratic-cost potential this is the order-2 Monge distance.
    """
    if phi.grid != q1.grid:
        raise ValueError("potential and density must share one grid")
    _require_grid(phi.grid)
    w = grad(phi)
    integrand = (w.w1**2 + w.w2**2) * q1.values
    weights = np.ones_like(integrand)
    weights[0, :] *= 0.5
    weights[-1, :] *= 0.5
    weights[:, 0] *= 0.5
    weights[:, -1] *= 0.5
    total = float((integrand * weights).sum() * phi.grid.dx**2)
    return math.sqrt(max(total, 0.0))
