"""Quantum state families and their Husimi phase-space densities.

A state is described by the Husimi density H(alpha) = <alpha|rho|alpha>/pi,
a nonnegative function of the phase-plane point alpha = x1 + i*x2 that
integrates to one against d^2 alpha.  Four families are supported:

* coherent |beta>          H = exp(-|alpha - beta|^2) / pi
* squeezed (s, theta, beta) a Gaussian with principal widths (s+1) and
                            1/(s+1) along axes rotated by theta about beta
* Fock |n>                  H = |alpha|^(2n) exp(-|alpha|^2) / (pi n!)
* thermal nbar              H = exp(-|alpha|^2/(nbar+1)) / (pi (nbar+1))

The rotationally symmetric families additionally expose the exact radial
distribution function F(r), the mass inside the disk of radius r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .numerics import bisect_increasing

__all__ = [
    "PhasePoint",
    "ORIGIN",
    "Coherent",
    "Squeezed",
    "Fock",
    "Thermal",
    "StateSpec",
    "GridSpec",
    "HusimiField",
    "CoverageError",
    "husimi_value",
    "husimi_grid",
    "radial_cdf",
    "RadialCdf",
    "is_rotationally_symmetric",
    "state_center",
    "window_margin",
    "shared_window",
    "TRUNCATION_EPSILON",
    "COVERAGE_FLOOR",
]

# Auto windows are sized so the enclosed mass is at least 1 - TRUNCATION_EPSILON.
TRUNCATION_EPSILON = 1e-6
# Hard error when an explicit grid misses more than this much mass.
COVERAGE_FLOOR = 1e-3


class CoverageError(RuntimeError):
    """The grid window misses a non-negligible share of the state's mass."""


@dataclass(frozen=True)
class PhasePoint:
    """A point x1 + i*x2 of the phase plane (dimensionless quadratures)."""

    x1: float
    x2: float

    def __post_init__(self):
        if not (math.isfinite(self.x1) and math.isfinite(self.x2)):
            raise ValueError("phase-plane coordinates must be finite")

    def radius(self) -> float:
        return math.hypot(self.x1, self.x2)

    def distance(self, other: "PhasePoint") -> float:
        return math.hypot(self.x1 - other.x1, self.x2 - other.x2)


ORIGIN = PhasePoint(0.0, 0.0)


@dataclass(frozen=True)
class Coherent:
    """Coherent state centered at alpha."""

    alpha: PhasePoint = ORIGIN


@dataclass(frozen=True)
class Squeezed:
    """Squeezed state with asymmetry s >= 0, axis angle theta, center alpha.

    For theta = 0 the Husimi Gaussian is wide along x1 (scale s+1) and
    narrow along x2 (scale 1/(s+1)); s = 0 reduces to a coherent state.
    """

    s: float
    theta: float = 0.0
    alpha: PhasePoint = ORIGIN

    def __post_init__(self):
        if not math.isfinite(self.s) or self.s < 0:
            raise ValueError("squeezing parameter s must be >= 0")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")


@dataclass(frozen=True)
class Fock:
    """Number state |n>."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise ValueError("Fock index n must be an integer")
        if self.n < 0:
            raise ValueError("Fock index n must be >= 0")


@dataclass(frozen=True)
class Thermal:
    """Thermal state with mean occupation nbar >= 0."""

    nbar: float

    def __post_init__(self):
        if not math.isfinite(self.nbar) or self.nbar < 0:
            raise ValueError("thermal occupation nbar must be >= 0")


StateSpec = Union[Coherent, Squeezed, Fock, Thermal]


def state_center(state: StateSpec) -> PhasePoint:
    """Center of mass of the state's Husimi density."""
    if isinstance(state, (Coherent, Squeezed)):
        return state.alpha
    return ORIGIN


def is_rotationally_symmetric(state: StateSpec) -> bool:
    """True for Fock and thermal states and for the coherent state at the origin."""
    if isinstance(state, (Fock, Thermal)):
        return True
    if isinstance(state, Coherent):
        return state.alpha == ORIGIN
    return False


def window_margin(state: StateSpec) -> float:
    """Half-width around the state center that captures >= 1 - 1e-6 of the mass."""
    if isinstance(state, Coherent):
        return 6.0
    if isinstance(state, Squeezed):
        return 6.0 * (state.s + 1.0)
    if isinstance(state, Thermal):
        return 6.0 * math.sqrt(state.nbar + 1.0)
    if isinstance(state, Fock):
        return math.sqrt(state.n + 1.0) + 3.0
    raise TypeError(f"not a state spec: {state!r}")


def _husimi_xy(state: StateSpec, x1, x2):
    """Husimi density evaluated on numpy arrays of coordinates."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if isinstance(state, Coherent):
        b = state.alpha
        return np.exp(-((x1 - b.x1) ** 2 + (x2 - b.x2) ** 2)) / math.pi
    if isinstance(state, Squeezed):
        b = state.alpha
        c = math.cos(state.theta)
        t = math.sin(state.theta)
        d1 = x1 - b.x1
        d2 = x2 - b.x2
        u1 = c * d1 + t * d2
        u2 = -t * d1 + c * d2
        w = state.s + 1.0
        return np.exp(-((u1 / w) ** 2) - (u2 * w) ** 2) / math.pi
    if isinstance(state, Thermal):
        w = state.nbar + 1.0
        return np.exp(-(x1 * x1 + x2 * x2) / w) / (math.pi * w)
    if isinstance(state, Fock):
        r2 = x1 * x1 + x2 * x2
        n = state.n
        if n == 0:
            return np.exp(-r2) / math.pi
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = n * np.log(r2) - math.lgamma(n + 1) - r2
        return np.where(r2 > 0.0, np.exp(logs), 0.0) / math.pi
    raise TypeError(f"not a state spec: {state!r}")


def husimi_value(state: StateSpec, alpha: PhasePoint) -> float:
    """Husimi density of the state at a single phase-plane point."""
    return float(_husimi_xy(state, alpha.x1, alpha.x2))


@dataclass(frozen=True)
class GridSpec:
    """Uniform square-cell grid of sample points in the phase plane.

    origin is the coordinate of sample (0, 0); sample (i, j) sits at
    (origin.x1 + i*dx, origin.x2 + j*dx).  Arrays over the grid are indexed
    values[i, j] with i along x1 and j along x2, serialized row-major.
    """

    origin: PhasePoint
    dx: float
    nx: int
    ny: int

    def __post_init__(self):
        if not math.isfinite(self.dx) or self.dx <= 0:
            raise ValueError("dx must be positive")
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid must have at least one sample per axis")

    def x1_coords(self) -> np.ndarray:
        return self.origin.x1 + self.dx * np.arange(self.nx)

    def x2_coords(self) -> np.ndarray:
        return self.origin.x2 + self.dx * np.arange(self.ny)

    def mesh(self):
        return np.meshgrid(self.x1_coords(), self.x2_coords(), indexing="ij")

    @property
    def x1_max(self) -> float:
        return self.origin.x1 + self.dx * (self.nx - 1)

    @property
    def x2_max(self) -> float:
        return self.origin.x2 + self.dx * (self.ny - 1)

    @classmethod
    def window(cls, center: PhasePoint, radius: float, dx: float) -> "GridSpec":
        """Cell-centered grid tiling the square window [center +- radius]^2.

        Samples are centers of dx*dx cells laid edge to edge, so a plain
        sum of values times dx^2 is the midpoint rule over the window.
        """
        if radius <= 0:
            raise ValueError("window radius must be positive")
        n = max(1, math.ceil(2.0 * radius / dx - 1e-12))
        off = -0.5 * n * dx + 0.5 * dx
        return cls(PhasePoint(center.x1 + off, center.x2 + off), dx, n, n)

    @classmethod
    def node_window(cls, center: PhasePoint, radius: float, dx: float) -> "GridSpec":
        """Node-centered grid: samples include the window edges and center."""
        if radius <= 0:
            raise ValueError("window radius must be positive")
        half = math.ceil(radius / dx - 1e-12)
        n = 2 * half + 1
        return cls(PhasePoint(center.x1 - half * dx, center.x2 - half * dx), dx, n, n)


@dataclass(frozen=True)
class HusimiField:
    """Husimi density sampled on a grid and renormalized to unit mass.

    raw_mass records the plain quadrature mass sum(values)*dx^2 before
    renormalization; the stored values always sum to exactly 1/dx^2.
    """

    grid: GridSpec
    values: np.ndarray
    raw_mass: float = 1.0

    @property
    def mass(self) -> float:
        return float(self.values.sum() * self.grid.dx**2)

    def to_json_obj(self) -> dict:
        g = self.grid
        return {
            "origin": {"x1": g.origin.x1, "x2": g.origin.x2},
            "dx": g.dx,
            "nx": g.nx,
            "ny": g.ny,
            "values": [float(v) for v in self.values.reshape(-1)],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "HusimiField":
        grid = GridSpec(
            PhasePoint(float(obj["origin"]["x1"]), float(obj["origin"]["x2"])),
            float(obj["dx"]),
            int(obj["nx"]),
            int(obj["ny"]),
        )
        values = np.asarray(obj["values"], dtype=float).reshape(grid.nx, grid.ny)
        raw = float(values.sum() * grid.dx**2)
        return cls(grid, values, raw)

    def to_csv(self) -> str:
        """Row-major CSV text with header x1,x2,h."""
        from .serialize import grid_csv_text

        return grid_csv_text(self.grid.x1_coords(), self.grid.x2_coords(), self.values)

    @classmethod
    def from_csv(cls, text: str) -> "HusimiField":
        from .serialize import parse_grid_csv

        ox1, ox2, dx, values = parse_grid_csv(text)
        grid = GridSpec(PhasePoint(ox1, ox2), dx, values.shape[0], values.shape[1])
        raw = float(values.sum() * dx * dx)
        return cls(grid, values, raw)


def husimi_grid(state: StateSpec, grid: GridSpec) -> HusimiField:
    """Sample the state's Husimi density on the grid and renormalize to mass 1.

    Raises CoverageError when the window misses more than COVERAGE_FLOOR of
    the mass, i.e. when the raw quadrature mass falls below 1 - 1e-3.
    """
    X1, X2 = grid.mesh()
    values = _husimi_xy(state, X1, X2)
    raw = float(values.sum() * grid.dx**2)
    if raw < 1.0 - COVERAGE_FLOOR:
        raise CoverageError(
            f"grid captures mass {raw:.6g} < {1.0 - COVERAGE_FLOOR}; "
            "enlarge the window or refine dx"
        )
    return HusimiField(grid, values / raw, raw)


def shared_window(states, dx: float, radius: Optional[float] = None, *, node_centered: bool = False) -> GridSpec:
    """Smallest square grid window covering every state's auto margin.

    With an explicit radius the window is the square of that half-width
    centered on the bounding-box midpoint of the state centers.
    """
    states = list(states)
    if not states:
        raise ValueError("need at least one state")
    centers = [state_center(s) for s in states]
    if radius is None:
        margins = [window_margin(s) for s in states]
        lo1 = min(c.x1 - m for c, m in zip(centers, margins))
        hi1 = max(c.x1 + m for c, m in zip(centers, margins))
        lo2 = min(c.x2 - m for c, m in zip(centers, margins))
        hi2 = max(c.x2 + m for c, m in zip(centers, margins))
    else:
        lo1 = min(c.x1 for c in centers) - radius
        hi1 = max(c.x1 for c in centers) + radius
        lo2 = min(c.x2 for c in centers) - radius
        hi2 = max(c.x2 for c in centers) + radius
    center = PhasePoint(0.5 * (lo1 + hi1), 0.5 * (lo2 + hi2))
    half = 0.5 * max(hi1 - lo1, hi2 - lo2)
    if node_centered:
        return GridSpec.node_window(center, half, dx)
    return GridSpec.window(center, half, dx)


class RadialCdf:
    """Exact radial distribution function of a rotationally symmetric state.

    Callable as F(r); also exposes the radial density R(r) = 2*pi*r*H(r),
    the quantile function, and the support (0, tail_radius) where
    F(tail_radius) >= 1 - 1e-12.
    """

    _TAIL = 1e-12

    def __init__(self, state: StateSpec):
        if not is_rotationally_symmetric(state):
            raise ValueError(f"state is not rotationally symmetric: {state!r}")
        self.state = state
        if isinstance(state, Coherent):
            # coherent at the origin behaves as thermal with nbar = 0
            self._scale = 1.0
            self._n = None
        elif isinstance(state, Thermal):
            self._scale = state.nbar + 1.0
            self._n = None
        else:
            self._scale = 1.0
            self._n = state.n
        self.tail_radius = self._find_tail_radius()

    # survival 1 - F(r) for Fock n: exp(-r^2) * sum_{k<=n} r^(2k)/k!
    def _fock_survival(self, r2):
        acc = np.ones_like(r2)
        term = np.ones_like(r2)
        for k in range(1, self._n + 1):
            term = term * r2 / k
            acc = acc + term
        return np.exp(-r2) * acc

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        r2 = np.square(np.clip(r, 0.0, None))
        if self._n is None:
            out = -np.expm1(-r2 / self._scale)
        else:
            out = 1.0 - self._fock_survival(r2)
        return float(out) if out.ndim == 0 else out

    def density(self, r):
        """Radial density R(r) = dF/dr = 2*pi*r*H(r)."""
        r = np.asarray(r, dtype=float)
        out = 2.0 * math.pi * r * _husimi_xy(self.state, r, np.zeros_like(r))
        return float(out) if out.ndim == 0 else out

    @property
    def support(self):
        return (0.0, self.tail_radius)

    def quantile(self, t: float) -> float:
        """Smallest r with F(r) >= t, clamped to the effective support."""
        if t <= 0.0:
            return 0.0
        if t >= 1.0:
            return self.tail_radius
        if self._n is None:
            return math.sqrt(-self._scale * math.log1p(-t))
        return bisect_increasing(lambda r: float(self(r)), t, 0.0, 1.5 * self.tail_radius, tol=1e-12)

    def _find_tail_radius(self) -> float:
        if self._n is None:
            return math.sqrt(-self._scale * math.log(self._TAIL))
        hi = 30.0
        while float(self._fock_survival(np.asarray(hi))) > self._TAIL:
            hi *= 2.0
        x = bisect_increasing(
            lambda y: 1.0 - float(self._fock_survival(np.asarray(y))),
            1.0 - self._TAIL,
            0.0,
            hi,
            tol=1e-12,
        )
        return math.sqrt(x)


def radial_cdf(state: StateSpec) -> RadialCdf:
    """Exact radial CDF of a rotationally symmetric state (error otherwise)."""
    return RadialCdf(state)
