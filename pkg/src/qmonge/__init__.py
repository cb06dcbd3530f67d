"""Monge transport distances between quantum states via Husimi densities.

The distance of order p between two states is the p-th Wasserstein cost of
rearranging one Husimi density into the other under the Euclidean ground
metric on phase space.  Closed forms cover coherent, squeezed-vs-vacuum,
thermal and Fock pairs; rotationally symmetric pairs reduce to a 1-D
quantile integral; everything else is solved as a discrete transportation
problem on a truncated grid.
"""

from .analytic import (
    DistanceResult,
    dist_coherent,
    dist_fock,
    dist_thermal,
    dist_vacuum_squeezed,
    elliptic_e,
    fock_constant,
)
from .cli import RunConfig, ParseError, format_state, main, parse_state
from .lamcheck import (
    ScalarField2D,
    VectorField2D,
    curl_residual,
    euler_residual,
    frechet_displacement,
    grad,
    lam_residual,
    squeeze_field,
    squeeze_potential,
    translation_potential,
)
from .onedim import Cdf1D, cdf_from_samples, monge_map_1d, monge_radial, quantile, salvemini, salvemini_p
from .states import (
    Coherent,
    CoverageError,
    Fock,
    GridSpec,
    HusimiField,
    ORIGIN,
    PhasePoint,
    RadialCdf,
    Squeezed,
    StateSpec,
    Thermal,
    husimi_grid,
    husimi_value,
    is_rotationally_symmetric,
    radial_cdf,
    shared_window,
    state_center,
    window_margin,
)
from .transport import (
    SolverError,
    TransportPlan,
    TransportProblem,
    discretize,
    monge_numeric,
    northwest_corner,
    optimize,
    vogel,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Cdf1D",
    "Coherent",
    "CoverageError",
    "DistanceResult",
    "Fock",
    "GridSpec",
    "HusimiField",
    "ORIGIN",
    "ParseError",
    "PhasePoint",
    "RadialCdf",
    "RunConfig",
    "ScalarField2D",
    "SolverError",
    "Squeezed",
    "StateSpec",
    "Thermal",
    "TransportPlan",
    "TransportProblem",
    "cdf_from_samples",
    "curl_residual",
    "discretize",
    "dist_coherent",
    "dist_fock",
    "dist_thermal",
    "dist_vacuum_squeezed",
    "elliptic_e",
    "euler_residual",
    "fock_constant",
    "format_state",
    "frechet_displacement",
    "grad",
    "husimi_grid",
    "husimi_value",
    "is_rotationally_symmetric",
    "lam_residual",
    "main",
    "monge_map_1d",
    "monge_numeric",
    "monge_radial",
    "northwest_corner",
    "optimize",
    "parse_state",
    "quantile",
    "radial_cdf",
    "salvemini",
    "salvemini_p",
    "shared_window",
    "squeeze_field",
    "squeeze_potential",
    "state_center",
    "translation_potential",
    "vogel",
    "window_margin",
]
