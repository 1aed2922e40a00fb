"""Geodesic X-ray transform on constant-curvature disks.

Library layout:

- ``geometry``: metric, isometries, geodesics, scattering relation and
  the scattering signature, footpoint map.
- ``basis``: Zernike-type disk families, boundary families, norms.
- ``xray``: forward transform, adjoint, grids, inner products, analysis /
  synthesis, exact singular values and truncated-SVD inversion.
- ``boundary``: fiberwise Hilbert transform and the boundary operator
  calculus (extensions, P-/C- operators, range projection, moments).
- ``cli``: command-line front end with reproducible file I/O.
"""

from .basis import (
    BasisIndex,
    CoeffTable,
    boundary_family,
    cheb_w,
    norms,
    psi_kappa,
    psi_kappa_hat,
    psi_over_mu,
    w_kappa,
    zernike,
    zernike_kappa,
    zernike_kappa_hat,
)
from .boundary import (
    SymmetryClass,
    TorusGrid,
    c_minus,
    classify,
    extend,
    hilbert,
    moment_residuals,
    p_minus,
    project_to_range,
    restrict_star,
)
from .geometry import (
    CurvatureParam,
    FanBeamPoint,
    MoebiusMap,
    antipodal_scattering,
    conformal_factor,
    exit_time,
    fiber_change,
    footpoint,
    geodesic_point,
    isometry_from_tangent,
    scattering,
    sig,
    sig_inverse,
    sig_prime,
)
from .xray import (
    BoundaryGrid,
    DiskGrid,
    GeodesicQuad,
    SvdTriple,
    adjoint_sharp,
    analyze,
    boundary_grid,
    boundary_inner,
    disk_grid,
    disk_inner,
    forward,
    invert,
    singular_value,
    singular_values,
    sinogram,
    synthesize,
)

__all__ = [
    "BasisIndex",
    "BoundaryGrid",
    "CoeffTable",
    "CurvatureParam",
    "DiskGrid",
    "FanBeamPoint",
    "GeodesicQuad",
    "MoebiusMap",
    "SvdTriple",
    "SymmetryClass",
    "TorusGrid",
    "adjoint_sharp",
    "analyze",
    "antipodal_scattering",
    "boundary_family",
    "boundary_grid",
    "boundary_inner",
    "c_minus",
    "cheb_w",
    "classify",
    "conformal_factor",
    "disk_grid",
    "disk_inner",
    "exit_time",
    "extend",
    "fiber_change",
    "footpoint",
    "forward",
    "geodesic_point",
    "hilbert",
    "invert",
    "isometry_from_tangent",
    "moment_residuals",
    "norms",
    "p_minus",
    "project_to_range",
    "psi_kappa",
    "psi_kappa_hat",
    "psi_over_mu",
    "restrict_star",
    "scattering",
    "sig",
    "sig_inverse",
    "sig_prime",
    "singular_value",
    "singular_values",
    "sinogram",
    "synthesize",
    "w_kappa",
    "zernike",
    "zernike_kappa",
    "zernike_kappa_hat",
]

__version__ = "0.1.0"
