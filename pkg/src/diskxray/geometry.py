"""Geometry of the constant-curvature disk models.

The closed unit disk carries the conformal metric c(z)^{-2} |dz|^2 with
c(z) = 1 + kappa |z|^2, of Gauss curvature 4*kappa, for a fixed parameter
kappa in (-1, 1).  Negative kappa gives a hyperbolic-type disk, positive
kappa a spherical cap, kappa = 0 the Euclidean disk.

Boundary phase space uses fan-beam coordinates (beta, alpha): the base
point is e^{i beta} on the unit circle and alpha is the angle of the
tangent vector measured from the inward normal, so |alpha| <= pi/2 means
the vector points into the disk.

All operations are pure functions; angle and arclength arguments accept
scalars or numpy arrays and broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

# slack used when validating angles/times against closed ranges
ANGLE_TOL = 1e-9


def wrap_two_pi(x):
    """Reduce angles to [0, 2*pi)."""
    return np.mod(x, TWO_PI)


def wrap_pi(x):
    """Reduce angles to [-pi, pi)."""
    return np.mod(np.asarray(x, dtype=float) + np.pi, TWO_PI) - np.pi


@dataclass(frozen=True)
class CurvatureParam:
    """Curvature parameter kappa in (-1, 1) and derived constants.

    lam = (1 - kappa) / (1 + kappa) controls the spread of scattered
    geodesics; c1 = 1 + kappa is the conformal factor on the boundary.
    """

    kappa: float
    lam: float = field(init=False)
    c1: float = field(init=False)

    def __post_init__(self):
        k = float(self.kappa)
        if not -1.0 < k < 1.0:
            raise ValueError(f"kappa must lie strictly in (-1, 1), got {k!r}")
        object.__setattr__(self, "kappa", k)
        object.__setattr__(self, "lam", (1.0 - k) / (1.0 + k))
        object.__setattr__(self, "c1", 1.0 + k)

    def flipped(self) -> "CurvatureParam":
        """Parameter with the opposite curvature sign."""
        return CurvatureParam(-self.kappa)


@dataclass(frozen=True)
class FanBeamPoint:
    """Boundary phase-space point (beta, alpha) in fan-beam coordinates.

    beta is stored in [0, 2*pi), alpha in [-pi, pi); the point is inward
    iff |alpha| <= pi/2.
    """

    beta: float
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "beta", float(wrap_two_pi(self.beta)))
        object.__setattr__(self, "alpha", float(wrap_pi(self.alpha)))

    @property
    def is_inward(self) -> bool:
        return abs(self.alpha) <= HALF_PI + ANGLE_TOL


@dataclass(frozen=True)
class MoebiusMap:
    """Disk-model isometry z -> (a z + b) / (-kappa conj(b) z + conj(a)).

    The pair (a, b) is normalized so that |a|^2 + kappa |b|^2 = 1.
    """

    a: complex
    b: complex
    kappa: float

    def __post_init__(self):
        det = abs(self.a) ** 2 + self.kappa * abs(self.b) ** 2
        if abs(det - 1.0) > 1e-9:
            raise ValueError(
                f"isometry normalization violated: |a|^2 + kappa |b|^2 = {det!r}"
            )

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return (self.a * z + self.b) / (-self.kappa * np.conj(self.b) * z + np.conj(self.a))

    def deriv(self, z):
        """Complex derivative T'(z)."""
        z = np.asarray(z, dtype=complex)
        return 1.0 / (-self.kappa * np.conj(self.b) * z + np.conj(self.a)) ** 2


def conformal_factor(z, cp: CurvatureParam):
    """Conformal factor c(z) = 1 + kappa |z|^2 of the metric c^{-2} |dz|^2."""
    z = np.asarray(z, dtype=complex)
    return 1.0 + cp.kappa * (z.real**2 + z.imag**2)


def isometry_from_tangent(z1, theta, cp: CurvatureParam) -> MoebiusMap:
    """Unique model isometry taking (0, 1) to the unit tangent vector at z1.

    The returned map T satisfies T(0) = z1 and T'(0) = c(z1) e^{i theta},
    i.e. it moves the base point 0 with horizontal unit direction onto the
    unit tangent vector at z1 with direction angle theta.
    """
    z1 = complex(z1)
    if abs(z1) > 1.0 + ANGLE_TOL:
        raise ValueError(f"base point must lie in the closed unit disk, got |z1| = {abs(z1)}")
    scale = 1.0 / math.sqrt(1.0 + cp.kappa * abs(z1) ** 2)
    half = np.exp(0.5j * theta)
    return MoebiusMap(a=scale * half, b=scale * z1 / half, kappa=cp.kappa)


def _profile(t, cp: CurvatureParam):
    """Radius along the horizontal unit-speed geodesic through the origin."""
    t = np.asarray(t, dtype=float)
    k = cp.kappa
    if k == 0.0:
        return t + 0.0
    r = math.sqrt(abs(k))
    if k > 0.0:
        return np.tan(r * t) / r
    return np.tanh(r * t) / r


def exit_time(alpha, cp: CurvatureParam):
    """First exit time of the geodesic entering with fan-beam angle alpha.

    Tangential directions alpha = +-pi/2 give zero; alpha outside the
    closed inward range is rejected.
    """
    a = wrap_pi(alpha)
    if np.any(np.abs(a) > HALF_PI + ANGLE_TOL):
        raise ValueError("exit_time requires an inward direction, |alpha| <= pi/2")
    x = 2.0 * np.maximum(np.cos(a), 0.0) / (1.0 - cp.kappa)
    k = cp.kappa
    if k == 0.0:
        tau = x
    elif k > 0.0:
        r = math.sqrt(k)
        tau = np.arctan(r * x) / r
    else:
        r = math.sqrt(-k)
        tau = np.arctanh(r * x) / r
    return tau


def geodesic_point(beta, alpha, t, cp: CurvatureParam):
    """Point gamma(t) on the unit-speed geodesic entering at (beta, alpha).

    gamma(0) = e^{i beta}; gamma(exit_time) lies on the boundary again.
    Arguments broadcast; t must stay within [0, exit_time(alpha)].
    """
    beta = np.asarray(beta, dtype=float)
    a = wrap_pi(alpha)
    t = np.asarray(t, dtype=float)
    tau = exit_time(a, cp)
    tol = ANGLE_TOL * (1.0 + np.max(tau, initial=0.0))
    bad = (t < -tol) | (t > tau + tol)
    if np.any(bad):
        worst = np.max(np.where(bad, np.abs(t - np.clip(t, 0.0, tau)), 0.0))
        raise ValueError(
            f"arclength t outside [0, exit_time] by up to {worst:.3e}"
        )
    w = np.exp(1j * a) * _profile(np.clip(t, 0.0, tau), cp)
    return np.exp(1j * beta) * (1.0 - w) / (1.0 + cp.kappa * w)


def geodesic_velocity(beta, alpha, t, cp: CurvatureParam):
    """Velocity dgamma/dt of the geodesic of `geodesic_point`.

    Its modulus equals the conformal factor at gamma(t) (unit g-speed),
    and its argument is the direction angle of the tangent vector.
    """
    beta = np.asarray(beta, dtype=float)
    a = wrap_pi(alpha)
    z = _profile(np.asarray(t, dtype=float), cp)
    k = cp.kappa
    ph = np.exp(1j * a)
    return -np.exp(1j * beta) * ph * (1.0 + k) * (1.0 + k * z**2) / (1.0 + k * ph * z) ** 2


def sig(alpha, cp: CurvatureParam):
    """Scattering signature: continuous branch of arctan(lam * tan(alpha)).

    Odd, strictly increasing, with sig(0) = 0 and sig(alpha + pi) =
    sig(alpha) + pi.  Computed as alpha - arg(1 + kappa e^{2 i alpha}),
    which realizes that branch without unwrapping (the argument stays in
    the right half plane for |kappa| < 1).
    """
    a = np.asarray(alpha, dtype=float)
    k = cp.kappa
    return a - np.arctan2(k * np.sin(2.0 * a), 1.0 + k * np.cos(2.0 * a))


def sig_prime(alpha, cp: CurvatureParam):
    """Derivative of the scattering signature, (1-k^2)/(1+k^2+2k cos 2a)."""
    a = np.asarray(alpha, dtype=float)
    k = cp.kappa
    return (1.0 - k * k) / (1.0 + k * k + 2.0 * k * np.cos(2.0 * a))


def sig_inverse(alpha, cp: CurvatureParam):
    """Inverse of the scattering signature; equals sig at opposite curvature."""
    return sig(alpha, cp.flipped())


def scattering_angles(beta, alpha, cp: CurvatureParam):
    """Scattering relation on angles: (beta, alpha) -> exit point and direction.

    Valid on the whole boundary circle bundle (it is an involution there);
    returns (beta', alpha') with beta' in [0, 2*pi), alpha' in [-pi, pi).
    """
    beta = np.asarray(beta, dtype=float)
    a = np.asarray(alpha, dtype=float)
    return wrap_two_pi(beta + np.pi + 2.0 * sig(a, cp)), wrap_pi(np.pi - a)


def antipodal_scattering_angles(beta, alpha, cp: CurvatureParam):
    """Scattering relation composed with the fiberwise antipodal map."""
    beta = np.asarray(beta, dtype=float)
    a = np.asarray(alpha, dtype=float)
    return wrap_two_pi(beta + np.pi + 2.0 * sig(a, cp)), wrap_pi(-a)


def scattering(bp: FanBeamPoint, cp: CurvatureParam) -> FanBeamPoint:
    """Scattering relation: maps one end of a geodesic to the other."""
    b, a = scattering_angles(bp.beta, bp.alpha, cp)
    return FanBeamPoint(float(b), float(a))


def antipodal_scattering(bp: FanBeamPoint, cp: CurvatureParam) -> FanBeamPoint:
    """Antipodal scattering: exit point with direction reversed back inward."""
    b, a = antipodal_scattering_angles(bp.beta, bp.alpha, cp)
    return FanBeamPoint(float(b), float(a))


def fiber_change(rho, theta, cp: CurvatureParam):
    """Fiber angle substitution theta -> theta' and its jacobian.

    theta' = theta - arg(1 + kappa rho^2 e^{2 i theta}) on the continuous
    branch; the jacobian d theta'/d theta is strictly positive.
    """
    rho = np.asarray(rho, dtype=float)
    th = np.asarray(theta, dtype=float)
    m = cp.kappa * rho**2
    thp = th - np.arctan2(m * np.sin(2.0 * th), 1.0 + m * np.cos(2.0 * th))
    jac = (1.0 - m**2) / ((1.0 + m) ** 2 - 4.0 * m * np.sin(th) ** 2)
    return thp, jac


def footpoint_angles(rho, omega, theta, cp: CurvatureParam):
    """Fan-beam coordinates of the geodesic through the interior point.

    Given (rho e^{i omega}, theta) in the interior circle bundle, returns
    (beta_-, alpha_-): the entry point and entry angle of the unique
    geodesic through that point with direction theta.  Closed form; the
    returned alpha_- lies in [-pi/2, pi/2].
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho >= 1.0) or np.any(rho < 0.0):
        raise ValueError("footpoint requires an interior radius 0 <= rho < 1")
    om = np.asarray(omega, dtype=float)
    th = np.asarray(theta, dtype=float) - om
    k = cp.kappa
    s = -(1.0 + k) * rho * np.sin(th) / (1.0 + k * rho**2)
    alpha_m = np.arcsin(np.clip(s, -1.0, 1.0))
    thp, _ = fiber_change(rho, th, cp)
    beta_m = thp - np.pi - sig(alpha_m, cp) + om
    return wrap_two_pi(beta_m), alpha_m


def footpoint(rho: float, omega: float, theta: float, cp: CurvatureParam) -> FanBeamPoint:
    """Single-point version of `footpoint_angles` returning a FanBeamPoint."""
    b, a = footpoint_angles(rho, omega, theta, cp)
    return FanBeamPoint(float(b), float(a))
