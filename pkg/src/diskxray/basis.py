"""Special-function families on the disk and on the inward boundary bundle.

Disk side: complex Zernike polynomials Z_{n,k} (convention Z_{n,0} = z^n,
boundary values (-1)^k e^{i(n-2k) omega}) and their curvature-deformed
versions Z^kappa_{n,k}, which are the right singular functions of the
X-ray transform in the weighted disk space.

Boundary side: the pure phases e_{p,l}, the sqrt(sig')-weighted family
phi'_{p,q} and its symmetrized combinations u'_{p,q}, v'_{p,q}, and the
functions psi^kappa_{n,k} which are the left singular functions (and, for
k outside [0, n], span the co-kernel / moment conditions).

Index conventions: the boundary family uses (p, q) in Z^2; the singular
pairs use (n, k) with n >= 0, related by (p, q) = (n - 2k, n - k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .geometry import CurvatureParam, sig, sig_prime

_FOUR_PI = 4.0 * math.pi


# ---------------------------------------------------------------------------
# index bookkeeping
# ---------------------------------------------------------------------------

def nk_to_pq(n: int, k: int) -> tuple[int, int]:
    """Re-index a singular pair (n, k) as a boundary pair (p, q) = (n-2k, n-k)."""
    return n - 2 * k, n - k


def pq_to_nk(p: int, q: int) -> tuple[int, int]:
    """Inverse of `nk_to_pq`: (n, k) = (2q - p, q - p)."""
    return 2 * q - p, q - p


@dataclass(frozen=True, order=True)
class BasisIndex:
    """Index (n, k) of a basis member; n >= 0, k unrestricted for the
    boundary family and 0 <= k <= n for the disk family."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"basis degree n must be >= 0, got {self.n}")

    @property
    def pq(self) -> tuple[int, int]:
        return nk_to_pq(self.n, self.k)


@dataclass
class CoeffTable:
    """Complex coefficients indexed by (n, k), band-limited at nmax.

    Iteration over `items()` is deterministic (lexicographic in (n, k)).
    """

    nmax: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        for (n, k) in self.entries:
            if n < 0 or n > self.nmax:
                raise ValueError(f"index ({n},{k}) outside band limit nmax={self.nmax}")

    def __getitem__(self, nk):
        return self.entries.get(tuple(nk), 0.0 + 0.0j)

    def __setitem__(self, nk, value):
        n, k = nk
        if n < 0 or n > self.nmax:
            raise ValueError(f"index ({n},{k}) outside band limit nmax={self.nmax}")
        self.entries[(n, k)] = complex(value)

    def items(self):
        return [(nk, self.entries[nk]) for nk in sorted(self.entries)]

    def norm_sq(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.entries.values()))


# ---------------------------------------------------------------------------
# Chebyshev-type family W_n
# ---------------------------------------------------------------------------

def cheb_w(n: int, t):
    """W_n(t): degree-n polynomial with W_0 = 1, W_1 = 2it and
    W_{n+1} = 2it W_n + W_{n-1}; equals i^n times the Chebyshev
    polynomial of the second kind U_n(t)."""
    if n < 0:
        raise ValueError("cheb_w requires n >= 0")
    t = np.asarray(t, dtype=float)
    w_prev = np.ones(t.shape, dtype=complex)
    if n == 0:
        return w_prev
    w = 2j * t
    for _ in range(n - 1):
        w_prev, w = w, 2j * t * w + w_prev
    return w


# ---------------------------------------------------------------------------
# Zernike polynomials, plain and curvature-deformed
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def zernike_radial_coeffs(n: int, k: int) -> np.ndarray:
    """Ascending power coefficients of the radial profile R_{n,k}.

    Obtained by expanding W_n(rho sin theta) into harmonics and
    extracting the e^{-i(n-2k) theta} component; the result is the
    integer-coefficient polynomial

        R_{n,k}(rho) = sum_l (-1)^(k+l) C(n-l, l) C(n-2l, k-l) rho^(n-2l)

    over 0 <= l <= min(k, n-k).
    """
    if not 0 <= k <= n:
        raise ValueError(f"zernike radial profile needs 0 <= k <= n, got (n,k)=({n},{k})")
    coeffs = [0] * (n + 1)
    for l in range(min(k, n - k) + 1):
        coeffs[n - 2 * l] = (-1) ** (k + l) * math.comb(n - l, l) * math.comb(n - 2 * l, k - l)
    return np.asarray(coeffs, dtype=float)


def warm_radial_cache(nmax: int) -> None:
    """Precompute all radial coefficient tables up to degree nmax.

    Useful before fanning evaluation out over threads; afterwards the
    cache is only read.
    """
    for n in range(nmax + 1):
        for k in range(n + 1):
            zernike_radial_coeffs(n, k)


def zernike_radial(n: int, k: int, rho):
    """Radial profile R_{n,k} evaluated at rho (scalar or array)."""
    rho = np.asarray(rho, dtype=float)
    return np.polynomial.polynomial.polyval(rho, zernike_radial_coeffs(n, k))


def zernike(n: int, k: int, z):
    """Zernike polynomial Z_{n,k}(z) = R_{n,k}(|z|) e^{i(n-2k) arg z}.

    Convention: Z_{n,0}(z) = z^n, Z_{n,k}(e^{i omega}) = (-1)^k
    e^{i(n-2k) omega}, and Z_{n,n-k} = (-1)^n conj(Z_{n,k}).
    """
    if not 0 <= k <= n:
        raise ValueError(f"zernike requires 0 <= k <= n, got (n,k)=({n},{k})")
    z = np.asarray(z, dtype=complex)
    rho = np.abs(z)
    if np.any(rho > 1.0 + 1e-6):
        raise ValueError("zernike is defined on the closed unit disk")
    omega = np.angle(z)
    return zernike_radial(n, k, np.minimum(rho, 1.0)) * np.exp(1j * (n - 2 * k) * omega)


def w_kappa(z, cp: CurvatureParam):
    """Disk weight (1 + kappa |z|^2) / (1 - kappa |z|^2)."""
    z = np.asarray(z, dtype=complex)
    r2 = z.real**2 + z.imag**2
    return (1.0 + cp.kappa * r2) / (1.0 - cp.kappa * r2)


def zernike_kappa(n: int, k: int, z, cp: CurvatureParam):
    """Deformed Zernike function: Z_{n,k} composed with the radial map
    rho -> (1-kappa) rho / (1-kappa rho^2) and multiplied by the weight
    sqrt((1-kappa)/(1+kappa)) (1+kappa|z|^2)/(1-kappa|z|^2)."""
    z = np.asarray(z, dtype=complex)
    k_ = cp.kappa
    r2 = z.real**2 + z.imag**2
    scale = (1.0 - k_) / (1.0 - k_ * r2)
    weight = math.sqrt((1.0 - k_) / (1.0 + k_)) * (1.0 + k_ * r2) / (1.0 - k_ * r2)
    return weight * zernike(n, k, scale * z)


def zernike_kappa_hat(n: int, k: int, z, cp: CurvatureParam):
    """Deformed Zernike normalized to unit norm in the weighted disk space."""
    scale = math.sqrt((n + 1) * (1.0 - cp.kappa**2) / math.pi)
    return scale * zernike_kappa(n, k, z, cp)


# ---------------------------------------------------------------------------
# boundary families
# ---------------------------------------------------------------------------

def e_pl(p: int, l: int, beta, alpha, cp: CurvatureParam):
    """Pure phase e^{i(p beta + l sig(alpha))} on the boundary bundle."""
    beta = np.asarray(beta, dtype=float)
    return np.exp(1j * (p * beta + l * sig(alpha, cp)))


def phi_prime(p: int, q: int, beta, alpha, cp: CurvatureParam):
    """sqrt(sig') e_{p, 2q+1}: eigenfunction of the fiberwise Hilbert
    transform with eigenvalue -i sign(2q+1)."""
    return np.sqrt(sig_prime(alpha, cp)) * e_pl(p, 2 * q + 1, beta, alpha, cp)


def u_prime(p: int, q: int, beta, alpha, cp: CurvatureParam):
    """Symmetric combination phi'_{p,q} + (-1)^p phi'_{p,p-q-1}.

    Even under the antipodal scattering pullback; redundancy
    u'_{p,q} = (-1)^p u'_{p,p-q-1}.
    """
    return phi_prime(p, q, beta, alpha, cp) + (-1) ** p * phi_prime(p, p - q - 1, beta, alpha, cp)


def v_prime(p: int, q: int, beta, alpha, cp: CurvatureParam):
    """Antisymmetric combination phi'_{p,q} - (-1)^p phi'_{p,p-q-1}.

    Odd under the antipodal scattering pullback; redundancy
    v'_{p,q} = -(-1)^p v'_{p,p-q-1}.
    """
    return phi_prime(p, q, beta, alpha, cp) - (-1) ** p * phi_prime(p, p - q - 1, beta, alpha, cp)


def boundary_family(p: int, q: int, beta, alpha, cp: CurvatureParam):
    """Evaluate (e_{p,2q+1}, phi'_{p,q}, u'_{p,q}, v'_{p,q}) at once."""
    e = e_pl(p, 2 * q + 1, beta, alpha, cp)
    root = np.sqrt(sig_prime(alpha, cp))
    phi = root * e
    phi2 = (-1) ** p * root * e_pl(p, 2 * (p - q - 1) + 1, beta, alpha, cp)
    return e, phi, phi + phi2, phi - phi2


def psi_kappa(n: int, k: int, beta, alpha, cp: CurvatureParam):
    """Boundary singular function psi^kappa_{n,k}.

    ((-1)^n / 4 pi) sqrt(sig'(alpha)) e^{i(n-2k)(beta + sig(alpha))}
    (e^{i(n+1) sig(alpha)} + (-1)^n e^{-i(n+1) sig(alpha)}); equals
    ((-1)^n / 4 pi) u'_{n-2k, n-k}.
    """
    if n < 0:
        raise ValueError("psi_kappa requires n >= 0")
    beta = np.asarray(beta, dtype=float)
    s = sig(alpha, cp)
    g = np.exp(1j * (n + 1) * s) + (-1) ** n * np.exp(-1j * (n + 1) * s)
    return (-1) ** n / _FOUR_PI * np.sqrt(sig_prime(alpha, cp)) * np.exp(1j * (n - 2 * k) * (beta + s)) * g


def psi_kappa_hat(n: int, k: int, beta, alpha, cp: CurvatureParam):
    """psi^kappa_{n,k} normalized to unit norm on the inward boundary."""
    return 2.0 * math.sqrt(1.0 + cp.kappa) * psi_kappa(n, k, beta, alpha, cp)


def psi_over_mu(n: int, k: int, beta, alpha, cp: CurvatureParam):
    """psi^kappa_{n,k} divided by mu = cos(alpha), in cancellation-free form.

    Uses sqrt(sig')/cos(alpha) = sqrt((1+kappa)/(1-kappa)) sqrt(sig')/cos(sig)
    and g_n(s)/(2 cos s) = W_n(sin s) to avoid the tangential 0/0; the
    result is smooth across alpha = +-pi/2.
    """
    if n < 0:
        raise ValueError("psi_over_mu requires n >= 0")
    beta = np.asarray(beta, dtype=float)
    s = sig(alpha, cp)
    amp = math.sqrt((1.0 + cp.kappa) / (1.0 - cp.kappa)) * sig_prime(alpha, cp)
    return (-1) ** n / (2.0 * math.pi) * amp * np.exp(1j * (n - 2 * k) * (beta + s)) * cheb_w(n, np.sin(s))


def norms(n: int, k: int, cp: CurvatureParam) -> tuple[float, float]:
    """Squared norms of (psi^kappa_{n,k}, Z^kappa_{n,k}) in their spaces.

    psi in L^2 of the inward boundary with the bundle surface measure:
    1 / (4 (1+kappa)); Z^kappa in the weighted disk space:
    pi / ((1-kappa^2) (n+1)).  Both are independent of k.
    """
    if n < 0:
        raise ValueError("norms requires n >= 0")
    psi_norm_sq = 1.0 / (4.0 * (1.0 + cp.kappa))
    zk_norm_sq = math.pi / ((1.0 - cp.kappa**2) * (n + 1))
    return psi_norm_sq, zk_norm_sq
