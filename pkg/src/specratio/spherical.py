"""Exact machinery for the Ginibre-ratio (spherical) ensemble.

Everything here is eigensolver-free: radii come from the product structure of
the ensemble's moduli (independent Beta-prime variables), local statistics
from the determinantal kernel, and global geometry from the stereographic
correspondence with the round sphere. The n-particle kernel on the plane is

    K_n(z, w) = sqrt(kappa(z) kappa(w)) * n * u^(n-1),
    u = (1 + z conj(w)) / sqrt((1+|z|^2)(1+|w|^2)),
    kappa(z) = 1 / (pi (1+|z|^2)^2),

and 1/n K_n(z/sqrt(n), w/sqrt(n)) converges to the flat-limit kernel
K(z, w) = sqrt(gamma(z) gamma(w)) e^{z conj(w)} with gamma(z) = e^{-|z|^2}/pi.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .cmatrix import lu_decompose

SPHERE_NORM_TOL = 1e-12
MAX_DENSITY_POINTS = 12


class _InfinityType:
    """Tagged point at infinity for the sphere/Moebius interface."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = _InfinityType()


def kappa(z):
    """Density of the stereographically projected uniform sphere measure."""
    return 1.0 / (math.pi * (1.0 + abs(z) ** 2) ** 2)


@dataclass(frozen=True)
class SphericalKernel:
    """Determinantal kernel of the n-point spherical ensemble."""

    n: int

    def __call__(self, z, w):
        u = 1.0 + z * np.conj(w)
        if u == 0.0:
            return 0.0 + 0.0j
        u /= math.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))
        # (n-1)-th power via the principal log; |u| <= 1 by Cauchy-Schwarz
        val = cmath.exp((self.n - 1) * cmath.log(u))
        return math.sqrt(kappa(z) * kappa(w)) * self.n * val


@dataclass(frozen=True)
class GinibreInfinityKernel:
    """Kernel of the infinite flat determinantal limit, K(z, z) = 1/pi."""

    def __call__(self, z, w):
        g = cmath.exp(z * np.conj(w) - 0.5 * abs(z) ** 2 - 0.5 * abs(w) ** 2)
        return g / math.pi


def kernel_eval(kernel, z, w):
    """Pointwise kernel value K(z, w)."""
    return kernel(complex(z), complex(w))


def kostlan_moduli(n, rng):
    """One joint draw of the n eigenvalue moduli, without any matrix.

    The squared moduli are independent Beta-prime(k, n-k+1) variables,
    realized as ratios of independent Gamma(k,1) and Gamma(n-k+1,1) draws.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    k = np.arange(1, n + 1, dtype=np.float64)
    num = rng.gamma(k)
    den = rng.gamma(n - k + 1.0)
    return np.sqrt(num / den)


def spherical_radius_pair(n, rng):
    """(rho_max, rho_min) of one spherical-ensemble draw, exactly in law."""
    moduli = kostlan_moduli(n, rng)
    return float(moduli.max()), float(moduli.min())


# shared grid for the scaling-limit diagnostics: all ordered pairs from a
# small set of base points with |z| <= sqrt(5), where the 5/n envelope holds
DEFAULT_GAP_BASE_POINTS = (0.0 + 0.0j, 1.0 + 0.0j, 1.0j, -1.5 + 0.0j, 1.0 - 2.0j)
DEFAULT_GAP_GRID = tuple(product(DEFAULT_GAP_BASE_POINTS, repeat=2))


def scaled_kernel_gap(n, grid=DEFAULT_GAP_GRID):
    """Sup over (z, w) pairs of |1/n K_n(z/sqrt(n), w/sqrt(n)) - K_inf(z, w)|."""
    pairs = list(grid)
    if not pairs:
        raise ValueError("grid must be nonempty")
    kn = SphericalKernel(n)
    kinf = GinibreInfinityKernel()
    rt = math.sqrt(n)
    gap = 0.0
    for z, w in pairs:
        if abs(z) > 5.0 or abs(w) > 5.0:
            raise ValueError("grid points must satisfy |z|, |w| <= 5")
        gap = max(gap, abs(kn(z / rt, w / rt) / n - kinf(z, w)))
    return gap


def joint_density(points, n):
    """Joint eigenvalue density det[K_n(z_i, z_j)] at a small configuration."""
    pts = [complex(p) for p in points]
    if len(pts) != n:
        raise ValueError(f"expected {n} points, got {len(pts)}")
    if n > MAX_DENSITY_POINTS:
        raise ValueError(f"full Gram determinants are limited to n <= {MAX_DENSITY_POINTS}")
    kn = SphericalKernel(n)
    gram = np.array([[kn(zi, zj) for zj in pts] for zi in pts], dtype=np.complex128)
    # Hermitian PSD Gram: the density is |det|, and exactly 0 for singular input
    return math.exp(lu_decompose(gram).log_abs_det) if n > 1 else gram[0, 0].real


@dataclass(frozen=True)
class SpherePoint:
    """Point on the unit two-sphere."""

    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        r = math.sqrt(self.x1**2 + self.x2**2 + self.x3**2)
        if abs(r - 1.0) > SPHERE_NORM_TOL:
            raise ValueError(f"point is off the unit sphere by {abs(r - 1.0):.3e}")


NORTH_POLE = SpherePoint(0.0, 0.0, 1.0)


def stereo_proj(p):
    """North-pole stereographic projection; exactly the pole maps to INFINITY."""
    if p.x3 >= 1.0:
        return INFINITY
    return (p.x1 + 1j * p.x2) / (1.0 - p.x3)


def stereo_inv(z):
    """Inverse stereographic projection; INFINITY maps to the north pole."""
    if z is INFINITY:
        return NORTH_POLE
    z = complex(z)
    d = abs(z) ** 2 + 1.0
    return SpherePoint(2.0 * z.real / d, 2.0 * z.imag / d, (abs(z) ** 2 - 1.0) / d)


@dataclass(frozen=True)
class MobiusMap:
    """Rotation of the sphere in stereographic coordinates.

    The map is z -> (alpha z + beta) / (-conj(beta) z + conj(alpha)) with
    |alpha|^2 + |beta|^2 = 1.
    """

    alpha: complex
    beta: complex

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > SPHERE_NORM_TOL:
            raise ValueError(f"(alpha, beta) is off the unit sphere of C^2 by {abs(norm - 1.0):.3e}")

    def apply(self, z):
        if z is INFINITY:
            if self.beta == 0.0:
                return INFINITY
            return -self.alpha / np.conj(self.beta)
        z = complex(z)
        den = -np.conj(self.beta) * z + np.conj(self.alpha)
        if den == 0.0:
            return INFINITY
        return (self.alpha * z + self.beta) / den

    __call__ = apply


def mobius_apply(mapping, z):
    """Apply a Moebius rotation, with INFINITY handled symbolically."""
    return mapping.apply(z)


def mobius_from_center(lam0):
    """The rotation z -> (z + lam0)/(-conj(lam0) z + 1), normalized; maps 0 to lam0."""
    lam0 = complex(lam0)
    s = 1.0 / math.sqrt(1.0 + abs(lam0) ** 2)
    return MobiusMap(s + 0.0j, s * lam0)


def equilibrium_radial_cdf(r):
    """P(|z| <= r) under the exact mean spectral measure: r^2/(1+r^2)."""
    r = np.asarray(r, dtype=np.float64)
    if np.any(r < 0):
        raise ValueError("radius must be nonnegative")
    out = r * r / (1.0 + r * r)
    return float(out) if out.ndim == 0 else out
