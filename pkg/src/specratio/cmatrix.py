"""Dense complex linear algebra: LU, solves, eigenvalues and singular values.

Matrices are plain numpy arrays of complex128. Every operation validates its
input, copies it, and runs on the compiled kernels in
:mod:`specratio._lakernels`; nothing here mutates caller data. The
non-Hermitian eigensolver is Hessenberg reduction followed by implicitly
shifted complex QR; singular values go through the Hermitian block embedding
[[0, X], [X*, 0]] and a tridiagonal QL solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _lakernels

MACHINE_EPS = _lakernels.MACHINE_EPS

DEFAULT_EIG_TOL = 1e-12
DEFAULT_EIG_MAXITER = 30


class SingularMatrixError(ValueError):
    """Raised when a solve hits an exactly singular factorization."""

    def __init__(self, pivot_index):
        self.pivot_index = pivot_index
        super().__init__(f"matrix is singular (zero pivot at index {pivot_index})")


class EigenConvergenceError(RuntimeError):
    """Raised when the QR iteration fails to deflate a block."""

    def __init__(self, lo, hi):
        self.lo = lo
        self.hi = hi
        super().__init__(f"QR iteration did not converge on block [{lo}, {hi}]")


def as_complex_matrix(a):
    """Validate and return a square, finite, C-contiguous complex128 copy."""
    m = np.array(a, dtype=np.complex128, order="C", copy=True)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 1:
        raise ValueError("matrix dimension must be at least 1")
    if not np.all(np.isfinite(m.view(np.float64))):
        raise ValueError("matrix has non-finite entries")
    return m


@dataclass(frozen=True)
class LUFactorization:
    """PA = LU with partial pivoting; lu packs the unit-L and U factors."""

    lu: np.ndarray
    piv: np.ndarray
    log_abs_det: float
    sign_swaps: int
    zero_pivot_index: int

    @property
    def n(self):
        return self.lu.shape[0]

    @property
    def is_singular(self):
        return self.zero_pivot_index >= 0

    @property
    def pivot_magnitudes(self):
        return np.abs(np.diag(self.lu))

    @property
    def l(self):
        return np.tril(self.lu, -1) + np.eye(self.n, dtype=np.complex128)

    @property
    def u(self):
        return np.triu(self.lu)

    @property
    def permutation(self):
        p = np.zeros((self.n, self.n), dtype=np.complex128)
        p[np.arange(self.n), self.piv] = 1.0
        return p


def lu_decompose(m):
    """Partial-pivoting LU of m; log|det| is -inf for exactly singular input."""
    a = as_complex_matrix(m)
    piv = np.arange(a.shape[0], dtype=np.int64)
    log_abs_det, swaps, zero_pivot = _lakernels.lu_factor_inplace(a, piv)
    return LUFactorization(a, piv, float(log_abs_det), int(swaps), int(zero_pivot))


def solve_factored(fact, rhs):
    """Solve M x = rhs from an existing factorization of M."""
    if fact.is_singular:
        raise SingularMatrixError(fact.zero_pivot_index)
    b = np.array(rhs, dtype=np.complex128, order="C", copy=True)
    squeeze = b.ndim == 1
    if squeeze:
        b = b[:, None]
    if b.shape[0] != fact.n:
        raise ValueError(f"rhs has {b.shape[0]} rows, expected {fact.n}")
    x = np.empty_like(b)
    _lakernels.lu_solve_inplace(fact.lu, fact.piv, b, x)
    return x[:, 0] if squeeze else x


def solve(m, rhs):
    """Solve M x = rhs by LU with partial pivoting."""
    return solve_factored(lu_decompose(m), rhs)


def eigenvalues(m, tol=DEFAULT_EIG_TOL, maxiter=DEFAULT_EIG_MAXITER):
    """All eigenvalues of m via Hessenberg reduction + implicit-shift QR.

    tol is the relative deflation threshold on subdiagonal entries; the
    returned values are exact eigenvalues of a nearby matrix M + E with
    ||E|| = O(n * tol * ||M||).
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    a = as_complex_matrix(m)
    if a.shape[0] == 1:
        return a[0, :1].copy()
    _lakernels.hessenberg_inplace(a)
    eigs, lo, hi = _lakernels.hessenberg_eigvals(a, tol, maxiter)
    if lo >= 0:
        raise EigenConvergenceError(lo, hi)
    return eigs


@dataclass(frozen=True)
class SpectrumSample:
    """One trial's eigenvalue multiset with its outer and inner radii."""

    eigenvalues: np.ndarray
    n: int
    rho_max: float
    rho_min: float

    @classmethod
    def from_eigenvalues(cls, eigs):
        eigs = np.asarray(eigs, dtype=np.complex128)
        mods = np.abs(eigs)
        return cls(eigs, eigs.size, float(mods.max()), float(mods.min()))


def spectrum_of_ratio(a, b):
    """Spectrum of A @ inv(B), formed by a right solve (never an inverse)."""
    am = as_complex_matrix(a)
    bm = as_complex_matrix(b)
    if am.shape != bm.shape:
        raise ValueError("A and B must have the same shape")
    fact = lu_decompose(bm.T)
    ratio = solve_factored(fact, am.T).T
    return SpectrumSample.from_eigenvalues(eigenvalues(np.ascontiguousarray(ratio)))


def hermitian_eigenvalues(h, maxiter=50):
    """Ascending eigenvalues of a Hermitian matrix (tridiagonal QL route)."""
    a = as_complex_matrix(h)
    scale = np.abs(a).max()
    if scale > 0 and np.abs(a - a.conj().T).max() > 1e-12 * scale:
        raise ValueError("matrix is not Hermitian")
    n = a.shape[0]
    d = np.empty(n, dtype=np.float64)
    e = np.zeros(n, dtype=np.float64)
    _lakernels.hermitian_tridiag(a, d, e)
    if n > 1:
        bad = _lakernels.tridiag_eigvals(d, e, maxiter)
        if bad >= 0:
            raise EigenConvergenceError(bad, bad)
    d.sort()
    return d


def _hermitized_block(x):
    """The 2n x 2n Hermitian embedding [[0, X], [X*, 0]]."""
    n = x.shape[0]
    h = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    h[:n, n:] = x
    h[n:, :n] = x.conj().T
    return h


def singular_values(x):
    """All singular values of x, ascending.

    Computed as the nonnegative half of the spectrum of the Hermitian block
    embedding; opposite-sign pairs are averaged, which also removes the
    rounding-level asymmetry of the computed spectrum.
    """
    xm = as_complex_matrix(x)
    spec = hermitian_eigenvalues(_hermitized_block(xm))
    n = xm.shape[0]
    svals = 0.5 * (spec[n:] - spec[:n][::-1])
    return np.maximum(svals, 0.0)


def smallest_singular_value(x):
    """Minimum singular value; equals 1/||inv(X)|| for invertible X."""
    return float(singular_values(x)[0])
