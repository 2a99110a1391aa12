"""Hermitization diagnostics for the ratio model.

The non-Hermitian pencil X^z = A/sqrt(n) - z B/sqrt(n) is embedded into the
Hermitian block matrix H^z = [[0, X^z], [(X^z)*, 0]], whose spectrum is the
symmetrized set of singular values of X^z. On top of that embedding this
module provides:

* resolvent traces Im Tr (H^z - i eta)^(-1) in spectral closed form,
* the deterministic reference m^z(w), a rescaled Stieltjes transform of the
  semicircle law, and the finite-size residual against it,
* eigenvalue-counting residuals against the rescaled semicircle density,
* the log-determinant identity linking linear eigenvalue statistics of
  A B^(-1) to grid integrals of Delta f(z) log|det X^z|,
* the small-singular-value tail experiment.

Trace convention: green_trace_im sums over all 2n eigenvalues of H^z (so it
grows like 2n/eta for large eta), and comparisons against Im m^z divide by 2n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import cmatrix
from .cmatrix import (
    _hermitized_block,
    as_complex_matrix,
    lu_decompose,
    singular_values,
    spectrum_of_ratio,
)
from .entrylaws import sample_matrix

LOGDET_CLIP_PER_DIM = 30.0


@dataclass(frozen=True)
class HermitizedPencil:
    """The scaled pencil X^z and the spectrum of its Hermitian embedding."""

    z: complex
    x: np.ndarray
    spectrum: np.ndarray  # 2n values, ascending, symmetric under negation

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def singular_values(self):
        """Ascending nonnegative half of the spectrum."""
        return self.spectrum[self.n :]

    def hermitian_matrix(self):
        """The 2n x 2n block embedding [[0, X], [X*, 0]]."""
        return _hermitized_block(self.x)


def hermitize(a, b, z):
    """Build the pencil X^z = (A - z B)/sqrt(n) and its symmetrized spectrum."""
    am = as_complex_matrix(a)
    bm = as_complex_matrix(b)
    if am.shape != bm.shape:
        raise ValueError("A and B must have the same shape")
    n = am.shape[0]
    z = complex(z)
    x = (am - z * bm) / math.sqrt(n)
    svals = singular_values(x)
    spectrum = np.concatenate([-svals[::-1], svals])
    return HermitizedPencil(z, x, spectrum)


def green_trace_im(pencil, eta):
    """Im Tr (H^z - i eta)^(-1) = sum over positive eigenvalues of 2 eta/(lam^2 + eta^2)."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    lam = pencil.singular_values
    return float(np.sum(2.0 * eta / (lam * lam + eta * eta)))


def msc(w):
    """Stieltjes transform of the semicircle law: root of m^2 + w m + 1 = 0.

    The branch is fixed by Im(m) Im(w) > 0; purely real w is rejected.
    """
    w = complex(w)
    if w.imag == 0.0:
        raise ValueError("msc needs Im w != 0")
    s = np.sqrt(w * w - 4.0 + 0.0j)
    m = 0.5 * (-w + s)
    if m.imag * w.imag <= 0.0:
        m = 0.5 * (-w - s)
    return complex(m)


def m_z(z, w):
    """Rescaled semicircle transform for the pencil at shift z."""
    s = math.sqrt(1.0 + abs(complex(z)) ** 2)
    return msc(complex(w) / s) / s


@dataclass(frozen=True)
class GreenDiagnostics:
    """One resolvent-trace measurement against its deterministic reference.

    trace_im is Im Tr G^z(i eta) over all 2n eigenvalues (nonnegative for
    eta > 0; the full trace is purely imaginary by the block structure), and
    residual = |trace_im/(2n) - Im m^z(i eta)|.
    """

    z: complex
    eta: float
    trace_im: float
    m_reference: complex
    residual: float


def green_diagnostics(pencil, eta):
    """Measure the normalized resolvent trace of a pencil at spectral scale eta."""
    trace_im = green_trace_im(pencil, eta)
    reference = m_z(pencil.z, 1j * eta)
    residual = abs(trace_im / (2.0 * pencil.n) - reference.imag)
    return GreenDiagnostics(pencil.z, float(eta), trace_im, reference, residual)


def local_law_residual(law_a, law_b, n, z, eta, rng):
    """|(2n)^(-1) Im Tr G^z(i eta) - Im m^z(i eta)| for one sampled pencil.

    The expected size is O(1/(n eta)); eta below 1/n is refused because the
    deterministic reference stops being meaningful at that scale.
    """
    if eta < 1.0 / n:
        raise ValueError("eta must be at least 1/n")
    a = sample_matrix(law_a, n, rng)
    b = sample_matrix(law_b, n, rng)
    return green_diagnostics(hermitize(a, b, z), eta).residual


def semicircle_density(x):
    """Semicircle density sqrt((4 - x^2)+)/(2 pi)."""
    x = np.asarray(x, dtype=np.float64)
    out = np.sqrt(np.maximum(4.0 - x * x, 0.0)) / (2.0 * math.pi)
    return float(out) if out.ndim == 0 else out


def rho_z(x, z):
    """Spectral density of H^z: the semicircle rescaled by sqrt(1 + |z|^2)."""
    s = math.sqrt(1.0 + abs(complex(z)) ** 2)
    return semicircle_density(np.asarray(x) / s) / s


def counting_residual(pencil, e1, e2):
    """N(e1, e2) - 2n * integral of rho^z over [e1, e2].

    N counts all 2n eigenvalues of the Hermitian embedding, so the residual
    over any interval containing the full spectrum is exactly zero.
    """
    if not e1 < e2:
        raise ValueError("need e1 < e2")
    count = int(np.sum((pencil.spectrum >= e1) & (pencil.spectrum <= e2)))
    s = math.sqrt(1.0 + abs(pencil.z) ** 2)
    lo = max(e1, -2.0 * s)
    hi = min(e2, 2.0 * s)
    integral = 0.0
    if lo < hi:
        integral, _ = quad(lambda t: rho_z(t, pencil.z), lo, hi, epsabs=1e-10, epsrel=1e-10)
    return count - 2.0 * pencil.n * integral


def radial_gaussian_bump(z, rate=2.0):
    """Smooth radial test function exp(-rate |z|^2); effectively supported in |z| <= 3."""
    z = np.asarray(z, dtype=np.complex128)
    out = np.exp(-rate * (z.real**2 + z.imag**2))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class LogDetComparison:
    """Both sides of the log-determinant linear-statistic identity."""

    lhs: float
    rhs: float
    grid_points: int
    extent: float
    clipped_cells: int
    support_warning: bool

    @property
    def abs_error(self):
        return abs(self.lhs - self.rhs)


def linear_statistic_logdet(a, b, f, extent=4.0, grid_points=101):
    """Compare (1/n) sum f(lambda_i) with its log-determinant representation.

    lhs averages f over the spectrum of A B^(-1); rhs integrates
    Delta f(z) log|det((A - zB)/sqrt(n))| / (2 pi n) over a uniform
    grid_points x grid_points grid on [-extent, extent]^2, with the Laplacian
    taken by the centered 5-point stencil. Cells whose log-determinant falls
    below -30 n are clipped and counted; a support_warning flags f not
    vanishing on the boundary ring.
    """
    am = as_complex_matrix(a)
    bm = as_complex_matrix(b)
    if am.shape != bm.shape:
        raise ValueError("A and B must have the same shape")
    if grid_points < 5:
        raise ValueError("the 5-point stencil needs at least a 5 x 5 grid")
    n = am.shape[0]
    at = am / math.sqrt(n)
    bt = bm / math.sqrt(n)

    sample = spectrum_of_ratio(am, bm)
    fvals_spec = np.array([f(lam) for lam in sample.eigenvalues], dtype=np.float64)
    lhs = float(np.mean(fvals_spec))

    xs = np.linspace(-extent, extent, grid_points)
    h = xs[1] - xs[0]
    grid = xs[None, :] + 1j * xs[:, None]
    fgrid = np.asarray(f(grid), dtype=np.float64)

    fmax = float(np.abs(fgrid).max())
    boundary = max(
        np.abs(fgrid[0, :]).max(),
        np.abs(fgrid[-1, :]).max(),
        np.abs(fgrid[:, 0]).max(),
        np.abs(fgrid[:, -1]).max(),
    )
    support_warning = bool(boundary > 1e-12 * max(fmax, 1e-300))

    logdet = np.empty_like(fgrid)
    for i in range(grid_points):
        for j in range(grid_points):
            logdet[i, j] = lu_decompose(at - grid[i, j] * bt).log_abs_det
    floor = -LOGDET_CLIP_PER_DIM * n
    clipped = int(np.sum(logdet < floor))
    np.maximum(logdet, floor, out=logdet)

    lap = (
        fgrid[2:, 1:-1] + fgrid[:-2, 1:-1] + fgrid[1:-1, 2:] + fgrid[1:-1, :-2] - 4.0 * fgrid[1:-1, 1:-1]
    ) / (h * h)
    rhs = float(np.sum(lap * logdet[1:-1, 1:-1]) * h * h / (2.0 * math.pi * n))
    return LogDetComparison(lhs, rhs, grid_points, float(extent), clipped, support_warning)


@dataclass(frozen=True)
class SvalTailTable:
    """Empirical CDF of the smallest singular value of X^z over many trials."""

    t: np.ndarray
    prob: np.ndarray
    trials: int
    n: int
    z: complex
    samples: np.ndarray

    def rows(self):
        return list(zip(self.t.tolist(), self.prob.tolist()))


def sval_tail_experiment(law_a, law_b, n, z, t_grid, trials, rng):
    """Empirical P(lambda_1^z <= t) on a grid of thresholds.

    lambda_1^z is the smallest singular value of (A - zB)/sqrt(n). The
    quadratic small-t behavior of the law shows as a log-log slope close to 2
    over the resolvable range (see fit_tail_slope).
    """
    if trials < 1000:
        raise ValueError("the tail experiment needs at least 1000 trials")
    t = np.sort(np.asarray(t_grid, dtype=np.float64))
    z = complex(z)
    rt = math.sqrt(n)
    samples = np.empty(trials)
    for i in range(trials):
        a = sample_matrix(law_a, n, rng)
        b = sample_matrix(law_b, n, rng)
        samples[i] = cmatrix.smallest_singular_value((a - z * b) / rt)
    samples.sort()
    prob = np.searchsorted(samples, t, side="right") / trials
    return SvalTailTable(t, prob, trials, n, z, samples)


def fit_tail_slope(table, min_events=5, max_prob=0.5):
    """Least-squares slope of log P(lambda_1 <= t) against log t.

    Only grid points with at least min_events hits and probability at most
    max_prob enter the fit (the resolvable tail range).
    """
    counts = table.prob * table.trials
    mask = (counts >= min_events) & (table.prob <= max_prob)
    if int(mask.sum()) < 2:
        raise ValueError("fewer than two resolvable grid points; enlarge the grid or trials")
    x = np.log(table.t[mask])
    y = np.log(table.prob[mask])
    slope = np.polyfit(x, y, 1)[0]
    return float(slope)
