"""Complex i.i.d. entry distributions for the matrix-ratio experiments.

Every law here is a product law on C = R^2: the real and imaginary parts are
independent draws from one symmetric real coordinate law with mean 0 and
variance 1/2, so the complex entry has mean 0, E|Z|^2 = 1 and E[Z^2] = 0.
Besides the Gaussian baseline there are two discrete laws (symmetric
Bernoulli, truncated symmetric Zipf), a Gauss-Hermite discretization that
matches Gaussian moments up to a chosen order, and a polynomially perturbed
Gaussian density that does the same with a bounded density.

Moment audits compare mixed moments E[(Re Z)^a (Im Z)^b] against the Gaussian
reference exactly (discrete laws) or by high-order quadrature (density laws);
there is no Monte Carlo fallback.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import hermite as nph
from scipy.special import erf

COORD_VARIANCE = 0.5
AUDIT_QUADRATURE_POINTS = 200
DEFAULT_MOMENT_ORDER = 16

# inverse-CDF table for the perturbed-Gaussian sampler
_TABLE_HALF_WIDTH = 8.5
_TABLE_POINTS = 8193
_INVCDF_TOL = 1e-10


def gaussian_coord_moment(j):
    """E[X^j] for X ~ N(0, 1/2): odd orders vanish, even are (j-1)!! / 2^(j/2)."""
    if j < 0:
        raise ValueError("moment order must be nonnegative")
    if j % 2 == 1:
        return 0.0
    acc = 1.0
    for i in range(1, j, 2):
        acc *= i
    return acc * COORD_VARIANCE ** (j // 2)


class EntryLaw:
    """Base class: a symmetric product law with unit-variance complex entries."""

    variant = "abstract"
    has_bounded_density = False
    declared_moment_order = DEFAULT_MOMENT_ORDER

    def sample_coord(self, rng, size=None):
        raise NotImplementedError

    def coord_moment(self, j):
        """Exact (or quadrature-exact) E[X^j] of one coordinate."""
        raise NotImplementedError

    def sample(self, rng, size=None):
        """Draw complex entries; real then imaginary coordinates, in that order."""
        re = self.sample_coord(rng, size)
        im = self.sample_coord(rng, size)
        return re + 1j * im

    @property
    def spec_string(self):
        return self.variant

    def __repr__(self):
        return f"{type(self).__name__}({self.spec_string!r})"


class ComplexGaussian(EntryLaw):
    """Standard complex Gaussian: N(0, 1/2) per coordinate."""

    variant = "gaussian"
    has_bounded_density = True

    def sample_coord(self, rng, size=None):
        return rng.standard_normal(size) * math.sqrt(COORD_VARIANCE)

    def coord_moment(self, j):
        return gaussian_coord_moment(j)


class _DiscreteCoordinateLaw(EntryLaw):
    """Shared machinery for laws whose coordinate has finite support."""

    def __init__(self, support, probs):
        self._support = np.asarray(support, dtype=np.float64)
        probs = np.asarray(probs, dtype=np.float64)
        self._probs = probs / probs.sum()
        self._cum = np.cumsum(self._probs)
        self._cum[-1] = 1.0

    @property
    def coord_support(self):
        return self._support.copy()

    @property
    def coord_probs(self):
        return self._probs.copy()

    def sample_coord(self, rng, size=None):
        u = rng.random(size)
        idx = np.searchsorted(self._cum, u, side="right")
        return self._support[idx]

    def coord_moment(self, j):
        if j == 0:
            return 1.0
        return float(np.sum(self._probs * self._support**j))


class SymmetricComplexBernoulli(_DiscreteCoordinateLaw):
    """Entries uniform on {(+-1 +-i)/sqrt(2)}: Rademacher/sqrt(2) coordinates."""

    variant = "bernoulli"

    def __init__(self):
        r = math.sqrt(COORD_VARIANCE)
        super().__init__([-r, r], [0.5, 0.5])


class GaussHermiteDiscrete(_DiscreteCoordinateLaw):
    """Finite law matching N(0, 1/2) coordinate moments up to order k.

    Uses the p-point Gauss-Hermite rule for the weight exp(-x^2), which is the
    N(0, 1/2) density up to normalization; p points match moments through
    order 2p - 1 >= k.
    """

    variant = "ghq"

    def __init__(self, k):
        if k < 2:
            raise ValueError("matched order k must be at least 2 (unit variance)")
        self.k = int(k)
        self.points = (self.k + 2) // 2
        nodes, weights = nph.hermgauss(self.points)
        super().__init__(nodes, weights / math.sqrt(math.pi))

    @property
    def matched_order(self):
        return 2 * self.points - 1

    @property
    def spec_string(self):
        return f"ghq:k={self.k}"


class ZipfSymmetric(_DiscreteCoordinateLaw):
    """Symmetric heavy-tailed coordinate: P(X = +-m*s) ~ m^-(alpha+1).

    The support is truncated at m <= max_index so that every moment is finite
    while the survival function still shows the x^-alpha tail over six
    decades; s normalizes the coordinate variance to 1/2.
    """

    variant = "zipf"

    def __init__(self, alpha, max_index=10**6):
        if not alpha > 2:
            raise ValueError("tail exponent alpha must exceed 2 (finite variance)")
        self.alpha = float(alpha)
        self.max_index = int(max_index)
        m = np.arange(1, self.max_index + 1, dtype=np.float64)
        w = m ** (-(self.alpha + 1.0))
        z = w.sum()
        # scale fixing sum p_m (s m)^2 = 1/2
        self.scale = math.sqrt(COORD_VARIANCE * z / np.sum(w * m * m))
        half = 0.5 * w / z
        support = np.concatenate([-self.scale * m[::-1], self.scale * m])
        probs = np.concatenate([half[::-1], half])
        super().__init__(support, probs)
        self._magnitude_survival = np.concatenate([w[::-1].cumsum()[::-1] / z, [0.0]])

    def tail_survival(self, x):
        """P(|X| > x), exact from the construction."""
        m = np.floor(np.asarray(x, dtype=np.float64) / self.scale).astype(np.int64)
        m = np.clip(m, 0, self.max_index)
        return self._magnitude_survival[m]

    @property
    def spec_string(self):
        alpha = self.alpha
        return f"zipf:alpha={int(alpha) if alpha == int(alpha) else alpha}"


class HermitePerturbed(EntryLaw):
    """Gaussian perturbed by a high-degree Hermite polynomial, per coordinate.

    The coordinate density is (1 + H_m(x)/c) * exp(-x^2)/sqrt(pi) with H_m the
    degree-m Hermite polynomial orthogonal for that weight and c = |min H_m|,
    so the density is nonnegative and all moments below order m are exactly
    Gaussian. Sampling is by inverse CDF: the CDF has the closed form

        F(x) = (1 + erf(x))/2 - H_{m-1}(x) exp(-x^2) / (c sqrt(pi)),

    inverted with a bracketed Newton iteration started from a dense table.
    """

    variant = "hermite"
    has_bounded_density = True

    def __init__(self, m):
        if m % 2 == 1 or m < 6:
            raise ValueError("perturbation degree m must be even and at least 6")
        self.m = int(m)
        self._coef_m = np.zeros(self.m + 1)
        self._coef_m[self.m] = 1.0
        self._coef_m1 = np.zeros(self.m)
        self._coef_m1[self.m - 1] = 1.0
        crit = nph.Hermite(self._coef_m).deriv().roots()
        crit = np.real(crit[np.abs(np.imag(crit)) < 1e-9])
        self.c = float(abs(np.min(nph.hermval(crit, self._coef_m))))
        self._x_grid = np.linspace(-_TABLE_HALF_WIDTH, _TABLE_HALF_WIDTH, _TABLE_POINTS)
        self._cdf_grid = self.coord_cdf(self._x_grid)

    def coord_pdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return (1.0 + nph.hermval(x, self._coef_m) / self.c) * np.exp(-x * x) / math.sqrt(math.pi)

    def coord_cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        base = 0.5 * (1.0 + erf(x))
        corr = nph.hermval(x, self._coef_m1) * np.exp(-x * x) / (self.c * math.sqrt(math.pi))
        return base - corr

    def _invert_cdf(self, u):
        lo_idx = np.clip(np.searchsorted(self._cdf_grid, u) - 1, 0, _TABLE_POINTS - 2)
        lo = self._x_grid[lo_idx]
        hi = self._x_grid[lo_idx + 1]
        flo = self._cdf_grid[lo_idx]
        fhi = self._cdf_grid[lo_idx + 1]
        df = fhi - flo
        x = np.where(df > 0, lo + (hi - lo) * (u - flo) / np.where(df > 0, df, 1.0), 0.5 * (lo + hi))
        resid = self.coord_cdf(x) - u
        for _ in range(40):
            if np.max(np.abs(resid)) <= _INVCDF_TOL:
                break
            neg = resid < 0
            lo = np.where(neg, x, lo)
            hi = np.where(neg, hi, x)
            xn = x - resid / np.maximum(self.coord_pdf(x), 1e-300)
            bad = ~np.isfinite(xn) | (xn <= lo) | (xn >= hi)
            x = np.where(bad, 0.5 * (lo + hi), xn)
            resid = self.coord_cdf(x) - u
        return x

    def sample_coord(self, rng, size=None):
        u = rng.random(size)
        scalar = np.isscalar(u)
        u = np.clip(np.atleast_1d(u), self._cdf_grid[0], self._cdf_grid[-1])
        x = self._invert_cdf(u)
        return float(x[0]) if scalar else x

    def coord_moment(self, j):
        nodes, weights = nph.hermgauss(AUDIT_QUADRATURE_POINTS)
        if j + self.m > 2 * AUDIT_QUADRATURE_POINTS - 1:
            raise ValueError(f"moment order {j} exceeds the exact quadrature range")
        vals = nodes**j * (1.0 + nph.hermval(nodes, self._coef_m) / self.c)
        return float(np.sum(weights * vals) / math.sqrt(math.pi))

    @property
    def spec_string(self):
        return f"hermite:m={self.m}"


def build_hermite_perturbed(m):
    """Moment-matched perturbed-Gaussian law of even degree m >= 6."""
    return HermitePerturbed(m)


def build_zipf_symmetric(alpha, max_index=10**6):
    """Truncated symmetric Zipf law with tail exponent alpha > 2."""
    return ZipfSymmetric(alpha, max_index=max_index)


def sample_entry(law, rng):
    """One draw of the complex entry distribution."""
    return complex(law.sample(rng))


def sample_matrix(law, n, rng):
    """An n x n matrix of i.i.d. entries from the law."""
    return law.sample(rng, (n, n))


def moment_deviation(law, k):
    """Largest mixed-moment gap max_{a+b=k} |E[Re^a Im^b] - Gaussian reference|."""
    if not 1 <= k <= law.declared_moment_order:
        raise ValueError(
            f"moment order {k} unavailable for {law.spec_string} "
            f"(declared up to {law.declared_moment_order})"
        )
    worst = 0.0
    for a in range(k + 1):
        b = k - a
        ours = law.coord_moment(a) * law.coord_moment(b)
        ref = gaussian_coord_moment(a) * gaussian_coord_moment(b)
        worst = max(worst, abs(ours - ref))
    return worst


@dataclass(frozen=True)
class MomentAudit:
    """Moment deviations E_k and the fourth-moment-matching verdict at (n, c0)."""

    variant: str
    deviations: dict
    satisfies_c2: bool
    n: int
    c0: float

    @property
    def e3_scaled(self):
        """E_3 * sqrt(n), the quantity the matching condition bounds by n^-c0."""
        return self.deviations.get(3, 0.0) * math.sqrt(self.n)

    def to_json(self):
        return json.dumps(
            {
                "variant": self.variant,
                "deviations": {str(k): v for k, v in sorted(self.deviations.items())},
                "satisfies_c2": self.satisfies_c2,
            }
        )


def audit_moments(law, n, c0=0.1, max_order=4, exact_tol=1e-12):
    """Audit the law against the fourth-moment matching condition at size n."""
    if max_order < 4:
        raise ValueError("the audit needs deviations at least up to order 4")
    deviations = {k: moment_deviation(law, k) for k in range(1, max_order + 1)}
    ok = (
        deviations[1] <= exact_tol
        and deviations[2] <= exact_tol
        and deviations[3] <= n ** (-0.5 - c0)
        and deviations[4] <= n ** (-c0)
    )
    return MomentAudit(law.spec_string, deviations, bool(ok), int(n), float(c0))


def parse_law(spec):
    """Parse a law specification string.

    Grammar: ``gaussian``, ``bernoulli``, ``zipf:alpha=4``, ``hermite:m=6``,
    ``ghq:k=4``.
    """
    name, _, tail = spec.strip().partition(":")
    params = {}
    if tail:
        for item in tail.split(","):
            key, _, value = item.partition("=")
            if not _:
                raise ValueError(f"malformed law parameter {item!r} in {spec!r}")
            params[key.strip()] = value.strip()
    try:
        if name == "gaussian":
            _require_params(params, ())
            return ComplexGaussian()
        if name == "bernoulli":
            _require_params(params, ())
            return SymmetricComplexBernoulli()
        if name == "zipf":
            _require_params(params, ("alpha",))
            return ZipfSymmetric(float(params["alpha"]))
        if name == "hermite":
            _require_params(params, ("m",))
            return HermitePerturbed(int(params["m"]))
        if name == "ghq":
            _require_params(params, ("k",))
            return GaussHermiteDiscrete(int(params["k"]))
    except ValueError as exc:
        raise ValueError(f"invalid law spec {spec!r}: {exc}") from exc
    raise ValueError(f"unknown law {name!r} (expected gaussian, bernoulli, zipf, hermite, ghq)")


def _require_params(params, names):
    missing = set(names) - set(params)
    extra = set(params) - set(names)
    if missing or extra:
        raise ValueError(f"expected parameters {set(names) or '{}'}, got {set(params) or '{}'}")
