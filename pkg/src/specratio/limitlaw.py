"""Limit laws of the scaled outer and inner spectral radii.

R0 is distributed as sqrt(min_k gamma_k) over independent gamma_k ~
Gamma(k, 1), and Rinf = 1/R0. Both CDFs are infinite products of the
Gamma survival functions

    S_k(x) = P(gamma_k >= x) = exp(-x) * sum_{j<k} x^j / j!,

truncated adaptively: the neglected factors are controlled through the exact
tail identity sum_{k>K} (1 - S_k(x)) = x*(1 - S_K(x)) - K*(1 - S_{K+1}(x)),
which bounds the product remainder via 1 - prod(1-a_k) <= sum a_k.

Note the distinction between S_k and the gamma CDF F_k = 1 - S_k: the
products below multiply survival functions, which is what makes
P(min_k gamma_k >= x) = prod_k S_k(x) correct.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_TRUNCATION_EPS = 1e-12

# exp(-x) underflows around 745; every factor (hence the product) is then
# below ~1e-300 and the product is indistinguishable from zero
_UNDERFLOW_X = 700.0
_MAX_FACTORS = 200000


def gamma_survival(k, x):
    """S_k(x) = P(Gamma(k,1) >= x), by the stable multiplicative recurrence.

    Terms are Poisson(x) probabilities built multiplicatively, so there is no
    factorial overflow for any k.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0.0:
        return 1.0
    if x > _UNDERFLOW_X and k < x / 2:
        return 0.0
    term = math.exp(-x)
    if term == 0.0:
        # log-space evaluation for the large-x, large-k corner
        log_term = -x
        logs = [log_term]
        for j in range(1, k):
            log_term += math.log(x) - math.log(j)
            logs.append(log_term)
        peak = max(logs)
        return math.exp(peak) * sum(math.exp(v - peak) for v in logs)
    s = term
    for j in range(1, k):
        term *= x / j
        s += term
    return min(s, 1.0)


def _log_survival_product(x, eps):
    """log prod_{k>=1} S_k(x), truncated when the remainder drops below eps.

    Tracks both s = S_k(x) and q = 1 - S_k(x) so each log factor is taken on
    whichever side is accurate; a running log below the float64 underflow line
    short-circuits to -inf (the product is then indistinguishable from zero).
    """
    if x == 0.0:
        return 0.0
    if x > _UNDERFLOW_X:
        return -math.inf
    pmf = math.exp(-x)  # Poisson(x) pmf at 0
    s = pmf  # S_1
    q = -math.expm1(-x)  # 1 - S_1
    log_prod = 0.0
    k = 1
    while k < _MAX_FACTORS:
        if s <= 0.0:
            return -math.inf
        log_prod += math.log(s) if s < 0.5 else math.log1p(-q)
        if log_prod < -745.0:
            return -math.inf
        pmf *= x / k
        s_next = min(s + pmf, 1.0)
        q_next = max(q - pmf, 0.0)
        # remainder sum_{j>k} q_j = x*q_k - k*q_{k+1}
        if x * q - k * q_next < eps:
            break
        s, q = s_next, q_next
        k += 1
    return log_prod


@dataclass(frozen=True)
class LimitLawCdf:
    """CDF evaluator for R0 (which="r0") or Rinf (which="rinf")."""

    which: str
    truncation_eps: float = DEFAULT_TRUNCATION_EPS

    def __post_init__(self):
        if self.which not in ("r0", "rinf"):
            raise ValueError('which must be "r0" or "rinf"')
        if not self.truncation_eps > 0:
            raise ValueError("truncation_eps must be positive")

    def cdf(self, x):
        """P(R <= x) for positive x; accepts scalars or arrays."""
        arr = np.asarray(x, dtype=np.float64)
        if np.any(arr <= 0):
            raise ValueError("the limit laws live on x > 0")
        flat = np.ravel(arr)
        out = np.empty(flat.shape, dtype=np.float64)
        for i, xi in enumerate(flat):
            if self.which == "r0":
                out[i] = -math.expm1(_log_survival_product(xi * xi, self.truncation_eps))
            else:
                out[i] = math.exp(_log_survival_product(xi**-2.0, self.truncation_eps))
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    __call__ = cdf

    def quantile(self, p, xtol=1e-10):
        """Inverse CDF by bisection on an adaptively expanded bracket."""
        if not 0.0 < p < 1.0:
            raise ValueError("quantile level must lie strictly in (0, 1)")
        lo, hi = 0.5, 2.0
        for _ in range(200):
            if self.cdf(lo) < p:
                break
            lo *= 0.5
        for _ in range(200):
            if self.cdf(hi) > p:
                break
            hi *= 2.0
        while hi - lo > xtol:
            mid = 0.5 * (lo + hi)
            if self.cdf(mid) < p:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def sample_r0(rng, size=None, tol=DEFAULT_TRUNCATION_EPS):
    """Exact draws of R0 = sqrt(min_k gamma_k).

    Gammas are drawn in blocks of increasing shape; the running minimum m is
    final once the same tail identity as in the CDF certifies
    sum_{k>K} P(gamma_k < m) < tol.
    """
    n = 1 if size is None else int(np.prod(size))
    m = np.full(n, np.inf)
    k = 0
    block = 16
    while True:
        for shape in range(k + 1, k + block + 1):
            np.minimum(m, rng.gamma(shape, size=n), out=m)
        k += block
        if _gamma_tail_sum(k, m) < tol:
            break
        if k > 4096:
            raise RuntimeError("minimum-of-gammas sampler failed to certify its tail")
    out = np.sqrt(m)
    if size is None:
        return float(out[0])
    return out.reshape(size)


def _gamma_tail_sum(k, x):
    """max over the batch of sum_{j>k} P(gamma_j < x), via the Poisson identity."""
    x = np.asarray(x, dtype=np.float64)
    pmf = np.exp(-x)
    q = -np.expm1(-x)
    for j in range(1, k + 1):
        pmf *= x / j
        q = np.maximum(q - pmf, 0.0)
    # after the loop q = q_{k+1} and pmf = pmf_k; q_k = q_{k+1} + pmf_k
    return float(np.max(x * (q + pmf) - k * q))
