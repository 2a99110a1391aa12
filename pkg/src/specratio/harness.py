"""Seeded parallel Monte Carlo over entry laws, with goodness-of-fit gates.

Trials are embarrassingly parallel. Every trial owns a counter-based random
stream derived from (master seed, trial index), so results are bit-identical
for any worker count and any execution order; merged samples are re-sorted
before any statistic is computed. Rejection conditioning, when enabled,
redraws a trial until both matrices clear a relative pivot floor, which is
how exactly singular draws of the discrete laws are handled.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .cmatrix import lu_decompose, spectrum_of_ratio
from .entrylaws import parse_law, sample_matrix
from .limitlaw import LimitLawCdf
from .spherical import equilibrium_radial_cdf

SCHEMA_VERSION = 1

STATISTICS = ("rho_max_scaled", "rho_min_scaled", "pooled_moduli")

DEFAULT_REJECTION_THRESHOLD = 1e-12

# per-trial redraw budget; exhausting it means the rejection rate is >= 99%
_MAX_REDRAWS = 1000


def derive_trial_rng(master_seed, trial_index):
    """Counter-based per-trial stream keyed by (seed, index).

    Uses the Philox generator with the pair as its 128-bit key, so streams
    for distinct trials are independent and reproducible regardless of how
    trials are scheduled across workers.
    """
    key = np.array([np.uint64(master_seed), np.uint64(trial_index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class ExperimentConfig:
    """Radius-experiment configuration; also the provenance record."""

    law_a: str
    law_b: str
    n: int
    trials: int
    seed: int
    statistic: str = "rho_max_scaled"
    rejection_threshold: float | None = DEFAULT_REJECTION_THRESHOLD
    workers: int = 1

    def validate(self):
        parse_law(self.law_a)
        parse_law(self.law_b)
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.statistic not in STATISTICS:
            raise ValueError(f"statistic must be one of {STATISTICS}")
        if self.rejection_threshold is not None and not 0.0 < self.rejection_threshold <= 1e-3:
            raise ValueError("rejection threshold must lie in (0, 1e-3]")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        cfg = cls(**d)
        cfg.validate()
        return cfg


@dataclass(frozen=True)
class ExperimentResult:
    """Sorted samples of the chosen statistic plus the fit against its limit."""

    samples: np.ndarray
    ks_vs_limit: float
    rejected_count: int
    runtime_seconds: float
    provenance: dict

    def to_json(self):
        doc = {
            "schema_version": SCHEMA_VERSION,
            "kind": "radius_experiment",
            "provenance": self.provenance,
            "ks_vs_limit": self.ks_vs_limit,
            "rejected_count": self.rejected_count,
            "runtime_seconds": self.runtime_seconds,
            "samples": self.samples.tolist(),
        }
        return json.dumps(doc)


def reference_cdf(statistic):
    """The limit CDF an experiment statistic is compared against."""
    if statistic == "rho_max_scaled":
        return LimitLawCdf("rinf").cdf
    if statistic == "rho_min_scaled":
        return LimitLawCdf("r0").cdf
    if statistic == "pooled_moduli":
        return equilibrium_radial_cdf
    raise ValueError(f"statistic must be one of {STATISTICS}")


def _min_pivot_ratio(m):
    """Smallest over largest LU pivot magnitude; 0 for an exactly singular matrix."""
    fact = lu_decompose(m)
    piv = fact.pivot_magnitudes
    top = piv.max()
    if top == 0.0 or fact.is_singular:
        return 0.0
    return float(piv.min() / top)


def _run_trial(law_a, law_b, n, rng, threshold, statistic):
    """One (possibly redrawn) trial; returns (statistic values, redraw count)."""
    rejected = 0
    for _ in range(_MAX_REDRAWS):
        a = sample_matrix(law_a, n, rng)
        b = sample_matrix(law_b, n, rng)
        if threshold is not None and (
            _min_pivot_ratio(a) < threshold or _min_pivot_ratio(b) < threshold
        ):
            rejected += 1
            continue
        sample = spectrum_of_ratio(a, b)
        if statistic == "rho_max_scaled":
            return np.array([sample.rho_max / math.sqrt(n)]), rejected
        if statistic == "rho_min_scaled":
            return np.array([sample.rho_min * math.sqrt(n)]), rejected
        return np.abs(sample.eigenvalues), rejected
    raise RuntimeError(
        f"persistent singularity: {_MAX_REDRAWS} consecutive draws of "
        f"({law_a.spec_string}, {law_b.spec_string}) at n={n} were rejected "
        f"at threshold {threshold:g}"
    )


def _run_chunk(config_dict, lo, hi):
    cfg = ExperimentConfig.from_dict(config_dict)
    law_a = parse_law(cfg.law_a)
    law_b = parse_law(cfg.law_b)
    values = []
    rejected = 0
    for index in range(lo, hi):
        rng = derive_trial_rng(cfg.seed, index)
        vals, rej = _run_trial(law_a, law_b, cfg.n, rng, cfg.rejection_threshold, cfg.statistic)
        values.append(vals)
        rejected += rej
    return np.concatenate(values), rejected


def run_radius_experiment(config):
    """Run the Monte Carlo experiment described by config.

    Per trial: draw A and B entrywise (unit-variance entries; the statistic
    applies the sqrt(n) scaling), optionally reject near-singular draws,
    take the spectrum of A B^(-1), and record the configured statistic.
    The aggregate is compared against the matching limit CDF.
    """
    config.validate()
    t0 = time.perf_counter()
    chunks = _chunk_ranges(config.trials, config.workers)
    if config.workers == 1:
        parts = [_run_chunk(config.to_dict(), lo, hi) for lo, hi in chunks]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_run_chunk, config.to_dict(), lo, hi) for lo, hi in chunks]
            parts = [f.result() for f in futures]
    samples = np.sort(np.concatenate([p[0] for p in parts]))
    rejected = sum(p[1] for p in parts)
    ks = ks_statistic(samples, reference_cdf(config.statistic))
    runtime = time.perf_counter() - t0
    provenance = {
        "config": config.to_dict(),
        "package_version": __version__,
        "schema_version": SCHEMA_VERSION,
    }
    return ExperimentResult(samples, float(ks), int(rejected), float(runtime), provenance)


def _chunk_ranges(trials, workers):
    pieces = max(1, min(trials, 4 * workers))
    bounds = np.linspace(0, trials, pieces + 1).astype(int)
    return [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]


def ks_statistic(samples, cdf):
    """One-sample Kolmogorov-Smirnov statistic against a CDF evaluator.

    samples must be nonempty and sorted ascending.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.size == 0:
        raise ValueError("samples must be nonempty")
    if np.any(np.diff(x) < 0):
        raise ValueError("samples must be sorted ascending")
    f = np.asarray(cdf(x), dtype=np.float64)
    i = np.arange(1, x.size + 1, dtype=np.float64)
    upper = np.max(i / x.size - f)
    lower = np.max(f - (i - 1.0) / x.size)
    return float(max(upper, lower, 0.0))


def two_sample_ks(x, y):
    """Two-sample Kolmogorov-Smirnov statistic."""
    x = np.sort(np.asarray(x, dtype=np.float64))
    y = np.sort(np.asarray(y, dtype=np.float64))
    if x.size == 0 or y.size == 0:
        raise ValueError("both samples must be nonempty")
    pooled = np.concatenate([x, y])
    fx = np.searchsorted(x, pooled, side="right") / x.size
    fy = np.searchsorted(y, pooled, side="right") / y.size
    return float(np.max(np.abs(fx - fy)))


@dataclass(frozen=True)
class HistogramTable:
    """CSV-ready histogram rows; density integrates to one."""

    bin_left: np.ndarray
    bin_right: np.ndarray
    count: np.ndarray
    density: np.ndarray

    def rows(self):
        return list(
            zip(
                self.bin_left.tolist(),
                self.bin_right.tolist(),
                self.count.tolist(),
                self.density.tolist(),
            )
        )


def histogram(samples, bins, sample_range=None):
    """Equal-width histogram with normalized density."""
    if bins < 1:
        raise ValueError("bins must be at least 1")
    x = np.asarray(samples, dtype=np.float64)
    count, edges = np.histogram(x, bins=bins, range=sample_range)
    widths = np.diff(edges)
    density = count / (x.size * widths) if x.size else np.zeros_like(widths)
    return HistogramTable(edges[:-1], edges[1:], count, density)


@dataclass(frozen=True)
class CrossLawComparison:
    """Pairwise two-sample KS distances between entry laws."""

    results: list
    pairs: list  # rows (law_i, law_j, ks)

    def rows(self):
        return list(self.pairs)


def cross_law_comparison(configs):
    """Run several configs sharing (n, trials, statistic) and compare them pairwise.

    Universality predicts all pairwise two-sample KS values are small and
    shrink as n grows.
    """
    configs = list(configs)
    if len(configs) < 2:
        raise ValueError("need at least two configurations to compare")
    base = (configs[0].n, configs[0].trials, configs[0].statistic)
    for cfg in configs[1:]:
        if (cfg.n, cfg.trials, cfg.statistic) != base:
            raise ValueError("configs must share n, trials and statistic")
    results = [run_radius_experiment(cfg) for cfg in configs]
    pairs = []
    for i in range(len(configs)):
        for j in range(i + 1, len(configs)):
            ks = two_sample_ks(results[i].samples, results[j].samples)
            pairs.append((configs[i].law_a, configs[j].law_a, ks))
    return CrossLawComparison(results, pairs)


def write_samples_csv(stream, samples):
    """Fixed sample CSV schema: header then one shortest-roundtrip float per row."""
    stream.write("sample\n")
    for v in samples:
        stream.write(repr(float(v)))
        stream.write("\n")


def read_samples_csv(stream):
    header = stream.readline().strip()
    if header != "sample":
        raise ValueError(f"expected a 'sample' CSV header, got {header!r}")
    return np.array([float(line) for line in stream if line.strip()], dtype=np.float64)
