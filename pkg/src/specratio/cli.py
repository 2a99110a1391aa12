"""Command-line interface.

Subcommands cover the experiment engine (radius, compare, hist), the exact
spherical-ensemble diagnostics (kostlan, kernel-gap), the limit laws
(limit-cdf, limit-sample), the Hermitization diagnostics (local-law,
logdet-check, sval-tail), the entry-law moment audit (audit), and a debug
eigensolver entry point (eig). All tabular output is CSV with fixed headers;
``--format json`` on the experiment commands emits the full result record
with its schema_version.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys

import numpy as np

from . import harness, hermitization, limitlaw, spherical
from .cmatrix import eigenvalues
from .entrylaws import audit_moments, parse_law

_EXPERIMENT_DEFAULTS = {
    "law_a": "gaussian",
    "law_b": None,  # defaults to law_a
    "n": 64,
    "trials": 200,
    "seed": 0,
    "statistic": "rho_max_scaled",
    "rejection_threshold": harness.DEFAULT_REJECTION_THRESHOLD,
    "workers": 1,
}


@contextlib.contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _write_rows(stream, header, rows):
    stream.write(header + "\n")
    for row in rows:
        stream.write(",".join(_format_cell(v) for v in row))
        stream.write("\n")


def _format_cell(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_rejection(text):
    # "off" survives as a marker until the config merge, where it becomes None;
    # a None return here would look like "flag not given"
    if text == "off":
        return "off"
    return float(text)


def _parse_range(text):
    """start:stop:step, inclusive of endpoints up to rounding."""
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError as exc:
        raise SystemExit(f"bad grid spec {text!r}, expected start:stop:step") from exc
    if step <= 0 or stop < start:
        raise SystemExit(f"bad grid spec {text!r}")
    return np.arange(start, stop + 0.5 * step, step)


def _parse_log_grid(text):
    """start:stop:points, log spaced."""
    try:
        start, stop, points = text.split(":")
        grid = np.geomspace(float(start), float(stop), int(points))
    except ValueError as exc:
        raise SystemExit(f"bad log grid spec {text!r}, expected start:stop:points") from exc
    return grid


def _experiment_config(args):
    settings = dict(_EXPERIMENT_DEFAULTS)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(settings)
        if unknown:
            raise SystemExit(f"unknown config keys: {sorted(unknown)}")
        settings.update(loaded)
    for key in settings:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if settings["rejection_threshold"] == "off":
        settings["rejection_threshold"] = None
    if settings["law_b"] is None:
        settings["law_b"] = settings["law_a"]
    cfg = harness.ExperimentConfig(**settings)
    cfg.validate()
    return cfg


def _add_experiment_flags(p, with_laws=True):
    if with_laws:
        p.add_argument("--law-a", dest="law_a", help="entry law of A (e.g. gaussian, ghq:k=4)")
        p.add_argument("--law-b", dest="law_b", help="entry law of B (defaults to --law-a)")
    p.add_argument("--n", type=int, help="matrix dimension")
    p.add_argument("--trials", type=int, help="number of Monte Carlo trials")
    p.add_argument("--seed", type=int, help="64-bit master seed")
    p.add_argument("--statistic", choices=harness.STATISTICS)
    p.add_argument(
        "--rejection",
        dest="rejection_threshold",
        type=_parse_rejection,
        help="relative pivot floor for rejection sampling, or 'off'",
    )
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("--config", help="JSON file with experiment settings (flags override)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _cmd_radius(args):
    cfg = _experiment_config(args)
    result = harness.run_radius_experiment(cfg)
    with _open_out(args.out) as fh:
        if args.format == "json":
            fh.write(result.to_json())
            fh.write("\n")
        else:
            harness.write_samples_csv(fh, result.samples)
    print(
        f"ks_vs_limit={result.ks_vs_limit:.6f} rejected={result.rejected_count} "
        f"runtime={result.runtime_seconds:.2f}s",
        file=sys.stderr,
    )
    return 0


def _cmd_compare(args):
    laws = [s.strip() for s in args.laws.split(",") if s.strip()]
    if len(laws) < 2:
        raise SystemExit("--laws needs at least two comma-separated law specs")
    base = _experiment_config(args)
    configs = [
        harness.ExperimentConfig(
            law_a=law,
            law_b=law if args.law_b is None else args.law_b,
            n=base.n,
            trials=base.trials,
            seed=base.seed,
            statistic=base.statistic,
            rejection_threshold=base.rejection_threshold,
            workers=base.workers,
        )
        for law in laws
    ]
    comparison = harness.cross_law_comparison(configs)
    with _open_out(args.out) as fh:
        if args.format == "json":
            doc = {
                "schema_version": harness.SCHEMA_VERSION,
                "kind": "cross_law_comparison",
                "pairs": [
                    {"law_i": a, "law_j": b, "ks": ks} for a, b, ks in comparison.pairs
                ],
            }
            fh.write(json.dumps(doc))
            fh.write("\n")
        else:
            _write_rows(fh, "law_a,law_b,ks", comparison.pairs)
    return 0


def _cmd_hist(args):
    with open(args.infile, encoding="utf-8") as fh:
        samples = harness.read_samples_csv(fh)
    sample_range = None
    if args.range:
        lo, _, hi = args.range.partition(":")
        sample_range = (float(lo), float(hi))
    table = harness.histogram(samples, args.bins, sample_range)
    with _open_out(args.out) as fh:
        _write_rows(fh, "bin_left,bin_right,count,density", table.rows())
    return 0


def _cmd_eig(args):
    raw = np.loadtxt(args.infile, delimiter=",", ndmin=2, dtype=np.float64)
    n = raw.shape[0]
    if raw.shape[1] != 2 * n:
        raise SystemExit(
            f"expected {2 * n} interleaved re,im columns for a {n}x{n} matrix, got {raw.shape[1]}"
        )
    m = raw[:, 0::2] + 1j * raw[:, 1::2]
    eigs = eigenvalues(m)
    with _open_out(args.out) as fh:
        _write_rows(fh, "re,im", [(float(e.real), float(e.imag)) for e in eigs])
    return 0


def _cmd_kernel_gap(args):
    if args.grid != "default":
        raise SystemExit("only the 'default' evaluation grid is available")
    ns = [int(s) for s in args.n.split(",")]
    rows = [(n, spherical.scaled_kernel_gap(n)) for n in ns]
    with _open_out(args.out) as fh:
        _write_rows(fh, "n,gap", rows)
    return 0


def _cmd_kostlan(args):
    with _open_out(args.out) as fh:
        fh.write("modulus\n")
        for trial in range(args.trials):
            rng = harness.derive_trial_rng(args.seed, trial)
            for value in spherical.kostlan_moduli(args.n, rng):
                fh.write(repr(float(value)))
                fh.write("\n")
    return 0


def _cmd_limit_cdf(args):
    law = limitlaw.LimitLawCdf(args.which)
    xs = _parse_range(args.grid)
    rows = [(float(x), float(law.cdf(x))) for x in xs if x > 0]
    with _open_out(args.out) as fh:
        _write_rows(fh, "x,cdf", rows)
    return 0


def _cmd_limit_sample(args):
    rng = harness.derive_trial_rng(args.seed, 0)
    draws = limitlaw.sample_r0(rng, size=args.n)
    if args.which == "rinf":
        draws = 1.0 / draws
    with _open_out(args.out) as fh:
        harness.write_samples_csv(fh, draws)
    return 0


def _cmd_local_law(args):
    law_a = parse_law(args.law)
    law_b = parse_law(args.law_b) if args.law_b else law_a
    z = complex(args.z)
    rows = []
    for trial in range(args.trials):
        rng = harness.derive_trial_rng(args.seed, trial)
        res = hermitization.local_law_residual(law_a, law_b, args.n, z, args.eta, rng)
        rows.append((trial, float(res)))
    with _open_out(args.out) as fh:
        _write_rows(fh, "trial,residual", rows)
    residuals = np.array([r for _, r in rows])
    print(
        f"median={np.median(residuals):.6f} p95={np.quantile(residuals, 0.95):.6f} "
        f"scale 1/(n*eta)={1.0 / (args.n * args.eta):.6f}",
        file=sys.stderr,
    )
    return 0


def _cmd_logdet_check(args):
    law_a = parse_law(args.law)
    law_b = parse_law(args.law_b) if args.law_b else law_a
    rng = harness.derive_trial_rng(args.seed, 0)
    a = law_a.sample(rng, (args.n, args.n))
    b = law_b.sample(rng, (args.n, args.n))
    comparison = hermitization.linear_statistic_logdet(
        a, b, hermitization.radial_gaussian_bump, extent=args.extent, grid_points=args.grid
    )
    doc = {
        "schema_version": harness.SCHEMA_VERSION,
        "kind": "logdet_check",
        "lhs": comparison.lhs,
        "rhs": comparison.rhs,
        "abs_error": comparison.abs_error,
        "grid_points": comparison.grid_points,
        "extent": comparison.extent,
        "clipped_cells": comparison.clipped_cells,
        "support_warning": comparison.support_warning,
    }
    with _open_out(args.out) as fh:
        fh.write(json.dumps(doc))
        fh.write("\n")
    return 0


def _cmd_sval_tail(args):
    law_a = parse_law(args.law)
    law_b = parse_law(args.law_b) if args.law_b else law_a
    rng = harness.derive_trial_rng(args.seed, 0)
    table = hermitization.sval_tail_experiment(
        law_a, law_b, args.n, complex(args.z), _parse_log_grid(args.t_grid), args.trials, rng
    )
    with _open_out(args.out) as fh:
        _write_rows(fh, "t,prob", table.rows())
    return 0


def _cmd_audit(args):
    law = parse_law(args.law)
    audit = audit_moments(law, n=args.n, c0=args.c0, max_order=args.max_order)
    with _open_out(args.out) as fh:
        fh.write(audit.to_json())
        fh.write("\n")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="specratio",
        description="Spectral statistics of ratios of random matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("radius", help="Monte Carlo spectral-radius experiment")
    _add_experiment_flags(p)
    p.set_defaults(func=_cmd_radius)

    p = sub.add_parser("compare", help="pairwise KS comparison across entry laws")
    p.add_argument("--laws", required=True, help="comma-separated law specs")
    _add_experiment_flags(p, with_laws=False)
    p.add_argument("--law-b", dest="law_b", help="fixed law of B for every config")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("hist", help="histogram of a sample CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--range", help="lo:hi histogram range")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_hist)

    p = sub.add_parser("eig", help="eigenvalues of a CSV matrix (interleaved re,im)")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_eig)

    p = sub.add_parser("kernel-gap", help="scaled-kernel distance to the flat limit")
    p.add_argument("--n", required=True, help="comma-separated particle counts")
    p.add_argument("--grid", default="default")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_kernel_gap)

    p = sub.add_parser("kostlan", help="exact eigenvalue-moduli draws (no eigensolver)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_kostlan)

    p = sub.add_parser("limit-cdf", help="tabulate a limit-law CDF")
    p.add_argument("--which", choices=("r0", "rinf"), required=True)
    p.add_argument("--grid", required=True, help="start:stop:step")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_limit_cdf)

    p = sub.add_parser("limit-sample", help="exact draws of a limit law")
    p.add_argument("--which", choices=("r0", "rinf"), required=True)
    p.add_argument("--n", type=int, required=True, help="number of draws")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_limit_sample)

    p = sub.add_parser("local-law", help="resolvent-trace residuals against the semicircle reference")
    p.add_argument("--law", required=True)
    p.add_argument("--law-b", dest="law_b")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--z", default="0")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_local_law)

    p = sub.add_parser("logdet-check", help="log-determinant linear-statistic identity")
    p.add_argument("--law", default="gaussian")
    p.add_argument("--law-b", dest="law_b")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--grid", type=int, default=101, help="grid points per axis")
    p.add_argument("--extent", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_logdet_check)

    p = sub.add_parser("sval-tail", help="smallest-singular-value tail experiment")
    p.add_argument("--law", default="gaussian")
    p.add_argument("--law-b", dest="law_b")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--z", default="1")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--t-grid", dest="t_grid", default="1e-4:1e-2:17", help="start:stop:points, log spaced")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sval_tail)

    p = sub.add_parser("audit", help="entry-law moment audit (JSON)")
    p.add_argument("--law", required=True)
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--c0", type=float, default=0.1)
    p.add_argument("--max-order", dest="max_order", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_audit)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
