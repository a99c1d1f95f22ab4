"""Command-line front end: generate, test, histogram, bench, quadrature.

Subcommands
-----------
gen         write n Gaussian samples (plus a .meta.json sidecar)
test        run the chi2/ad/ks battery on a sample file
hist        histogram a sample file as bin_lo,bin_hi,count CSV
bench       throughput comparison across algorithms, with core-invocation
            counts as the hardware resource proxy
quadrature  map generated Gaussians to (q, p) modulation pairs

Everything is reproducible from the command line: a 64-bit master seed
(--seed, or the GRNG_SEED environment variable) expands into per-stream
LFSR seeds through splitmix64, and (subcommand, full config) determines
every output byte except bench timing fields.  Generation can shard into
`--shards` worker streams with distinct derived seeds; output is
shard-major and deterministic given (seed, shard count).

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import fp_pipeline, qkdmod, sampleio, stats, transforms, urng

__all__ = ["main"]

_USAGE_EXIT = 1
_DATA_EXIT = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _seed_default():
    import os

    env = os.environ.get("GRNG_SEED")
    return int(env, 0) if env else 1


def _add_gen_args(p, *, need_out):
    p.add_argument("--algo", choices=transforms.ALGORITHMS, default="box-muller")
    p.add_argument("--n", type=int, default=1000, help="number of samples")
    p.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                   help="64-bit master seed (default: $GRNG_SEED or 1)")
    p.add_argument("--mode", choices=("reference", "pipeline"),
                   default="reference")
    p.add_argument("--k", type=int, default=12, help="CLT summand count")
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--poly", default=None,
                   help="LFSR polynomial, as x^a+x^b+...+1 or a hex tap mask")
    p.add_argument("--format", choices=sampleio.FORMATS, default="bin")
    p.add_argument("--out", required=need_out)


def _build_parser():
    parser = _Parser(prog="grng",
                     description="LFSR-driven Gaussian random number toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a Gaussian sample file")
    _add_gen_args(gen, need_out=True)

    test = sub.add_parser("test", help="run normality tests on a sample file")
    test.add_argument("input")
    test.add_argument("--suite", default="chi2,ad,ks",
                      help="comma-separated subset of chi2,ad,ks")
    test.add_argument("--alpha", type=float, default=0.05)
    test.add_argument("--bins", type=int, default=8,
                      help="equal-probability bins for the chi2 test")
    test.add_argument("--format", choices=sampleio.FORMATS, default=None)
    test.add_argument("--out", default=None, help="write the report as JSON")

    hist = sub.add_parser("hist", help="histogram a sample file to CSV")
    hist.add_argument("input")
    hist.add_argument("--bins", type=int, default=100)
    hist.add_argument("--format", choices=sampleio.FORMATS, default=None)
    hist.add_argument("--out", default=None, help="CSV path (default stdout)")

    bench = sub.add_parser("bench", help="compare algorithm throughput")
    _add_gen_args(bench, need_out=False)
    bench.add_argument("--all-algos", action="store_true",
                       help="bench every algorithm, not just --algo")

    quad = sub.add_parser("quadrature",
                          help="emit (q, p) Gaussian-modulation pairs")
    _add_gen_args(quad, need_out=True)
    quad.add_argument("--variance", type=float, default=1.0,
                      help="modulation variance V")

    return parser


def _lfsr_config_args(args):
    taps = urng.parse_polynomial(args.poly) if args.poly else urng.DEFAULT_POLYNOMIAL
    order = taps.bit_length() - 1
    return taps, order


def _shard_sizes(n, shards):
    base, extra = divmod(n, shards)
    return [base + (1 if i < extra else 0) for i in range(shards)]


def _generate(args, count):
    """Shard-major generation; returns (values, metadata dict)."""
    if count < 1:
        raise _UsageError("--n must be >= 1")
    if args.k < 2:
        raise _UsageError("--k must be >= 2")
    if args.shards < 1:
        raise _UsageError("--shards must be >= 1")
    seed = args.seed if args.seed is not None else _seed_default()
    taps, order = _lfsr_config_args(args)
    clt = transforms.CltConfig(k=args.k)
    streams_per_shard = clt.k if args.algo == "clt" else 2
    lfsr_seeds = urng.derive_seeds(seed, args.shards * streams_per_shard, order)

    pieces = []
    consumed = 0
    proposed = accepted = 0
    core_counts = {}
    for shard, size in enumerate(_shard_sizes(count, args.shards)):
        if size == 0:
            continue
        lo = shard * streams_per_shard
        sources = [
            urng.new_lfsr(urng.LfsrConfig(order=order, taps=taps, seed=s))
            for s in lfsr_seeds[lo:lo + streams_per_shard]
        ]
        result = transforms.stream(args.algo, sources, size,
                                   mode=args.mode, clt=clt)
        pieces.append(result.values)
        consumed += result.uniforms_consumed
        proposed += result.pairs_proposed
        accepted += result.pairs_accepted
        for core, c in (result.core_counts or {}).items():
            core_counts[core] = core_counts.get(core, 0) + c

    values = np.concatenate(pieces)
    meta = {
        "algorithm": args.algo,
        "mode": args.mode,
        "n": count,
        "master_seed": seed,
        "shards": args.shards,
        "order": order,
        "polynomial": urng.polynomial_str(taps),
        "taps": f"{taps:#x}",
        "lfsr_seeds": lfsr_seeds,
        "uniforms_consumed": consumed,
    }
    if args.algo == "clt":
        meta["k"] = args.k
    if args.algo == "polar":
        meta["pairs_proposed"] = proposed
        meta["pairs_accepted"] = accepted
    if core_counts:
        meta["core_counts"] = dict(sorted(core_counts.items()))
    return values, meta


def _cmd_gen(args):
    values, meta = _generate(args, args.n)
    path = sampleio.write_samples(args.out, values, args.mode, args.format)
    meta["format"] = args.format
    sampleio.write_sidecar(path, meta)
    print(f"wrote {values.size} samples to {path} "
          f"({meta['uniforms_consumed']} uniforms consumed)")
    return 0


def _render_report_table(reports):
    headers = ("Test", "Null Hypothesis", "P Value", "Test Statistic")
    names = {"chi2": "Chi-Square", "ad": "Anderson-Darling",
             "ks": "Kolmogorov-Smirnov"}
    rows = [(names[r.test_name], r.null_hypothesis, r.p_display,
             f"{r.statistic:.6g}") for r in reports]
    widths = [max(len(h), *(len(row[i]) for row in rows))
              for i, h in enumerate(headers)]
    def fmt(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths))
    return "\n".join([fmt(headers), fmt(["-" * w for w in widths])]
                     + [fmt(row) for row in rows])


def _cmd_test(args):
    suite = tuple(s.strip() for s in args.suite.split(",") if s.strip())
    if not suite:
        raise _UsageError("--suite must name at least one test")
    unknown = [s for s in suite if s not in ("chi2", "ad", "ks")]
    if unknown:
        raise _UsageError(f"unknown tests in --suite: {','.join(unknown)}")
    values, _mode = sampleio.read_samples(args.input, fmt=args.format)
    reports = stats.run_suite(values, suite=suite, alpha=args.alpha,
                              bins=args.bins)
    print(_render_report_table(reports))
    if args.out:
        doc = {"input": str(args.input), "n": int(values.size),
               "alpha": args.alpha,
               "reports": [r.to_dict() for r in reports]}
        with open(args.out, "w") as fh:
            json.dump(doc, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return 0


def _cmd_hist(args):
    if args.bins < 1:
        raise _UsageError("--bins must be >= 1")
    values, _mode = sampleio.read_samples(args.input, fmt=args.format)
    hist = stats.build_histogram(values, bins=args.bins)
    csv = hist.to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv)
    else:
        sys.stdout.write(csv)
    return 0


def _cmd_bench(args):
    algos = transforms.ALGORITHMS if args.all_algos else (args.algo,)
    print(f"{'algorithm':<12} {'mode':<10} {'samples/s':>12} "
          f"{'uniforms/sample':>16}  core counts")
    for algo in algos:
        ns = argparse.Namespace(**vars(args))
        ns.algo = algo
        start = time.perf_counter()
        values, meta = _generate(ns, args.n)
        elapsed = time.perf_counter() - start
        rate = values.size / elapsed if elapsed > 0 else float("inf")
        ratio = meta["uniforms_consumed"] / values.size
        counts = meta.get("core_counts")
        if counts is None:
            per_pass = fp_pipeline.expected_core_counts(
                algo, k=args.k, accepted=True)
            counts_str = "static/pass " + json.dumps(per_pass, sort_keys=True)
        else:
            counts_str = json.dumps(counts, sort_keys=True)
        print(f"{algo:<12} {args.mode:<10} {rate:>12.0f} {ratio:>16.3f}  "
              f"{counts_str}")
    return 0


def _cmd_quadrature(args):
    if args.n < 1:
        raise _UsageError("--n must be >= 1")
    gen_args = argparse.Namespace(**vars(args))
    gen_args.n = 2 * args.n
    values, meta = _generate(gen_args, 2 * args.n)
    config = qkdmod.ModulationConfig(variance=args.variance, count=args.n)
    pairs = qkdmod.quadrature_stream(values, config)
    if args.format == "json":
        text = qkdmod.pairs_to_json(pairs)
    else:
        text = qkdmod.pairs_to_csv(pairs)
    with open(args.out, "w") as fh:
        fh.write(text)
    meta.update({"variance": args.variance, "pairs": args.n,
                 "format": args.format})
    sampleio.write_sidecar(args.out, meta)
    print(f"wrote {args.n} quadrature pairs to {args.out}")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "test": _cmd_test,
    "hist": _cmd_hist,
    "bench": _cmd_bench,
    "quadrature": _cmd_quadrature,
}

_DATA_ERRORS = (
    sampleio.ParseError,
    stats.EmptySampleError,
    stats.InsufficientSampleError,
    stats.NonFiniteSampleError,
    qkdmod.SourceExhaustedError,
    urng.BadPolynomialError,
    urng.ZeroSeedError,
    urng.FactorizationUnavailableError,
    OSError,
)


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_EXIT
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
