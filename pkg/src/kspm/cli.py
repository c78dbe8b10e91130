"""Command-line front end.

Subcommands wrap the library one-to-one and keep no numerics of their
own: `fixpoint` prints a pile's fixed point, `avalanche` single records
or streamed scans, `verify` the invariant sweeps, and `figure-data` the
plot-ready CSV datasets.  Output is deterministic for identical
invocations (seeds included); `--out` writes through a temp file and
renames, so failures never leave partial files behind.

Exit codes: 0 success, 1 failed checks or internal anomalies, 2 bad
arguments.  The environment variable KSPM_WORK_LIMIT overrides the
firing budget used by every simulation.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import os
import sys
import tempfile
from typing import IO, Iterator

from . import avalanche, dds, verify
from .core import DEFAULT_WORK_LIMIT, Params, fixed_point
from .errors import InvalidParameter, KSPMError

FORMATS = ("text", "json", "csv")
WHICH = ("heights", "shot", "diffs")


def _work_limit() -> int:
    raw = os.environ.get("KSPM_WORK_LIMIT")
    if raw is None:
        return DEFAULT_WORK_LIMIT
    try:
        value = int(raw)
        if value < 1:
            raise ValueError
    except ValueError:
        raise InvalidParameter(f"KSPM_WORK_LIMIT must be a positive integer, got {raw!r}")
    return value


@contextlib.contextmanager
def _open_out(path: str | None) -> Iterator[IO[str]]:
    """Stdout, or an atomically renamed file: no partial output on failure."""
    if path is None:
        yield sys.stdout
        return
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".kspm-", suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="") as stream:
            yield stream
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kspm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    fp = sub.add_parser("fixpoint", help="fixed point, heights, and shot vector of a pile")
    fp.add_argument("--p", type=int, required=True)
    fp.add_argument("--n", type=int, required=True)
    fp.add_argument("--format", choices=FORMATS, default="text")
    fp.add_argument("--out", default=None)

    av = sub.add_parser("avalanche", help="single avalanche records or streamed scans")
    av.add_argument("--p", type=int, required=True)
    group = av.add_mutually_exclusive_group(required=True)
    group.add_argument("--k", type=int, help="report the k-th avalanche only")
    group.add_argument("--upto", type=int, help="stream avalanches for k = 1..UPTO")
    av.add_argument("--format", choices=FORMATS, default="text")
    av.add_argument("--out", default=None)

    ve = sub.add_parser("verify", help="run an invariant suite; exit 0 iff all checks pass")
    ve.add_argument(
        "suite",
        choices=(
            "confluence",
            "plateau",
            "support",
            "spectrum",
            "waves",
            "linkage",
            "density",
            "recurrence",
        ),
    )
    ve.add_argument("--p", type=int, default=None)
    ve.add_argument("--p-max", type=int, default=None)
    ve.add_argument("--n", type=int, default=None)
    ve.add_argument("--n-max", type=int, default=None)
    ve.add_argument("--seed", type=int, default=0)
    ve.add_argument("--out", default=None)

    fd = sub.add_parser("figure-data", help="plot-ready datasets for one fixed point")
    fd.add_argument("--p", type=int, required=True)
    fd.add_argument("--n", type=int, required=True)
    fd.add_argument("--which", choices=WHICH, required=True)
    fd.add_argument("--negate", action="store_true",
                    help="flip difference signs to the a_n - a_{n+1} plotting convention")
    fd.add_argument("--out", default=None)

    return parser


def cmd_fixpoint(args: argparse.Namespace) -> int:
    params = Params(args.p)
    limit = _work_limit()
    pi, sv = dds._pile(args.n, params, limit)
    heights = pi.heights().heights
    with _open_out(args.out) as out:
        if args.format == "text":
            if pi.diffs:
                out.write(pi.to_text() + "\n")
        elif args.format == "json":
            out.write(json.dumps(
                {
                    "p": args.p,
                    "N": args.n,
                    "diffs": list(pi.diffs),
                    "heights": list(heights),
                    "shot_vector": list(sv.counts),
                },
                separators=(",", ":"),
            ) + "\n")
        else:
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(("n", "b_n", "h_n", "a_n"))
            for n in range(pi.width()):
                writer.writerow((n, pi.diffs[n], heights[n], sv.a(n)))
    return 0


def cmd_avalanche(args: argparse.Namespace) -> int:
    params = Params(args.p)
    limit = _work_limit()
    if args.k is not None:
        if args.k < 1:
            raise InvalidParameter(f"--k must be >= 1, got {args.k}")
        previous = fixed_point(args.k - 1, params, limit)
        record, result = avalanche.run_avalanche(previous, args.k, limit)
        with _open_out(args.out) as out:
            if args.format == "text":
                if record.fired:
                    out.write(" ".join(map(str, record.fired)) + "\n")
            elif args.format == "json":
                out.write(record.to_json() + "\n")
            else:
                writer = avalanche.ScanCsvWriter(out)
                writer(args.k, record, result)
        return 0
    if args.upto < 1:
        raise InvalidParameter(f"--upto must be >= 1, got {args.upto}")
    with _open_out(args.out) as out:
        if args.format == "csv":
            sink = avalanche.ScanCsvWriter(out)
        elif args.format == "json":
            def sink(k, record, config):
                out.write(record.to_json() + "\n")
        else:
            def sink(k, record, config):
                out.write(f"{k}: {' '.join(map(str, record.fired))}\n")
        avalanche.incremental_scan(args.upto, params, sink, limit)
    return 0


def _verify_ps(args: argparse.Namespace, lo: int, default_hi: int) -> list[int]:
    if args.p is not None:
        return [args.p]
    hi = args.p_max if args.p_max is not None else default_hi
    return list(range(lo, hi + 1))


def cmd_verify(args: argparse.Namespace) -> int:
    limit = _work_limit()
    results: list[verify.CheckResult] = []
    suite = args.suite
    if suite == "spectrum":
        p_max = args.p_max if args.p_max is not None else 64
        results.append(verify.check_spectrum(p_max))
    elif suite == "waves":
        if args.n is None:
            raise InvalidParameter("verify waves needs --n")
        for p in _verify_ps(args, 2, 4):
            results.append(verify.check_waves(p, args.n, limit))
    elif suite == "confluence":
        n_max = args.n_max if args.n_max is not None else 200
        for p in _verify_ps(args, 1, 5):
            results.append(verify.check_confluence(p, n_max, 10, args.seed, limit))
    elif suite == "plateau":
        n_max = args.n_max if args.n_max is not None else 300
        for p in _verify_ps(args, 2, 6):
            results.append(verify.check_plateau(p, n_max, limit))
    elif suite == "support":
        n_max = args.n_max if args.n_max is not None else 2000
        for p in _verify_ps(args, 2, 6):
            results.append(verify.check_support(p, n_max, limit))
    elif suite == "linkage":
        n_max = args.n_max if args.n_max is not None else 200
        for p in _verify_ps(args, 2, 4):
            results.append(verify.check_linkage(p, range(1, n_max + 1), limit))
    elif suite == "density":
        n_max = args.n_max if args.n_max is not None else 1000
        for p in _verify_ps(args, 2, 5):
            results.append(verify.check_density(p, n_max, limit))
    else:  # recurrence
        n_max = args.n_max if args.n_max is not None else 200
        for p in _verify_ps(args, 2, 4):
            results.append(verify.check_recurrence(p, n_max, limit))
    ok = all(r.passed for r in results)
    with _open_out(args.out) as out:
        for r in results:
            out.write(r.line() + "\n")
            if not r.passed and r.counterexample is not None:
                out.write("counterexample: " + json.dumps(r.counterexample, separators=(",", ":")) + "\n")
    return 0 if ok else 1


def cmd_figure_data(args: argparse.Namespace) -> int:
    params = Params(args.p)
    limit = _work_limit()
    with _open_out(args.out) as out:
        writer = csv.writer(out, lineterminator="\n")
        if args.which == "heights":
            pi = fixed_point(args.n, params, limit)
            heights = pi.heights().heights
            writer.writerow(("n", "height"))
            for n, h in enumerate(heights):
                writer.writerow((n, h))
        elif args.which == "shot":
            pi, sv = dds._pile(args.n, params, limit)
            writer.writerow(("n", "shots"))
            for n in range(pi.width()):
                writer.writerow((n, sv.a(n)))
        else:
            traj = dds.avg_trajectory(args.n, params, limit)
            pi = fixed_point(args.n, params, limit)
            sign = -1 if args.negate else 1
            writer.writerow(
                ("n", *(f"y{j}" for j in range(args.p)), "mean_numerator", "b_n")
            )
            for n, y in enumerate(traj):
                b_n = pi.diffs[n] if n < pi.width() else 0
                writer.writerow(
                    (n, *(sign * v for v in y.entries), sign * y.mean_numerator(), b_n)
                )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "fixpoint":
            return cmd_fixpoint(args)
        if args.command == "avalanche":
            return cmd_avalanche(args)
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_figure_data(args)
    except InvalidParameter as exc:
        print(f"kspm: {exc}", file=sys.stderr)
        return 2
    except KSPMError as exc:
        print(f"kspm: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
