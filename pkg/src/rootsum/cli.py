"""Command line interface: ``rootsum <command> [options]``.

Results go to stdout (or --out), progress and diagnostics to stderr.  Exit
codes: 0 success, 1 search failure, 2 enumeration cap exceeded, 3 precision
budget exceeded, 64 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import fcntl
import json
import logging
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .driver import METHODS, exponent_scan, solve_theorem2
from .errors import RootsumError, UsageError
from .evaluation import DEFAULT_BIT_BUDGET, format_dyadic, to_decimal
from .greedy import LadderCache, ladder_json_lines
from .pairs import build_pair, theorem1_instance, theorem1_verify
from .pigeonhole import DEFAULT_ENUM_CAP, brute_min_dist, dirichlet_search
from .ring import make_basis
from .schemas import schema_id
from .series import probe_tables

log = logging.getLogger("rootsum")

CACHE_ENV = "ROOTSUM_CACHE_DIR"
EXIT_USAGE = 64


@dataclass(frozen=True)
class Config:
    enum_cap: int = DEFAULT_ENUM_CAP
    bit_budget: int = DEFAULT_BIT_BUDGET
    cache_dir: Optional[Path] = None
    fmt: str = "json"
    jobs: int = 1
    verbosity: int = 0

    def __post_init__(self):
        if self.enum_cap < 1 or self.bit_budget < 64 or self.jobs < 1:
            raise UsageError("--enum-cap and --jobs must be positive and --bits at least 64")
        if self.fmt not in ("json", "csv"):
            raise UsageError(f"unknown format {self.fmt!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _n_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--enum-cap", type=_positive, default=DEFAULT_ENUM_CAP, help="max enumerated points (default %(default)s)")
    g.add_argument("--bits", type=_positive, default=DEFAULT_BIT_BUDGET, help="precision budget in bits (default %(default)s)")
    g.add_argument("--jobs", type=_positive, default=1, help="worker threads for enumeration")
    g.add_argument("--out", type=Path, help="write the result here instead of stdout")
    g.add_argument("--format", choices=("json", "csv"), help="output format")
    g.add_argument("--cache-dir", type=Path, help=f"ladder cache directory (default ${CACHE_ENV} or ~/.cache/rootsum)")
    g.add_argument("-v", "--verbose", action="count", default=0)

    ap = _Parser(prog="rootsum", description="Sums of square roots with tiny or prescribed fractional parts.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("basis-info", parents=[common], help="primes and products of the basis")
    p.add_argument("--tau", type=_positive, required=True)

    p = sub.add_parser("pigeonhole", parents=[common], help="small fractional part by the Dirichlet search")
    p.add_argument("--tau", type=_positive, required=True)
    p.add_argument("--n", type=_positive, required=True)

    p = sub.add_parser("ladder", parents=[common], help="build or extend the cached ladder")
    p.add_argument("--tau", type=_positive, required=True)
    p.add_argument("--levels", type=_positive, required=True)

    p = sub.add_parser("approx", parents=[common], help="approximate a target mod 1 with k square roots")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--alpha", required=True, help="decimal, p/q, pi, sqrt2 or e")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--method", choices=METHODS, default="auto")

    p = sub.add_parser("scan", parents=[common], help="exponent scan over a list of n")
    p.add_argument("--mode", choices=("t1", "t2"), required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--alpha", default="0")
    p.add_argument("--n-list", type=_n_list, required=True)
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--T", type=_positive, default=1)
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 4))

    for name, helptext in (("theorem1", "explicit instance with fractional part ~ G0/n^k"),
                           ("theorem1-verify", "certified table for an instance")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--k", type=_positive, required=True)
        p.add_argument("--T", type=_positive, default=1)
        p.add_argument("--eps", type=_fraction, default=Fraction(1, 4))
        if name == "theorem1-verify":
            p.add_argument("--n-list", type=_n_list, required=True)

    p = sub.add_parser("min-gap", parents=[common], help="exhaustive minimum of ||w|| over height <= n")
    p.add_argument("--tau", type=_positive, required=True)
    p.add_argument("--n", type=_positive, required=True)

    p = sub.add_parser("series", parents=[common], help="coefficient tables")
    p.add_argument("--probe", action="store_true", required=True)
    return ap


def _cache_dir(arg: Optional[Path]) -> Path:
    if arg is not None:
        return arg
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "rootsum"


class LockedLadderCache(LadderCache):
    """Ladder cache guarded by an advisory lock, so concurrent runs do not race."""

    @contextlib.contextmanager
    def _lock(self):
        self.directory.mkdir(parents=True, exist_ok=True)
        with open(self.directory / ".lock", "w") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def get(self, basis, levels):
        with self._lock():
            return super().get(basis, levels)

    __call__ = get


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _with_schema(name: str, doc: dict) -> dict:
    return {"schema": schema_id(name), **doc}


def _run(args, cfg: Config) -> str:
    cmd = args.command
    cache = LockedLadderCache(cfg.cache_dir, cfg.enum_cap, cfg.jobs, cfg.bit_budget)

    if cmd == "basis-info":
        b = make_basis(args.tau)
        return _dump(_with_schema("basis-info", {"tau": b.tau, "primes": list(b.primes), "products": list(b.products)}))

    if cmd == "pigeonhole":
        wit = dirichlet_search(make_basis(args.tau), args.n, cfg.enum_cap, cfg.jobs, cfg.bit_budget)
        return _dump(_with_schema("pigeonhole", wit.to_json()))

    if cmd == "ladder":
        entries = cache.get(make_basis(args.tau), args.levels)
        log.info("ladder file %s", cache.path(args.tau))
        return ladder_json_lines(entries)

    if cmd == "approx":
        app = solve_theorem2(args.k, args.alpha, args.n, cfg.enum_cap, args.method, cache, cfg.jobs, cfg.bit_budget)
        return _dump(_with_schema("approx", app.to_json()))

    if cmd == "scan":
        res = exponent_scan(args.mode, args.k, args.n_list, args.alpha, cfg.enum_cap, args.method,
                            cache, cfg.jobs, args.T, args.eps)
        log.info("fitted slope %s, max ratio %s", res.slope, to_decimal(res.max_ratio, 8))
        if cfg.fmt == "json":
            rows = [
                {
                    "n": r.n,
                    "err_lo": format_dyadic(r.err_lo),
                    "err_hi": format_dyadic(r.err_hi),
                    "bound": to_decimal(r.bound, 12),
                    "slope_window": None if r.slope_window is None else round(r.slope_window, 6),
                }
                for r in res.rows
            ]
            return _dump(_with_schema("scan", {
                "mode": res.mode,
                "k": res.k,
                "rows": rows,
                "slope": None if res.slope is None else round(res.slope, 6),
                "max_ratio": to_decimal(res.max_ratio, 12),
            }))
        return res.to_csv()

    if cmd == "theorem1":
        pair = build_pair(args.k, args.T, args.eps)
        inst = theorem1_instance(args.k, pair)
        return _dump(_with_schema("theorem1", {**inst.to_json(), "pair": pair.to_json()}))

    if cmd == "theorem1-verify":
        inst = theorem1_instance(args.k, build_pair(args.k, args.T, args.eps))
        res = theorem1_verify(inst, args.n_list)
        log.info("instance a=%s b=%s G0=%s slope=%s", inst.a, inst.b, inst.G0, res.slope)
        lines = ["n,err_lo,err_hi,n^k_times_err"] + [",".join(r.csv_fields()) for r in res.rows]
        return "\n".join(lines) + "\n"

    if cmd == "min-gap":
        w, d = brute_min_dist(make_basis(args.tau), args.n, cfg.enum_cap, cfg.jobs, cfg.bit_budget)
        return _dump(_with_schema("min-gap", {"tau": args.tau, "n": args.n, "w": w.to_json(), "dist": d.to_json()}))

    if cmd == "series":
        return _dump(_with_schema("series-probe", probe_tables()))

    raise UsageError(f"unknown command {cmd!r}")


_DEFAULT_FORMAT = {"scan": "csv", "theorem1-verify": "csv", "ladder": "json"}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = Config(
            enum_cap=args.enum_cap,
            bit_budget=args.bits,
            cache_dir=_cache_dir(args.cache_dir),
            fmt=args.format or _DEFAULT_FORMAT.get(args.command, "json"),
            jobs=args.jobs,
            verbosity=args.verbose,
        )
        text = _run(args, cfg)
    except RootsumError as exc:
        print(f"rootsum: error: {exc}", file=sys.stderr)
        if isinstance(exc, UsageError):
            parser.print_usage(sys.stderr)
        return exc.exit_code
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
