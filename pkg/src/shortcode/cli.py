"""Command-line harness: ``shortcode <subcommand> [flags]``.

Exit codes: 0 success, 1 a suite check failed, 2 usage, resource or
format problems.  Output depends only on the flags, so repeated runs are
byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import expansion, strategies
from .checks import RunConfig, run_suite
from .embedding import Embedding
from .errors import ShortcodeError
from .gf2 import Prng
from .graphs import GrassmannGraph, ShortcodeGraph
from .nicesets import NiceSetGrassmann, NiceSetShortcode
from .testers import TestKind, pass_probability


class UsageError(ShortcodeError):
    pass


def _common(p: argparse.ArgumentParser, l=2, n=4) -> None:
    p.add_argument("--l", type=int, default=l, help="subspace dimension / matrix rows")
    p.add_argument("--n", type=int, default=n, help="ambient dimension / matrix columns")
    p.add_argument("--m", type=int, default=2, help="middle tensor dimension")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--trials", type=int, default=None, help="Monte Carlo trial count")
    p.add_argument("--exact", action="store_true", help="exhaustive enumeration instead of sampling")
    p.add_argument("--rmax", type=int, default=1, help="largest nice-set order searched")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--cap", type=int, default=None, help="enumeration cap (default 2^24)")
    p.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shortcode", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("suite", help="run every verification check")
    _common(p)
    p.add_argument("--strategy", type=Path, default=None, help="also check this strategy file")
    p.add_argument("--only", action="append", default=None, help="run only this check id (repeatable)")

    p = sub.add_parser("estimate", help="pass probability of a strategy file")
    _common(p)
    p.add_argument("--strategy", type=Path, required=True)
    p.add_argument("--test", choices=[k.value for k in TestKind], default=None)

    p = sub.add_parser("expansion", help="stay probability / expansion of a set")
    _common(p)
    p.add_argument("--graph", choices=("shortcode", "grassmann"), default="shortcode")
    p.add_argument("--set", dest="set_text", default="all",
                   help="nice set (R:q/t,L:r/s or Q=..,Wperp=..), 'all', or 'vlb' for V_l(standard basis)")

    p = sub.add_parser("decode", help="brute-force affine decoding of a strategy file")
    _common(p)
    p.add_argument("--strategy", type=Path, required=True)

    p = sub.add_parser("spectrum", help="Cayley eigenvalue per rank")
    _common(p, l=2, n=2)

    p = sub.add_parser("plant", help="write a planted strategy file")
    _common(p, l=1, n=3)
    p.add_argument("--graph", choices=("shortcode", "grassmann"), default="shortcode")
    p.add_argument("--parts", required=True, help="nice sets separated by '|'")
    return parser


# --------------------------------------------------------------------------
# output


def _jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


def render(payload: Any, fmt: str) -> str:
    payload = _jsonable(payload)
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    rows = payload if isinstance(payload, list) else [payload]
    header: list[str] = []
    for row in rows:
        header += [k for k in row if k not in header]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            json.dumps(row[k], separators=(",", ":")) if isinstance(row.get(k), (dict, list)) else row.get(k, "")
            for k in header
        )
    return buf.getvalue()


def _emit(args, payload: Any, default_fmt: str = "json") -> None:
    text = render(payload, args.format or default_fmt)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)


def _mode(args) -> tuple[str, int | None]:
    if args.exact and args.trials is not None:
        raise UsageError("--exact and --trials are mutually exclusive")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    if args.trials is not None and args.trials <= 0:
        raise UsageError("--trials must be positive")
    return ("monte_carlo", args.trials) if args.trials is not None else ("exact", None)


# --------------------------------------------------------------------------
# subcommands


def cmd_suite(args) -> int:
    _mode(args)
    cfg = RunConfig(
        l=args.l, n=args.n, m=args.m, seed=args.seed,
        trials=args.trials or 100_000, exact=args.exact, r_max=args.rmax,
        jobs=args.jobs, cap=args.cap,
        strategy=strategies.read_strategy(args.strategy) if args.strategy else None,
    )
    results = run_suite(cfg, args.only)
    _emit(args, [r.to_json() for r in results])
    failed = [r.id for r in results if not r.passed]
    for name in failed:
        print(f"check failed: {name}", file=sys.stderr)
    return 1 if failed else 0


_NATURAL = {
    strategies.GrassmannStrategy: TestKind.GRASSMANN,
    strategies.ShortcodeStrategy: TestKind.DEG2,
    strategies.TensorStrategy: TestKind.UNIQUE_DEG3,
}


def cmd_estimate(args) -> int:
    mode, trials = _mode(args)
    F = strategies.read_strategy(args.strategy)
    kind = TestKind(args.test) if args.test else _NATURAL[type(F)]
    report = pass_probability(F, kind, mode, trials, args.seed, args.jobs, args.cap)
    _emit(args, report.to_json())
    return 0


def _parse_set(args):
    text = args.set_text.strip()
    if args.graph == "shortcode":
        graph = ShortcodeGraph(args.l, args.n)
        if text == "vlb":
            raise UsageError("'vlb' names a Grassmann set")
        return NiceSetShortcode.parse(text, args.l, args.n), graph
    graph = GrassmannGraph(args.l, args.n)
    if text == "vlb":
        return Embedding(args.l, args.n).membership_mask(args.cap), graph
    return NiceSetGrassmann.parse(text, args.l, args.n), graph


def cmd_expansion(args) -> int:
    mode, trials = _mode(args)
    S, graph = _parse_set(args)
    fn = expansion.stay_probability if args.graph == "shortcode" else expansion.grassmann_expansion
    report = fn(S, graph, mode, trials, args.seed, args.jobs, args.cap)
    out = report.to_json()
    if isinstance(S, np.ndarray):
        out["set"] = "vlb"
    _emit(args, out)
    return 0


def cmd_decode(args) -> int:
    F = strategies.read_strategy(args.strategy)
    if args.rmax < 0:
        raise UsageError("--rmax must be >= 0")
    if isinstance(F, strategies.ShortcodeStrategy):
        rep = expansion.decode_shortcode(F, args.rmax, args.cap)
    elif isinstance(F, strategies.GrassmannStrategy):
        rep = expansion.decode_grassmann(F, args.rmax, args.cap)
    else:
        raise UsageError("decode handles shortcode and Grassmann strategies only")
    _emit(args, rep.to_json())
    return 0


def cmd_spectrum(args) -> int:
    if args.l <= 0 or args.n <= 0:
        raise UsageError("--l and --n must be positive")
    rows = [{"rank": k, "lambda": lam} for k, lam in expansion.spectrum_by_rank(args.l, args.n)]
    _emit(args, rows, default_fmt="csv")
    return 0


def cmd_plant(args) -> int:
    specs = [s for s in args.parts.split("|") if s.strip()]
    if not specs:
        raise UsageError("--parts needs at least one nice set")
    if args.graph == "shortcode":
        parts = [NiceSetShortcode.parse(s, args.l, args.n) for s in specs]
    else:
        parts = [NiceSetGrassmann.parse(s, args.l, args.n) for s in specs]
    F = strategies.make_planted(Prng(args.seed), parts, args.l, args.n, kind=args.graph)
    text = strategies.dumps(F)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    return 0


COMMANDS = {
    "suite": cmd_suite,
    "estimate": cmd_estimate,
    "expansion": cmd_expansion,
    "decode": cmd_decode,
    "spectrum": cmd_spectrum,
    "plant": cmd_plant,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ShortcodeError, OSError) as exc:
        print(f"shortcode {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
