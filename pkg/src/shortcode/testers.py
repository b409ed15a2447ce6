"""The four consistency tests: acceptance predicates and pass-probability estimators."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from . import gf2, kernels, montecarlo
from .errors import ParameterError, PreconditionError
from .gf2 import GF2Matrix, GF2Tensor, GF2Vector, Prng, Subspace
from .graphs import GrassmannGraph, grassmann_adjacent
from .strategies import (
    GrassmannStrategy,
    ShortcodeStrategy,
    Strategy,
    TensorStrategy,
    eval_grassmann,
    eval_shortcode,
    eval_tensor,
)


class TestKind(str, enum.Enum):
    GRASSMANN = "grassmann"
    DEG2 = "deg2"
    UNIQUE_DEG2 = "unique-deg2"
    UNIQUE_DEG3 = "unique-deg3"

    __test__ = False


@dataclass(frozen=True)
class TestReport:
    kind: TestKind
    l: int
    n: int
    m: int | None
    mode: str  # "exact" | "monte_carlo"
    passes: int
    outcomes: int
    probability: Fraction | float
    trials: int | None = None
    seed: int | None = None
    ci3sigma: float | None = None

    __test__ = False

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind.value, "l": self.l, "n": self.n}
        if self.m is not None:
            out["m"] = self.m
        out["mode"] = self.mode
        if self.mode == "exact":
            out["passes"] = self.passes
            out["outcomes"] = self.outcomes
            out["probability"] = str(self.probability)
        else:
            out["trials"] = self.trials
            out["seed"] = self.seed
            out["passes"] = self.passes
            out["probability"] = self.probability
            out["ci3sigma"] = self.ci3sigma
        return out


# --------------------------------------------------------------------------
# acceptance predicates


def accept_grassmann(F: GrassmannStrategy, v1: Subspace, v2: Subspace) -> bool:
    if not grassmann_adjacent(v1, v2):
        raise PreconditionError(f"{v1} and {v2} are not adjacent")
    common = gf2.intersect(v1, v2)
    return all(eval_grassmann(F, v1, h) == eval_grassmann(F, v2, h) for h in common.basis)


def accept_deg2(F: ShortcodeStrategy, m: GF2Matrix, a: GF2Vector, b: GF2Vector) -> bool:
    f1 = eval_shortcode(F, m)
    f2 = eval_shortcode(F, m + GF2Matrix.outer(a, b))
    diff = f1 + f2
    return diff.is_zero() or diff == a


def accept_unique_deg2(F: ShortcodeStrategy, m: GF2Matrix, a: GF2Vector, b: GF2Vector) -> bool:
    return eval_shortcode(F, m) == eval_shortcode(F, m + GF2Matrix.outer(a, b))


def accept_unique_deg3(F: TensorStrategy, t: GF2Tensor, a: GF2Vector, b: GF2Vector, c: GF2Vector) -> bool:
    return eval_tensor(F, t) == eval_tensor(F, t + GF2Tensor.outer(a, b, c))


# --------------------------------------------------------------------------
# exact counting


def grassmann_exact_counts(F: GrassmannStrategy, cap: int | None = None) -> tuple[int, int]:
    """(accepting edges, edges), each undirected edge counted once."""
    g = F.graph
    gf2.check_cap(f"edges of G({g.l},{g.n})", g.num_edges, cap)
    tab = g.tables(cap=1 << 62)
    values = F.table(cap=1 << 62)
    deg = g.degree
    passes = edges = 0
    block = max(1, (1 << 18) // deg)
    for start in range(0, tab.size, block):
        vidx = np.repeat(np.arange(start, min(start + block, tab.size), dtype=np.int64), deg)
        codes = np.tile(np.arange(deg, dtype=np.int64), len(vidx) // deg)
        nbr, ok = kernels.grassmann_walk(tab.keys, tab.bases, tab.pivots, tab.frees, values, g.n, g.l, vidx, codes)
        once = nbr > vidx
        edges += int(once.sum())
        passes += int((ok & once).sum())
    return passes, edges


def shortcode_exact_counts(F: ShortcodeStrategy, cap: int | None = None) -> tuple[int, int, int]:
    """(2-to-2 passes, unique passes, outcomes) over every (M, a, b)."""
    l, n = F.l, F.n
    gf2.check_cap(f"outcomes (M,a,b) of S_{{{l},{n}}}", 1 << (l * n + l + n), cap)
    table = F.table(cap=1 << 62)
    codes = np.arange(1 << (l * n), dtype=np.int64)
    two = uni = 0
    for a in range(1 << l):
        av = np.full(len(codes), a, dtype=np.int64)
        for b in range(1 << n):
            t2, u = kernels.shortcode_accepts(table, codes, av, np.full(len(codes), b, dtype=np.int64), l, n)
            two += int(t2.sum())
            uni += int(u.sum())
    return two, uni, 1 << (l * n + l + n)


def tensor_exact_counts(F: TensorStrategy, cap: int | None = None, nonzero_a: bool = True) -> tuple[int, int]:
    """(passes, outcomes) over every (T, a, b, c).

    ``a`` ranges over nonzero vectors by default (b and c over all vectors);
    with ``nonzero_a=False`` the zero vector is included as well.
    """
    l, m, n = F.l, F.m, F.n
    a_lo = 1 if nonzero_a else 0
    total = ((1 << l) - a_lo) << (l * m * n + m + n)
    gf2.check_cap(f"outcomes (T,a,b,c) of Ten_{{{l},{m},{n}}}", total, cap)
    table = F.table(cap=1 << 62)
    codes = np.arange(1 << (l * m * n), dtype=np.int64)
    size = len(codes)
    passes = 0
    for a in range(a_lo, 1 << l):
        for b in range(1 << m):
            for c in range(1 << n):
                ok = kernels.tensor_accepts(
                    table, codes,
                    np.full(size, a, dtype=np.int64), np.full(size, b, dtype=np.int64),
                    np.full(size, c, dtype=np.int64), l, m, n,
                )
                passes += int(ok.sum())
    return passes, total


# --------------------------------------------------------------------------
# Monte Carlo chunk workers (module level so they pickle)


def _mc_grassmann(payload, prng: Prng, size: int) -> int:
    tab_key, values = payload
    n, l = tab_key
    tab = GrassmannGraph(l, n).tables(cap=1 << 62)
    vidx = prng.integers(0, tab.size, size)
    codes = prng.integers(0, tab.degree, size)
    _, ok = kernels.grassmann_walk(tab.keys, tab.bases, tab.pivots, tab.frees, values, n, l, vidx, codes)
    return int(ok.sum())


def _mc_shortcode(payload, prng: Prng, size: int) -> int:
    table, l, n, unique = payload
    codes = prng.integers(0, 1 << (l * n), size)
    a = prng.integers(0, 1 << l, size)
    b = prng.integers(0, 1 << n, size)
    two, uni = kernels.shortcode_accepts(table, codes, a, b, l, n)
    return int((uni if unique else two).sum())


def _mc_tensor(payload, prng: Prng, size: int) -> int:
    table, l, m, n = payload
    codes = prng.integers(0, 1 << (l * m * n), size)
    a = prng.integers(1, 1 << l, size)
    b = prng.integers(0, 1 << m, size)
    c = prng.integers(0, 1 << n, size)
    return int(kernels.tensor_accepts(table, codes, a, b, c, l, m, n).sum())


def _check_kind(F: Strategy, kind: TestKind) -> None:
    ok = {
        TestKind.GRASSMANN: GrassmannStrategy,
        TestKind.DEG2: ShortcodeStrategy,
        TestKind.UNIQUE_DEG2: ShortcodeStrategy,
        TestKind.UNIQUE_DEG3: TensorStrategy,
    }[kind]
    if not isinstance(F, ok):
        raise ParameterError(f"test {kind.value} needs a {ok.__name__}")


def pass_probability(
    F: Strategy,
    kind: TestKind | str,
    mode: str = "exact",
    trials: int | None = None,
    seed: int = 0,
    jobs: int = 1,
    cap: int | None = None,
) -> TestReport:
    kind = TestKind(kind)
    _check_kind(F, kind)
    m = F.m if isinstance(F, TensorStrategy) else None
    if mode == "exact":
        if kind is TestKind.GRASSMANN:
            passes, total = grassmann_exact_counts(F, cap)
        elif kind is TestKind.UNIQUE_DEG3:
            passes, total = tensor_exact_counts(F, cap)
        else:
            two, uni, total = shortcode_exact_counts(F, cap)
            passes = uni if kind is TestKind.UNIQUE_DEG2 else two
        return TestReport(kind, F.l, F.n, m, "exact", passes, total, Fraction(passes, total))
    if mode != "monte_carlo":
        raise ParameterError(f"unknown mode {mode!r}")
    if not trials:
        raise ParameterError("Monte Carlo mode needs a trial count")
    if kind is TestKind.GRASSMANN:
        F.graph.tables(cap)
        est = montecarlo.run(_mc_grassmann, ((F.n, F.l), F.table(cap)), trials, seed, jobs)
    elif kind is TestKind.UNIQUE_DEG3:
        est = montecarlo.run(_mc_tensor, (F.table(cap), F.l, F.m, F.n), trials, seed, jobs)
    else:
        payload = (F.table(cap), F.l, F.n, kind is TestKind.UNIQUE_DEG2)
        est = montecarlo.run(_mc_shortcode, payload, trials, seed, jobs)
    return TestReport(
        kind, F.l, F.n, m, "monte_carlo", est.passes, trials, est.probability,
        trials=trials, seed=seed, ci3sigma=est.ci3sigma,
    )
