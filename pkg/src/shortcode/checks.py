"""Registry of verification checks run by ``shortcode suite``.

Each check returns a :class:`CheckResult` with printable expected and
observed values.  Checks run at fixed small parameters; the configured
(l, n, m) feed one extra instance check, and the seed drives every random
choice so two runs with equal flags give identical reports.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import gf2, montecarlo
from .embedding import Embedding, projection_fraction
from .expansion import (
    affine_labels,
    character_sum,
    cayley_eigenvalue,
    decode_shortcode,
    grassmann_expansion,
    remeasure,
    spectrum_by_rank,
    stay_probability,
    step_distribution,
    step_distribution_from_spectrum,
)
from .gf2 import Basis, GF2Matrix, GF2Vector, Prng, parity
from .graphs import GrassmannGraph, ShortcodeGraph
from .nicesets import NiceSetShortcode, enumerate_grassmann_nice_sets, enumerate_shortcode_nice_sets
from .strategies import (
    GrassmannStrategy,
    LinearFunctional,
    ShortcodeStrategy,
    Strategy,
    TensorStrategy,
    make_planted,
    uniquify_with,
)
from .testers import TestKind, pass_probability, shortcode_exact_counts


@dataclass
class RunConfig:
    l: int = 2
    n: int = 4
    m: int = 2
    seed: int = 7
    trials: int = 100_000
    exact: bool = False
    r_max: int = 1
    jobs: int = 1
    cap: int | None = None
    strategy: Strategy | None = None
    calibration_seeds: int = 40


@dataclass
class CheckResult:
    id: str
    anchor: str
    expected: str
    observed: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "check": self.id,
            "anchor": self.anchor,
            "expected": self.expected,
            "observed": self.observed,
            "verdict": "pass" if self.passed else "fail",
        }
        if self.details:
            out["details"] = self.details
        return out


@dataclass(frozen=True)
class Check:
    id: str
    anchor: str
    run: Callable[[RunConfig], CheckResult]


REGISTRY: list[Check] = []


def check(id: str, anchor: str):
    def wrap(fn):
        def run(cfg: RunConfig) -> CheckResult:
            expected, observed, ok, details = fn(cfg)
            return CheckResult(id, anchor, expected, observed, bool(ok), details)

        REGISTRY.append(Check(id, anchor, run))
        return fn

    return wrap


def _tag(*parts) -> tuple[int, ...]:
    """Integer stream path; names hash to stable 32-bit tags."""
    return tuple(zlib.crc32(p.encode()) if isinstance(p, str) else p for p in parts)


def _bases(seed: int, n: int, count: int) -> list[Basis]:
    return [Basis.standard(n)] + [gf2.sample_basis(Prng(seed, _tag("basis", n, k)), n) for k in range(count)]


def _functionals(seed: int, n: int, count: int) -> list[int]:
    prng = Prng(seed, _tag("functionals", n))
    return [prng.bits(n) for _ in range(count)]


# --------------------------------------------------------------------------
# completeness


@check("grassmann-completeness", "Grassmann test: F_f accepts every edge")
def _grassmann_completeness(cfg):
    seen = []
    for n in (4, 5):
        for f in _functionals(cfg.seed, n, 10):
            F = GrassmannStrategy.from_functional(LinearFunctional(n, f), 2)
            seen.append(pass_probability(F, TestKind.GRASSMANN, cap=cfg.cap).probability)
    ok = all(p == 1 for p in seen)
    return "1 on G(2,4) and G(2,5), 10 functionals each", f"min {min(seen)}", ok, {"instances": len(seen)}


@check("shortcode-completeness", "degree-2 test: row-affine strategies accept every (M,a,b)")
def _shortcode_completeness(cfg):
    prng = Prng(cfg.seed, _tag("row-affine"))
    seen = []
    for _ in range(10):
        f = LinearFunctional(3, prng.bits(3), prng.bits(1))
        F = ShortcodeStrategy.row_functional(2, f)
        seen.append(pass_probability(F, TestKind.DEG2, cap=cfg.cap).probability)
    return "1 on S_{2,3}", f"min {min(seen)}", all(p == 1 for p in seen), {"instances": len(seen)}


@check("degree3-completeness", "degree-3 unique test: bilinear strategy passes with probability 3/4")
def _degree3(cfg):
    nonzero = [pass_probability(TensorStrategy.bilinear(2, GF2Vector(2, y), GF2Vector(2, z)), TestKind.UNIQUE_DEG3).probability
               for y in range(1, 4) for z in range(1, 4)]
    zero = [pass_probability(TensorStrategy.bilinear(2, GF2Vector(2, 0), GF2Vector(2, z)), TestKind.UNIQUE_DEG3).probability for z in range(4)]
    ok = all(p == Fraction(3, 4) for p in nonzero) and all(p == 1 for p in zero)
    observed = f"y,z!=0: {sorted(set(map(str, nonzero)))}; y=0: {sorted(set(map(str, zero)))}"
    return "3/4 for y,z != 0; 1 for y = 0 on Ten_{2,2,2}", observed, ok, {}


# --------------------------------------------------------------------------
# uniquifying


def uniquify_corpus(seed: int) -> list[ShortcodeStrategy]:
    """Twenty strategies on S_{2,3}: affine, row-affine, planted, random tables."""
    prng = Prng(seed, _tag("corpus"))
    out = []
    for _ in range(5):
        out.append(ShortcodeStrategy.affine(2, 3, prng.bits(3), prng.bits(2)))
    for _ in range(5):
        out.append(ShortcodeStrategy.row_functional(2, LinearFunctional(3, prng.bits(3), prng.bits(1))))
    sets = list(enumerate_shortcode_nice_sets(2, 3, 1))
    for k in range(5):
        a, b = (sets[prng.below(len(sets))] for _ in range(2))
        out.append(make_planted(Prng(seed, _tag("corpus-planted", k)), [a, b], 2, 3))
    for _ in range(5):
        out.append(ShortcodeStrategy.from_table(2, 3, prng.integers(0, 4, 64)))
    return out


def uniquify_average(F: ShortcodeStrategy) -> tuple[Fraction, Fraction]:
    """(degree-2 pass probability of F, mean over h of the unique pass probability of F + Mh)."""
    two, _, total = shortcode_exact_counts(F)
    acc = 0
    for h in range(1 << F.n):
        acc += shortcode_exact_counts(uniquify_with(F, h))[1]
    return Fraction(two, total), Fraction(acc, total << F.n)


@check("uniquify", "uniquifying: E_h[unique pass of F + Mh] >= deg-2 pass / 2")
def _uniquify(cfg):
    worst = None
    for F in uniquify_corpus(cfg.seed):
        eta, avg = uniquify_average(F)
        margin = avg - eta / 2
        worst = margin if worst is None else min(worst, margin)
    f = ShortcodeStrategy.row_functional(1, LinearFunctional(2, 0b11, 1))
    _, worked = uniquify_average(f)
    ok = worst >= 0 and worked == Fraction(13, 16)
    return (
        "margin >= 0 on 20 strategies; 13/16 for x1+x2+1 on S_{1,2}",
        f"min margin {worst}; worked value {worked}",
        ok,
        {},
    )


# --------------------------------------------------------------------------
# embedding


@check("homomorphism", "embedding: V ~ V' iff phi(V) ~ phi(V')")
def _homomorphism(cfg):
    rows = []
    ok = True
    for l, n in ((1, 3), (2, 4), (2, 5)):
        for B in _bases(cfg.seed, n, 5):
            rep = Embedding(l, n, B).verify_homomorphism(cfg.cap)
            ok &= rep.ok
            rows.append(len(rep.violations))
    return "0 violations, bijective, 18 embeddings", f"{sum(rows)} violations", ok, {"embeddings": len(rows)}


def neighbor_fractions(emb: Embedding) -> set[Fraction]:
    """Per-member fraction of G(l,n)-neighbours that stay inside V_l(B)."""
    from . import kernels

    g = GrassmannGraph(emb.l, emb.n)
    tab = g.tables()
    inside = emb.membership_mask()
    members = np.flatnonzero(inside)
    deg = tab.degree
    vidx = np.repeat(members, deg).astype(np.int64)
    codes = np.tile(np.arange(deg, dtype=np.int64), len(members))
    nbr, _ = kernels.grassmann_walk(
        tab.keys, tab.bases, tab.pivots, tab.frees, np.zeros(tab.size, dtype=np.int64), emb.n, emb.l, vidx, codes
    )
    hits = inside[nbr].reshape(len(members), deg).sum(axis=1)
    return {Fraction(int(h), deg) for h in hits}


@check("projection", "projection: |V_l(B)|/|V_l| >= 0.288; half the neighbours stay inside")
def _projection(cfg):
    exact = projection_fraction(2, 4)
    fracs = [projection_fraction(l, 2 * l * l) for l in range(1, 9)]
    nbr = set()
    for l, n in ((1, 2), (2, 4)):
        for B in _bases(cfg.seed, n, 2):
            nbr |= neighbor_fractions(Embedding(l, n, B))
    ok = exact == Fraction(16, 35) and min(fracs) >= Fraction(288, 1000) and nbr == {Fraction(1, 2)}
    observed = f"(2,4): {exact}; min over l<=8: {float(min(fracs)):.6f}; neighbour fractions {sorted(map(str, nbr))}"
    return "16/35; >= 0.288; exactly 1/2", observed, ok, {}


@check("nice-sets", "embedding maps r-nice sets to r-nice sets")
def _nice_sets(cfg):
    bad = checked = 0
    for B in _bases(cfg.seed, 4, 1):
        emb = Embedding(2, 4, B)
        g = GrassmannGraph(2, 4)
        subs = g.tables().subspaces
        inside = emb.membership_mask()
        idx = np.flatnonzero(inside)
        codes = np.array([emb.phi(subs[i]).encode() for i in idx], dtype=np.int64)
        for S in enumerate_grassmann_nice_sets(2, 4, 2):
            T = emb.map_nice_set(S)
            checked += 1
            bad += T.r != S.r or not np.array_equal(S.mask(g)[idx], T.mask()[codes])
        for T in enumerate_shortcode_nice_sets(2, 2, 2):
            S = emb.pull_nice_set(T)
            checked += 1
            bad += S.r != T.r or not np.array_equal(S.mask(g)[idx], T.mask()[codes])
    return "all memberships agree for r <= 2 at (2,4)", f"{bad} mismatches in {checked} sets", bad == 0, {}


def random_shortcode_sets(seed: int, l: int, n: int, count: int) -> list[np.ndarray]:
    prng = Prng(seed, _tag("random-sets", l, n))
    out = []
    while len(out) < count:
        mask = prng.integers(0, 2, 1 << (l * n)).astype(bool)
        if mask.any():
            out.append(mask)
    return out


@check("expansion-transfer", "phi^-1(T) stays with probability >= (1 - Phi(T)) / 2")
def _expansion_transfer(cfg):
    emb = Embedding(2, 4, _bases(cfg.seed, 4, 1)[1])
    g, sg = GrassmannGraph(2, 4), ShortcodeGraph(2, 2)
    subs = g.tables().subspaces
    inside = emb.membership_mask()
    idx = np.flatnonzero(inside)
    codes = np.array([emb.phi(subs[i]).encode() for i in idx], dtype=np.int64)
    sets = [T.mask() for T in enumerate_shortcode_nice_sets(2, 2, 1)]
    sets += random_shortcode_sets(cfg.seed, 2, 2, 20)
    worst = None
    nu_violations = 0
    for tm in sets:
        gm = np.zeros(len(subs), dtype=bool)
        gm[idx] = tm[codes]
        walk = stay_probability(tm, sg)
        gstay = grassmann_expansion(gm, g).stay
        margin = gstay - (1 - walk.phi) / 2
        nu_violations += gstay < walk.stay / 2
        worst = margin if worst is None else min(worst, margin)
    return (
        "margin >= 0 on every 1-nice and 20 random sets",
        f"min margin {worst}; all-(a,b) convention would fail on {nu_violations}",
        worst >= 0,
        {"sets": len(sets)},
    )


@check("expansion-values", "expansion: nu(1 right constraint) = 3/4; Phi(V_1(B)) = 1/2; Phi(all) = 0")
def _expansion_values(cfg):
    nu = stay_probability(NiceSetShortcode.parse("R:10/0", 1, 2), ShortcodeGraph(1, 2)).stay
    g = GrassmannGraph(1, 2)
    phi_b = grassmann_expansion(Embedding(1, 2).membership_mask(), g).phi
    phi_all = grassmann_expansion(np.ones(g.num_vertices, dtype=bool), g).phi
    ok = nu == Fraction(3, 4) and phi_b == Fraction(1, 2) and phi_all == 0
    return "3/4, 1/2, 0", f"{nu}, {phi_b}, {phi_all}", ok, {}


# --------------------------------------------------------------------------
# decoding


def brute_force_decode_density(F: ShortcodeStrategy, r_max: int) -> Fraction:
    """Best agreement over raw constraint lists and affine rules, one matrix at a time."""
    l, n = F.l, F.n
    raw = [("R", q, t) for q in range(1, 1 << n) for t in range(1 << l)]
    raw += [("L", r, s) for r in range(1, 1 << l) for s in range(1 << n)]
    mats = [GF2Matrix.from_int(c, l, n) for c in range(1 << (l * n))]
    labels = [F.label(c) for c in range(1 << (l * n))]

    def holds(M, con):
        side, x, y = con
        if side == "R":
            return M.apply(GF2Vector(n, x)).bits == y
        return M.left_apply(GF2Vector(l, x)).bits == y

    best = Fraction(0)
    for r in range(r_max + 1):
        for cons in _combinations(raw, r):
            members = [c for c, M in enumerate(mats) if all(holds(M, k) for k in cons)]
            if not members:
                continue
            for z in range(1 << n):
                for u in range(1 << l):
                    hits = sum(
                        labels[c] == (sum(parity(mats[c].rows[i] & z) << i for i in range(l)) ^ u) for c in members
                    )
                    best = max(best, Fraction(hits, len(members)))
    return best


def _combinations(items, r):
    import itertools

    return itertools.combinations(items, r)


@check("decode", "decoder recovers F(M) = Mz + u")
def _decode(cfg):
    prng = Prng(cfg.seed, _tag("decode"))
    z, u = prng.bits(3), prng.bits(1)
    labels = affine_labels(1, 3, z, u)
    bad = prng.below(8)
    labels[bad] ^= 1
    F = ShortcodeStrategy.from_table(1, 3, labels)
    rep = decode_shortcode(F, 0)
    ok = rep.r == 0 and rep.density == Fraction(7, 8) and (rep.z, rep.u) == (z, u) and remeasure(rep, F) == rep.density
    sets = list(enumerate_shortcode_nice_sets(1, 3, 1))
    planted_ok = True
    for k in range(4):
        p = Prng(cfg.seed, _tag("decode-planted", k))
        parts = [sets[p.below(len(sets))], sets[p.below(len(sets))]]
        G = make_planted(p, parts, 1, 3)
        for r_max in (0, 1):
            rep2 = decode_shortcode(G, r_max)
            planted_ok &= rep2.density == brute_force_decode_density(G, r_max) == remeasure(rep2, G)
    observed = f"r={rep.r}, density {rep.density}, rule recovered {(rep.z, rep.u) == (z, u)}; planted oracle agreement {planted_ok}"
    return "r=0, density 7/8; planted densities equal the oracle", observed, ok and planted_ok, {}


# --------------------------------------------------------------------------
# spectrum


@check("spectrum", "Cayley graph of rank-1 steps: eigenvalue 2^-rank(A)")
def _spectrum(cfg):
    mism = sum(
        character_sum(GF2Matrix.from_int(A, 2, 2)) != cayley_eigenvalue(GF2Matrix.from_int(A, 2, 2)) for A in range(16)
    )
    table = spectrum_by_rank(2, 2)
    inverse = step_distribution(2, 2) == step_distribution_from_spectrum(2, 2)
    ok = mism == 0 and table == [(0, 1), (1, Fraction(1, 2)), (2, Fraction(1, 4))] and inverse
    return "16/16 characters match; {0:1, 1:1/2, 2:1/4}", f"{16 - mism}/16 match; inverse transform {inverse}", ok, {}


# --------------------------------------------------------------------------
# estimator calibration and reproducibility


def calibration_instances(seed: int) -> list[tuple[str, float, Callable[[int, int], montecarlo.Estimate]]]:
    """(name, exact value, estimator(trials, seed)) for the exactly known instances."""
    from .testers import _mc_grassmann, _mc_shortcode, _mc_tensor

    out = []
    for n in (4, 5):
        F = GrassmannStrategy.from_functional(LinearFunctional(n, _functionals(seed, n, 1)[0]), 2)
        payload = ((n, 2), F.table())
        out.append((f"grassmann G(2,{n})", 1.0, lambda t, s, p=payload: montecarlo.run(_mc_grassmann, p, t, s)))
    F = ShortcodeStrategy.row_functional(2, LinearFunctional(3, 0b101, 1))
    payload = (F.table(), 2, 3, False)
    out.append(("deg2 S_{2,3}", 1.0, lambda t, s, p=payload: montecarlo.run(_mc_shortcode, p, t, s)))
    for y, val in ((0b11, 0.75), (0, 1.0)):
        T = TensorStrategy.bilinear(2, GF2Vector(2, y), GF2Vector(2, 0b01))
        payload = (T.table(), 2, 2, 2)
        out.append((f"deg3 y={y}", val, lambda t, s, p=payload: montecarlo.run(_mc_tensor, p, t, s)))
    from .expansion import _mc_grassmann_leave, _mc_shortcode_stay

    tm = NiceSetShortcode.parse("R:10/0", 1, 2).mask()
    payload = (tm, np.flatnonzero(tm).astype(np.int64), 1, 2)
    out.append(("nu R:10/0", 0.75, lambda t, s, p=payload: montecarlo.run(_mc_shortcode_stay, p, t, s)))
    for name, mask, val in (
        ("Phi V_1(B)", Embedding(1, 2).membership_mask(), 0.5),
        ("Phi all", np.ones(3, dtype=bool), 0.0),
    ):
        payload = (mask, np.flatnonzero(mask).astype(np.int64), 2, 1)
        out.append((name, val, lambda t, s, p=payload: montecarlo.run(_mc_grassmann_leave, p, t, s)))
    return out


@check("calibration", "Monte Carlo estimates fall within 3 sigma of exact values")
def _calibration(cfg):
    rates = {}
    ok = True
    for name, exact, est in calibration_instances(cfg.seed):
        inside = sum(
            montecarlo.within_3sigma(est(cfg.trials, cfg.seed * 1000 + k), exact)
            for k in range(cfg.calibration_seeds)
        )
        rates[name] = f"{inside}/{cfg.calibration_seeds}"
        ok &= inside >= math.ceil(0.95 * cfg.calibration_seeds)
    observed = ", ".join(f"{k}: {v}" for k, v in rates.items())
    return f">= 95% of {cfg.calibration_seeds} seeds at {cfg.trials} trials", observed, ok, {}


@check("reproducibility", "seeded estimates are identical across runs and job counts")
def _reproducibility(cfg):
    F = TensorStrategy.bilinear(2, GF2Vector(2, 0b11), GF2Vector(2, 0b10))
    trials = 3 * montecarlo.CHUNK + 17
    a = pass_probability(F, TestKind.UNIQUE_DEG3, "monte_carlo", trials, cfg.seed, jobs=1).to_json()
    b = pass_probability(F, TestKind.UNIQUE_DEG3, "monte_carlo", trials, cfg.seed, jobs=1).to_json()
    c = pass_probability(F, TestKind.UNIQUE_DEG3, "monte_carlo", trials, cfg.seed, jobs=2).to_json()
    ok = a == b == c
    return "identical reports for jobs=1 (twice) and jobs=2", f"identical: {ok}", ok, {}


# --------------------------------------------------------------------------
# configured instance and optional input strategy


@check("configured-instance", "completeness at the configured (l, n, m)")
def _configured(cfg):
    l, n, m = cfg.l, cfg.n, cfg.m
    if not 0 < l < n:
        from .errors import ParameterError

        raise ParameterError(f"need 0 < l < n, got l={l}, n={n}")
    mode = "exact" if cfg.exact else "monte_carlo"
    trials = None if cfg.exact else cfg.trials
    f = _functionals(cfg.seed, n, 1)[0]
    results = {}
    results["grassmann"] = pass_probability(
        GrassmannStrategy.from_functional(LinearFunctional(n, f), l), TestKind.GRASSMANN, mode, trials,
        cfg.seed, cfg.jobs, cfg.cap,
    )
    results["deg2"] = pass_probability(
        ShortcodeStrategy.affine(l, n - l, f >> l, f & ((1 << l) - 1)), TestKind.DEG2, mode, trials,
        cfg.seed, cfg.jobs, cfg.cap,
    )
    results["unique-deg3"] = pass_probability(
        TensorStrategy.bilinear(l, GF2Vector(m, 0), GF2Vector(m, 1)), TestKind.UNIQUE_DEG3, mode, trials,
        cfg.seed, cfg.jobs, cfg.cap,
    )
    observed = {k: str(v.probability) for k, v in results.items() if v is not None}
    ok = all(v.probability == 1 for v in results.values() if v is not None)
    return "probability 1 for each completeness instance", ", ".join(f"{k}={v}" for k, v in observed.items()), ok, {
        "mode": mode, "l": l, "n": n, "m": m,
    }


def input_strategy_check(F: Strategy, cfg: RunConfig) -> CheckResult:
    """Completeness of a user-supplied strategy under its natural test."""
    if isinstance(F, GrassmannStrategy):
        kind, want = TestKind.GRASSMANN, Fraction(1)
    elif isinstance(F, ShortcodeStrategy):
        kind, want = TestKind.DEG2, Fraction(1)
    else:
        kind, want = TestKind.UNIQUE_DEG3, Fraction(3, 4)
    p = pass_probability(F, kind, cap=cfg.cap).probability
    return CheckResult(
        "input-strategy",
        f"supplied strategy passes the {kind.value} test",
        f">= {want}",
        str(p),
        p >= want,
        {"kind": kind.value},
    )


def run_suite(cfg: RunConfig, only: list[str] | None = None) -> list[CheckResult]:
    out = []
    for c in REGISTRY:
        if only and c.id not in only:
            continue
        out.append(c.run(cfg))
    if cfg.strategy is not None:
        out.append(input_strategy_check(cfg.strategy, cfg))
    return out
