"""Expansion, nice-set density, brute-force decoders and the Cayley spectrum.

Shortcode sets carry two figures.  ``nu`` is the stay probability under the
all-(a, b) step (the zero step and repeated matrices included), while
``phi`` is the edge expansion of the plain random walk, which moves along a
uniform rank-1 matrix.  Since every rank-1 matrix is ab^T for exactly one
pair of nonzero a, b, the two are tied by

    nu = (2^l + 2^n - 1 + (2^l - 1)(2^n - 1)(1 - phi)) / 2^(l+n).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import gf2, kernels, montecarlo
from .embedding import Embedding
from .errors import DomainError, ParameterError
from .gf2 import GF2Matrix, Prng, bits_to_str, parity
from .graphs import GrassmannGraph, ShortcodeGraph
from .nicesets import (
    NiceSetGrassmann,
    NiceSetShortcode,
    enumerate_grassmann_nice_sets,
    enumerate_shortcode_nice_sets,
)
from .strategies import GrassmannStrategy, ShortcodeStrategy, vertex_mask
from .testers import shortcode_exact_counts


def _parity_array(x: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(x.astype(np.uint64)) & 1).astype(np.int64)


def _frac_str(x: Fraction | float | None) -> Any:
    return str(x) if isinstance(x, Fraction) else x


def affine_labels(l: int, n: int, z: int, u: int) -> np.ndarray:
    """Mz + u for every code M of Mat_{l,n}."""
    codes = np.arange(1 << (l * n), dtype=np.int64)
    out = np.full(len(codes), u, dtype=np.int64)
    row_mask = (1 << n) - 1
    for i in range(l):
        out ^= _parity_array((codes >> (i * n)) & row_mask & z) << i
    return out


# --------------------------------------------------------------------------
# expansion


@dataclass(frozen=True)
class ExpansionReport:
    graph: str
    l: int
    n: int
    descriptor: str
    mode: str
    size: int
    stay: Fraction | float  # nu for shortcode sets, 1 - phi for Grassmann sets
    phi: Fraction | float
    counts: dict = field(default_factory=dict)
    trials: int | None = None
    seed: int | None = None
    ci3sigma: float | None = None

    def to_json(self) -> dict[str, Any]:
        out = {
            "graph": self.graph, "l": self.l, "n": self.n, "set": self.descriptor,
            "mode": self.mode, "size": self.size,
            "stay": _frac_str(self.stay), "phi": _frac_str(self.phi),
        }
        if self.counts:
            out["counts"] = dict(self.counts)
        if self.mode != "exact":
            out.update(trials=self.trials, seed=self.seed, ci3sigma=self.ci3sigma)
        return out


def _describe(S) -> str:
    return str(S) if isinstance(S, (NiceSetShortcode, NiceSetGrassmann)) else "mask"


def _mc_shortcode_stay(payload, prng: Prng, size: int) -> int:
    mask, members, l, n = payload
    m = members[prng.integers(0, len(members), size)]
    a = prng.integers(0, 1 << l, size)
    b = prng.integers(0, 1 << n, size)
    step = np.zeros(size, dtype=np.int64)
    for i in range(l):
        step |= ((a >> i) & 1) * b << (i * n)
    return int(mask[m ^ step].sum())


def _mc_shortcode_leave(payload, prng: Prng, size: int) -> int:
    mask, members, l, n = payload
    m = members[prng.integers(0, len(members), size)]
    a = prng.integers(1, 1 << l, size)
    b = prng.integers(1, 1 << n, size)
    step = np.zeros(size, dtype=np.int64)
    for i in range(l):
        step |= ((a >> i) & 1) * b << (i * n)
    return int((~mask[m ^ step]).sum())


def stay_probability(
    S,
    graph: ShortcodeGraph,
    mode: str = "exact",
    trials: int | None = None,
    seed: int = 0,
    jobs: int = 1,
    cap: int | None = None,
) -> ExpansionReport:
    """nu(S) over all (M in S, a, b) together with the walk expansion phi(S)."""
    l, n = graph.l, graph.n
    gf2.check_cap(f"vertices of S_{{{l},{n}}}", graph.num_vertices, cap)
    mask = vertex_mask(S, graph)
    members = np.flatnonzero(mask).astype(np.int64)
    if not len(members):
        raise DomainError("stay probability of an empty set")
    rank_one = np.asarray(graph.rank_one_codes(), dtype=np.int64)
    size = len(members)
    if mode == "exact":
        gf2.check_cap("(M, step) pairs", size * len(rank_one), cap)
        inside = 0
        for R in rank_one:
            inside += int(mask[members ^ R].sum())
        moves = size * len(rank_one)
        phi = Fraction(moves - inside, moves)
        lazy = (1 << l) + (1 << n) - 1
        nu = Fraction(size * lazy + inside, size << (l + n))
        counts = {"members": size, "moves": moves, "moves_inside": inside}
        return ExpansionReport("shortcode", l, n, _describe(S), "exact", size, nu, phi, counts)
    if mode != "monte_carlo" or not trials:
        raise ParameterError("sampled expansion needs mode='monte_carlo' and a trial count")
    payload = (mask, members, l, n)
    est = montecarlo.run(_mc_shortcode_stay, payload, trials, seed, jobs)
    leave = montecarlo.run(_mc_shortcode_leave, payload, trials, seed + 1, jobs)
    return ExpansionReport(
        "shortcode", l, n, _describe(S), "monte_carlo", size, est.probability, leave.probability,
        {"stay_passes": est.passes, "leave_passes": leave.passes}, trials, seed, est.ci3sigma,
    )


def _mc_grassmann_leave(payload, prng: Prng, size: int) -> int:
    mask, members, n, l = payload
    tab = GrassmannGraph(l, n).tables(cap=1 << 62)
    vidx = members[prng.integers(0, len(members), size)]
    codes = prng.integers(0, tab.degree, size)
    zeros = np.zeros(tab.size, dtype=np.int64)
    nbr, _ = kernels.grassmann_walk(tab.keys, tab.bases, tab.pivots, tab.frees, zeros, n, l, vidx, codes)
    return int((~mask[nbr]).sum())


def grassmann_expansion(
    S,
    graph: GrassmannGraph,
    mode: str = "exact",
    trials: int | None = None,
    seed: int = 0,
    jobs: int = 1,
    cap: int | None = None,
) -> ExpansionReport:
    """phi(S) = Pr[V' not in S] for V uniform in S and V' a uniform neighbour."""
    l, n = graph.l, graph.n
    gf2.check_cap(f"vertices of G({l},{n})", graph.num_vertices, cap)
    mask = vertex_mask(S, graph)
    members = np.flatnonzero(mask).astype(np.int64)
    if not len(members):
        raise DomainError("expansion of an empty set")
    tab = graph.tables(cap=1 << 62)
    deg = tab.degree
    if mode == "exact":
        gf2.check_cap("(V, neighbour) pairs", len(members) * deg, cap)
        zeros = np.zeros(tab.size, dtype=np.int64)
        vidx = np.repeat(members, deg)
        codes = np.tile(np.arange(deg, dtype=np.int64), len(members))
        nbr, _ = kernels.grassmann_walk(tab.keys, tab.bases, tab.pivots, tab.frees, zeros, n, l, vidx, codes)
        leave = int((~mask[nbr]).sum())
        total = len(members) * deg
        phi = Fraction(leave, total)
        counts = {"members": len(members), "moves": total, "moves_outside": leave}
        return ExpansionReport("grassmann", l, n, _describe(S), "exact", len(members), 1 - phi, phi, counts)
    if mode != "monte_carlo" or not trials:
        raise ParameterError("sampled expansion needs mode='monte_carlo' and a trial count")
    est = montecarlo.run(_mc_grassmann_leave, (mask, members, n, l), trials, seed, jobs)
    return ExpansionReport(
        "grassmann", l, n, _describe(S), "monte_carlo", len(members), 1 - est.probability,
        est.probability, {"leave_passes": est.passes}, trials, seed, est.ci3sigma,
    )


def nu_from_phi(l: int, n: int, phi: Fraction) -> Fraction:
    lazy = (1 << l) + (1 << n) - 1
    moving = ((1 << l) - 1) * ((1 << n) - 1)
    return Fraction(lazy, 1 << (l + n)) + Fraction(moving, 1 << (l + n)) * (1 - phi)


# --------------------------------------------------------------------------
# nice-set density


def _nice_members(T, graph=None) -> np.ndarray:
    if isinstance(T, NiceSetShortcode):
        return T.members()
    if isinstance(T, NiceSetGrassmann):
        return np.flatnonzero(T.mask(graph or GrassmannGraph(T.l, T.n)))
    raise ParameterError(f"not a nice set: {T!r}")


def nice_density(S, T, graph=None) -> Fraction:
    """|S n T| / |T|, enumerating T."""
    if graph is None:
        graph = ShortcodeGraph(T.l, T.n) if isinstance(T, NiceSetShortcode) else GrassmannGraph(T.l, T.n)
    members = _nice_members(T, graph)
    if not len(members):
        raise DomainError(f"nice set {T} is empty")
    mask = vertex_mask(S, graph)
    return Fraction(int(mask[members].sum()), len(members))


# --------------------------------------------------------------------------
# decoding


@dataclass(frozen=True)
class DecodeReport:
    graph: str
    l: int
    n: int
    r_max: int
    nice_set: NiceSetShortcode | NiceSetGrassmann
    density: Fraction
    agree: int
    support: int
    sets_searched: int
    z: int | None = None
    u: int | None = None
    f: int | None = None

    @property
    def r(self) -> int:
        return self.nice_set.r

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "graph": self.graph, "l": self.l, "n": self.n, "rmax": self.r_max,
            "r": self.r, "nice_set": str(self.nice_set),
        }
        if self.graph == "shortcode":
            out["z"] = bits_to_str(self.z, self.n)
            out["u"] = bits_to_str(self.u, self.l)
        else:
            out["f"] = bits_to_str(self.f, self.n)
        out.update(density=str(self.density), agree=self.agree, support=self.support,
                   sets_searched=self.sets_searched, mode="exhaustive")
        return out


def _best_row(agree: np.ndarray) -> tuple[int, int]:
    """(count, first index) of the largest entry."""
    idx = int(np.argmax(agree))
    return int(agree[idx]), idx


def decode_shortcode(F: ShortcodeStrategy, r_max: int = 0, cap: int | None = None) -> DecodeReport:
    """Maximise Pr_{M in T}[F(M) = Mz + u] over nice sets T (r <= r_max) and (z, u).

    Ties go to the smaller r, then to the set met first in enumeration
    order, then to the least (z, u) with z as the major key.
    """
    l, n = F.l, F.n
    if r_max < 0:
        raise ParameterError("rmax must be >= 0")
    nv = 1 << (l * n)
    gf2.check_cap("decoder work (rules x vertices)", nv << (l + n), cap)
    labels = F.table(cap=1 << 62)
    rules = [(z, u) for z in range(1 << n) for u in range(1 << l)]
    agree = np.empty((len(rules), nv), dtype=bool)
    for z in range(1 << n):
        mz = affine_labels(l, n, z, 0)
        for u in range(1 << l):
            agree[(z << l) | u] = labels == (mz ^ u)
    best = None
    searched = 0
    for T in enumerate_shortcode_nice_sets(l, n, r_max):
        searched += 1
        members = T.members()
        count, idx = _best_row(agree[:, members].sum(axis=1))
        dens = Fraction(count, len(members))
        if best is None or dens > best[0]:
            best = (dens, T, idx, count, len(members))
    dens, T, idx, count, support = best
    z, u = rules[idx]
    return DecodeReport("shortcode", l, n, r_max, T, dens, count, support, searched, z=z, u=u)


def decode_grassmann(F: GrassmannStrategy, r_max: int = 0, cap: int | None = None) -> DecodeReport:
    """Maximise Pr_{Q <= V <= W}[F(V) = f|_V] over nice sets and linear f.

    Only the 2^n linear functionals are searched: F(V) is linear on V, so
    an added constant could never agree with it.
    """
    l, n = F.l, F.n
    graph = F.graph
    if r_max < 0:
        raise ParameterError("rmax must be >= 0")
    gf2.check_cap("decoder work (functionals x vertices)", graph.num_vertices << n, cap)
    tab = graph.tables(cap=1 << 62)
    values = F.table(cap=1 << 62)
    agree = np.empty((1 << n, tab.size), dtype=bool)
    for c in range(1 << n):
        lab = np.zeros(tab.size, dtype=np.int64)
        for i in range(l):
            lab |= _parity_array(tab.bases[:, i] & c) << i
        agree[c] = values == lab
    best = None
    seen = set()
    searched = 0
    for S in enumerate_grassmann_nice_sets(l, n, r_max):
        mask = S.mask(graph)
        if not mask.any():
            continue
        key = mask.tobytes()
        if key in seen:
            continue
        seen.add(key)
        searched += 1
        members = np.flatnonzero(mask)
        count, c = _best_row(agree[:, members].sum(axis=1))
        dens = Fraction(count, len(members))
        if best is None or dens > best[0]:
            best = (dens, S, c, count, len(members))
    dens, S, c, count, support = best
    return DecodeReport("grassmann", l, n, r_max, S, dens, count, support, searched, f=c)


def remeasure(report: DecodeReport, F) -> Fraction:
    """Agreement density of the reported witness, measured from scratch."""
    if report.graph == "shortcode":
        members = report.nice_set.members()
        labels = F.table()[members]
        want = affine_labels(F.l, F.n, report.z, report.u)[members]
        return Fraction(int((labels == want).sum()), len(members))
    hits = total = 0
    for V in report.nice_set.members():
        total += 1
        hits += F.values(V) == sum(parity(r & report.f) << i for i, r in enumerate(V.basis))
    return Fraction(hits, total)


# --------------------------------------------------------------------------
# soundness bridge


@dataclass(frozen=True)
class LevelSet:
    z: int
    size: int
    stay: Fraction


@dataclass(frozen=True)
class BridgeReport:
    l: int
    n: int
    r_max: int
    pass_probability: Fraction
    level_sets: tuple[LevelSet, ...]
    average: Fraction
    best_z: int
    nice_set: NiceSetShortcode
    level_density: Fraction
    witness_z: int
    witness_u: int
    witness_density: Fraction

    @property
    def averaging_holds(self) -> bool:
        return max(s.stay for s in self.level_sets) >= self.pass_probability

    def to_json(self) -> dict[str, Any]:
        return {
            "l": self.l, "n": self.n, "rmax": self.r_max,
            "pass_probability": str(self.pass_probability),
            "level_sets": [
                {"z": bits_to_str(s.z, self.l), "size": s.size, "stay": str(s.stay)} for s in self.level_sets
            ],
            "weighted_average": str(self.average),
            "best_z": bits_to_str(self.best_z, self.l),
            "nice_set": str(self.nice_set),
            "level_density": str(self.level_density),
            "witness": {"z": bits_to_str(self.witness_z, self.n), "u": bits_to_str(self.witness_u, self.l)},
            "witness_density": str(self.witness_density),
        }


def expansion_soundness_bridge(F: ShortcodeStrategy, r_max: int = 1, cap: int | None = None) -> BridgeReport:
    """Level sets S_z, the averaging step, and the affine witness H(M) = Mq + t + z.

    The unique-test pass probability equals the size-weighted mean of the
    level-set stay probabilities, so some S_z stays at least that often.
    The densest nice set T around that S_z yields H, which is constant z
    on T and therefore agrees with F on exactly S_z n T.
    """
    l, n = F.l, F.n
    graph = ShortcodeGraph(l, n)
    gf2.check_cap(f"vertices of S_{{{l},{n}}}", graph.num_vertices, cap)
    labels = F.table(cap=1 << 62)
    total = len(labels)
    levels = []
    for z in range(1 << l):
        mask = labels == z
        if mask.any():
            levels.append(LevelSet(z, int(mask.sum()), stay_probability(mask, graph).stay))
    average = sum((Fraction(s.size, total) * s.stay for s in levels), Fraction(0))
    _, uni, outcomes = shortcode_exact_counts(F, cap=1 << 62)
    p = Fraction(uni, outcomes)
    best = max(levels, key=lambda s: (s.stay, -s.z))
    level_mask = labels == best.z
    top = None
    for T in enumerate_shortcode_nice_sets(l, n, r_max):
        members = T.members()
        dens = Fraction(int(level_mask[members].sum()), len(members))
        if top is None or dens > top[0]:
            top = (dens, T)
    dens, T = top
    q, t = T.right[0] if T.right else (0, 0)
    wz, wu = q, t ^ best.z
    members = T.members()
    wdens = Fraction(int((labels[members] == affine_labels(l, n, wz, wu)[members]).sum()), len(members))
    return BridgeReport(l, n, r_max, p, tuple(levels), average, best.z, T, dens, wz, wu, wdens)


# --------------------------------------------------------------------------
# converse direction: random bases


@dataclass(frozen=True)
class ConverseReport:
    l: int
    n: int
    trials: int
    seed: int
    set_size: int
    image_sizes: tuple[int, ...]
    image_stays: tuple[Fraction | None, ...]

    @property
    def mean_fraction(self) -> float:
        return sum(self.image_sizes) / (len(self.image_sizes) * self.set_size)

    def to_json(self) -> dict[str, Any]:
        stays = [s for s in self.image_stays if s is not None]
        return {
            "l": self.l, "n": self.n, "trials": self.trials, "seed": self.seed,
            "set_size": self.set_size, "image_sizes": list(self.image_sizes),
            "mean_image_fraction": self.mean_fraction,
            "mean_image_stay": float(sum(stays) / len(stays)) if stays else None,
        }


def converse_embedding_expansion(S, l: int, n: int, trials: int, seed: int = 0, cap: int | None = None) -> ConverseReport:
    """Push S through phi_B for random B; record |phi(S n V_l(B))| and its nu."""
    graph = GrassmannGraph(l, n)
    gf2.check_cap(f"vertices of G({l},{n})", graph.num_vertices, cap)
    mask = vertex_mask(S, graph)
    if not mask.any():
        raise DomainError("converse expansion of an empty set")
    subspaces = graph.tables().subspaces
    sgraph = ShortcodeGraph(l, n - l)
    sizes, stays = [], []
    for k in range(trials):
        emb = Embedding(l, n, gf2.sample_basis(Prng(seed, k), n))
        inside = mask & emb.membership_mask()
        image = np.zeros(sgraph.num_vertices, dtype=bool)
        for idx in np.flatnonzero(inside):
            image[emb.phi(subspaces[idx]).encode()] = True
        sizes.append(int(image.sum()))
        stays.append(stay_probability(image, sgraph).stay if image.any() else None)
    return ConverseReport(l, n, trials, seed, int(mask.sum()), tuple(sizes), tuple(stays))


# --------------------------------------------------------------------------
# Cayley spectrum


def cayley_eigenvalue(A: GF2Matrix) -> Fraction:
    """Eigenvalue of the character chi_A: Pr_a[A^T a = 0] = 2^-rank(A)."""
    return Fraction(1, 1 << gf2.rank(A))


def character_sum(A: GF2Matrix) -> Fraction:
    """E_{a,b}[(-1)^{a^T A b}] by brute force."""
    l, n = A.shape
    total = 0
    for a in range(1 << l):
        row = 0
        for i in range(l):
            if (a >> i) & 1:
                row ^= A.rows[i]
        for b in range(1 << n):
            total += -1 if parity(row & b) else 1
    return Fraction(total, 1 << (l + n))


def spectrum_by_rank(l: int, n: int) -> list[tuple[int, Fraction]]:
    return [(k, Fraction(1, 1 << k)) for k in range(min(l, n) + 1)]


def step_distribution(l: int, n: int) -> list[Fraction]:
    """Pr_{a,b}[ab^T = D] for every code D."""
    counts = [0] * (1 << (l * n))
    for a in range(1 << l):
        for b in range(1 << n):
            code = 0
            for i in range(l):
                if (a >> i) & 1:
                    code |= b << (i * n)
            counts[code] += 1
    return [Fraction(c, 1 << (l + n)) for c in counts]


def step_distribution_from_spectrum(l: int, n: int) -> list[Fraction]:
    """Inverse transform: 2^-ln sum_A lambda(A) (-1)^<A, D>."""
    size = 1 << (l * n)
    lam = [cayley_eigenvalue(GF2Matrix.from_int(A, l, n)) for A in range(size)]
    out = []
    for D in range(size):
        acc = sum((-lam[A] if parity(A & D) else lam[A]) for A in range(size))
        out.append(acc / size)
    return out


__all__ = [
    "BridgeReport",
    "ConverseReport",
    "DecodeReport",
    "ExpansionReport",
    "LevelSet",
    "affine_labels",
    "cayley_eigenvalue",
    "character_sum",
    "converse_embedding_expansion",
    "decode_grassmann",
    "decode_shortcode",
    "expansion_soundness_bridge",
    "grassmann_expansion",
    "nice_density",
    "nu_from_phi",
    "remeasure",
    "spectrum_by_rank",
    "stay_probability",
    "step_distribution",
    "step_distribution_from_spectrum",
]
