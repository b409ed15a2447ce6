"""One test per acceptance criterion, at the stated tolerances.

Each test records a PASS/FAIL line that is printed in the terminal summary
under "acceptance criteria".
"""

import json
import math
import subprocess
import sys
from fractions import Fraction

import numpy as np

from shortcode import gf2, montecarlo
from shortcode.checks import brute_force_decode_density, neighbor_fractions, random_shortcode_sets, uniquify_corpus, uniquify_average
from shortcode.embedding import Embedding, projection_fraction
from shortcode.expansion import (
    _mc_grassmann_leave,
    _mc_shortcode_stay,
    affine_labels,
    cayley_eigenvalue,
    character_sum,
    decode_shortcode,
    grassmann_expansion,
    remeasure,
    spectrum_by_rank,
    stay_probability,
)
from shortcode.gf2 import Basis, GF2Matrix, GF2Vector, Prng
from shortcode.graphs import GrassmannGraph, ShortcodeGraph
from shortcode.nicesets import NiceSetShortcode, enumerate_grassmann_nice_sets, enumerate_shortcode_nice_sets
from shortcode.strategies import GrassmannStrategy, LinearFunctional, ShortcodeStrategy, TensorStrategy, make_planted
from shortcode.testers import _mc_grassmann, _mc_shortcode, _mc_tensor, pass_probability

from conftest import record

SEED = 2024


def _functionals(n, count=10):
    p = Prng(SEED, (1, n))
    return [p.bits(n) for _ in range(count)]


def _bases(n, count=5):
    return [Basis.standard(n)] + [gf2.sample_basis(Prng(SEED, (2, n, k)), n) for k in range(count)]


def _row_affine():
    p = Prng(SEED, 3)
    return [ShortcodeStrategy.row_functional(2, LinearFunctional(3, p.bits(3), p.bits(1))) for _ in range(10)]


def _bilinear(y, z):
    return TensorStrategy.bilinear(2, GF2Vector(2, y), GF2Vector(2, z))


def test_criterion_01_grassmann_completeness():
    probs = [
        pass_probability(GrassmannStrategy.from_functional(LinearFunctional(n, f), 2), "grassmann").probability
        for n in (4, 5) for f in _functionals(n)
    ]
    ok = len(probs) == 20 and all(p == Fraction(1) for p in probs)
    assert record(1, "Grassmann completeness", ok, f"{len(probs)} strategies, values {set(map(str, probs))}")


def test_criterion_02_shortcode_completeness():
    probs = [pass_probability(F, "deg2").probability for F in _row_affine()]
    ok = all(p == 1 for p in probs)
    assert record(2, "shortcode completeness", ok, f"10 row-affine strategies on S_(2,3), values {set(map(str, probs))}")


def test_criterion_03_degree3_completeness():
    nz = {pass_probability(_bilinear(y, z), "unique-deg3").probability for y in range(1, 4) for z in range(1, 4)}
    zero = {pass_probability(_bilinear(0, z), "unique-deg3").probability for z in range(4)}
    ok = nz == {Fraction(3, 4)} and zero == {Fraction(1)}
    assert record(3, "degree-3 completeness", ok, f"y,z != 0 -> {set(map(str, nz))}; y = 0 -> {set(map(str, zero))}")


def test_criterion_04_uniquifying():
    corpus = uniquify_corpus(SEED)
    margins = []
    for F in corpus:
        eta, avg = uniquify_average(F)
        margins.append(avg - eta / 2)
    _, worked = uniquify_average(ShortcodeStrategy.row_functional(1, LinearFunctional(2, 0b11, 1)))
    ok = len(corpus) >= 20 and min(margins) >= 0 and worked == Fraction(13, 16)
    assert record(4, "uniquifying", ok, f"{len(corpus)} strategies, min margin {min(margins)}, worked value {worked}")


def test_criterion_05_homomorphism():
    violations = 0
    bijective = True
    count = 0
    for l, n in ((1, 3), (2, 4), (2, 5)):
        for B in _bases(n):
            rep = Embedding(l, n, B).verify_homomorphism()
            violations += len(rep.violations)
            bijective &= rep.injective and rep.image_size == 2 ** (l * (n - l)) == rep.members
            count += 1
    ok = violations == 0 and bijective and count == 18
    assert record(5, "homomorphism", ok, f"{count} embeddings, {violations} violations, bijective {bijective}")


def test_criterion_06_projection():
    exact = projection_fraction(2, 4)
    fracs = [projection_fraction(l, 2 * l * l) for l in range(1, 9)]
    nbr = set()
    for l, n in ((1, 2), (2, 4)):
        for B in _bases(n, 2):
            nbr |= neighbor_fractions(Embedding(l, n, B))
    ok = exact == Fraction(16, 35) and all(f >= Fraction(288, 1000) for f in fracs) and nbr == {Fraction(1, 2)}
    detail = f"(2,4) -> {exact}; min l<=8 -> {float(min(fracs)):.5f}; neighbour fractions {set(map(str, nbr))}"
    assert record(6, "projection probability", ok, detail)


def test_criterion_07_nice_set_correspondence():
    g = GrassmannGraph(2, 4)
    subs = g.tables().subspaces
    mismatches = total = 0
    for B in _bases(4, 2):
        E = Embedding(2, 4, B)
        idx = np.flatnonzero(E.membership_mask())
        codes = np.array([E.phi(subs[i]).encode() for i in idx])
        for S in enumerate_grassmann_nice_sets(2, 4, 2):
            T = E.map_nice_set(S)
            total += 1
            mismatches += T.r != S.r or not np.array_equal(S.mask(g)[idx], T.mask()[codes])
            back = E.pull_nice_set(T)
            mismatches += not np.array_equal(back.mask(g)[idx], S.mask(g)[idx])
        for T in enumerate_shortcode_nice_sets(2, 2, 2):
            S = E.pull_nice_set(T)
            total += 1
            mismatches += S.r != T.r or not np.array_equal(S.mask(g)[idx], T.mask()[codes])
    assert record(7, "nice-set correspondence", mismatches == 0, f"{total} sets, {mismatches} mismatches")


def test_criterion_08_expansion_transfer():
    g, sg = GrassmannGraph(2, 4), ShortcodeGraph(2, 2)
    subs = g.tables().subspaces
    worst = None
    total = 0
    for B in _bases(4, 2):
        E = Embedding(2, 4, B)
        idx = np.flatnonzero(E.membership_mask())
        codes = np.array([E.phi(subs[i]).encode() for i in idx])
        sets = [T.mask() for T in enumerate_shortcode_nice_sets(2, 2, 1)] + random_shortcode_sets(SEED, 2, 2, 20)
        for tm in sets:
            gm = np.zeros(len(subs), dtype=bool)
            gm[idx] = tm[codes]
            walk_stay = 1 - stay_probability(tm, sg).phi
            margin = grassmann_expansion(gm, g).stay - walk_stay / 2
            worst = margin if worst is None else min(worst, margin)
            total += 1
    assert record(8, "expansion transfer (walk stay)", worst >= 0, f"{total} sets, min margin {worst}")


def test_criterion_09_expansion_values():
    nu = stay_probability(NiceSetShortcode.parse("R:10/0", 1, 2), ShortcodeGraph(1, 2)).stay
    g = GrassmannGraph(1, 2)
    phi_b = grassmann_expansion(Embedding(1, 2).membership_mask(), g).phi
    phi_all = grassmann_expansion(np.ones(3, dtype=bool), g).phi
    ok = (nu, phi_b, phi_all) == (Fraction(3, 4), Fraction(1, 2), 0)
    assert record(9, "expansion values", ok, f"nu {nu}, Phi(V_1(B)) {phi_b}, Phi(all) {phi_all}")


def test_criterion_10_decoding():
    p = Prng(SEED, 10)
    z, u = p.bits(3), p.bits(1)
    labels = affine_labels(1, 3, z, u)
    labels[p.below(8)] ^= 1
    F = ShortcodeStrategy.from_table(1, 3, labels)
    rep = decode_shortcode(F, 0)
    first = rep.r == 0 and rep.density == Fraction(7, 8) and (rep.z, rep.u) == (z, u)
    sets = list(enumerate_shortcode_nice_sets(1, 3, 1))
    agree = True
    for k in range(5):
        q = Prng(SEED, (10, k))
        G = make_planted(q, [sets[q.below(len(sets))], sets[q.below(len(sets))]], 1, 3)
        for r_max in (0, 1):
            d = decode_shortcode(G, r_max)
            agree &= d.density == brute_force_decode_density(G, r_max) == remeasure(d, G)
    detail = f"corrupted affine -> r={rep.r}, density {rep.density}; planted oracle agreement {agree}"
    assert record(10, "decoding", first and agree, detail)


def test_criterion_11_spectrum():
    matches = sum(
        character_sum(GF2Matrix.from_int(a, 2, 2)) == cayley_eigenvalue(GF2Matrix.from_int(a, 2, 2))
        == Fraction(1, 2 ** gf2.rank(GF2Matrix.from_int(a, 2, 2)))
        for a in range(16)
    )
    table = spectrum_by_rank(2, 2)
    ok = matches == 16 and table == [(0, 1), (1, Fraction(1, 2)), (2, Fraction(1, 4))]
    assert record(11, "spectrum", ok, f"{matches}/16 characters, table {[(k, str(v)) for k, v in table]}")


def _calibration_instances():
    out = []
    for n in (4, 5):
        for f in _functionals(n):
            F = GrassmannStrategy.from_functional(LinearFunctional(n, f), 2)
            out.append((f"G(2,{n}) f={f}", 1.0, _mc_grassmann, ((n, 2), F.table())))
    for F in _row_affine():
        out.append(("row-affine", 1.0, _mc_shortcode, (F.table(), 2, 3, False)))
    for y in range(4):
        for z in range(1, 4):
            T = _bilinear(y, z)
            out.append((f"bilinear y={y} z={z}", 0.75 if y else 1.0, _mc_tensor, (T.table(), 2, 2, 2)))
    tm = NiceSetShortcode.parse("R:10/0", 1, 2).mask()
    out.append(("nu R:10/0", 0.75, _mc_shortcode_stay, (tm, np.flatnonzero(tm), 1, 2)))
    for name, mask, val in (("Phi V_1(B)", Embedding(1, 2).membership_mask(), 0.5), ("Phi all", np.ones(3, bool), 0.0)):
        out.append((name, val, _mc_grassmann_leave, (mask, np.flatnonzero(mask), 2, 1)))
    return out


def test_criterion_12_estimator_calibration():
    worst = (1.0, "")
    instances = _calibration_instances()
    for name, exact, fn, payload in instances:
        inside = sum(
            montecarlo.within_3sigma(montecarlo.run(fn, payload, 100_000, SEED * 100 + s), exact) for s in range(40)
        )
        worst = min(worst, (inside / 40, name))
    ok = worst[0] >= 0.95
    assert record(12, "estimator calibration", ok, f"{len(instances)} instances x 40 seeds, worst {worst[0]:.3f} ({worst[1]})")


def test_criterion_13_reproducibility(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.json"
        proc = subprocess.run(
            [sys.executable, "-m", "shortcode", "suite", "--seed", "7", "--trials", "20000", "--out", str(path)],
            capture_output=True, text=True,
        )
        outs.append((proc.returncode, path.read_bytes()))
    ok = outs[0] == outs[1] and outs[0][0] == 0 and json.loads(outs[0][1])
    assert record(13, "reproducibility", bool(ok), f"exit codes {[o[0] for o in outs]}, identical bytes {outs[0][1] == outs[1][1]}")
