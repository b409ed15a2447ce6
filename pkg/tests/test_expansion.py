from fractions import Fraction

import numpy as np
import pytest

from shortcode import gf2
from shortcode.checks import brute_force_decode_density
from shortcode.embedding import Embedding
from shortcode.errors import DomainError, ResourceError
from shortcode.expansion import (
    affine_labels,
    cayley_eigenvalue,
    character_sum,
    converse_embedding_expansion,
    decode_grassmann,
    decode_shortcode,
    expansion_soundness_bridge,
    grassmann_expansion,
    nice_density,
    nu_from_phi,
    remeasure,
    spectrum_by_rank,
    stay_probability,
    step_distribution,
    step_distribution_from_spectrum,
)
from shortcode.gf2 import GF2Matrix, Prng
from shortcode.graphs import GrassmannGraph, ShortcodeGraph
from shortcode.montecarlo import Estimate, within_3sigma
from shortcode.nicesets import NiceSetGrassmann, NiceSetShortcode, enumerate_shortcode_nice_sets
from shortcode.strategies import GrassmannStrategy, LinearFunctional, ShortcodeStrategy, make_planted

from conftest import span


def _brute_nu(mask, l, n):
    hits = total = 0
    for M in np.flatnonzero(mask):
        for a in range(1 << l):
            for b in range(1 << n):
                step = sum(b << (i * n) for i in range(l) if (a >> i) & 1)
                total += 1
                hits += bool(mask[M ^ step])
    return Fraction(hits, total)


def test_stay_examples():
    g = ShortcodeGraph(1, 2)
    T = NiceSetShortcode.parse("R:10/0", 1, 2)
    rep = stay_probability(T, g)
    assert rep.stay == Fraction(3, 4)
    full = stay_probability(np.ones(4, dtype=bool), g)
    assert full.stay == 1 and full.phi == 0
    with pytest.raises(DomainError):
        stay_probability(np.zeros(4, dtype=bool), g)


@pytest.mark.parametrize("l,n", [(1, 2), (2, 2), (1, 3), (2, 3)])
def test_stay_matches_brute_force_and_floor(l, n):
    g = ShortcodeGraph(l, n)
    p = Prng(1, (l, n))
    for _ in range(6):
        mask = p.integers(0, 2, g.num_vertices).astype(bool)
        if not mask.any():
            continue
        rep = stay_probability(mask, g)
        assert rep.stay == _brute_nu(mask, l, n)
        assert rep.stay == nu_from_phi(l, n, rep.phi)
        assert rep.stay >= Fraction(1, 2) + Fraction(1, 2 ** (n + 1))


def test_grassmann_expansion_examples():
    g = GrassmannGraph(1, 2)
    assert grassmann_expansion(Embedding(1, 2).membership_mask(), g).phi == Fraction(1, 2)
    single = np.array([True, False, False])
    assert grassmann_expansion(single, g).phi == 1
    g4 = GrassmannGraph(2, 4)
    assert grassmann_expansion(np.ones(35, dtype=bool), g4).phi == 0


def test_nice_sets_expand_less_than_random_sets():
    g = GrassmannGraph(2, 4)
    S = NiceSetGrassmann(2, 4, span("1000"), gf2.Subspace.full(4))
    mask = S.mask(g)
    phi_nice = grassmann_expansion(mask, g).phi
    p = Prng(2)
    for _ in range(10):
        rnd = np.zeros(35, dtype=bool)
        rnd[p.generator.permutation(35)[: int(mask.sum())]] = True
        assert phi_nice < grassmann_expansion(rnd, g).phi


def test_expansion_monte_carlo_within_3sigma():
    g = ShortcodeGraph(1, 2)
    T = NiceSetShortcode.parse("R:10/0", 1, 2)
    rep = stay_probability(T, g, "monte_carlo", 100_000, seed=3)
    assert within_3sigma(Estimate(rep.counts["stay_passes"], 100_000, 3), 0.75)
    gg = GrassmannGraph(1, 2)
    rep = grassmann_expansion(Embedding(1, 2).membership_mask(), gg, "monte_carlo", 100_000, seed=3)
    assert within_3sigma(Estimate(rep.counts["leave_passes"], 100_000, 3), 0.5)


def test_nice_density_examples_and_invariance():
    g = ShortcodeGraph(1, 3)
    T = NiceSetShortcode.parse("R:100/1", 1, 3)
    assert nice_density(T.mask(), T) == 1
    assert nice_density(~T.mask(), T) == 0
    same = NiceSetShortcode.parse("R:100/1,R:100/1", 1, 3)
    mask = Prng(4).integers(0, 2, 8).astype(bool)
    assert nice_density(mask, T) == nice_density(mask, same)
    with pytest.raises(DomainError):
        nice_density(mask, NiceSetShortcode(1, 3, right=((1, 1),), left=((1, 0),)))


def test_decode_exact_affine():
    F = ShortcodeStrategy.affine(2, 2, 0b10, 0b01)
    rep = decode_shortcode(F, 1)
    assert rep.r == 0 and rep.density == 1 and (rep.z, rep.u) == (0b10, 0b01)


def test_decode_corrupted():
    labels = affine_labels(1, 3, 0b110, 1)
    labels[5] ^= 1
    F = ShortcodeStrategy.from_table(1, 3, labels)
    rep = decode_shortcode(F, 0)
    assert (rep.r, rep.density, rep.z, rep.u) == (0, Fraction(7, 8), 0b110, 1)
    assert remeasure(rep, F) == rep.density


def test_decode_planted_against_oracle():
    sets = list(enumerate_shortcode_nice_sets(1, 3, 1))
    for k in range(3):
        p = Prng(10, k)
        F = make_planted(p, [sets[p.below(len(sets))], sets[p.below(len(sets))]], 1, 3)
        for r_max in (0, 1):
            rep = decode_shortcode(F, r_max)
            assert rep.density == brute_force_decode_density(F, r_max) == remeasure(rep, F)


def test_decode_planted_large_part():
    # one part covering a 1-nice set of density 1/2: some <= 1-nice set reaches density >= 1/2
    T = NiceSetShortcode.parse("R:010/1", 1, 3)
    F = make_planted(Prng(5), [T], 1, 3)
    assert decode_shortcode(F, 1).density >= Fraction(1, 2)


def test_decode_grassmann():
    F = GrassmannStrategy.from_functional(LinearFunctional(4, 0b1001), 2)
    rep = decode_grassmann(F, 1)
    assert rep.r == 0 and rep.density == 1 and rep.f == 0b1001
    labels = F.table().copy()
    flip = Prng(6).generator.permutation(35)[:17]
    labels[flip] ^= 1
    G = GrassmannStrategy.from_table(2, 4, labels)
    rep = decode_grassmann(G, 0)
    assert rep.density >= Fraction(1, 2) and remeasure(rep, G) == rep.density


def test_decode_grassmann_random_table_oracle():
    F = GrassmannStrategy.from_table(1, 3, Prng(7).integers(0, 2, 7))
    rep = decode_grassmann(F, 1)
    best = Fraction(0)
    g = GrassmannGraph(1, 3)
    from shortcode.nicesets import enumerate_grassmann_nice_sets

    for S in enumerate_grassmann_nice_sets(1, 3, 1):
        members = S.members()
        if not members:
            continue
        for f in range(8):
            hits = sum(F.values(V) == gf2.parity(V.basis[0] & f) for V in members)
            best = max(best, Fraction(hits, len(members)))
    assert rep.density == best == remeasure(rep, F)


def test_decode_cap():
    with pytest.raises(ResourceError):
        decode_shortcode(ShortcodeStrategy.affine(3, 6, 0, 0), 0)


def test_bridge():
    const = ShortcodeStrategy.affine(1, 3, 0, 1)
    rep = expansion_soundness_bridge(const, 0)
    assert [(s.z, s.stay) for s in rep.level_sets] == [(1, 1)]
    F = ShortcodeStrategy.affine(1, 3, 0b011, 0)
    rep = expansion_soundness_bridge(F, 1)
    assert rep.average == rep.pass_probability and rep.averaging_holds
    assert rep.witness_density == rep.level_density
    planted = make_planted(Prng(8), [NiceSetShortcode.parse("R:100/0", 1, 3)], 1, 3)
    rep = expansion_soundness_bridge(planted, 1)
    assert rep.averaging_holds and rep.witness_density == rep.level_density


def test_converse():
    rep = converse_embedding_expansion(np.ones(35, dtype=bool), 2, 4, 10, seed=1)
    assert set(rep.image_sizes) == {16}
    S = NiceSetGrassmann(2, 4, span("1100"), gf2.Subspace.full(4))
    g = GrassmannGraph(2, 4)
    rep = converse_embedding_expansion(S.mask(g), 2, 4, 10, seed=2)
    for k, size in enumerate(rep.image_sizes):
        E = Embedding(2, 4, gf2.sample_basis(Prng(2, k), 4))
        T = E.map_nice_set(S)
        assert size == T.size()
    rep = converse_embedding_expansion(np.ones(35, dtype=bool), 2, 4, 100, seed=3)
    assert rep.mean_fraction >= 0.288


def test_spectrum():
    assert cayley_eigenvalue(GF2Matrix.zero(2, 2)) == 1
    for code in range(16):
        A = GF2Matrix.from_int(code, 2, 2)
        assert character_sum(A) == cayley_eigenvalue(A) == Fraction(1, 2 ** gf2.rank(A))
    assert spectrum_by_rank(2, 2) == [(0, 1), (1, Fraction(1, 2)), (2, Fraction(1, 4))]
    assert step_distribution(2, 2) == step_distribution_from_spectrum(2, 2)
    assert spectrum_by_rank(2, 3)[-1] == (2, Fraction(1, 4))
