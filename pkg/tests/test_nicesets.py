import numpy as np
import pytest

from shortcode import gf2
from shortcode.embedding import Embedding
from shortcode.errors import FormatError
from shortcode.gf2 import GF2Matrix, Prng, Subspace
from shortcode.graphs import GrassmannGraph
from shortcode.nicesets import (
    NiceSetGrassmann,
    NiceSetShortcode,
    enumerate_grassmann_nice_sets,
    enumerate_shortcode_nice_sets,
)

from conftest import span, vec


@pytest.mark.parametrize("l,n", [(1, 2), (2, 2), (1, 3), (2, 3)])
def test_shortcode_members_mask_contains_agree(l, n):
    for T in enumerate_shortcode_nice_sets(l, n, 1):
        members = T.members()
        assert np.array_equal(np.flatnonzero(T.mask()), members)
        assert len(members) == T.size()
        inside = {int(c) for c in members}
        for code in range(1 << (l * n)):
            assert (GF2Matrix.from_int(code, l, n) in T) == (code in inside)


def test_shortcode_enumeration_unique_member_sets():
    seen = set()
    for T in enumerate_shortcode_nice_sets(2, 2, 2):
        key = tuple(T.members().tolist())
        assert key not in seen
        seen.add(key)
        assert T.canonical().is_independent()


def test_incompatible_constraints_are_empty():
    # M q = t with q = 10, t = 1 ; r^T M = s with r = 1, s = 00: needs r.t = s.q
    T = NiceSetShortcode(1, 2, right=((vec("10"), 1),), left=((1, 0),))
    assert T.incompatible_pairs() == [(0, 0)]
    assert T.is_empty and T.size() == 0 and len(T.members()) == 0


def test_shortcode_parse_roundtrip():
    T = NiceSetShortcode.parse("R:10/1,L:1/01", 1, 2)
    assert NiceSetShortcode.parse(str(T), 1, 2) == T
    assert str(NiceSetShortcode.parse("all", 1, 2)) == "all"
    with pytest.raises(FormatError):
        NiceSetShortcode.parse("X:1/1", 1, 2)


def test_shortcode_sample_is_member():
    T = NiceSetShortcode.parse("R:110/01", 2, 3)
    p = Prng(3)
    assert all(T.sample(p) in T for _ in range(50))


@pytest.mark.parametrize("l,n", [(1, 3), (2, 4)])
def test_grassmann_members_mask_size(l, n):
    g = GrassmannGraph(l, n)
    subs = g.tables().subspaces
    for S in enumerate_grassmann_nice_sets(l, n, 2):
        mask = S.mask(g)
        members = S.members()
        assert int(mask.sum()) == len(members) == S.size()
        assert {m.key for m in members} == {subs[i].key for i in np.flatnonzero(mask)}
        assert all((V in S) == bool(mask[i]) for i, V in enumerate(subs))


def test_grassmann_sample_uniform_on_quotient():
    S = NiceSetGrassmann(2, 4, span("1000"), Subspace.full(4))
    p = Prng(4)
    g = GrassmannGraph(2, 4)
    counts = np.bincount([g.index(S.sample(p)) for _ in range(3500)], minlength=35)
    support = np.flatnonzero(counts)
    assert set(support) == set(np.flatnonzero(S.mask(g)))
    expect = 3500 / len(support)
    assert all(abs(c - expect) < 5 * expect ** 0.5 for c in counts[support])


def test_grassmann_parse():
    S = NiceSetGrassmann.parse("Q=1000,Wperp=0001", 2, 4)
    assert S.r1 == 1 and S.r2 == 1 and S.r == 2
    assert NiceSetGrassmann.parse(str(S), 2, 4) == S


def test_map_nice_set_dimension_three():
    # codim-1 zoom-out at (2,3): one right constraint, membership over all 8 matrices
    E = Embedding(2, 3)
    S = NiceSetGrassmann.from_dual(2, 3, Subspace.zero(3), [vec("111")])
    T = E.map_nice_set(S)
    assert len(T.right) == 1 and not T.left
    for code in range(8):
        M = GF2Matrix.from_int(code, 2, 1)
        assert (E.phi_inverse(M) in S) == (M in T)


def test_map_everything_is_unconstrained():
    E = Embedding(2, 4)
    assert str(E.map_nice_set(NiceSetGrassmann.everything(2, 4))) == "all"
