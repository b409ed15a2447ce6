import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shortcode import gf2
from shortcode.errors import FormatError, ParameterError, ResourceError
from shortcode.gf2 import Basis, GF2Matrix, GF2Tensor, GF2Vector, Prng, Subspace

from conftest import mat, span, vec


def test_literal_orientation():
    v = GF2Vector.parse("110")
    assert v.bits == 0b011 and v[0] == 1 and v[2] == 0
    assert str(v) == "110"
    assert GF2Vector.parse("0x3", 3) == v


@pytest.mark.parametrize("bad", ["12", "", "0xZ"])
def test_bad_literals(bad):
    with pytest.raises(FormatError):
        GF2Vector.parse(bad, 3)


def test_rank_examples():
    assert gf2.rank(GF2Matrix.zero(2, 3)) == 0
    assert gf2.rank(mat("110", "110")) == 1
    assert gf2.rank(mat("110", "011")) == 2


def test_rref_examples():
    r, piv = gf2.rref(GF2Matrix.identity(2))
    assert r == GF2Matrix.identity(2) and piv == (0, 1)
    r, piv = gf2.rref(mat("110", "011"))
    assert [str(x) for x in (r.row(0), r.row(1))] == ["101", "011"] and piv == (0, 1)
    r, piv = gf2.rref(mat("111", "111"))
    assert r.nrows == 1 and str(r.row(0)) == "111" and piv == (0,)


def test_solve_examples():
    assert str(gf2.solve(GF2Matrix.identity(3), GF2Vector.parse("101"))) == "101"
    assert str(gf2.solve(mat("110", "011"), GF2Vector.parse("101"))) == "11"
    assert gf2.solve(mat("110"), GF2Vector.parse("001")) is None


def test_intersect_and_project():
    assert gf2.intersect(span("110", "011"), span("101", "010")) == span("101")
    assert gf2.intersect(span("10"), span("01")).dim == 0
    assert gf2.project(span("110", "011"), [0, 1]).dim == 2
    assert gf2.project(span("011"), [0]).dim == 0


def test_gaussian_binomial():
    assert gf2.gaussian_binomial(2, 1) == 3
    assert gf2.gaussian_binomial(4, 2) == 35
    assert gf2.gaussian_binomial(7, 0) == 1
    for n, l in [(4, 2), (5, 2), (6, 3), (3, 1)]:
        assert len(gf2.enumerate_subspaces(n, l)) == gf2.gaussian_binomial(n, l)


def test_enumeration_cap():
    with pytest.raises(ResourceError):
        gf2.enumerate_subspaces(10, 5, cap=1000)


matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 6).flatmap(
        lambda c: st.integers(0, (1 << (r * c)) - 1).map(lambda code: GF2Matrix.from_int(code, r, c))
    )
)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_rank_transpose_and_rref_idempotent(m):
    assert gf2.rank(m) == gf2.rank(m.transpose())
    r, piv = gf2.rref(m)
    assert gf2.rref(r) == (r, piv)
    assert r.nrows == gf2.rank(m)


@settings(max_examples=150, deadline=None)
@given(matrices, st.integers(0, 1 << 10))
def test_solve_roundtrip(m, x):
    x &= (1 << m.nrows) - 1
    rhs = GF2Vector(m.ncols, gf2._vecmat(x, m.rows))
    sol = gf2.solve(m, rhs)
    assert sol is not None
    assert gf2._vecmat(sol.bits, m.rows) == rhs.bits


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.data())
def test_annihilator_dimension_and_duality(n, data):
    rows = data.draw(st.lists(st.integers(0, (1 << n) - 1), max_size=n))
    V = Subspace.span(n, rows)
    A = V.annihilator()
    assert V.dim + A.dim == n
    assert A.annihilator() == V
    assert all(gf2.parity(a & v) == 0 for a in A.basis for v in V.basis)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.data())
def test_intersection_dimension_formula(n, data):
    a = Subspace.span(n, data.draw(st.lists(st.integers(0, (1 << n) - 1), max_size=n)))
    b = Subspace.span(n, data.draw(st.lists(st.integers(0, (1 << n) - 1), max_size=n)))
    inter = gf2.intersect(a, b)
    assert inter.dim == a.dim + b.dim - (a + b).dim
    assert set(inter.elements()) == set(a.elements()) & set(b.elements())


def test_subspace_canonical_identity():
    assert span("110", "011") == span("101", "011")
    assert span("110", "011").coords(vec("101")) is not None
    assert vec("100") not in span("110", "011")


def test_basis_coordinates_roundtrip():
    B = gf2.sample_basis(Prng(3), 5)
    for x in range(32):
        assert B.from_coords(B.to_coords(x)) == x


def test_matrix_ops():
    M = mat("11", "01")
    assert str(M.apply(GF2Vector.parse("10"))) == "10"
    assert M.matmul(GF2Matrix.identity(2)) == M
    assert (M + M).is_zero()
    with pytest.raises(ParameterError):
        M + GF2Matrix.zero(3, 2)


def test_tensor_outer_and_slices():
    t = GF2Tensor.outer(GF2Vector.parse("11"), GF2Vector.parse("10"), GF2Vector.parse("01"))
    assert t.entry(0, 0, 1) == 1 and t.entry(1, 0, 1) == 1 and t.entry(0, 1, 1) == 0
    assert t.slice(0) == t.slice(1)


def _chi2_ok(counts: Counter, cells: int, draws: int) -> bool:
    expected = draws / cells
    chi2 = sum((counts.get(k, 0) - expected) ** 2 / expected for k in range(cells))
    # generous bound: mean + 6 standard deviations of a chi-square law
    return chi2 < (cells - 1) + 6 * math.sqrt(2 * (cells - 1))


def test_sample_vector_uniform():
    p = Prng(11)
    c = Counter(gf2.sample_vector(p, 3).bits for _ in range(8000))
    assert _chi2_ok(c, 8, 8000)


def test_sample_subspace_uniform():
    p = Prng(12)
    subs = gf2.enumerate_subspaces(2, 1)
    idx = {s: i for i, s in enumerate(subs)}
    c = Counter(idx[gf2.sample_subspace(p, 2, 1)] for _ in range(6000))
    assert _chi2_ok(c, 3, 6000)
    assert gf2.sample_subspace(p, 4, 0).dim == 0
    assert gf2.sample_subspace(p, 4, 4) == Subspace.full(4)


def test_sample_basis_uniform():
    p = Prng(13)
    assert gf2.sample_basis(p, 1).rows == (1,)
    c = Counter(gf2.sample_basis(p, 2).rows for _ in range(6000))
    assert len(c) == 6
    keyed = {k: i for i, k in enumerate(sorted(c))}
    assert _chi2_ok(Counter({keyed[k]: v for k, v in c.items()}), 6, 6000)


def test_prng_reproducible_and_streams_differ():
    a = [Prng(5, 1).bits(30) for _ in range(2)]
    assert a[0] == a[1]
    assert Prng(5, 1).bits(30) != Prng(5, 2).bits(30)
    assert Prng(5).child(3).path == (0, 3)
    with pytest.raises(ParameterError):
        Prng(-1)
