"""The Grassmann graph G(l, n), the shortcode graph S_{l,n} and the tensor graph.

Vertex integer encodings: matrices and tensors use their packed code;
subspaces use their rank in ascending-key order (see ``gf2.enumerate_subspaces``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Union

import numpy as np

from . import gf2
from .errors import ParameterError
from .gf2 import GF2Matrix, GF2Tensor, GF2Vector, Prng, Subspace


@dataclass(frozen=True)
class GrassmannGraph:
    l: int
    n: int

    def __post_init__(self):
        if not 0 < self.l < self.n:
            raise ParameterError(f"G(l,n) needs 0 < l < n, got l={self.l}, n={self.n}")

    @property
    def num_vertices(self) -> int:
        return gf2.gaussian_binomial(self.n, self.l)

    @property
    def degree(self) -> int:
        return 2 * ((1 << self.l) - 1) * ((1 << (self.n - self.l)) - 1)

    @property
    def num_edges(self) -> int:
        return self.num_vertices * self.degree // 2

    def index(self, v: Subspace) -> int:
        self._check(v)
        return _grassmann_tables(self.n, self.l).index[v.key]

    def vertex(self, idx: int) -> Subspace:
        return Subspace(self.n, tuple(int(r) for r in _grassmann_tables(self.n, self.l).bases[idx]))

    def tables(self, cap: int | None = None) -> GrassmannTables:
        gf2.check_cap(f"vertices of G({self.l},{self.n})", self.num_vertices, cap)
        return _grassmann_tables(self.n, self.l)

    def _check(self, v: Subspace) -> None:
        if v.ambient != self.n or v.dim != self.l:
            raise ParameterError(f"{v} is not a vertex of G({self.l},{self.n})")

    def neighbor(self, v: Subspace, code: int) -> Subspace:
        """The neighbor of ``v`` selected by ``code`` in ``[0, degree)``.

        The code picks a nonzero functional c on V (coordinates in the RREF
        basis), a nonzero x on V's free columns and a bit s; the neighbor is
        ``ker(c) + <x + s b_p>`` with p the lowest set bit of c.
        """
        self._check(v)
        code = int(code)
        l, n = self.l, self.n
        nfree = (1 << (n - l)) - 1
        s = code & 1
        x = (code >> 1) % nfree + 1
        c = (code >> 1) // nfree + 1
        p = (c & -c).bit_length() - 1
        b = v.basis
        pivots = set(v.pivots)
        free = [col for col in range(n) if col not in pivots]
        w = 0
        for k, col in enumerate(free):
            if (x >> k) & 1:
                w |= 1 << col
        if s:
            w ^= b[p]
        hyper = [b[i] ^ (b[p] if (c >> i) & 1 else 0) for i in range(l) if i != p]
        return Subspace.span(n, hyper + [w])

    def neighbors(self, v: Subspace) -> list[Subspace]:
        return [self.neighbor(v, code) for code in range(self.degree)]


@dataclass(frozen=True)
class ShortcodeGraph:
    l: int
    n: int

    def __post_init__(self):
        if self.l <= 0 or self.n <= 0:
            raise ParameterError("S_{l,n} needs positive l and n")

    @property
    def num_vertices(self) -> int:
        return 1 << (self.l * self.n)

    @property
    def degree(self) -> int:
        return ((1 << self.l) - 1) * ((1 << self.n) - 1)

    def rank_one_codes(self) -> list[int]:
        return [
            GF2Matrix.outer(GF2Vector(self.l, a), GF2Vector(self.n, b)).encode()
            for a in range(1, 1 << self.l)
            for b in range(1, 1 << self.n)
        ]


@dataclass(frozen=True)
class TensorGraph:
    l: int
    m: int
    n: int

    def __post_init__(self):
        if min(self.l, self.m, self.n) <= 0:
            raise ParameterError("tensor graph needs positive dimensions")

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.l, self.m, self.n)

    @property
    def num_vertices(self) -> int:
        return 1 << (self.l * self.m * self.n)

    def rank_one_codes(self) -> list[int]:
        return [
            GF2Tensor.outer(GF2Vector(self.l, a), GF2Vector(self.m, b), GF2Vector(self.n, c)).bits
            for a in range(1, 1 << self.l)
            for b in range(1, 1 << self.m)
            for c in range(1, 1 << self.n)
        ]


Graph = Union[GrassmannGraph, ShortcodeGraph, TensorGraph]


class GrassmannTables:
    """Array view of G(l, n) used by the kernels."""

    def __init__(self, n: int, l: int):
        subspaces = gf2.enumerate_subspaces(n, l, cap=1 << 62)
        self.n, self.l = n, l
        self.size = len(subspaces)
        self.bases = np.array([s.basis for s in subspaces], dtype=np.int64).reshape(self.size, l)
        self.pivots = np.array([s.pivots for s in subspaces], dtype=np.int64).reshape(self.size, l)
        frees = []
        for s in subspaces:
            piv = set(s.pivots)
            frees.append([c for c in range(n) if c not in piv])
        self.frees = np.array(frees, dtype=np.int64).reshape(self.size, n - l)
        self.keys = np.array([s.key for s in subspaces], dtype=np.int64)
        self.index = {int(k): i for i, k in enumerate(self.keys)}
        self.subspaces = subspaces

    @cached_property
    def degree(self) -> int:
        return 2 * ((1 << self.l) - 1) * ((1 << (self.n - self.l)) - 1)


@lru_cache(maxsize=16)
def _grassmann_tables(n: int, l: int) -> GrassmannTables:
    if l * n > 62:
        raise ParameterError("packed subspace keys need l*n <= 62")
    return GrassmannTables(n, l)


# --------------------------------------------------------------------------
# adjacency


def grassmann_adjacent(v1: Subspace, v2: Subspace) -> bool:
    if v1.ambient != v2.ambient or v1.dim != v2.dim:
        raise ParameterError("subspaces are not vertices of the same Grassmann graph")
    return gf2.intersect(v1, v2).dim == v1.dim - 1


def shortcode_adjacent(m1: GF2Matrix, m2: GF2Matrix) -> bool:
    if m1.shape != m2.shape:
        raise ParameterError(f"shape mismatch {m1.shape} vs {m2.shape}")
    return gf2.rank(m1 + m2) == 1


def is_rank_one_tensor(t: GF2Tensor) -> bool:
    """True iff t = a (x) b (x) c with a, b, c nonzero.

    Over GF(2) this holds exactly when every nonzero mode-1 slice is the
    same matrix and that matrix has rank 1.
    """
    l = t.dims[0]
    slices = [t.slice(i) for i in range(l)]
    nonzero = {s for s in slices if not s.is_zero()}
    if len(nonzero) != 1:
        return False
    return gf2.rank(nonzero.pop()) == 1


def tensor_adjacent(t1: GF2Tensor, t2: GF2Tensor) -> bool:
    if t1.dims != t2.dims:
        raise ParameterError(f"dims mismatch {t1.dims} vs {t2.dims}")
    return is_rank_one_tensor(t1 + t2)


# --------------------------------------------------------------------------
# samplers


def grassmann_neighbor(prng: Prng, v: Subspace) -> Subspace:
    """Uniform neighbor of v in G(dim v, ambient)."""
    g = GrassmannGraph(v.dim, v.ambient)
    return g.neighbor(v, prng.below(g.degree))


def shortcode_step(prng: Prng, m: GF2Matrix) -> tuple[GF2Matrix, GF2Vector, GF2Vector]:
    """One test step: a, b uniform over all vectors (zero included)."""
    a = gf2.sample_vector(prng, m.nrows)
    b = gf2.sample_vector(prng, m.ncols)
    return m + GF2Matrix.outer(a, b), a, b


def tensor_step(prng: Prng, t: GF2Tensor) -> tuple[GF2Tensor, GF2Vector, GF2Vector, GF2Vector]:
    """One degree-3 test step: a uniform nonzero, b and c uniform over all vectors."""
    l, m, n = t.dims
    a = GF2Vector(l, 1 + prng.below((1 << l) - 1))
    b = gf2.sample_vector(prng, m)
    c = gf2.sample_vector(prng, n)
    return t + GF2Tensor.outer(a, b, c), a, b, c


# --------------------------------------------------------------------------
# enumeration


def enumerate_vertices(graph: Graph, cap: int | None = None) -> Iterator:
    gf2.check_cap(f"vertices of {graph}", graph.num_vertices, cap)
    if isinstance(graph, GrassmannGraph):
        yield from graph.tables(cap=1 << 62).subspaces
    elif isinstance(graph, ShortcodeGraph):
        for code in range(graph.num_vertices):
            yield GF2Matrix.from_int(code, graph.l, graph.n)
    else:
        for code in range(graph.num_vertices):
            yield GF2Tensor(graph.dims, code)


def enumerate_edges(graph: Graph, cap: int | None = None) -> Iterator[tuple]:
    """Each undirected edge once, ordered by (smaller index, larger index)."""
    gf2.check_cap(f"vertices of {graph}", graph.num_vertices, cap)
    if isinstance(graph, GrassmannGraph):
        tab = graph.tables(cap=1 << 62)
        for i, v in enumerate(tab.subspaces):
            js = sorted({tab.index[graph.neighbor(v, c).key] for c in range(graph.degree)})
            for j in js:
                if j > i:
                    yield v, tab.subspaces[j]
        return
    steps = sorted(graph.rank_one_codes())
    for code in range(graph.num_vertices):
        for j in sorted(code ^ d for d in steps):
            if j > code:
                if isinstance(graph, ShortcodeGraph):
                    yield (GF2Matrix.from_int(code, graph.l, graph.n), GF2Matrix.from_int(j, graph.l, graph.n))
                else:
                    yield GF2Tensor(graph.dims, code), GF2Tensor(graph.dims, j)
