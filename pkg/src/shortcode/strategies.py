"""Assignments under test: Grassmann, shortcode and tensor strategies.

A Grassmann strategy stores, for each subspace V, the values of a linear
map F(V) on the RREF basis rows of V (bit i of the label is the value on
row i).  Shortcode and tensor strategies map a vertex to an l-bit label,
bit i being coordinate i of the label in GF(2)^l.

Structured backings (affine, row functional, bilinear) evaluate in closed
form; ``table()`` expands any backing into a label array indexed by the
vertex encoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np

from . import gf2
from .errors import DomainError, FormatError, ParameterError
from .gf2 import GF2Matrix, GF2Tensor, GF2Vector, Prng, Subspace, bits_to_str, parity, str_to_bits
from .graphs import GrassmannGraph, ShortcodeGraph, TensorGraph


def _parity_array(x: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(x.astype(np.uint64)) & 1).astype(np.int64)


@dataclass(frozen=True)
class LinearFunctional:
    """x -> <coeffs, x> + const on GF(2)^n."""

    n: int
    coeffs: int
    const: int = 0

    def __post_init__(self):
        if self.coeffs >> self.n or self.coeffs < 0 or self.const not in (0, 1):
            raise ParameterError("coefficients exceed n or constant is not a bit")

    def __call__(self, x: GF2Vector | int) -> int:
        bits = x.bits if isinstance(x, GF2Vector) else x
        return parity(self.coeffs & bits) ^ self.const

    @property
    def is_linear(self) -> bool:
        return self.const == 0

    def __str__(self) -> str:
        return bits_to_str(self.coeffs, self.n) + ("+1" if self.const else "")


# --------------------------------------------------------------------------
# Grassmann


@dataclass(frozen=True, eq=False)
class GrassmannStrategy:
    l: int
    n: int
    backing: str  # "table" | "rowfn"
    f: LinearFunctional | None = None
    labels: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_functional(cls, f: LinearFunctional, l: int) -> GrassmannStrategy:
        if not f.is_linear:
            raise ParameterError("F_f needs a linear (constant-free) functional")
        return cls(l, f.n, "rowfn", f=f)

    @classmethod
    def from_table(cls, l: int, n: int, labels: Sequence[int] | np.ndarray) -> GrassmannStrategy:
        labels = np.asarray(labels, dtype=np.int64)
        graph = GrassmannGraph(l, n)
        if labels.shape != (graph.num_vertices,):
            raise ParameterError(f"table needs {graph.num_vertices} entries, got {labels.shape}")
        if labels.size and (labels.min() < 0 or labels.max() >> l):
            raise ParameterError("table label exceeds l bits")
        return cls(l, n, "table", labels=labels)

    @property
    def graph(self) -> GrassmannGraph:
        return GrassmannGraph(self.l, self.n)

    def values(self, v: Subspace) -> int:
        """The stored label of F(V): bit i is F(V) on RREF row i."""
        if self.backing == "rowfn":
            return sum(self.f(r) << i for i, r in enumerate(v.basis))
        return int(self.labels[self.graph.index(v)])

    @cached_property
    def _table(self) -> np.ndarray:
        if self.backing == "table":
            return self.labels
        tab = self.graph.tables()
        out = np.zeros(tab.size, dtype=np.int64)
        for i in range(self.l):
            out |= _parity_array(tab.bases[:, i] & self.f.coeffs) << i
        return out

    def table(self, cap: int | None = None) -> np.ndarray:
        gf2.check_cap(f"vertices of G({self.l},{self.n})", self.graph.num_vertices, cap)
        return self._table

    def expanded(self) -> GrassmannStrategy:
        return GrassmannStrategy.from_table(self.l, self.n, self.table())


def eval_grassmann(F: GrassmannStrategy, v: Subspace, x: GF2Vector | int) -> int:
    """Value of the linear map F(V) at the vector x of V."""
    coords = v.coords(x)
    if coords is None:
        raise DomainError(f"vector is not in {v}")
    if F.backing == "rowfn":
        return F.f(x)
    return parity(F.values(v) & coords)


# --------------------------------------------------------------------------
# shortcode


@dataclass(frozen=True, eq=False)
class ShortcodeStrategy:
    l: int
    n: int
    backing: str  # "table" | "affine" | "rowfn"
    z: int = 0
    u: int = 0
    f: LinearFunctional | None = None
    labels: np.ndarray | None = field(default=None, repr=False)
    parts: tuple = ()

    @classmethod
    def affine(cls, l: int, n: int, z: int | GF2Vector, u: int | GF2Vector) -> ShortcodeStrategy:
        z = z.bits if isinstance(z, GF2Vector) else z
        u = u.bits if isinstance(u, GF2Vector) else u
        if z >> n or u >> l:
            raise ParameterError("z must have n bits and u l bits")
        return cls(l, n, "affine", z=z, u=u)

    @classmethod
    def row_functional(cls, l: int, f: LinearFunctional) -> ShortcodeStrategy:
        return cls(l, f.n, "rowfn", f=f)

    @classmethod
    def from_table(cls, l: int, n: int, labels, parts: tuple = ()) -> ShortcodeStrategy:
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != (1 << (l * n),):
            raise ParameterError(f"table needs {1 << (l * n)} entries, got {labels.shape}")
        if labels.size and (labels.min() < 0 or labels.max() >> l):
            raise ParameterError("table label exceeds l bits")
        return cls(l, n, "table", labels=labels, parts=parts)

    @property
    def graph(self) -> ShortcodeGraph:
        return ShortcodeGraph(self.l, self.n)

    def affine_pair(self) -> tuple[int, int] | None:
        """(z, u) with F(M) = Mz + u when the backing is structured."""
        if self.backing == "affine":
            return self.z, self.u
        if self.backing == "rowfn":
            return self.f.coeffs, ((1 << self.l) - 1) if self.f.const else 0
        return None

    def label(self, code: int) -> int:
        pair = self.affine_pair()
        if pair is None:
            return int(self.labels[code])
        z, u = pair
        mask = (1 << self.n) - 1
        out = 0
        for i in range(self.l):
            out |= parity((code >> (i * self.n)) & mask & z) << i
        return out ^ u

    def __call__(self, m: GF2Matrix) -> GF2Vector:
        return eval_shortcode(self, m)

    @cached_property
    def _table(self) -> np.ndarray:
        pair = self.affine_pair()
        if pair is None:
            return self.labels
        z, u = pair
        codes = np.arange(1 << (self.l * self.n), dtype=np.int64)
        out = np.zeros_like(codes)
        mask = (1 << self.n) - 1
        for i in range(self.l):
            out |= _parity_array((codes >> (i * self.n)) & mask & z) << i
        return out ^ u

    def table(self, cap: int | None = None) -> np.ndarray:
        gf2.check_cap(f"vertices of S_{{{self.l},{self.n}}}", 1 << (self.l * self.n), cap)
        return self._table

    def expanded(self) -> ShortcodeStrategy:
        return ShortcodeStrategy.from_table(self.l, self.n, self.table(), self.parts)


def eval_shortcode(F: ShortcodeStrategy, m: GF2Matrix) -> GF2Vector:
    if m.shape != (F.l, F.n):
        raise ParameterError(f"matrix shape {m.shape} does not match ({F.l},{F.n})")
    return GF2Vector(F.l, F.label(m.encode()))


# --------------------------------------------------------------------------
# tensor


@dataclass(frozen=True, eq=False)
class TensorStrategy:
    l: int
    m: int
    n: int
    backing: str  # "table" | "bilinear"
    y: int = 0
    z: int = 0
    labels: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def bilinear(cls, l: int, y: int | GF2Vector, z: int | GF2Vector) -> TensorStrategy:
        yv = y if isinstance(y, GF2Vector) else None
        zv = z if isinstance(z, GF2Vector) else None
        if yv is None or zv is None:
            raise ParameterError("bilinear needs GF2Vector y and z (their lengths fix m and n)")
        return cls(l, yv.length, zv.length, "bilinear", y=yv.bits, z=zv.bits)

    @classmethod
    def from_table(cls, l: int, m: int, n: int, labels) -> TensorStrategy:
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != (1 << (l * m * n),):
            raise ParameterError(f"table needs {1 << (l * m * n)} entries")
        return cls(l, m, n, "table", labels=labels)

    @property
    def graph(self) -> TensorGraph:
        return TensorGraph(self.l, self.m, self.n)

    @property
    def _yz(self) -> int:
        return GF2Matrix.outer(GF2Vector(self.m, self.y), GF2Vector(self.n, self.z)).encode()

    def label(self, code: int) -> int:
        if self.backing == "table":
            return int(self.labels[code])
        mn = self.m * self.n
        yz = self._yz
        return sum(parity((code >> (i * mn)) & yz) << i for i in range(self.l))

    @cached_property
    def _table(self) -> np.ndarray:
        if self.backing == "table":
            return self.labels
        mn = self.m * self.n
        codes = np.arange(1 << (self.l * mn), dtype=np.int64)
        out = np.zeros_like(codes)
        for i in range(self.l):
            out |= _parity_array((codes >> (i * mn)) & self._yz) << i
        return out

    def table(self, cap: int | None = None) -> np.ndarray:
        gf2.check_cap("tensor vertices", 1 << (self.l * self.m * self.n), cap)
        return self._table


def eval_tensor(F: TensorStrategy, t: GF2Tensor) -> GF2Vector:
    if t.dims != (F.l, F.m, F.n):
        raise ParameterError("tensor dims do not match the strategy")
    return GF2Vector(F.l, F.label(t.bits))


Strategy = Union[GrassmannStrategy, ShortcodeStrategy, TensorStrategy]


# --------------------------------------------------------------------------
# planted strategies and uniquifying


def vertex_mask(pred, graph) -> np.ndarray:
    """Boolean membership array over a graph's vertex encoding."""
    if isinstance(pred, np.ndarray):
        mask = pred.astype(bool)
        if mask.shape != (graph.num_vertices,):
            raise ParameterError("mask length does not match the vertex count")
        return mask
    if hasattr(pred, "mask"):
        return pred.mask(graph)
    from .graphs import enumerate_vertices

    return np.fromiter((bool(pred(v)) for v in enumerate_vertices(graph)), dtype=bool, count=graph.num_vertices)


def make_planted(
    prng: Prng,
    parts: Sequence[Callable | np.ndarray],
    l: int,
    n: int,
    kind: str = "shortcode",
) -> ShortcodeStrategy | GrassmannStrategy:
    """Label each part A_i by its own random linear function; random elsewhere.

    On the shortcode graph the label on A_i is ``M f_i + u_i`` with f_i and
    the constant u_i drawn once per part.  Overlaps resolve first-match.
    """
    graph = ShortcodeGraph(l, n) if kind == "shortcode" else GrassmannGraph(l, n)
    gf2.check_cap(f"vertices of {graph}", graph.num_vertices, None)
    masks = [vertex_mask(p, graph) for p in parts]
    funcs = []
    for _ in masks:
        f = prng.bits(n)
        u = prng.bits(l) if kind == "shortcode" else 0
        funcs.append((f, u))
    labels = prng.integers(0, 1 << l, graph.num_vertices)
    assigned = np.zeros(graph.num_vertices, dtype=bool)
    for mask, (f, u) in zip(masks, funcs):
        sel = mask & ~assigned
        if kind == "shortcode":
            part_labels = ShortcodeStrategy.affine(l, n, f, u).table()
        else:
            part_labels = GrassmannStrategy.from_functional(LinearFunctional(n, f), l).table()
        labels[sel] = part_labels[sel]
        assigned |= sel
    meta = tuple(funcs)
    if kind == "shortcode":
        return ShortcodeStrategy.from_table(l, n, labels, parts=meta)
    return GrassmannStrategy.from_table(l, n, labels)


def mh_table(l: int, n: int, h: int) -> np.ndarray:
    """The label array M -> Mh."""
    return ShortcodeStrategy.affine(l, n, h, 0).table()


def uniquify_with(F: ShortcodeStrategy, h: int) -> ShortcodeStrategy:
    """G(M) = F(M) + Mh for a fixed h."""
    if F.backing == "affine":
        return ShortcodeStrategy.affine(F.l, F.n, F.z ^ h, F.u)
    if F.backing == "rowfn":
        return ShortcodeStrategy.row_functional(F.l, LinearFunctional(F.n, F.f.coeffs ^ h, F.f.const))
    return ShortcodeStrategy.from_table(F.l, F.n, F.table() ^ mh_table(F.l, F.n, h))


def uniquify(prng: Prng, F: ShortcodeStrategy) -> tuple[GF2Vector, ShortcodeStrategy]:
    h = gf2.sample_vector(prng, F.n)
    return h, uniquify_with(F, h.bits)


# --------------------------------------------------------------------------
# strategy files

_KINDS = {
    "grassmann": {"table", "rowfn"},
    "shortcode": {"table", "affine", "rowfn"},
    "tensor": {"table", "bilinear"},
}


def dumps(F: Strategy) -> str:
    if isinstance(F, GrassmannStrategy):
        head = f"strategy v1 kind=grassmann backing={F.backing} l={F.l} n={F.n}"
    elif isinstance(F, ShortcodeStrategy):
        head = f"strategy v1 kind=shortcode backing={F.backing} l={F.l} n={F.n}"
    else:
        head = f"strategy v1 kind=tensor backing={F.backing} l={F.l} n={F.n} m={F.m}"
    lines = [head]
    if F.backing == "affine":
        lines += [f"z={bits_to_str(F.z, F.n)}", f"u={bits_to_str(F.u, F.l)}"]
    elif F.backing == "rowfn":
        lines += [f"f={bits_to_str(F.f.coeffs, F.n)}", f"c={F.f.const}"]
    elif F.backing == "bilinear":
        lines += [f"y={bits_to_str(F.y, F.m)}", f"z={bits_to_str(F.z, F.n)}"]
    else:
        lines += [format(int(x), "x") for x in F.table()]
    return "\n".join(lines) + "\n"


def loads(text: str) -> Strategy:
    body = [
        (num, line.strip())
        for num, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not body:
        raise FormatError("empty strategy file", 1)
    num, head = body[0]
    tokens = head.split()
    if tokens[:2] != ["strategy", "v1"]:
        raise FormatError("header must start with 'strategy v1'", num)
    opts = {}
    for tok in tokens[2:]:
        key, sep, val = tok.partition("=")
        if not sep:
            raise FormatError(f"bad header token {tok!r}", num)
        opts[key] = val
    kind, backing = opts.get("kind"), opts.get("backing")
    if kind not in _KINDS:
        raise FormatError(f"unknown kind {kind!r}", num)
    if backing not in _KINDS[kind]:
        raise FormatError(f"backing {backing!r} not valid for kind {kind}", num)
    try:
        l, n = int(opts["l"]), int(opts["n"])
        m = int(opts["m"]) if kind == "tensor" else None
    except (KeyError, ValueError):
        raise FormatError("header needs integer l, n (and m for tensors)", num) from None
    if l <= 0 or n <= 0 or (m is not None and m <= 0):
        raise FormatError("dimensions must be positive", num)
    rest = body[1:]

    if backing == "table":
        if kind == "grassmann":
            if not 0 < l < n:
                raise FormatError("Grassmann tables need 0 < l < n", num)
            count = gf2.gaussian_binomial(n, l)
        elif kind == "shortcode":
            count = 1 << (l * n)
        else:
            count = 1 << (l * m * n)
        if len(rest) != count:
            last = rest[-1][0] if rest else num
            raise FormatError(f"table needs {count} labels, found {len(rest)}", last)
        labels = np.empty(count, dtype=np.int64)
        for k, (lnum, line) in enumerate(rest):
            try:
                val = int(line[2:] if line.lower().startswith("0x") else line, 16)
            except ValueError:
                raise FormatError(f"bad hex label {line!r}", lnum) from None
            if val >> l:
                raise FormatError(f"label {line!r} exceeds {l} bits", lnum)
            labels[k] = val
        if kind == "grassmann":
            return GrassmannStrategy.from_table(l, n, labels)
        if kind == "shortcode":
            return ShortcodeStrategy.from_table(l, n, labels)
        return TensorStrategy.from_table(l, m, n, labels)

    fields = {}
    for lnum, line in rest:
        key, sep, val = line.partition("=")
        if not sep:
            raise FormatError(f"expected key=value, got {line!r}", lnum)
        fields[key.strip()] = (lnum, val.strip())

    def vec(key: str, length: int) -> int:
        if key not in fields:
            raise FormatError(f"missing field {key!r}", rest[-1][0] if rest else num)
        lnum, val = fields[key]
        try:
            return GF2Vector.parse(val, length).bits
        except FormatError as exc:
            raise FormatError(str(exc), lnum) from None

    if backing == "affine":
        return ShortcodeStrategy.affine(l, n, vec("z", n), vec("u", l))
    if backing == "rowfn":
        f = LinearFunctional(n, vec("f", n), vec("c", 1) if "c" in fields else 0)
        if kind == "grassmann":
            if f.const:
                raise FormatError("Grassmann rowfn must be linear (c=0)", fields["c"][0])
            return GrassmannStrategy.from_functional(f, l)
        return ShortcodeStrategy.row_functional(l, f)
    return TensorStrategy(l, m, n, "bilinear", y=vec("y", m), z=vec("z", n))


def read_strategy(path: str | Path) -> Strategy:
    return loads(Path(path).read_text())


def write_strategy(path: str | Path, F: Strategy) -> None:
    Path(path).write_text(dumps(F))


__all__ = [
    "LinearFunctional",
    "GrassmannStrategy",
    "ShortcodeStrategy",
    "TensorStrategy",
    "eval_grassmann",
    "eval_shortcode",
    "eval_tensor",
    "make_planted",
    "uniquify",
    "uniquify_with",
    "dumps",
    "loads",
    "read_strategy",
    "write_strategy",
    "str_to_bits",
]
