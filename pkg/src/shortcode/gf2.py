"""Bit-packed linear algebra over GF(2).

Vectors and matrix rows are Python ints: coordinate ``j`` (0-based) of a
vector lives in bit ``j``.  A matrix with ``n`` columns packs row ``i`` at
bit offset ``i * n``; tensors pack entry ``(i, j, k)`` at
``(i * m + j) * n + k``.  The textual literal of a vector is a bitstring
whose first character is coordinate 1, so ``"110"`` has bits ``0b011``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DomainError, FormatError, ParameterError, ResourceError

DEFAULT_CAP = 1 << 24


def parity(x: int) -> int:
    return x.bit_count() & 1


def _mask(n: int) -> int:
    return (1 << n) - 1


def bits_to_str(bits: int, length: int) -> str:
    return "".join("1" if (bits >> j) & 1 else "0" for j in range(length))


def str_to_bits(text: str) -> int:
    if not text or any(ch not in "01" for ch in text):
        raise FormatError(f"not a bitstring: {text!r}")
    out = 0
    for j, ch in enumerate(text):
        if ch == "1":
            out |= 1 << j
    return out


# --------------------------------------------------------------------------
# raw row-list kernels (ints as rows)


def rref_rows(rows: Iterable[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row-echelon form of integer rows.

    Pivot columns are chosen leftmost-first (lowest bit index first); the
    returned rows are sorted by pivot and zero rows are dropped.
    """
    work = [r for r in rows if r]
    out: list[int] = []
    pivots: list[int] = []
    for col in range(ncols):
        bit = 1 << col
        for idx, r in enumerate(work):
            if r & bit:
                piv = work.pop(idx)
                break
        else:
            continue
        work = [r ^ piv if r & bit else r for r in work]
        out = [r ^ piv if r & bit else r for r in out]
        out.append(piv)
        pivots.append(col)
        if not work:
            break
    return out, pivots


def rank_rows(rows: Iterable[int]) -> int:
    """Rank via an xor basis keyed by highest set bit."""
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            b = basis.get(top)
            if b is None:
                basis[top] = r
                break
            r ^= b
    return len(basis)


def _reduce_against(x: int, rref: Sequence[int], pivots: Sequence[int]) -> int:
    for r, p in zip(rref, pivots):
        if (x >> p) & 1:
            x ^= r
    return x


def transpose_rows(rows: Sequence[int], ncols: int) -> list[int]:
    out = []
    for j in range(ncols):
        col = 0
        for i, r in enumerate(rows):
            if (r >> j) & 1:
                col |= 1 << i
        out.append(col)
    return out


def solve_affine(
    equations: Sequence[tuple[int, int]], nvars: int
) -> tuple[int, list[int]] | None:
    """Solve a system ``<a_k, x> = c_k`` over GF(2).

    ``equations`` holds ``(a_k, c_k)`` pairs with ``a_k`` an int over
    ``nvars`` variables.  Returns ``(particular, kernel_basis)`` or
    ``None`` when inconsistent.
    """
    aug = [a | (c & 1) << nvars for a, c in equations]
    red, pivots = rref_rows(aug, nvars + 1)
    if pivots and pivots[-1] == nvars:
        return None
    particular = 0
    for r, p in zip(red, pivots):
        if (r >> nvars) & 1:
            particular |= 1 << p
    pivot_set = set(pivots)
    kernel = []
    for f in range(nvars):
        if f in pivot_set:
            continue
        v = 1 << f
        for r, p in zip(red, pivots):
            if (r >> f) & 1:
                v |= 1 << p
        kernel.append(v)
    return particular, kernel


def span_elements(basis: Sequence[int]) -> Iterator[int]:
    """All 2^k elements of span(basis), Gray-code order starting at 0."""
    x = 0
    yield x
    for step in range(1, 1 << len(basis)):
        x ^= basis[(step & -step).bit_length() - 1]
        yield x


# --------------------------------------------------------------------------
# value types


@dataclass(frozen=True)
class GF2Vector:
    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ParameterError("vector length must be nonnegative")
        if self.bits < 0 or self.bits >> self.length:
            raise ParameterError(f"bits 0x{self.bits:x} exceed length {self.length}")

    @classmethod
    def parse(cls, text: str, length: int | None = None) -> GF2Vector:
        text = text.strip()
        if text.lower().startswith("0x"):
            try:
                bits = int(text[2:], 16)
            except ValueError:
                raise FormatError(f"bad hex literal {text!r}") from None
            if length is None:
                length = max(1, 4 * (len(text) - 2))
            if bits >> length:
                raise FormatError(f"hex literal {text!r} exceeds length {length}")
            return cls(length, bits)
        bits = str_to_bits(text)
        if length is not None and len(text) != length:
            raise FormatError(f"expected {length} bits, got {text!r}")
        return cls(len(text), bits)

    @classmethod
    def zero(cls, n: int) -> GF2Vector:
        return cls(n, 0)

    @classmethod
    def unit(cls, n: int, i: int) -> GF2Vector:
        return cls(n, 1 << i)

    def __str__(self) -> str:
        return bits_to_str(self.bits, self.length)

    def hex(self) -> str:
        return f"0x{self.bits:x}"

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __iter__(self) -> Iterator[int]:
        return (int((self.bits >> j) & 1) for j in range(self.length))

    def __len__(self) -> int:
        return self.length

    def __add__(self, other: GF2Vector) -> GF2Vector:
        _same_length(self, other)
        return GF2Vector(self.length, self.bits ^ other.bits)

    __sub__ = __add__

    def dot(self, other: GF2Vector) -> int:
        _same_length(self, other)
        return parity(self.bits & other.bits)

    def is_zero(self) -> bool:
        return self.bits == 0


def _same_length(a: GF2Vector, b: GF2Vector) -> None:
    if a.length != b.length:
        raise ParameterError(f"length mismatch: {a.length} vs {b.length}")


@dataclass(frozen=True)
class GF2Matrix:
    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise ParameterError(f"expected {self.nrows} rows, got {len(self.rows)}")
        m = _mask(self.ncols)
        for r in self.rows:
            if r < 0 or r & ~m:
                raise ParameterError(f"row 0x{r:x} wider than {self.ncols} columns")

    @classmethod
    def from_rows(cls, rows: Sequence[GF2Vector | str | int], ncols: int | None = None) -> GF2Matrix:
        ints = []
        for r in rows:
            if isinstance(r, GF2Vector):
                ncols = r.length if ncols is None else ncols
                if r.length != ncols:
                    raise ParameterError("ragged rows")
                ints.append(r.bits)
            elif isinstance(r, str):
                if ncols is not None and len(r) != ncols:
                    raise ParameterError("ragged rows")
                ncols = len(r)
                ints.append(str_to_bits(r))
            else:
                if ncols is None:
                    raise ParameterError("ncols required for integer rows")
                ints.append(int(r))
        if ncols is None:
            raise ParameterError("cannot infer column count of an empty matrix")
        return cls(len(ints), ncols, tuple(ints))

    @classmethod
    def parse(cls, text: str, shape: tuple[int, int] | None = None) -> GF2Matrix:
        text = text.strip()
        if text.lower().startswith("0x"):
            if shape is None:
                raise FormatError("hex matrix literal needs an explicit shape")
            code = GF2Vector.parse(text, shape[0] * shape[1]).bits
            return cls.from_int(code, *shape)
        parts = [p.strip() for p in text.split(";")]
        try:
            m = cls.from_rows(parts)
        except ParameterError as exc:
            raise FormatError(str(exc)) from None
        if shape is not None and (m.nrows, m.ncols) != tuple(shape):
            raise FormatError(f"expected shape {shape}, got {(m.nrows, m.ncols)}")
        return m

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> GF2Matrix:
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def identity(cls, n: int) -> GF2Matrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_int(cls, code: int, nrows: int, ncols: int) -> GF2Matrix:
        m = _mask(ncols)
        return cls(nrows, ncols, tuple((code >> (i * ncols)) & m for i in range(nrows)))

    @classmethod
    def outer(cls, a: GF2Vector, b: GF2Vector) -> GF2Matrix:
        return cls(a.length, b.length, tuple(b.bits if (a.bits >> i) & 1 else 0 for i in range(a.length)))

    def encode(self) -> int:
        code = 0
        for i, r in enumerate(self.rows):
            code |= r << (i * self.ncols)
        return code

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def row(self, i: int) -> GF2Vector:
        return GF2Vector(self.ncols, self.rows[i])

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def __str__(self) -> str:
        return ";".join(bits_to_str(r, self.ncols) for r in self.rows)

    def __add__(self, other: GF2Matrix) -> GF2Matrix:
        if self.shape != other.shape:
            raise ParameterError(f"shape mismatch {self.shape} vs {other.shape}")
        return GF2Matrix(self.nrows, self.ncols, tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    __sub__ = __add__

    def transpose(self) -> GF2Matrix:
        return GF2Matrix(self.ncols, self.nrows, tuple(transpose_rows(self.rows, self.ncols)))

    def apply(self, z: GF2Vector) -> GF2Vector:
        """Matrix-vector product ``M z``."""
        if z.length != self.ncols:
            raise ParameterError("vector length must equal column count")
        out = 0
        for i, r in enumerate(self.rows):
            if parity(r & z.bits):
                out |= 1 << i
        return GF2Vector(self.nrows, out)

    def left_apply(self, r: GF2Vector) -> GF2Vector:
        """Row-vector product ``r^T M``."""
        if r.length != self.nrows:
            raise ParameterError("vector length must equal row count")
        out = 0
        for i, row in enumerate(self.rows):
            if (r.bits >> i) & 1:
                out ^= row
        return GF2Vector(self.ncols, out)

    def matmul(self, other: GF2Matrix) -> GF2Matrix:
        if self.ncols != other.nrows:
            raise ParameterError("inner dimensions differ")
        rows = []
        for r in self.rows:
            acc = 0
            for k in range(self.ncols):
                if (r >> k) & 1:
                    acc ^= other.rows[k]
            rows.append(acc)
        return GF2Matrix(self.nrows, other.ncols, tuple(rows))

    def is_zero(self) -> bool:
        return not any(self.rows)


@dataclass(frozen=True)
class GF2Tensor:
    dims: tuple[int, int, int]
    bits: int = 0

    def __post_init__(self):
        l, m, n = self.dims
        if min(self.dims) <= 0:
            raise ParameterError("tensor dimensions must be positive")
        if self.bits < 0 or self.bits >> (l * m * n):
            raise ParameterError("tensor bits exceed l*m*n")

    @classmethod
    def outer(cls, a: GF2Vector, b: GF2Vector, c: GF2Vector) -> GF2Tensor:
        l, m, n = a.length, b.length, c.length
        bits = 0
        for i in range(l):
            if not (a.bits >> i) & 1:
                continue
            for j in range(m):
                if (b.bits >> j) & 1:
                    bits |= c.bits << ((i * m + j) * n)
        return cls((l, m, n), bits)

    @classmethod
    def from_entries(cls, dims: tuple[int, int, int], entries: Iterable[tuple[int, int, int]]) -> GF2Tensor:
        l, m, n = dims
        bits = 0
        for i, j, k in entries:
            bits ^= 1 << ((i * m + j) * n + k)
        return cls(tuple(dims), bits)

    def entry(self, i: int, j: int, k: int) -> int:
        _, m, n = self.dims
        return (self.bits >> ((i * m + j) * n + k)) & 1

    def slice(self, i: int) -> GF2Matrix:
        """Mode-1 slice ``T(i, ., .)`` as an m x n matrix."""
        _, m, n = self.dims
        return GF2Matrix.from_int((self.bits >> (i * m * n)) & _mask(m * n), m, n)

    def __add__(self, other: GF2Tensor) -> GF2Tensor:
        if self.dims != other.dims:
            raise ParameterError(f"dims mismatch {self.dims} vs {other.dims}")
        return GF2Tensor(self.dims, self.bits ^ other.bits)

    __sub__ = __add__

    def encode(self) -> int:
        return self.bits

    def is_zero(self) -> bool:
        return self.bits == 0


@dataclass(frozen=True)
class Subspace:
    """A subspace of GF(2)^n held by its RREF basis (the canonical key)."""

    ambient: int
    basis: tuple[int, ...]

    @classmethod
    def span(cls, ambient: int, vectors: Iterable[GF2Vector | int]) -> Subspace:
        ints = []
        for v in vectors:
            if isinstance(v, GF2Vector):
                if v.length != ambient:
                    raise ParameterError("vector outside the ambient space")
                ints.append(v.bits)
            else:
                ints.append(int(v))
        rows, _ = rref_rows(ints, ambient)
        return cls(ambient, tuple(rows))

    @classmethod
    def zero(cls, n: int) -> Subspace:
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> Subspace:
        return cls(n, tuple(1 << i for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple((r & -r).bit_length() - 1 for r in self.basis)

    @property
    def key(self) -> int:
        code = 0
        for i, r in enumerate(self.basis):
            code |= r << (i * self.ambient)
        return code

    def basis_matrix(self) -> GF2Matrix:
        return GF2Matrix(self.dim, self.ambient, self.basis)

    def basis_vectors(self) -> list[GF2Vector]:
        return [GF2Vector(self.ambient, r) for r in self.basis]

    def coords(self, v: GF2Vector | int) -> int | None:
        """Coordinates of ``v`` in the RREF basis (bit i for row i), or None."""
        x = v.bits if isinstance(v, GF2Vector) else v
        c = 0
        acc = 0
        for i, (r, p) in enumerate(zip(self.basis, self.pivots)):
            if (x >> p) & 1:
                c |= 1 << i
                acc ^= r
        return c if acc == x else None

    def __contains__(self, v: GF2Vector | int) -> bool:
        return self.coords(v) is not None

    def elements(self) -> Iterator[int]:
        return span_elements(self.basis)

    def contains_subspace(self, other: Subspace) -> bool:
        return all(r in self for r in other.basis)

    def annihilator(self) -> Subspace:
        """The orthogonal complement ``{x : <x, v> = 0 for all v in self}``."""
        pivots = self.pivots
        pivot_set = set(pivots)
        out = []
        for f in range(self.ambient):
            if f in pivot_set:
                continue
            v = 1 << f
            for r, p in zip(self.basis, pivots):
                if (r >> f) & 1:
                    v |= 1 << p
            out.append(v)
        return Subspace.span(self.ambient, out)

    def __add__(self, other: Subspace) -> Subspace:
        _same_ambient(self, other)
        return Subspace.span(self.ambient, self.basis + other.basis)

    def __str__(self) -> str:
        if not self.basis:
            return f"<0 in F2^{self.ambient}>"
        return "span{" + ",".join(bits_to_str(r, self.ambient) for r in self.basis) + "}"


def _same_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient != b.ambient:
        raise ParameterError(f"ambient mismatch: {a.ambient} vs {b.ambient}")


@dataclass(frozen=True, eq=False)
class Basis:
    """An ordered basis of GF(2)^n; ``rows[i]`` is the i-th basis vector."""

    ambient: int
    rows: tuple[int, ...]
    inverse: tuple[int, ...]

    @classmethod
    def from_rows(cls, rows: Sequence[int | GF2Vector], ambient: int | None = None) -> Basis:
        ints = [r.bits if isinstance(r, GF2Vector) else int(r) for r in rows]
        n = len(ints) if ambient is None else ambient
        if len(ints) != n:
            raise ParameterError("a basis of GF(2)^n needs n vectors")
        inv = invert_rows(ints, n)
        if inv is None:
            raise DomainError("rows are linearly dependent")
        return cls(n, tuple(ints), tuple(inv))

    @classmethod
    def standard(cls, n: int) -> Basis:
        e = tuple(1 << i for i in range(n))
        return cls(n, e, e)

    def __eq__(self, other):
        return isinstance(other, Basis) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    @property
    def is_standard(self) -> bool:
        return all(r == 1 << i for i, r in enumerate(self.rows))

    def matrix(self) -> GF2Matrix:
        return GF2Matrix(self.ambient, self.ambient, self.rows)

    def to_coords(self, x: int) -> int:
        """Coordinates ``y`` with ``x = sum_i y_i rows[i]``."""
        return _vecmat(x, self.inverse)

    def from_coords(self, y: int) -> int:
        return _vecmat(y, self.rows)


def _vecmat(x: int, rows: Sequence[int]) -> int:
    acc = 0
    i = 0
    while x:
        if x & 1:
            acc ^= rows[i]
        x >>= 1
        i += 1
    return acc


def invert_rows(rows: Sequence[int], n: int) -> list[int] | None:
    """Inverse of a square matrix given as rows, or None if singular."""
    aug = [r | (1 << (n + i)) for i, r in enumerate(rows)]
    red, pivots = rref_rows(aug, 2 * n)
    if len(red) != n or pivots[-1] >= n:
        return None
    return [r >> n for r in red]


# --------------------------------------------------------------------------
# operations


def rank(m: GF2Matrix) -> int:
    return rank_rows(m.rows)


def rref(m: GF2Matrix) -> tuple[GF2Matrix, tuple[int, ...]]:
    rows, pivots = rref_rows(m.rows, m.ncols)
    return GF2Matrix(len(rows), m.ncols, tuple(rows)), tuple(pivots)


def solve(m: GF2Matrix, rhs: GF2Vector) -> GF2Vector | None:
    """Left-solve ``x . m = rhs``; ``x`` has one entry per row of ``m``."""
    if rhs.length != m.ncols:
        raise ParameterError("rhs length must equal the column count")
    # tag each row with its origin so the combination can be read back
    tagged = [r | (1 << (m.ncols + i)) for i, r in enumerate(m.rows)]
    red, pivots = rref_rows(tagged, m.ncols)
    k = len(pivots)
    red = red[:k]
    x = _reduce_against(rhs.bits, [r & _mask(m.ncols) for r in red], pivots)
    if x:
        return None
    combo = 0
    for r, p in zip(red, pivots):
        if (rhs.bits >> p) & 1:
            combo ^= r >> m.ncols
    return GF2Vector(m.nrows, combo)


def solve_right(m: GF2Matrix, rhs: GF2Vector) -> GF2Vector | None:
    """Right-solve ``m x = rhs`` by transposing into a left-solve."""
    if rhs.length != m.nrows:
        raise ParameterError("rhs length must equal the row count")
    return solve(m.transpose(), rhs)


def intersect(v1: Subspace, v2: Subspace) -> Subspace:
    _same_ambient(v1, v2)
    return (v1.annihilator() + v2.annihilator()).annihilator()


def project(v: Subspace, coords: Sequence[int]) -> Subspace:
    coords = list(coords)
    if any(not 0 <= c < v.ambient for c in coords):
        raise ParameterError("projection coordinates out of range")
    out = []
    for r in v.basis:
        x = 0
        for k, c in enumerate(coords):
            if (r >> c) & 1:
                x |= 1 << k
        out.append(x)
    return Subspace.span(len(coords), out)


def gaussian_binomial(n: int, l: int) -> int:
    if not 0 <= l <= n:
        raise ParameterError(f"need 0 <= l <= n, got l={l}, n={n}")
    num = den = 1
    for i in range(l):
        num *= (1 << (n - i)) - 1
        den *= (1 << (l - i)) - 1
    return num // den


def check_cap(what: str, count: int, cap: int | None) -> None:
    cap = DEFAULT_CAP if cap is None else cap
    if count > cap:
        raise ResourceError(what, count, cap)


@lru_cache(maxsize=64)
def _subspace_keys(n: int, l: int) -> tuple[tuple[int, ...], ...]:
    bases = []
    for pivots in itertools.combinations(range(n), l):
        pivot_set = set(pivots)
        free = [[c for c in range(p + 1, n) if c not in pivot_set] for p in pivots]
        nfree = [len(f) for f in free]
        for choice in range(1 << sum(nfree)):
            rows = []
            for p, cols in zip(pivots, free):
                r = 1 << p
                for c in cols:
                    if choice & 1:
                        r |= 1 << c
                    choice >>= 1
                rows.append(r)
            bases.append(tuple(rows))
    bases.sort(key=lambda rows: sum(r << (i * n) for i, r in enumerate(rows)))
    return tuple(bases)


def enumerate_subspaces(n: int, l: int, cap: int | None = None) -> list[Subspace]:
    """All l-dim subspaces of GF(2)^n in ascending key order."""
    check_cap(f"subspaces of dim {l} in F2^{n}", gaussian_binomial(n, l), cap)
    return [Subspace(n, b) for b in _subspace_keys(n, l)]


# --------------------------------------------------------------------------
# randomness


class Prng:
    """Seeded stream of random draws; (seed, stream path) fixes every output.

    Backed by numpy's PCG64 seeded through a SeedSequence whose spawn key
    is the stream path, so child streams are independent and reproducible.
    """

    def __init__(self, seed: int, stream: int | tuple[int, ...] = 0):
        if not 0 <= seed < 1 << 64:
            raise ParameterError("seed must be a 64-bit unsigned integer")
        self.seed = seed
        self.path = (stream,) if isinstance(stream, int) else tuple(stream)
        ss = np.random.SeedSequence(seed, spawn_key=self.path)
        self.generator = np.random.Generator(np.random.PCG64(ss))

    @property
    def stream(self) -> int:
        return self.path[-1]

    def child(self, index: int) -> Prng:
        return Prng(self.seed, self.path + (index,))

    def below(self, bound: int) -> int:
        if bound <= 0:
            raise ParameterError("bound must be positive")
        if bound <= 1 << 62:
            return int(self.generator.integers(0, bound))
        while True:
            x = self.bits(bound.bit_length())
            if x < bound:
                return x

    def bits(self, k: int) -> int:
        if k <= 0:
            return 0
        if k <= 62:
            return int(self.generator.integers(0, 1 << k))
        out = 0
        shift = 0
        while shift < k:
            take = min(32, k - shift)
            out |= int(self.generator.integers(0, 1 << take)) << shift
            shift += take
        return out

    def integers(self, low: int, high: int, size: int) -> np.ndarray:
        return self.generator.integers(low, high, size=size, dtype=np.int64)

    def __repr__(self) -> str:
        return f"Prng(seed={self.seed}, path={self.path})"


def sample_vector(prng: Prng, n: int) -> GF2Vector:
    return GF2Vector(n, prng.bits(n))


def sample_matrix(prng: Prng, l: int, n: int) -> GF2Matrix:
    return GF2Matrix.from_int(prng.bits(l * n), l, n)


def sample_subspace(prng: Prng, n: int, l: int) -> Subspace:
    """Uniform l-dim subspace: draw l vectors until they are independent."""
    if not 0 <= l <= n:
        raise ParameterError("need 0 <= l <= n")
    while True:
        vecs = [prng.bits(n) for _ in range(l)]
        if rank_rows(vecs) == l:
            return Subspace.span(n, vecs)


def sample_basis(prng: Prng, n: int) -> Basis:
    """Uniform invertible n x n matrix by rejection."""
    while True:
        rows = [prng.bits(n) for _ in range(n)]
        inv = invert_rows(rows, n)
        if inv is not None:
            return Basis(n, tuple(rows), tuple(inv))
