"""Nice sets: zoom-in/zoom-out families in G(l, n), affine constraint sets in S_{l,n}."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import gf2
from .errors import FormatError, ParameterError
from .gf2 import GF2Matrix, GF2Vector, Prng, Subspace, bits_to_str, parity
from .graphs import GrassmannGraph, ShortcodeGraph


def _parity_array(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x.astype(np.uint64)) & 1


@dataclass(frozen=True)
class NiceSetGrassmann:
    """All l-dim V with Q <= V <= W."""

    l: int
    n: int
    Q: Subspace
    W: Subspace

    def __post_init__(self):
        if self.Q.ambient != self.n or self.W.ambient != self.n:
            raise ParameterError("Q and W must live in F2^n")

    @classmethod
    def everything(cls, l: int, n: int) -> NiceSetGrassmann:
        return cls(l, n, Subspace.zero(n), Subspace.full(n))

    @classmethod
    def from_dual(cls, l: int, n: int, Q: Subspace, w_perp: list[int]) -> NiceSetGrassmann:
        """W given as the common kernel of the functionals in ``w_perp``."""
        return cls(l, n, Q, Subspace.span(n, w_perp).annihilator())

    @property
    def r1(self) -> int:
        return self.Q.dim

    @property
    def r2(self) -> int:
        return self.n - self.W.dim

    @property
    def r(self) -> int:
        return self.r1 + self.r2

    @property
    def is_empty(self) -> bool:
        return not self.W.contains_subspace(self.Q) or not 0 <= self.l - self.r1 <= self.W.dim - self.Q.dim

    def __contains__(self, v: Subspace) -> bool:
        return v.dim == self.l and v.contains_subspace(self.Q) and self.W.contains_subspace(v)

    def size(self) -> int:
        if self.is_empty:
            return 0
        return gf2.gaussian_binomial(self.W.dim - self.Q.dim, self.l - self.r1)

    def _complement(self) -> list[int]:
        """Vectors extending a basis of Q to a basis of W."""
        red, piv = list(self.Q.basis), list(self.Q.pivots)
        out = []
        for w in self.W.basis:
            x = w
            for r, p in zip(red, piv):
                if (x >> p) & 1:
                    x ^= r
            if x:
                out.append(w)
                red, piv = gf2.rref_rows(red + [x], self.n)
        return out

    def members(self, cap: int | None = None) -> list[Subspace]:
        """Enumerate through the quotient W/Q."""
        if self.is_empty:
            return []
        gf2.check_cap("members of a Grassmann nice set", self.size(), cap)
        comp = self._complement()
        k = self.l - self.r1
        out = []
        for u in gf2.enumerate_subspaces(len(comp), k, cap=1 << 62):
            lifted = [gf2._vecmat(row, comp) for row in u.basis]
            out.append(Subspace.span(self.n, list(self.Q.basis) + lifted))
        return out

    def sample(self, prng: Prng) -> Subspace:
        """Uniform member: a uniform subspace of W/Q, lifted."""
        if self.is_empty:
            raise ParameterError("cannot sample an empty nice set")
        comp = self._complement()
        u = gf2.sample_subspace(prng, len(comp), self.l - self.r1)
        lifted = [gf2._vecmat(row, comp) for row in u.basis]
        return Subspace.span(self.n, list(self.Q.basis) + lifted)

    def mask(self, graph: GrassmannGraph) -> np.ndarray:
        tab = graph.tables()
        ok = np.ones(tab.size, dtype=bool)
        for w in self.W.annihilator().basis:
            for i in range(self.l):
                ok &= _parity_array(tab.bases[:, i] & w) == 0
        for q in self.Q.basis:
            recon = np.zeros(tab.size, dtype=np.int64)
            for i in range(self.l):
                recon ^= ((q >> tab.pivots[:, i]) & 1) * tab.bases[:, i]
            ok &= recon == q
        return ok

    def __str__(self) -> str:
        q = ";".join(bits_to_str(r, self.n) for r in self.Q.basis)
        w = ";".join(bits_to_str(r, self.n) for r in self.W.annihilator().basis)
        return f"Q={q},Wperp={w}"

    @classmethod
    def parse(cls, text: str, l: int, n: int) -> NiceSetGrassmann:
        """``Q=<rows>,W=<rows>`` or ``Q=<rows>,Wperp=<rows>``; rows joined by ';'."""
        Q, W = Subspace.zero(n), Subspace.full(n)
        text = text.strip()
        if text in ("", "all"):
            return cls(l, n, Q, W)
        for item in text.split(","):
            key, sep, val = item.partition("=")
            key = key.strip()
            rows = [GF2Vector.parse(r, n).bits for r in val.split(";") if r.strip()] if sep else []
            if not sep or key not in ("Q", "W", "Wperp"):
                raise FormatError(f"bad Grassmann nice-set item {item!r}")
            if key == "Q":
                Q = Subspace.span(n, rows)
            elif key == "W":
                W = Subspace.span(n, rows)
            else:
                W = Subspace.span(n, rows).annihilator()
        return cls(l, n, Q, W)


@dataclass(frozen=True)
class NiceSetShortcode:
    """Matrices with M q_i = t_i (right) and r_j^T M = s_j^T (left)."""

    l: int
    n: int
    right: tuple[tuple[int, int], ...] = ()
    left: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for q, t in self.right:
            if q >> self.n or t >> self.l or q < 0 or t < 0:
                raise ParameterError("right constraint (q, t) needs q in F2^n, t in F2^l")
        for r, s in self.left:
            if r >> self.l or s >> self.n or r < 0 or s < 0:
                raise ParameterError("left constraint (r, s) needs r in F2^l, s in F2^n")

    @property
    def r(self) -> int:
        return len(self.right) + len(self.left)

    def equations(self) -> list[tuple[int, int]]:
        """Constraints as linear equations on the packed code of M."""
        l, n = self.l, self.n
        eqs = []
        for q, t in self.right:
            for i in range(l):
                eqs.append((q << (i * n), (t >> i) & 1))
        for r, s in self.left:
            for k in range(n):
                coeff = 0
                for i in range(l):
                    if (r >> i) & 1:
                        coeff |= 1 << (i * n + k)
                eqs.append((coeff, (s >> k) & 1))
        return eqs

    def incompatible_pairs(self) -> list[tuple[int, int]]:
        """Index pairs (left j, right i) violating r_j^T t_i = s_j^T q_i."""
        return [
            (j, i)
            for j, (r, s) in enumerate(self.left)
            for i, (q, t) in enumerate(self.right)
            if parity(r & t) != parity(s & q)
        ]

    def solution(self) -> tuple[int, list[int]] | None:
        return gf2.solve_affine(self.equations(), self.l * self.n)

    @property
    def is_empty(self) -> bool:
        return self.solution() is None

    def is_independent(self) -> bool:
        return (
            gf2.rank_rows([q for q, _ in self.right]) == len(self.right)
            and gf2.rank_rows([r for r, _ in self.left]) == len(self.left)
        )

    def size(self) -> int:
        sol = self.solution()
        return 0 if sol is None else 1 << len(sol[1])

    def affine_key(self) -> tuple | None:
        """Canonical (particular, kernel RREF) form of the member set."""
        sol = self.solution()
        if sol is None:
            return None
        part, ker = sol
        red, piv = gf2.rref_rows(ker, self.l * self.n)
        for row, p in zip(red, piv):
            if (part >> p) & 1:
                part ^= row
        return part, tuple(red)

    def members(self, cap: int | None = None) -> np.ndarray:
        sol = self.solution()
        if sol is None:
            return np.zeros(0, dtype=np.int64)
        part, ker = sol
        gf2.check_cap("members of a shortcode nice set", 1 << len(ker), cap)
        return np.array(sorted(part ^ x for x in gf2.span_elements(ker)), dtype=np.int64)

    def sample(self, prng: Prng) -> GF2Matrix:
        sol = self.solution()
        if sol is None:
            raise ParameterError("cannot sample an empty nice set")
        part, ker = sol
        pick = prng.bits(len(ker))
        return GF2Matrix.from_int(part ^ gf2._vecmat(pick, ker), self.l, self.n)

    def __contains__(self, m: GF2Matrix) -> bool:
        return all(m.apply(GF2Vector(self.n, q)).bits == t for q, t in self.right) and all(
            m.left_apply(GF2Vector(self.l, r)).bits == s for r, s in self.left
        )

    def mask(self, graph: ShortcodeGraph | None = None) -> np.ndarray:
        codes = np.arange(1 << (self.l * self.n), dtype=np.int64)
        ok = np.ones(len(codes), dtype=bool)
        for coeff, rhs in self.equations():
            ok &= _parity_array(codes & coeff) == rhs
        return ok

    def canonical(self) -> NiceSetShortcode:
        """Reduce each constraint list to RREF on its augmented rows, dropping redundancy."""
        def reduce(pairs, head_bits, tail_bits):
            aug = [h | (t << head_bits) for h, t in pairs]
            red, piv = gf2.rref_rows(aug, head_bits + tail_bits)
            return tuple((row & ((1 << head_bits) - 1), row >> head_bits) for row in red)

        return NiceSetShortcode(
            self.l, self.n, reduce(self.right, self.n, self.l), reduce(self.left, self.l, self.n)
        )

    def __str__(self) -> str:
        items = [f"R:{bits_to_str(q, self.n)}/{bits_to_str(t, self.l)}" for q, t in self.right]
        items += [f"L:{bits_to_str(r, self.l)}/{bits_to_str(s, self.n)}" for r, s in self.left]
        return ",".join(items) or "all"

    def to_json(self) -> dict:
        return {
            "right": [[bits_to_str(q, self.n), bits_to_str(t, self.l)] for q, t in self.right],
            "left": [[bits_to_str(r, self.l), bits_to_str(s, self.n)] for r, s in self.left],
        }

    @classmethod
    def parse(cls, text: str, l: int, n: int) -> NiceSetShortcode:
        """``R:q/t,L:r/s,...`` (``all`` or empty for no constraints)."""
        right, left = [], []
        text = text.strip()
        if text in ("", "all"):
            return cls(l, n)
        for item in text.split(","):
            side, sep, rest = item.strip().partition(":")
            a, sep2, b = rest.partition("/")
            if not sep or not sep2 or side not in ("R", "L"):
                raise FormatError(f"bad constraint {item!r}")
            if side == "R":
                right.append((GF2Vector.parse(a, n).bits, GF2Vector.parse(b, l).bits))
            else:
                left.append((GF2Vector.parse(a, l).bits, GF2Vector.parse(b, n).bits))
        return cls(l, n, tuple(right), tuple(left))


def enumerate_shortcode_nice_sets(l: int, n: int, r_max: int) -> Iterator[NiceSetShortcode]:
    """Nonempty nice sets with at most r_max constraints, each member set once.

    Constraint lists are canonical (RREF generators, every value
    assignment); sets come in order of increasing r so the first
    description of a member set uses the fewest constraints.
    """
    seen = set()
    for r in range(r_max + 1):
        for k in range(min(r, n) + 1):
            kl = r - k
            if kl > l:
                continue
            for qs in gf2.enumerate_subspaces(n, k, cap=1 << 62):
                for rs in gf2.enumerate_subspaces(l, kl, cap=1 << 62):
                    for tv in range(1 << (l * k)):
                        right = tuple((q, (tv >> (l * i)) & ((1 << l) - 1)) for i, q in enumerate(qs.basis))
                        for sv in range(1 << (n * kl)):
                            left = tuple(
                                (rr, (sv >> (n * j)) & ((1 << n) - 1)) for j, rr in enumerate(rs.basis)
                            )
                            T = NiceSetShortcode(l, n, right, left)
                            if T.incompatible_pairs():
                                continue
                            key = T.affine_key()
                            if key is None or key in seen:
                                continue
                            seen.add(key)
                            yield T


def enumerate_grassmann_nice_sets(l: int, n: int, r_max: int) -> Iterator[NiceSetGrassmann]:
    """Nice sets (Q, W) with r1 + r2 <= r_max and Q <= W, in increasing r."""
    for r in range(r_max + 1):
        for r1 in range(min(r, l) + 1):
            r2 = r - r1
            if r2 > n:
                continue
            for Q in gf2.enumerate_subspaces(n, r1, cap=1 << 62):
                for Wp in gf2.enumerate_subspaces(n, r2, cap=1 << 62):
                    W = Wp.annihilator()
                    if W.contains_subspace(Q):
                        yield NiceSetGrassmann(l, n, Q, W)
