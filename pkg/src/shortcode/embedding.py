"""The map phi_B from V_l(B) (a part of G(l, n)) onto S_{l, n-l}.

Everything is computed in B-coordinates: a vector x has coordinates
``y = x C`` with ``C = B^{-1}``, so ``x = y B``.  In those coordinates a
member V of V_l(B) has RREF pivots exactly at columns 0..l-1; its RREF
rows are the canonical basis (e_i, m_i) and the tails m_i are the rows of
phi(V).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .errors import DomainError, ParameterError, PreconditionError
from .gf2 import Basis, GF2Matrix, GF2Vector, Subspace, parity
from .graphs import GrassmannGraph, ShortcodeGraph, grassmann_adjacent, shortcode_adjacent
from .nicesets import NiceSetGrassmann, NiceSetShortcode
from .strategies import GrassmannStrategy, LinearFunctional, ShortcodeStrategy, eval_grassmann


@dataclass(frozen=True)
class CanonicalBasis:
    """v_1..v_l in B-coordinates, with head(v_i) = e_i."""

    l: int
    n: int
    vectors: tuple[int, ...]

    def tails(self) -> tuple[int, ...]:
        return tuple(v >> self.l for v in self.vectors)


@dataclass
class HomomorphismReport:
    l: int
    n: int
    basis_rows: tuple[int, ...]
    members: int
    image_size: int
    injective: bool
    pairs: int
    violations: list[tuple[Subspace, Subspace]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.injective and self.image_size == 1 << (self.l * (self.n - self.l)) and not self.violations


class Embedding:
    def __init__(self, l: int, n: int, basis: Basis | None = None):
        if not 0 < l < n:
            raise ParameterError(f"embedding needs 0 < l < n, got l={l}, n={n}")
        basis = Basis.standard(n) if basis is None else basis
        if basis.ambient != n:
            raise ParameterError("basis ambient dimension differs from n")
        # B C = I is part of the contract
        if basis.matrix().matmul(GF2Matrix(n, n, basis.inverse)) != GF2Matrix.identity(n):
            raise DomainError("cached inverse does not invert the basis")
        self.l, self.n, self.basis = l, n, basis
        self.head_mask = (1 << l) - 1
        self.C_head = tuple(r & self.head_mask for r in basis.inverse)

    @property
    def k(self) -> int:
        return self.n - self.l

    def to_b(self, x: int) -> int:
        return self.basis.to_coords(x)

    def from_b(self, y: int) -> int:
        return self.basis.from_coords(y)

    def _b_rref(self, v: Subspace) -> tuple[list[int], list[int]]:
        if v.ambient != self.n:
            raise ParameterError("subspace ambient dimension differs from n")
        return gf2.rref_rows([self.to_b(r) for r in v.basis], self.n)

    def in_vl_b(self, v: Subspace) -> bool:
        if v.dim != self.l:
            raise ParameterError(f"{v} has dimension {v.dim}, expected {self.l}")
        heads = [self.to_b(r) & self.head_mask for r in v.basis]
        return gf2.rank_rows(heads) == self.l

    def canonical_basis(self, v: Subspace) -> CanonicalBasis:
        if v.dim != self.l:
            raise ParameterError(f"{v} has dimension {v.dim}, expected {self.l}")
        rows, pivots = self._b_rref(v)
        if pivots != list(range(self.l)):
            raise DomainError(f"{v} is not in V_l(B)")
        return CanonicalBasis(self.l, self.n, tuple(rows))

    def phi(self, v: Subspace) -> GF2Matrix:
        return GF2Matrix(self.l, self.k, self.canonical_basis(v).tails())

    def phi_inverse(self, m: GF2Matrix) -> Subspace:
        if m.shape != (self.l, self.k):
            raise ParameterError(f"expected an {self.l}x{self.k} matrix")
        return Subspace.span(self.n, [self.from_b((1 << i) | (row << self.l)) for i, row in enumerate(m.rows)])

    def members(self, cap: int | None = None) -> list[Subspace]:
        """V_l(B) in the order of the matrix codes of their images."""
        count = 1 << (self.l * self.k)
        gf2.check_cap("members of V_l(B)", count, cap)
        return [self.phi_inverse(GF2Matrix.from_int(c, self.l, self.k)) for c in range(count)]

    def membership_mask(self, cap: int | None = None) -> np.ndarray:
        """Which vertices of G(l, n) lie in V_l(B)."""
        tab = GrassmannGraph(self.l, self.n).tables(cap)
        heads = np.zeros((tab.size, self.l), dtype=np.int64)
        for i in range(self.l):
            col = tab.bases[:, i]
            for k, c in enumerate(self.C_head):
                heads[:, i] ^= ((col >> k) & 1) * c
        return np.array([gf2.rank_rows(h.tolist()) == self.l for h in heads], dtype=bool)

    # ------------------------------------------------------------------
    # checks

    def verify_homomorphism(self, cap: int | None = None) -> HomomorphismReport:
        """Check V ~ V' iff phi(V) ~ phi(V') over every pair in V_l(B)."""
        g = GrassmannGraph(self.l, self.n)
        gf2.check_cap(f"vertices of G({self.l},{self.n})", g.num_vertices, cap)
        inside = [v for v in g.tables(cap=1 << 62).subspaces if self.in_vl_b(v)]
        images = [self.phi(v) for v in inside]
        codes = {m.encode() for m in images}
        report = HomomorphismReport(
            self.l, self.n, self.basis.rows, len(inside), len(codes), len(codes) == len(inside), 0
        )
        for (v1, m1), (v2, m2) in itertools.combinations(zip(inside, images), 2):
            report.pairs += 1
            if grassmann_adjacent(v1, v2) != shortcode_adjacent(m1, m2):
                report.violations.append((v1, v2))
        return report

    # ------------------------------------------------------------------
    # nice sets

    def dual_to_b(self, w: int) -> int:
        """Functional x -> <x, w> written on B-coordinates: w'_k = <B_k, w>."""
        return sum(parity(row & w) << k for k, row in enumerate(self.basis.rows))

    def dual_from_b(self, wb: int) -> int:
        return sum(parity(row & wb) << k for k, row in enumerate(self.basis.inverse))

    def map_nice_set(self, S: NiceSetGrassmann) -> NiceSetShortcode:
        """Constraints on phi(V) equivalent to Q <= V <= W for V in V_l(B).

        Zoom-in generators q give left constraints head(q)^T M = tail(q)^T;
        each functional w vanishing on W gives the right constraint
        M tail(w') = head(w').
        """
        if (S.l, S.n) != (self.l, self.n):
            raise ParameterError("nice set parameters differ from the embedding")
        left = []
        for q in S.Q.basis:
            y = self.to_b(q)
            left.append((y & self.head_mask, y >> self.l))
        right = []
        for w in S.W.annihilator().basis:
            wb = self.dual_to_b(w)
            right.append((wb >> self.l, wb & self.head_mask))
        return NiceSetShortcode(self.l, self.k, tuple(right), tuple(left))

    def pull_nice_set(self, T: NiceSetShortcode) -> NiceSetGrassmann:
        """(Q, W) with phi^{-1}(T) = {Q <= V <= W} within V_l(B)."""
        if (T.l, T.n) != (self.l, self.k):
            raise ParameterError("nice set shape differs from the embedding's Mat_{l,n-l}")
        Q = Subspace.span(self.n, [self.from_b(r | (s << self.l)) for r, s in T.left])
        w_perp = [self.dual_from_b(t | (q << self.l)) for q, t in T.right]
        return NiceSetGrassmann.from_dual(self.l, self.n, Q, w_perp)

    # ------------------------------------------------------------------
    # strategy transfer

    def transfer_strategy_to_shortcode(self, F: GrassmannStrategy) -> ShortcodeStrategy:
        """G(phi(V)) = (F(V)(v_1), ..., F(V)(v_l)) on the canonical basis."""
        if (F.l, F.n) != (self.l, self.n):
            raise ParameterError("strategy parameters differ from the embedding")
        if F.backing == "rowfn":
            g = self.dual_to_b(F.f.coeffs)
            return ShortcodeStrategy.affine(self.l, self.k, g >> self.l, g & self.head_mask)
        count = 1 << (self.l * self.k)
        gf2.check_cap("vertices of the shortcode image", count, None)
        labels = np.zeros(count, dtype=np.int64)
        for code in range(count):
            m = GF2Matrix.from_int(code, self.l, self.k)
            v = self.phi_inverse(m)
            lab = 0
            for i, row in enumerate(m.rows):
                x = self.from_b((1 << i) | (row << self.l))
                lab |= eval_grassmann(F, v, x) << i
            labels[code] = lab
        return ShortcodeStrategy.from_table(self.l, self.k, labels)

    def transfer_affine_to_grassmann(self, H: ShortcodeStrategy) -> GrassmannStrategy:
        """F_f with f(v_i) = u_i + <tail(v_i), z> on every canonical basis.

        On B-coordinates f has head u and tail z, which pins it down on all
        of F2^n; no free extension is left to choose.
        """
        if (H.l, H.n) != (self.l, self.k):
            raise ParameterError("strategy shape differs from Mat_{l,n-l}")
        pair = H.affine_pair()
        if pair is None:
            raise PreconditionError("transfer needs an affine-backed shortcode strategy")
        z, u = pair
        coeffs = self.dual_from_b(u | (z << self.l))
        return GrassmannStrategy.from_functional(LinearFunctional(self.n, coeffs), self.l)


def projection_fraction(l: int, n: int):
    """|V_l(B)| / |V_l| as an exact fraction."""
    from fractions import Fraction

    return Fraction(1 << (l * (n - l)), gf2.gaussian_binomial(n, l))
