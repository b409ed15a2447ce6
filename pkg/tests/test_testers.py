import itertools
import json
from fractions import Fraction

import numpy as np
import pytest

from shortcode.errors import ParameterError, PreconditionError, ResourceError
from shortcode.gf2 import GF2Matrix, GF2Tensor, GF2Vector, Prng, Subspace
from shortcode.graphs import GrassmannGraph, enumerate_edges
from shortcode.montecarlo import within_3sigma, Estimate
from shortcode.strategies import GrassmannStrategy, LinearFunctional, ShortcodeStrategy, TensorStrategy
from shortcode.testers import (
    TestKind,
    accept_deg2,
    accept_grassmann,
    accept_unique_deg2,
    accept_unique_deg3,
    grassmann_exact_counts,
    pass_probability,
    tensor_exact_counts,
)

from conftest import span, vec


def test_accept_grassmann_examples():
    F = GrassmannStrategy.from_functional(LinearFunctional(3, 0b110), 2)
    assert accept_grassmann(F, span("110", "011"), span("101", "010"))
    with pytest.raises(PreconditionError):
        accept_grassmann(F, span("110", "011"), span("110", "011"))
    G = GrassmannStrategy.from_table(1, 2, [0, 1, 1])
    assert accept_grassmann(G, span("10"), span("01"))  # l = 1: intersection is {0}


def test_accept_grassmann_detects_disagreement():
    g = GrassmannGraph(2, 3)
    V, W = span("101", "011"), span("101", "010")
    labels = np.zeros(g.num_vertices, dtype=np.int64)
    labels[g.index(V)] = 0b01  # F(V)(101) = 1, F(W)(101) = 0
    F = GrassmannStrategy.from_table(2, 3, labels)
    assert not accept_grassmann(F, V, W)


def _all_mab(l, n):
    for code in range(1 << (l * n)):
        for a in range(1 << l):
            for b in range(1 << n):
                yield GF2Matrix.from_int(code, l, n), GF2Vector(l, a), GF2Vector(n, b)


def test_affine_deg2_identity_exhaustive():
    F = ShortcodeStrategy.affine(2, 2, 0b10, 0b01)
    assert all(accept_deg2(F, M, a, b) for M, a, b in _all_mab(2, 2))


def test_zero_steps_always_pass():
    F = ShortcodeStrategy.from_table(1, 2, [0, 1, 1, 0])
    for M, a, b in _all_mab(1, 2):
        if a.is_zero() or b.is_zero():
            assert accept_deg2(F, M, a, b) and accept_unique_deg2(F, M, a, b)
    C = ShortcodeStrategy.affine(1, 2, 0, 1)
    assert all(accept_unique_deg2(C, M, a, b) for M, a, b in _all_mab(1, 2))


def test_scalar_matches_kernel_counts():
    F = ShortcodeStrategy.from_table(2, 2, Prng(8).integers(0, 4, 16))
    two = sum(accept_deg2(F, M, a, b) for M, a, b in _all_mab(2, 2))
    uni = sum(accept_unique_deg2(F, M, a, b) for M, a, b in _all_mab(2, 2))
    assert pass_probability(F, "deg2").probability == Fraction(two, 256)
    assert pass_probability(F, "unique-deg2").probability == Fraction(uni, 256)


def test_grassmann_counts_match_scalar():
    F = GrassmannStrategy.from_table(2, 4, Prng(9).integers(0, 4, 35))
    passes = sum(accept_grassmann(F, v, w) for v, w in enumerate_edges(F.graph))
    assert grassmann_exact_counts(F) == (passes, 315)


def test_tensor_scalar_matches_kernel():
    F = TensorStrategy.bilinear(1, GF2Vector(2, 0b01), GF2Vector(2, 0b11))
    hits = total = 0
    for code in range(1 << 4):
        T = GF2Tensor((1, 2, 2), code)
        for a, b, c in itertools.product([1], range(4), range(4)):
            total += 1
            hits += accept_unique_deg3(F, T, GF2Vector(1, a), GF2Vector(2, b), GF2Vector(2, c))
    assert pass_probability(F, "unique-deg3").probability == Fraction(hits, total)
    zero_y = TensorStrategy.bilinear(1, GF2Vector(2, 0), GF2Vector(2, 0b11))
    assert pass_probability(zero_y, "unique-deg3").probability == 1


def test_tensor_all_vectors_convention():
    F = TensorStrategy.bilinear(2, GF2Vector(2, 1), GF2Vector(2, 1))
    passes, total = tensor_exact_counts(F, nonzero_a=False)
    assert Fraction(passes, total) == Fraction(13, 16)
    passes, total = tensor_exact_counts(F)
    assert Fraction(passes, total) == Fraction(3, 4)


def test_worked_unique_value():
    F = ShortcodeStrategy.affine(1, 2, vec("10"), 0)
    rep = pass_probability(F, TestKind.UNIQUE_DEG2)
    assert rep.probability == Fraction(3, 4)
    assert rep.to_json()["probability"] == "3/4"


def test_monte_carlo_report_and_jobs():
    F = ShortcodeStrategy.affine(1, 2, vec("10"), 0)
    r1 = pass_probability(F, "unique-deg2", "monte_carlo", 150_000, seed=4, jobs=1)
    r2 = pass_probability(F, "unique-deg2", "monte_carlo", 150_000, seed=4, jobs=2)
    assert r1 == r2
    assert within_3sigma(Estimate(r1.passes, r1.trials, 4), 0.75)
    assert json.dumps(r1.to_json())


def test_errors():
    F = ShortcodeStrategy.affine(1, 2, 0, 0)
    with pytest.raises(ParameterError):
        pass_probability(F, "grassmann")
    with pytest.raises(ParameterError):
        pass_probability(F, "deg2", "monte_carlo")
    with pytest.raises(ResourceError):
        pass_probability(ShortcodeStrategy.affine(3, 8, 0, 0), "deg2")
