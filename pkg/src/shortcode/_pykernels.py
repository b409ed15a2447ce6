"""Vectorized numpy implementations of the hot loops.

Every function here has a twin in ``_ckernels.pyx`` with an identical
signature and bitwise-identical results; ``kernels`` picks one at import.
All integer arrays are ``int64`` and every packed code must fit in 63 bits.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _parity(x: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(x.astype(np.uint64)) & 1).astype(np.int64)


def outer_codes(a: np.ndarray, b: np.ndarray, l: int, n: int) -> np.ndarray:
    """Packed codes of the matrices a b^T."""
    d = np.zeros(len(a), dtype=np.int64)
    for i in range(l):
        d |= ((a >> i) & 1) * (b << (i * n))
    return d


def tensor_outer_codes(a, b, c, l: int, m: int, n: int) -> np.ndarray:
    d = np.zeros(len(a), dtype=np.int64)
    for i in range(l):
        ai = (a >> i) & 1
        for j in range(m):
            d |= (ai & (b >> j) & 1) * (c << ((i * m + j) * n))
    return d


def shortcode_accepts(table, m_codes, a, b, l: int, n: int):
    """(2-to-2 accept, unique accept) per trial for M -> M + a b^T."""
    d = outer_codes(a, b, l, n)
    f1 = table[m_codes]
    f2 = table[m_codes ^ d]
    diff = f1 ^ f2
    unique = diff == 0
    return unique | (diff == a), unique


def tensor_accepts(table, t_codes, a, b, c, l: int, m: int, n: int):
    d = tensor_outer_codes(a, b, c, l, m, n)
    return table[t_codes] == table[t_codes ^ d]


def grassmann_walk(keys, bases, pivots, frees, values, n: int, l: int, vidx, codes):
    """Take one step from each vertex ``vidx`` along neighbor ``codes``.

    A neighbor code in ``[0, 2 (2^l - 1)(2^(n-l) - 1))`` selects a nonzero
    functional c on V (its kernel H is the shared hyperplane), a nonzero
    vector x on V's free columns, and a bit s; the neighbor is
    ``H + <x + s b_p>`` with p the lowest set bit of c.

    Returns ``(neighbor index, accept)`` where accept says whether the two
    stored linear maps in ``values`` agree on H.
    """
    vidx = np.asarray(vidx, dtype=np.int64)
    codes = np.asarray(codes, dtype=np.int64)
    t = len(vidx)
    nfree = (1 << (n - l)) - 1
    s = codes & 1
    rest = codes >> 1
    x = rest % nfree + 1
    c = rest // nfree + 1
    p = np.zeros(t, dtype=np.int64)
    for i in range(l - 1, -1, -1):
        p = np.where((c >> i) & 1, i, p)

    B = bases[vidx]  # (t, l)
    rows_idx = np.arange(t)
    bp = B[rows_idx, p]
    fr = frees[vidx]
    w = np.zeros(t, dtype=np.int64)
    for k in range(n - l):
        w |= ((x >> k) & 1) << fr[:, k]
    w ^= s * bp

    # hyperplane rows h_i = b_i + c_i b_p for i != p; slot p carries w
    cbits = (c[:, None] >> np.arange(l)[None, :]) & 1
    H = B ^ (cbits * bp[:, None])
    R = H.copy()
    R[rows_idx, p] = w

    # batched RREF, pivots leftmost-first
    rank = np.zeros(t, dtype=np.int64)
    ar = np.arange(l)[None, :]
    for col in range(n):
        bit = (R >> col) & 1
        elig = (bit == 1) & (ar >= rank[:, None])
        has = elig.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(elig, axis=1)
        hr = rows_idx[has]
        src = piv[has]
        dst = rank[has]
        a_row = R[hr, src].copy()
        b_row = R[hr, dst].copy()
        R[hr, dst] = a_row
        R[hr, src] = b_row
        prow = np.zeros(t, dtype=np.int64)
        prow[has] = a_row
        bit = (R >> col) & 1
        clear = (bit == 1) & (ar != rank[:, None]) & has[:, None]
        R ^= clear * prow[:, None]
        rank += has

    key = np.zeros(t, dtype=np.int64)
    for i in range(l):
        key |= R[:, i] << (i * n)
    nbr = np.searchsorted(keys, key)

    vv = values[vidx]
    vn = values[nbr]
    pn = pivots[nbr]
    ok = np.ones(t, dtype=bool)
    vp = (vv >> p) & 1
    for i in range(l):
        hi = H[:, i]
        lhs = ((vv >> i) & 1) ^ (cbits[:, i] & vp)
        coord = np.zeros(t, dtype=np.int64)
        for k in range(l):
            coord |= ((hi >> pn[:, k]) & 1) << k
        rhs = _parity(vn & coord)
        ok &= (lhs == rhs) | (p == i)
    return nbr, ok
