# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the loops in ``_pykernels``; same signatures, same bits."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

BACKEND = "cython"


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline int64_t _outer(int64_t a, int64_t b, int l, int n) nogil:
    cdef int64_t d = 0
    cdef int i
    for i in range(l):
        if (a >> i) & 1:
            d |= b << (i * n)
    return d


cdef inline int64_t _touter(int64_t a, int64_t b, int64_t c, int l, int m, int n) nogil:
    cdef int64_t d = 0
    cdef int i, j
    for i in range(l):
        if (a >> i) & 1:
            for j in range(m):
                if (b >> j) & 1:
                    d |= c << ((i * m + j) * n)
    return d


def outer_codes(a, b, int l, int n):
    cdef const int64_t[:] av = np.ascontiguousarray(a, dtype=np.int64)
    cdef const int64_t[:] bv = np.ascontiguousarray(b, dtype=np.int64)
    cdef Py_ssize_t t = av.shape[0], k
    out = np.empty(t, dtype=np.int64)
    cdef int64_t[:] ov = out
    with nogil:
        for k in range(t):
            ov[k] = _outer(av[k], bv[k], l, n)
    return out


def tensor_outer_codes(a, b, c, int l, int m, int n):
    cdef const int64_t[:] av = np.ascontiguousarray(a, dtype=np.int64)
    cdef const int64_t[:] bv = np.ascontiguousarray(b, dtype=np.int64)
    cdef const int64_t[:] cv = np.ascontiguousarray(c, dtype=np.int64)
    cdef Py_ssize_t t = av.shape[0], k
    out = np.empty(t, dtype=np.int64)
    cdef int64_t[:] ov = out
    with nogil:
        for k in range(t):
            ov[k] = _touter(av[k], bv[k], cv[k], l, m, n)
    return out


def shortcode_accepts(table, m_codes, a, b, int l, int n):
    cdef const int64_t[:] tv = np.ascontiguousarray(table, dtype=np.int64)
    cdef const int64_t[:] mv = np.ascontiguousarray(m_codes, dtype=np.int64)
    cdef const int64_t[:] av = np.ascontiguousarray(a, dtype=np.int64)
    cdef const int64_t[:] bv = np.ascontiguousarray(b, dtype=np.int64)
    cdef Py_ssize_t t = mv.shape[0], k
    two = np.empty(t, dtype=np.bool_)
    uni = np.empty(t, dtype=np.bool_)
    cdef cnp.npy_bool[:] twov = two
    cdef cnp.npy_bool[:] univ = uni
    cdef int64_t diff
    with nogil:
        for k in range(t):
            diff = tv[mv[k]] ^ tv[mv[k] ^ _outer(av[k], bv[k], l, n)]
            univ[k] = diff == 0
            twov[k] = diff == 0 or diff == av[k]
    return two, uni


def tensor_accepts(table, t_codes, a, b, c, int l, int m, int n):
    cdef const int64_t[:] tv = np.ascontiguousarray(table, dtype=np.int64)
    cdef const int64_t[:] xv = np.ascontiguousarray(t_codes, dtype=np.int64)
    cdef const int64_t[:] av = np.ascontiguousarray(a, dtype=np.int64)
    cdef const int64_t[:] bv = np.ascontiguousarray(b, dtype=np.int64)
    cdef const int64_t[:] cv = np.ascontiguousarray(c, dtype=np.int64)
    cdef Py_ssize_t t = xv.shape[0], k
    uni = np.empty(t, dtype=np.bool_)
    cdef cnp.npy_bool[:] univ = uni
    with nogil:
        for k in range(t):
            univ[k] = tv[xv[k]] == tv[xv[k] ^ _touter(av[k], bv[k], cv[k], l, m, n)]
    return uni


cdef inline Py_ssize_t _bsearch(const int64_t[:] keys, int64_t key) nogil:
    cdef Py_ssize_t lo = 0, hi = keys.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if keys[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    return lo


def grassmann_walk(keys, bases, pivots, frees, values, int n, int l, vidx, codes):
    cdef const int64_t[:] kv = np.ascontiguousarray(keys, dtype=np.int64)
    cdef const int64_t[:, :] bv = np.ascontiguousarray(bases, dtype=np.int64)
    cdef const int64_t[:, :] pv = np.ascontiguousarray(pivots, dtype=np.int64)
    cdef const int64_t[:, :] fv = np.ascontiguousarray(frees, dtype=np.int64)
    cdef const int64_t[:] valv = np.ascontiguousarray(values, dtype=np.int64)
    cdef const int64_t[:] vi = np.ascontiguousarray(vidx, dtype=np.int64)
    cdef const int64_t[:] cv = np.ascontiguousarray(codes, dtype=np.int64)
    cdef Py_ssize_t t = vi.shape[0], trial
    nbr_out = np.empty(t, dtype=np.int64)
    ok_out = np.empty(t, dtype=np.bool_)
    cdef int64_t[:] nbrv = nbr_out
    cdef cnp.npy_bool[:] okv = ok_out
    cdef int64_t nfree = (<int64_t>1 << (n - l)) - 1
    cdef int64_t code, x, c, s, w, bp, key, tmp, hv, coord, vv, vn
    cdef int64_t H[64]
    cdef int64_t R[64]
    cdef int i, j, k, p, col, rank, found, ok
    cdef Py_ssize_t v, nb
    with nogil:
        for trial in range(t):
            v = vi[trial]
            code = cv[trial]
            s = code & 1
            x = (code >> 1) % nfree + 1
            c = (code >> 1) // nfree + 1
            p = 0
            while not ((c >> p) & 1):
                p += 1
            bp = bv[v, p]
            w = 0
            for k in range(n - l):
                if (x >> k) & 1:
                    w |= <int64_t>1 << fv[v, k]
            if s:
                w ^= bp
            for i in range(l):
                H[i] = bv[v, i]
                if (c >> i) & 1:
                    H[i] ^= bp
                R[i] = H[i]
            R[p] = w
            rank = 0
            for col in range(n):
                found = -1
                for j in range(rank, l):
                    if (R[j] >> col) & 1:
                        found = j
                        break
                if found < 0:
                    continue
                tmp = R[found]
                R[found] = R[rank]
                R[rank] = tmp
                for j in range(l):
                    if j != rank and (R[j] >> col) & 1:
                        R[j] ^= tmp
                rank += 1
            key = 0
            for i in range(l):
                key |= R[i] << (i * n)
            nb = _bsearch(kv, key)
            nbrv[trial] = nb
            vv = valv[v]
            vn = valv[nb]
            ok = 1
            for i in range(l):
                if i == p:
                    continue
                hv = ((vv >> i) & 1) ^ (((c >> i) & 1) & ((vv >> p) & 1))
                coord = 0
                for k in range(l):
                    coord |= ((H[i] >> pv[nb, k]) & 1) << k
                if hv != (__builtin_popcountll(<unsigned long long>(vn & coord)) & 1):
                    ok = 0
                    break
            okv[trial] = ok
    return nbr_out, ok_out
