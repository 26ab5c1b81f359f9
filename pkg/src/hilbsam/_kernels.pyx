# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see _kernels_py for the contracts."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t, uint8_t, INT64_MIN

cnp.import_array()


cdef inline bint _next_composition(int64_t* m, int k):
    # descending-lex successor of a composition; False after the last one
    cdef int i = k - 2
    cdef int j
    cdef int64_t tail = 0
    while i >= 0 and m[i] == 0:
        i -= 1
    if i < 0:
        return False
    for j in range(i + 1, k):
        tail += m[j]
    m[i] -= 1
    for j in range(i + 1, k):
        m[j] = 0
    m[i + 1] = tail + 1
    return True


def superadditive_scan(offsets, degrees, values, long max_degree):
    cdef int64_t[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef int64_t[::1] deg = np.ascontiguousarray(degrees, dtype=np.int64)
    cdef int64_t[::1] val = np.ascontiguousarray(values, dtype=np.int64)
    cdef Py_ssize_t count = off.shape[0]
    cdef Py_ssize_t a, b
    cdef int64_t va
    for a in range(count):
        if deg[a] + deg[a] > max_degree:
            break
        va = val[off[a]]
        for b in range(a, count):
            if deg[a] + deg[b] > max_degree:
                break
            if va + val[off[b]] > val[off[a] + off[b]]:
                return a, b
    return -1, -1


def count_standard(gens, int k, long n):
    cdef int64_t[:, ::1] g = np.ascontiguousarray(np.asarray(gens, dtype=np.int64).reshape(-1, k))
    cdef Py_ssize_t ng = g.shape[0]
    cdef int64_t* m = <int64_t*> malloc(k * sizeof(int64_t))
    cdef long count = 0
    cdef Py_ssize_t r
    cdef int i
    cdef bint divisible
    if m == NULL:
        raise MemoryError()
    try:
        for i in range(k):
            m[i] = 0
        m[0] = n
        while True:
            divisible = False
            for r in range(ng):
                divisible = True
                for i in range(k):
                    if g[r, i] > m[i]:
                        divisible = False
                        break
                if divisible:
                    break
            if not divisible:
                count += 1
            if k == 1 or not _next_composition(m, k):
                break
    finally:
        free(m)
    return count


def polytope_slice_sum(points, neg_inf, int k, long n):
    cdef int64_t[:, ::1] p = np.ascontiguousarray(np.asarray(points, dtype=np.int64).reshape(-1, k))
    cdef uint8_t[:, ::1] mask = np.ascontiguousarray(np.asarray(neg_inf, dtype=np.uint8).reshape(-1, k))
    cdef Py_ssize_t npts = p.shape[0]
    cdef int64_t* m = <int64_t*> malloc(k * sizeof(int64_t))
    cdef int64_t best, v
    cdef bint ok, found
    cdef Py_ssize_t r
    cdef int i
    cdef object total = 0
    cdef int64_t partial = 0
    cdef long undefined = 0
    cdef long chunk = 0
    if m == NULL:
        raise MemoryError()
    try:
        for i in range(k):
            m[i] = 0
        m[0] = n
        while True:
            found = False
            best = INT64_MIN
            for r in range(npts):
                ok = True
                v = 0
                for i in range(k):
                    if m[i] > 0:
                        if mask[r, i]:
                            ok = False
                            break
                        v += p[r, i] * m[i]
                if ok and (not found or v > best):
                    best = v
                    found = True
            if found:
                partial += best
                chunk += 1
                if chunk == 1024:
                    total += partial
                    partial = 0
                    chunk = 0
            else:
                undefined += 1
            if k == 1 or not _next_composition(m, k):
                break
    finally:
        free(m)
    total += partial
    return total, undefined
