# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops; see ``_kernels_py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY

cnp.import_array()

ctypedef cnp.float64_t f64
ctypedef cnp.int64_t i64


def greedy_net(const f64[:, ::1] D, order, double r):
    cdef const i64[::1] od = np.ascontiguousarray(order, dtype=np.int64)
    cdef Py_ssize_t n = D.shape[0], m = od.shape[0], t, i, q
    cdef f64[::1] mind = np.full(n, INFINITY)
    out = np.empty(m, dtype=np.int64)
    cdef i64[::1] mem = out
    cdef Py_ssize_t cnt = 0
    for t in range(m):
        i = od[t]
        if mind[i] >= r:
            mem[cnt] = i
            cnt += 1
            for q in range(n):
                if D[i, q] < mind[q]:
                    mind[q] = D[i, q]
    return out[:cnt].copy()


def farthest_order(const f64[:, ::1] D, Py_ssize_t start=0):
    cdef Py_ssize_t n = D.shape[0], t, q, best
    out = np.empty(n, dtype=np.int64)
    if n == 0:
        return out
    cdef i64[::1] o = out
    cdef f64[::1] mind = np.empty(n)
    cdef cnp.uint8_t[::1] taken = np.zeros(n, dtype=np.uint8)
    cdef double bv
    for q in range(n):
        mind[q] = D[start, q]
    o[0] = start
    taken[start] = 1
    for t in range(1, n):
        best = -1
        bv = -1.0
        for q in range(n):
            if not taken[q] and mind[q] > bv:
                bv = mind[q]
                best = q
        o[t] = best
        taken[best] = 1
        for q in range(n):
            if D[best, q] < mind[q]:
                mind[q] = D[best, q]
    return out


cdef Py_ssize_t _fp_cover(const f64[:, ::1] D, const i64[::1] sub, Py_ssize_t m,
                          double r, f64[::1] mind) nogil:
    cdef Py_ssize_t t, best, count = 1, s0
    cdef double bv, v
    if m == 0:
        return 0
    s0 = sub[0]
    for t in range(m):
        mind[t] = D[s0, sub[t]]
    while True:
        best = 0
        bv = mind[0]
        for t in range(1, m):
            if mind[t] > bv:
                bv = mind[t]
                best = t
        if bv <= r:
            return count
        s0 = sub[best]
        for t in range(m):
            v = D[s0, sub[t]]
            if v < mind[t]:
                mind[t] = v
        count += 1


def fp_cover_count(const f64[:, ::1] D, subset, double r):
    cdef const i64[::1] sub = np.ascontiguousarray(subset, dtype=np.int64)
    cdef f64[::1] mind = np.empty(max(sub.shape[0], 1))
    return int(_fp_cover(D, sub, sub.shape[0], r, mind))


def sup_ball_cover(const f64[:, ::1] D, double ball_radius, double cover_radius):
    cdef Py_ssize_t n = D.shape[0], x, q, m, c, best = 0, arg = -1
    cdef i64[::1] sub = np.empty(max(n, 1), dtype=np.int64)
    cdef f64[::1] mind = np.empty(max(n, 1))
    with nogil:
        for x in range(n):
            m = 0
            for q in range(n):
                if D[x, q] <= ball_radius:
                    sub[m] = q
                    m += 1
            c = _fp_cover(D, sub, m, cover_radius, mind)
            if c > best:
                best = c
                arg = x
    return int(best), int(arg)


def greedy_coloring(const f64[:, ::1] D, members, double sep):
    cdef const i64[::1] mem = np.ascontiguousarray(members, dtype=np.int64)
    cdef Py_ssize_t m = mem.shape[0], t, s, c
    out = np.zeros(m, dtype=np.int64)
    cdef i64[::1] col = out
    # used[c] == t marks color c as taken for member t
    cdef i64[::1] used = np.full(m + 2, -1, dtype=np.int64)
    for t in range(m):
        for s in range(t):
            if D[mem[t], mem[s]] <= sep:
                used[col[s]] = t
        c = 1
        while used[c] == t:
            c += 1
        col[t] = c
    return out


def pair_distances(const f64[:, ::1] X):
    cdef Py_ssize_t n = X.shape[0], w = X.shape[1], i, j, q, pos = 0
    out = np.empty(n * (n - 1) // 2)
    cdef f64[::1] o = out
    cdef double acc, d
    with nogil:
        for i in range(n - 1):
            for j in range(i + 1, n):
                acc = 0.0
                for q in range(w):
                    d = X[j, q] - X[i, q]
                    acc += d * d
                o[pos] = sqrt(acc)
                pos += 1
    return out


def triangle_violation(const f64[:, ::1] D, double tol):
    cdef Py_ssize_t n = D.shape[0], i, j, k
    cdef double dik, ex
    cdef Py_ssize_t bi = -1, bj = -1, bk = -1
    cdef double bex = 0.0
    with nogil:
        for k in range(n):
            for i in range(n):
                dik = D[i, k]
                for j in range(n):
                    ex = D[i, j] - (dik + D[k, j])
                    if ex > tol:
                        bi = i
                        bj = j
                        bk = k
                        bex = ex
                        break
                if bi >= 0:
                    break
            if bi >= 0:
                break
    if bi < 0:
        return None
    return int(bi), int(bj), int(bk), float(bex)
