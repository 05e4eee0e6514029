# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel backend.

Same API as ``hgmeans._purepy``; tight C loops for the distance scans
that dominate the run time. Squared distances accumulate sequentially in
float64, and nearest scans break ties toward the lowest center index.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt

cnp.import_array()


cdef inline double _dist2(const double[:, ::1] a, Py_ssize_t i,
                          const double[:, ::1] b, Py_ssize_t j) noexcept nogil:
    cdef double acc = 0.0, diff
    cdef Py_ssize_t t
    for t in range(a.shape[1]):
        diff = a[i, t] - b[j, t]
        acc += diff * diff
    return acc


def nearest_center(const double[:, ::1] points, const double[:, ::1] centers):
    """Index of the nearest center per point plus the squared distance."""
    cdef Py_ssize_t n = points.shape[0], m = centers.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] assign = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] d2min = np.empty(n, dtype=np.float64)
    cdef cnp.int64_t[::1] a_v = assign
    cdef double[::1] d_v = d2min
    cdef Py_ssize_t i, k, best
    cdef double bd, v
    with nogil:
        for i in range(n):
            best = 0
            bd = _dist2(points, i, centers, 0)
            for k in range(1, m):
                v = _dist2(points, i, centers, k)
                if v < bd:
                    bd = v
                    best = k
            a_v[i] = best
            d_v[i] = bd
    return assign, d2min


def nearest_two(const double[:, ::1] points, const double[:, ::1] centers):
    """Nearest-center index plus squared distances to the two closest centers."""
    cdef Py_ssize_t n = points.shape[0], m = centers.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] assign = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] first = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] second = np.empty(n, dtype=np.float64)
    cdef cnp.int64_t[::1] a_v = assign
    cdef double[::1] f_v = first
    cdef double[::1] s_v = second
    cdef Py_ssize_t i, k, best
    cdef double b1, b2, v
    with nogil:
        for i in range(n):
            best = 0
            b1 = _dist2(points, i, centers, 0)
            b2 = INFINITY
            for k in range(1, m):
                v = _dist2(points, i, centers, k)
                if v < b1:
                    b2 = b1
                    b1 = v
                    best = k
                elif v < b2:
                    b2 = v
            a_v[i] = best
            f_v[i] = b1
            s_v[i] = b2
    return assign, first, second


def centroid_sums(const double[:, ::1] points, const cnp.int64_t[::1] assign, Py_ssize_t m):
    """Per-cluster coordinate sums and member counts."""
    cdef Py_ssize_t n = points.shape[0], d = points.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] sums = np.zeros((m, d), dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(m, dtype=np.int64)
    cdef double[:, ::1] s_v = sums
    cdef cnp.int64_t[::1] c_v = counts
    cdef Py_ssize_t i, t, k
    with nogil:
        for i in range(n):
            k = assign[i]
            c_v[k] += 1
            for t in range(d):
                s_v[k, t] += points[i, t]
    return sums, counts


def hamerly_pass(const double[:, ::1] points, const double[:, ::1] centers,
                 cnp.int64_t[::1] assign, double[::1] upper, double[::1] lower,
                 const double[::1] s):
    """One bounded reassignment sweep; mutates assign/upper/lower in place."""
    cdef Py_ssize_t n = points.shape[0], m = centers.shape[0]
    cdef Py_ssize_t i, k, a, best
    cdef double bound, b1, b2, v
    cdef long changed = 0
    with nogil:
        for i in range(n):
            a = assign[i]
            bound = s[a]
            if lower[i] > bound:
                bound = lower[i]
            if upper[i] <= bound:
                continue
            upper[i] = sqrt(_dist2(points, i, centers, a))
            if upper[i] <= bound:
                continue
            best = 0
            b1 = _dist2(points, i, centers, 0)
            b2 = INFINITY
            for k in range(1, m):
                v = _dist2(points, i, centers, k)
                if v < b1:
                    b2 = b1
                    b1 = v
                    best = k
                elif v < b2:
                    b2 = v
            if best != a:
                assign[i] = best
                changed += 1
            upper[i] = sqrt(b1)
            lower[i] = sqrt(b2)
    return changed


def update_min_d2(const double[:, ::1] points, const double[::1] center, double[::1] d2):
    """Lower d2 in place with the squared distances to one more center."""
    cdef Py_ssize_t n = points.shape[0], d = points.shape[1]
    cdef Py_ssize_t i, t
    cdef double acc, diff
    with nogil:
        for i in range(n):
            acc = 0.0
            for t in range(d):
                diff = points[i, t] - center[t]
                acc += diff * diff
            if acc < d2[i]:
                d2[i] = acc
    return None


def cost_of(const double[:, ::1] points, const double[:, ::1] centers,
            const cnp.int64_t[::1] assign):
    """Sum of squared distances from each point to its assigned center."""
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t i
    cdef double total = 0.0
    with nogil:
        for i in range(n):
            total += _dist2(points, i, centers, assign[i])
    return total


def solve_assignment(const double[:, ::1] cost):
    """Minimum-cost perfect matching on a square matrix (O(m^3))."""
    cdef Py_ssize_t n = cost.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u = np.zeros(n + 1, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.zeros(n + 1, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] minv = np.empty(n + 1, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] p = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] way = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] used = np.zeros(n + 1, dtype=np.uint8)
    cdef double[::1] u_v = u, v_v = v, minv_v = minv
    cdef cnp.int64_t[::1] p_v = p, way_v = way
    cdef cnp.uint8_t[::1] used_v = used
    cdef Py_ssize_t i, j, i0, j0, j1
    cdef double cur, delta
    with nogil:
        for i in range(1, n + 1):
            p_v[0] = i
            j0 = 0
            for j in range(n + 1):
                minv_v[j] = INFINITY
                used_v[j] = 0
            while True:
                used_v[j0] = 1
                i0 = p_v[j0]
                delta = INFINITY
                j1 = 0
                for j in range(1, n + 1):
                    if used_v[j] == 0:
                        cur = cost[i0 - 1, j - 1] - u_v[i0] - v_v[j]
                        if cur < minv_v[j]:
                            minv_v[j] = cur
                            way_v[j] = j0
                        if minv_v[j] < delta:
                            delta = minv_v[j]
                            j1 = j
                for j in range(n + 1):
                    if used_v[j]:
                        u_v[p_v[j]] += delta
                        v_v[j] -= delta
                    else:
                        minv_v[j] -= delta
                j0 = j1
                if p_v[j0] == 0:
                    break
            while j0 != 0:
                j1 = way_v[j0]
                p_v[j0] = p_v[j1]
                j0 = j1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] perm = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] perm_v = perm
    for j in range(1, n + 1):
        perm_v[p_v[j] - 1] = j - 1
    return perm
