# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_fallback.py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


def slice_layers(const int[::1] q0, const int[::1] q1, int width, int max_pairs=0):
    cdef Py_ssize_t g = q0.shape[0], i
    cdef int a, b, s, cap = 1024
    out = np.empty(g, dtype=np.int32)
    cdef int[::1] o = out
    cdef int* last = <int*> malloc(width * sizeof(int))
    cdef int* busy = <int*> malloc(width * sizeof(int))
    cdef int* pairs = <int*> malloc(cap * sizeof(int))
    cdef int* grown
    cdef int npairs = 0
    try:
        for i in range(width):
            last[i] = 0
            busy[i] = 0
        for i in range(g):
            a = q0[i]
            b = q1[i]
            if b < 0:
                o[i] = last[a]
                continue
            s = last[a] + busy[a]
            if last[b] + busy[b] > s:
                s = last[b] + busy[b]
            if max_pairs > 0:
                while s < npairs and pairs[s] >= max_pairs:
                    s += 1
            while npairs <= s:
                if npairs == cap:
                    cap *= 2
                    grown = <int*> malloc(cap * sizeof(int))
                    for a in range(npairs):
                        grown[a] = pairs[a]
                    free(pairs)
                    pairs = grown
                pairs[npairs] = 0
                npairs += 1
            pairs[s] += 1
            o[i] = s
            last[q0[i]] = s
            last[b] = s
            busy[q0[i]] = 1
            busy[b] = 1
    finally:
        free(last)
        free(busy)
        free(pairs)
    return out


cdef inline double _gain(const double[:, ::1] W, double[:, ::1] aff, int[::1] core,
                         const int[::1] prev, double mu, int a, int b) noexcept nogil:
    cdef int x = core[a], y = core[b]
    cdef double d = aff[a, y] - aff[a, x] + aff[b, x] - aff[b, y] - 2.0 * W[a, b]
    cdef int dmig = ((y != prev[a]) + (x != prev[b])) - ((x != prev[a]) + (y != prev[b]))
    return d - mu * dmig


cdef inline void _exchange(const double[:, ::1] W, double[:, ::1] aff, int[::1] core,
                           int a, int b) noexcept nogil:
    cdef int x = core[a], y = core[b], q
    cdef Py_ssize_t n = core.shape[0]
    for q in range(n):
        aff[q, x] += W[q, b] - W[q, a]
        aff[q, y] += W[q, a] - W[q, b]
    core[a] = y
    core[b] = x


def refine(const double[:, ::1] W, int[::1] core, const int[::1] prev, const int[:, ::1] must,
           int ncores, double mu, int max_passes):
    cdef Py_ssize_t n = core.shape[0]
    aff_arr = np.zeros((n, ncores))
    fixed_arr = np.zeros(n, dtype=np.int8)
    free_arr = np.empty(n, dtype=np.int32)
    cdef double[:, ::1] aff = aff_arr
    cdef signed char[::1] fixed = fixed_arr
    cdef int[::1] fr = free_arr
    cdef int moves
    with nogil:
        moves = _refine(W, core, prev, must, mu, max_passes, aff, fixed, fr)
    return moves


cdef int _refine(const double[:, ::1] W, int[::1] core, const int[::1] prev, const int[:, ::1] must,
                 double mu, int max_passes, double[:, ::1] aff, signed char[::1] fixed,
                 int[::1] fr) noexcept nogil:
    cdef Py_ssize_t n = core.shape[0], k = must.shape[0]
    cdef Py_ssize_t e, q, p
    cdef int a, b, mover, partner, y, r, best, side, moves = 0, passes, ba, bb, i, j, nf
    cdef double g, best_gain, acc
    for q in range(n):
        for p in range(n):
            acc = W[q, p]
            if acc != 0.0:
                aff[q, core[p]] += acc
    for e in range(k):
        if core[must[e, 0]] == core[must[e, 1]]:
            fixed[must[e, 0]] = 1
            fixed[must[e, 1]] = 1
    for e in range(k):
        a = must[e, 0]
        b = must[e, 1]
        if core[a] == core[b]:
            # may have been joined by an earlier repair; protect it from now on
            fixed[a] = 1
            fixed[b] = 1
            continue
        best = -1
        for side in range(2):
            if (aff[a, core[a]] < aff[b, core[b]]) == (side == 0):
                mover = a
                partner = b
            else:
                mover = b
                partner = a
            y = core[partner]
            best = -1
            best_gain = 0.0
            for r in range(n):
                if core[r] != y or r == partner or fixed[r]:
                    continue
                g = _gain(W, aff, core, prev, mu, mover, r)
                if best < 0 or g > best_gain:
                    best = r
                    best_gain = g
            if best >= 0:
                _exchange(W, aff, core, mover, best)
                fixed[mover] = 1
                fixed[partner] = 1
                moves += 1
                break
        if best < 0:
            return -1
    nf = 0
    for q in range(n):
        if not fixed[q]:
            fr[nf] = <int> q
            nf += 1
    if nf < 2:
        return moves
    for passes in range(max_passes):
        ba = -1
        bb = -1
        best_gain = 0.0
        for i in range(nf):
            a = fr[i]
            for j in range(i + 1, nf):
                b = fr[j]
                if core[a] == core[b]:
                    continue
                g = _gain(W, aff, core, prev, mu, a, b)
                if ba < 0 or g > best_gain:
                    ba = a
                    bb = b
                    best_gain = g
        if ba < 0 or not best_gain > 0.0:
            break
        _exchange(W, aff, core, ba, bb)
        moves += 1
    return moves


def teleport_ops(const int[::1] prev, const int[::1] nxt):
    cdef Py_ssize_t n = prev.shape[0]
    cdef int a, a0, b, x, y, pick, fallback, t, nops = 0
    cur_arr = np.array(prev, dtype=np.int32)
    cdef int[::1] cur = cur_arr
    ops_arr = np.empty((max(n, 1), 4), dtype=np.int32)
    cdef int[:, ::1] ops = ops_arr
    for a in range(n):
        if cur[a] == nxt[a]:
            continue
        x = cur[a]
        y = nxt[a]
        for b in range(a + 1, n):
            if cur[b] == y and nxt[b] == x:
                ops[nops, 0] = a
                ops[nops, 1] = b
                ops[nops, 2] = x
                ops[nops, 3] = y
                nops += 1
                cur[a] = y
                cur[b] = x
                break
    for a0 in range(n):
        a = a0
        while cur[a] != nxt[a]:
            x = cur[a]
            y = nxt[a]
            pick = -1
            fallback = -1
            for b in range(n):
                if b != a and cur[b] == y and nxt[b] != y:
                    if nxt[b] == x:
                        pick = b
                        break
                    if fallback < 0:
                        fallback = b
            b = pick if pick >= 0 else fallback
            if b < 0:
                raise ValueError("unbalanced assignments")
            ops[nops, 0] = a
            ops[nops, 1] = b
            ops[nops, 2] = x
            ops[nops, 3] = y
            nops += 1
            cur[a] = y
            cur[b] = x
            a = b
    return ops_arr[:nops].copy()


def asap(const int[::1] q0, const int[::1] q1, const long long[::1] dur, int width):
    cdef Py_ssize_t g = q0.shape[0], i
    cdef long long t, end
    cdef int a, b
    starts = np.empty(g, dtype=np.int64)
    cdef long long[::1] st = starts
    free_arr = np.zeros(width, dtype=np.int64)
    cdef long long[::1] fr = free_arr
    with nogil:
        for i in range(g):
            a = q0[i]
            b = q1[i]
            t = fr[a]
            if b >= 0 and fr[b] > t:
                t = fr[b]
            st[i] = t
            end = t + dur[i]
            fr[a] = end
            if b >= 0:
                fr[b] = end
    return starts


def fill_trace(signed char[:, ::1] grid, const int[::1] r0, const int[::1] r1,
               const long long[::1] c0, const long long[::1] c1, const signed char[::1] state):
    cdef Py_ssize_t i
    cdef long long c
    with nogil:
        for i in range(r0.shape[0]):
            for c in range(c0[i], c1[i]):
                grid[r0[i], c] = state[i]
                if r1[i] >= 0:
                    grid[r1[i], c] = state[i]
