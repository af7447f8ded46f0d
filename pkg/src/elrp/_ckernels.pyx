# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; semantics mirror ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

ctypedef long long i64

cdef i64 INF = (<i64>1) << 62

RELOCATE_INTRA = 1
TWO_OPT = 2
RELOCATE_INTER = 4
TWO_OPT_STAR = 8
EXCHANGE = 16

BACKEND = "cython"

cnp.import_array()


cdef struct Seg:
    i64 T
    i64 E
    i64 L
    bint F


cdef inline Seg cc(Seg a, Seg b, i64 t) noexcept nogil:
    cdef Seg r
    r.T = a.T + t + b.T
    r.E = a.E + t + b.T
    if b.E > r.E:
        r.E = b.E
    r.L = b.L - t - a.T
    if a.L < r.L:
        r.L = a.L
    r.F = a.F and b.F and a.E + t <= b.L
    return r


def prepare_matrix(arr):
    return np.ascontiguousarray(arr, dtype=np.int64)


def prepare_vector(seq):
    return np.ascontiguousarray(np.asarray(seq, dtype=np.int64))


def route_cost(const i64[:, ::1] M, i64 home, visits):
    cdef i64 total = 0
    cdef i64 prev = home
    cdef i64 v
    for v in visits:
        total += M[prev, v]
        prev = v
    return total + M[prev, home]


def insertion_scan(const i64[:, ::1] M, i64 home, visits, i64 c):
    cdef i64 best = INF, second = INF, d
    cdef Py_ssize_t best_pos = -1, p, n = len(visits)
    cdef i64 prev = home, nxt
    for p in range(n + 1):
        nxt = visits[p] if p < n else home
        d = M[prev, c] + M[c, nxt] - M[prev, nxt]
        if d < best:
            second = best
            best = d
            best_pos = p
        elif d < second:
            second = d
        prev = nxt
    return best, best_pos, second


def scan_routes(const i64[:, ::1] M, const i64[::1] homes, const i64[::1] flat,
                const i64[::1] starts, const i64[::1] allowed, i64 c):
    cdef i64 best = INF, second = INF, d, h, prev, nxt
    cdef Py_ssize_t r, p, lo, hi, best_r = -1, best_p = -1
    for r in range(homes.shape[0]):
        if not allowed[r]:
            continue
        h = homes[r]
        prev = h
        lo = starts[r]
        hi = starts[r + 1]
        for p in range(lo, hi + 1):
            nxt = flat[p] if p < hi else h
            d = M[prev, c] + M[c, nxt] - M[prev, nxt]
            if d < best:
                second = best
                best = d
                best_r = r
                best_p = p - lo
            elif d < second:
                second = d
            prev = nxt
    return best, best_r, best_p, second


def scan_route_many(const i64[:, ::1] M, i64 home, visits, custs):
    cdef Py_ssize_t n = len(visits), k, p, nc = len(custs)
    cdef i64[::1] seq = np.empty(n + 2, dtype=np.int64)
    cdef i64 c, a, b, d, best, second
    cdef Py_ssize_t best_p
    b1 = np.empty(nc, dtype=np.int64)
    p1 = np.empty(nc, dtype=np.int64)
    b2 = np.empty(nc, dtype=np.int64)
    cdef i64[::1] vb1 = b1, vp1 = p1, vb2 = b2
    seq[0] = home
    seq[n + 1] = home
    for p in range(n):
        seq[p + 1] = visits[p]
    for k in range(nc):
        c = custs[k]
        best = INF
        second = INF
        best_p = -1
        for p in range(n + 1):
            a = seq[p]
            b = seq[p + 1]
            d = M[a, c] + M[c, b] - M[a, b]
            if d < best:
                second = best
                best = d
                best_p = p
            elif d < second:
                second = d
        vb1[k] = best
        vp1[k] = best_p
        vb2[k] = second
    return b1.tolist(), p1.tolist(), b2.tolist()


cdef inline Seg single(i64 v, const i64[::1] service, const i64[::1] tw_e,
                       const i64[::1] tw_l) noexcept nogil:
    cdef Seg r
    r.T = service[v]
    r.E = tw_e[v] + service[v]
    r.L = tw_l[v]
    r.F = tw_e[v] <= tw_l[v]
    return r


cdef inline Seg home_seg(i64 h, const i64[::1] tw_e, const i64[::1] tw_l) noexcept nogil:
    cdef Seg r
    r.T = 0
    r.E = tw_e[h]
    r.L = tw_l[h]
    r.F = True
    return r


def insertion_scan_tw(const i64[:, ::1] M, const i64[:, ::1] T, demand,
                      const i64[::1] service, const i64[::1] tw_e, const i64[::1] tw_l,
                      i64 home, visits, i64 c):
    cdef Py_ssize_t n = len(visits), p
    cdef i64[::1] seq = np.empty(n + 2, dtype=np.int64)
    seq[0] = home
    seq[n + 1] = home
    for p in range(n):
        seq[p + 1] = visits[p]
    cdef Seg* fwd = <Seg*> malloc((n + 2) * sizeof(Seg))
    cdef Seg* bwd = <Seg*> malloc((n + 2) * sizeof(Seg))
    cdef Seg sc, st
    cdef i64 best = INF, second = INF, d, a, b
    cdef Py_ssize_t best_pos = -1
    try:
        fwd[0] = home_seg(home, tw_e, tw_l)
        for p in range(1, n + 1):
            fwd[p] = cc(fwd[p - 1], single(seq[p], service, tw_e, tw_l), T[seq[p - 1], seq[p]])
        bwd[n + 1] = home_seg(home, tw_e, tw_l)
        for p in range(n, 0, -1):
            bwd[p] = cc(single(seq[p], service, tw_e, tw_l), bwd[p + 1], T[seq[p], seq[p + 1]])
        sc = single(c, service, tw_e, tw_l)
        for p in range(n + 1):
            a = seq[p]
            b = seq[p + 1]
            d = M[a, c] + M[c, b] - M[a, b]
            if d >= second:
                continue
            st = cc(cc(fwd[p], sc, T[a, c]), bwd[p + 1], T[c, b])
            if not st.F:
                continue
            if d < best:
                second = best
                best = d
                best_pos = p
            else:
                second = d
    finally:
        free(fwd)
        free(bwd)
    return best, best_pos, second


cdef class _LS:
    cdef const i64[:, ::1] M
    cdef const i64[:, ::1] Tm
    cdef const i64[::1] demand
    cdef const i64[::1] service
    cdef const i64[::1] tw_e
    cdef const i64[::1] tw_l
    cdef const i64[:, ::1] nb
    cdef const i64[::1] cap
    cdef const i64[::1] fe_of
    cdef i64[::1] dload
    cdef i64[::1] slack
    cdef bint has_tw
    cdef i64 Q, fixed
    cdef Py_ssize_t R, W
    cdef i64[:, ::1] seq
    cdef i64[::1] length
    cdef i64[:, ::1] pc
    cdef i64[:, ::1] rpc
    cdef i64[:, ::1] pl
    cdef i64[::1] rid
    cdef i64[::1] pos
    cdef i64[::1] customers
    cdef Seg* fwd
    cdef Seg* suf
    cdef i64[::1] scratch

    def __cinit__(self):
        self.fwd = NULL
        self.suf = NULL

    def __dealloc__(self):
        if self.fwd != NULL:
            free(self.fwd)
        if self.suf != NULL:
            free(self.suf)

    def __init__(self, M, T, demand, service, tw_e, tw_l, has_tw, homes, routes,
                 neighbors, capacity, fixed_cost, depot_cap, depot_load, fe_of, fe_slack):
        cdef Py_ssize_t r, p, n_nodes
        self.M = M
        self.Tm = T
        self.demand = np.asarray(demand, dtype=np.int64)
        self.service = np.asarray(service, dtype=np.int64)
        self.tw_e = np.asarray(tw_e, dtype=np.int64)
        self.tw_l = np.asarray(tw_l, dtype=np.int64)
        self.has_tw = has_tw
        self.nb = np.ascontiguousarray(neighbors, dtype=np.int64)
        self.Q = capacity
        self.fixed = fixed_cost
        self.cap = np.asarray(depot_cap, dtype=np.int64)
        self.dload = np.array(depot_load, dtype=np.int64)
        self.fe_of = np.asarray(fe_of, dtype=np.int64)
        self.slack = np.array(fe_slack, dtype=np.int64)
        n_nodes = self.demand.shape[0]
        self.R = len(routes)
        total = 0
        for visits in routes:
            total += len(visits)
        self.W = total + 2
        self.seq = np.zeros((self.R, self.W), dtype=np.int64)
        self.length = np.zeros(self.R, dtype=np.int64)
        self.pc = np.zeros((self.R, self.W), dtype=np.int64)
        self.rpc = np.zeros((self.R, self.W), dtype=np.int64)
        self.pl = np.zeros((self.R, self.W), dtype=np.int64)
        self.rid = np.full(n_nodes, -1, dtype=np.int64)
        self.pos = np.zeros(n_nodes, dtype=np.int64)
        self.scratch = np.zeros(self.W, dtype=np.int64)
        if self.has_tw:
            self.fwd = <Seg*> malloc(max(1, self.R * self.W) * sizeof(Seg))
            self.suf = <Seg*> malloc(max(1, self.R * self.W) * sizeof(Seg))
        for r in range(self.R):
            h = homes[r]
            visits = routes[r]
            self.seq[r, 0] = h
            for p in range(len(visits)):
                self.seq[r, p + 1] = visits[p]
            self.seq[r, len(visits) + 1] = h
            self.length[r] = len(visits)
            self._refresh(r)
        custs = [v for v in range(n_nodes) if self.rid[v] >= 0]
        self.customers = np.array(sorted(custs), dtype=np.int64)

    cdef void _refresh(self, Py_ssize_t r) noexcept:
        cdef Py_ssize_t n = self.length[r] + 2, p
        cdef i64[:, ::1] s = self.seq
        cdef Seg* fw
        cdef Seg* sf
        cdef Seg st
        self.pc[r, 0] = 0
        self.rpc[r, 0] = 0
        self.pl[r, 0] = 0
        for p in range(1, n):
            self.pc[r, p] = self.pc[r, p - 1] + self.M[s[r, p - 1], s[r, p]]
            self.rpc[r, p] = self.rpc[r, p - 1] + self.M[s[r, p], s[r, p - 1]]
            self.pl[r, p] = self.pl[r, p - 1] + self.demand[s[r, p]]
        for p in range(1, n - 1):
            self.rid[s[r, p]] = r
            self.pos[s[r, p]] = p
        if self.has_tw:
            fw = self.fwd + r * self.W
            sf = self.suf + r * self.W
            fw[0] = home_seg(s[r, 0], self.tw_e, self.tw_l)
            for p in range(1, n - 1):
                fw[p] = cc(fw[p - 1], single(s[r, p], self.service, self.tw_e, self.tw_l),
                           self.Tm[s[r, p - 1], s[r, p]])
            for p in range(n - 2, 0, -1):
                st = single(s[r, p], self.service, self.tw_e, self.tw_l)
                if p == n - 2:
                    sf[p] = st
                else:
                    sf[p] = cc(st, sf[p + 1], self.Tm[s[r, p], s[r, p + 1]])

    cdef inline i64 _len(self, Py_ssize_t r) noexcept:
        return self.length[r]

    cdef bint _feasible(self, Seg left, i64 left_last, i64* mids, Py_ssize_t n_mids,
                        Py_ssize_t right_r, Py_ssize_t right_p, i64 right_first,
                        i64 right_last, i64 home) noexcept:
        """left ⊕ mids ⊕ suffix(right_r, right_p) ⊕ home; right_r < 0 means no suffix."""
        cdef Seg acc = left
        cdef i64 last = left_last, v
        cdef Py_ssize_t k
        for k in range(n_mids):
            v = mids[k]
            acc = cc(acc, single(v, self.service, self.tw_e, self.tw_l), self.Tm[last, v])
            last = v
        if right_r >= 0:
            acc = cc(acc, self.suf[right_r * self.W + right_p], self.Tm[last, right_first])
            last = right_last
        acc = cc(acc, home_seg(home, self.tw_e, self.tw_l), self.Tm[last, home])
        return acc.F

    cdef bint _depot_ok(self, i64 h_from, i64 h_to, i64 q) noexcept:
        cdef i64 f_to
        if h_from == h_to or q <= 0:
            return True
        if self.dload[h_to] + q > self.cap[h_to]:
            return False
        f_to = self.fe_of[h_to]
        if f_to != self.fe_of[h_from] and (f_to < 0 or self.slack[f_to] < q):
            return False
        return True

    cdef void _move_load(self, i64 h_from, i64 h_to, i64 q) noexcept:
        cdef i64 f_from, f_to
        if h_from == h_to or q == 0:
            return
        self.dload[h_from] -= q
        self.dload[h_to] += q
        f_from = self.fe_of[h_from]
        f_to = self.fe_of[h_to]
        if f_from != f_to:
            if f_from >= 0:
                self.slack[f_from] += q
            if f_to >= 0:
                self.slack[f_to] -= q

    cdef i64 relocate_intra(self):
        cdef Py_ssize_t ci, k, r, pi, pj, n, t, w
        cdef i64 i, j, a, b, jn, rem, delta
        cdef i64[:, ::1] s = self.seq
        cdef const i64[:, ::1] M = self.M
        cdef i64* tmp = &self.scratch[0]
        for ci in range(self.customers.shape[0]):
            i = self.customers[ci]
            r = self.rid[i]
            if r < 0:
                continue
            pi = self.pos[i]
            a = s[r, pi - 1]
            b = s[r, pi + 1]
            rem = M[a, b] - M[a, i] - M[i, b]
            for k in range(self.nb.shape[1]):
                j = self.nb[i, k]
                if j < 0:
                    break
                if self.rid[j] != r:
                    continue
                pj = self.pos[j]
                if pj == pi - 1:
                    continue
                jn = s[r, pj + 1]
                delta = rem + M[j, i] + M[i, jn] - M[j, jn]
                if delta >= 0:
                    continue
                n = self.length[r]
                w = 0
                for t in range(1, n + 1):
                    if s[r, t] == i:
                        continue
                    tmp[w] = s[r, t]
                    w += 1
                    if s[r, t] == j:
                        tmp[w] = i
                        w += 1
                if self.has_tw and not self._feasible(
                        home_seg(s[r, 0], self.tw_e, self.tw_l), s[r, 0], tmp, n,
                        -1, 0, 0, 0, s[r, 0]):
                    continue
                for t in range(n):
                    s[r, t + 1] = tmp[t]
                self._refresh(r)
                return delta
        return 0

    cdef i64 two_opt(self):
        cdef Py_ssize_t ci, k, r, a, b, t
        cdef i64 i, j, delta, right_r
        cdef i64[:, ::1] s = self.seq
        cdef const i64[:, ::1] M = self.M
        cdef i64* tmp = &self.scratch[0]
        for ci in range(self.customers.shape[0]):
            i = self.customers[ci]
            r = self.rid[i]
            if r < 0:
                continue
            for k in range(self.nb.shape[1]):
                j = self.nb[i, k]
                if j < 0:
                    break
                if self.rid[j] != r:
                    continue
                a = self.pos[i]
                b = self.pos[j]
                if a > b:
                    a, b = b, a
                if b == a + 1:
                    continue
                delta = (M[s[r, a], s[r, b]] + M[s[r, a + 1], s[r, b + 1]]
                         - M[s[r, a], s[r, a + 1]] - M[s[r, b], s[r, b + 1]]
                         + (self.rpc[r, b] - self.rpc[r, a + 1])
                         - (self.pc[r, b] - self.pc[r, a + 1]))
                if delta >= 0:
                    continue
                for t in range(b - a):
                    tmp[t] = s[r, b - t]
                if self.has_tw:
                    right_r = r if b + 1 <= self.length[r] else -1
                    if not self._feasible(self.fwd[r * self.W + a], s[r, a], tmp, b - a,
                                          right_r, b + 1, s[r, b + 1],
                                          s[r, self.length[r]], s[r, 0]):
                        continue
                for t in range(b - a):
                    s[r, a + 1 + t] = tmp[t]
                self._refresh(r)
                return delta
        return 0

    cdef i64 relocate_inter(self):
        cdef Py_ssize_t ci, k, r1, r2, pi, pj, l1, t
        cdef i64 i, j, jn, qi, h1, h2, d1, delta, rr
        cdef i64[:, ::1] s = self.seq
        cdef const i64[:, ::1] M = self.M
        cdef i64 one[1]
        for ci in range(self.customers.shape[0]):
            i = self.customers[ci]
            r1 = self.rid[i]
            if r1 < 0:
                continue
            pi = self.pos[i]
            l1 = self.length[r1]
            qi = self.demand[i]
            h1 = s[r1, 0]
            if l1 == 1:
                d1 = -self.pc[r1, 2] - self.fixed
            else:
                d1 = M[s[r1, pi - 1], s[r1, pi + 1]] - M[s[r1, pi - 1], i] - M[i, s[r1, pi + 1]]
            for k in range(self.nb.shape[1]):
                j = self.nb[i, k]
                if j < 0:
                    break
                r2 = self.rid[j]
                if r2 < 0 or r2 == r1:
                    continue
                pj = self.pos[j]
                jn = s[r2, pj + 1]
                delta = d1 + M[j, i] + M[i, jn] - M[j, jn]
                if delta >= 0:
                    continue
                if self.pl[r2, self.length[r2] + 1] + qi > self.Q:
                    continue
                h2 = s[r2, 0]
                if not self._depot_ok(h1, h2, qi):
                    continue
                if self.has_tw:
                    one[0] = i
                    rr = r2 if pj + 1 <= self.length[r2] else -1
                    if not self._feasible(self.fwd[r2 * self.W + pj], j, one, 1, rr, pj + 1,
                                          jn, s[r2, self.length[r2]], h2):
                        continue
                    if l1 > 1:
                        rr = r1 if pi + 1 <= l1 else -1
                        if not self._feasible(self.fwd[r1 * self.W + pi - 1], s[r1, pi - 1],
                                              one, 0, rr, pi + 1, s[r1, pi + 1],
                                              s[r1, l1], h1):
                            continue
                # remove from r1
                for t in range(pi, l1 + 1):
                    s[r1, t] = s[r1, t + 1]
                self.length[r1] = l1 - 1
                # insert into r2 after position pj
                for t in range(self.length[r2] + 1, pj, -1):
                    s[r2, t + 1] = s[r2, t]
                s[r2, pj + 1] = i
                self.length[r2] += 1
                self._move_load(h1, h2, qi)
                self._refresh(r1)
                self._refresh(r2)
                return delta
        return 0

    cdef i64 two_opt_star(self):
        cdef Py_ssize_t ci, k, r1, r2, pi, pj, l1, l2, t, w
        cdef i64 i, j, h1, h2, n1, n2, delta, load1, load2, ln1, ln2, shift, rr
        cdef i64[:, ::1] s = self.seq
        cdef const i64[:, ::1] M = self.M
        cdef i64* tmp = &self.scratch[0]
        for ci in range(self.customers.shape[0]):
            i = self.customers[ci]
            r1 = self.rid[i]
            if r1 < 0:
                continue
            for k in range(self.nb.shape[1]):
                j = self.nb[i, k]
                if j < 0:
                    break
                r2 = self.rid[j]
                if r2 < 0 or r2 == r1:
                    continue
                pi = self.pos[i]
                pj = self.pos[j]
                l1 = self.length[r1]
                l2 = self.length[r2]
                if pi == l1 and pj == l2:
                    continue
                h1 = s[r1, 0]
                h2 = s[r2, 0]
                if pj < l2:
                    n1 = (self.pc[r1, pi] + M[i, s[r2, pj + 1]]
                          + (self.pc[r2, l2] - self.pc[r2, pj + 1]) + M[s[r2, l2], h1])
                else:
                    n1 = self.pc[r1, pi] + M[i, h1]
                if pi < l1:
                    n2 = (self.pc[r2, pj] + M[j, s[r1, pi + 1]]
                          + (self.pc[r1, l1] - self.pc[r1, pi + 1]) + M[s[r1, l1], h2])
                else:
                    n2 = self.pc[r2, pj] + M[j, h2]
                delta = n1 + n2 - self.pc[r1, l1 + 1] - self.pc[r2, l2 + 1]
                if delta >= 0:
                    continue
                load1 = self.pl[r1, l1]
                load2 = self.pl[r2, l2]
                ln1 = self.pl[r1, pi] + load2 - self.pl[r2, pj]
                ln2 = self.pl[r2, pj] + load1 - self.pl[r1, pi]
                if ln1 > self.Q or ln2 > self.Q:
                    continue
                shift = ln1 - load1
                if shift > 0 and not self._depot_ok(h2, h1, shift):
                    continue
                if shift < 0 and not self._depot_ok(h1, h2, -shift):
                    continue
                if self.has_tw:
                    rr = r2 if pj < l2 else -1
                    if not self._feasible(self.fwd[r1 * self.W + pi], i, tmp, 0, rr, pj + 1,
                                          s[r2, pj + 1], s[r2, l2], h1):
                        continue
                    rr = r1 if pi < l1 else -1
                    if not self._feasible(self.fwd[r2 * self.W + pj], j, tmp, 0, rr, pi + 1,
                                          s[r1, pi + 1], s[r1, l1], h2):
                        continue
                # tail of r1 -> scratch, tail of r2 -> r1, scratch -> r2
                w = 0
                for t in range(pi + 1, l1 + 1):
                    tmp[w] = s[r1, t]
                    w += 1
                for t in range(pj + 1, l2 + 1):
                    s[r1, pi + 1 + t - (pj + 1)] = s[r2, t]
                self.length[r1] = pi + (l2 - pj)
                s[r1, self.length[r1] + 1] = h1
                for t in range(w):
                    s[r2, pj + 1 + t] = tmp[t]
                self.length[r2] = pj + w
                s[r2, self.length[r2] + 1] = h2
                if shift > 0:
                    self._move_load(h2, h1, shift)
                elif shift < 0:
                    self._move_load(h1, h2, -shift)
                self._refresh(r1)
                self._refresh(r2)
                return delta
        return 0

    cdef i64 exchange(self):
        cdef Py_ssize_t ci, k, r1, r2, pi, pj, l1, l2
        cdef i64 i, j, a1, b1, a2, b2, delta, shift, h1, h2, rr
        cdef i64[:, ::1] s = self.seq
        cdef const i64[:, ::1] M = self.M
        cdef i64 one[1]
        for ci in range(self.customers.shape[0]):
            i = self.customers[ci]
            r1 = self.rid[i]
            if r1 < 0:
                continue
            for k in range(self.nb.shape[1]):
                j = self.nb[i, k]
                if j < 0:
                    break
                r2 = self.rid[j]
                if r2 < 0 or r2 == r1:
                    continue
                pi = self.pos[i]
                pj = self.pos[j]
                a1 = s[r1, pi - 1]
                b1 = s[r1, pi + 1]
                a2 = s[r2, pj - 1]
                b2 = s[r2, pj + 1]
                delta = (M[a1, j] + M[j, b1] - M[a1, i] - M[i, b1]
                         + M[a2, i] + M[i, b2] - M[a2, j] - M[j, b2])
                if delta >= 0:
                    continue
                shift = self.demand[j] - self.demand[i]
                l1 = self.length[r1]
                l2 = self.length[r2]
                if self.pl[r1, l1 + 1] + shift > self.Q or self.pl[r2, l2 + 1] - shift > self.Q:
                    continue
                h1 = s[r1, 0]
                h2 = s[r2, 0]
                if shift > 0 and not self._depot_ok(h2, h1, shift):
                    continue
                if shift < 0 and not self._depot_ok(h1, h2, -shift):
                    continue
                if self.has_tw:
                    one[0] = j
                    rr = r1 if pi < l1 else -1
                    if not self._feasible(self.fwd[r1 * self.W + pi - 1], a1, one, 1, rr, pi + 1,
                                          b1, s[r1, l1], h1):
                        continue
                    one[0] = i
                    rr = r2 if pj < l2 else -1
                    if not self._feasible(self.fwd[r2 * self.W + pj - 1], a2, one, 1, rr, pj + 1,
                                          b2, s[r2, l2], h2):
                        continue
                s[r1, pi] = j
                s[r2, pj] = i
                if shift > 0:
                    self._move_load(h2, h1, shift)
                elif shift < 0:
                    self._move_load(h1, h2, -shift)
                self._refresh(r1)
                self._refresh(r2)
                return delta
        return 0

    cdef i64 _apply(self, int op):
        if op == RELOCATE_INTRA:
            return self.relocate_intra()
        if op == TWO_OPT:
            return self.two_opt()
        if op == RELOCATE_INTER:
            return self.relocate_inter()
        if op == TWO_OPT_STAR:
            return self.two_opt_star()
        return self.exchange()

    def run(self, int ops):
        cdef list sequence = []
        cdef i64 total = 0, d
        cdef i64 moves = 0
        cdef bint improved = True
        cdef int op
        for op in (RELOCATE_INTRA, TWO_OPT, RELOCATE_INTER, TWO_OPT_STAR, EXCHANGE):
            if ops & op:
                sequence.append(op)
        while improved:
            improved = False
            for op in sequence:
                d = self._apply(op)
                if d < 0:
                    total += d
                    moves += 1
                    improved = True
        out = []
        for r in range(self.R):
            out.append([int(self.seq[r, p]) for p in range(1, self.length[r] + 1)])
        return out, total, moves


def local_search(M, T, demand, service, tw_e, tw_l, has_tw, homes, routes, neighbors,
                 capacity, fixed_cost, depot_cap, depot_load, fe_of, fe_slack, ops):
    ls = _LS(M, T, demand, service, tw_e, tw_l, has_tw, homes, routes, neighbors,
             capacity, fixed_cost, depot_cap, depot_load, fe_of, fe_slack)
    return ls.run(ops)
