"""Pure-Python hot kernels.

Reference implementation mirrored by ``_ckernels.pyx``; both must return
identical results for identical inputs. Matrices are nested lists here.
"""

INF = 1 << 62

RELOCATE_INTRA = 1
TWO_OPT = 2
RELOCATE_INTER = 4
TWO_OPT_STAR = 8
EXCHANGE = 16

BACKEND = "python"


def prepare_matrix(arr):
    return arr.tolist()


def prepare_vector(seq):
    return list(seq)


def route_cost(M, home, visits):
    total = 0
    prev = home
    for v in visits:
        total += M[prev][v]
        prev = v
    return total + M[prev][home]


def insertion_scan(M, home, visits, c):
    """Cheapest and second-cheapest insertion of ``c`` into a route.

    Returns ``(best_delta, best_pos, second_delta)``; position ``p`` means
    "insert before ``visits[p]``". Ties keep the earliest position.
    """
    best = INF
    second = INF
    best_pos = -1
    prev = home
    row_c = M[c]
    n = len(visits)
    for p in range(n + 1):
        nxt = visits[p] if p < n else home
        d = M[prev][c] + row_c[nxt] - M[prev][nxt]
        if d < best:
            second = best
            best = d
            best_pos = p
        elif d < second:
            second = d
        prev = nxt
    return best, best_pos, second


def scan_routes(M, homes, flat, starts, allowed, c):
    """Best and second-best insertion of ``c`` over all allowed routes.

    Routes are stored back to back in ``flat``; route ``r`` occupies
    ``flat[starts[r]:starts[r + 1]]``. Returns ``(best, route, pos, second)``.
    """
    best = INF
    second = INF
    best_r = -1
    best_p = -1
    row_c = M[c]
    for r in range(len(homes)):
        if not allowed[r]:
            continue
        h = homes[r]
        prev = h
        lo, hi = starts[r], starts[r + 1]
        for p in range(lo, hi + 1):
            nxt = flat[p] if p < hi else h
            d = M[prev][c] + row_c[nxt] - M[prev][nxt]
            if d < best:
                second = best
                best = d
                best_r = r
                best_p = p - lo
            elif d < second:
                second = d
            prev = nxt
    return best, best_r, best_p, second


def scan_route_many(M, home, visits, custs):
    """Per-customer ``(best, pos, second)`` for one route, as three lists."""
    b1, p1, b2 = [], [], []
    for c in custs:
        d, p, s = insertion_scan(M, home, visits, c)
        b1.append(d)
        p1.append(p)
        b2.append(s)
    return b1, p1, b2


def insertion_scan_tw(M, T, demand, service, tw_e, tw_l, home, visits, c):
    """Like :func:`insertion_scan` but skips time-window infeasible positions.

    Uses forward and backward resource-extension records so each position is
    checked in O(1). Returns best_pos -1 when no position is feasible.
    """
    n = len(visits)
    seq = [home] + list(visits) + [home]
    fwd = [None] * (n + 2)
    fwd[0] = (0, tw_e[home], tw_l[home], True)
    for p in range(1, n + 1):
        fwd[p] = _cc(fwd[p - 1], _single(seq[p], service, tw_e, tw_l), T[seq[p - 1]][seq[p]])
    bwd = [None] * (n + 2)
    bwd[n + 1] = (0, tw_e[home], tw_l[home], True)
    for p in range(n, 0, -1):
        bwd[p] = _cc(_single(seq[p], service, tw_e, tw_l), bwd[p + 1], T[seq[p]][seq[p + 1]])
    sc = _single(c, service, tw_e, tw_l)
    best = INF
    second = INF
    best_pos = -1
    row_c = M[c]
    for p in range(n + 1):
        a = seq[p]
        b = seq[p + 1]
        d = M[a][c] + row_c[b] - M[a][b]
        if d >= second:
            continue
        st = _cc(_cc(fwd[p], sc, T[a][c]), bwd[p + 1], T[c][b])
        if not st[3]:
            continue
        if d < best:
            second = best
            best = d
            best_pos = p
        else:
            second = d
    return best, best_pos, second


def _single(v, service, tw_e, tw_l):
    s = service[v]
    return (s, tw_e[v] + s, tw_l[v], tw_e[v] <= tw_l[v])


def _cc(a, b, t):
    # (T, E, L, F) concatenation with link time t
    return (a[0] + t + b[0],
            max(a[1] + t + b[0], b[1]),
            min(a[2], b[2] - t - a[0]),
            a[3] and b[3] and a[1] + t <= b[2])


class _LS:
    """Granular first-improvement local search over second-echelon routes."""

    def __init__(self, M, T, demand, service, tw_e, tw_l, has_tw, homes, routes,
                 neighbors, capacity, fixed_cost, depot_cap, depot_load, fe_of, fe_slack):
        self.M = M
        self.T = T
        self.demand = demand
        self.service = service
        self.tw_e = tw_e
        self.tw_l = tw_l
        self.has_tw = has_tw
        self.homes = list(homes)
        self.nb = neighbors
        self.Q = capacity
        self.fixed = fixed_cost
        self.cap = depot_cap
        self.dload = list(depot_load)
        self.fe_of = fe_of
        self.slack = list(fe_slack)
        n_nodes = len(demand)
        self.rid = [-1] * n_nodes
        self.pos = [0] * n_nodes
        self.seq = []
        self.pc = []
        self.rpc = []
        self.pl = []
        self.fwd = []
        self.suf = []
        for r, (h, visits) in enumerate(zip(self.homes, routes)):
            self.seq.append([h] + list(visits) + [h])
            self.pc.append(None)
            self.rpc.append(None)
            self.pl.append(None)
            self.fwd.append(None)
            self.suf.append(None)
            self._refresh(r)
        self.customers = sorted(v for v in range(n_nodes) if self.rid[v] >= 0)

    def _refresh(self, r):
        s = self.seq[r]
        M = self.M
        n = len(s)
        pc = [0] * n
        rpc = [0] * n
        pl = [0] * n
        dem = self.demand
        for p in range(1, n):
            pc[p] = pc[p - 1] + M[s[p - 1]][s[p]]
            rpc[p] = rpc[p - 1] + M[s[p]][s[p - 1]]
            pl[p] = pl[p - 1] + dem[s[p]]
        self.pc[r] = pc
        self.rpc[r] = rpc
        self.pl[r] = pl
        for p in range(1, n - 1):
            self.rid[s[p]] = r
            self.pos[s[p]] = p
        if self.has_tw:
            T = self.T
            h = s[0]
            fwd = [None] * n
            fwd[0] = (0, self.tw_e[h], self.tw_l[h], True)
            for p in range(1, n - 1):
                fwd[p] = _cc(fwd[p - 1], _single(s[p], self.service, self.tw_e, self.tw_l),
                             T[s[p - 1]][s[p]])
            suf = [None] * n
            for p in range(n - 2, 0, -1):
                st = _single(s[p], self.service, self.tw_e, self.tw_l)
                suf[p] = st if suf[p + 1] is None else _cc(st, suf[p + 1], self.T[s[p]][s[p + 1]])
            self.fwd[r] = fwd
            self.suf[r] = suf

    # time-window helpers -------------------------------------------------
    def _home_end(self, h):
        return (0, self.tw_e[h], self.tw_l[h], True)

    def _feasible(self, left, left_last, mids, right, right_first, right_last, home):
        T = self.T
        acc = left
        last = left_last
        for v in mids:
            acc = _cc(acc, _single(v, self.service, self.tw_e, self.tw_l), T[last][v])
            last = v
        if right is not None:
            acc = _cc(acc, right, T[last][right_first])
            last = right_last
        acc = _cc(acc, self._home_end(home), T[last][home])
        return acc[3]

    def _seq_feasible(self, nodes, home):
        acc = (0, self.tw_e[home], self.tw_l[home], True)
        last = home
        T = self.T
        for v in nodes:
            acc = _cc(acc, _single(v, self.service, self.tw_e, self.tw_l), T[last][v])
            last = v
        acc = _cc(acc, self._home_end(home), T[last][home])
        return acc[3]

    def _depot_ok(self, h_from, h_to, q):
        """Moving load ``q`` from depot ``h_from`` to ``h_to``."""
        if h_from == h_to or q <= 0:
            return True
        if self.dload[h_to] + q > self.cap[h_to]:
            return False
        f_to = self.fe_of[h_to]
        if f_to != self.fe_of[h_from] and (f_to < 0 or self.slack[f_to] < q):
            return False
        return True

    def _move_load(self, h_from, h_to, q):
        if h_from == h_to or q == 0:
            return
        self.dload[h_from] -= q
        self.dload[h_to] += q
        f_from, f_to = self.fe_of[h_from], self.fe_of[h_to]
        if f_from != f_to:
            if f_from >= 0:
                self.slack[f_from] += q
            if f_to >= 0:
                self.slack[f_to] -= q

    # operators -----------------------------------------------------------
    def relocate_intra(self):
        M = self.M
        for i in self.customers:
            r = self.rid[i]
            if r < 0:
                continue
            s = self.seq[r]
            pi = self.pos[i]
            a, b = s[pi - 1], s[pi + 1]
            rem = M[a][b] - M[a][i] - M[i][b]
            for j in self.nb[i]:
                if j < 0:
                    break
                if self.rid[j] != r:
                    continue
                pj = self.pos[j]
                if pj == pi - 1:
                    continue
                jn = s[pj + 1]
                delta = rem + M[j][i] + M[i][jn] - M[j][jn]
                if delta >= 0:
                    continue
                new = [v for v in s[1:-1] if v != i]
                k = new.index(j)
                new.insert(k + 1, i)
                if self.has_tw and not self._seq_feasible(new, s[0]):
                    continue
                self.seq[r] = [s[0]] + new + [s[0]]
                self._refresh(r)
                return delta
        return 0

    def two_opt(self):
        M = self.M
        for i in self.customers:
            r = self.rid[i]
            if r < 0:
                continue
            for j in self.nb[i]:
                if j < 0:
                    break
                if self.rid[j] != r:
                    continue
                a, b = self.pos[i], self.pos[j]
                if a > b:
                    a, b = b, a
                if b == a + 1:
                    continue
                s = self.seq[r]
                pc, rpc = self.pc[r], self.rpc[r]
                delta = (M[s[a]][s[b]] + M[s[a + 1]][s[b + 1]]
                         - M[s[a]][s[a + 1]] - M[s[b]][s[b + 1]]
                         + (rpc[b] - rpc[a + 1]) - (pc[b] - pc[a + 1]))
                if delta >= 0:
                    continue
                if self.has_tw:
                    mids = s[b:a:-1]
                    ok = self._feasible(self.fwd[r][a], s[a], mids, self.suf[r][b + 1],
                                        s[b + 1], s[-2], s[0])
                    if not ok:
                        continue
                s[a + 1:b + 1] = s[b:a:-1]
                self._refresh(r)
                return delta
        return 0

    def relocate_inter(self):
        M = self.M
        dem = self.demand
        for i in self.customers:
            r1 = self.rid[i]
            if r1 < 0:
                continue
            s1 = self.seq[r1]
            pi = self.pos[i]
            l1 = len(s1) - 2
            qi = dem[i]
            h1 = s1[0]
            if l1 == 1:
                d1 = -self.pc[r1][2] - self.fixed
            else:
                d1 = M[s1[pi - 1]][s1[pi + 1]] - M[s1[pi - 1]][i] - M[i][s1[pi + 1]]
            for j in self.nb[i]:
                if j < 0:
                    break
                r2 = self.rid[j]
                if r2 < 0 or r2 == r1:
                    continue
                s2 = self.seq[r2]
                pj = self.pos[j]
                jn = s2[pj + 1]
                delta = d1 + M[j][i] + M[i][jn] - M[j][jn]
                if delta >= 0:
                    continue
                if self.pl[r2][-1] + qi > self.Q:
                    continue
                h2 = s2[0]
                if not self._depot_ok(h1, h2, qi):
                    continue
                if self.has_tw:
                    if not self._feasible(self.fwd[r2][pj], j, [i], self.suf[r2][pj + 1],
                                          jn, s2[-2], h2):
                        continue
                    if l1 > 1 and not self._feasible(self.fwd[r1][pi - 1], s1[pi - 1], [],
                                                     self.suf[r1][pi + 1], s1[pi + 1], s1[-2], h1):
                        continue
                del s1[pi]
                s2.insert(pj + 1, i)
                self._move_load(h1, h2, qi)
                if l1 == 1:
                    self.seq[r1] = [h1, h1]
                self._refresh(r1)
                self._refresh(r2)
                self.rid[i] = r2
                return delta
        return 0

    def two_opt_star(self):
        M = self.M
        for i in self.customers:
            r1 = self.rid[i]
            if r1 < 0:
                continue
            for j in self.nb[i]:
                if j < 0:
                    break
                r2 = self.rid[j]
                if r2 < 0 or r2 == r1:
                    continue
                s1, s2 = self.seq[r1], self.seq[r2]
                pi, pj = self.pos[i], self.pos[j]
                l1, l2 = len(s1) - 2, len(s2) - 2
                if pi == l1 and pj == l2:
                    continue
                h1, h2 = s1[0], s2[0]
                pc1, pc2 = self.pc[r1], self.pc[r2]
                if pj < l2:
                    n1 = pc1[pi] + M[i][s2[pj + 1]] + (pc2[l2] - pc2[pj + 1]) + M[s2[l2]][h1]
                else:
                    n1 = pc1[pi] + M[i][h1]
                if pi < l1:
                    n2 = pc2[pj] + M[j][s1[pi + 1]] + (pc1[l1] - pc1[pi + 1]) + M[s1[l1]][h2]
                else:
                    n2 = pc2[pj] + M[j][h2]
                delta = n1 + n2 - pc1[l1 + 1] - pc2[l2 + 1]
                if delta >= 0:
                    continue
                pl1, pl2 = self.pl[r1], self.pl[r2]
                load1, load2 = pl1[l1], pl2[l2]
                ln1 = pl1[pi] + load2 - pl2[pj]
                ln2 = pl2[pj] + load1 - pl1[pi]
                if ln1 > self.Q or ln2 > self.Q:
                    continue
                shift = ln1 - load1  # load moving into depot h1
                if shift > 0 and not self._depot_ok(h2, h1, shift):
                    continue
                if shift < 0 and not self._depot_ok(h1, h2, -shift):
                    continue
                if self.has_tw:
                    right = self.suf[r2][pj + 1] if pj < l2 else None
                    if not self._feasible(self.fwd[r1][pi], i, [], right,
                                          s2[pj + 1], s2[l2], h1):
                        continue
                    right = self.suf[r1][pi + 1] if pi < l1 else None
                    if not self._feasible(self.fwd[r2][pj], j, [], right,
                                          s1[pi + 1], s1[l1], h2):
                        continue
                t1 = s1[pi + 1:l1 + 1]
                t2 = s2[pj + 1:l2 + 1]
                self.seq[r1] = s1[:pi + 1] + t2 + [h1]
                self.seq[r2] = s2[:pj + 1] + t1 + [h2]
                if shift > 0:
                    self._move_load(h2, h1, shift)
                elif shift < 0:
                    self._move_load(h1, h2, -shift)
                self._refresh(r1)
                self._refresh(r2)
                return delta
        return 0

    def exchange(self):
        M = self.M
        dem = self.demand
        for i in self.customers:
            r1 = self.rid[i]
            if r1 < 0:
                continue
            for j in self.nb[i]:
                if j < 0:
                    break
                r2 = self.rid[j]
                if r2 < 0 or r2 == r1:
                    continue
                s1, s2 = self.seq[r1], self.seq[r2]
                pi, pj = self.pos[i], self.pos[j]
                a1, b1 = s1[pi - 1], s1[pi + 1]
                a2, b2 = s2[pj - 1], s2[pj + 1]
                delta = (M[a1][j] + M[j][b1] - M[a1][i] - M[i][b1]
                         + M[a2][i] + M[i][b2] - M[a2][j] - M[j][b2])
                if delta >= 0:
                    continue
                shift = dem[j] - dem[i]  # load moving into r1 / depot h1
                if self.pl[r1][-1] + shift > self.Q or self.pl[r2][-1] - shift > self.Q:
                    continue
                h1, h2 = s1[0], s2[0]
                if shift > 0 and not self._depot_ok(h2, h1, shift):
                    continue
                if shift < 0 and not self._depot_ok(h1, h2, -shift):
                    continue
                if self.has_tw:
                    l1, l2 = len(s1) - 2, len(s2) - 2
                    if not self._feasible(self.fwd[r1][pi - 1], a1, [j], self.suf[r1][pi + 1],
                                          b1, s1[l1], h1):
                        continue
                    if not self._feasible(self.fwd[r2][pj - 1], a2, [i], self.suf[r2][pj + 1],
                                          b2, s2[l2], h2):
                        continue
                s1[pi] = j
                s2[pj] = i
                if shift > 0:
                    self._move_load(h2, h1, shift)
                elif shift < 0:
                    self._move_load(h1, h2, -shift)
                self._refresh(r1)
                self._refresh(r2)
                return delta
        return 0

    def run(self, ops):
        sequence = []
        if ops & RELOCATE_INTRA:
            sequence.append(self.relocate_intra)
        if ops & TWO_OPT:
            sequence.append(self.two_opt)
        if ops & RELOCATE_INTER:
            sequence.append(self.relocate_inter)
        if ops & TWO_OPT_STAR:
            sequence.append(self.two_opt_star)
        if ops & EXCHANGE:
            sequence.append(self.exchange)
        total = 0
        moves = 0
        improved = True
        while improved:
            improved = False
            for op in sequence:
                d = op()
                if d < 0:
                    total += d
                    moves += 1
                    improved = True
        return [s[1:-1] for s in self.seq], total, moves


def local_search(M, T, demand, service, tw_e, tw_l, has_tw, homes, routes, neighbors,
                 capacity, fixed_cost, depot_cap, depot_load, fe_of, fe_slack, ops):
    """Run the enabled operators to a fixed point.

    Returns ``(routes, total_delta, n_moves)``; emptied routes come back as
    empty lists at their original index. ``total_delta`` counts travel cost
    and the fixed cost of emptied routes.
    """
    ls = _LS(M, T, demand, service, tw_e, tw_l, has_tw, homes, routes, neighbors,
             capacity, fixed_cost, depot_cap, depot_load, fe_of, fe_slack)
    return ls.run(ops)
