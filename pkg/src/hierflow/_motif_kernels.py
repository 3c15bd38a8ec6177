"""Numba kernels for delta-bounded three-edge motif counting.

All kernels operate on one window's events as parallel int64 arrays sorted by
(time, seq); the array index order IS the strict temporal order, while the
delta bound applies to day-resolution times only. Star instances are found by
pairing the two same-neighbour events of the triple and counting compatible
third events through prefix sums; two-node triples are counted per dyad with
a sliding window; triangles are counted per static triangle by merging the
three dyad event streams.

Category columns: 0 outward star, 1 inward star, 2 mixed star, 3 triangle,
4 two-node. Anchor mode 0 attributes stars to the centre, triangles to all
three participants and two-node motifs to both nodes; mode 1 attributes every
instance to the sender of its earliest edge.
"""

from __future__ import annotations

import numpy as np
from numba import njit

OUT_STAR = 0
IN_STAR = 1
MIX_STAR = 2
TRIANGLE = 3
TWO_NODE = 4

ANCHOR_CENTRE = 0
ANCHOR_FIRST_SENDER = 1


@njit(cache=True, nogil=True)
def _bisect_left(a, lo, hi, v):
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True, nogil=True)
def _bisect_right(a, lo, hi, v):
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] <= v:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True, nogil=True)
def _bisect_left_indirect(order, lo, hi, v):
    # first position in order[lo:hi) whose value is >= v
    while lo < hi:
        mid = (lo + hi) >> 1
        if order[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True, nogil=True)
def _count_stars(src, dst, t, n_nodes, delta, anchor_mode, counts):
    m = src.size
    # incidence lists grouped by node, each group in (time, seq) order
    off = np.zeros(n_nodes + 1, np.int64)
    for i in range(m):
        off[src[i] + 1] += 1
        off[dst[i] + 1] += 1
    for u in range(n_nodes):
        off[u + 1] += off[u]
    pos = off[:-1].copy()
    ev_nbr = np.empty(2 * m, np.int64)
    ev_dir = np.empty(2 * m, np.int64)
    ev_t = np.empty(2 * m, np.int64)
    for i in range(m):
        c = src[i]
        ev_nbr[pos[c]] = dst[i]
        ev_dir[pos[c]] = 0
        ev_t[pos[c]] = t[i]
        pos[c] += 1
        c = dst[i]
        ev_nbr[pos[c]] = src[i]
        ev_dir[pos[c]] = 1
        ev_t[pos[c]] = t[i]
        pos[c] += 1

    for c in range(n_nodes):
        g0 = off[c]
        g1 = off[c + 1]
        L = g1 - g0
        if L < 3:
            continue
        ts = ev_t[g0:g1]
        ds = ev_dir[g0:g1]
        ns = ev_nbr[g0:g1]
        order = np.argsort(ns, kind="mergesort")

        pre_out = np.empty(L + 1, np.int64)
        pre_out[0] = 0
        for i in range(L):
            pre_out[i + 1] = pre_out[i] + (1 if ds[i] == 0 else 0)

        rpre = np.empty(L + 1, np.int64)
        if anchor_mode == ANCHOR_FIRST_SENDER:
            sdiff = np.zeros((4, L + 1), np.int64)
        else:
            sdiff = np.zeros((4, 1), np.int64)

        rs = 0
        while rs < L:
            re = rs + 1
            nbr = ns[order[rs]]
            while re < L and ns[order[re]] == nbr:
                re += 1
            k = re - rs
            if k >= 2:
                rpre[0] = 0
                for j in range(k):
                    rpre[j + 1] = rpre[j] + (1 if ds[order[rs + j]] == 0 else 0)
                a_min = 0
                for b in range(1, k):
                    q = order[rs + b]
                    tq = ts[q]
                    while ts[order[rs + a_min]] < tq - delta:
                        a_min += 1
                    for a in range(a_min, b):
                        p = order[rs + a]
                        da = ds[p]
                        db = ds[q]
                        if da == 0 and db == 0:
                            cat_out = OUT_STAR
                            cat_in = MIX_STAR
                        elif da == 1 and db == 1:
                            cat_out = MIX_STAR
                            cat_in = IN_STAR
                        else:
                            cat_out = MIX_STAR
                            cat_in = MIX_STAR

                        # third event before the pair: f, a, b
                        lo = _bisect_left(ts, 0, L, tq - delta)
                        lo_r = _bisect_left_indirect(order, rs, rs + a, lo) - rs
                        tot = p - lo
                        if tot > 0:
                            tot_out = pre_out[p] - pre_out[lo]
                            same_out = rpre[a] - rpre[lo_r]
                            same_tot = a - lo_r
                            f_out = tot_out - same_out
                            f_in = (tot - tot_out) - (same_tot - same_out)
                            if anchor_mode == ANCHOR_CENTRE:
                                counts[c, cat_out] += f_out
                                counts[c, cat_in] += f_in
                            else:
                                # f sent by the centre; inbound f handled in
                                # the deferred per-sender pass below
                                counts[c, cat_out] += f_out
                        if anchor_mode == ANCHOR_FIRST_SENDER and lo < p:
                            pat = da * 2 + db
                            sdiff[pat, lo] += 1
                            sdiff[pat, p] -= 1

                        # third event between the pair: a, f, b
                        tot = q - p - 1
                        if tot > 0:
                            tot_out = pre_out[q] - pre_out[p + 1]
                            same_out = rpre[b] - rpre[a + 1]
                            same_tot = b - a - 1
                            f_out = tot_out - same_out
                            f_in = (tot - tot_out) - (same_tot - same_out)
                            if anchor_mode == ANCHOR_CENTRE:
                                counts[c, cat_out] += f_out
                                counts[c, cat_in] += f_in
                            else:
                                tgt = c if da == 0 else nbr
                                counts[tgt, cat_out] += f_out
                                counts[tgt, cat_in] += f_in

                        # third event after the pair: a, b, f
                        hi = _bisect_right(ts, 0, L, ts[p] + delta)
                        hi_r = _bisect_left_indirect(order, rs + b, re, hi) - rs
                        tot = hi - q - 1
                        if tot > 0:
                            tot_out = pre_out[hi] - pre_out[q + 1]
                            same_out = rpre[hi_r] - rpre[b + 1]
                            same_tot = hi_r - b - 1
                            f_out = tot_out - same_out
                            f_in = (tot - tot_out) - (same_tot - same_out)
                            if anchor_mode == ANCHOR_CENTRE:
                                counts[c, cat_out] += f_out
                                counts[c, cat_in] += f_in
                            else:
                                tgt = c if da == 0 else nbr
                                counts[tgt, cat_out] += f_out
                                counts[tgt, cat_in] += f_in
            rs = re

        if anchor_mode != ANCHOR_FIRST_SENDER:
            continue

        # deferred attribution: triples whose earliest edge is inbound to the
        # centre are anchored at that edge's sender, one neighbour at a time
        for pat in range(4):
            cum = 0
            for i in range(L):
                cum += sdiff[pat, i]
                sdiff[pat, i] = cum

        rdiff = np.zeros((4, L + 1), np.int64)
        rs = 0
        while rs < L:
            re = rs + 1
            nbr = ns[order[rs]]
            while re < L and ns[order[re]] == nbr:
                re += 1
            k = re - rs
            has_in = False
            for j in range(k):
                if ds[order[rs + j]] == 1:
                    has_in = True
                    break
            if not has_in:
                rs = re
                continue
            for pat in range(4):
                for j in range(k + 1):
                    rdiff[pat, j] = 0
            if k >= 2:
                a_min = 0
                for b in range(1, k):
                    q = order[rs + b]
                    tq = ts[q]
                    while ts[order[rs + a_min]] < tq - delta:
                        a_min += 1
                    for a in range(a_min, b):
                        p = order[rs + a]
                        lo = _bisect_left(ts, 0, L, tq - delta)
                        lo_r = _bisect_left_indirect(order, rs, rs + a, lo) - rs
                        if lo_r < a:
                            pat = ds[p] * 2 + ds[q]
                            rdiff[pat, lo_r] += 1
                            rdiff[pat, a] -= 1
            for pat in range(4):
                cum = 0
                for j in range(k):
                    cum += rdiff[pat, j]
                    rdiff[pat, j] = cum
            for j in range(k):
                pj = order[rs + j]
                if ds[pj] != 1:
                    continue
                for pat in range(4):
                    nf = sdiff[pat, pj] - rdiff[pat, j]
                    if nf > 0:
                        cat = IN_STAR if pat == 3 else MIX_STAR
                        counts[nbr, cat] += nf
            rs = re


@njit(cache=True, nogil=True)
def _count_two_node(src, dst, t, delta, anchor_mode, dorder, dy_start, dy_umin,
                    dy_vmax, counts):
    nd = dy_umin.size
    for d in range(nd):
        s = dy_start[d]
        e = dy_start[d + 1]
        k = e - s
        if k < 3:
            continue
        umin = dy_umin[d]
        vmax = dy_vmax[d]
        if anchor_mode == ANCHOR_CENTRE:
            total = 0
            ws = s
            for jj in range(s, e):
                tj = t[dorder[jj]]
                while t[dorder[ws]] < tj - delta:
                    ws += 1
                w = jj - ws
                total += w * (w - 1) // 2
            if total > 0:
                counts[umin, TWO_NODE] += total
                counts[vmax, TWO_NODE] += total
        else:
            cnt0 = 0
            cnt1 = 0
            sumr0 = 0
            sumr1 = 0
            ws = s
            for jj in range(s, e):
                gi = dorder[jj]
                tj = t[gi]
                while t[dorder[ws]] < tj - delta:
                    rg = dorder[ws]
                    rloc = ws - s
                    if src[rg] == umin:
                        cnt0 -= 1
                        sumr0 -= rloc
                    else:
                        cnt1 -= 1
                        sumr1 -= rloc
                    ws += 1
                rj = jj - s
                if cnt0 > 0:
                    counts[umin, TWO_NODE] += (rj - 1) * cnt0 - sumr0
                if cnt1 > 0:
                    counts[vmax, TWO_NODE] += (rj - 1) * cnt1 - sumr1
                if src[gi] == umin:
                    cnt0 += 1
                    sumr0 += rj
                else:
                    cnt1 += 1
                    sumr1 += rj


@njit(cache=True, nogil=True)
def _triangle_total_3lab(mt, mlab, L, delta):
    c1 = np.zeros(3, np.int64)
    c2 = np.zeros((3, 3), np.int64)
    total = 0
    start = 0
    for j in range(L):
        tj = mt[j]
        lj = mlab[j]
        while mt[start] < tj - delta:
            lr = mlab[start]
            c1[lr] -= 1
            for x in range(3):
                c2[lr, x] -= c1[x]
            start += 1
        o1 = (lj + 1) % 3
        o2 = (lj + 2) % 3
        total += c2[o1, o2] + c2[o2, o1]
        for x in range(3):
            c2[x, lj] += c1[x]
        c1[lj] += 1
    return total


@njit(cache=True, nogil=True)
def _triangle_first_6lab(mt, mlab6, L, delta, first_attr):
    c1 = np.zeros(6, np.int64)
    c2 = np.zeros((6, 6), np.int64)
    for x in range(6):
        first_attr[x] = 0
    start = 0
    for j in range(L):
        tj = mt[j]
        lz = mlab6[j]
        dz = lz >> 1
        while mt[start] < tj - delta:
            lr = mlab6[start]
            c1[lr] -= 1
            for x in range(6):
                c2[lr, x] -= c1[x]
            start += 1
        for lx in range(6):
            dx = lx >> 1
            if dx == dz:
                continue
            dy = 3 - dz - dx
            first_attr[lx] += c2[lx, 2 * dy] + c2[lx, 2 * dy + 1]
        for x in range(6):
            c2[x, lz] += c1[x]
        c1[lz] += 1


@njit(cache=True, nogil=True)
def _count_triangles(src, dst, t, n_nodes, delta, anchor_mode, dorder,
                     dy_start, dy_umin, dy_vmax, counts):
    nd = dy_umin.size
    if nd < 3:
        return
    adeg = np.zeros(n_nodes, np.int64)
    for d in range(nd):
        adeg[dy_umin[d]] += 1
        adeg[dy_vmax[d]] += 1
    # rank nodes by (static degree, id); ties broken by id keep it total
    key = adeg * np.int64(n_nodes)
    for u in range(n_nodes):
        key[u] += u
    node_order = np.argsort(key, kind="mergesort")
    rank = np.empty(n_nodes, np.int64)
    for i in range(n_nodes):
        rank[node_order[i]] = i

    # half adjacency: each dyad stored under its lower-ranked endpoint;
    # neighbour ids come out sorted because dyads arrive in key order
    hdeg = np.zeros(n_nodes + 1, np.int64)
    for d in range(nd):
        u = dy_umin[d]
        v = dy_vmax[d]
        owner = u if rank[u] < rank[v] else v
        hdeg[owner + 1] += 1
    for u in range(n_nodes):
        hdeg[u + 1] += hdeg[u]
    hoff = hdeg
    hpos = hoff[:-1].copy()
    h_nbr = np.empty(nd, np.int64)
    h_dy = np.empty(nd, np.int64)
    for d in range(nd):
        u = dy_umin[d]
        v = dy_vmax[d]
        if rank[u] < rank[v]:
            owner, other = u, v
        else:
            owner, other = v, u
        h_nbr[hpos[owner]] = other
        h_dy[hpos[owner]] = d
        hpos[owner] += 1

    max_len = 0
    for d in range(nd):
        ln = dy_start[d + 1] - dy_start[d]
        if ln > max_len:
            max_len = ln
    mt = np.empty(3 * max_len, np.int64)
    mlab = np.empty(3 * max_len, np.int64)
    first_attr = np.zeros(6, np.int64)

    for d in range(nd):
        u = dy_umin[d]
        v = dy_vmax[d]
        if rank[u] < rank[v]:
            x, y = u, v
        else:
            x, y = v, u
        ix = hoff[x]
        ex = hoff[x + 1]
        iy = hoff[y]
        ey = hoff[y + 1]
        while ix < ex and iy < ey:
            wx = h_nbr[ix]
            wy = h_nbr[iy]
            if wx < wy:
                ix += 1
            elif wy < wx:
                iy += 1
            else:
                if wx != y and wx != x:
                    w = wx
                    d_xw = h_dy[ix]
                    d_yw = h_dy[iy]
                    # merge the three dyad streams in (time, seq) order
                    i1 = dy_start[d]
                    e1 = dy_start[d + 1]
                    i2 = dy_start[d_xw]
                    e2 = dy_start[d_xw + 1]
                    i3 = dy_start[d_yw]
                    e3 = dy_start[d_yw + 1]
                    L = 0
                    while i1 < e1 or i2 < e2 or i3 < e3:
                        g1 = dorder[i1] if i1 < e1 else np.int64(2**62)
                        g2 = dorder[i2] if i2 < e2 else np.int64(2**62)
                        g3 = dorder[i3] if i3 < e3 else np.int64(2**62)
                        if g1 <= g2 and g1 <= g3:
                            gi = g1
                            slot = 0
                            dd = d
                            i1 += 1
                        elif g2 <= g3:
                            gi = g2
                            slot = 1
                            dd = d_xw
                            i2 += 1
                        else:
                            gi = g3
                            slot = 2
                            dd = d_yw
                            i3 += 1
                        mt[L] = t[gi]
                        if anchor_mode == ANCHOR_CENTRE:
                            mlab[L] = slot
                        else:
                            flag = 0 if src[gi] == dy_umin[dd] else 1
                            mlab[L] = slot * 2 + flag
                        L += 1
                    if anchor_mode == ANCHOR_CENTRE:
                        total = _triangle_total_3lab(mt, mlab, L, delta)
                        if total > 0:
                            counts[x, TRIANGLE] += total
                            counts[y, TRIANGLE] += total
                            counts[w, TRIANGLE] += total
                    else:
                        _triangle_first_6lab(mt, mlab, L, delta, first_attr)
                        for slot in range(3):
                            if slot == 0:
                                dd = d
                            elif slot == 1:
                                dd = d_xw
                            else:
                                dd = d_yw
                            n0 = first_attr[slot * 2]
                            if n0 > 0:
                                counts[dy_umin[dd], TRIANGLE] += n0
                            n1 = first_attr[slot * 2 + 1]
                            if n1 > 0:
                                counts[dy_vmax[dd], TRIANGLE] += n1
                ix += 1
                iy += 1


@njit(cache=True, nogil=True)
def count_motifs(src, dst, t, n_nodes, delta, anchor_mode):
    """Per-node, per-category motif counts for one window's events."""
    counts = np.zeros((n_nodes, 5), np.int64)
    m = src.size
    if m < 3:
        return counts

    _count_stars(src, dst, t, n_nodes, delta, anchor_mode, counts)

    # dyad grouping shared by the two-node and triangle passes
    keys = np.empty(m, np.int64)
    for i in range(m):
        a = src[i]
        b = dst[i]
        if a < b:
            keys[i] = a * n_nodes + b
        else:
            keys[i] = b * n_nodes + a
    dorder = np.argsort(keys, kind="mergesort")
    nd = 0
    prev = np.int64(-1)
    for j in range(m):
        kv = keys[dorder[j]]
        if kv != prev:
            nd += 1
            prev = kv
    dy_start = np.empty(nd + 1, np.int64)
    dy_umin = np.empty(nd, np.int64)
    dy_vmax = np.empty(nd, np.int64)
    nd = 0
    prev = np.int64(-1)
    for j in range(m):
        kv = keys[dorder[j]]
        if kv != prev:
            dy_start[nd] = j
            dy_umin[nd] = kv // n_nodes
            dy_vmax[nd] = kv % n_nodes
            nd += 1
            prev = kv
    dy_start[nd] = m

    _count_two_node(src, dst, t, delta, anchor_mode, dorder, dy_start,
                    dy_umin, dy_vmax, counts)
    _count_triangles(src, dst, t, n_nodes, delta, anchor_mode, dorder,
                     dy_start, dy_umin, dy_vmax, counts)
    return counts
