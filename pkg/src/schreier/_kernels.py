"""Hot inner loops shared by the orientation, coloring and statistics code.

Every kernel is written against flat NumPy arrays so it can run in two modes:
compiled with numba's @njit (the default whenever numba imports), or the same
function interpreted by CPython. Set SCHREIER_NUMBA=0 to force the fallback.
Both paths produce bit-identical results; benchmarks/bench_kernels.py compares
their speed.
"""

from __future__ import annotations

import os

import numpy as np


def numba_requested() -> bool:
    return os.environ.get("SCHREIER_NUMBA", "1").strip().lower() not in ("0", "false", "off")


def _resolve() -> bool:
    if not numba_requested():
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _resolve()

if NUMBA_ENABLED:
    from numba import njit as _njit

    def _jit(fn):
        return _njit(cache=True)(fn)
else:
    def _jit(fn):
        return fn


@_jit
def euler_orient(adj_indptr, adj_darts, dart_other, heads):
    """Orient every edge along an Eulerian walk; balanced when all degrees are even.

    heads[e] receives the head dart (2e or 2e+1) of edge e.
    """
    n = adj_indptr.shape[0] - 1
    used = np.zeros(2 * heads.shape[0], np.bool_)
    cursor = adj_indptr[:n].copy()
    for v0 in range(n):
        while True:
            c = cursor[v0]
            end = adj_indptr[v0 + 1]
            while c < end and used[adj_darts[c]]:
                c += 1
            cursor[v0] = c
            if c == end:
                break
            cur = v0
            while True:
                c2 = cursor[cur]
                end2 = adj_indptr[cur + 1]
                while c2 < end2 and used[adj_darts[c2]]:
                    c2 += 1
                cursor[cur] = c2
                if c2 == end2:
                    break  # even degrees: a walk only gets stuck back at its start
                d = adj_darts[c2]
                used[d] = True
                used[d ^ 1] = True
                heads[d >> 1] = d ^ 1
                cur = dart_other[d]
    return 0


@_jit
def konig_insert(eu, ev, order, table, colors, chain):
    """Insert edges one by one, fixing clashes by swapping a two-color chain.

    table is (n_vertices, n_colors) filled with -1 (edge id occupying each
    color slot); colors is the per-edge output, 1-based, 0 on entry.
    Returns 0, -1 on color-table overflow, -2 on a runaway chain, -3 when the
    chain reaches the far endpoint (input not bipartite).
    """
    ncol = table.shape[1]
    m = colors.shape[0]
    for k in range(order.shape[0]):
        e = order[k]
        a = eu[e]
        b = ev[e]
        alpha = -1
        for c in range(ncol):
            if table[a, c] < 0:
                alpha = c
                break
        if alpha < 0:
            return -1
        if table[b, alpha] < 0:
            colors[e] = alpha + 1
            table[a, alpha] = e
            table[b, alpha] = e
            continue
        beta = -1
        for c in range(ncol):
            if table[b, c] < 0:
                beta = c
                break
        if beta < 0:
            return -1
        # alpha is free at a but used at b: swap the alpha/beta chain from b.
        # Bipartiteness keeps the chain away from a.
        cnt = 0
        x = b
        seek = alpha
        while True:
            f = table[x, seek]
            if f < 0:
                break
            chain[cnt] = f
            cnt += 1
            if cnt > m:
                return -2
            if ev[f] == x:
                x = eu[f]
            else:
                x = ev[f]
            if x == a:
                return -3
            seek = beta if seek == alpha else alpha
        for i in range(cnt):
            f = chain[i]
            c = colors[f] - 1
            table[eu[f], c] = -1
            table[ev[f], c] = -1
        for i in range(cnt):
            f = chain[i]
            old = colors[f] - 1
            new = beta if old == alpha else alpha
            colors[f] = new + 1
            table[eu[f], new] = f
            table[ev[f], new] = f
        colors[e] = alpha + 1
        table[a, alpha] = e
        table[b, alpha] = e
    return 0


@_jit
def bfs_ball(adj_indptr, adj_darts, dart_other, src, radius, dist, queue, qdist):
    """Truncated breadth-first search; radius < 0 means unbounded.

    dist must be -1 everywhere on entry and is restored before returning, so
    the buffer can be reused across calls. queue/qdist receive the visited
    vertices and their distances in BFS order; returns the visit count.
    """
    dist[src] = 0
    queue[0] = src
    qdist[0] = 0
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        dv = qdist[head]
        head += 1
        if radius >= 0 and dv == radius:
            continue
        for c in range(adj_indptr[v], adj_indptr[v + 1]):
            u = dart_other[adj_darts[c]]
            if dist[u] < 0:
                dist[u] = dv + 1
                queue[tail] = u
                qdist[tail] = dv + 1
                tail += 1
    for i in range(tail):
        dist[queue[i]] = -1
    return tail


@_jit
def tree_orientation_samples(half_deg, parent_edge, parent_out_bit,
                             elist_indptr, elist_edges, elist_outbit,
                             draw_indptr, uniforms, masks, scratch_e, scratch_b):
    """Draw balanced orientations of a tree window, one bitmask per sample.

    Bit e of a mask is 1 when edge e points from its first endpoint to its
    second. Vertices are processed root-first; each sample consumes exactly
    draw_indptr[-1] uniform variates so the layout is reproducible.
    """
    nproc = half_deg.shape[0]
    total = draw_indptr[nproc]
    for s in range(masks.shape[0]):
        mask = 0
        base = s * total
        for i in range(nproc):
            lo = elist_indptr[i]
            ln = elist_indptr[i + 1] - lo
            for t in range(ln):
                scratch_e[t] = elist_edges[lo + t]
                scratch_b[t] = elist_outbit[lo + t]
            need = half_deg[i]
            pe = parent_edge[i]
            if pe >= 0:
                if ((mask >> pe) & 1) == parent_out_bit[i]:
                    need = need - 1  # parent edge already points outward
            for t in range(need):
                u = uniforms[base + draw_indptr[i] + t]
                j = t + int(u * (ln - t))
                if j >= ln:
                    j = ln - 1
                tmp = scratch_e[t]
                scratch_e[t] = scratch_e[j]
                scratch_e[j] = tmp
                tmpb = scratch_b[t]
                scratch_b[t] = scratch_b[j]
                scratch_b[j] = tmpb
            for t in range(ln):
                if t < need:
                    bit = scratch_b[t]
                else:
                    bit = 1 - scratch_b[t]
                if bit == 1:
                    mask |= 1 << scratch_e[t]
        masks[s] = mask
    return 0
