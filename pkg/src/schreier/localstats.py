"""Canonical codes for decorated rooted r-balls, neighborhood distributions,
and the exact invariance checks that stand in for unimodularity at finite
scale.

Codes are computed by exact canonicalization, never hashing: two balls get
equal codes iff they are isomorphic as rooted decorated multigraphs. Graphs
whose decoration makes every vertex's incident (direction, color) keys
distinct take a linear-time traversal; everything else goes through an
exhaustive minimum-code search over connected orderings with refinement
pruning, guarded by a work budget (env SCHREIER_WORK_BUDGET, loud error)."""

from __future__ import annotations

import os
import sys
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .graph import MultiGraph, ball, rng_for

DEFAULT_WORK_BUDGET = 2_000_000


class WorkBudgetExceeded(RuntimeError):
    pass


def work_budget() -> int:
    raw = os.environ.get("SCHREIER_WORK_BUDGET", "")
    return int(raw) if raw.strip() else DEFAULT_WORK_BUDGET


@dataclass(frozen=True)
class BallCode:
    radius: int
    code: bytes

    @property
    def hex(self) -> str:
        return self.code.hex()


def _colors_array(coloring) -> np.ndarray | None:
    if coloring is None:
        return None
    return coloring if isinstance(coloring, np.ndarray) else coloring.colors


def _heads_array(orientation) -> np.ndarray | None:
    if orientation is None:
        return None
    return orientation if isinstance(orientation, np.ndarray) else orientation.heads


class _Local:
    """A vertex subset of g with per-dart marks, reindexed from 0."""

    def __init__(self, g: MultiGraph, verts, heads, colors):
        self.nloc = len(verts)
        index = {int(v): i for i, v in enumerate(verts)}
        adj_wl = [[] for _ in range(self.nloc)]   # every in-set dart, loops twice
        adj_row = [[] for _ in range(self.nloc)]  # non-loop darts
        loops_row = [[] for _ in range(self.nloc)]
        for v in verts:
            i = index[int(v)]
            for c in range(g.adj_indptr[v], g.adj_indptr[v + 1]):
                d = int(g.adj_darts[c])
                u = int(g.dart_other[d])
                if u not in index:
                    continue
                e = d >> 1
                col = int(colors[e]) if colors is not None else 0
                if u == int(v):
                    mk = (0, col)
                    adj_wl[i].append((i, mk))
                    if d % 2 == 0:  # record each loop edge once
                        loops_row[i].append(mk)
                else:
                    if heads is None:
                        of = 0
                    else:
                        of = 2 if g.dart_owner[heads[e]] == v else 1
                    mk = (of, col)
                    adj_wl[i].append((index[u], mk))
                    adj_row[i].append((index[u], mk))
        self.index = index
        self.adj_wl = adj_wl
        self.adj_row = adj_row
        self.loops_row = loops_row


def _rank(values: list) -> list[int]:
    lookup = {v: i for i, v in enumerate(sorted(set(values)))}
    return [lookup[v] for v in values]


def _refined_colors(loc: _Local, base: list[tuple]) -> list[int]:
    """Color refinement to stability; cell count grows monotonically, so at
    most nloc rounds run."""
    sig = [(base[i], len(loc.adj_wl[i]),
            tuple(sorted(mk for _, mk in loc.adj_wl[i])))
           for i in range(loc.nloc)]
    colors = _rank(sig)
    for _ in range(loc.nloc + 1):
        sig = [(colors[i], tuple(sorted((colors[j], mk) for j, mk in loc.adj_wl[i])))
               for i in range(loc.nloc)]
        new = _rank(sig)
        stable = len(set(new)) == len(set(colors))
        colors = new
        if stable:
            break
    return colors


def _min_code_search(loc: _Local, wl: list[int], pinned: list[int],
                     budget: list[int] | None = None):
    """Lexicographically minimal row code over connected orderings.

    Rows are built from refinement colors and edges back to already-placed
    vertices, so the minimum is a canonical form of the (decorated) graph.
    Only candidates achieving the minimal next row are expanded; equal rows
    are genuine local symmetries and all get explored.
    """
    if budget is None:
        budget = [work_budget()]
    n = loc.nloc
    pos = [-1] * n
    order: list[int] = []

    def row_for(w):
        ent = [(pos[j], mk) for j, mk in loc.adj_row[w] if pos[j] >= 0]
        own = len(order)
        ent.extend((own, mk) for mk in loc.loops_row[w])
        ent.sort()
        return (wl[w], len(ent), tuple(ent))

    def place(w):
        pos[w] = len(order)
        order.append(w)

    def unplace(w):
        pos[w] = -1
        order.pop()

    def rec():
        budget[0] -= 1
        if budget[0] < 0:
            raise WorkBudgetExceeded(
                "canonicalization work budget exceeded; raise SCHREIER_WORK_BUDGET")
        if len(order) == n:
            return (), ()
        if order:
            cands = [w for w in range(n) if pos[w] < 0
                     and any(pos[j] >= 0 for j, _ in loc.adj_row[w])]
            if not cands:
                raise ValueError("vertex set is not connected")
        else:
            lo = min(wl[w] for w in range(n))
            cands = [w for w in range(n) if wl[w] == lo]
        lo_wl = min(wl[w] for w in cands)
        rows = [(row_for(w), w) for w in cands if wl[w] == lo_wl]
        min_row = min(r for r, _ in rows)
        best = None
        best_ord = None
        for r, w in rows:
            if r != min_row:
                continue
            place(w)
            sub, sub_ord = rec()
            unplace(w)
            if best is None or sub < best:
                best = sub
                best_ord = (w,) + sub_ord
        return (min_row,) + best, best_ord

    prefix = []
    for w in pinned:
        prefix.append(row_for(w))
        place(w)
    limit = max(sys.getrecursionlimit(), 4 * n + 2000)
    sys.setrecursionlimit(limit)
    tail, tail_ord = rec()
    return tuple(prefix) + tail, tuple(pinned) + (tail_ord or ())


def _min_code_unrooted(loc: _Local, base: list[tuple]):
    """Minimum over candidate roots of the rooted minimal code.

    Each candidate from the smallest unrooted refinement cell is
    individualized and the refinement recomputed, which keeps the search
    near-deterministic on locally symmetric graphs."""
    wl0 = _refined_colors(loc, base)
    lo = min(wl0)
    budget = [work_budget()]
    best = None
    best_order = None
    for w in range(loc.nloc):
        if wl0[w] != lo:
            continue
        base_w = [base[i] + ((1,) if i == w else (0,)) for i in range(loc.nloc)]
        wl = _refined_colors(loc, base_w)
        rows, order = _min_code_search(loc, wl, [w], budget)
        if best is None or rows < best:
            best = rows
            best_order = order
    return best, best_order


def _pack(header: list[int], rows) -> bytes:
    flat = list(header)
    flat.append(len(rows))
    for color, nent, ents in rows:
        flat.append(color)
        flat.append(nent)
        for p, (of, col) in ents:
            flat.extend((p, of, col))
    return np.asarray(flat, np.int64).tobytes()


# ---------------------------------------------------------------------------
# Rigid fast path


def _vertex_items(g: MultiGraph, v: int, heads, colors, index=None):
    """(key, neighbor) items at v restricted to `index` when given; non-loop
    darts keyed (1|2 or 0, color), loop edges keyed (3, color) once."""
    items = []
    for c in range(g.adj_indptr[v], g.adj_indptr[v + 1]):
        d = int(g.adj_darts[c])
        u = int(g.dart_other[d])
        if index is not None and u not in index:
            continue
        e = d >> 1
        col = int(colors[e]) if colors is not None else 0
        if u == v:
            if d % 2 == 0:
                items.append(((3, col), v))
        else:
            if heads is None:
                of = 0
            else:
                of = 2 if g.dart_owner[heads[e]] == v else 1
            items.append(((of, col), u))
    return items


def _is_rigid(g: MultiGraph, heads, colors) -> bool:
    """Whole-graph property so every ball of the same graph takes one path."""
    if heads is None and colors is None:
        return g.m == 0
    for v in range(g.n):
        keys = [k for k, _ in _vertex_items(g, v, heads, colors)]
        if len(keys) != len(set(keys)):
            return False
    return True


def _rigid_code(g: MultiGraph, root: int, verts, heads, colors, header) -> bytes:
    index = {int(v) for v in verts}
    idx = {root: 0}
    order = [root]
    rows = []
    qi = 0
    while qi < len(order):
        v = order[qi]
        qi += 1
        items = _vertex_items(g, v, heads, colors, index)
        items.sort(key=lambda t: t[0])
        row = []
        for key, u in items:
            if u not in idx:
                idx[u] = len(order)
                order.append(u)
            row.append((idx[u], key))
        rows.append((0, len(row), tuple(row)))
    return _pack(header, rows)


# ---------------------------------------------------------------------------
# Ball codes


def ball_code(g: MultiGraph, root: int, r: int, orientation=None,
              coloring=None) -> BallCode:
    """Canonical code of the rooted r-ball (the induced decorated subgraph on
    vertices within distance r). Loop orientations are not part of the
    isomorphism type and are ignored."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    heads = _heads_array(orientation)
    colors = _colors_array(coloring)
    verts, dists = ball(g, root, r)
    header = [1, r, int(heads is not None), int(colors is not None), 1]
    if _is_rigid(g, heads, colors):
        return BallCode(r, _rigid_code(g, root, verts, heads, colors, header))
    header[0] = 0
    loc = _Local(g, verts, heads, colors)
    base = [(0,)] * loc.nloc
    for v, dv in zip(verts, dists):
        base[loc.index[int(v)]] = (int(dv),)
    wl = _refined_colors(loc, base)
    rows, _ = _min_code_search(loc, wl, [loc.index[root]])
    return BallCode(r, _pack(header, rows))


def birooted_code(g: MultiGraph, o: int, o2: int, r: int, orientation=None,
                  coloring=None) -> BallCode:
    """Canonical code of the union of the r-balls around the ordered root
    pair (o, o2); swapping the pair is a different code unless the birooted
    balls are isomorphic."""
    heads = _heads_array(orientation)
    colors = _colors_array(coloring)
    v1, d1 = ball(g, o, r)
    v2, d2 = ball(g, o2, r)
    far = r + 1
    dist1 = {int(v): int(d) for v, d in zip(v1, d1)}
    dist2 = {int(v): int(d) for v, d in zip(v2, d2)}
    verts = sorted(set(dist1) | set(dist2))
    loc = _Local(g, verts, heads, colors)
    base = [None] * loc.nloc
    for v in verts:
        base[loc.index[v]] = (dist1.get(v, far), dist2.get(v, far),
                              1 if v == o2 else 0)
    wl = _refined_colors(loc, base)
    header = [0, r, int(heads is not None), int(colors is not None), 2]
    rows, _ = _min_code_search(loc, wl, [loc.index[o]])
    return BallCode(r, _pack(header, rows))


def canonical_form(g: MultiGraph, verts=None, orientation=None, coloring=None):
    """Unrooted canonical (code, vertex order) of a connected vertex subset.

    Isomorphic decorated subgraphs yield equal codes, and their canonical
    orders realize an isomorphism, which lets callers transfer per-edge data
    consistently across copies."""
    heads = _heads_array(orientation)
    colors = _colors_array(coloring)
    if verts is None:
        verts = list(range(g.n))
    loc = _Local(g, verts, heads, colors)
    base = [(0,)] * loc.nloc
    header = [0, -1, int(heads is not None), int(colors is not None), 0]
    rows, order = _min_code_unrooted(loc, base)
    inv = {i: int(v) for v, i in loc.index.items()}
    return _pack(header, rows), tuple(inv[i] for i in order)


# ---------------------------------------------------------------------------
# Neighborhood distributions


@dataclass(frozen=True)
class NeighborhoodDistribution:
    """Distribution over ball codes; sample_count 0 means exact enumeration
    over all roots, so masses are rationals with denominator total."""

    radius: int
    counts: dict
    total: int
    sample_count: int = 0

    def masses(self) -> dict:
        return {k: c / self.total for k, c in self.counts.items()}

    def mass(self, code: bytes) -> float:
        return self.counts.get(code, 0) / self.total


def neighborhood_distribution(g: MultiGraph, r: int, orientation=None,
                              coloring=None, sample=None) -> NeighborhoodDistribution:
    """Exact mode averages over every vertex; sample=(N, seed) draws N
    uniform roots instead."""
    if g.n == 0:
        raise ValueError("graph has no vertices")
    if sample is None:
        roots = range(g.n)
        sample_count = 0
    else:
        n_samples, seed = sample
        if n_samples < 1:
            raise ValueError("need at least one sample")
        roots = rng_for(seed).integers(0, g.n, n_samples).tolist()
        sample_count = n_samples
    counts: Counter = Counter()
    for v in roots:
        counts[ball_code(g, int(v), r, orientation, coloring).code] += 1
    return NeighborhoodDistribution(radius=r, counts=dict(counts),
                                    total=len(list(roots)) if sample is None else sample_count,
                                    sample_count=sample_count)


def tv_distance(p: NeighborhoodDistribution, q: NeighborhoodDistribution) -> float:
    """(1/2) sum |p - q| over the union of supports; exact 0 for equal counts."""
    if p.radius != q.radius:
        raise ValueError(f"radius mismatch: {p.radius} != {q.radius}")
    # sorted keys keep float accumulation identical across processes
    keys = sorted(set(p.counts) | set(q.counts))
    if p.total == q.total:
        return sum(abs(p.counts.get(k, 0) - q.counts.get(k, 0)) for k in keys) / (2 * p.total)
    return 0.5 * sum(abs(p.counts.get(k, 0) / p.total - q.counts.get(k, 0) / q.total)
                     for k in keys)


def _top_codes(counts: Counter, k: int = 5):
    return [(code.hex(), cnt) for code, cnt in
            sorted(counts.items(), key=lambda t: (-t[1], t[0]))[:k]]


def involution_invariance_check(g: MultiGraph, r: int, sample=None):
    """TV distance between the birooted r-ball distribution and its root-swap.

    Exact mode puts uniform mass on darts (the degree-weighted root measure),
    under which the swap is a relabeling of darts, so finite graphs come out
    exactly 0. Sampled mode draws a uniform root then a uniform neighbor,
    which is a genuine diagnostic on irregular graphs."""
    if g.m == 0:
        raise ValueError("graph has no edges")
    p: Counter = Counter()
    q: Counter = Counter()
    if sample is None:
        codes = {}
        for d in range(2 * g.m):
            o = int(g.dart_owner[d])
            o2 = int(g.dart_other[d])
            codes[d] = birooted_code(g, o, o2, r).code
        for d in range(2 * g.m):
            p[codes[d]] += 1
            q[codes[d ^ 1]] += 1
        total_p = total_q = 2 * g.m
        mode = "exact"
    else:
        n_samples, seed = sample
        rng = rng_for(seed)
        for _ in range(n_samples):
            o = int(rng.integers(0, g.n))
            deg = g.degree(o)
            if deg == 0:
                continue
            d = int(g.adj_darts[g.adj_indptr[o] + rng.integers(0, deg)])
            o2 = int(g.dart_other[d])
            p[birooted_code(g, o, o2, r).code] += 1
            q[birooted_code(g, o2, o, r).code] += 1
        total_p = sum(p.values())
        total_q = sum(q.values())
        if not total_p:
            raise ValueError("all sampled roots were isolated")
        mode = "sampled"
    keys = sorted(set(p) | set(q))
    if total_p == total_q:
        tv = sum(abs(p.get(k, 0) - q.get(k, 0)) for k in keys) / (2 * total_p)
    else:
        tv = 0.5 * sum(abs(p.get(k, 0) / total_p - q.get(k, 0) / total_q) for k in keys)
    report = {"radius": r, "mode": mode, "support": len(keys),
              "top_codes": _top_codes(p), "tv": tv}
    return tv, report


# ---------------------------------------------------------------------------
# Generator shift check (finite Schreier invariance)


def _shift_map(dec, color: int) -> np.ndarray:
    """v -> head of its s-colored out-edge; v itself when that edge is not
    unique (corrupted decorations), so the TV below reports the damage."""
    g = dec.base
    heads = dec.orientation.heads
    colors = dec.coloring.colors
    shift = np.arange(g.n, dtype=np.int64)
    for v in range(g.n):
        targets = []
        for c in range(g.adj_indptr[v], g.adj_indptr[v + 1]):
            d = int(g.adj_darts[c])
            e = d >> 1
            if colors[e] != color:
                continue
            if g.is_loop(e):
                if d % 2 == 0:
                    targets.append(v)
            elif int(g.dart_owner[heads[e] ^ 1]) == v:
                targets.append(int(g.dart_owner[heads[e]]))
        if len(targets) == 1:
            shift[v] = targets[0]
    return shift


def decorated_root_codes(dec, r: int) -> list[bytes]:
    """Decorated r-ball code at every vertex (reused across shift checks)."""
    g = dec.base
    return [ball_code(g, v, r, dec.orientation, dec.coloring).code
            for v in range(g.n)]


def generator_shift_check(dec, color: int, r: int, _codes=None) -> float:
    """TV between decorated r-ball codes at a uniform root o and at s.o;
    exactly 0 for valid decorations because s permutes the vertices."""
    if not 1 <= color <= dec.d:
        raise ValueError(f"color {color} outside palette [1..{dec.d}]")
    codes = decorated_root_codes(dec, r) if _codes is None else _codes
    shift = _shift_map(dec, color)
    p = Counter(codes)
    q = Counter(codes[int(shift[v])] for v in range(dec.base.n))
    keys = sorted(set(p) | set(q))
    return sum(abs(p.get(k, 0) - q.get(k, 0)) for k in keys) / (2 * dec.base.n)


def generator_shift_report(dec, radii=(1, 2, 3)) -> dict:
    """All (color, radius) TVs, computing each radius's codes once."""
    out = {}
    for r in radii:
        codes = decorated_root_codes(dec, r)
        for s in range(1, dec.d + 1):
            out[(s, r)] = generator_shift_check(dec, s, r, _codes=codes)
    return out


# ---------------------------------------------------------------------------
# Distribution dump format: "<hex code> <count> <mass>" sorted by code.


def dump_distribution(nd: NeighborhoodDistribution) -> str:
    lines = []
    for code in sorted(nd.counts):
        cnt = nd.counts[code]
        lines.append(f"{code.hex()} {cnt} {cnt / nd.total:.12g}")
    return "\n".join(lines) + ("\n" if lines else "")
