"""Dart-based finite multigraphs, traversal, and seeded instance generators.

Edge e owns the two darts 2e and 2e+1; the partner of dart d is d ^ 1. Loops
are edges whose darts share an owner and contribute 2 to its degree. All
arrays are frozen after construction, so graphs are safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import bfs_ball


class MultiGraph:
    """Undirected multigraph on vertices 0..n-1 with loops and parallel edges."""

    def __init__(self, n: int, edges):
        edges = list(edges)
        m = len(edges)
        eu = np.empty(m, np.int64)
        ev = np.empty(m, np.int64)
        for e, (u, v) in enumerate(edges):
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {e} endpoint out of range: ({u}, {v}) with n={n}")
            eu[e] = u
            ev[e] = v
        self.n = n
        self.m = m
        self.eu = eu
        self.ev = ev
        dart_owner = np.empty(2 * m, np.int64)
        dart_owner[0::2] = eu
        dart_owner[1::2] = ev
        self.dart_owner = dart_owner
        self.dart_other = dart_owner[np.arange(2 * m) ^ 1] if m else dart_owner.copy()
        counts = np.bincount(dart_owner, minlength=n) if m else np.zeros(n, np.int64)
        indptr = np.zeros(n + 1, np.int64)
        np.cumsum(counts, out=indptr[1:])
        adj = np.empty(2 * m, np.int64)
        cursor = indptr[:-1].copy()
        for d in range(2 * m):
            v = dart_owner[d]
            adj[cursor[v]] = d
            cursor[v] += 1
        self.adj_indptr = indptr
        self.adj_darts = adj
        for a in (self.eu, self.ev, self.dart_owner, self.dart_other,
                  self.adj_indptr, self.adj_darts):
            a.setflags(write=False)

    def degree(self, v: int) -> int:
        return int(self.adj_indptr[v + 1] - self.adj_indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.adj_indptr)

    def endpoints(self, e: int) -> tuple[int, int]:
        return int(self.eu[e]), int(self.ev[e])

    def is_loop(self, e: int) -> bool:
        return self.eu[e] == self.ev[e]

    def edges(self):
        for e in range(self.m):
            yield int(self.eu[e]), int(self.ev[e])

    def incident_edges(self, v: int):
        """Edge ids at v in dart order; a loop appears twice."""
        for c in range(self.adj_indptr[v], self.adj_indptr[v + 1]):
            yield int(self.adj_darts[c]) >> 1

    def neighbors(self, v: int):
        for c in range(self.adj_indptr[v], self.adj_indptr[v + 1]):
            yield int(self.dart_other[self.adj_darts[c]])

    def __repr__(self):
        return f"MultiGraph(n={self.n}, m={self.m})"


def build(edge_list, n: int) -> MultiGraph:
    """Build a multigraph with exactly one edge per input pair (loops allowed)."""
    return MultiGraph(n, edge_list)


def degree(g: MultiGraph, v: int) -> int:
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range")
    return g.degree(v)


def _bfs_buffers(g: MultiGraph):
    return (np.full(g.n, -1, np.int64), np.empty(g.n, np.int64), np.empty(g.n, np.int64))


def ball(g: MultiGraph, src: int, radius: int) -> tuple[np.ndarray, np.ndarray]:
    """Vertices within `radius` of src in BFS order, with their distances."""
    dist, queue, qdist = _bfs_buffers(g)
    cnt = bfs_ball(g.adj_indptr, g.adj_darts, g.dart_other, src, radius, dist, queue, qdist)
    return queue[:cnt].copy(), qdist[:cnt].copy()


def components(g: MultiGraph) -> list[list[int]]:
    """Connected components as sorted vertex lists, ordered by smallest member."""
    dist, queue, qdist = _bfs_buffers(g)
    seen = np.zeros(g.n, bool)
    parts = []
    for v in range(g.n):
        if seen[v]:
            continue
        cnt = bfs_ball(g.adj_indptr, g.adj_darts, g.dart_other, v, -1, dist, queue, qdist)
        part = sorted(int(u) for u in queue[:cnt])
        seen[part] = True
        parts.append(part)
    return parts


def component_labels(g: MultiGraph) -> np.ndarray:
    labels = np.full(g.n, -1, np.int64)
    for i, part in enumerate(components(g)):
        labels[part] = i
    return labels


def relabel_vertices(g: MultiGraph, perm) -> MultiGraph:
    """Rename vertex v to perm[v]; edge order and dart sides are preserved."""
    perm = np.asarray(perm, np.int64)
    return MultiGraph(g.n, zip(perm[g.eu], perm[g.ev]))


# ---------------------------------------------------------------------------
# Seeded generators


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based Philox generator; distinct streams are independent."""
    bits = np.random.Philox(key=np.uint64(seed))
    if stream:
        bits = bits.jumped(stream)
    return np.random.Generator(bits)


KINDS = ("configuration_model_regular", "bipartite_regular", "even_tree_window",
         "sparse_chord_cycle")


@dataclass(frozen=True)
class GraphSpec:
    """Parameters for `generate`; the same spec always yields the same graph."""

    kind: str
    seed: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        p = self.params
        if self.kind == "configuration_model_regular":
            if (p["degree"] * p["n"]) % 2 != 0:
                raise ValueError("configuration model needs degree * n even")
            if p["degree"] < 0 or p["n"] < 0:
                raise ValueError("degree and n must be nonnegative")
        elif self.kind == "bipartite_regular":
            if p["d"] < 0 or p["n_per_side"] <= 0:
                raise ValueError("bipartite_regular needs d >= 0 and n_per_side > 0")
        elif self.kind == "even_tree_window":
            if p["depth"] < 1 or p["half_degree_cap"] < 1:
                raise ValueError("even_tree_window needs depth >= 1 and half_degree_cap >= 1")
        elif self.kind == "sparse_chord_cycle":
            if p["chord_gap"] < 3:
                raise ValueError("sparse_chord_cycle needs chord_gap >= 3")
            if p["cycle_len"] % 2 != 0 or p["cycle_len"] < 2 * p["chord_gap"]:
                raise ValueError("cycle_len must be even and at least 2 * chord_gap")


def generate(spec: GraphSpec) -> MultiGraph:
    """Instantiate a GraphSpec. Pure in the spec: same seed, same graph."""
    p = spec.params
    if spec.kind == "configuration_model_regular":
        return _configuration_model(p["degree"], p["n"], spec.seed)
    if spec.kind == "bipartite_regular":
        return _bipartite_regular(p["d"], p["n_per_side"], spec.seed)
    if spec.kind == "even_tree_window":
        return _even_tree_window(p["depth"], p["half_degree_cap"], spec.seed)
    if spec.kind == "sparse_chord_cycle":
        return _sparse_chord_cycle(p["cycle_len"], p["chord_gap"])
    raise ValueError(spec.kind)


def _configuration_model(degree: int, n: int, seed: int) -> MultiGraph:
    rng = rng_for(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), degree)
    rng.shuffle(stubs)
    return MultiGraph(n, zip(stubs[0::2], stubs[1::2]))


def _bipartite_regular(d: int, n_per_side: int, seed: int) -> MultiGraph:
    rng = rng_for(seed)
    left = np.repeat(np.arange(n_per_side, dtype=np.int64), d)
    right = np.repeat(np.arange(n_per_side, 2 * n_per_side, dtype=np.int64), d)
    rng.shuffle(right)
    return MultiGraph(2 * n_per_side, zip(left, right))


def _even_tree_window(depth: int, half_degree_cap: int, seed: int) -> MultiGraph:
    # Internal vertices get even degree 2k, k uniform in [1, cap]; the last
    # layer is left as unconstrained boundary leaves.
    rng = rng_for(seed)
    edges = []
    next_id = 1
    frontier = [(0, 0, False)]  # vertex, depth, has_parent
    while frontier:
        v, lvl, has_parent = frontier.pop(0)
        if lvl == depth:
            continue
        k = int(rng.integers(1, half_degree_cap + 1))
        n_children = 2 * k - (1 if has_parent else 0)
        for _ in range(n_children):
            u = next_id
            next_id += 1
            edges.append((v, u))
            frontier.append((u, lvl + 1, True))
    return MultiGraph(next_id, edges)


def _sparse_chord_cycle(cycle_len: int, chord_gap: int) -> MultiGraph:
    # Chords are paths of length chord_gap between cycle positions spaced at
    # least 2*chord_gap apart, so degree-3 vertices stay pairwise >= chord_gap
    # apart and every cycle stays even (bipartite).
    L, g = cycle_len, chord_gap
    k = L // (2 * g)
    s = L // k
    edges = [(i, (i + 1) % L) for i in range(L)]
    next_id = L
    for i in range(k):
        a = i * s
        b = (a + g) % L
        prev = a
        for _ in range(g - 1):
            edges.append((prev, next_id))
            prev = next_id
            next_id += 1
        edges.append((prev, b))
    return MultiGraph(next_id, edges)


# ---------------------------------------------------------------------------
# Edge-list interchange format: "n m" then m lines "u v" (loops as "u u").


def to_edge_list_text(g: MultiGraph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{int(g.eu[e])} {int(g.ev[e])}" for e in range(g.m))
    return "\n".join(lines) + "\n"


def from_edge_list_text(text: str) -> MultiGraph:
    tokens = text.split()
    if len(tokens) < 2:
        raise ValueError("edge-list text needs a leading 'n m' header")
    n, m = int(tokens[0]), int(tokens[1])
    if len(tokens) != 2 + 2 * m:
        raise ValueError(f"expected {m} edges, found {(len(tokens) - 2) // 2}")
    it = iter(tokens[2:])
    edges = [(int(u), int(v)) for u, v in zip(it, it)]
    return MultiGraph(n, edges)


def write_edge_list(g: MultiGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(to_edge_list_text(g))


def read_edge_list(path) -> MultiGraph:
    with open(path) as fh:
        return from_edge_list_text(fh.read())
