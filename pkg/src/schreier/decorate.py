"""Schreier decorations: orientation plus [d]-coloring with one in- and one
out-edge per color at every vertex, equivalently d vertex permutations.
Built for 2d-regular multigraphs via orient -> double cover -> Kőnig ->
pull back."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .coloring import EdgeColoring, double_cover, konig_color
from .graph import MultiGraph
from .orientation import Orientation, eulerian_orientation


@dataclass(frozen=True)
class SchreierDecoration:
    base: MultiGraph
    orientation: Orientation
    coloring: EdgeColoring
    d: int

    def sigma(self) -> list[np.ndarray]:
        """Permutations sigma[s-1](u) = head of the unique s-colored out-edge
        at u; loops are fixed points."""
        g = self.base
        out = [np.full(g.n, -1, np.int64) for _ in range(self.d)]
        for e in range(g.m):
            s = int(self.coloring.colors[e]) - 1
            if g.is_loop(e):
                out[s][g.eu[e]] = g.eu[e]
            else:
                out[s][self.orientation.source_vertex(e)] = self.orientation.head_vertex(e)
        return out


def verify_decoration(dec: SchreierDecoration):
    """Checks every vertex has exactly one in- and one out-edge of each color
    (a loop counts as one of each) and that every sigma is a bijection.
    Returns (ok, first violation description or None)."""
    g = dec.base
    d = dec.d
    colors = dec.coloring.colors
    if g.m and (colors.min() < 1 or colors.max() > d):
        e = int(np.nonzero((colors < 1) | (colors > d))[0][0])
        return False, f"edge {e} has color {int(colors[e])} outside [1..{d}]"
    out = np.zeros((g.n, d), np.int64)
    inn = np.zeros((g.n, d), np.int64)
    for e in range(g.m):
        s = int(colors[e]) - 1
        if g.is_loop(e):
            out[g.eu[e], s] += 1
            inn[g.eu[e], s] += 1
        else:
            out[dec.orientation.source_vertex(e), s] += 1
            inn[dec.orientation.head_vertex(e), s] += 1
    for v in range(g.n):
        for s in range(d):
            if out[v, s] != 1:
                return False, f"vertex {v} has {int(out[v, s])} outgoing edges of color {s + 1}"
            if inn[v, s] != 1:
                return False, f"vertex {v} has {int(inn[v, s])} incoming edges of color {s + 1}"
    for s, perm in enumerate(dec.sigma()):
        if len(set(perm.tolist())) != g.n:
            return False, f"sigma[{s + 1}] is not a bijection"
    return True, None


def schreier_decorate(g: MultiGraph, seed: int = 0) -> SchreierDecoration:
    """Decorate a 2d-regular multigraph: balanced orientation, oriented double
    cover, exact d-coloring of the cover by Kőnig, colors pulled back through
    the cover map. The seed only permutes the Kőnig insertion order, so the
    output is one of possibly many valid decorations."""
    degs = g.degrees()
    if g.n == 0:
        raise ValueError("empty graph")
    dd = int(degs[0]) if degs.size else 0
    if (degs != dd).any():
        prof = sorted(set(int(x) for x in np.unique(degs)))
        raise ValueError(f"graph is not regular: degrees {prof}")
    if dd % 2 != 0:
        raise ValueError(f"degree {dd} is odd; need a 2d-regular graph")
    d = dd // 2
    orientation = eulerian_orientation(g)
    cover, cmap = double_cover(g, orientation)
    cdegs = cover.g.degrees()
    if cdegs.size and (cdegs != d).any():
        raise RuntimeError("double cover of a balanced orientation must be d-regular")
    cover_colors = konig_color(cover, seed=seed)
    colors = cover_colors.colors[cmap.edge_image]
    dec = SchreierDecoration(base=g, orientation=orientation,
                             coloring=EdgeColoring(colors.copy(), d), d=d)
    ok, why = verify_decoration(dec)
    if not ok:
        raise RuntimeError(f"pipeline produced an invalid decoration: {why}")
    return dec


def from_permutations(sigmas) -> SchreierDecoration:
    """Decorated 2d-regular multigraph of the permutation action: one edge
    u -> sigma[s](u) of color s per vertex per generator. Fixed points become
    loops and 2-cycles parallel edge pairs."""
    sigmas = [np.asarray(s, np.int64) for s in sigmas]
    d = len(sigmas)
    if d == 0:
        raise ValueError("need at least one permutation")
    n = sigmas[0].shape[0]
    for s, perm in enumerate(sigmas):
        if perm.shape != (n,) or sorted(perm.tolist()) != list(range(n)):
            raise ValueError(f"sigma[{s + 1}] is not a permutation of [{n}]")
    edges = []
    heads = []
    colors = []
    for s, perm in enumerate(sigmas):
        for u in range(n):
            e = len(edges)
            edges.append((u, int(perm[u])))
            heads.append(2 * e + 1)
            colors.append(s + 1)
    g = MultiGraph(n, edges)
    dec = SchreierDecoration(base=g, orientation=Orientation(g, np.asarray(heads, np.int64)),
                             coloring=EdgeColoring(np.asarray(colors, np.int64), d), d=d)
    ok, why = verify_decoration(dec)
    if not ok:
        raise RuntimeError(f"permutation input produced an invalid decoration: {why}")
    return dec


def forget(dec: SchreierDecoration) -> MultiGraph:
    """The underlying undirected multigraph, rebuilt without any decoration."""
    return MultiGraph(dec.base.n, list(dec.base.edges()))


# ---------------------------------------------------------------------------
# Decoration file formats


def to_decoration_json(dec: SchreierDecoration) -> str:
    g = dec.base
    payload = {
        "n": g.n,
        "d": dec.d,
        "edges": [
            {"u": int(g.eu[e]), "v": int(g.ev[e]),
             "head": dec.orientation.head_vertex(e),
             "color": int(dec.coloring.colors[e])}
            for e in range(g.m)
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def from_decoration_json(text: str) -> SchreierDecoration:
    payload = json.loads(text)
    n = payload["n"]
    d = payload["d"]
    edges = [(rec["u"], rec["v"]) for rec in payload["edges"]]
    g = MultiGraph(n, edges)
    heads = np.empty(g.m, np.int64)
    colors = np.empty(g.m, np.int64)
    for e, rec in enumerate(payload["edges"]):
        if rec["head"] == rec["v"]:
            heads[e] = 2 * e + 1
        elif rec["head"] == rec["u"]:
            heads[e] = 2 * e
        else:
            raise ValueError(f"edge {e} head {rec['head']} is not an endpoint")
        colors[e] = rec["color"]
    dec = SchreierDecoration(base=g, orientation=Orientation(g, heads),
                             coloring=EdgeColoring(colors, d), d=d)
    ok, why = verify_decoration(dec)
    if not ok:
        raise ValueError(f"decoration file invalid: {why}")
    return dec


def to_permutation_text(dec: SchreierDecoration) -> str:
    """d lines of n space-separated images."""
    return "\n".join(" ".join(str(int(x)) for x in perm) for perm in dec.sigma()) + "\n"


def from_permutation_text(text: str) -> SchreierDecoration:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    return from_permutations([[int(x) for x in row] for row in rows])
