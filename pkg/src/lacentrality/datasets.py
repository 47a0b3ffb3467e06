"""Benchmark networks: real files when available, seeded stand-ins otherwise.

Real files are looked up in ``$LACENT_DATA_DIR`` (default ``./data``):

* ``power.tsv`` or ``power.gml`` - US Western States power grid, undirected,
  4,941 nodes / 6,594 edges.
* ``p2p-Gnutella08.txt`` (optionally ``.gz``) - SNAP Gnutella snapshot,
  directed, 6,301 nodes / 20,777 edges.

``scripts/fetch_datasets.py`` downloads both. Without them, generators
produce graphs with the same node and edge counts and a similar degree
profile; results computed on them are labelled ``stand-in``.
"""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .graph import DirectedGraph, parse_edge_list, read_edge_list

POWERGRID_SIZE = (4941, 6594)
GNUTELLA_SIZE = (6301, 20777)


def data_dir() -> Path:
    return Path(os.environ.get("LACENT_DATA_DIR", "data"))


def powergrid_standin(seed: int = 0) -> DirectedGraph:
    """Planar, grid-like sparse network: Euclidean MST plus the shortest
    remaining Delaunay edges, undirected (both directions stored)."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import minimum_spanning_tree
    from scipy.spatial import Delaunay

    n, m = POWERGRID_SIZE
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    tri = Delaunay(pts)
    cand = set()
    for simplex in tri.simplices:
        a, b, c = sorted(int(x) for x in simplex)
        cand.update({(a, b), (a, c), (b, c)})
    cand = sorted(cand)
    u = np.array([e[0] for e in cand])
    v = np.array([e[1] for e in cand])
    w = np.linalg.norm(pts[u] - pts[v], axis=1)
    mst = minimum_spanning_tree(coo_matrix((w, (u, v)), shape=(n, n))).tocoo()
    tree = {(min(a, b), max(a, b)) for a, b in zip(mst.row.tolist(), mst.col.tolist())}
    rest = sorted((w[k], cand[k]) for k in range(len(cand)) if cand[k] not in tree)
    edges = sorted(tree) + [e for _, e in rest[: m - len(tree)]]
    return DirectedGraph.from_edges(n, edges + [(b, a) for a, b in edges])


def gnutella_standin(seed: int = 0) -> DirectedGraph:
    """Directed peer graph: about a third of the peers hold all outgoing
    links (roughly ten each, uniform targets); the rest only receive."""
    n, m = GNUTELLA_SIZE
    rng = np.random.default_rng(seed)
    sources = rng.choice(n, size=n // 3, replace=False)
    out_deg = rng.multinomial(m, np.full(len(sources), 1.0 / len(sources)))
    out_deg = np.minimum(out_deg, n - 1)
    edges = []
    for src, k in zip(sources.tolist(), out_deg.tolist()):
        targets = rng.choice(n - 1, size=k, replace=False)
        targets[targets >= src] += 1
        edges.extend((src, int(t)) for t in targets)
    # multinomial capping can only lose edges; top up from random sources
    have = set(edges)
    while len(have) < m:
        a, b = (int(x) for x in rng.integers(n, size=2))
        if a != b and (a, b) not in have:
            have.add((a, b))
    return DirectedGraph.from_edges(n, sorted(have))


def _read_gml(path: Path) -> DirectedGraph:
    import networkx as nx

    G = nx.read_gml(path, label="id")
    lines = "".join(f"{u}\t{v}\n" for u, v in G.edges())
    return parse_edge_list(lines, undirected=True)


def load_network(name: str) -> tuple[DirectedGraph, str]:
    """Return ``(graph, provenance)`` with provenance ``"file"`` or ``"stand-in"``."""
    root = data_dir()
    if name == "powergrid":
        if (root / "power.tsv").exists():
            return read_edge_list(root / "power.tsv", sep=None, undirected=True), "file"
        if (root / "power.gml").exists():
            return _read_gml(root / "power.gml"), "file"
        return powergrid_standin(), "stand-in"
    if name == "gnutella":
        for fname in ("p2p-Gnutella08.txt", "p2p-Gnutella08.txt.gz"):
            if (root / fname).exists():
                return read_edge_list(root / fname, sep=None, id_base=0), "file"
        return gnutella_standin(), "stand-in"
    raise KeyError(f"unknown network {name!r}")
