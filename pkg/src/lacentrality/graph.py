"""Immutable directed graphs, edge-list I/O and degree views.

Node labels from the input are remapped to dense ids ``0..n-1``; the label
table is kept on the graph so scores can be reported against the original
names. Adjacency is binary: duplicate edges collapse and self-loops are
dropped.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import numpy as np
import scipy.sparse as sp

from .errors import ConditioningError, EmptyGraph, ParseError

__all__ = [
    "DirectedGraph",
    "DegreeConditioning",
    "ConditioningMode",
    "ConditionedDegrees",
    "parse_edge_list",
    "read_edge_list",
    "format_edge_list",
    "transpose",
    "condition_degrees",
    "max_degrees",
]


def _label_key(label: str):
    # integer-looking labels sort numerically and ahead of free-form strings
    try:
        return (0, int(label), label)
    except ValueError:
        return (1, 0, label)


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    node_count: int
    out_neighbors: tuple[tuple[int, ...], ...]
    in_neighbors: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(self.node_count)))
        if len(self.labels) != self.node_count:
            raise ValueError("label table length must equal node_count")

    @classmethod
    def from_edges(
        cls,
        node_count: int,
        edges: Iterable[tuple[int, int]],
        labels: Sequence[str] | None = None,
    ) -> "DirectedGraph":
        """Build a graph from ``(src, dst)`` id pairs.

        Duplicates collapse and self-loops are discarded.
        """
        succ: list[set[int]] = [set() for _ in range(node_count)]
        for u, v in edges:
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge ({u}, {v}) outside 0..{node_count - 1}")
            if u != v:
                succ[u].add(v)
        pred: list[list[int]] = [[] for _ in range(node_count)]
        out = []
        for u in range(node_count):
            row = tuple(sorted(succ[u]))
            out.append(row)
            for v in row:
                pred[v].append(u)
        return cls(
            node_count=node_count,
            out_neighbors=tuple(out),
            in_neighbors=tuple(tuple(p) for p in pred),
            labels=tuple(labels) if labels is not None else (),
        )

    @cached_property
    def d_out(self) -> np.ndarray:
        return np.fromiter((len(r) for r in self.out_neighbors), dtype=np.int64, count=self.node_count)

    @cached_property
    def d_in(self) -> np.ndarray:
        return np.fromiter((len(r) for r in self.in_neighbors), dtype=np.int64, count=self.node_count)

    @property
    def edge_count(self) -> int:
        return int(self.d_out.sum())

    def edges(self):
        for u, row in enumerate(self.out_neighbors):
            for v in row:
                yield u, v

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Binary adjacency ``A`` with ``A[u, v] = 1`` for an edge u -> v."""
        n = self.node_count
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(self.d_out, out=indptr[1:])
        indices = np.fromiter(
            (v for row in self.out_neighbors for v in row), dtype=np.int64, count=int(indptr[-1])
        )
        data = np.ones(len(indices), dtype=float)
        return sp.csr_matrix((data, indices, indptr), shape=(n, n))

    @cached_property
    def index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and self.out_neighbors == other.out_neighbors
            and self.in_neighbors == other.in_neighbors
            and self.labels == other.labels
        )

    def __hash__(self):
        return hash((self.node_count, self.out_neighbors, self.labels))

    def __repr__(self):
        return f"DirectedGraph(nodes={self.node_count}, edges={self.edge_count})"


def parse_edge_list(
    text: str | TextIO | Iterable[str],
    *,
    sep: str | None = "\t",
    undirected: bool = False,
    id_base: int | None = None,
    comment: str = "#",
) -> DirectedGraph:
    """Parse ``src<sep>dst`` lines into a :class:`DirectedGraph`.

    With ``id_base=None`` labels are arbitrary strings, assigned dense ids in
    sorted label order (numeric labels numerically). With ``id_base`` set to
    0 or 1 labels must be integers and map to ``label - id_base``; ids that
    never appear in an edge become isolated nodes. ``sep=None`` splits on any
    run of whitespace. A zero-edge result is returned as is; solvers raise
    :class:`EmptyGraph` on entry.
    """
    if isinstance(text, str):
        lines: Iterable[str] = io.StringIO(text)
    else:
        lines = text
    pairs: list[tuple[str, str]] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith(comment):
            continue
        parts = line.split(sep) if sep is not None else line.split()
        parts = [p.strip() for p in parts]
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ParseError(lineno, raw.rstrip("\n"), "expected exactly two fields")
        if id_base is not None:
            for p in parts:
                try:
                    value = int(p)
                except ValueError:
                    raise ParseError(lineno, raw.rstrip("\n"), f"non-integer id {p!r}") from None
                if value < id_base:
                    raise ParseError(lineno, raw.rstrip("\n"), f"id {value} below base {id_base}")
        pairs.append((parts[0], parts[1]))

    if id_base is not None:
        ids = [(int(a) - id_base, int(b) - id_base) for a, b in pairs]
        n = 1 + max((max(a, b) for a, b in ids), default=-1)
        labels = [str(i + id_base) for i in range(n)]
        edges = ids
    else:
        seen = {lab for pair in pairs for lab in pair}
        labels = sorted(seen, key=_label_key)
        lookup = {lab: i for i, lab in enumerate(labels)}
        n = len(labels)
        edges = [(lookup[a], lookup[b]) for a, b in pairs]
    if undirected:
        edges = edges + [(b, a) for a, b in edges]
    return DirectedGraph.from_edges(n, edges, labels)


def read_edge_list(path, **kwargs) -> DirectedGraph:
    """Read an edge list from ``path``; gzip is handled by suffix."""
    path = str(path)
    if path.endswith(".gz"):
        import gzip

        with gzip.open(path, "rt") as fh:
            return parse_edge_list(fh, **kwargs)
    with open(path) as fh:
        return parse_edge_list(fh, **kwargs)


def format_edge_list(g: DirectedGraph, sep: str = "\t") -> str:
    """Canonical edge list: edges sorted by ``(src, dst)``.

    Isolated nodes are written as self-loops, which the parser drops while
    still registering the node, so parsing the output reproduces ``g``.
    """
    out = []
    for u in range(g.node_count):
        row = g.out_neighbors[u]
        if not row and not g.in_neighbors[u]:
            out.append(f"{g.labels[u]}{sep}{g.labels[u]}\n")
        for v in row:
            out.append(f"{g.labels[u]}{sep}{g.labels[v]}\n")
    return "".join(out)


def transpose(g: DirectedGraph) -> DirectedGraph:
    return DirectedGraph(
        node_count=g.node_count,
        out_neighbors=g.in_neighbors,
        in_neighbors=g.out_neighbors,
        labels=g.labels,
    )


class ConditioningMode(str, Enum):
    ALL = "all-degrees"
    ZERO_ONLY = "zero-degrees-only"


@dataclass(frozen=True)
class DegreeConditioning:
    """How degrees are made safe to divide by.

    ``ALL`` adds ``epsilon_deg`` to every degree; ``ZERO_ONLY`` replaces only
    zero degrees by ``epsilon_deg``.
    """

    epsilon_deg: float = 0.01
    mode: ConditioningMode = ConditioningMode.ALL

    def __post_init__(self):
        object.__setattr__(self, "mode", ConditioningMode(self.mode))
        if not self.epsilon_deg >= 0:
            raise ConditioningError(f"epsilon_deg must be >= 0, got {self.epsilon_deg}")


@dataclass(frozen=True)
class ConditionedDegrees:
    d_out_c: np.ndarray
    d_in_c: np.ndarray


def _condition(d: np.ndarray, c: DegreeConditioning) -> np.ndarray:
    d = d.astype(float)
    if c.mode is ConditioningMode.ALL:
        return d + c.epsilon_deg
    return np.where(d > 0, d, c.epsilon_deg)


def condition_degrees(g: DirectedGraph, c: DegreeConditioning = DegreeConditioning()) -> ConditionedDegrees:
    d_out_c = _condition(g.d_out, c)
    d_in_c = _condition(g.d_in, c)
    if g.node_count and (d_out_c.min() <= 0 or d_in_c.min() <= 0):
        raise ConditioningError(
            f"zero conditioned degree (epsilon_deg={c.epsilon_deg}, mode={c.mode.value})"
        )
    return ConditionedDegrees(d_out_c=d_out_c, d_in_c=d_in_c)


def max_degrees(g: DirectedGraph) -> tuple[int, int]:
    """Raw ``(max out-degree, max in-degree)``; both are >= 1 on a non-empty graph."""
    if g.edge_count == 0:
        raise EmptyGraph(f"graph with {g.node_count} nodes has no edges")
    return int(g.d_out.max()), int(g.d_in.max())
