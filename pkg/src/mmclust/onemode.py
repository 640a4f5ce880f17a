"""Undirected one-mode graphs and their square-context encodings."""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, NamedTuple

from .context import NContext
from .errors import ElementError, EncodingError

ENCODINGS = ("reflexive", "irreflexive")


class SimpleGraph:
    """Undirected graph without loops or parallel edges.

    Vertices keep their insertion order, which fixes element ids when the
    graph is turned into a context.
    """

    def __init__(self, vertices: Iterable[Hashable] = (), edges: Iterable = ()):
        self._adj: dict = {}
        for v in vertices:
            self.add_vertex(v)
        for u, v in edges:
            self.add_edge(u, v)

    def add_vertex(self, v) -> None:
        self._adj.setdefault(v, set())

    def add_edge(self, u, v) -> bool:
        """Add ``{u, v}``; returns False for a loop or an existing edge."""
        if u == v:
            return False
        self.add_vertex(u)
        self.add_vertex(v)
        if v in self._adj[u]:
            return False
        self._adj[u].add(v)
        self._adj[v].add(u)
        return True

    @property
    def vertices(self) -> list:
        return list(self._adj)

    def edges(self) -> list:
        """Each edge once, oriented by vertex order."""
        pos = {v: k for k, v in enumerate(self._adj)}
        out = []
        for u, nbrs in self._adj.items():
            for v in sorted(nbrs, key=pos.__getitem__):
                if pos[u] < pos[v]:
                    out.append((u, v))
        return out

    def neighbors(self, v) -> frozenset:
        try:
            return frozenset(self._adj[v])
        except KeyError:
            raise ElementError(f"unknown vertex {v!r}") from None

    def degree(self, v) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u, v) -> bool:
        return v in self._adj.get(u, ())

    def __len__(self):
        return len(self._adj)

    def __contains__(self, v):
        return v in self._adj

    @property
    def n_edges(self) -> int:
        return sum(len(s) for s in self._adj.values()) // 2

    def __repr__(self):
        return f"SimpleGraph(|V|={len(self)}, |E|={self.n_edges})"


def graph_to_context(graph: SimpleGraph, encoding: str = "reflexive") -> NContext:
    """Square context over the vertex set with ``gIh`` iff ``{g, h}`` is an edge.

    The reflexive encoding also relates every vertex to itself. Both modes
    share the same labels in the same order.
    """
    if encoding not in ENCODINGS:
        raise EncodingError(f"encoding must be one of {ENCODINGS}, got {encoding!r}")
    vs = graph.vertices
    pos = {v: k for k, v in enumerate(vs)}
    pairs = set()
    for u, v in graph.edges():
        pairs.add((pos[u], pos[v]))
        pairs.add((pos[v], pos[u]))
    if encoding == "reflexive":
        pairs.update((k, k) for k in range(len(vs)))
    return NContext(pairs, [vs, vs], ("vertex", "vertex'"))


def context_to_graph(context: NContext) -> tuple:
    """Inverse of :func:`graph_to_context`: returns ``(graph, encoding)``.

    Raises :class:`EncodingError` if the context is not a square symmetric
    relation with an all-or-nothing diagonal.
    """
    from .concepts import _aligned_square

    to_obj = _aligned_square(context)
    pairs = {(g, to_obj[m]) for g, m in context.tuples}
    if any((b, a) not in pairs for a, b in pairs):
        raise EncodingError("relation is not symmetric")
    loops = sum(1 for a, b in pairs if a == b)
    if loops not in (0, context.sizes[0]):
        raise EncodingError("diagonal is partially filled")
    labels = context.labels[0]
    graph = SimpleGraph(labels, ((labels[a], labels[b]) for a, b in pairs if a < b))
    encoding = "reflexive" if loops else "irreflexive"
    return graph, encoding


def local_cc(graph: SimpleGraph, v) -> Fraction:
    """Share of neighbour pairs of ``v`` that are adjacent; 0 below degree 2."""
    nbrs = list(graph.neighbors(v))
    k = len(nbrs)
    if k < 2:
        return Fraction(0)
    links = sum(1 for i in range(k) for j in range(i + 1, k) if graph.has_edge(nbrs[i], nbrs[j]))
    return Fraction(links, k * (k - 1) // 2)


class CCDensity(NamedTuple):
    rho: Fraction
    cc: Fraction
    size: int


def cc_density_pair(graph: SimpleGraph, v) -> CCDensity:
    """Density of ``N(v) x N(v)`` under the irreflexive encoding, with ``cc(v)``.

    The two satisfy ``rho = cc * (1 - 1/|N(v)|)`` exactly.
    """
    nbrs = graph.neighbors(v)
    if not nbrs:
        raise ValueError(f"vertex {v!r} has no neighbours")
    ordered = sum(len(graph.neighbors(u) & nbrs) for u in nbrs)
    return CCDensity(Fraction(ordered, len(nbrs) ** 2), local_cc(graph, v), len(nbrs))
