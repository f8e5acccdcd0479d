"""Finite undirected graphs with positive integer edge lengths.

Distances are precomputed into an all-pairs table when the graph is built:
breadth-first search when every edge has unit length, Dijkstra otherwise.
Vertex construction order is kept and used as the tie-break order by every
other module.
"""

from __future__ import annotations

import heapq
from collections import deque
from typing import Iterable, Sequence

from .errors import (
    Disconnected,
    DuplicateEdge,
    DuplicateVertex,
    EmptySet,
    NonPositiveLength,
    SelfLoop,
    UnknownEndpoint,
    UnknownVertex,
)

# distance between vertices of different components of a disjoint union
UNREACHABLE = 1 << 40

EdgeSpec = Sequence  # (u, v) or (u, v, length)


class Graph:
    """Immutable undirected graph over opaque string vertex ids."""

    __slots__ = ("vertices", "index", "edges", "adjacency", "_dist", "weighted", "connected")

    def __init__(
        self,
        vertices: Sequence[str],
        edges: Iterable[EdgeSpec] = (),
        *,
        allow_disconnected: bool = False,
    ):
        index: dict[str, int] = {}
        for v in vertices:
            if not isinstance(v, str) or not v:
                raise UnknownVertex(f"vertex ids must be non-empty strings, got {v!r}")
            if v in index:
                raise DuplicateVertex(f"duplicate vertex {v!r}")
            index[v] = len(index)
        self.vertices: tuple[str, ...] = tuple(vertices)
        self.index = index

        adjacency: list[dict[int, int]] = [{} for _ in self.vertices]
        edge_list = []
        for spec in edges:
            if len(spec) == 2:
                u, v = spec
                length = 1
            elif len(spec) == 3:
                u, v, length = spec
                length = 1 if length is None else length
            else:
                raise UnknownEndpoint(f"malformed edge {spec!r}")
            for end in (u, v):
                if end not in index:
                    raise UnknownEndpoint(f"edge {u!r}-{v!r} uses unknown vertex {end!r}")
            if u == v:
                raise SelfLoop(f"self-loop at {u!r}")
            if isinstance(length, bool) or not isinstance(length, int) or length < 1:
                raise NonPositiveLength(f"edge {u!r}-{v!r} has length {length!r}")
            iu, iv = index[u], index[v]
            if iv in adjacency[iu]:
                raise DuplicateEdge(f"duplicate edge {u!r}-{v!r}")
            adjacency[iu][iv] = length
            adjacency[iv][iu] = length
            edge_list.append((u, v, length))
        self.edges: tuple[tuple[str, str, int], ...] = tuple(edge_list)
        self.adjacency: tuple[tuple[tuple[int, int], ...], ...] = tuple(
            tuple(sorted(nbrs.items())) for nbrs in adjacency
        )
        self.weighted = any(length != 1 for _, _, length in edge_list)
        if self.weighted:
            self._dist = [self._dijkstra(s) for s in range(len(self.vertices))]
        else:
            self._dist = [self._bfs(s) for s in range(len(self.vertices))]
        self.connected = all(d < UNREACHABLE for d in self._dist[0]) if self.vertices else True
        if not self.connected and not allow_disconnected:
            unreached = [self.vertices[i] for i, d in enumerate(self._dist[0]) if d >= UNREACHABLE]
            raise Disconnected(f"graph is disconnected; unreachable from {self.vertices[0]!r}: {unreached}")

    # -- construction helpers -------------------------------------------------

    def _bfs(self, source: int) -> list[int]:
        dist = [UNREACHABLE] * len(self.vertices)
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for w, _ in self.adjacency[u]:
                if dist[w] == UNREACHABLE:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def _dijkstra(self, source: int) -> list[int]:
        dist = [UNREACHABLE] * len(self.vertices)
        dist[source] = 0
        heap = [(0, source)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for w, length in self.adjacency[u]:
                nd = d + length
                if nd < dist[w]:
                    dist[w] = nd
                    heapq.heappush(heap, (nd, w))
        return dist

    # -- queries --------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v: object) -> bool:
        return v in self.index

    def __iter__(self):
        return iter(self.vertices)

    def __repr__(self) -> str:
        return f"Graph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.vertices == other.vertices and self.edge_set() == other.edge_set()

    def __hash__(self) -> int:
        return hash((self.vertices, frozenset(self.edge_set().items())))

    def edge_set(self) -> dict[frozenset[str], int]:
        return {frozenset((u, v)): length for u, v, length in self.edges}

    def idx(self, v: str) -> int:
        try:
            return self.index[v]
        except (KeyError, TypeError):
            raise UnknownVertex(f"unknown vertex {v!r}") from None

    def distance(self, u: str, v: str) -> int:
        return self._dist[self.idx(u)][self.idx(v)]

    def distance_row(self, u: str) -> list[int]:
        """Distances from `u` to every vertex, in construction order."""
        return self._dist[self.idx(u)]

    @property
    def distance_table(self) -> list[list[int]]:
        return self._dist

    def distance_to_set(self, v: str, targets: Iterable[str]) -> int:
        row = self._dist[self.idx(v)]
        best = None
        for t in targets:
            d = row[self.idx(t)]
            if best is None or d < best:
                best = d
        if best is None:
            raise EmptySet("distance to an empty set is undefined")
        return best

    def ball(self, v: str, radius: int) -> frozenset[str]:
        row = self._dist[self.idx(v)]
        return frozenset(u for u, d in zip(self.vertices, row) if d <= radius)

    def neighbors(self, v: str) -> frozenset[str]:
        return frozenset(self.vertices[w] for w, _ in self.adjacency[self.idx(v)])

    def degree(self, v: str) -> int:
        return len(self.adjacency[self.idx(v)])

    def diameter(self) -> int:
        return max((max(row) for row in self._dist), default=0)

    def sort_key(self, v: str) -> int:
        return self.idx(v)

    def sorted(self, vs: Iterable[str]) -> tuple[str, ...]:
        """Vertices of `vs` in construction order."""
        return tuple(sorted(vs, key=self.idx))

    def induced(self, members: Iterable[str], *, allow_disconnected: bool = False) -> "Graph":
        """Induced subgraph; vertex order follows this graph's order."""
        keep = set(members)
        for v in keep:
            self.idx(v)
        verts = [v for v in self.vertices if v in keep]
        edges = [(u, v, length) for u, v, length in self.edges if u in keep and v in keep]
        return Graph(verts, edges, allow_disconnected=allow_disconnected)

    def without(self, removed: Iterable[str]) -> "Graph":
        """Graph with `removed` deleted; may be disconnected."""
        gone = set(removed)
        return self.induced([v for v in self.vertices if v not in gone], allow_disconnected=True)

    def components(self) -> list[tuple[str, ...]]:
        seen: set[int] = set()
        comps = []
        for s in range(len(self.vertices)):
            if s in seen:
                continue
            comp = [i for i, d in enumerate(self._dist[s]) if d < UNREACHABLE]
            seen.update(comp)
            comps.append(tuple(self.vertices[i] for i in comp))
        return comps

    def is_tree(self) -> bool:
        return self.connected and len(self.edges) == len(self.vertices) - 1


def build_graph(
    vertices: Sequence[str],
    edges: Iterable[EdgeSpec] = (),
) -> Graph:
    """Build a connected graph; edges are ``(u, v)`` or ``(u, v, length)``."""
    return Graph(vertices, edges)


def disjoint_union(graphs: Sequence[Graph]) -> Graph:
    """Union of vertex-disjoint graphs, the one sanctioned disconnected graph."""
    verts: list[str] = []
    edges: list[tuple[str, str, int]] = []
    for g in graphs:
        verts.extend(g.vertices)
        edges.extend(g.edges)
    return Graph(verts, edges, allow_disconnected=True)


def distance(g: Graph, u: str, v: str) -> int:
    return g.distance(u, v)


def distance_to_set(g: Graph, v: str, s: Iterable[str]) -> int:
    return g.distance_to_set(v, s)


def ball(g: Graph, v: str, d: int) -> frozenset[str]:
    return g.ball(v, d)


def neighbors(g: Graph, v: str) -> frozenset[str]:
    return g.neighbors(v)
