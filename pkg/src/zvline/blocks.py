"""Biconnected components, block-cut trees, and the ZV partitions they induce."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotABlockGraph, NotATree, UnknownVertex
from .graph import Graph
from .structure import SubgraphSpec, ZvOrderedPartition


def biconnected_components(g: Graph) -> list[frozenset[str]]:
    """Maximal biconnected components (blocks), via iterative Tarjan.

    Bridges come out as two-vertex blocks and an isolated vertex as a
    one-vertex block.  Blocks are sorted by their vertex positions.
    """
    n = len(g)
    disc = [-1] * n
    low = [0] * n
    blocks: list[frozenset[int]] = []
    counter = 0
    for start in range(n):
        if disc[start] != -1:
            continue
        if not g.adjacency[start]:
            disc[start] = counter
            counter += 1
            blocks.append(frozenset((start,)))
            continue
        disc[start] = low[start] = counter
        counter += 1
        edge_stack: list[tuple[int, int]] = []
        stack = [(start, -1, iter(g.adjacency[start]))]
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for w, _ in it:
                if w == parent:
                    continue
                if disc[w] == -1:
                    disc[w] = low[w] = counter
                    counter += 1
                    edge_stack.append((u, w))
                    stack.append((w, u, iter(g.adjacency[w])))
                    advanced = True
                    break
                if disc[w] < disc[u]:
                    low[u] = min(low[u], disc[w])
                    edge_stack.append((u, w))
            if advanced:
                continue
            stack.pop()
            if parent == -1:
                continue
            low[parent] = min(low[parent], low[u])
            if low[u] >= disc[parent]:
                comp: set[int] = set()
                while True:
                    a, b = edge_stack.pop()
                    comp.update((a, b))
                    if (a, b) == (parent, u):
                        break
                blocks.append(frozenset(comp))
    blocks.sort(key=lambda b: sorted(b))
    return [frozenset(g.vertices[i] for i in b) for b in blocks]


def articulation_points(g: Graph) -> tuple[str, ...]:
    count: dict[str, int] = {}
    for block in biconnected_components(g):
        for v in block:
            count[v] = count.get(v, 0) + 1
    return g.sorted(v for v, c in count.items() if c > 1)


@dataclass(frozen=True)
class BlockCutTree:
    blocks: tuple[frozenset[str], ...]
    cut_vertices: tuple[str, ...]
    # (block index, cut vertex) for every membership of a cut vertex in a block
    edges: tuple[tuple[int, str], ...]

    def blocks_at(self, v: str) -> list[int]:
        return [i for i, b in enumerate(self.blocks) if v in b]


def block_cut_tree(g: Graph) -> BlockCutTree:
    blocks = tuple(biconnected_components(g))
    cuts = articulation_points(g)
    edges = tuple((i, c) for i, b in enumerate(blocks) for c in cuts if c in b)
    return BlockCutTree(blocks, cuts, edges)


def is_clique(g: Graph, vs) -> bool:
    vs = list(vs)
    return all(g.distance(u, v) == 1 for i, u in enumerate(vs) for v in vs[i + 1 :])


def is_block_graph(g: Graph) -> bool:
    return not g.weighted and g.connected and all(is_clique(g, b) for b in biconnected_components(g))


# -- derived partitions ---------------------------------------------------------


def tree_partition(g: Graph, root: str) -> ZvOrderedPartition:
    """Recursive partition of a rooted tree: Z is the root, subgraphs are child subtrees."""
    if not g.is_tree():
        raise NotATree("graph is not a tree")
    g.idx(root)
    return _tree_level(g, root, None)


def _tree_level(g: Graph, root: str, parent: str | None) -> ZvOrderedPartition:
    subs = []
    for child in g.sorted(g.neighbors(root)):
        if child == parent:
            continue
        members = _subtree(g, child, root)
        nested = _tree_level(g, child, root) if len(members) > 1 else None
        subs.append(SubgraphSpec(g.sorted(members), nested))
    return ZvOrderedPartition((root,), tuple(subs))


def _subtree(g: Graph, top: str, parent: str) -> set[str]:
    seen = {top}
    stack = [top]
    while stack:
        u = stack.pop()
        for w in g.neighbors(u):
            if w != parent and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def block_graph_partition(g: Graph, anchor: str) -> ZvOrderedPartition:
    """Recursive ZV partition of a connected block graph rooted at `anchor`.

    Z is a path of blocks in the block-cut tree starting from the first
    block at the anchor and walking to a leaf block; Z is ordered by
    distance from the anchor.  Everything hanging off a Z-vertex ``y``
    becomes one subgraph rooted at ``y`` and is partitioned the same way.
    """
    if anchor not in g:
        raise UnknownVertex(f"unknown anchor {anchor!r}")
    if not is_block_graph(g):
        raise NotABlockGraph("some biconnected component is not a clique")
    blocks = biconnected_components(g)
    return _block_level(g, blocks, set(g.vertices), anchor)


def _block_level(g: Graph, blocks: list[frozenset[str]], allowed: set[str], entry: str) -> ZvOrderedPartition:
    local = [b for b in blocks if b <= allowed and len(b) > 1]
    if allowed == {entry}:
        return ZvOrderedPartition((entry,))
    at_entry = [b for b in local if entry in b]
    path = [at_entry[0]]
    entries = [entry]
    while True:
        current = path[-1]
        step = None
        for c in g.sorted(current - {entries[-1]}):
            nxt = [b for b in local if c in b and b not in path]
            if nxt:
                step = (c, nxt[0])
                break
        if step is None:
            break
        entries.append(step[0])
        path.append(step[1])
    order = [entry]
    for j, block in enumerate(path):
        exit_vertex = entries[j + 1] if j + 1 < len(entries) else None
        order.extend(g.sorted(block - {entries[j], exit_vertex}))
        if exit_vertex is not None:
            order.append(exit_vertex)
    z_set = set(order)
    subs = []
    for y in order:
        hanging = [b for b in local if y in b and b not in path]
        if not hanging:
            continue
        seeds = set().union(*hanging) - {y}
        blocked = (z_set | (set(g.vertices) - allowed))
        members = {y} | _reach(g, seeds, blocked)
        nested = _block_level(g, blocks, members, y)
        subs.append(SubgraphSpec(g.sorted(members), nested))
    return ZvOrderedPartition(tuple(order), tuple(subs))


def _reach(g: Graph, seeds: set[str], blocked: set[str]) -> set[str]:
    seen = set(seeds)
    stack = list(seeds)
    while stack:
        u = stack.pop()
        for w in g.neighbors(u):
            if w not in blocked and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen
