"""Exhaustive ZV-line recognition for small unweighted graphs.

For a candidate Z the remaining structure is forced up to a few binary
choices.  Every subgraph minus Z is a union of components of the graph
with Z deleted:

* a component touching two or more Z-vertices is a subgraph on its own
  and needs exactly one vertex adjacent to Z, which is its root;
* a component touching a single Z-vertex ``y`` is either such a
  stand-alone subgraph or is merged with ``y`` (all components merged
  with ``y`` share one subgraph, rooted at ``y``).

Z needs a vertex outside every subgraph.  What remains is ordering Z so
that closed neighbourhoods of Z-vertices and of stand-alone roots meet Z
in intervals, and solving each subgraph recursively with its root forced
to the left end.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .errors import BudgetExceeded, InvalidParameters
from .graph import Graph
from .structure import SubgraphSpec, ZvOrderedPartition

DEFAULT_MAX_VERTICES = 10
DEFAULT_BUDGET = 5_000_000
COUNT_ALL_MAX_VERTICES = 8


@dataclass(frozen=True)
class _Layout:
    """One admissible top-level shape: Z, and (root, members) per subgraph."""

    z: tuple[int, ...]
    groups: tuple[tuple[int, frozenset[int]], ...]
    # sets of Z-vertices that must be contiguous in the order
    intervals: tuple[frozenset[int], ...]


class _Search:
    def __init__(self, g: Graph, budget: int):
        self.g = g
        self.budget = budget
        self.steps = 0
        self.nbrs = [frozenset(w for w, _ in g.adjacency[v]) for v in range(len(g))]
        self.first: dict[tuple[frozenset[int], int | None], ZvOrderedPartition | None] = {}
        self.counts: dict[tuple[frozenset[int], int | None], int] = {}

    def tick(self, n: int = 1) -> None:
        self.steps += n
        if self.steps > self.budget:
            raise BudgetExceeded(f"search budget of {self.budget} steps exhausted")

    # -- structure enumeration ------------------------------------------------

    def _components(self, alive: frozenset[int]) -> list[frozenset[int]]:
        seen: set[int] = set()
        comps = []
        for s in sorted(alive):
            if s in seen:
                continue
            comp = {s}
            stack = [s]
            while stack:
                u = stack.pop()
                for w in self.nbrs[u]:
                    if w in alive and w not in comp:
                        comp.add(w)
                        stack.append(w)
            seen |= comp
            comps.append(frozenset(comp))
        return comps

    def layouts(self, s: frozenset[int], root: int | None) -> Iterator[_Layout]:
        verts = sorted(s)
        for size in range(1, len(verts) + 1):
            for z in itertools.combinations(verts, size):
                if root is not None and root not in z:
                    continue
                self.tick()
                yield from self._layouts_for(s, frozenset(z))

    def _layouts_for(self, s: frozenset[int], z: frozenset[int]) -> Iterator[_Layout]:
        comps = self._components(s - z)
        fixed: list[tuple[int, frozenset[int]]] = []
        optional: list[tuple[frozenset[int], int, int | None]] = []
        for c in comps:
            attach = frozenset().union(*(self.nbrs[v] for v in c)) & z
            touching = [v for v in sorted(c) if self.nbrs[v] & z]
            if len(attach) >= 2:
                if len(touching) != 1:
                    return
                fixed.append((touching[0], c))
            else:
                (y,) = attach
                optional.append((c, y, touching[0] if len(touching) == 1 else None))
        for choice in itertools.product((False, True), repeat=len(optional)):
            groups = list(fixed)
            merged: dict[int, set[int]] = {}
            ok = True
            for (c, y, lone_root), alone in zip(optional, choice):
                if alone:
                    if lone_root is None:
                        ok = False
                        break
                    groups.append((lone_root, c))
                else:
                    merged.setdefault(y, {y}).update(c)
            if not ok:
                continue
            if not z - set(merged):
                continue  # Z would have no private vertex
            groups.extend((y, frozenset(m)) for y, m in merged.items())
            groups.sort(key=lambda item: min(item[1]))
            intervals = [frozenset((self.nbrs[v] | {v}) & z) for v in sorted(z)]
            intervals += [frozenset(self.nbrs[r] & z) for r, members in groups if r not in z]
            yield _Layout(tuple(sorted(z)), tuple(groups), tuple(intervals))

    def orders(self, layout: _Layout, root: int | None) -> Iterator[tuple[int, ...]]:
        """Orders of Z in which every required set is contiguous (consecutive-ones)."""
        sets = [iv for iv in layout.intervals if len(iv) > 1]
        z = layout.z
        prefix: list[int] = []

        def fits(v: int) -> bool:
            placed = set(prefix)
            for iv in sets:
                if v not in iv:
                    continue
                inside = [u for u in prefix if u in iv]
                # members already placed must sit at the end of the prefix
                if inside and prefix[-1] not in iv:
                    return False
            # closing a set: once a set has members placed and we step outside, it must be complete
            if prefix:
                last = prefix[-1]
                for iv in sets:
                    if last in iv and v not in iv and not iv <= placed:
                        return False
            return True

        def extend() -> Iterator[tuple[int, ...]]:
            self.tick()
            if len(prefix) == len(z):
                yield tuple(prefix)
                return
            for v in z:
                if v in prefix:
                    continue
                if not prefix and root is not None and v != root:
                    continue
                if fits(v):
                    prefix.append(v)
                    yield from extend()
                    prefix.pop()

        yield from extend()

    # -- recursion --------------------------------------------------------------

    def solve(self, s: frozenset[int], root: int | None) -> ZvOrderedPartition | None:
        key = (s, root)
        if key in self.first:
            return self.first[key]
        result = None
        if len(s) == 1:
            result = ZvOrderedPartition((self.g.vertices[next(iter(s))],))
        else:
            for layout in self.layouts(s, root):
                nested = []
                for r, members in layout.groups:
                    if len(members) == 1:
                        nested.append(None)
                        continue
                    sub = self.solve(members, r)
                    if sub is None:
                        break
                    nested.append(sub)
                else:
                    order = next(self.orders(layout, root), None)
                    if order is None:
                        continue
                    result = self._build(order, layout, nested)
                    break
        self.first[key] = result
        return result

    def count(self, s: frozenset[int], root: int | None) -> int:
        key = (s, root)
        if key in self.counts:
            return self.counts[key]
        total = 1 if len(s) == 1 else 0
        if len(s) > 1:
            for layout in self.layouts(s, root):
                product = 1
                for r, members in layout.groups:
                    if len(members) > 1:
                        product *= self.count(members, r)
                        if not product:
                            break
                if product:
                    total += product * sum(1 for _ in self.orders(layout, root))
        self.counts[key] = total
        return total

    def _build(self, order, layout: _Layout, nested) -> ZvOrderedPartition:
        names = self.g.vertices
        subs = tuple(
            SubgraphSpec(tuple(names[v] for v in sorted(members)), sub)
            for (_, members), sub in zip(layout.groups, nested)
        )
        return ZvOrderedPartition(tuple(names[v] for v in order), subs)


def _check_input(g: Graph, max_vertices: int) -> bool:
    if len(g) > max_vertices:
        raise BudgetExceeded(f"graph has {len(g)} vertices; the recognizer bound is {max_vertices}")
    return len(g) > 0 and g.connected and not g.weighted


def recognize_zv_line(
    g: Graph,
    *,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    budget: int = DEFAULT_BUDGET,
) -> ZvOrderedPartition | None:
    """A ZV-line witness partition for `g`, or None when none exists.

    Weighted and disconnected graphs are never ZV-line.  Raises
    BudgetExceeded when the graph exceeds `max_vertices` or the search
    runs out of steps; that is not a negative answer.
    """
    if not _check_input(g, max_vertices):
        return None
    return _Search(g, budget).solve(frozenset(range(len(g))), None)


def count_zv_line_partitions(g: Graph, *, budget: int = DEFAULT_BUDGET) -> int:
    """Number of distinct ZV-line witness partitions (graphs of at most 8 vertices)."""
    if len(g) > COUNT_ALL_MAX_VERTICES:
        raise InvalidParameters(f"counting is limited to {COUNT_ALL_MAX_VERTICES} vertices")
    if not _check_input(g, COUNT_ALL_MAX_VERTICES):
        return 0
    return _Search(g, budget).count(frozenset(range(len(g))), None)
