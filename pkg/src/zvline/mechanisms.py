"""Facility-location mechanisms.

Every mechanism is bound to a graph at construction and then evaluated on
ballot sequences.  ``run`` returns an :class:`Outcome` with a decision
trace; ``choose`` is the untraced hot path over vertex indices used by the
deviation oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .blocks import is_block_graph
from .errors import (
    EmptyProfile,
    InvalidOrder,
    InvalidPartition,
    MissingNestedPartition,
    NotABlockGraph,
    NotATree,
    ParetoZEmpty,
    WeightedWithoutOverride,
)
from .graph import Graph, disjoint_union
from .preference import pareto_mask
from .structure import (
    ZvOrderedPartition,
    induced_global_order,
    roots,
    validate_partition,
    validate_zv_line,
)


@dataclass(frozen=True)
class Decision:
    path: tuple[int, ...]
    branch: str
    detail: str = ""

    def __str__(self) -> str:
        where = "top" if not self.path else "V" + "/V".join(map(str, self.path))
        return f"{where}: {self.branch}" + (f" ({self.detail})" if self.detail else "")


@dataclass(frozen=True)
class Outcome:
    vertex: str
    trace: tuple[Decision, ...] = field(default=(), compare=False)


class Mechanism:
    """Base class; subclasses implement ``_select``."""

    name = "mechanism"
    anonymous = True
    # outcome depends only on which locations were voted for, not how often
    support_only = False
    claims_pareto = True
    # False when the empty profile raises EmptyProfile
    accepts_empty = True

    def __init__(self, g: Graph):
        self.graph = g
        self.dist = np.asarray(g.distance_table, dtype=np.int64)

    def describe(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.describe()}>"

    def run(self, ballots: Sequence[str]) -> Outcome:
        idx = tuple(self.graph.idx(b) for b in ballots)
        trace: list[Decision] = []
        chosen = self._select(idx, trace)
        return Outcome(self.graph.vertices[chosen], tuple(trace))

    def __call__(self, ballots: Sequence[str]) -> str:
        return self.graph.vertices[self.choose(tuple(self.graph.idx(b) for b in ballots))]

    def choose(self, idx: Sequence[int]) -> int:
        return self._select(idx, None)

    def _select(self, idx: Sequence[int], trace: list[Decision] | None) -> int:
        raise NotImplementedError


def _order_positions(g: Graph, order: Sequence[str] | None) -> list[int]:
    """Rank of every vertex index in a total order (construction order if None)."""
    if order is None:
        return list(range(len(g)))
    order = list(order)
    if len(set(order)) != len(order):
        raise InvalidOrder("order lists a vertex twice")
    if set(order) != set(g.vertices):
        missing = [v for v in g.vertices if v not in set(order)]
        extra = [v for v in order if v not in g]
        raise InvalidOrder(f"order is not total over the graph (missing {missing}, unknown {extra})")
    rank = [0] * len(g)
    for pos, v in enumerate(order):
        rank[g.idx(v)] = pos
    return rank


# -- F* -------------------------------------------------------------------------


class _Level:
    """One level of the recursive partition, in its own induced graph."""

    __slots__ = ("graph", "dist", "z", "owner", "children", "to_top", "from_top", "path")

    def __init__(self, g: Graph, p: ZvOrderedPartition, to_top: list[int], path: tuple[int, ...]):
        self.graph = g
        self.dist = np.asarray(g.distance_table, dtype=np.int64)
        self.z = [g.idx(z) for z in p.z_order]
        self.to_top = to_top
        self.from_top = {t: i for i, t in enumerate(to_top)}
        self.path = path
        self.owner = [-1] * len(g)
        self.children: list[_Level | int] = []
        for i, sub in enumerate(p.subgraphs):
            for v in sub.members:
                self.owner[g.idx(v)] = i
            members = list(dict.fromkeys(sub.members))
            if sub.nested is None:
                if len(members) != 1:
                    raise MissingNestedPartition(f"V_{i + 1} has {len(members)} vertices but no nested partition")
                self.children.append(to_top[g.idx(members[0])])
                continue
            gi = g.induced(members)
            child_to_top = [to_top[g.idx(v)] for v in gi.vertices]
            self.children.append(_Level(gi, sub.nested, child_to_top, path + (i + 1,)))


class FStar(Mechanism):
    """Leftmost Pareto-optimal Z-vertex, recursing when all ballots share a subgraph.

    The empty profile returns the leftmost Z-vertex.  Partitions must be
    valid ZV-ordered partitions; partitions that fail the ZV-line check
    still run, flagged in every trace.  Weighted graphs need
    ``allow_weighted=True``.
    """

    name = "fstar"
    support_only = True

    def __init__(self, g: Graph, p: ZvOrderedPartition, *, allow_weighted: bool = False):
        super().__init__(g)
        if g.weighted and not allow_weighted:
            raise WeightedWithoutOverride("F* on a weighted graph needs allow_weighted=True")
        report = validate_partition(g, p)
        if not report.valid:
            raise InvalidPartition(str(report))
        self.partition = p
        self.zv_line_report = validate_zv_line(g, p)
        self.zv_line = self.zv_line_report.valid
        self.root = _Level(g, p, list(range(len(g))), ())

    def describe(self) -> str:
        return "fstar[" + " ".join(self.partition.z_order) + "]"

    def _select(self, idx, trace):
        if trace is not None and not self.zv_line:
            tags = ",".join(dict.fromkeys(self.zv_line_report.tags()))
            trace.append(Decision((), "not-zv-line", tags))
        level = self.root
        ballots = list(idx)
        while True:
            if not ballots:
                if trace is not None:
                    trace.append(Decision(level.path, "empty-profile", "leftmost Z-vertex"))
                return level.to_top[level.z[0]]
            local = [level.from_top[b] for b in ballots]
            first = level.owner[local[0]]
            if first >= 0 and all(level.owner[b] == first for b in local):
                child = level.children[first]
                if trace is not None:
                    trace.append(Decision(level.path, "recurse", f"all ballots in V_{first + 1}"))
                if isinstance(child, int):
                    if trace is not None:
                        trace.append(Decision(level.path + (first + 1,), "singleton", level.graph.vertices[local[0]]))
                    return child
                level = child
                continue
            mask = pareto_mask(level.dist, local)
            for z in level.z:
                if mask[z]:
                    if trace is not None:
                        po = " ".join(v for v, ok in zip(level.graph.vertices, mask) if ok)
                        trace.append(Decision(level.path, "leftmost-pareto-z", f"PO={{{po}}}"))
                    return level.to_top[z]
            raise ParetoZEmpty(f"no Pareto-optimal Z-vertex at level {level.path or 'top'}; partition is not valid")


def f_star(g: Graph, p: ZvOrderedPartition, x: Sequence[str], *, allow_weighted: bool = False) -> Outcome:
    return FStar(g, p, allow_weighted=allow_weighted).run(list(x))


# -- order-based and structural mechanisms ---------------------------------------


class OrderMechanism(Mechanism):
    """First Pareto-optimal vertex in a fixed total order."""

    name = "order"
    support_only = True

    def __init__(self, g: Graph, order: Sequence[str]):
        super().__init__(g)
        self.order = tuple(order)
        rank = _order_positions(g, self.order)
        self._sequence = sorted(range(len(g)), key=rank.__getitem__)

    def describe(self) -> str:
        return "order:" + ",".join(self.order)

    def _select(self, idx, trace):
        mask = pareto_mask(self.dist, list(idx))
        for v in self._sequence:
            if mask[v]:
                if trace is not None:
                    trace.append(Decision((), "first-pareto-in-order", self.graph.vertices[v]))
                return v
        raise AssertionError("Pareto set is never empty")


def order_mechanism(g: Graph, order: Sequence[str], x: Sequence[str]) -> Outcome:
    return OrderMechanism(g, order).run(list(x))


class LcaTree(Mechanism):
    """Lowest common ancestor of the ballots in a rooted tree."""

    name = "lca"
    support_only = True

    accepts_empty = False

    def __init__(self, g: Graph, root: str):
        super().__init__(g)
        if g.weighted or not g.is_tree():
            raise NotATree("LCA mechanism needs an unweighted tree")
        self.root_vertex = root
        r = g.idx(root)
        self.depth = list(self.dist[r])
        self.parent = [-1] * len(g)
        for v in range(len(g)):
            for w, _ in g.adjacency[v]:
                if self.depth[w] == self.depth[v] - 1:
                    self.parent[v] = w

    def describe(self) -> str:
        return f"lca:{self.root_vertex}"

    def _select(self, idx, trace):
        if not idx:
            raise EmptyProfile("LCA of an empty profile")
        anc = idx[0]
        for b in idx[1:]:
            a, c = anc, b
            while self.depth[a] > self.depth[c]:
                a = self.parent[a]
            while self.depth[c] > self.depth[a]:
                c = self.parent[c]
            while a != c:
                a, c = self.parent[a], self.parent[c]
            anc = a
        if trace is not None:
            trace.append(Decision((), "lowest-common-ancestor", self.graph.vertices[anc]))
        return anc


def lca_tree_mechanism(g: Graph, root: str, x: Sequence[str]) -> Outcome:
    return LcaTree(g, root).run(list(x))


class BlockGraphMechanism(Mechanism):
    """Pareto-optimal vertex closest to an anchor, ties broken by an order."""

    name = "block"
    support_only = True

    accepts_empty = False

    def __init__(self, g: Graph, anchor: str, order: Sequence[str] | None = None):
        super().__init__(g)
        if not is_block_graph(g):
            raise NotABlockGraph("every biconnected component must be a clique")
        self.anchor = anchor
        self.order = tuple(order) if order is not None else None
        rank = _order_positions(g, order)
        a = g.idx(anchor)
        self._key = [(int(self.dist[a, v]), rank[v]) for v in range(len(g))]

    def describe(self) -> str:
        return f"block:{self.anchor}" + (":" + ",".join(self.order) if self.order else "")

    def _select(self, idx, trace):
        if not idx:
            raise EmptyProfile("block-graph mechanism needs a ballot")
        mask = pareto_mask(self.dist, list(idx))
        best = min((v for v in range(len(mask)) if mask[v]), key=self._key.__getitem__)
        if trace is not None:
            trace.append(Decision((), "closest-pareto-to-anchor", self.graph.vertices[best]))
        return best


def block_graph_mechanism(g: Graph, anchor: str, order: Sequence[str] | None, x: Sequence[str]) -> Outcome:
    return BlockGraphMechanism(g, anchor, order).run(list(x))


# -- baselines --------------------------------------------------------------------


class _SumMechanism(Mechanism):
    power = 1

    accepts_empty = False

    def __init__(self, g: Graph, tiebreak: Sequence[str] | None = None):
        super().__init__(g)
        self.tiebreak = tuple(tiebreak) if tiebreak is not None else None
        self._rank = _order_positions(g, tiebreak)

    def describe(self) -> str:
        return self.name + (":" + ",".join(self.tiebreak) if self.tiebreak else "")

    def _select(self, idx, trace):
        if not idx:
            raise EmptyProfile(f"{self.name} needs at least one ballot")
        rows = self.dist[np.asarray(idx)]
        cost = (rows**self.power).sum(axis=0)
        best = min(range(len(cost)), key=lambda v: (cost[v], self._rank[v]))
        if trace is not None:
            trace.append(Decision((), f"min-sum-power-{self.power}", f"cost={int(cost[best])}"))
        return best


class Median(_SumMechanism):
    """Minimises the sum of distances to the ballots."""

    name = "median"


class Mean(_SumMechanism):
    """Minimises the sum of squared distances to the ballots."""

    name = "mean"
    power = 2


def median_mechanism(g: Graph, tiebreak: Sequence[str] | None, x: Sequence[str]) -> Outcome:
    return Median(g, tiebreak).run(list(x))


def mean_mechanism(g: Graph, tiebreak: Sequence[str] | None, x: Sequence[str]) -> Outcome:
    return Mean(g, tiebreak).run(list(x))


class Fixed(Mechanism):
    name = "fixed"
    support_only = True
    claims_pareto = False

    def __init__(self, g: Graph, vertex: str):
        super().__init__(g)
        self.vertex = vertex
        self._v = g.idx(vertex)

    def describe(self) -> str:
        return f"fixed:{self.vertex}"

    def _select(self, idx, trace):
        if trace is not None:
            trace.append(Decision((), "fixed", self.vertex))
        return self._v


class Dictator(Mechanism):
    """Ballot of agent ``agent`` (1-based) in the ballot sequence.

    If that agent cast no ballot the first ballot wins.  Not anonymous.
    """

    name = "dictator"
    anonymous = False

    accepts_empty = False

    def __init__(self, g: Graph, agent: int):
        super().__init__(g)
        if agent < 1:
            raise InvalidOrder("agent index is 1-based")
        self.agent = agent

    def describe(self) -> str:
        return f"dictator:{self.agent}"

    def _select(self, idx, trace):
        if not idx:
            raise EmptyProfile("dictator needs at least one ballot")
        pos = self.agent - 1 if len(idx) >= self.agent else 0
        if trace is not None:
            trace.append(Decision((), "dictator", f"ballot {pos + 1}"))
        return idx[pos]


def fixed_mechanism(g: Graph, vertex: str, x: Sequence[str] = ()) -> Outcome:
    return Fixed(g, vertex).run(list(x))


def dictator_mechanism(g: Graph, agent: int, x: Sequence[str]) -> Outcome:
    return Dictator(g, agent).run(list(x))


# -- disconnected graphs ----------------------------------------------------------


class DisconnectedWrapper(Mechanism):
    """Run the first component, in a fixed order, that received a ballot.

    Only ballots inside that component are passed to its mechanism.
    """

    name = "components"

    def __init__(self, components: Sequence[Mechanism]):
        super().__init__(disjoint_union([m.graph for m in components]))
        self.components = tuple(components)
        self.anonymous = all(m.anonymous for m in components)
        self.support_only = all(m.support_only for m in components)
        self.claims_pareto = all(m.claims_pareto for m in components)
        self.accepts_empty = False
        self._offsets = []
        offset = 0
        self._component_of = []
        for ci, m in enumerate(components):
            self._offsets.append(offset)
            self._component_of.extend([ci] * len(m.graph))
            offset += len(m.graph)

    def describe(self) -> str:
        return "components[" + "; ".join(m.describe() for m in self.components) + "]"

    def _select(self, idx, trace):
        if not idx:
            raise EmptyProfile("the component wrapper needs at least one ballot")
        active = min(self._component_of[b] for b in idx)
        off = self._offsets[active]
        local = [b - off for b in idx if self._component_of[b] == active]
        inner = self.components[active]
        if trace is not None:
            trace.append(Decision((), "component", f"#{active + 1} with {len(local)} ballots"))
            inner_outcome = inner._select(local, trace)
        else:
            inner_outcome = inner.choose(local)
        return inner_outcome + off


def disconnected_wrapper(components: Sequence[tuple[Graph, Mechanism]], x: Sequence[str]) -> Outcome:
    mechs = []
    for g, m in components:
        if m.graph is not g and m.graph != g:
            raise ValueError("mechanism is bound to a different graph than its component")
        mechs.append(m)
    return DisconnectedWrapper(mechs).run(list(x))


# -- helpers ------------------------------------------------------------------------


def saturation_checks(g: Graph, p: ZvOrderedPartition, taus: Sequence[int] = (1, 2, 3)) -> list[str]:
    """Check every subgraph's F* returns its root when all its locations are voted tau times.

    Returns human-readable failures (empty when the hypothesis holds).
    """
    failures = []
    for path, gi, pi, root_vertex in _subgraph_levels(g, p, ()):
        mech = FStar(gi, pi, allow_weighted=True)
        for tau in taus:
            got = mech([v for v in gi.vertices for _ in range(tau)])
            if got != root_vertex:
                where = "V" + "/V".join(map(str, path))
                failures.append(f"{where}: tau={tau} gave {got}, root is {root_vertex}")
    return failures


def _subgraph_levels(g: Graph, p: ZvOrderedPartition, path):
    rs = roots(g, p)
    for i, (sub, r) in enumerate(zip(p.subgraphs, rs), 1):
        gi = g.induced(sub.members)
        if sub.nested is None:
            yield path + (i,), gi, ZvOrderedPartition((sub.members[0],)), r
        else:
            yield path + (i,), gi, sub.nested, r
            yield from _subgraph_levels(gi, sub.nested, path + (i,))


def default_tiebreak(g: Graph, p: ZvOrderedPartition | None) -> tuple[str, ...]:
    """Induced global order when a usable partition exists, else construction order."""
    if p is not None:
        try:
            return induced_global_order(g, p)
        except MissingNestedPartition:
            pass
    return g.vertices


def mechanism_from_spec(
    spec: str,
    g: Graph,
    p: ZvOrderedPartition | None = None,
    *,
    allow_weighted: bool = False,
) -> Mechanism:
    """Parse the CLI grammar.

    ``fstar``, ``order:v1,v2,...``, ``lca:root``, ``block:anchor[:order]``,
    ``median[:order]``, ``mean[:order]``, ``fixed:v``, ``dictator:i``.
    """
    kind, _, rest = spec.strip().partition(":")
    kind = kind.lower()

    def vertex_list(text: str) -> list[str]:
        return [t for t in text.replace(",", " ").split() if t]

    if kind == "fstar":
        if p is None:
            raise InvalidPartition("fstar needs a partition in the input file")
        return FStar(g, p, allow_weighted=allow_weighted)
    if kind == "order":
        return OrderMechanism(g, vertex_list(rest))
    if kind == "lca":
        return LcaTree(g, rest.strip())
    if kind == "block":
        anchor, _, order = rest.partition(":")
        return BlockGraphMechanism(g, anchor.strip(), vertex_list(order) if order.strip() else None)
    if kind in ("median", "mean"):
        cls = Median if kind == "median" else Mean
        tiebreak = vertex_list(rest) if rest.strip() else default_tiebreak(g, p)
        return cls(g, tiebreak)
    if kind == "fixed":
        return Fixed(g, rest.strip())
    if kind == "dictator":
        try:
            return Dictator(g, int(rest))
        except ValueError:
            raise InvalidOrder(f"dictator needs an integer agent index, got {rest!r}") from None
    raise ValueError(f"unknown mechanism {spec!r}")
