"""ZV-ordered partitions and their validation.

A partition is a left-to-right ordered sequence ``z_order`` of Z-vertices
plus a sequence of vertex groups (subgraphs).  Each subgraph may carry a
nested partition of its induced graph, which is how the recursive
structure of a ZV-line graph is written down.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import (
    AmbiguousRoot,
    Disconnected,
    MissingNestedPartition,
    NotSubsetOfZ,
    UnknownVertex,
)
from .graph import Graph

# failure tags, in the order checks are run
PARTITION_TAGS = ("D2.1", "D2.2", "D2.3", "D2.4", "D2.5")
ZV_LINE_TAGS = ("D4.a", "D4.b", "D4.c", "D4.d", "D4.e", "UnitLengthsRequired")


@dataclass(frozen=True)
class SubgraphSpec:
    members: tuple[str, ...]
    nested: "ZvOrderedPartition | None" = None
    # optional; only checked against the derived root, never trusted
    declared_root: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))


@dataclass(frozen=True)
class ZvOrderedPartition:
    z_order: tuple[str, ...]
    subgraphs: tuple[SubgraphSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "z_order", tuple(self.z_order))
        object.__setattr__(self, "subgraphs", tuple(self.subgraphs))

    @property
    def z_set(self) -> frozenset[str]:
        return frozenset(self.z_order)

    @property
    def k(self) -> int:
        return len(self.subgraphs)

    def position(self, z: str) -> int:
        return self.z_order.index(z)

    def vertices(self) -> set[str]:
        out = set(self.z_order)
        for sub in self.subgraphs:
            out.update(sub.members)
        return out


def partition(z_order: Iterable[str], *subgraphs) -> ZvOrderedPartition:
    """Shorthand constructor.

    Each subgraph is a ``SubgraphSpec``, a bare iterable of members, or a
    ``(members, nested)`` pair.
    """
    specs = []
    for sub in subgraphs:
        if isinstance(sub, SubgraphSpec):
            specs.append(sub)
        elif isinstance(sub, tuple) and len(sub) == 2 and isinstance(sub[1], (ZvOrderedPartition, type(None))):
            specs.append(SubgraphSpec(tuple(sub[0]), sub[1]))
        else:
            specs.append(SubgraphSpec(tuple(sub)))
    return ZvOrderedPartition(tuple(z_order), tuple(specs))


@dataclass(frozen=True)
class Failure:
    tag: str
    witness: tuple[str, ...]
    message: str
    # 1-based subgraph indices leading to the nested level that failed
    path: tuple[int, ...] = ()

    def __str__(self) -> str:
        where = "" if not self.path else " at V" + "/V".join(map(str, self.path))
        wit = ",".join(self.witness)
        return f"{self.tag}{where}: {self.message} [{wit}]"


@dataclass
class ValidationReport:
    failures: list[Failure] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.failures

    def tags(self) -> list[str]:
        return [f.tag for f in self.failures]

    def add(self, tag: str, witness: Iterable[str], message: str) -> None:
        self.failures.append(Failure(tag, tuple(witness), message))

    def extend(self, other: "ValidationReport", path_prefix: tuple[int, ...] = ()) -> None:
        for f in other.failures:
            self.failures.append(Failure(f.tag, f.witness, f.message, path_prefix + f.path))

    def __bool__(self) -> bool:
        return self.valid

    def __str__(self) -> str:
        if self.valid:
            return "valid"
        return "invalid\n" + "\n".join(f"  {f}" for f in self.failures)


# -- helpers ------------------------------------------------------------------


def _check_known(g: Graph, p: ZvOrderedPartition) -> None:
    for v in p.z_order:
        g.idx(v)
    for sub in p.subgraphs:
        for v in sub.members:
            g.idx(v)


def _reachable(g: Graph, sources: Iterable[str], blocked: set[str]) -> set[str]:
    """Vertices reachable from `sources` without entering `blocked`."""
    seen = {s for s in sources if s not in blocked}
    stack = list(seen)
    while stack:
        u = stack.pop()
        for w in g.neighbors(u):
            if w not in blocked and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _roots(g: Graph, p: ZvOrderedPartition) -> list[str | None]:
    """Derived root per subgraph, None where it is not unique."""
    out: list[str | None] = []
    z = p.z_order
    for sub in p.subgraphs:
        if not sub.members or not z:
            out.append(None)
            continue
        dists = [(g.distance_to_set(v, z), g.idx(v), v) for v in sub.members]
        best = min(d for d, _, _ in dists)
        argmins = [v for d, _, v in dists if d == best]
        out.append(argmins[0] if len(argmins) == 1 else None)
    return out


# -- partition conditions -----------------------------------------------------


def validate_partition(g: Graph, p: ZvOrderedPartition) -> ValidationReport:
    """Check the five conditions of a ZV-ordered partition.

    Raises UnknownVertex when the partition names a vertex not in `g`.
    Failures are listed in condition order, each with a witness.
    """
    _check_known(g, p)
    report = ValidationReport()
    z_set = set(p.z_order)
    subs = p.subgraphs

    # D2.1 non-empty elements, pairwise disjoint subgraphs, no repeats inside one
    if not p.z_order:
        report.add("D2.1", (), "Z is empty")
    for i, sub in enumerate(subs, 1):
        if not sub.members:
            report.add("D2.1", (), f"V_{i} is empty")
        if len(set(sub.members)) != len(sub.members):
            dup = sorted({v for v in sub.members if sub.members.count(v) > 1}, key=g.idx)
            report.add("D2.1", dup, f"V_{i} lists a vertex twice")
    owner: dict[str, int] = {}
    for i, sub in enumerate(subs, 1):
        for v in sub.members:
            if v in owner and owner[v] != i:
                report.add("D2.1", (v,), f"V_{owner[v]} and V_{i} intersect")
            owner.setdefault(v, i)

    # D2.2 cover, and every element owns a vertex no other element covers
    covered = z_set | set(owner)
    missing = [v for v in g.vertices if v not in covered]
    if missing:
        report.add("D2.2", missing, "sequence does not cover the vertex set")
    in_some_sub = set(owner)
    if p.z_order and not (z_set - in_some_sub):
        report.add("D2.2", p.z_order, "dropping Z still leaves a cover")
    for i, sub in enumerate(subs, 1):
        others = z_set | {v for j, s in enumerate(subs, 1) if j != i for v in s.members}
        if sub.members and not (set(sub.members) - others):
            report.add("D2.2", sub.members, f"dropping V_{i} still leaves a cover")

    # D2.3 unique root at distance <= 1 from Z
    roots = _roots(g, p)
    for i, (sub, root) in enumerate(zip(subs, roots), 1):
        if not sub.members or not p.z_order:
            continue
        if root is None:
            best = min(g.distance_to_set(v, p.z_order) for v in sub.members)
            tied = [v for v in sub.members if g.distance_to_set(v, p.z_order) == best]
            report.add("D2.3", g.sorted(tied), f"V_{i} has no unique vertex closest to Z")
            continue
        if g.distance_to_set(root, p.z_order) > 1:
            report.add("D2.3", (root,), f"root of V_{i} is farther than 1 from Z")
        if sub.declared_root is not None and sub.declared_root != root:
            report.add("D2.3", (sub.declared_root, root), f"declared root of V_{i} is not the derived root")

    # D2.4 separation through the root and through Z
    for i, (sub, root) in enumerate(zip(subs, roots), 1):
        if root is None:
            continue
        members = set(sub.members)
        outside = set(g.vertices) - members
        inner = members - {root}
        leaked = _reachable(g, inner, {root}) & outside
        if leaked:
            report.add("D2.4", (root, *g.sorted(leaked)), f"V_{i} reaches outside without passing its root")
        leaked = _reachable(g, members - z_set, z_set) & (outside - z_set)
        if leaked:
            report.add("D2.4", g.sorted(leaked), f"V_{i} reaches outside without passing through Z")

    # D2.5 the order on Z is injective
    if len(set(p.z_order)) != len(p.z_order):
        dup = sorted({v for v in p.z_order if p.z_order.count(v) > 1}, key=g.idx)
        report.add("D2.5", dup, "Z order lists a vertex twice")
    return report


def root_of(g: Graph, p: ZvOrderedPartition, i: int) -> str:
    """Root of the ``i``-th subgraph (1-based)."""
    if not 1 <= i <= len(p.subgraphs):
        raise IndexError(f"partition has {len(p.subgraphs)} subgraphs, asked for {i}")
    _check_known(g, p)
    root = _roots(g, p)[i - 1]
    if root is None:
        raise AmbiguousRoot(f"V_{i} has no unique vertex closest to Z")
    return root


def roots(g: Graph, p: ZvOrderedPartition) -> list[str]:
    return [root_of(g, p, i) for i in range(1, len(p.subgraphs) + 1)]


def is_interval(p: ZvOrderedPartition, s: Iterable[str]) -> bool:
    positions = []
    pos = {z: i for i, z in enumerate(p.z_order)}
    for v in s:
        if v not in pos:
            raise NotSubsetOfZ(f"{v!r} is not a Z-vertex")
        positions.append(pos[v])
    if not positions:
        return True
    positions = sorted(set(positions))
    return positions[-1] - positions[0] + 1 == len(positions)


# -- ZV-line conditions -------------------------------------------------------


def _trivial(members: Sequence[str]) -> bool:
    return len(set(members)) == 1


def validate_zv_line(g: Graph, p: ZvOrderedPartition) -> ValidationReport:
    """Recursively check that `g` is a ZV-line graph w.r.t. `p`.

    Singleton subgraphs need no nested partition; any larger subgraph
    without one raises MissingNestedPartition.
    """
    report = ValidationReport()
    if g.weighted:
        heavy = [f"{u}-{v}" for u, v, length in g.edges if length != 1]
        report.add("UnitLengthsRequired", (), f"edges with non-unit length: {' '.join(heavy)}")
    base = validate_partition(g, p)
    report.extend(base)
    z_set = p.z_set
    for z in p.z_order:
        near = g.ball(z, 1) & z_set
        if not is_interval(p, near):
            report.add("D4.b", (z, *_in_z_order(p, near)), f"B({z},1)∩Z is not an interval")
    root_list = _roots(g, p)
    for i, (sub, root) in enumerate(zip(p.subgraphs, root_list), 1):
        if not sub.members:
            continue
        if sub.nested is None and not _trivial(sub.members):
            raise MissingNestedPartition(f"V_{i} has {len(sub.members)} vertices but no nested partition")
        nested = sub.nested or ZvOrderedPartition((sub.members[0],))
        try:
            gi = g.induced(sub.members)
        except Disconnected:
            report.add("D4.c", g.sorted(set(sub.members)), f"induced graph on V_{i} is disconnected")
            continue
        try:
            inner = validate_zv_line(gi, nested)
        except UnknownVertex as exc:
            report.add("D4.c", (), f"nested partition of V_{i} names a non-member: {exc}")
            continue
        if not inner.valid:
            report.add("D4.c", (), f"induced graph on V_{i} is not ZV-line w.r.t. its nested partition")
            report.extend(inner, (i,))
        if root is None:
            continue
        if not nested.z_order or nested.z_order[0] != root:
            first = nested.z_order[0] if nested.z_order else ""
            report.add("D4.d", (root, first), f"root of V_{i} is not the leftmost Z-vertex of its nested partition")
        near = g.ball(root, 1) & z_set
        if not is_interval(p, near):
            report.add("D4.e", (root, *_in_z_order(p, near)), f"B(R(V_{i}),1)∩Z is not an interval")
    return report


def _in_z_order(p: ZvOrderedPartition, s: Iterable[str]) -> tuple[str, ...]:
    s = set(s)
    return tuple(z for z in p.z_order if z in s)


def ball_interval_check(g: Graph, p: ZvOrderedPartition) -> ValidationReport:
    """Exhaustively confirm that B(v,d)∩Z is an interval for every v and d.

    Stops at the first violation.  On a valid ZV-line graph the report
    is always empty.
    """
    report = ValidationReport()
    z_set = p.z_set
    diameter = g.diameter()
    for v in g.vertices:
        for d in range(diameter + 1):
            near = g.ball(v, d) & z_set
            if not is_interval(p, near):
                report.add("D4.b", (v, *_in_z_order(p, near)), f"B({v},{d})∩Z is not an interval")
                return report
    return report


def iter_levels(
    g: Graph, p: ZvOrderedPartition, path: tuple[int, ...] = ()
) -> Iterator[tuple[tuple[int, ...], Graph, ZvOrderedPartition]]:
    """Yield (path, induced graph, partition) for every level of the nesting.

    Singleton subgraphs are reported with the trivial partition of their vertex.
    """
    yield path, g, p
    for i, sub in enumerate(p.subgraphs, 1):
        gi = g.induced(sub.members)
        if sub.nested is not None:
            yield from iter_levels(gi, sub.nested, path + (i,))
        elif _trivial(sub.members):
            yield path + (i,), gi, ZvOrderedPartition((sub.members[0],))
        else:
            raise MissingNestedPartition(f"V_{i} has no nested partition")


def induced_global_order(g: Graph, p: ZvOrderedPartition) -> tuple[str, ...]:
    """Z left to right, then each subgraph's own induced order, no repeats."""
    order: list[str] = list(dict.fromkeys(p.z_order))
    placed = set(order)
    for i, sub in enumerate(p.subgraphs, 1):
        if sub.nested is not None:
            inner = induced_global_order(g.induced(sub.members), sub.nested)
        elif _trivial(sub.members):
            inner = (sub.members[0],)
        else:
            raise MissingNestedPartition(f"V_{i} has no nested partition")
        for v in inner:
            if v not in placed:
                placed.add(v)
                order.append(v)
    return tuple(order)
