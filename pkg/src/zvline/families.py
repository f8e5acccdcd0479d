"""Named graph families with their canonical ZV-ordered partitions.

Vertex names are stable per family so fixtures can be referred to by name:
``z1..`` for Z-vertices and ``v1..`` for V-vertices where the family has
that shape, ``c1..`` around cycles, ``u1..`` in block graphs, and
path-qualified names in the recursive family.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .blocks import block_graph_partition
from .errors import InvalidParameters
from .graph import Graph
from .recognize import count_zv_line_partitions, recognize_zv_line  # noqa: F401  (re-exported)
from .structure import SubgraphSpec, ZvOrderedPartition

FAMILY_NAMES = (
    "clique",
    "biclique",
    "discrete_line",
    "double_v_line",
    "grid2n",
    "family_F",
    "rooted_tree",
    "block_graph",
    "cycle",
    "nonregular_example",
    "weighted_counterexample",
)


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: tuple = ()

    def __post_init__(self):
        if self.name not in FAMILY_NAMES:
            raise InvalidParameters(f"unknown family {self.name!r}; known: {', '.join(FAMILY_NAMES)}")
        object.__setattr__(self, "params", tuple(self.params))

    def label(self) -> str:
        return f"{self.name}({', '.join(map(_fmt_param, self.params))})"


def _fmt_param(p) -> str:
    if isinstance(p, (tuple, list)):
        return "[" + " ".join(map(_fmt_param, p)) + "]"
    return str(p)


@dataclass(frozen=True)
class AnnotatedGraph:
    graph: Graph
    partition: ZvOrderedPartition | None
    provenance: str
    # free-form notes: deliberate invalidity, isomorphisms, transcription remarks
    notes: dict[str, str] = field(default_factory=dict)
    zv_line: bool = True


def _need(cond: bool, message: str) -> None:
    if not cond:
        raise InvalidParameters(message)


def _int(value, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidParameters(f"{name} must be an integer, got {value!r}")
    _need(value >= minimum, f"{name} must be at least {minimum}, got {value}")
    return value


def _singletons(z: list[str], vs: list[str]) -> ZvOrderedPartition:
    return ZvOrderedPartition(tuple(z), tuple(SubgraphSpec((v,)) for v in vs))


# -- families -------------------------------------------------------------------


def clique(size: int) -> AnnotatedGraph:
    size = _int(size, "clique size", 1)
    z = [f"z{i}" for i in range(1, size + 1)]
    g = Graph(z, itertools.combinations(z, 2))
    return AnnotatedGraph(g, ZvOrderedPartition(tuple(z)), f"clique({size})")


def biclique(a: int, b: int) -> AnnotatedGraph:
    a, b = _int(a, "Z side", 1), _int(b, "V side", 1)
    z = [f"z{i}" for i in range(1, a + 1)]
    v = [f"v{i}" for i in range(1, b + 1)]
    g = Graph(z + v, [(zi, vj) for zi in z for vj in v])
    return AnnotatedGraph(g, _singletons(z, v), f"biclique({a}, {b})")


def discrete_line(k: int) -> AnnotatedGraph:
    k = _int(k, "number of Z-vertices", 1)
    z = [f"z{i}" for i in range(1, k + 1)]
    v = [f"v{i}" for i in range(1, k)]
    edges = [e for i in range(k - 1) for e in ((z[i], v[i]), (v[i], z[i + 1]))]
    return AnnotatedGraph(Graph(z + v, edges), _singletons(z, v), f"discrete_line({k})")


def double_v_line(k: int) -> AnnotatedGraph:
    k = _int(k, "number of Z-vertices", 1)
    z = [f"z{i}" for i in range(1, k + 1)]
    v = [f"v{i}" for i in range(1, 2 * (k - 1) + 1)]
    edges = []
    for i in range(k - 1):
        for w in (v[2 * i], v[2 * i + 1]):
            edges += [(z[i], w), (w, z[i + 1])]
    return AnnotatedGraph(Graph(z + v, edges), _singletons(z, v), f"double_v_line({k})")


def grid2n(n: int) -> AnnotatedGraph:
    """The 2 x n grid: Z is one colour class read column by column.

    ``z{c}`` sits at (row (c-1) mod 2, column c-1) and ``v{c}`` at the other
    row of the same column, so ``v{c}`` touches ``z{c-1}, z{c}, z{c+1}``.
    """
    n = _int(n, "grid length", 1)
    z = [f"z{c}" for c in range(1, n + 1)]
    v = [f"v{c}" for c in range(1, n + 1)]
    edges = []
    for c in range(n):
        edges.append((z[c], v[c]))
        if c + 1 < n:
            edges += [(z[c], v[c + 1]), (v[c], z[c + 1])]
    coords = {}
    for c in range(n):
        coords[z[c]] = (c % 2, c)
        coords[v[c]] = (1 - c % 2, c)
    notes = {"grid_map": " ".join(f"{name}=({r},{c})" for name, (r, c) in coords.items())}
    return AnnotatedGraph(Graph(z + v, edges), _singletons(z, v), f"grid2n({n})", notes)


def grid_coordinates(ag: AnnotatedGraph) -> dict[str, tuple[int, int]]:
    """Parse the grid isomorphism emitted with a grid2n fixture."""
    out = {}
    for item in ag.notes["grid_map"].split():
        name, _, rc = item.partition("=")
        r, c = rc.strip("()").split(",")
        out[name] = (int(r), int(c))
    return out


def family_F(depth: int, preroots: int, children: int) -> AnnotatedGraph:
    """Uniform member of the recursive pre-root family.

    Depth 0 is a single vertex.  Each further level adds `preroots` new
    vertices joined completely to the roots of `children` copies of the
    previous level; the first new vertex is the root.  Vertex names record
    the path of child indices, e.g. ``r2.1_1`` is pre-root 1 of child 1 of
    child 2.
    """
    depth = _int(depth, "depth", 0)
    preroots = _int(preroots, "pre-roots per level", 1)
    children = _int(children, "children per level", 1)
    vertices: list[str] = []
    edges: list[tuple[str, str]] = []

    def build(d: int, path: tuple[int, ...]) -> tuple[str, ZvOrderedPartition | None, list[str]]:
        stem = "r" + ".".join(map(str, path))
        if d == 0:
            name = stem + "_1"
            vertices.append(name)
            return name, None, [name]
        tops = [f"{stem}_{j}" for j in range(1, preroots + 1)]
        vertices.extend(tops)
        members = list(tops)
        subs = []
        for i in range(1, children + 1):
            child_root, child_part, child_members = build(d - 1, path + (i,))
            edges.extend((t, child_root) for t in tops)
            subs.append(SubgraphSpec(tuple(child_members), child_part))
            members += child_members
        return tops[0], ZvOrderedPartition(tuple(tops), tuple(subs)), members

    _, part, _ = build(depth, ())
    g = Graph(vertices, edges)
    if part is None:
        part = ZvOrderedPartition((vertices[0],))
    return AnnotatedGraph(g, part, f"family_F({depth}, {preroots}, {children})", {"root": vertices[0]})


def rooted_tree(depth: int, arity: int) -> AnnotatedGraph:
    """Complete `arity`-ary tree of the given depth; the one-pre-root case of family_F."""
    ag = family_F(depth, 1, arity)
    return AnnotatedGraph(ag.graph, ag.partition, f"rooted_tree({depth}, {arity})", ag.notes)


def block_graph(sizes=(3, 3, 3), attachments=None) -> AnnotatedGraph:
    """Cliques glued at cut vertices, anchored at ``u1``.

    Block 1 is ``u1..u{sizes[0]}``.  Every later block shares one existing
    vertex (``attachments[j-1]`` is its number, default the newest vertex)
    and adds ``size - 1`` fresh ones.
    """
    sizes = tuple(_int(s, "block size", 2) for s in sizes)
    _need(len(sizes) >= 1, "block_graph needs at least one block")
    if attachments is not None:
        attachments = tuple(attachments)
        _need(len(attachments) == len(sizes) - 1, "one attachment per block after the first")
    count = 0
    edges: list[tuple[str, str]] = []
    for j, size in enumerate(sizes):
        if j == 0:
            block = [f"u{i}" for i in range(1, size + 1)]
            count = size
        else:
            at = attachments[j - 1] if attachments is not None else count
            at = _int(at, "attachment vertex", 1)
            _need(at <= count, f"attachment u{at} does not exist yet")
            block = [f"u{at}"] + [f"u{i}" for i in range(count + 1, count + size)]
            count += size - 1
        edges.extend(itertools.combinations(block, 2))
    g = Graph([f"u{i}" for i in range(1, count + 1)], edges)
    label = f"block_graph([{' '.join(map(str, sizes))}]" + (
        f", [{' '.join(map(str, attachments))}])" if attachments is not None else ")"
    )
    return AnnotatedGraph(g, block_graph_partition(g, "u1"), label, {"anchor": "u1"})


def cycle(m: int) -> AnnotatedGraph:
    m = _int(m, "cycle length", 3)
    c = [f"c{i}" for i in range(1, m + 1)]
    g = Graph(c, [(c[i], c[(i + 1) % m]) for i in range(m)])
    label = f"cycle({m})"
    if m == 3:
        return AnnotatedGraph(g, ZvOrderedPartition(tuple(c)), label)
    if m == 4:
        return AnnotatedGraph(g, _singletons(["c1", "c3"], ["c2", "c4"]), label)
    return AnnotatedGraph(g, None, label, {"note": "not a ZV-line graph, no partition"}, zv_line=False)


def nonregular_example() -> AnnotatedGraph:
    """Four Z-vertices, one V-vertex seeing all of them and three joining consecutive pairs."""
    z = ["z1", "z2", "z3", "z4"]
    v = ["v1", "v2", "v3", "v4"]
    edges = [("v1", zi) for zi in z]
    for i in range(3):
        edges += [(z[i], v[i + 1]), (v[i + 1], z[i + 1])]
    notes = {"note": "partition transcribed from a drawing, the only available source"}
    return AnnotatedGraph(Graph(z + v, edges), _singletons(z, v), "nonregular_example()", notes)


def weighted_counterexample() -> AnnotatedGraph:
    """Two Z-vertices and one V-vertex with edge lengths 1 and 10.

    The partition is structurally valid but the graph is weighted, so it is
    not ZV-line; F* on it is manipulable.
    """
    g = Graph(["z_l", "z_r", "v"], [("v", "z_l", 1), ("v", "z_r", 10)])
    notes = {"note": "weighted, so the partition is not ZV-line (UnitLengthsRequired)"}
    return AnnotatedGraph(g, _singletons(["z_l", "z_r"], ["v"]), "weighted_counterexample()", notes, zv_line=False)


_BUILDERS = {
    "clique": clique,
    "biclique": biclique,
    "discrete_line": discrete_line,
    "double_v_line": double_v_line,
    "grid2n": grid2n,
    "family_F": family_F,
    "rooted_tree": rooted_tree,
    "block_graph": block_graph,
    "cycle": cycle,
    "nonregular_example": nonregular_example,
    "weighted_counterexample": weighted_counterexample,
}


def generate(spec: FamilySpec | str, *params) -> AnnotatedGraph:
    if isinstance(spec, str):
        spec = FamilySpec(spec, params)
    try:
        return _BUILDERS[spec.name](*spec.params)
    except TypeError as exc:
        raise InvalidParameters(f"bad parameters for {spec.name}: {exc}") from None


# -- cycle of five ----------------------------------------------------------------

C5_BASE_ORDERS = ((1, 2, 4, 5, 3), (1, 2, 5, 4, 3), (1, 2, 5, 3, 4))


def c5_symmetries() -> list[tuple[int, ...]]:
    """The ten rotations and reflections of C5 as maps on positions 1..5."""
    maps = []
    for shift in range(5):
        maps.append(tuple((i + shift) % 5 + 1 for i in range(5)))
        maps.append(tuple((shift - i) % 5 + 1 for i in range(5)))
    return maps


def c5_orders() -> set[tuple[str, ...]]:
    """Order mechanisms manipulation-resistant on C5, as sequences of ``c1..c5``."""
    out = set()
    for base in C5_BASE_ORDERS:
        for sym in c5_symmetries():
            out.add(tuple(f"c{sym[p - 1]}" for p in base))
    return out
