"""The ``zvgraph`` text format, version 1.

::

    zvgraph 1
    meta family discrete_line(3)
    vertex z1
    edge z1 v1
    edge v1 z2 3          # optional positive length
    Z: z1 z2 z3
    subgraph {
      members: a b c
      Z: a b
      subgraph {
        members: c
      }
    }

Statements end at a newline or ``;``; ``#`` starts a comment.  A
subgraph block may also carry ``root: <id>``, which is checked against the
derived root.  :func:`emit` writes the canonical form, which
:func:`parse` reads back to the same graph and partition.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError, ZvError
from .graph import Graph
from .structure import SubgraphSpec, ZvOrderedPartition

HEADER = "zvgraph"
VERSION = "1"
_TOKEN = re.compile(r"[{};]|[^\s{};]+")
_FORBIDDEN_IN_VALUES = set("{};#\n")


@dataclass(frozen=True)
class ZvGraphFile:
    graph: Graph
    partition: ZvOrderedPartition | None = None
    meta: dict[str, str] = field(default_factory=dict)


def _statements(text: str):
    """Yield (line number, tokens) per statement; braces are their own statements."""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        current: list[str] = []
        for tok in _TOKEN.findall(line):
            if tok == ";":
                if current:
                    yield lineno, current
                current = []
            elif tok == "{":
                yield lineno, current + [tok] if current else [tok]
                current = []
            elif tok == "}":
                if current:
                    yield lineno, current
                yield lineno, [tok]
                current = []
            else:
                current.append(tok)
        if current:
            yield lineno, current


class _Parser:
    def __init__(self, text: str):
        self.stmts = list(_statements(text))
        self.pos = 0

    def next(self):
        if self.pos >= len(self.stmts):
            return None
        stmt = self.stmts[self.pos]
        self.pos += 1
        return stmt

    def parse(self) -> ZvGraphFile:
        first = self.next()
        if first is None or first[1] != [HEADER, VERSION]:
            got = " ".join(first[1]) if first else "empty input"
            raise ParseError(f"line {first[0] if first else 1}: expected header 'zvgraph 1', got {got!r}")
        vertices: list[str] = []
        edges: list[tuple] = []
        meta: dict[str, str] = {}
        z_order = None
        subs: list[SubgraphSpec] = []
        while (stmt := self.next()) is not None:
            lineno, toks = stmt
            head = toks[0]
            if head == "vertex":
                if len(toks) != 2:
                    raise ParseError(f"line {lineno}: 'vertex' takes one id")
                vertices.append(toks[1])
            elif head == "edge":
                if len(toks) not in (3, 4):
                    raise ParseError(f"line {lineno}: 'edge' takes two ids and an optional length")
                if len(toks) == 4:
                    try:
                        length = int(toks[3])
                    except ValueError:
                        raise ParseError(f"line {lineno}: edge length {toks[3]!r} is not an integer") from None
                    edges.append((toks[1], toks[2], length))
                else:
                    edges.append((toks[1], toks[2]))
            elif head == "meta":
                if len(toks) < 3:
                    raise ParseError(f"line {lineno}: 'meta' takes a key and a value")
                meta[toks[1]] = " ".join(toks[2:])
            elif head == "Z:":
                if z_order is not None:
                    raise ParseError(f"line {lineno}: second top-level Z line")
                z_order = tuple(toks[1:])
            elif head == "subgraph":
                subs.append(self.subgraph(lineno, toks))
            else:
                raise ParseError(f"line {lineno}: unknown statement {head!r}")
        if subs and z_order is None:
            raise ParseError("subgraph blocks given without a top-level Z line")
        try:
            g = Graph(vertices, edges)
        except ZvError as exc:
            raise ParseError(f"invalid graph: {exc}") from exc
        partition = ZvOrderedPartition(z_order, tuple(subs)) if z_order is not None else None
        return ZvGraphFile(g, partition, meta)

    def subgraph(self, lineno: int, toks: list[str]) -> SubgraphSpec:
        if toks != ["subgraph", "{"]:
            raise ParseError(f"line {lineno}: expected 'subgraph {{'")
        members = None
        z_order = None
        root = None
        subs: list[SubgraphSpec] = []
        while True:
            stmt = self.next()
            if stmt is None:
                raise ParseError(f"line {lineno}: subgraph block is never closed")
            at, inner = stmt
            head = inner[0]
            if inner == ["}"]:
                break
            if head == "members:":
                if members is not None:
                    raise ParseError(f"line {at}: second members line in one subgraph")
                members = tuple(inner[1:])
            elif head == "Z:":
                if z_order is not None:
                    raise ParseError(f"line {at}: second Z line in one subgraph")
                z_order = tuple(inner[1:])
            elif head == "root:":
                if len(inner) != 2:
                    raise ParseError(f"line {at}: 'root:' takes one id")
                root = inner[1]
            elif head == "subgraph":
                subs.append(self.subgraph(at, inner))
            else:
                raise ParseError(f"line {at}: unexpected {head!r} inside a subgraph")
        if not members:
            raise ParseError(f"line {lineno}: subgraph without members")
        if subs and z_order is None:
            raise ParseError(f"line {lineno}: nested subgraphs without a Z line")
        nested = ZvOrderedPartition(z_order, tuple(subs)) if z_order is not None else None
        return SubgraphSpec(members, nested, root)


def parse(text: str) -> ZvGraphFile:
    return _Parser(text).parse()


def read(path) -> ZvGraphFile:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def emit(g: Graph, p: ZvOrderedPartition | None = None, meta: dict[str, str] | None = None) -> str:
    """Canonical text for a graph, an optional partition and metadata."""
    lines = [f"{HEADER} {VERSION}"]
    for key, value in (meta or {}).items():
        value = " ".join(str(value).split())
        if _FORBIDDEN_IN_VALUES & set(value) or not value or len(key.split()) != 1:
            raise ValueError(f"metadata {key!r} cannot be written: {value!r}")
        lines.append(f"meta {key} {value}")
    lines += [f"vertex {v}" for v in g.vertices]
    for u, v, length in g.edges:
        lines.append(f"edge {u} {v}" + (f" {length}" if length != 1 else ""))
    if p is not None:
        lines.append("Z: " + " ".join(p.z_order) if p.z_order else "Z:")
        for sub in p.subgraphs:
            lines += _emit_subgraph(sub, "")
    return "\n".join(lines) + "\n"


def _emit_subgraph(sub: SubgraphSpec, indent: str) -> list[str]:
    inner = indent + "  "
    out = [f"{indent}subgraph {{", f"{inner}members: " + " ".join(sub.members)]
    if sub.declared_root is not None:
        out.append(f"{inner}root: {sub.declared_root}")
    if sub.nested is not None:
        out.append(f"{inner}Z: " + " ".join(sub.nested.z_order))
        for child in sub.nested.subgraphs:
            out += _emit_subgraph(child, inner)
    out.append(f"{indent}}}")
    return out


def write(path, g: Graph, p: ZvOrderedPartition | None = None, meta: dict[str, str] | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit(g, p, meta))
