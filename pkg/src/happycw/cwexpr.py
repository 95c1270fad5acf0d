"""Clique-width expressions: a small prefix DSL, evaluation and per-node metadata.

Surface syntax (``;`` starts a comment)::

    expr := (v ID LABEL) | (u expr expr) | (r I J expr) | (e I J expr)

``(r i j e)`` relabels every ``i`` vertex to ``j``; ``(e i j e)`` joins every
``i`` vertex to every ``j`` vertex.

An expression is stored flat: ``nodes`` lists the operators in left-first
post-order, children refer to earlier positions, and the root is the last
node.  Keeping the tree flat makes equality, hashing and the bottom-up
dynamic programs iterative, so deep expressions (threshold graphs produce
chains as long as the graph) never touch the recursion limit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import FormatError, GraphMismatch, PartiallyRedundant
from .graph import Graph

_ID = re.compile(r"[A-Za-z0-9_]+\Z")


@dataclass(frozen=True)
class Introduce:
    vertex: str
    label: int


@dataclass(frozen=True)
class Union:
    left: int
    right: int


@dataclass(frozen=True)
class Rename:
    src: int
    dst: int
    child: int


@dataclass(frozen=True)
class AddEdges:
    i: int
    j: int
    child: int


Node = Introduce | Union | Rename | AddEdges


def children(node) -> tuple[int, ...]:
    if isinstance(node, Union):
        return (node.left, node.right)
    if isinstance(node, (Rename, AddEdges)):
        return (node.child,)
    return ()


def _reindex(node, remap: Mapping[int, int]):
    if isinstance(node, Union):
        return Union(remap[node.left], remap[node.right])
    if isinstance(node, Rename):
        return Rename(node.src, node.dst, remap[node.child])
    if isinstance(node, AddEdges):
        return AddEdges(node.i, node.j, remap[node.child])
    return node


@dataclass(frozen=True)
class CwExpression:
    """A validated w-expression in canonical post-order (root last)."""

    nodes: tuple

    def __post_init__(self):
        nodes = tuple(self.nodes)
        if not nodes:
            raise ValueError("empty expression")
        parent_count = [0] * len(nodes)
        for k, node in enumerate(nodes):
            for c in children(node):
                if not 0 <= c < len(nodes) or c == k:
                    raise ValueError(f"node {k} has invalid child index {c}")
                parent_count[c] += 1
        roots = [k for k, cnt in enumerate(parent_count) if cnt == 0]
        if len(roots) != 1 or any(cnt > 1 for cnt in parent_count):
            raise ValueError("nodes do not form a single tree")
        # canonical left-first post-order
        order: list[int] = []
        stack = [(roots[0], False)]
        while stack:
            k, expanded = stack.pop()
            if expanded:
                order.append(k)
                continue
            stack.append((k, True))
            for c in reversed(children(nodes[k])):
                stack.append((c, False))
        if len(order) != len(nodes):
            raise ValueError("nodes contain a cycle or unreachable parts")
        remap = {old: new for new, old in enumerate(order)}
        canon = tuple(_reindex(nodes[old], remap) for old in order)
        seen: set[str] = set()
        for node in canon:
            if isinstance(node, Introduce):
                if not _ID.match(node.vertex):
                    raise ValueError(f"invalid vertex id {node.vertex!r}")
                if node.vertex in seen:
                    raise ValueError(f"duplicate vertex id {node.vertex!r}")
                seen.add(node.vertex)
                if node.label < 1:
                    raise ValueError(f"label out of range: {node.label}")
            elif isinstance(node, Rename):
                if node.src < 1 or node.dst < 1:
                    raise ValueError("label out of range")
                if node.src == node.dst:
                    raise ValueError("rename with identical labels")
            elif isinstance(node, AddEdges):
                if node.i < 1 or node.j < 1:
                    raise ValueError("label out of range")
                if node.i == node.j:
                    raise ValueError("edge introduction with identical labels")
        object.__setattr__(self, "nodes", canon)

    @property
    def root(self) -> int:
        return len(self.nodes) - 1

    @property
    def width(self) -> int:
        w = 0
        for node in self.nodes:
            if isinstance(node, Introduce):
                w = max(w, node.label)
            elif isinstance(node, Rename):
                w = max(w, node.src, node.dst)
            elif isinstance(node, AddEdges):
                w = max(w, node.i, node.j)
        return w

    def leaves(self) -> list[Introduce]:
        return [node for node in self.nodes if isinstance(node, Introduce)]

    def __len__(self) -> int:
        return len(self.nodes)

    def __str__(self) -> str:
        return print_expr(self)


class ExprBuilder:
    """Incremental construction; every method returns the new node's handle."""

    def __init__(self):
        self.nodes: list = []

    def _add(self, node) -> int:
        self.nodes.append(node)
        return len(self.nodes) - 1

    def vertex(self, vid, label: int) -> int:
        return self._add(Introduce(str(vid), label))

    def union(self, left: int, right: int) -> int:
        return self._add(Union(left, right))

    def rename(self, src: int, dst: int, child: int) -> int:
        return self._add(Rename(src, dst, child))

    def join(self, i: int, j: int, child: int) -> int:
        return self._add(AddEdges(i, j, child))

    def build(self) -> CwExpression:
        return CwExpression(tuple(self.nodes))


# --- parsing and printing --------------------------------------------------

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


def _tokens(text: str) -> Iterator[tuple[str, int, int]]:
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # pragma: no cover - the pattern matches every character class
            raise FormatError("unexpected character", line, pos - line_start + 1)
        tok = m.group()
        if not tok[0].isspace() and tok[0] != ";":
            yield tok, line, pos - line_start + 1
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rfind("\n") + 1
        pos = m.end()


def _label(tok: str, line: int, col: int) -> int:
    if not tok.isdigit():
        raise FormatError(f"expected a label, got {tok!r}", line, col)
    value = int(tok)
    if value < 1:
        raise FormatError(f"label out of range: {value}", line, col)
    return value


def parse_expr(text: str) -> CwExpression:
    nodes: list = []
    seen: dict[str, tuple[int, int]] = {}
    stack: list[list] = []  # frames: [op, args, line, col]
    root = None
    expect_op = False
    for tok, line, col in _tokens(text):
        if expect_op:
            if tok not in ("v", "u", "r", "e"):
                raise FormatError(f"unknown operator {tok!r}", line, col)
            stack[-1][0] = tok
            expect_op = False
            continue
        if tok == "(":
            if root is not None:
                raise FormatError("trailing input after expression", line, col)
            stack.append([None, [], line, col])
            expect_op = True
        elif tok == ")":
            if not stack:
                raise FormatError("unbalanced ')'", line, col)
            op, args, oline, ocol = stack.pop()
            kinds = "".join("n" if isinstance(a, int) else "a" for a, _, _ in args)
            if op == "v":
                if kinds != "aa":
                    raise FormatError("'v' takes an id and a label", oline, ocol)
                (vid, vl, vc), (lab, ll, lc) = args
                if not _ID.match(vid):
                    raise FormatError(f"invalid vertex id {vid!r}", vl, vc)
                if vid in seen:
                    raise FormatError(f"duplicate vertex-id {vid!r}", vl, vc)
                seen[vid] = (vl, vc)
                node = Introduce(vid, _label(lab, ll, lc))
            elif op == "u":
                if kinds != "nn":
                    raise FormatError("'u' takes two subexpressions", oline, ocol)
                node = Union(args[0][0], args[1][0])
            else:
                if kinds != "aan":
                    raise FormatError(f"'{op}' takes two labels and a subexpression", oline, ocol)
                i = _label(*args[0])
                j = _label(*args[1])
                if i == j:
                    what = "rename" if op == "r" else "edge introduction"
                    raise FormatError(f"{what} with identical labels", oline, ocol)
                node = Rename(i, j, args[2][0]) if op == "r" else AddEdges(i, j, args[2][0])
            nodes.append(node)
            idx = len(nodes) - 1
            if stack:
                stack[-1][1].append((idx, oline, ocol))
            else:
                root = idx
        else:
            if not stack:
                raise FormatError(f"unexpected token {tok!r} outside parentheses", line, col)
            stack[-1][1].append((tok, line, col))
    if expect_op or stack:
        raise FormatError("unexpected end of input")
    if root is None:
        raise FormatError("empty expression")
    return CwExpression(tuple(nodes))


def print_expr(expr: CwExpression) -> str:
    out: list[str] = []
    stack: list = [expr.root]
    nodes = expr.nodes
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        node = nodes[item]
        if isinstance(node, Introduce):
            out.append(f"(v {node.vertex} {node.label})")
        elif isinstance(node, Union):
            stack.extend([")", node.right, " ", node.left])
            out.append("(u ")
        else:
            op = "r" if isinstance(node, Rename) else "e"
            a, b = (node.src, node.dst) if op == "r" else (node.i, node.j)
            stack.extend([")", node.child])
            out.append(f"({op} {a} {b} ")
    return "".join(out)


# --- evaluation ------------------------------------------------------------

@dataclass(frozen=True)
class LabeledGraph:
    graph: Graph
    labels: Mapping[int, int]
    ids: tuple = field(default=())

    def vertex_of(self, vid: str) -> int:
        return self.ids.index(vid) + 1


def vertex_numbering(expr: CwExpression) -> dict[str, int]:
    """Map vertex ids to ``1..n``.

    Ids that are exactly the decimal numbers ``1..n`` keep their value;
    otherwise vertices are numbered in leaf order.
    """
    ids = [leaf.vertex for leaf in expr.leaves()]
    n = len(ids)
    if all(i.isdigit() for i in ids) and {int(i) for i in ids} == set(range(1, n + 1)):
        return {i: int(i) for i in ids}
    return {vid: k + 1 for k, vid in enumerate(ids)}


def instance_numbering(expr: CwExpression, n: int) -> dict[str, int]:
    """Ids must be the instance vertex numbers ``1..n`` (each exactly once)."""
    mapping = {}
    for leaf in expr.leaves():
        if not leaf.vertex.isdigit() or not 1 <= int(leaf.vertex) <= n:
            raise GraphMismatch(
                f"vertex id {leaf.vertex!r} is not an instance vertex in 1..{n}", leaf.vertex
            )
        mapping[leaf.vertex] = int(leaf.vertex)
    if len(mapping) != n:
        missing = sorted(set(range(1, n + 1)) - set(mapping.values()))
        raise GraphMismatch(f"expression misses instance vertices {missing[:5]}", missing[0])
    return mapping


class _Sweep:
    """Bottom-up pass over an expression.

    Label classes of finished subtrees are moved into their parent, and a
    single global edge set is enough: edges only ever join vertices of one
    subtree, so at the time a node is visited the edges recorded among its
    vertices are exactly the edges of its graph.
    """

    def __init__(self, expr: CwExpression, numbering: Mapping[str, int]):
        self.expr = expr
        self.numbering = numbering
        self.edges: set[tuple[int, int]] = set()
        self.classes: list = [None] * len(expr.nodes)
        self.label_of: dict[int, int] = {}
        # per edge-introduction node: (new edges, attempted edges)
        self.join_counts: dict[int, tuple[int, int]] = {}

    def run(self, visit=None) -> dict[int, set[int]]:
        nodes = self.expr.nodes
        for k, node in enumerate(nodes):
            if isinstance(node, Introduce):
                v = self.numbering[node.vertex]
                cls = {node.label: {v}}
            elif isinstance(node, Union):
                a, b = self.classes[node.left], self.classes[node.right]
                self.classes[node.left] = self.classes[node.right] = None
                if len(a) < len(b):
                    a, b = b, a
                for lab, members in b.items():
                    if lab in a:
                        a[lab] |= members
                    else:
                        a[lab] = members
                cls = a
            elif isinstance(node, Rename):
                cls = self.classes[node.child]
                self.classes[node.child] = None
                moved = cls.pop(node.src, None)
                if moved:
                    cls.setdefault(node.dst, set()).update(moved)
            else:
                cls = self.classes[node.child]
                self.classes[node.child] = None
                new = total = 0
                for x in cls.get(node.i, ()):
                    for y in cls.get(node.j, ()):
                        e = (x, y) if x < y else (y, x)
                        total += 1
                        if e not in self.edges:
                            self.edges.add(e)
                            new += 1
                self.join_counts[k] = (new, total)
            self.classes[k] = cls
            if visit is not None:
                visit(k, cls, self.edges)
        root = self.classes[len(nodes) - 1]
        for lab, members in root.items():
            for v in members:
                self.label_of[v] = lab
        return root


def evaluate(expr: CwExpression, numbering: Mapping[str, int] | None = None) -> LabeledGraph:
    if numbering is None:
        numbering = vertex_numbering(expr)
    sweep = _Sweep(expr, numbering)
    sweep.run()
    n = len(numbering)
    ids = [""] * n
    for vid, v in numbering.items():
        ids[v - 1] = vid
    return LabeledGraph(Graph(n, frozenset(sweep.edges)), dict(sweep.label_of), tuple(ids))


@dataclass(frozen=True)
class NiceReport:
    nice: bool
    offenders: tuple[int, ...]

    def __bool__(self) -> bool:
        return self.nice


def _join_counts(expr: CwExpression) -> dict[int, tuple[int, int]]:
    sweep = _Sweep(expr, vertex_numbering(expr))
    sweep.run()
    return sweep.join_counts


def check_nice(expr: CwExpression) -> NiceReport:
    """Nice means no edge-introduction node re-creates an existing edge."""
    offenders = tuple(k for k, (new, total) in sorted(_join_counts(expr).items()) if new < total)
    return NiceReport(not offenders, offenders)


def normalize_nice(expr: CwExpression) -> CwExpression:
    """Drop edge-introduction nodes that create no edge.

    Raises :class:`PartiallyRedundant` for a node that creates only part of
    its edges; turning such expressions nice needs a general transformation
    this module does not provide.
    """
    counts = _join_counts(expr)
    drop = set()
    for k, (new, total) in sorted(counts.items()):
        if new == 0:
            drop.add(k)
        elif new < total:
            raise PartiallyRedundant(k)
    if not drop:
        return expr
    remap: dict[int, int] = {}
    out: list = []
    for k, node in enumerate(expr.nodes):
        if k in drop:
            remap[k] = remap[node.child]
            continue
        out.append(_reindex(node, remap))
        remap[k] = len(out) - 1
    return CwExpression(tuple(out))


# --- per-node metadata -----------------------------------------------------

@dataclass(frozen=True)
class NodeMeta:
    """Label classes and outer neighborhoods of one node (index 0 = label 1)."""

    classes: tuple  # frozenset per label
    outer: tuple  # frozenset per label
    size: int
    # contains[i][j]: V_j nonempty and V_j within Out_i (i != j)
    contains: tuple
    # overlaps[i][j]: Out_i and Out_j intersect
    overlaps: tuple

    @property
    def width(self) -> int:
        return len(self.classes)

    def nonempty(self, i: int) -> bool:
        return bool(self.classes[i])


def check_graph_match(expr: CwExpression, graph: Graph, numbering: Mapping[str, int] | None = None) -> None:
    """Raise :class:`GraphMismatch` unless ``expr`` describes ``graph`` exactly."""
    if numbering is None:
        numbering = instance_numbering(expr, graph.n)
    got = evaluate(expr, numbering).graph
    if got.n != graph.n:
        raise GraphMismatch(f"expression has {got.n} vertices, graph has {graph.n}")
    extra = sorted(got.edges - graph.edges)
    if extra:
        raise GraphMismatch(f"expression creates edge {extra[0]} absent from the graph", extra[0])
    missing = sorted(graph.edges - got.edges)
    if missing:
        raise GraphMismatch(f"graph edge {missing[0]} is not created by the expression", missing[0])


def compute_meta(expr: CwExpression, graph: Graph) -> list[NodeMeta]:
    """Per-node label classes and outer neighborhoods, in node order.

    The outer set of class ``i`` at a node is every vertex that some
    edge-introduction node further up joins to that class.  Members of a
    class share their label from here to the root, so the set is common to
    all of them.  For a nice expression it equals ``N_G(x)`` minus the
    neighbors ``x`` already has, for any member ``x``; for other expressions
    that difference may depend on ``x`` while this set does not.
    """
    numbering = instance_numbering(expr, graph.n)
    check_graph_match(expr, graph, numbering)
    w = expr.width
    nodes = expr.nodes
    empty = frozenset()
    classes: list[tuple] = []

    def visit(k, cls, edges):
        classes.append(tuple(frozenset(cls.get(lab, ())) for lab in range(1, w + 1)))

    _Sweep(expr, numbering).run(visit)

    outer: list = [None] * len(nodes)
    outer[-1] = (empty,) * w
    for k in range(len(nodes) - 1, -1, -1):
        node, out = nodes[k], outer[k]
        if isinstance(node, Introduce):
            continue
        if isinstance(node, Union):
            for c in (node.left, node.right):
                outer[c] = tuple(o if classes[c][i] else empty for i, o in enumerate(out))
            continue
        below = list(out)
        if isinstance(node, Rename):
            below[node.src - 1] = out[node.dst - 1]
        else:
            i, j = node.i - 1, node.j - 1
            below[i] = out[i] | classes[node.child][j]
            below[j] = out[j] | classes[node.child][i]
        outer[node.child] = tuple(o if classes[node.child][i] else empty for i, o in enumerate(below))

    metas: list[NodeMeta] = []
    for k in range(len(nodes)):
        cls, out = classes[k], outer[k]
        contains = tuple(
            tuple(i != j and bool(cls[j]) and cls[j] <= out[i] for j in range(w)) for i in range(w)
        )
        overlaps = tuple(tuple(not out[i].isdisjoint(out[j]) for j in range(w)) for i in range(w))
        metas.append(NodeMeta(cls, out, sum(map(len, cls)), contains, overlaps))
    return metas
