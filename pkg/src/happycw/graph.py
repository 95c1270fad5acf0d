"""Graphs, colorings, happiness and the ``happy`` instance text format.

Vertices are the integers ``1..n`` and colors the integers ``1..ell``.  A
coloring is any mapping from vertices to colors; a *full* coloring covers every
vertex.  Color ``0`` never appears in a coloring, the DP modules use it as the
"unconstrained" sentinel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import FormatError

Edge = tuple[int, int]


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset = frozenset()
    _adj: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside 1..{self.n}")
            norm.add(_norm(u, v))
        object.__setattr__(self, "edges", frozenset(norm))
        adj = [[] for _ in range(self.n + 1)]
        for u, v in norm:
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> "Graph":
        return cls(n, frozenset(_norm(u, v) for u, v in edges))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def neighbors(self, v: int) -> tuple[int, ...]:
        """Sorted neighbor list of ``v``."""
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def adjacent(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edges

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def induced(self, keep: Iterable[int]) -> "Graph":
        """Subgraph induced by ``keep``, relabelled to ``1..len(keep)`` in sorted order."""
        order = sorted(keep)
        index = {v: k + 1 for k, v in enumerate(order)}
        return Graph.from_edges(
            len(order),
            ((index[u], index[v]) for u, v in self.edges if u in index and v in index),
        )


@dataclass(frozen=True)
class PartialColoring:
    ell: int
    assignment: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.ell < 1:
            raise ValueError("at least one color is required")
        for v, a in self.assignment.items():
            if not 1 <= a <= self.ell:
                raise ValueError(f"color {a} of vertex {v} outside 1..{self.ell}")
        object.__setattr__(self, "assignment", dict(self.assignment))

    def __contains__(self, v: int) -> bool:
        return v in self.assignment

    def get(self, v: int, default=None):
        return self.assignment.get(v, default)

    def allowed(self, v: int) -> tuple[int, ...]:
        """Colors vertex ``v`` may take in an extension."""
        a = self.assignment.get(v)
        return (a,) if a is not None else tuple(range(1, self.ell + 1))

    def extended_by(self, coloring: Mapping[int, int]) -> bool:
        return all(coloring.get(v) == a for v, a in self.assignment.items())


@dataclass(frozen=True)
class Instance:
    graph: Graph
    precoloring: PartialColoring
    target: int | None = None

    def __post_init__(self):
        for v in self.precoloring.assignment:
            if not 1 <= v <= self.graph.n:
                raise ValueError(f"precolored vertex {v} outside 1..{self.graph.n}")
        if self.target is not None and self.target < 0:
            raise ValueError("target must be nonnegative")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def ell(self) -> int:
        return self.precoloring.ell

    def uncolored(self) -> list[int]:
        return [v for v in self.graph.vertices if v not in self.precoloring]

    def target_warning(self, problem: str) -> str | None:
        """Describe why the target is unreachable for ``problem`` ('mhv' or 'mhe'), if it is."""
        if self.target is None:
            return None
        bound = self.graph.n if problem == "mhv" else len(self.graph.edges)
        if self.target > bound:
            what = "vertices" if problem == "mhv" else "edges"
            return f"target {self.target} exceeds the number of {what} ({bound})"
        return None


def check_full(graph: Graph, coloring: Mapping[int, int]) -> None:
    missing = [v for v in graph.vertices if v not in coloring]
    if missing:
        raise ValueError(f"coloring is not total; uncolored vertices {missing[:5]}")


def happy_vertices(graph: Graph, coloring: Mapping[int, int]) -> set[int]:
    check_full(graph, coloring)
    return {
        v for v in graph.vertices
        if all(coloring[u] == coloring[v] for u in graph.neighbors(v))
    }


def happy_edges(graph: Graph, coloring: Mapping[int, int]) -> set[Edge]:
    check_full(graph, coloring)
    return {(u, v) for u, v in graph.edges if coloring[u] == coloring[v]}


# --- text format -----------------------------------------------------------

def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _ints(parts: list[str], lineno: int) -> list[int]:
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise FormatError(f"expected integers, got {' '.join(parts)!r}", lineno) from None


def parse_instance(text: str) -> Instance:
    """Parse the ``happy`` instance format."""
    header = None
    edges: set[Edge] = set()
    colors: dict[int, int] = {}
    target = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        word, *rest = line.split()
        if header is None:
            if word != "happy":
                raise FormatError("first directive must be 'happy <n> <ell>'", lineno)
            if len(rest) != 2:
                raise FormatError("header takes exactly two integers", lineno)
            n, ell = _ints(rest, lineno)
            if n < 0 or ell < 1:
                raise FormatError("header needs n >= 0 and ell >= 1", lineno)
            header = (n, ell)
            continue
        n, ell = header
        if word == "happy":
            raise FormatError("duplicate header", lineno)
        if word == "edge":
            if len(rest) != 2:
                raise FormatError("'edge' takes two vertices", lineno)
            u, v = _ints(rest, lineno)
            if not (1 <= u <= n and 1 <= v <= n):
                raise FormatError(f"vertex out of range in edge {u} {v}", lineno)
            if u == v:
                raise FormatError(f"self-loop at vertex {u}", lineno)
            e = _norm(u, v)
            if e in edges:
                raise FormatError(f"duplicate edge {e[0]} {e[1]}", lineno)
            edges.add(e)
        elif word == "color":
            if len(rest) != 2:
                raise FormatError("'color' takes a vertex and a color", lineno)
            v, a = _ints(rest, lineno)
            if not 1 <= v <= n:
                raise FormatError(f"vertex out of range: {v}", lineno)
            if not 1 <= a <= ell:
                raise FormatError(f"color out of range: {a} (ell = {ell})", lineno)
            if v in colors:
                raise FormatError(f"duplicate color directive for vertex {v}", lineno)
            colors[v] = a
        elif word == "target":
            if len(rest) != 1:
                raise FormatError("'target' takes one integer", lineno)
            if target is not None:
                raise FormatError("duplicate target", lineno)
            (target,) = _ints(rest, lineno)
            if target < 0:
                raise FormatError("target must be nonnegative", lineno)
        else:
            raise FormatError(f"unknown directive {word!r}", lineno)
    if header is None:
        raise FormatError("missing 'happy <n> <ell>' header")
    n, ell = header
    return Instance(Graph(n, frozenset(edges)), PartialColoring(ell, colors), target)


def write_instance(instance: Instance) -> str:
    lines = [f"happy {instance.n} {instance.ell}"]
    lines += [f"edge {u} {v}" for u, v in instance.graph.sorted_edges()]
    lines += [f"color {v} {a}" for v, a in sorted(instance.precoloring.assignment.items())]
    if instance.target is not None:
        lines.append(f"target {instance.target}")
    return "\n".join(lines) + "\n"


def format_coloring(coloring: Mapping[int, int]) -> str:
    return " ".join(f"{v}:{coloring[v]}" for v in sorted(coloring))


@dataclass(frozen=True)
class Solution:
    """Optimum of one solve together with a coloring that attains it."""

    optimum: int
    coloring: dict
    states: int = 0
