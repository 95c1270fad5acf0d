"""Exhaustive reference solvers and seeded instance generators.

The brute-force solvers share no code with the dynamic programs: they walk
every extension of the precoloring in lexicographic order (first uncolored
vertex most significant) and keep the first maximum.  Enumeration is done in
numpy chunks, which only changes speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cwexpr import CwExpression, ExprBuilder, evaluate
from .errors import BudgetExceeded
from .graph import Graph, Instance, PartialColoring, Solution
from .interval import IntervalInstance
from .rng import XorShift64Star

DEFAULT_BRUTE_BUDGET = 2 * 10**6
_CHUNK = 1 << 15


def _colorings(instance: Instance, budget: int):
    """Yield ``(offset, block)``; ``block[r, v]`` is the color of vertex v in extension offset + r."""
    free = instance.uncolored()
    ell = instance.ell
    total = ell ** len(free)
    if total > budget:
        raise BudgetExceeded(f"{ell}^{len(free)} = {total} colorings exceed the budget {budget}")
    base = np.zeros(instance.n + 1, dtype=np.int16)
    for v, a in instance.precoloring.assignment.items():
        base[v] = a
    powers = [ell ** (len(free) - 1 - k) for k in range(len(free))]
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        block = np.tile(base, (len(idx), 1))
        for k, v in enumerate(free):
            block[:, v] = (idx // powers[k]) % ell + 1
        yield start, block


def _best(instance: Instance, score, budget: int) -> Solution:
    best_value, best_row, count = -1, None, 0
    for _, block in _colorings(instance, budget):
        values = score(block)
        r = int(np.argmax(values))
        count += len(block)
        if values[r] > best_value:
            best_value, best_row = int(values[r]), block[r]
    coloring = {v: int(best_row[v]) for v in instance.graph.vertices}
    return Solution(best_value, coloring, count)


def brute_mhv(instance: Instance, budget: int = DEFAULT_BRUTE_BUDGET) -> Solution:
    graph = instance.graph

    def score(block):
        happy = np.ones((len(block), graph.n + 1), dtype=bool)
        happy[:, 0] = False
        for u, v in graph.edges:
            eq = block[:, u] == block[:, v]
            happy[:, u] &= eq
            happy[:, v] &= eq
        return happy.sum(axis=1)

    return _best(instance, score, budget)


def brute_mhe(instance: Instance, budget: int = DEFAULT_BRUTE_BUDGET) -> Solution:
    graph = instance.graph
    pre = instance.precoloring.assignment
    # edges with a precolored endpoint only depend on the other endpoint's color
    fixed = 0
    weight = np.zeros((graph.n + 1, instance.ell + 1), dtype=np.int64)
    free_edges = []
    for u, v in graph.edges:
        if u in pre and v in pre:
            fixed += pre[u] == pre[v]
        elif u in pre:
            weight[v, pre[u]] += 1
        elif v in pre:
            weight[u, pre[v]] += 1
        else:
            free_edges.append((u, v))
    weighted = [v for v in graph.vertices if v not in pre and weight[v].any()]

    def score(block):
        total = np.full(len(block), fixed, dtype=np.int64)
        for v in weighted:
            total += weight[v][block[:, v]]
        for u, v in free_edges:
            total += block[:, u] == block[:, v]
        return total

    return _best(instance, score, budget)


# --- generators ------------------------------------------------------------

@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    n: int = 6
    ell: int = 2
    w: int = 2
    nodes: int | None = None  # expression node budget; default 4n
    density: float = 0.3  # precoloring density
    edge_density: float = 0.4
    span_range: int = 20
    nice: bool = True  # False lets joins repeat existing edges

    def __post_init__(self):
        for name in ("n", "ell", "w"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.nodes is not None and self.nodes < 1:
            raise ValueError("node budget must be at least 1")
        for name in ("density", "edge_density"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.span_range < 0:
            raise ValueError("span_range must be nonnegative")


def random_precoloring(rng: XorShift64Star, n: int, ell: int, density: float) -> PartialColoring:
    colors = {}
    for v in range(1, n + 1):
        if rng.chance(density):
            colors[v] = rng.between(1, ell)
    return PartialColoring(ell, colors)


def gen_graph(cfg: GenConfig) -> Instance:
    rng = XorShift64Star(cfg.seed)
    edges = [
        (u, v)
        for u in range(1, cfg.n + 1)
        for v in range(u + 1, cfg.n + 1)
        if rng.chance(cfg.edge_density)
    ]
    graph = Graph.from_edges(cfg.n, edges)
    return Instance(graph, random_precoloring(rng, cfg.n, cfg.ell, cfg.density))


def gen_interval(cfg: GenConfig) -> IntervalInstance:
    rng = XorShift64Star(cfg.seed)
    spans = []
    for _ in range(cfg.n):
        a, b = rng.between(0, cfg.span_range), rng.between(0, cfg.span_range)
        spans.append((min(a, b), max(a, b)))
    pre = random_precoloring(rng, cfg.n, cfg.ell, cfg.density)
    return IntervalInstance(cfg.n, cfg.ell, tuple(spans), pre)


class _Part:
    """A finished subexpression in the generator's pool."""

    def __init__(self, node: int, labels: dict[int, int], edges: set):
        self.node = node
        self.labels = labels  # vertex -> label
        self.edges = edges

    def cls(self, lab: int) -> list[int]:
        return [v for v, l in self.labels.items() if l == lab]


def _joinable(part: _Part, nice: bool = True) -> list[tuple[int, int]]:
    """Label pairs of ``part`` with no edge between their classes yet."""
    present = sorted(set(part.labels.values()))
    return [
        (i, j) for i in present for j in present if i < j
        and (not nice or not any(
            (min(x, y), max(x, y)) in part.edges for x in part.cls(i) for y in part.cls(j)
        ))
    ]


def gen_expression(cfg: GenConfig) -> tuple[CwExpression, Instance]:
    """A random expression over vertices ``1..n`` and its instance skeleton.

    Leaves get random labels, then random unions, renames and joins are
    applied until one part remains.  A join is only placed over two labels
    with no edge between them yet, which keeps the expression nice, unless
    ``cfg.nice`` is off.
    """
    rng = XorShift64Star(cfg.seed)
    budget = cfg.nodes if cfg.nodes is not None else 4 * cfg.n
    n = max(1, min(cfg.n, (budget + 1) // 2))
    extra = max(0, budget - (2 * n - 1))
    b = ExprBuilder()
    pool = []
    for v in range(1, n + 1):
        lab = rng.between(1, cfg.w)
        pool.append(_Part(b.vertex(v, lab), {v: lab}, set()))
    while len(pool) > 1 or extra > 0:
        # spread unary ops over the merges instead of piling them on the root
        if extra > 0 and rng.below(extra + len(pool) - 1) < extra:
            extra -= 1
            options = [(part, _joinable(part, cfg.nice)) for part in pool]
            with_pairs = [(part, pairs) for part, pairs in options if pairs]
            if with_pairs and (cfg.w < 2 or rng.chance(0.75)):
                part, pairs = rng.choice(with_pairs)
                i, j = rng.choice(pairs)
                for x in part.cls(i):
                    for y in part.cls(j):
                        part.edges.add((min(x, y), max(x, y)))
                part.node = b.join(i, j, part.node)
            elif cfg.w >= 2:
                part = rng.choice(pool)
                src = rng.choice(sorted(set(part.labels.values())))
                dst = rng.between(1, cfg.w - 1)
                if dst >= src:
                    dst += 1
                for v, l in part.labels.items():
                    if l == src:
                        part.labels[v] = dst
                part.node = b.rename(src, dst, part.node)
            continue
        x = pool.pop(rng.below(len(pool)))
        y = pool.pop(rng.below(len(pool)))
        merged = _Part(b.union(x.node, y.node), {**x.labels, **y.labels}, x.edges | y.edges)
        pool.append(merged)
    expr = b.build()
    graph = evaluate(expr).graph
    return expr, Instance(graph, random_precoloring(rng, n, cfg.ell, cfg.density))


def gen_threshold(cfg: GenConfig) -> Instance:
    """Threshold graph from a random creation sequence, with shuffled vertex ids.

    Each new vertex is universal with probability ``cfg.edge_density``.
    """
    rng = XorShift64Star(cfg.seed)
    ids = list(range(1, cfg.n + 1))
    for k in range(cfg.n - 1, 0, -1):
        j = rng.below(k + 1)
        ids[k], ids[j] = ids[j], ids[k]
    edges = []
    for k in range(1, cfg.n):
        if rng.chance(cfg.edge_density):
            edges += [(ids[p], ids[k]) for p in range(k)]
    graph = Graph.from_edges(cfg.n, edges)
    return Instance(graph, random_precoloring(rng, cfg.n, cfg.ell, cfg.density))
