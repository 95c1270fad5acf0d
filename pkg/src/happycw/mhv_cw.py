"""Maximum Happy Vertices by dynamic programming over a w-expression.

A table entry at node ``k`` is keyed by ``col + out`` (two length-``w``
tuples over ``{0} ∪ [ell]``) and holds the largest number of *counted* happy
vertices of the node's graph over colorings matching the key.  ``col[i]`` is
the single color of label class ``i`` or 0 when it is empty or multicolored;
``out[i]``, when nonzero, fixes the color of every outer neighbor of class
``i``.  A class is counted when ``out[i] != 0`` or it has no outer neighbors.
Only keys passing :func:`good_triple` with a finite value are stored.
"""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass

from .cwexpr import AddEdges, CwExpression, Introduce, NodeMeta, Rename, Union, compute_meta
from .errors import StateBudgetExceeded
from .graph import Instance, Solution, happy_vertices

DEFAULT_STATE_BUDGET = 10**7


def state_budget(explicit: int | None = None) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get("HAPPY_STATE_BUDGET")
    return int(env) if env else DEFAULT_STATE_BUDGET


def good_triple(meta: NodeMeta, col, out) -> bool:
    w = meta.width
    for i in range(w):
        if col[i] and not meta.classes[i]:
            return False
        if out[i] and not meta.outer[i]:
            return False
    for i in range(w):
        oi = out[i]
        if not oi:
            continue
        contains = meta.contains[i]
        overlaps = meta.overlaps[i]
        for j in range(w):
            if contains[j] and col[j] != oi:
                return False
            if overlaps[j] and out[j] and out[j] != oi:
                return False
    return True


def _merge_color(a: int, b: int, has_a: bool, has_b: bool) -> int:
    """Color of a class formed from two parts with colors ``a`` and ``b``."""
    if not has_a:
        return b
    if not has_b:
        return a
    return a if a == b else 0


@dataclass
class MhvTables:
    """DP tables in node order; entries map key -> (value, backpointer)."""

    expr: CwExpression
    metas: list
    tables: list

    @property
    def states(self) -> int:
        return sum(len(t) for t in self.tables)


def _store(table: dict, key, value: int, back) -> None:
    old = table.get(key)
    if old is None or value > old[0]:
        table[key] = (value, back)


def _introduce(node: Introduce, meta: NodeMeta, inst: Instance, w: int, ell: int) -> dict:
    v = int(node.vertex)
    i = node.label - 1
    isolated = inst.graph.degree(v) == 0
    outs = [0] + (list(range(1, ell + 1)) if meta.outer[i] else [])
    table: dict = {}
    for a in inst.precoloring.allowed(v):
        for o in outs:
            col = [0] * w
            out = [0] * w
            col[i] = a
            out[i] = o
            if not good_triple(meta, col, out):
                continue
            table[tuple(col) + tuple(out)] = (1 if isolated or a == o else 0, None)
    return table


def _union(meta: NodeMeta, lmeta: NodeMeta, rmeta: NodeMeta, left: dict, right: dict, w: int) -> dict:
    has_l = [bool(c) for c in lmeta.classes]
    has_r = [bool(c) for c in rmeta.classes]
    shared = [i for i in range(w) if has_l[i] and has_r[i]]
    buckets = defaultdict(list)
    for kr in sorted(right):
        buckets[tuple(kr[w + i] for i in shared)].append(kr)
    table: dict = {}
    for kl in sorted(left):
        vl = left[kl][0]
        for kr in buckets.get(tuple(kl[w + i] for i in shared), ()):
            col = tuple(_merge_color(kl[i], kr[i], has_l[i], has_r[i]) for i in range(w))
            out = tuple(kl[w + i] if has_l[i] else kr[w + i] for i in range(w))
            if not good_triple(meta, col, out):
                continue
            _store(table, col + out, vl + right[kr][0], (kl, kr))
    return table


def _rename(node: Rename, meta: NodeMeta, cmeta: NodeMeta, child: dict, w: int) -> dict:
    i, j = node.src - 1, node.dst - 1
    has_i = bool(cmeta.classes[i])
    has_j = bool(cmeta.classes[j])
    table: dict = {}
    for key in sorted(child):
        col = list(key[:w])
        out = list(key[w:])
        if has_i and has_j and out[i] != out[j]:
            # both parts share one outer neighborhood; the mixed state is dominated
            continue
        col[j] = _merge_color(col[i], col[j], has_i, has_j)
        out[j] = out[i] if has_i else out[j]
        col[i] = 0
        out[i] = 0
        if not good_triple(meta, col, out):
            continue
        _store(table, tuple(col) + tuple(out), child[key][0], key)
    return table


def _join_parent_outs(a: int, b: int, child_out: int, col, meta: NodeMeta, cmeta: NodeMeta, ell: int):
    """Parent ``out[a]`` values that map to ``child_out`` across a join of labels a and b.

    Going from the node to its child, the vertices of class ``b`` that become
    adjacent to class ``a`` here move from "inside" to "outer".  A counted
    class keeps being counted below only if its outer color stays uniform.
    """
    fresh = cmeta.outer[a] - meta.outer[a]
    result = []
    for x in range(ell + 1):
        if x and not meta.outer[a]:
            continue
        if not cmeta.outer[a]:
            below = 0
        elif x == 0 and meta.outer[a]:
            below = 0  # not counted at the node, not counted below
        elif x == 0:
            below = col[b]  # every outer neighbor below is a fresh class-b vertex
        elif fresh and col[b] != x:
            below = 0  # class a is unhappy: drop it from the count
        else:
            below = x
        if below == child_out:
            result.append(x)
    return result


def _join(node: AddEdges, meta: NodeMeta, cmeta: NodeMeta, child: dict, w: int, ell: int) -> dict:
    i, j = node.i - 1, node.j - 1
    table: dict = {}
    for key in sorted(child):
        col = key[:w]
        out = list(key[w:])
        xs = _join_parent_outs(i, j, out[i], col, meta, cmeta, ell)
        ys = _join_parent_outs(j, i, out[j], col, meta, cmeta, ell)
        value = child[key][0]
        for x in xs:
            for y in ys:
                out[i], out[j] = x, y
                if not good_triple(meta, col, out):
                    continue
                _store(table, col + tuple(out), value, key)
    return table


def build_tables(instance: Instance, expr: CwExpression, budget: int | None = None) -> MhvTables:
    metas = compute_meta(expr, instance.graph)
    w = expr.width
    ell = instance.ell
    budget = state_budget(budget)
    if (ell + 1) ** (2 * w) > budget:
        raise StateBudgetExceeded(
            f"(ell+1)^(2w) = {(ell + 1) ** (2 * w)} exceeds the state budget {budget}"
        )
    tables: list = []
    for k, node in enumerate(expr.nodes):
        meta = metas[k]
        if isinstance(node, Introduce):
            table = _introduce(node, meta, instance, w, ell)
        elif isinstance(node, Union):
            table = _union(meta, metas[node.left], metas[node.right],
                           tables[node.left], tables[node.right], w)
        elif isinstance(node, Rename):
            table = _rename(node, meta, metas[node.child], tables[node.child], w)
        else:
            table = _join(node, meta, metas[node.child], tables[node.child], w, ell)
        tables.append(table)
    return MhvTables(expr, metas, tables)


def _replay(tables: MhvTables, root_key) -> dict[int, int]:
    expr = tables.expr
    w = expr.width
    coloring: dict[int, int] = {}
    stack = [(expr.root, root_key)]
    while stack:
        k, key = stack.pop()
        node = expr.nodes[k]
        back = tables.tables[k][key][1]
        if isinstance(node, Introduce):
            coloring[int(node.vertex)] = key[node.label - 1]
        elif isinstance(node, Union):
            stack.append((node.left, back[0]))
            stack.append((node.right, back[1]))
        else:
            stack.append((node.child, back))
    assert len(coloring) == len(expr.leaves())
    return coloring


def solve_mhv_cw(instance: Instance, expr: CwExpression, budget: int | None = None) -> Solution:
    """Maximum number of happy vertices over extensions of the precoloring.

    ``expr`` must describe ``instance.graph`` with vertex ids ``1..n``.
    """
    tables = build_tables(instance, expr, budget)
    root = tables.tables[expr.root]
    best_key = min(root, key=lambda k: (-root[k][0], k))
    optimum = root[best_key][0]
    coloring = _replay(tables, best_key)
    got = len(happy_vertices(instance.graph, coloring))
    if got != optimum or not instance.precoloring.extended_by(coloring):
        raise AssertionError(f"certificate check failed: {got} happy vertices, DP optimum {optimum}")
    return Solution(optimum, coloring, tables.states)
