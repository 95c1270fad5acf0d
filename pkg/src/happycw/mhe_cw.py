"""Maximum Happy Edges by dynamic programming over a nice w-expression.

A state at a node is the matrix ``n[i][a]`` of how many vertices of label
``i`` carry color ``a``, flattened label-major.  The value is the largest
number of happy edges of the node's graph over colorings with those counts.
Because the expression is nice, an edge-introduction node over labels i and
j adds exactly ``sum_a n[i][a] * n[j][a]`` happy edges.  The state count is
polynomial in n only for fixed ``w * ell``, so tables are capped.
"""

from __future__ import annotations

from .cwexpr import (
    AddEdges, CwExpression, Introduce, Rename, Union, check_graph_match, check_nice,
)
from .errors import NotNice, StateBudgetExceeded
from .graph import Instance, Solution, happy_edges
from .mhv_cw import state_budget


def _store(table: dict, key, value: int, back, budget: int) -> None:
    old = table.get(key)
    if old is None:
        if len(table) >= budget:
            raise StateBudgetExceeded(f"a table grew past the state budget {budget}")
        table[key] = (value, back)
    elif value > old[0]:
        table[key] = (value, back)


def build_tables(instance: Instance, expr: CwExpression, budget: int | None = None) -> list[dict]:
    report = check_nice(expr)
    if not report:
        raise NotNice(report.offenders)
    check_graph_match(expr, instance.graph)
    budget = state_budget(budget)
    w, ell = expr.width, instance.ell
    tables: list[dict] = []
    for node in expr.nodes:
        table: dict = {}
        if isinstance(node, Introduce):
            for a in instance.precoloring.allowed(int(node.vertex)):
                key = [0] * (w * ell)
                key[(node.label - 1) * ell + a - 1] = 1
                _store(table, tuple(key), 0, None, budget)
        elif isinstance(node, Union):
            left, right = tables[node.left], tables[node.right]
            rkeys = sorted(right)
            for kl in sorted(left):
                vl = left[kl][0]
                for kr in rkeys:
                    key = tuple(x + y for x, y in zip(kl, kr))
                    _store(table, key, vl + right[kr][0], (kl, kr), budget)
        elif isinstance(node, Rename):
            src, dst = (node.src - 1) * ell, (node.dst - 1) * ell
            child = tables[node.child]
            for kc in sorted(child):
                key = list(kc)
                for a in range(ell):
                    key[dst + a] += key[src + a]
                    key[src + a] = 0
                _store(table, tuple(key), child[kc][0], kc, budget)
        else:
            assert isinstance(node, AddEdges)
            i, j = (node.i - 1) * ell, (node.j - 1) * ell
            child = tables[node.child]
            for kc in sorted(child):
                gain = sum(kc[i + a] * kc[j + a] for a in range(ell))
                _store(table, kc, child[kc][0] + gain, kc, budget)
        tables.append(table)
    return tables


def _replay(expr: CwExpression, tables: list[dict], root_key, ell: int) -> dict[int, int]:
    coloring: dict[int, int] = {}
    stack = [(expr.root, root_key)]
    while stack:
        k, key = stack.pop()
        node = expr.nodes[k]
        back = tables[k][key][1]
        if isinstance(node, Introduce):
            row = (node.label - 1) * ell
            coloring[int(node.vertex)] = key.index(1, row, row + ell) - row + 1
        elif isinstance(node, Union):
            stack.append((node.left, back[0]))
            stack.append((node.right, back[1]))
        else:
            stack.append((node.child, back))
    return coloring


def solve_mhe_cw(instance: Instance, expr: CwExpression, budget: int | None = None) -> Solution:
    """Maximum number of happy edges over extensions of the precoloring.

    ``expr`` must be nice (see :func:`happycw.cwexpr.normalize_nice`) and
    describe ``instance.graph`` with vertex ids ``1..n``.
    """
    tables = build_tables(instance, expr, budget)
    root = tables[expr.root]
    best_key = min(root, key=lambda k: (-root[k][0], k))
    optimum = root[best_key][0]
    coloring = _replay(expr, tables, best_key, instance.ell)
    got = len(happy_edges(instance.graph, coloring))
    if got != optimum or not instance.precoloring.extended_by(coloring):
        raise AssertionError(f"certificate check failed: {got} happy edges, DP optimum {optimum}")
    return Solution(optimum, coloring, sum(len(t) for t in tables))
