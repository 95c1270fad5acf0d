import itertools

import pytest
from hypothesis import given, settings, strategies as st

from happycw.cwexpr import AddEdges, check_nice, evaluate, print_expr
from happycw.errors import ColoringMismatch, FormatError, NotThreshold
from happycw.graph import Graph, happy_edges
from happycw.oracle import GenConfig, brute_mhe, gen_graph, gen_threshold
from happycw.reductions import (
    ClauseVertex, CnfFormula, IndepVertex, VarVertex, color_literal, extract_assignment,
    is_threshold, literal_color, normalize_coloring, parse_dimacs, parse_sidecar,
    reduce_sat_to_mhe, target_value, threshold_to_expr, write_dimacs, write_sidecar,
)
from happycw.rng import XorShift64Star

from conftest import fixture_text

X1 = CnfFormula(1, ((1,),))
X1_NOT_X1 = CnfFormula(1, ((1,), (-1,)))
X1X2_NOT_X1 = CnfFormula(2, ((1, 2), (-1,)))


def threshold_by_search(g: Graph) -> bool:
    """Split into a clique and an independent set with nested clique neighborhoods."""
    vs = list(g.vertices)
    closed = {v: {v} | set(g.neighbors(v)) for v in vs}
    for r in range(len(vs) + 1):
        for clique in itertools.combinations(vs, r):
            rest = [v for v in vs if v not in clique]
            if any(not g.adjacent(a, b) for a, b in itertools.combinations(clique, 2)):
                continue
            if any(g.adjacent(a, b) for a, b in itertools.combinations(rest, 2)):
                continue
            chain = sorted((closed[v] for v in clique), key=len)
            if all(a <= b for a, b in zip(chain, chain[1:])):
                return True
    return False


# --- CNF -------------------------------------------------------------------

def test_dimacs_fixtures():
    assert parse_dimacs(fixture_text("x1.cnf")) == X1
    assert parse_dimacs(fixture_text("x1_notx1.cnf")) == X1_NOT_X1
    assert parse_dimacs(fixture_text("x1x2_notx1.cnf")) == X1X2_NOT_X1
    assert parse_dimacs(write_dimacs(X1X2_NOT_X1)) == X1X2_NOT_X1


def test_dimacs_multiline_clause():
    f = parse_dimacs("p cnf 3 2\n1 -2\n3 0 -1\n0\n")
    assert f.clauses == ((1, -2, 3), (-1,))


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("1 0\n", "before the 'p cnf'"),
        ("p cnf 1 1\n2 0\n", "outside 1..1"),
        ("p cnf 1 1\n1 1 0\n", "repeats a literal"),
        ("p cnf 1 1\n0\n", "empty clause"),
        ("p cnf 1 2\n1 0\n", "announces 2 clauses"),
        ("p cnf 1 1\n1\n", "not terminated"),
        ("p cnf 1 1\nx 0\n", "bad literal"),
        ("p dnf 1 1\n", "problem line"),
    ],
)
def test_dimacs_errors(text, fragment):
    with pytest.raises(FormatError, match=fragment):
        parse_dimacs(text)


def test_literal_colors():
    assert [literal_color(l) for l in (1, -1, 2, -2)] == [1, 2, 3, 4]
    for c in range(1, 9):
        assert literal_color(color_literal(c)) == c


# --- threshold graphs -------------------------------------------------------

def test_is_threshold_examples():
    p3 = Graph.from_edges(3, [(1, 2), (2, 3)])
    report = is_threshold(p3)
    assert report and 2 in report.clique_order and len(report.clique_order) == 2
    c4 = Graph.from_edges(4, [(1, 2), (2, 3), (3, 4), (1, 4)])
    report = is_threshold(c4)
    assert not report and report.remainder == {1, 2, 3, 4}
    assert is_threshold(Graph(1))
    assert threshold_by_search(p3) and not threshold_by_search(c4)


def test_threshold_to_expr_examples():
    k2 = Graph.from_edges(2, [(1, 2)])
    assert print_expr(threshold_to_expr(k2)) == "(r 2 1 (e 1 2 (u (v 1 1) (v 2 2))))"
    empty3 = threshold_to_expr(Graph(3))
    assert not any(isinstance(n, AddEdges) for n in empty3.nodes)
    assert evaluate(empty3).graph == Graph(3)
    p3 = Graph.from_edges(3, [(1, 2), (2, 3)])
    report = is_threshold(p3)
    assert [kind for _, kind in report.creation] == ["isolated", "isolated", "universal"]
    assert report.creation[-1][0] == 2
    assert evaluate(threshold_to_expr(p3)).graph == p3
    with pytest.raises(NotThreshold):
        threshold_to_expr(Graph.from_edges(4, [(1, 2), (2, 3), (3, 4), (1, 4)]))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(1, 6), st.floats(0, 1))
def test_peeling_agrees_with_search(seed, n, density):
    g = gen_graph(GenConfig(seed=seed, n=n, edge_density=density)).graph
    report = is_threshold(g)
    assert bool(report) == threshold_by_search(g)
    if report:
        closed = [{v} | set(g.neighbors(v)) for v in report.clique_order]
        assert all(a <= b for a, b in zip(closed, closed[1:]))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(1, 12), st.floats(0, 1))
def test_threshold_expr_roundtrip(seed, n, density):
    g = gen_threshold(GenConfig(seed=seed, n=n, edge_density=density)).graph
    assert is_threshold(g)
    expr = threshold_to_expr(g)
    assert expr.width <= 2
    assert check_nice(expr)
    assert evaluate(expr).graph == g


# --- the reduction ------------------------------------------------------------

def test_reduction_x1():
    out = reduce_sat_to_mhe(X1)
    clique = [v for v, r in out.roles.items() if not isinstance(r, IndepVertex)]
    indep = [v for v, r in out.roles.items() if isinstance(r, IndepVertex)]
    assert len(clique) == 2 and len(indep) == 8 and out.k == 7
    assert out.instance.ell == 2 and out.instance.target == 7
    assert out.roles[1] == ClauseVertex(1) and out.roles[2] == VarVertex(1, 1)


def test_reduction_sizes():
    out = reduce_sat_to_mhe(X1_NOT_X1)
    assert len(out.clique_order) == 6 and out.k == 140 == 6 * 21 + 6 + 8
    out = reduce_sat_to_mhe(X1X2_NOT_X1)
    assert len(out.clique_order) == 10 and out.instance.ell == 4 and out.k == 570 == 10 * 55 + 12 + 8


@pytest.mark.parametrize("n, m", [(1, 1), (2, 3), (3, 2), (4, 4)])
def test_target_formula(n, m):
    size = m + n * m * m
    by_parts = sum(i * size for i in range(1, size + 1)) + n * (m * m) * (m * m - 1) // 2 + m**3
    assert target_value(n, m) == by_parts


def test_extract_examples():
    out = reduce_sat_to_mhe(X1)
    best = brute_mhe(out.instance)
    assert best.optimum == 7
    ex = extract_assignment(out, best.coloring)
    assert ex.assignment == {1: True} and ex.deficit == 0

    out = reduce_sat_to_mhe(X1_NOT_X1)
    best = brute_mhe(out.instance)
    ex = extract_assignment(out, best.coloring)
    assert best.optimum < 140 and ex.assignment is None and ex.deficit > 0


def test_extract_examples_two_vars():
    out = reduce_sat_to_mhe(X1X2_NOT_X1)
    best = brute_mhe(out.instance)
    assert best.optimum == 570
    ex = extract_assignment(out, best.coloring)
    assert ex.assignment[1] is False and X1X2_NOT_X1.satisfied_by(ex.assignment)


def test_extract_rejects_wrong_precoloring():
    out = reduce_sat_to_mhe(X1)
    coloring = {v: 1 for v in out.instance.graph.vertices}
    with pytest.raises(ColoringMismatch):
        extract_assignment(out, coloring)


formulas = st.integers(1, 3).flatmap(
    lambda n: st.lists(
        st.sets(st.sampled_from([l for j in range(1, n + 1) for l in (j, -j)]), min_size=1, max_size=3),
        min_size=1, max_size=3,
    ).map(lambda cs: CnfFormula(n, tuple(tuple(sorted(c, key=abs)) for c in cs)))
)


@settings(max_examples=40, deadline=None)
@given(formulas, st.integers(0, 2**32))
def test_normalization_never_loses_edges(f, seed):
    out = reduce_sat_to_mhe(f)
    rng = XorShift64Star(seed)
    coloring = dict(out.instance.precoloring.assignment)
    for u in out.clique_order:
        coloring[u] = rng.between(1, out.instance.ell)
    fixed = normalize_coloring(out, coloring)
    g = out.instance.graph
    assert len(happy_edges(g, fixed)) >= len(happy_edges(g, coloring))
    for i, u in enumerate(out.clique_order):
        assert fixed[u] in out.required[i]


@settings(max_examples=30, deadline=None)
@given(formulas)
def test_sidecar_roundtrip(f):
    out = reduce_sat_to_mhe(f)
    side = parse_sidecar(write_sidecar(out))
    assert side.k == out.k
    assert side.literal_color == dict(out.literal_color)
    assert [side.clause_vertex[i] for i in range(1, f.m + 1)] == out.clause_vertices
    for (j, t), v in side.var_vertex.items():
        assert out.var_vertex(j, t) == v


def test_sidecar_errors():
    with pytest.raises(FormatError, match="no kvalue"):
        parse_sidecar("literal 1 + 1\n")
    with pytest.raises(FormatError, match="line 1"):
        parse_sidecar("literal 1 * 1\n")
