"""SAT to MHE on threshold graphs, and the threshold-graph helpers around it.

Colors stand for literals: ``x_j`` is color ``2j - 1`` and its negation is
color ``2j``.  The clique holds one vertex per clause followed by ``m*m``
copies per variable; each clique vertex then receives precolored private
neighbors in the independent set until, for every literal it may take, it
sees exactly ``i * |K|`` of them, where ``i`` is its position in the clique
order.  Later clique vertices also see every earlier padding vertex, which is
what makes the graph threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, product
from math import comb
from typing import Mapping

from .cwexpr import CwExpression, ExprBuilder
from .errors import ColoringMismatch, FormatError, NotThreshold
from .graph import Graph, Instance, PartialColoring, happy_edges

# --- CNF -------------------------------------------------------------------


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple  # tuple of tuples of nonzero ints

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("variable count must be nonnegative")
        norm = []
        for k, clause in enumerate(self.clauses, 1):
            clause = tuple(int(x) for x in clause)
            if not clause:
                raise ValueError(f"clause {k} is empty")
            if len(set(clause)) != len(clause):
                raise ValueError(f"clause {k} repeats a literal")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} in clause {k} outside 1..{self.num_vars}")
            norm.append(clause)
        object.__setattr__(self, "clauses", tuple(norm))

    @property
    def m(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, assignment: Mapping[int, bool]) -> bool:
        return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in self.clauses)


def parse_dimacs(text: str) -> CnfFormula:
    header = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise FormatError("duplicate problem line", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormatError("problem line must be 'p cnf <vars> <clauses>'", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise FormatError("problem line counts must be integers", lineno) from None
            continue
        if header is None:
            raise FormatError("clause before the 'p cnf' line", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise FormatError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise FormatError("empty clause", lineno)
                if len(set(current)) != len(current):
                    raise FormatError("clause repeats a literal", lineno)
                clauses.append(current)
                current = []
            elif abs(lit) > header[0]:
                raise FormatError(f"literal {lit} outside 1..{header[0]}", lineno)
            else:
                current.append(lit)
    if header is None:
        raise FormatError("missing 'p cnf' line")
    if current:
        raise FormatError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise FormatError(f"header announces {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(header[0], tuple(tuple(c) for c in clauses))


def write_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.num_vars} {f.m}"]
    lines += [" ".join(map(str, c)) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


def literal_color(lit: int) -> int:
    return 2 * lit - 1 if lit > 0 else -2 * lit


def color_literal(color: int) -> int:
    j = (color + 1) // 2
    return j if color % 2 else -j


# --- threshold graphs ------------------------------------------------------


@dataclass(frozen=True)
class ThresholdReport:
    """Peeling outcome.

    ``creation`` lists ``(vertex, kind)`` in creation order, ``kind`` being
    ``"isolated"`` or ``"universal"``; the first vertex is always isolated.
    ``clique_order`` is the clique with nested closed neighborhoods.
    ``remainder`` is the vertex set where peeling got stuck.
    """

    threshold: bool
    creation: tuple = ()
    clique_order: tuple = ()
    remainder: frozenset = frozenset()

    def __bool__(self) -> bool:
        return self.threshold


def is_threshold(graph: Graph) -> ThresholdReport:
    """Peel isolated or universal vertices (largest id first) until none is left."""
    alive = set(graph.vertices)
    deg = {v: graph.degree(v) for v in alive}
    by_deg: dict[int, set[int]] = {}
    for v, d in deg.items():
        by_deg.setdefault(d, set()).add(v)
    peeled = []
    while alive:
        rem = len(alive)
        cands = by_deg.get(0, set()) | by_deg.get(rem - 1, set())
        if not cands:
            return ThresholdReport(False, remainder=frozenset(alive))
        v = max(cands)
        kind = "isolated" if deg[v] == 0 else "universal"
        peeled.append((v, kind))
        alive.remove(v)
        by_deg[deg[v]].discard(v)
        for u in graph.neighbors(v):
            if u in alive:
                by_deg[deg[u]].discard(u)
                deg[u] -= 1
                by_deg.setdefault(deg[u], set()).add(u)
    creation = peeled[::-1]
    if creation:
        creation[0] = (creation[0][0], "isolated")
    clique = [v for v, kind in creation if kind == "universal"]
    if creation and graph.degree(creation[0][0]) > 0:
        clique.insert(0, creation[0][0])
    return ThresholdReport(True, tuple(creation), tuple(clique))


def threshold_to_expr(graph: Graph) -> CwExpression:
    """A nice 2-expression for a threshold graph, built along its creation sequence."""
    report = is_threshold(graph)
    if not report:
        raise NotThreshold(f"graph is not threshold; peeling stuck on {sorted(report.remainder)[:8]}")
    if graph.n == 0:
        raise NotThreshold("the empty graph has no expression")
    b = ExprBuilder()
    (first, _), *rest = report.creation
    node = b.vertex(first, 1)
    for v, kind in rest:
        if kind == "isolated":
            node = b.union(node, b.vertex(v, 1))
        else:
            node = b.rename(2, 1, b.join(1, 2, b.union(node, b.vertex(v, 2))))
    return b.build()


# --- the reduction ---------------------------------------------------------


@dataclass(frozen=True)
class ClauseVertex:
    clause: int


@dataclass(frozen=True)
class VarVertex:
    var: int
    copy: int


@dataclass(frozen=True)
class IndepVertex:
    step: int  # position in the clique order of the vertex it was created for


@dataclass(frozen=True)
class ReductionOutput:
    formula: CnfFormula
    instance: Instance
    k: int
    roles: Mapping[int, object]
    literal_color: Mapping[int, int]
    clique_order: tuple
    required: tuple = field(default=())  # allowed literal colors per clique position

    @property
    def clause_vertices(self) -> list[int]:
        return list(self.clique_order[: self.formula.m])

    def var_vertex(self, j: int, t: int) -> int:
        m = self.formula.m
        return self.clique_order[m + (j - 1) * m * m + t - 1]


def target_value(n: int, m: int) -> int:
    size = m + n * m * m
    return size * comb(size + 1, 2) + n * comb(m * m, 2) + m**3


def reduce_sat_to_mhe(f: CnfFormula) -> ReductionOutput:
    n, m = f.num_vars, f.m
    if n < 1:
        raise ValueError("the reduction needs at least one variable")
    size = m + n * m * m
    roles: dict[int, object] = {}
    required: list[tuple[int, ...]] = []
    for i, clause in enumerate(f.clauses, 1):
        roles[i] = ClauseVertex(i)
        required.append(tuple(literal_color(l) for l in clause))
    for j in range(1, n + 1):
        for t in range(1, m * m + 1):
            roles[len(roles) + 1] = VarVertex(j, t)
            required.append((literal_color(j), literal_color(-j)))
    clique = list(range(1, size + 1))
    edges = [(u, v) for u in clique for v in clique if u < v]
    colors: dict[int, int] = {}
    seen = [0] * (2 * n + 1)  # padding vertices per color so far
    nxt = size + 1
    for i, u in enumerate(clique, 1):
        for a in required[i - 1]:
            for _ in range(i * size - seen[a]):
                roles[nxt] = IndepVertex(i)
                colors[nxt] = a
                edges += [(w, nxt) for w in clique[i - 1:]]
                nxt += 1
            seen[a] = i * size
    k = target_value(n, m)
    graph = Graph.from_edges(nxt - 1, edges)
    instance = Instance(graph, PartialColoring(2 * n, colors), k)
    lit_colors = {l: literal_color(l) for j in range(1, n + 1) for l in (j, -j)}
    out = ReductionOutput(f, instance, k, roles, lit_colors, tuple(clique), tuple(required))
    check_reduction(out)
    return out


def check_reduction(out: ReductionOutput) -> None:
    """Assert the structural invariants of a reduction output."""
    f, inst = out.formula, out.instance
    n, m = f.num_vars, f.m
    size = m + n * m * m
    graph, pre = inst.graph, inst.precoloring
    report = is_threshold(graph)
    assert report, "reduction graph is not threshold"
    assert inst.ell == 2 * n
    assert len(out.clique_order) == size
    assert set(inst.uncolored()) == set(out.clique_order)
    for i, u in enumerate(out.clique_order, 1):
        counts = [0] * (2 * n + 1)
        for x in graph.neighbors(u):
            if x in pre:
                counts[pre.get(x)] += 1
        for a in range(1, 2 * n + 1):
            if a in out.required[i - 1]:
                assert counts[a] == i * size, f"position {i}, color {a}: {counts[a]} != {i * size}"
            else:
                assert counts[a] <= (i - 1) * size, f"position {i}, color {a}: {counts[a]} too many"
        if i < size:
            nxt = out.clique_order[i]
            assert set(graph.neighbors(u)) | {u} <= set(graph.neighbors(nxt)) | {nxt}
    assert out.k == sum(i * size for i in range(1, size + 1)) + n * comb(m * m, 2) + m**3


# --- assignment extraction -------------------------------------------------


@dataclass(frozen=True)
class Extraction:
    happy: int  # happy edges of the normalized coloring
    k: int
    assignment: Mapping[int, bool] | None  # set when happy >= k
    coloring: Mapping[int, int] = field(default_factory=dict)

    @property
    def deficit(self) -> int:
        return max(0, self.k - self.happy)


def _gain(graph: Graph, coloring: dict, v: int, a: int) -> int:
    return sum(coloring[u] == a for u in graph.neighbors(v))


def normalize_coloring(out: ReductionOutput, coloring: Mapping[int, int]) -> dict[int, int]:
    """Apply the improving recolorings until every clique vertex takes one of its
    literal colors and all copies of a variable agree.  Never loses a happy edge."""
    graph = out.instance.graph
    c = dict(coloring)
    changed = True
    while changed:
        changed = False
        for i, u in enumerate(out.clique_order):
            allowed = out.required[i]
            if c[u] not in allowed:
                c[u] = max(allowed, key=lambda a: (_gain(graph, c, u, a), -a))
                changed = True
    m = out.formula.m
    for j in range(1, out.formula.num_vars + 1):
        copies = [out.var_vertex(j, t) for t in range(1, m * m + 1)]
        while len({c[v] for v in copies}) > 1:
            in_clique = [c[u] for u in out.clique_order]
            pos, neg = literal_color(j), literal_color(-j)
            keep = pos if in_clique.count(pos) >= in_clique.count(neg) else neg
            v = next(v for v in copies if c[v] != keep)
            c[v] = keep
    return c


def extract_assignment(out: ReductionOutput, coloring: Mapping[int, int]) -> Extraction:
    pre = out.instance.precoloring
    if not pre.extended_by(coloring):
        bad = next(v for v, a in pre.assignment.items() if coloring.get(v) != a)
        raise ColoringMismatch(f"vertex {bad} must have color {pre.get(bad)}")
    graph = out.instance.graph
    before = len(happy_edges(graph, coloring))
    c = normalize_coloring(out, coloring)
    happy = len(happy_edges(graph, c))
    assert happy >= before
    if happy < out.k:
        return Extraction(happy, out.k, None, c)
    sigma = {
        j: c[out.var_vertex(j, 1)] == literal_color(j)
        for j in range(1, out.formula.num_vars + 1)
    }
    assert out.formula.satisfied_by(sigma), "extracted assignment does not satisfy the formula"
    return Extraction(happy, out.k, sigma, c)


# --- sidecar ---------------------------------------------------------------


def write_sidecar(out: ReductionOutput) -> str:
    lines = []
    for j in range(1, out.formula.num_vars + 1):
        lines.append(f"literal {j} + {out.literal_color[j]}")
        lines.append(f"literal {j} - {out.literal_color[-j]}")
    for v in sorted(out.roles):
        role = out.roles[v]
        if isinstance(role, ClauseVertex):
            lines.append(f"clausevertex {role.clause} {v}")
        elif isinstance(role, VarVertex):
            lines.append(f"varvertex {role.var} {role.copy} {v}")
    lines.append(f"kvalue {out.k}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Sidecar:
    literal_color: dict
    clause_vertex: dict  # clause index -> vertex
    var_vertex: dict  # (var, copy) -> vertex
    k: int


def parse_sidecar(text: str) -> Sidecar:
    lits, clauses, variables, k = {}, {}, {}, None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, *rest = line.split()
        try:
            if word == "literal" and len(rest) == 3 and rest[1] in "+-":
                j = int(rest[0])
                lits[j if rest[1] == "+" else -j] = int(rest[2])
            elif word == "clausevertex" and len(rest) == 2:
                clauses[int(rest[0])] = int(rest[1])
            elif word == "varvertex" and len(rest) == 3:
                variables[(int(rest[0]), int(rest[1]))] = int(rest[2])
            elif word == "kvalue" and len(rest) == 1:
                k = int(rest[0])
            else:
                raise FormatError(f"malformed sidecar line {line!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"expected integers in {line!r}", lineno) from None
    if k is None:
        raise FormatError("sidecar has no kvalue line")
    return Sidecar(lits, clauses, variables, k)


def all_small_formulas(max_vars: int = 2, max_clauses: int = 2) -> list[CnfFormula]:
    """Every formula over 1..max_vars variables with 1..max_clauses clauses.

    Clauses are nonempty literal sets without a complementary pair; a
    formula is a multiset of clauses.
    """
    result = []
    for n in range(1, max_vars + 1):
        lits = [l for j in range(1, n + 1) for l in (j, -j)]
        clauses = [
            c for size in range(1, n + 1) for c in combinations(lits, size)
            if not any(-l in c for l in c)
        ]
        for m in range(1, max_clauses + 1):
            for pick in combinations_with_replacement(clauses, m):
                result.append(CnfFormula(n, tuple(pick)))
    return result


def brute_satisfiable(f: CnfFormula) -> bool:
    return any(
        f.satisfied_by(dict(zip(range(1, f.num_vars + 1), bits)))
        for bits in product((False, True), repeat=f.num_vars)
    )

