"""Maximum Happy Vertices on interval graphs in O(ell * n^2).

The input is an explicit interval model: every vertex owns a closed integer
span and two vertices are adjacent when their spans meet.  Sweeping the
endpoints gives sets ``S_0 .. S_2n`` that change by one vertex per step;
``first[v] <= i < last[v]`` exactly when ``v`` is in ``S_i``.

The DP state after step ``i`` is ``(h, a, u)``: ``h`` happy vertices inside
``S_i``, ``a`` the color of the longest-living vertex of ``S_i`` and ``u``
the longest-living vertex whose color differs from ``a`` (or none).  Since
``S_i`` is a clique, ``h > 0`` forces ``u`` to be none, so a step holds two
dense arrays::

    A[h, a]  u = none,  h = 0..|S_i|
    B[a, k]  h = 0,     u = k-th vertex of S_i in sweep order

flattened into one vector ``A.ravel() ++ B.ravel()`` (or a single entry when
``S_i`` is empty).  Backpointers index into the previous step's vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import FormatError
from .graph import Graph, Instance, PartialColoring, Solution, _ints, _strip_comment

NEG = -(1 << 40)
_FINITE = NEG // 2


@dataclass(frozen=True)
class IntervalInstance:
    n: int
    ell: int
    spans: tuple  # spans[v - 1] = (lo, hi)
    precoloring: PartialColoring = None
    target: int | None = None

    def __post_init__(self):
        spans = tuple((int(lo), int(hi)) for lo, hi in self.spans)
        if len(spans) != self.n:
            raise ValueError(f"expected {self.n} spans, got {len(spans)}")
        for v, (lo, hi) in enumerate(spans, 1):
            if lo > hi:
                raise ValueError(f"span of vertex {v} is empty: [{lo}, {hi}]")
        object.__setattr__(self, "spans", spans)
        pre = self.precoloring if self.precoloring is not None else PartialColoring(self.ell)
        if pre.ell != self.ell:
            raise ValueError("precoloring uses a different number of colors")
        for v in pre.assignment:
            if not 1 <= v <= self.n:
                raise ValueError(f"precolored vertex {v} outside 1..{self.n}")
        object.__setattr__(self, "precoloring", pre)

    def adjacent(self, u: int, v: int) -> bool:
        (a, b), (c, d) = self.spans[u - 1], self.spans[v - 1]
        return max(a, c) <= min(b, d)

    def graph(self) -> Graph:
        order = sorted(range(1, self.n + 1), key=lambda v: self.spans[v - 1])
        edges = []
        for k, u in enumerate(order):
            hi = self.spans[u - 1][1]
            for v in order[k + 1:]:
                if self.spans[v - 1][0] > hi:
                    break
                edges.append((u, v))
        return Graph.from_edges(self.n, edges)

    def to_instance(self) -> Instance:
        return Instance(self.graph(), self.precoloring, self.target)


def interval_happy_vertices(inst: IntervalInstance, coloring: Mapping[int, int]) -> set[int]:
    """Happy vertices computed straight from the spans (no explicit edge list)."""
    if inst.n == 0:
        return set()
    lo = np.array([s[0] for s in inst.spans])
    hi = np.array([s[1] for s in inst.spans])
    col = np.array([coloring[v] for v in range(1, inst.n + 1)])
    happy = np.ones(inst.n, dtype=bool)
    chunk = max(1, 4_000_000 // inst.n)
    for start in range(0, inst.n, chunk):
        sl = slice(start, start + chunk)
        meet = (lo[sl, None] <= hi[None, :]) & (lo[None, :] <= hi[sl, None])
        differ = col[sl, None] != col[None, :]
        happy[sl] = ~(meet & differ).any(axis=1)
    return {int(v) + 1 for v in np.flatnonzero(happy)}


# --- sweep sequence --------------------------------------------------------

@dataclass(frozen=True)
class SweepSequence:
    events: tuple  # events[k] = ("add" | "remove", v); applying it to S_k gives S_{k+1}
    first: tuple  # first[v], index 0 unused
    last: tuple
    n: int = field(default=0)

    def __len__(self) -> int:
        return len(self.events) + 1

    def sets(self) -> list[frozenset]:
        cur: set[int] = set()
        out = [frozenset()]
        for kind, v in self.events:
            if kind == "add":
                cur.add(v)
            else:
                cur.discard(v)
            out.append(frozenset(cur))
        return out

    def members(self, i: int) -> frozenset:
        return frozenset(v for v in range(1, self.n + 1) if self.first[v] <= i < self.last[v])


def build_sequence(inst: IntervalInstance) -> SweepSequence:
    """Sweep the endpoints; at equal coordinates additions come first, then by vertex id."""
    points = []
    for v, (lo, hi) in enumerate(inst.spans, 1):
        points.append((lo, 0, v))
        points.append((hi, 1, v))
    points.sort()
    first = [0] * (inst.n + 1)
    last = [0] * (inst.n + 1)
    events = []
    size = 0
    for k, (_, kind, v) in enumerate(points):
        if kind == 0:
            events.append(("add", v))
            first[v] = k + 1
            size += 1
        else:
            events.append(("remove", v))
            last[v] = k + 1
            size -= 1
        assert size >= 0
    assert size == 0 and len(events) == 2 * inst.n
    for v in range(1, inst.n + 1):
        assert 0 < first[v] < last[v] <= 2 * inst.n
    return SweepSequence(tuple(events), tuple(first), tuple(last), inst.n)


def nested_order(seq: SweepSequence, i: int) -> list[int]:
    """Vertices of ``S_i`` by increasing entry index.

    Closed neighborhoods in the graph swept so far shrink along this order.
    """
    return sorted(seq.members(i), key=lambda v: seq.first[v])


# --- dynamic program -------------------------------------------------------

class _Sweeper:
    def __init__(self, inst: IntervalInstance, seq: SweepSequence):
        self.inst = inst
        self.seq = seq
        self.ell = inst.ell
        self.colors = np.arange(1, inst.ell + 1)
        self.last = np.array(seq.last)

    def step(self, i: int, order: list[int], V: np.ndarray, record: bool):
        kind, v = self.seq.events[i]
        if kind == "remove":
            out = self._remove(order, V, v)
        else:
            out = self._add(order, V, v)
        new_order, W, code, color = out
        dead = W < _FINITE
        W[dead] = NEG
        if record:
            code[dead] = -1
            return new_order, W, code, color
        return new_order, W, None, None

    def _split(self, V: np.ndarray, s: int):
        ell = self.ell
        offA = (s + 1) * ell
        A = V[:offA].reshape(s + 1, ell)
        B = V[offA:].reshape(ell, s)
        idxA = np.arange(offA).reshape(s + 1, ell)
        idxB = offA + np.arange(ell * s).reshape(ell, s)
        return A, B, idxA, idxB

    def _remove(self, order, V, v):
        s = len(order)
        pos = order.index(v)
        new_order = order[:pos] + order[pos + 1:]
        if s == 1:
            best = int(V.argmax())
            return new_order, V[best:best + 1].copy(), np.array([best]), np.zeros(1, dtype=np.int32)
        A, B, idxA, idxB = self._split(V, s)
        # v is the first vertex to die, so it is happy iff it is among the last h
        # of the sweep order, i.e. iff h >= s - pos
        t = s - pos
        h = np.arange(s)[:, None]
        stay = np.where(h < t, A[:s], NEG)
        drop = np.where(h + 1 >= t, A[1:], NEG)
        take = drop > stay
        An = np.where(take, drop, stay)
        cA = np.where(take, idxA[1:], idxA[:s])
        # u = v leaves: the remaining set is monochromatic
        col_u = B[:, pos]
        better = col_u > An[0]
        An[0] = np.where(better, col_u, An[0])
        cA[0] = np.where(better, idxB[:, pos], cA[0])
        Bn = np.delete(B, pos, axis=1)
        cB = np.delete(idxB, pos, axis=1)
        W = np.concatenate([An.ravel(), Bn.ravel()])
        code = np.concatenate([cA.ravel(), cB.ravel()])
        return new_order, W, code, np.zeros(len(W), dtype=np.int32)

    def _add(self, order, V, v):
        ell = self.ell
        s = len(order)
        pre = self.inst.precoloring.get(v)
        allowed = np.zeros(ell, dtype=bool)
        if pre is None:
            allowed[:] = True
        else:
            allowed[pre - 1] = True
        new_order = order + [v]
        An = np.full((s + 2, ell), NEG, dtype=np.int64)
        cA = np.full((s + 2, ell), -1, dtype=np.int64)
        colA = np.zeros((s + 2, ell), dtype=np.int32)
        Bn = np.full((ell, s + 1), NEG, dtype=np.int64)
        cB = np.full((ell, s + 1), -1, dtype=np.int64)
        colB = np.zeros((ell, s + 1), dtype=np.int32)
        if s == 0:
            An[1, allowed] = V[0] + 1
            cA[1, allowed] = 0
            colA[1, allowed] = self.colors[allowed]
            return new_order, *self._pack(An, Bn, cA, cB, colA, colB)

        A, B, idxA, idxB = self._split(V, s)
        same = allowed  # color b = a is possible exactly for the allowed a
        # v takes the color a of the longest-living vertex
        An[1:, same] = A[:, same] + 1
        cA[1:, same] = idxA[:, same]
        colA[1:, same] = self.colors[same]
        Bn[same, :s] = B[same, :]
        cB[same, :s] = idxB[same, :]
        colB[same, :s] = self.colors[same][:, None]

        w_pos = int(np.argmax(self.last[order]))
        r_v = self.last[v]
        r_w = self.last[order[w_pos]]
        h = np.arange(s + 1)[:, None]
        if r_v < r_w:
            # a' = a; every b != a behaves the same, so one representative color
            if pre is None:
                diff = np.full(ell, ell >= 2)
                rep = np.where(self.colors == 1, 2, 1)
            else:
                diff = self.colors != pre
                rep = np.full(ell, pre)
            if diff.any():
                G = A - h
                val = G.max(axis=0)
                src = idxA[G.argmax(axis=0), np.arange(ell)]
                r_u = self.last[order]
                keep = r_v < r_u
                # u survives v: it stays the witness
                fill = diff[:, None] & keep[None, :] & (B > Bn[:, :s])
                Bn[:, :s] = np.where(fill, B, Bn[:, :s])
                cB[:, :s] = np.where(fill, idxB, cB[:, :s])
                colB[:, :s] = np.where(fill, rep[:, None], colB[:, :s])
                # otherwise v becomes the witness
                if (~keep).any():
                    Bm = np.where(keep[None, :], NEG, B)
                    k = Bm.argmax(axis=1)
                    bval = Bm[np.arange(ell), k]
                    use_b = bval > val
                    val = np.where(use_b, bval, val)
                    src = np.where(use_b, idxB[np.arange(ell), k], src)
                better = diff & (val > Bn[:, s])
                Bn[better, s] = val[better]
                cB[better, s] = src[better]
                colB[better, s] = rep[better]
        else:
            # a' = b; for b != a the best source is max over a != b, read off
            # prefix and suffix maxima over the colors of each (h, u) group
            G = np.vstack([A - h, B.T])
            gsrc = np.vstack([idxA, idxB.T])
            neg = np.full((G.shape[0], 1), NEG, dtype=np.int64)
            prefix = np.hstack([neg, np.maximum.accumulate(G, axis=1)[:, :-1]])
            suffix = np.hstack([np.maximum.accumulate(G[:, ::-1], axis=1)[:, ::-1][:, 1:], neg])
            excl = np.maximum(prefix, suffix)
            g = excl.argmax(axis=0)
            val = excl[g, np.arange(ell)]
            rows = G[g].copy()
            np.fill_diagonal(rows, NEG - 1)
            a_star = rows.argmax(axis=1)
            src = gsrc[g, a_star]
            better = allowed & (val > Bn[:, w_pos])
            Bn[better, w_pos] = val[better]
            cB[better, w_pos] = src[better]
            colB[better, w_pos] = self.colors[better]
        return new_order, *self._pack(An, Bn, cA, cB, colA, colB)

    @staticmethod
    def _pack(An, Bn, cA, cB, colA, colB):
        W = np.concatenate([An.ravel(), Bn.ravel()])
        code = np.concatenate([cA.ravel(), cB.ravel()])
        color = np.concatenate([colA.ravel(), colB.ravel()])
        return W, code, color


@dataclass(frozen=True)
class IntervalSolution(Solution):
    sequence: SweepSequence | None = None


def solve_mhv_interval(inst: IntervalInstance, block: int | None = None) -> IntervalSolution:
    """Optimum and an optimal coloring.

    Values are kept only at every ``block``-th step (default about sqrt(2n));
    the backward pass recomputes one block at a time with backpointers, so
    memory stays at O(ell * n * sqrt(n)) while time roughly doubles.
    """
    seq = build_sequence(inst)
    steps = 2 * inst.n
    if steps == 0:
        return IntervalSolution(0, {}, 1, seq)
    block = block or max(1, math.isqrt(steps))
    sweeper = _Sweeper(inst, seq)

    checkpoints: dict[int, tuple[list[int], np.ndarray]] = {}
    order: list[int] = []
    V = np.zeros(1, dtype=np.int64)
    states = 1
    for i in range(steps):
        if i % block == 0:
            checkpoints[i] = (order, V)
        order, V, _, _ = sweeper.step(i, order, V, record=False)
        states += int(np.count_nonzero(V > _FINITE))
    optimum = int(V[0])

    coloring: dict[int, int] = {}
    entry = 0
    for start in sorted(checkpoints, reverse=True):
        end = min(start + block, steps)
        order, V = checkpoints[start]
        trail = []
        for i in range(start, end):
            order, V, code, color = sweeper.step(i, order, V, record=True)
            trail.append((code, color))
        for i in range(end - 1, start - 1, -1):
            code, color = trail[i - start]
            kind, v = seq.events[i]
            if kind == "add":
                coloring[v] = int(color[entry])
            entry = int(code[entry])
            assert entry >= 0

    got = len(interval_happy_vertices(inst, coloring))
    if got != optimum or not inst.precoloring.extended_by(coloring):
        raise AssertionError(f"certificate check failed: {got} happy vertices, DP optimum {optimum}")
    return IntervalSolution(optimum, coloring, states, seq)


# --- text format -----------------------------------------------------------

def parse_intervals(text: str) -> IntervalInstance:
    header = None
    spans: dict[int, tuple[int, int]] = {}
    colors: dict[int, int] = {}
    target = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        word, *rest = line.split()
        if header is None:
            if word != "intervals" or len(rest) != 2:
                raise FormatError("first directive must be 'intervals <n> <ell>'", lineno)
            n, ell = _ints(rest, lineno)
            if n < 0 or ell < 1:
                raise FormatError("header needs n >= 0 and ell >= 1", lineno)
            header = (n, ell)
            continue
        n, ell = header
        if word == "span":
            if len(rest) != 3:
                raise FormatError("'span' takes a vertex and two endpoints", lineno)
            v, lo, hi = _ints(rest, lineno)
            if not 1 <= v <= n:
                raise FormatError(f"vertex out of range: {v}", lineno)
            if lo > hi:
                raise FormatError(f"empty span [{lo}, {hi}] for vertex {v}", lineno)
            if v in spans:
                raise FormatError(f"duplicate span for vertex {v}", lineno)
            spans[v] = (lo, hi)
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
            if len(rest) != 1 or target is not None:
                raise FormatError("'target' takes one integer and appears at most once", lineno)
            (target,) = _ints(rest, lineno)
            if target < 0:
                raise FormatError("target must be nonnegative", lineno)
        else:
            raise FormatError(f"unknown directive {word!r}", lineno)
    if header is None:
        raise FormatError("missing 'intervals <n> <ell>' header")
    n, ell = header
    missing = [v for v in range(1, n + 1) if v not in spans]
    if missing:
        raise FormatError(f"missing span for vertices {missing[:5]}")
    return IntervalInstance(n, ell, tuple(spans[v] for v in range(1, n + 1)),
                            PartialColoring(ell, colors), target)


def write_intervals(inst: IntervalInstance) -> str:
    lines = [f"intervals {inst.n} {inst.ell}"]
    lines += [f"span {v} {lo} {hi}" for v, (lo, hi) in enumerate(inst.spans, 1)]
    lines += [f"color {v} {a}" for v, a in sorted(inst.precoloring.assignment.items())]
    if inst.target is not None:
        lines.append(f"target {inst.target}")
    return "\n".join(lines) + "\n"
