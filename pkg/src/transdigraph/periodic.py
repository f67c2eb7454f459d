"""Exact reachability in N-indexed periodic digraphs.

A periodic graph has finitely many node names; the instance of edge
``(t, dt, h, dh, k0)`` at ``k >= k0`` joins ``(t, k+dt)`` to ``(h, k+dh)``
whenever both cells are >= 0. Cells are grouped into blocks wide enough
that every edge moves at most one block. Beyond an irregular first block
the step relations are translation invariant, and reachability reduces to
products of a few boolean matrices:

* ``L`` -- walks from a block back to itself that never go below it
  (least fixpoint of ``(A | Up L Down)*``),
* ``M_b`` -- walks from block ``b`` back to ``b`` with no restriction,
  ``M_b = (L | Down M_{b-1} Up)*``; the sequence is eventually periodic and
  the repetition is detected.

A walk from block ``i`` up to ``j`` factors as ``M_i (Up L)^(j-i)``; down
to ``j`` as ``D_i Down D_{i-1} ... Down M_j``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import ceil

import numpy as np


@dataclass(frozen=True)
class PeriodicEdge:
    tail: str
    dt: int
    head: str
    dh: int
    k0: int = 0

    @property
    def delta(self) -> int:
        return self.dh - self.dt

    def exists_from(self, cell: int) -> bool:
        k = cell - self.dt
        return k >= max(self.k0, 0) and cell >= 0 and cell + self.delta >= 0


def _mm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int32) @ b.astype(np.int32)) > 0


def star(a: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure of a square boolean matrix."""
    r = a | np.eye(a.shape[0], dtype=bool)
    while True:
        nxt = _mm(r, r)
        if (nxt == r).all():
            return r
        r = nxt


@dataclass
class PeriodicGraph:
    nodes: list[str] = field(default_factory=list)
    edges: list[PeriodicEdge] = field(default_factory=list)

    def add_node(self, n: str) -> None:
        if n not in self._index:
            self.nodes.append(n)
            self._index[n] = len(self.nodes) - 1

    def add_edge(self, tail: str, dt: int, head: str, dh: int, k0: int = 0) -> None:
        self.add_node(tail)
        self.add_node(head)
        self.edges.append(PeriodicEdge(tail, dt, head, dh, k0))
        self._cache = None

    def __post_init__(self):
        self._index = {n: i for i, n in enumerate(self.nodes)}
        self._cache = None

    @classmethod
    def from_template(cls, t) -> PeriodicGraph:
        g = cls(list(t.nodes))
        for a in t.arcs:
            g.add_edge(a.tail, a.dt, a.head, a.dh)
        return g

    def symmetric(self) -> PeriodicGraph:
        """The orientation-free version: every edge also reversed."""
        g = PeriodicGraph(list(self.nodes))
        for e in self.edges:
            g.add_edge(e.tail, e.dt, e.head, e.dh, e.k0)
            g.add_edge(e.head, e.dh, e.tail, e.dt, e.k0)
        return g

    def successors(self, node: str, cell: int):
        for e in self.edges:
            if e.tail == node and e.exists_from(cell):
                yield e.head, cell + e.delta

    # -- block machinery ----------------------------------------------------

    def _solver(self) -> _Solver:
        if self._cache is None:
            self._cache = _Solver(self)
        return self._cache

    def reach(self, src: tuple[str, int], dst: tuple[str, int]) -> bool:
        """True iff a directed walk joins the two instances in the infinite graph."""
        if src[0] not in self._index or dst[0] not in self._index:
            return src == dst
        return self._solver().reach(src, dst)

    def reach_set(self, src: tuple[str, int], max_cell: int) -> set[tuple[str, int]]:
        """All instances with cell <= ``max_cell`` reachable from ``src``."""
        if src[0] not in self._index:
            return {src}
        return self._solver().reach_set(src, max_cell)


class _Solver:
    def __init__(self, g: PeriodicGraph):
        self.g = g
        n = self.n = len(g.nodes)
        B = max([abs(e.delta) for e in g.edges] + [1])
        c0 = max([max(0, max(e.k0, 0) + e.dt, -e.delta) for e in g.edges] + [0])
        self.B = B
        self.C0 = B * max(1, ceil(c0 / B))
        n0, nr = self.C0 * n, B * n
        self.A0 = np.zeros((n0, n0), bool)
        self.Up0 = np.zeros((n0, nr), bool)
        self.A = np.zeros((nr, nr), bool)
        self.Up = np.zeros((nr, nr), bool)
        self.Down = np.zeros((nr, nr), bool)
        self.Down1 = np.zeros((nr, n0), bool)
        idx = g._index
        for e in g.edges:
            ti = idx[e.tail]
            for c in range(self.C0):
                if e.exists_from(c):
                    b, s = self.locate(e.head, c + e.delta)
                    if b == 0:
                        self.A0[c * n + ti, s] = True
                    else:
                        self.Up0[c * n + ti, s] = True
            base = self.C0 + B  # block 2 is regular and has regular neighbours
            for r in range(B):
                c = base + r
                assert e.exists_from(c)
                b, s = self.locate(e.head, c + e.delta)
                src = r * n + ti
                {1: self.Down, 2: self.A, 3: self.Up}[b][src, s] = True
                # block 1 -> block 0 uses the rectangular relation
                c1 = self.C0 + r
                b1, s1 = self.locate(e.head, c1 + e.delta)
                if b1 == 0:
                    self.Down1[src, s1] = True
        L = star(self.A)
        while True:
            nxt = star(self.A | _mm(_mm(self.Up, L), self.Down))
            if (nxt == L).all():
                break
            L = nxt
        self.L = L
        self.D0 = star(self.A0 | _mm(_mm(self.Up0, L), self.Down1))
        self._M = [self.D0]
        self._seen: dict[bytes, int] = {}
        self._period: tuple[int, int] | None = None

    def locate(self, node: str, cell: int) -> tuple[int, int]:
        i = self.g._index[node]
        if cell < self.C0:
            return 0, cell * self.n + i
        off = cell - self.C0
        return 1 + off // self.B, (off % self.B) * self.n + i

    def M(self, b: int) -> np.ndarray:
        if self._period is not None and b >= len(self._M):
            start, p = self._period
            return self._M[start + (b - start) % p]
        while len(self._M) <= b:
            prev = self._M[-1]
            k = len(self._M)
            if k == 1:
                m = star(self.L | _mm(_mm(self.Down1, prev), self.Up0))
            else:
                m = star(self.L | _mm(_mm(self.Down, prev), self.Up))
            key = m.tobytes()
            if k >= 2 and key in self._seen:
                self._period = (self._seen[key], k - self._seen[key])
                return self.M(b)
            if k >= 2:
                self._seen[key] = k
            self._M.append(m)
        return self._M[b]

    def D(self, b: int) -> np.ndarray:
        return self.D0 if b == 0 else self.L

    def _up_from(self, b: int) -> np.ndarray:
        return self.Up0 if b == 0 else self.Up

    def _down_to(self, b: int) -> np.ndarray:
        return self.Down1 if b == 0 else self.Down

    def _upward(self, v: np.ndarray, b_from: int, b_to: int) -> np.ndarray:
        # eventually periodic in the number of steps, so long climbs short-circuit
        seen: dict[bytes, int] = {}
        history = []
        b = b_from
        while b < b_to:
            if b >= 1:
                key = v.tobytes()
                if key in seen:
                    start = seen[key]
                    p = len(history) - start
                    return history[start + (b_to - b) % p] if p else v
                seen[key] = len(history)
                history.append(v)
            v = _mm(v[None, :], _mm(self._up_from(b), self.L))[0]
            b += 1
        return v

    def reach(self, src, dst) -> bool:
        bi, si = self.locate(*src)
        bj, sj = self.locate(*dst)
        if bi == bj:
            return bool(self.M(bi)[si, sj])
        if bi < bj:
            v = self.M(bi)[si].copy()
            return bool(self._upward(v, bi, bj)[sj])
        v = self.D(bi)[si].copy()
        for b in range(bi - 1, bj, -1):
            v = _mm(v[None, :], _mm(self._down_to(b), self.D(b)))[0]
        v = _mm(v[None, :], _mm(self._down_to(bj), self.M(bj)))[0]
        return bool(v[sj])

    def _states(self, b: int, v: np.ndarray):
        n = self.n
        for s in np.flatnonzero(v):
            node = self.g.nodes[s % n]
            cell = (s // n) if b == 0 else self.C0 + (b - 1) * self.B + s // n
            yield node, int(cell)

    def reach_set(self, src, max_cell: int) -> set[tuple[str, int]]:
        bi, si = self.locate(*src)
        bmax = self.locate(self.g.nodes[0], max_cell)[0]
        found: dict[int, np.ndarray] = {bi: self.M(bi)[si].copy()}
        v = found[bi]
        for b in range(bi, bmax):
            v = _mm(v[None, :], _mm(self._up_from(b), self.L))[0]
            found[b + 1] = v
        u = self.D(bi)[si].copy()
        for b in range(bi - 1, -1, -1):
            step = _mm(u[None, :], self._down_to(b))[0]
            found[b] = _mm(step[None, :], self.M(b))[0]
            u = _mm(step[None, :], self.D(b))[0]
        out = set()
        for b, vec in found.items():
            out.update(x for x in self._states(b, vec) if x[1] <= max_cell)
        return out


def unfold_reach(g: PeriodicGraph, src: tuple[str, int], dst: tuple[str, int], depth: int = 50) -> bool:
    """Breadth-first search confined to cells ``0..depth-1`` (test oracle and fallback)."""
    seen = {src}
    todo = deque([src])
    while todo:
        x = todo.popleft()
        if x == dst:
            return True
        for y in g.successors(*x):
            if 0 <= y[1] < depth and y not in seen:
                seen.add(y)
                todo.append(y)
    return False
