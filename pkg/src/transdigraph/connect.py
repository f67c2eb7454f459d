"""Reachability at a given rank and the strong / unilateral / weak components.

The rank-rho incidence digraph has an edge ``u -> v`` whenever a declared
walk of rank below rho (or an arc) leaves ``u`` and reaches ``v``. Its
vertices come in two sorts: fixed points (concrete ids) and members of
N-indexed families. Family edges become a :class:`PeriodicGraph`, so
reachability stays exact even though only a window of family members is
ever listed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import networkx as nx

from .document import Structure, side_owner
from .model import OMEGA, Direction, RankTag, TransfiniteError, join_index, split_index
from .periodic import PeriodicGraph
from .present import parse_cell_id

# family members at or beyond this index behave uniformly
UNIFORM_FROM = 3


class UnknownVertex(TransfiniteError):
    code = "unknown-vertex"


class TruncatedEnumeration(TransfiniteError):
    code = "truncated-enumeration"

    def __init__(self, msg: str, partial: ComponentSet | None = None):
        super().__init__(msg)
        self.partial = partial


class NonUniformFamily(TransfiniteError):
    code = "non-uniform-family"


KINDS = ("strong", "unilateral", "weak")


@dataclass
class IncidenceDigraph:
    rank: RankTag
    nodes: list[str] = field(default_factory=list)
    fixed: set[tuple[str, str]] = field(default_factory=set)
    periodic: PeriodicGraph = field(default_factory=PeriodicGraph)
    hidden: set[str] = field(default_factory=set)

    def periodic_point(self, p: str) -> tuple[str, int] | None:
        s = split_index(p)
        if s is None or s[0] not in self.periodic._index:
            return None
        return s

    def edges(self) -> list[tuple[str, str]]:
        return sorted(self.fixed)

    def symmetric(self) -> IncidenceDigraph:
        return IncidenceDigraph(
            self.rank, list(self.nodes),
            self.fixed | {(b, a) for a, b in self.fixed},
            self.periodic.symmetric(), set(self.hidden),
        )

    def touched(self, p: str) -> bool:
        if any(p in e for e in self.fixed):
            return True
        pp = self.periodic_point(p)
        if pp is None:
            return False
        key, idx = pp
        for e in self.periodic.edges:
            if e.tail == key and e.exists_from(idx):
                return True
            if e.head == key and e.exists_from(idx - e.delta):
                return True
        return False

    def closure(self, points: list[str]) -> nx.DiGraph:
        """Finite digraph on ``points`` plus every fixed endpoint, transitively closed.

        Any walk between those points splits into periodic stretches and
        fixed edges whose ends are again among the points, so the closure
        is exact.
        """
        pts = set(points) | {x for e in self.fixed for x in e}
        g = nx.DiGraph()
        g.add_nodes_from(pts)
        g.add_edges_from(self.fixed)
        per = {p: self.periodic_point(p) for p in pts}
        per = {p: v for p, v in per.items() if v is not None}
        if per:
            top = max(v[1] for v in per.values())
            lookup = {v: p for p, v in per.items()}
            for p, v in per.items():
                for w in self.periodic.reach_set(v, top):
                    q = lookup.get(w)
                    if q is not None and q != p:
                        g.add_edge(p, q)
        return nx.transitive_closure(g, reflexive=True)


# -- building --------------------------------------------------------------------

class _Builder:
    def __init__(self, s: Structure, rank: RankTag):
        self.s = s
        self.inc = IncidenceDigraph(rank)
        self._aux: set[str] = set()

    def fixed(self, a: str, b: str) -> None:
        for x in (a, b):
            if parse_cell_id(x) is not None:
                self.inc.hidden.add(x)
        self.inc.fixed.add((a, b))

    def family(self, gen_name: str, edges_at) -> None:
        """Lift a generator ``j -> [(a, b), ...]`` into fixed and periodic edges."""
        J = UNIFORM_FROM
        for j in range(J):
            for a, b in edges_at(j):
                self.fixed(a, b)
        samples = [edges_at(j) for j in range(J, J + 3)]
        if len({len(x) for x in samples}) != 1:
            raise NonUniformFamily(f"{gen_name}: edge count changes with the index")
        for pos in range(len(samples[0])):
            ends = []
            for side in (0, 1):
                vals = [samples[t][pos][side] for t in range(3)]
                ends.append(self._describe(gen_name, vals))
            self._lift(ends[0], ends[1])

    def _describe(self, gen_name: str, vals: list[str]):
        if len(set(vals)) == 1:
            return ("fixed", vals[0])
        splits = [split_index(v) for v in vals]
        if all(splits) and len({x[0] for x in splits}) == 1:
            offs = {x[1] - (UNIFORM_FROM + t) for t, x in enumerate(splits)}
            if len(offs) == 1:
                return ("moving", splits[0][0], offs.pop())
        raise NonUniformFamily(f"{gen_name}: endpoint {vals[0]!r} is not an affine family member")

    def _lift(self, a, b) -> None:
        J = UNIFORM_FROM
        per = self.inc.periodic
        if a[0] == "fixed" and b[0] == "fixed":
            self.fixed(a[1], b[1])
        elif a[0] == "moving" and b[0] == "moving":
            per.add_edge(a[1], a[2], b[1], b[2], J)
        elif a[0] == "moving":
            aux = f"~to~{b[1]}[]"
            if aux not in self._aux:
                self._aux.add(aux)
                per.add_edge(aux, 1, aux, 0)
                self.fixed(join_index(aux, 0), b[1])
            per.add_edge(a[1], a[2], aux, 0, J)
        else:
            aux = f"~from~{a[1]}[]"
            if aux not in self._aux:
                self._aux.add(aux)
                per.add_edge(aux, 0, aux, 1)
                self.fixed(a[1], join_index(aux, 0))
            per.add_edge(aux, 0, b[1], b[2], J)


def _step_edge(s: Structure, p) -> tuple[str, str] | None:
    lt, lo = side_owner(s, p, Direction.IN)
    rt, ro = side_owner(s, p, Direction.OUT)
    left, right = lt or lo, rt or ro
    if left is None or right is None:
        return None
    return left, right


def _template_edges(s: Structure, inst: str, attach: set[str]) -> list[tuple[str, str]]:
    t = s.template_of(inst)
    g = PeriodicGraph.from_template(t)
    pts = sorted(attach)
    out = []
    for a, b in itertools.permutations(pts, 2):
        ca, cb = parse_cell_id(a), parse_cell_id(b)
        if g.reach((ca[1], ca[2]), (cb[1], cb[2])):
            out.append((a, b))
    return out


def _attach_points(s: Structure, arcs, inst: str) -> set[str]:
    pts = set()
    for a in arcs:
        for x in (a.tail, a.head):
            c = parse_cell_id(x)
            if c is not None and c[0] == inst:
                pts.add(x)
    return pts


def build_incidence(s: Structure, rank: RankTag | int | str) -> IncidenceDigraph:
    """The rank-``rank`` reach structure over every vertex of rank <= ``rank``."""
    rank = RankTag.parse(rank)
    b = _Builder(s, rank)
    doc = s.doc
    b.inc.nodes = sorted(v.id for v in s.listed_vertices if v.rank <= rank)
    for v in b.inc.nodes:
        pp = split_index(v)
        if pp is not None and pp[0].endswith("[]") and parse_cell_id(v) is None:
            b.inc.periodic.add_node(pp[0])

    # rank 0: arcs and walks through template instances
    con_arcs = [s.arc(a.name) for a in doc.arcs if not a.index]
    con_arcs = [a for a in con_arcs if a is not None]
    for a in con_arcs:
        b.fixed(a.tail, a.head)
    for decl in doc.arcs:
        if decl.index:
            def at(j, decl=decl):
                a = s.arc(f"{decl.name}[{j}]")
                return [] if a is None else [(a.tail, a.head)]
            b.family(decl.name, at)

    def nearby_arcs(j: int):
        out = list(con_arcs)
        for decl in doc.arcs:
            if decl.index:
                for jj in (j - 1, j, j + 1):
                    a = s.arc(f"{decl.name}[{jj}]") if jj >= 0 else None
                    if a is not None:
                        out.append(a)
        return out

    all_pres = [p for p in s.listed_presentations if hasattr(p, "prefix")] + s.listed_walks
    for use in doc.uses:
        if use.index is None:
            pts = _attach_points(s, con_arcs + s.listed_arcs, use.name)
            for p in all_pres:
                if p.prefix:
                    pts |= {x for x in (p.prefix[0], p.prefix[-1]) if x.startswith(use.name + ".")}
            for e in _template_edges(s, use.name, pts):
                b.fixed(*e)
        else:
            def at(j, use=use):
                inst = f"{use.name}[{j}]"
                pts = _attach_points(s, nearby_arcs(j), inst)
                return _template_edges(s, inst, pts)
            b.family(use.name, at)

    # higher ranks: declared walks of every rank below
    _add_walk_edges(s, b, rank)
    b.inc.nodes = sorted(b.inc.nodes)
    return b.inc


def _add_walk_edges(s: Structure, b: _Builder, rank: RankTag) -> None:
    doc = s.doc

    def wanted(r: RankTag) -> bool:
        if rank == OMEGA:
            return True
        return r < rank and r.is_finite

    for p in doc.presentations:
        if not wanted(p.rank):
            continue
        if p.index:
            def at(j, p=p):
                q = s.presentation(f"{p.name}[{j}]")
                e = _step_edge(s, q) if q is not None else None
                return [e] if e else []
            b.family(p.name, at)
        else:
            e = _step_edge(s, s.presentation(p.name))
            if e:
                b.fixed(*e)
    for w in doc.walks:
        if not wanted(w.rank):
            continue
        if w.index:
            def at(j, w=w):
                q = s.presentation(f"{w.name}[{j}]")
                return [(q.prefix[0], q.prefix[-1])] if q is not None else []
            b.family(w.name, at)
        else:
            q = s.presentation(w.name)
            b.fixed(q.prefix[0], q.prefix[-1])
    for stub in s.stubs.values():
        if wanted(stub.rank):
            e = _step_edge(s, stub)
            if e:
                b.fixed(*e)
    if rank == OMEGA:
        for aw in s.arrow_walks.values():
            e = _step_edge(s, aw)
            if e:
                b.fixed(*e)


# -- queries ---------------------------------------------------------------------

def periodic_reach(g: PeriodicGraph, src: tuple[str, int], dst: tuple[str, int]) -> bool:
    return g.reach(src, dst)


class Connectivity:
    """Reach relations of one structure at one rank, computed once and shared."""

    def __init__(self, s: Structure, rank: RankTag | int | str):
        self.s = s
        self.rank = RankTag.parse(rank)
        self.inc = build_incidence(s, self.rank)
        self._dir: dict[frozenset, nx.DiGraph] = {}
        self._sym: dict[frozenset, nx.DiGraph] = {}

    def _check(self, v: str) -> None:
        vx = self.s.vertex(v)
        if vx is None or vx.rank > self.rank:
            raise UnknownVertex(v)

    def _closure(self, pts: list[str], sym: bool) -> nx.DiGraph:
        key = frozenset(pts)
        cache = self._sym if sym else self._dir
        if key not in cache:
            inc = self.inc.symmetric() if sym else self.inc
            cache[key] = inc.closure(list(pts))
        return cache[key]

    def reach(self, u: str, v: str) -> bool:
        self._check(u)
        self._check(v)
        if u == v:
            return True
        return self._closure(self.inc.nodes + [u, v], False).has_edge(u, v)

    def connected(self, u: str, v: str, kind: str) -> bool:
        if kind == "strong":
            return self.reach(u, v) and self.reach(v, u)
        if kind == "unilateral":
            return self.reach(u, v) or self.reach(v, u)
        if kind == "weak":
            self._check(u)
            self._check(v)
            if u == v:
                return True
            return self._closure(self.inc.nodes + [u, v], True).has_edge(u, v)
        raise ValueError(f"unknown kind {kind!r}")

    def relation(self, sym: bool = False) -> dict[str, set[str]]:
        nodes = self.inc.nodes
        g = self._closure(nodes, sym)
        ns = set(nodes)
        return {u: {v for v in g.successors(u) if v in ns} | {u} for u in nodes}


@dataclass
class ComponentSet:
    kind: str
    rank: RankTag
    components: list[frozenset[str]]
    truncated: bool = False
    window: int = 0

    def sorted_lists(self) -> list[list[str]]:
        return sorted(sorted(c) for c in self.components)


def connected(s: Structure, u: str, v: str, rank, kind: str) -> bool:
    return Connectivity(s, rank).connected(u, v, kind)


def components(s: Structure, rank, kind: str, limit: int = 10_000, strict: bool = False,
               conn: Connectivity | None = None) -> ComponentSet:
    """Components among the listed vertices of rank <= ``rank``.

    With ``strict`` set, hitting ``limit`` raises :class:`TruncatedEnumeration`;
    otherwise the result carries ``truncated=True``.
    """
    conn = conn or Connectivity(s, rank)
    rank = conn.rank
    nodes = conn.inc.nodes
    if kind == "weak":
        rel = conn.relation(sym=True)
        return ComponentSet(kind, rank, _classes(nodes, rel), window=s.window)
    rel = conn.relation()
    mutual = {u: {v for v in rel[u] if u in rel[v]} for u in nodes}
    strong = _classes(nodes, mutual)
    if kind == "strong":
        return ComponentSet(kind, rank, strong, window=s.window)
    if kind != "unilateral":
        raise ValueError(f"unknown kind {kind!r}")
    comps, truncated = _maximal_chains(strong, rel, limit, lambda v: conn.inc.touched(v))
    out = ComponentSet(kind, rank, comps, truncated, s.window)
    if truncated and strict:
        raise TruncatedEnumeration(f"more than {limit} unilateral components", out)
    return out


def _classes(nodes: list[str], rel: dict[str, set[str]]) -> list[frozenset[str]]:
    seen: set[str] = set()
    out = []
    for u in nodes:
        if u in seen:
            continue
        c = frozenset(rel[u])
        seen |= c
        out.append(c)
    return sorted(out, key=lambda c: sorted(c))


def _maximal_chains(strong, rel, limit: int, touched) -> tuple[list[frozenset[str]], bool]:
    cond = nx.DiGraph()
    rep = {min(c): c for c in strong}
    cond.add_nodes_from(rep)
    for a, ca in rep.items():
        for b in rep:
            if a != b and b in rel[a]:
                cond.add_edge(a, b)
    hasse = nx.transitive_reduction(cond)
    sources = sorted(n for n in hasse if hasse.in_degree(n) == 0)
    out: list[frozenset[str]] = []
    truncated = False
    stack = [(s, (s,)) for s in reversed(sources)]
    while stack:
        node, path = stack.pop()
        succ = sorted(hasse.successors(node))
        if not succ:
            members = frozenset().union(*(rep[x] for x in path))
            if len(members) == 1 and not touched(next(iter(members))):
                continue
            if len(out) >= limit:
                truncated = True
                break
            out.append(members)
            continue
        for nxt in reversed(succ):
            stack.append((nxt, path + (nxt,)))
    return sorted(out, key=lambda c: sorted(c)), truncated
