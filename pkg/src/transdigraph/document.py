"""Declarations of a finitely presented transfinite digraph and their resolution.

A :class:`SpecDocument` is the parsed form of a ``.tdg`` file. A
:class:`Structure` resolves ids against it lazily, so a family member such
as ``v1[731]`` is available even though listings only cover a finite window
of family indices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property

from .model import (
    ARROW, Arc, DigraphBundle, Direction, Ditip, RankTag, TipRef,
    TransfiniteError, Vertex, finite, split_index,
)
from .present import (
    CellTemplate, StubPresentation, TemplateUse, WalkPresentation, PeriodicRef,
    compute_ditips, parse_cell_id, presentation_key, subst,
)


class UnknownId(TransfiniteError):
    code = "unknown-id"


# -- declarations -----------------------------------------------------------------

@dataclass(frozen=True)
class VertexDecl:
    name: str
    rank: RankTag
    members: tuple[str, ...] = ()
    index: str | None = None


@dataclass(frozen=True)
class ArcDecl:
    name: str
    tail: str
    head: str
    index: str | None = None


@dataclass(frozen=True)
class WalkDecl:
    name: str
    rank: RankTag
    elements: tuple[str, ...]
    index: str | None = None


@dataclass(frozen=True)
class PresentationDecl:
    name: str
    rank: RankTag
    mode: str
    prefix: tuple[str, ...] = ()
    repetend: tuple[str, ...] = ()
    anchor: int = 0
    left: tuple[str, ...] = ()
    left_anchor: int = 0
    index: str | None = None


@dataclass(frozen=True)
class CellDecl:
    name: str
    members: tuple[str, ...]
    index: str | None = None


@dataclass(frozen=True)
class PartitionDecl:
    rank: RankTag
    cells: tuple[CellDecl, ...]


@dataclass(frozen=True)
class ArrowVertexPattern:
    pattern: str
    offset: int
    members: tuple[str, ...] = ()
    # the item exists only at levels lo..hi
    lo: int = 0
    hi: int | None = None

    def live(self, k: int) -> bool:
        return k >= self.lo and (self.hi is None or k <= self.hi)


@dataclass(frozen=True)
class ArrowStepPattern:
    pattern: str
    offset: int
    mode: str
    terminal: str
    lo: int = 0
    hi: int | None = None

    def live(self, k: int) -> bool:
        return k >= self.lo and (self.hi is None or k <= self.hi)


@dataclass(frozen=True)
class ArrowTemplateDecl:
    name: str
    base: int
    vertices: tuple[ArrowVertexPattern, ...] = ()
    steps: tuple[ArrowStepPattern, ...] = ()


@dataclass(frozen=True)
class ArrowWalkDecl:
    name: str
    kind: str
    template: str
    vertex: str
    step: str
    overrides: tuple[tuple[int, str, str], ...] = ()


@dataclass(frozen=True)
class ArrowJoinDecl:
    name: str
    inward: str
    outward: str


@dataclass
class SpecDocument:
    name: str = "d"
    rank: RankTag = field(default_factory=lambda: finite(0))
    templates: list[CellTemplate] = field(default_factory=list)
    uses: list[TemplateUse] = field(default_factory=list)
    vertices: list[VertexDecl] = field(default_factory=list)
    arcs: list[ArcDecl] = field(default_factory=list)
    walks: list[WalkDecl] = field(default_factory=list)
    presentations: list[PresentationDecl] = field(default_factory=list)
    partitions: list[PartitionDecl] = field(default_factory=list)
    arrow_templates: list[ArrowTemplateDecl] = field(default_factory=list)
    arrow_walks: list[ArrowWalkDecl] = field(default_factory=list)
    arrow_joins: list[ArrowJoinDecl] = field(default_factory=list)
    # declaration order as (list name, position); the printer replays it
    order: list[tuple[str, int]] = field(default_factory=list, compare=False)


def parse_periodic(text: str) -> PeriodicRef:
    base, _, d = text.partition("@")
    return PeriodicRef(base, int(d) if d else 0)


def _arrow_fmt(pattern: str, k: int) -> str | None:
    bad = False

    def repl(m: re.Match) -> str:
        nonlocal bad
        c = int(m.group(2) or 0) * (-1 if m.group(1) == "-" else 1)
        if k + c < 0:
            bad = True
        return str(k + c)

    out = re.sub(r"\{\s*k\s*(?:([+-])\s*(\d+))?\s*\}", repl, pattern)
    return None if bad else out


# -- resolution -------------------------------------------------------------------

class Structure:
    """Lazy resolver over a document; ``window`` bounds family listings only."""

    def __init__(self, doc: SpecDocument, window: int = 50, arrow_levels: int = 4):
        self.doc = doc
        self.window = window
        self.arrow_levels = arrow_levels
        self.templates = {t.id: t for t in doc.templates}
        self.uses = {u.name: u for u in doc.uses}
        self._vfam = {}
        self._vcon = {}
        for v in doc.vertices:
            (self._vfam if v.index else self._vcon)[v.name] = v
        for p in doc.partitions:
            for c in p.cells:
                decl = VertexDecl(c.name, p.rank.above(), c.members, c.index)
                (self._vfam if c.index else self._vcon)[c.name] = decl
        self._afam = {a.name: a for a in doc.arcs if a.index}
        self._acon = {a.name: a for a in doc.arcs if not a.index}
        self._pfam = {p.name: p for p in doc.presentations if p.index}
        self._pcon = {p.name: p for p in doc.presentations if not p.index}
        self._wfam = {w.name: w for w in doc.walks if w.index}
        self._wcon = {w.name: w for w in doc.walks if not w.index}
        self._owner_cache: dict[tuple, str | None] = {}
        self._open_stubs: set[str] = set()

    @property
    def rank(self) -> RankTag:
        return self.doc.rank

    # families
    @staticmethod
    def _family(ident: str) -> tuple[str, int] | None:
        s = split_index(ident)
        if s is None or not s[0].endswith("[]"):
            return None
        return s[0][:-2], s[1]

    def _decl(self, ident: str, con: dict, fam: dict):
        if ident in con:
            return con[ident], None
        f = self._family(ident)
        if f and f[0] in fam:
            return fam[f[0]], f[1]
        return None, None

    # template nodes and arcs
    def template_of(self, inst: str) -> CellTemplate | None:
        f = self._family(inst)
        name = f[0] if f else inst
        use = self.uses.get(name)
        if use is None or (use.index is None) != (f is None):
            return None
        return self.templates.get(use.template)

    def is_cell_id(self, ident: str) -> bool:
        c = parse_cell_id(ident)
        if c is None:
            return False
        t = self.template_of(c[0])
        return t is not None and c[2] >= 0 and (c[1] in t.nodes or any(a.id == c[1] for a in t.arcs))

    def vertex(self, ident: str) -> Vertex | None:
        c = parse_cell_id(ident)
        if c is not None:
            t = self.template_of(c[0])
            if t is not None and c[1] in t.nodes and c[2] >= 0:
                return Vertex(ident, finite(0))
            return None
        decl, j = self._decl(ident, self._vcon, self._vfam)
        if decl is None:
            decl = self._arrow_vertex.get(ident)
            if decl is None:
                return None
            return Vertex(ident, decl.rank, frozenset(TipRef.parse(m) for m in decl.members))
        members = []
        for m in decl.members:
            s = subst(m, decl.index, j) if decl.index else m
            if s is not None:
                members.append(TipRef.parse(s))
        if decl.index and decl.members and not members:
            return None
        return Vertex(ident, decl.rank, frozenset(members))

    def arc(self, ident: str) -> Arc | None:
        c = parse_cell_id(ident)
        if c is not None:
            t = self.template_of(c[0])
            if t is None:
                return None
            try:
                ta = t.arc(c[1])
            except KeyError:
                return None
            k = c[2]
            if k < 0 or k + ta.dt < 0 or k + ta.dh < 0:
                return None
            return Arc(ident, f"{c[0]}.{ta.tail}@{k + ta.dt}", f"{c[0]}.{ta.head}@{k + ta.dh}")
        decl, j = self._decl(ident, self._acon, self._afam)
        if decl is None:
            return None
        tail = subst(decl.tail, decl.index, j) if decl.index else decl.tail
        head = subst(decl.head, decl.index, j) if decl.index else decl.head
        if tail is None or head is None:
            return None
        return Arc(ident, tail, head)

    def presentation(self, ident: str):
        stub = self.stubs.get(ident)
        if stub is not None:
            return stub
        if ident in self.arrow_walks:
            return self.arrow_walks[ident]
        decl, j = self._decl(ident, self._pcon, self._pfam)
        if decl is not None:
            return self._inst_presentation(decl, ident, j)
        decl, j = self._decl(ident, self._wcon, self._wfam)
        if decl is not None:
            els = [subst(e, decl.index, j) if decl.index else e for e in decl.elements]
            if any(e is None for e in els):
                return None
            return WalkPresentation(ident, decl.rank, "finite", tuple(els))
        return None

    def _inst_presentation(self, decl: PresentationDecl, ident: str, j):
        def s(x):
            return subst(x, decl.index, j) if decl.index else x

        prefix = [s(x) for x in decl.prefix]
        rep = [s(x) for x in decl.repetend]
        left = [s(x) for x in decl.left]
        if any(x is None for x in prefix + rep + left):
            return None
        return WalkPresentation(
            ident, decl.rank, decl.mode, tuple(prefix),
            tuple(parse_periodic(x) for x in rep), decl.anchor,
            tuple(parse_periodic(x) for x in left), decl.left_anchor,
        )

    def rank_of(self, ident: str) -> RankTag | None:
        v = self.vertex(ident)
        return v.rank if v is not None else None

    # -- arrow templates: finite levels ------------------------------------------

    @cached_property
    def arrow_levels_vertices(self) -> list[VertexDecl]:
        out = []
        for t in self.doc.arrow_templates:
            for k in range(self.arrow_levels + 1):
                for vp in t.vertices:
                    if not vp.live(k):
                        continue
                    vid = _arrow_fmt(vp.pattern, k)
                    r = t.base + k + vp.offset
                    if vid is None or r < 0:
                        continue
                    members = tuple(m for m in (_arrow_fmt(x, k) for x in vp.members) if m is not None)
                    if r > 0 and not members:
                        continue
                    out.append(VertexDecl(vid, finite(r), members))
        return out

    @cached_property
    def _arrow_vertex(self) -> dict[str, VertexDecl]:
        return {d.name: d for d in self.arrow_levels_vertices}

    @cached_property
    def stubs(self) -> dict[str, StubPresentation]:
        out = {}
        for t in self.doc.arrow_templates:
            for k in range(self.arrow_levels + 1):
                for sp in t.steps:
                    if not sp.live(k):
                        continue
                    sid = _arrow_fmt(sp.pattern, k)
                    term = _arrow_fmt(sp.terminal, k)
                    r = t.base + k + sp.offset
                    if sid is None or term is None or r < 0:
                        continue
                    out[sid] = StubPresentation(sid, finite(r), sp.mode, term)
                    if k == self.arrow_levels:
                        self._open_stubs.add(sid)
        return out

    @cached_property
    def arrow_walks(self) -> dict:
        from .omega import ArrowWalkPresentation, join_endless

        t = {a.name: a for a in self.doc.arrow_templates}
        out = {}
        for w in self.doc.arrow_walks:
            base = t[w.template].base if w.template in t else 0
            out[w.name] = ArrowWalkPresentation(
                w.name, w.kind, w.template, w.vertex, w.step, tuple(w.overrides), base)
        for j in self.doc.arrow_joins:
            if j.inward not in out or j.outward not in out:
                raise UnknownId(j.inward if j.inward not in out else j.outward)
            out[j.name] = join_endless(out[j.inward], out[j.outward], name=j.name)
        return out

    # -- listings ----------------------------------------------------------------

    def _instances(self, fam: dict, con: dict) -> list[str]:
        ids = sorted(con)
        for name in sorted(fam):
            ids.extend(f"{name}[{j}]" for j in range(self.window))
        return ids

    @cached_property
    def listed_vertices(self) -> list[Vertex]:
        out = []
        for ident in self._instances(self._vfam, self._vcon):
            v = self.vertex(ident)
            if v is not None:
                out.append(v)
        for d in self.arrow_levels_vertices:
            out.append(Vertex(d.name, d.rank, frozenset(TipRef.parse(m) for m in d.members)))
        return sorted(out, key=lambda v: v.id)

    @cached_property
    def listed_arcs(self) -> list[Arc]:
        out = [a for a in (self.arc(i) for i in self._instances(self._afam, self._acon)) if a is not None]
        return sorted(out, key=lambda a: a.id)

    @cached_property
    def listed_presentations(self) -> list:
        out = []
        for ident in self._instances(self._pfam, self._pcon):
            p = self.presentation(ident)
            if p is not None:
                out.append(p)
        out.extend(self.stubs.values())
        out.extend(self.arrow_walks.values())
        return sorted(out, key=lambda p: p.id)

    @cached_property
    def listed_walks(self) -> list[WalkPresentation]:
        out = []
        for ident in self._instances(self._wfam, self._wcon):
            p = self.presentation(ident)
            if p is not None:
                out.append(p)
        return out

    def tips(self, rank: RankTag) -> list[Ditip]:
        return compute_ditips(self.listed_presentations, rank)

    def tip_ranks(self) -> list[RankTag]:
        return sorted({p.rank for p in self.listed_presentations})

    def open_tips(self) -> set[str]:
        """Tips near the window edge whose partition cell may lie beyond it."""
        out = set()
        edge = self.window - 2
        for r in self.tip_ranks():
            for t in self.tips(r):
                fams = [self._family(m) for m in t.members]
                if all(f is not None and f[1] >= edge for f in fams):
                    out.add(t.id)
                elif self.stubs and all(m in self._open_stubs for m in t.members):
                    out.add(t.id)
        return out

    def bundle(self) -> DigraphBundle:
        tips = {r: tuple(self.tips(r)) for r in self.tip_ranks()}
        rank = self.rank
        if rank == ARROW:
            rank = finite(max([v.rank.n for v in self.listed_vertices if v.rank.is_finite] + [0]))
        return DigraphBundle(
            rank, tuple(self.listed_arcs),
            tuple(v for v in self.listed_vertices if v.rank.is_finite or v.rank == rank),
            tips, frozenset(self.open_tips()),
        )

    # -- tips and their vertices ----------------------------------------------

    def key_of(self, ref: TipRef) -> tuple | None:
        p = self.presentation(ref.rep)
        if p is None:
            return None
        return presentation_key(p, ref.direction)

    def tip_owner(self, key: tuple) -> str | None:
        """Id of the vertex containing the ditip with this eventual-identity key."""
        if key in self._owner_cache:
            return self._owner_cache[key]
        nums = {int(x) for x in re.findall(r"\[(\d+)\]", repr(key))}
        js = set(range(0, 3))
        for i in nums:
            js.update(range(max(0, i - 3), i + 4))
        candidates = list(self._vcon)
        for name in self._vfam:
            candidates.extend(f"{name}[{j}]" for j in sorted(js))
        candidates.extend(d.name for d in self.arrow_levels_vertices)
        found = None
        for ident in candidates:
            v = self.vertex(ident)
            if v is None:
                continue
            for m in v.members:
                if self.key_of(m) == key:
                    found = ident
                    break
            if found:
                break
        self._owner_cache[key] = found
        return found

    def all_ids(self) -> set[str]:
        ids = {v.id for v in self.listed_vertices} | {a.id for a in self.listed_arcs}
        ids |= {p.id for p in self.listed_presentations} | {w.id for w in self.listed_walks}
        return ids


def side_owner(s: Structure, p, direction: Direction) -> tuple[str | None, str | None]:
    """Where a step attaches on one side: ``(terminal vertex, None)`` or ``(None, owner of tip)``.

    Returns ``(None, None)`` when the side neither terminates nor traverses a
    declared ditip.
    """
    if isinstance(p, Arc):
        return (p.tail if direction is Direction.IN else p.head), None
    if isinstance(p, StubPresentation):
        if (p.mode == "out") == (direction is Direction.IN):
            return p.terminal, None
        key = presentation_key(p, direction)
        return None, s.tip_owner(key)
    if direction is Direction.IN and p.terminates_left:
        return p.prefix[0], None
    if direction is Direction.OUT and p.terminates_right:
        return p.prefix[-1], None
    key = presentation_key(p, direction)
    if key is None:
        return None, None
    return None, s.tip_owner(key)
