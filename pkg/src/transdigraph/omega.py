"""Arrow rank: rank templates, arrow walks, their ditips, and omega vertices."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .document import (
    CellDecl, PartitionDecl, Structure, _arrow_fmt, side_owner,
)
from .elevate import EmptyTipSet, NotAPartition, PartitionSpec, partition_tips
from .model import ARROW, OMEGA, DigraphBundle, Direction, Ditip, RankTag, TipRef, TransfiniteError
from .present import StubPresentation, compute_ditips
from .walk import BadIncidence, Diwalk, RankBoundViolated, Termination, _check

# levels far from any override; the tail of a uniform pattern is read off here
_FAR = range(100, 106)


class TemplateInstantiationError(TransfiniteError):
    code = "template-instantiation"

    def __init__(self, msg: str, k: int | None = None):
        super().__init__(msg if k is None else f"k={k}: {msg}")
        self.k = k


class BaseMismatch(TransfiniteError):
    code = "base-mismatch"


@dataclass(frozen=True)
class ArrowWalkPresentation:
    """An arrow walk given by per-level patterns plus finitely many overrides.

    ``kind`` is ``out`` (terminates on the left at level 0), ``in`` (terminates
    on the right at level 0) or ``endless`` (both halves joined at level 0).
    Level ``k`` holds the vertex of rank ``base + k`` and the stub leaving it.
    """

    id: str
    kind: str
    template: str
    vertex: str
    step: str
    overrides: tuple[tuple[int, str, str], ...] = ()
    base: int = 0
    inward: ArrowWalkPresentation | None = None
    outward: ArrowWalkPresentation | None = None

    rank = ARROW

    @property
    def mode(self) -> str:
        return self.kind

    def vertex_at(self, k: int) -> str | None:
        for ok, v, _ in self.overrides:
            if ok == k:
                return v
        return _arrow_fmt(self.vertex, k)

    def step_at(self, k: int) -> str | None:
        for ok, _, s in self.overrides:
            if ok == k:
                return s
        return _arrow_fmt(self.step, k)

    @property
    def base_vertex(self) -> str | None:
        if self.kind == "endless":
            return self.outward.base_vertex
        return self.vertex_at(0)

    @property
    def prefix(self) -> tuple[str, ...]:
        return (self.base_vertex,)

    @property
    def terminates_left(self) -> bool:
        return self.kind == "out"

    @property
    def terminates_right(self) -> bool:
        return self.kind == "in"

    def elements(self, levels: int = 3) -> tuple[str, ...]:
        """Left-to-right terms through level ``levels``; the infinite side is cut."""
        if self.kind == "endless":
            return self.inward.elements(levels) + self.outward.elements(levels)[1:]
        out = [self.vertex_at(0)]
        for k in range(levels):
            out += [self.step_at(k), self.vertex_at(k + 1)]
        return tuple(out) if self.kind == "out" else tuple(reversed(out))

    def far_terms(self) -> tuple[str | None, ...]:
        return tuple(x for k in _FAR for x in (self.vertex_at(k), self.step_at(k)))

    def side_key(self, direction: Direction) -> tuple | None:
        if self.kind == "endless":
            half = self.outward if direction is Direction.OUT else self.inward
            return half.side_key(direction)
        if (self.kind == "out") != (direction is Direction.OUT):
            return None
        if not is_extended_arrow(self):
            return None
        return (ARROW, direction.value, ("arrow",) + self.far_terms())

    def tail(self, direction: Direction):
        return None


def is_extended_arrow(p: ArrowWalkPresentation) -> bool:
    """Overrides touch finitely many levels, so only the uniform tail matters."""
    if p.kind == "endless":
        # the halves may share only finitely many terms
        shared = set(p.inward.far_terms()) & set(p.outward.far_terms())
        return is_extended_arrow(p.inward) and is_extended_arrow(p.outward) and not shared
    terms = p.far_terms()
    return None not in terms and len(set(terms)) == len(terms)


def join_endless(win: ArrowWalkPresentation, wout: ArrowWalkPresentation,
                 name: str | None = None) -> ArrowWalkPresentation:
    if win.kind != "in" or wout.kind != "out":
        raise BaseMismatch("a join needs an in-walk on the left and an out-walk on the right")
    if win.base != wout.base:
        raise BaseMismatch(f"base ranks differ: {win.base} vs {wout.base}")
    if win.vertex_at(0) != wout.vertex_at(0):
        raise BaseMismatch(f"base vertices differ: {win.vertex_at(0)} vs {wout.vertex_at(0)}")
    return ArrowWalkPresentation(
        name or f"{win.id}+{wout.id}", "endless", wout.template, wout.vertex, wout.step,
        (), wout.base, win, wout)


def split_endless(p: ArrowWalkPresentation) -> tuple[ArrowWalkPresentation, ArrowWalkPresentation]:
    if p.kind != "endless":
        raise BaseMismatch(f"{p.id} is not endless")
    return p.inward, p.outward


def _instantiate(s: Structure, levels: int) -> None:
    seen: dict[str, int] = {}

    def claim(ident: str | None, k: int, what: str) -> None:
        if ident is None:
            raise TemplateInstantiationError(f"{what} pattern names a negative level", k)
        if ident in seen:
            raise TemplateInstantiationError(f"id {ident} already produced at k={seen[ident]}", k)
        seen[ident] = k

    for t in s.doc.arrow_templates:
        for k in range(levels + 1):
            for sp in t.steps:
                if not sp.live(k):
                    continue
                claim(_arrow_fmt(sp.pattern, k), k, "step")
                if t.base + k + sp.offset < 0:
                    raise TemplateInstantiationError(f"step {sp.pattern} gets a negative rank", k)
            for vp in t.vertices:
                if not vp.live(k):
                    continue
                vid = _arrow_fmt(vp.pattern, k)
                claim(vid, k, "vertex")
                r = t.base + k + vp.offset
                if r < 0:
                    raise TemplateInstantiationError(f"vertex {vid} gets a negative rank", k)
                members = [m for m in (_arrow_fmt(x, k) for x in vp.members) if m is not None]
                if r > 0 and not members:
                    raise TemplateInstantiationError(f"{r}-vertex {vid} holds no tips", k)
                for m in members:
                    ref = TipRef.parse(m)
                    stub = s.stubs.get(ref.rep)
                    if stub is None or stub.rank.n != r - 1 or (stub.mode == "out") != (ref.direction is Direction.OUT):
                        raise TemplateInstantiationError(f"{vid} member {m} is not a {r - 1}-tip of the template", k)


def validate_arrow_walk(p: ArrowWalkPresentation, s: Structure, levels: int | None = None) -> None:
    """Check each level: the stub leaves its own vertex and its tip lies in the next one."""
    if p.kind == "endless":
        validate_arrow_walk(p.inward, s, levels)
        validate_arrow_walk(p.outward, s, levels)
        return
    levels = s.arrow_levels if levels is None else levels
    want = Direction.OUT if p.kind == "out" else Direction.IN
    for k in range(levels):
        v, st, nxt = p.vertex_at(k), p.step_at(k), p.vertex_at(k + 1)
        vx, nx = s.vertex(v or ""), s.vertex(nxt or "")
        stub = s.presentation(st or "")
        if vx is None or nx is None or not isinstance(stub, StubPresentation):
            raise BadIncidence(f"{p.id}: level {k} names an undeclared vertex or step")
        if vx.rank.n != p.base + k or nx.rank.n != p.base + k + 1 or stub.rank != vx.rank:
            raise RankBoundViolated(f"{p.id}: level {k} ranks do not climb from {p.base + k}")
        if (stub.mode == "out") != (want is Direction.OUT) or stub.terminal != v:
            raise BadIncidence(f"{p.id}: step {st} does not leave {v} {want.value}ward")
        if side_owner(s, stub, want)[1] != nxt:
            raise BadIncidence(f"{p.id}: the {want.value}tip of {st} is not in {nxt}")


def assemble_arrow(s: Structure, levels: int | None = None) -> DigraphBundle:
    """Spot-check the rank templates and arrow walks, then list levels 0..``levels``."""
    levels = s.arrow_levels if levels is None else levels
    _instantiate(s, levels)
    for p in s.arrow_walks.values():
        validate_arrow_walk(p, s, levels)
    b = s.bundle()
    finite_levels = tuple(v for v in b.vertices if v.rank.is_finite)
    return DigraphBundle(ARROW, b.arcs, finite_levels, b.tips, b.open_tips)


def truncate(d: DigraphBundle, k: int) -> DigraphBundle:
    """The finite-rank bundle made of levels 0..k."""
    r = RankTag.parse(k)
    tips = {t: ts for t, ts in d.tips.items() if t <= r}
    return DigraphBundle(r, d.arcs, tuple(v for v in d.vertices if v.rank <= r), tips, d.open_tips)


def arrow_ditips(s: Structure) -> list[Ditip]:
    return compute_ditips(s.arrow_walks.values(), ARROW)


def with_partition(s: Structure, spec: PartitionSpec) -> Structure:
    """A new structure whose document also declares ``spec`` as a partition."""
    cells = tuple(CellDecl(name, tuple(sorted(m))) for name, m in sorted(spec.cells.items()))
    doc = dataclasses.replace(s.doc, partitions=list(s.doc.partitions) + [PartitionDecl(spec.rank, cells)])
    if spec.rank.above() > doc.rank:
        doc.rank = spec.rank.above()
    return Structure(doc, s.window, s.arrow_levels)


def elevate_to_omega(s: Structure, spec: PartitionSpec) -> DigraphBundle:
    tips = arrow_ditips(s)
    if not tips:
        raise EmptyTipSet("no arrow ditips: the structure has no extended arrow walk")
    if spec.rank != ARROW:
        raise NotAPartition(f"omega vertices partition arrow ditips, not rank {spec.rank}")
    new = partition_tips(tips, spec)
    b = assemble_arrow(s)
    return DigraphBundle(OMEGA, b.arcs, b.vertices + tuple(new), b.tips, b.open_tips)


def validate_omega_diwalk(elements, s: Structure) -> Diwalk:
    """Omega vertices alternating with arrow walks, each meeting its flanks through tips."""
    els = tuple(elements)
    for e in els:
        v = s.vertex(e)
        if v is None and e in s.arrow_walks and s.arrow_walks[e].kind != "endless":
            raise BadIncidence(f"{e} is one-ended; interior steps of an omega walk are endless")
    _check(els, OMEGA, s, True, True, True)
    return Diwalk(OMEGA, els, Termination.TWO_ENDED, None, True)
