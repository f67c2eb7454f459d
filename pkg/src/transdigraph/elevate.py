"""Raising rank: partition ditips into vertices one rank up, and undirected shadows."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .model import (
    DigraphBundle, Ditip, RankTag, TipRef, TransfiniteError, ValidationReport, Vertex,
    validate_bundle,
)


class EmptyTipSet(TransfiniteError):
    code = "empty-tip-set"


class NotAPartition(TransfiniteError):
    code = "not-a-partition"

    def __init__(self, msg: str, missing=(), doubled=(), unknown=()):
        super().__init__(msg)
        self.missing = tuple(sorted(missing))
        self.doubled = tuple(sorted(doubled))
        self.unknown = tuple(sorted(unknown))


@dataclass(frozen=True)
class PartitionSpec:
    """Cells of a partition of the rank-``rank`` ditips; cell members are ditip ids."""

    rank: RankTag
    cells: Mapping[str, frozenset[str]]

    @classmethod
    def discrete(cls, tips: Iterable[Ditip], rank: RankTag, prefix: str = "v") -> PartitionSpec:
        """Convenience generator: every ditip alone in its own cell."""
        tips = sorted(tips, key=lambda t: t.id)
        return cls(rank, {f"{prefix}{i}": frozenset([t.id]) for i, t in enumerate(tips)})

    @classmethod
    def indiscrete(cls, tips: Iterable[Ditip], rank: RankTag, name: str = "v") -> PartitionSpec:
        """Convenience generator: all ditips in a single cell."""
        return cls(rank, {name: frozenset(t.id for t in tips)})


def _resolve(tips: list[Ditip], ident: str) -> Ditip | None:
    for t in tips:
        if t.id == ident:
            return t
    try:
        ref = TipRef.parse(ident)
    except ValueError:
        return None
    for t in tips:
        if t.direction == ref.direction and ref.rep in t.members:
            return t
    return None


def partition_tips(tips: Iterable[Ditip], spec: PartitionSpec) -> list[Vertex]:
    """One vertex of rank ``spec.rank + 1`` per cell; the cells must partition ``tips``."""
    tips = sorted(tips, key=lambda t: t.id)
    if not tips:
        raise EmptyTipSet(f"no ditips of rank {spec.rank} to partition")
    owner: dict[str, str] = {}
    doubled, unknown = set(), set()
    vertices = []
    for cell in sorted(spec.cells):
        members = set()
        if not spec.cells[cell]:
            raise NotAPartition(f"cell {cell} is empty")
        for ident in sorted(spec.cells[cell]):
            t = _resolve(tips, ident)
            if t is None:
                unknown.add(ident)
                continue
            if t.id in owner:
                doubled.add(t.id)
            owner[t.id] = cell
            members.add(t.ref)
        vertices.append(Vertex(cell, spec.rank.above(), frozenset(members)))
    missing = {t.id for t in tips} - set(owner)
    if missing or doubled or unknown:
        parts = []
        if missing:
            parts.append("unassigned " + ", ".join(sorted(missing)))
        if doubled:
            parts.append("assigned twice " + ", ".join(sorted(doubled)))
        if unknown:
            parts.append("unknown " + ", ".join(sorted(unknown)))
        raise NotAPartition("; ".join(parts), missing, doubled, unknown)
    return vertices


def elevate(d: DigraphBundle, spec: PartitionSpec) -> DigraphBundle:
    """Append the level built from ``spec`` on top of ``d``; ``d`` itself is untouched."""
    tips = list(d.tips.get(spec.rank, ()))
    new = partition_tips(tips, spec)
    clash = {v.id for v in new} & ({v.id for v in d.vertices} | {a.id for a in d.arcs})
    if clash:
        raise NotAPartition("cell ids collide with existing ids: " + ", ".join(sorted(clash)))
    return d.with_vertices(new, spec.rank.above())


@dataclass(frozen=True)
class UnderlyingGraph:
    branches: tuple[tuple[str, frozenset[str]], ...]
    # rank -> node id -> undirected tip ids it consists of
    levels: Mapping[RankTag, Mapping[str, frozenset[str]]] = field(default_factory=dict)

    def counts(self) -> dict[RankTag, int]:
        return {r: len(nodes) for r, nodes in self.levels.items()}


def undirected_tip(ref: TipRef, d: DigraphBundle) -> str:
    for r, ts in d.tips.items():
        for t in ts:
            if t.direction == ref.direction and ref.rep in t.members:
                return f"tip:{t.id}"
    return f"tip:{ref}"


def underlying_graph(d: DigraphBundle) -> UnderlyingGraph:
    """Forget arc directions; every ditip becomes a plain tip, every vertex a node."""
    branches = tuple(sorted((a.id, frozenset((a.tail, a.head))) for a in d.arcs))
    levels: dict[RankTag, dict[str, frozenset[str]]] = {}
    for v in sorted(d.vertices, key=lambda v: v.id):
        levels.setdefault(v.rank, {})[v.id] = frozenset(undirected_tip(m, d) for m in v.members)
    return UnderlyingGraph(branches, levels)


def partition_undirected(g: UnderlyingGraph, d: DigraphBundle, spec: PartitionSpec) -> UnderlyingGraph:
    """Apply ``spec`` to the undirected tips of ``g`` (the parallel construction for graphs)."""
    tips = list(d.tips.get(spec.rank, ()))
    level = {}
    for cell, idents in spec.cells.items():
        level[cell] = frozenset(f"tip:{_resolve(tips, i).id}" for i in idents)
    levels = dict(g.levels)
    levels[spec.rank.above()] = level
    return UnderlyingGraph(g.branches, levels)


def check_pristine(d: DigraphBundle) -> ValidationReport:
    """Vertices hold only ditips exactly one rank below, never other vertices."""
    rep = ValidationReport()
    vids = {v.id for v in d.vertices}
    full = validate_bundle(d)
    for v in full.violations:
        if v.kind in ("non-pristine member rank", "unknown member tip", "illegal vertex rank"):
            rep.violations.append(v)
    for v in sorted(d.vertices, key=lambda v: v.id):
        for m in sorted(v.members, key=str):
            if m.rep in vids:
                rep.add("embraced vertex", v.id, m.rep)
    return rep
