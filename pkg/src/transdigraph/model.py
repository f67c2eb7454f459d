"""Core domain types: ranks, arcs, ranked vertices, ditips and digraph bundles."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import total_ordering
from typing import Iterable, Mapping


class TransfiniteError(Exception):
    """Base class for every domain error raised by this package."""

    code = "error"


@total_ordering
@dataclass(frozen=True)
class RankTag:
    """An ordinal-like rank: a natural number n >= -1, the arrow rank, or omega."""

    kind: str = "finite"
    n: int = 0

    def __post_init__(self):
        if self.kind not in ("finite", "arrow", "omega"):
            raise ValueError(f"unknown rank kind {self.kind!r}")
        if self.kind == "finite" and self.n < -1:
            raise ValueError(f"finite rank must be >= -1, got {self.n}")
        if self.kind != "finite" and self.n != 0:
            raise ValueError("infinite ranks carry no integer payload")

    @property
    def _key(self) -> tuple[int, int]:
        return ({"finite": 0, "arrow": 1, "omega": 2}[self.kind], self.n)

    def __lt__(self, other: RankTag) -> bool:
        if not isinstance(other, RankTag):
            return NotImplemented
        return self._key < other._key

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def below(self) -> RankTag:
        """Rank of the ditips that make up a vertex of this rank."""
        if self.kind == "omega":
            return ARROW
        if self.kind == "arrow":
            raise ValueError("the arrow rank has no immediate predecessor")
        if self.n < 0:
            raise ValueError("rank -1 has no predecessor")
        return RankTag("finite", self.n - 1)

    def above(self) -> RankTag:
        """Rank of the vertices built from ditips of this rank."""
        if self.kind == "arrow":
            return OMEGA
        if self.kind == "omega":
            raise ValueError("ranks beyond omega are not supported")
        return RankTag("finite", self.n + 1)

    def __str__(self) -> str:
        if self.kind == "finite":
            return str(self.n)
        return self.kind

    def __repr__(self) -> str:
        return f"RankTag({self})"

    @classmethod
    def parse(cls, text: str | int | RankTag) -> RankTag:
        if isinstance(text, RankTag):
            return text
        if isinstance(text, int):
            return finite(text)
        t = str(text).strip().lower()
        if t in ("arrow", "arrow-omega", "arrowomega"):
            return ARROW
        if t in ("omega", "w"):
            return OMEGA
        try:
            return finite(int(t))
        except ValueError:
            raise ValueError(f"not a rank: {text!r}") from None


def finite(n: int) -> RankTag:
    return RankTag("finite", n)


ARROW = RankTag("arrow")
OMEGA = RankTag("omega")


def rank_compare(a: RankTag, b: RankTag) -> str:
    """Three-way comparison returning ``"less"``, ``"equal"`` or ``"greater"``."""
    if a == b:
        return "equal"
    return "less" if a < b else "greater"


class Direction(str, Enum):
    IN = "in"
    OUT = "out"

    @property
    def opposite(self) -> Direction:
        return Direction.OUT if self is Direction.IN else Direction.IN


@dataclass(frozen=True)
class TipRef:
    """Names a ditip by direction and one declared representative presentation."""

    direction: Direction
    rep: str

    def __str__(self) -> str:
        return f"{self.direction.value}:{self.rep}"

    @classmethod
    def parse(cls, text: str) -> TipRef:
        d, _, rep = text.partition(":")
        if not rep or d not in ("in", "out"):
            raise ValueError(f"tip reference must look like in:ID or out:ID, got {text!r}")
        return cls(Direction(d), rep)


@dataclass(frozen=True)
class Arc:
    id: str
    tail: str
    head: str

    def reversed(self) -> Arc:
        return Arc(self.id, self.head, self.tail)


@dataclass(frozen=True)
class Vertex:
    """A vertex of some rank.

    Rank-0 vertices keep ``members`` empty; arc incidence encodes their
    (-1)-tips. Higher-rank vertices list the ditips they consist of.
    """

    id: str
    rank: RankTag
    members: frozenset[TipRef] = frozenset()


@dataclass(frozen=True)
class Ditip:
    id: str
    direction: Direction
    rank: RankTag
    members: frozenset[str]

    @property
    def ref(self) -> TipRef:
        return TipRef(self.direction, min(self.members))


_INDEX_RE = re.compile(r"\[(-?\d+)\]")


def split_index(ident: str) -> tuple[str, int] | None:
    """Split ``"v1[3]"``-style ids into a family key and index.

    Only the first bracketed integer counts; ``"R[2].x@5"`` gives ``("R[].x@5", 2)``.
    """
    m = _INDEX_RE.search(ident)
    if not m:
        return None
    return ident[: m.start()] + "[]" + ident[m.end():], int(m.group(1))


def join_index(key: str, idx: int) -> str:
    return key.replace("[]", f"[{idx}]", 1)


@dataclass
class Violation:
    kind: str
    ids: tuple[str, ...]
    detail: str = ""

    def __str__(self) -> str:
        ids = ", ".join(self.ids)
        return f"{self.kind}: {ids}" + (f" ({self.detail})" if self.detail else "")


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, *ids: str, detail: str = "") -> None:
        self.violations.append(Violation(kind, tuple(ids), detail))

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"kind": v.kind, "ids": list(v.ids), "detail": v.detail}
                for v in sorted(self.violations, key=lambda v: (v.kind, v.ids, v.detail))
            ],
        }


@dataclass(frozen=True)
class DigraphBundle:
    """The tuple {A, V^0, ..., V^rank} restricted to finitely many listed items.

    ``tips`` maps each rank to the declared ditips of that rank. Parametric
    structure lives in the presentation layer; a bundle is what one gets by
    listing a finite window of it.
    """

    rank: RankTag
    arcs: tuple[Arc, ...] = ()
    vertices: tuple[Vertex, ...] = ()
    tips: Mapping[RankTag, tuple[Ditip, ...]] = field(default_factory=dict)
    # tips whose partition cell may fall outside a listing window
    open_tips: frozenset[str] = frozenset()

    def level(self, rank: RankTag) -> tuple[Vertex, ...]:
        return tuple(v for v in self.vertices if v.rank == rank)

    def levels(self) -> list[RankTag]:
        return sorted({v.rank for v in self.vertices})

    def vertex(self, vid: str) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)

    def with_vertices(self, extra: Iterable[Vertex], rank: RankTag) -> DigraphBundle:
        return DigraphBundle(rank, self.arcs, self.vertices + tuple(extra), self.tips, self.open_tips)


def validate_bundle(d: DigraphBundle) -> ValidationReport:
    """Report every violated bundle invariant; never raises."""
    rep = ValidationReport()
    seen: dict[str, str] = {}
    for v in d.vertices:
        if v.id in seen:
            rep.add("duplicate id", v.id)
        seen[v.id] = "vertex"
    for a in d.arcs:
        if a.id in seen:
            rep.add("duplicate id", a.id)
        seen[a.id] = "arc"
    zero = {v.id for v in d.vertices if v.rank == finite(0)}
    for a in sorted(d.arcs, key=lambda a: a.id):
        for end in (a.tail, a.head):
            # template cells are anonymous 0-vertices
            if end not in zero and "@" not in end:
                rep.add("arc endpoint not a 0-vertex", a.id, end)

    for v in sorted(d.vertices, key=lambda v: v.id):
        if v.rank > d.rank:
            rep.add("vertex rank exceeds bundle rank", v.id, detail=str(v.rank))
        if v.rank.kind == "arrow" or v.rank == finite(-1):
            rep.add("illegal vertex rank", v.id, detail=str(v.rank))
            continue
        if v.rank == finite(0):
            if v.members:
                rep.add("non-pristine member rank", v.id, detail="0-vertices hold no ditips")
            continue
        if not v.members:
            rep.add("empty vertex", v.id)

    tip_rank: dict[str, RankTag] = {}
    tip_by_ref: dict[TipRef, str] = {}
    for r, ts in d.tips.items():
        for t in ts:
            tip_rank[t.id] = r
            for m in t.members:
                tip_by_ref[TipRef(t.direction, m)] = t.id

    owner: dict[str, str] = {}
    for v in sorted(d.vertices, key=lambda v: v.id):
        if v.rank == finite(0) or v.rank.kind == "arrow":
            continue
        want = v.rank.below()
        for m in sorted(v.members, key=str):
            tid = tip_by_ref.get(m)
            if tid is None:
                rep.add("unknown member tip", v.id, str(m))
                continue
            if tip_rank[tid] != want:
                rep.add("non-pristine member rank", v.id, str(m),
                        detail=f"tip rank {tip_rank[tid]}, expected {want}")
            if tid in owner and owner[tid] != v.id:
                rep.add("partition overlap", tid, owner[tid], v.id)
            owner[tid] = v.id

    present_levels = {v.rank for v in d.vertices}
    for r, ts in sorted(d.tips.items()):
        try:
            up = r.above()
        except ValueError:
            continue
        if up > d.rank:
            continue
        for t in sorted(ts, key=lambda t: t.id):
            if t.id not in owner and t.id not in d.open_tips:
                rep.add("partition incomplete", t.id, detail=f"no {up}-vertex contains it")

    if d.rank.is_finite:
        for n in range(1, d.rank.n + 1):
            if finite(n) not in present_levels:
                rep.add("missing level", f"V{n}")
    elif d.rank == OMEGA and OMEGA not in present_levels:
        rep.add("missing level", "Vomega")
    return rep
