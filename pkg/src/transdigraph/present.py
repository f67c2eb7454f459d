"""Finite presentations of infinite structure.

A cell template is a finite pattern instantiated at every cell index in N.
A walk presentation is a finite prefix plus a repetend that advances one
cell (or one family index) per period, so it denotes a one-ended or
endless sequence of ids.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .model import Direction, Ditip, RankTag, TransfiniteError


class MalformedPresentation(TransfiniteError):
    code = "malformed-presentation"


class ModeMismatch(TransfiniteError):
    code = "mode-mismatch"


MODES = ("in", "out", "endless", "finite")


# -- index substitution ------------------------------------------------------

_VAR_RE = r"\[\s*{var}\s*(?:([+-])\s*(\d+))?\s*\]"


def subst(text: str, var: str | None, j: int) -> str | None:
    """Replace ``[var+c]`` by ``[j+c]``; ``None`` if any index goes negative."""
    if var is None:
        return text
    bad = False

    def repl(m: re.Match) -> str:
        nonlocal bad
        c = int(m.group(2) or 0) * (-1 if m.group(1) == "-" else 1)
        if j + c < 0:
            bad = True
        return f"[{j + c}]"

    out = re.sub(_VAR_RE.format(var=re.escape(var)), repl, text)
    return None if bad else out


def var_offsets(text: str, var: str) -> list[int]:
    return [
        int(m.group(2) or 0) * (-1 if m.group(1) == "-" else 1)
        for m in re.finditer(_VAR_RE.format(var=re.escape(var)), text)
    ]


# -- cell templates -----------------------------------------------------------

@dataclass(frozen=True)
class TemplateArc:
    id: str
    tail: str
    dt: int
    head: str
    dh: int


@dataclass(frozen=True)
class CellTemplate:
    id: str
    nodes: tuple[str, ...]
    arcs: tuple[TemplateArc, ...]

    def check(self) -> None:
        ids = list(self.nodes) + [a.id for a in self.arcs]
        if len(set(ids)) != len(ids):
            raise MalformedPresentation(f"template {self.id}: duplicate ids")
        for a in self.arcs:
            if a.tail not in self.nodes or a.head not in self.nodes:
                raise MalformedPresentation(f"template {self.id}: arc {a.id} uses an undeclared node")
            if a.dt not in (-1, 0, 1) or a.dh not in (-1, 0, 1):
                raise MalformedPresentation(f"template {self.id}: offsets must lie in -1..1")

    def arc(self, aid: str) -> TemplateArc:
        for a in self.arcs:
            if a.id == aid:
                return a
        raise KeyError(aid)


@dataclass(frozen=True)
class TemplateUse:
    """A named instance of a template; with ``index`` set it is a family ``name[j]``."""

    name: str
    template: str
    index: str | None = None

    def instance_names(self, window: int) -> list[str]:
        if self.index is None:
            return [self.name]
        return [f"{self.name}[{j}]" for j in range(window)]


def cell_id(inst: str, item: str, cell: int) -> str:
    return f"{inst}.{item}@{cell}"


_CELL_RE = re.compile(r"^(?P<inst>.+)\.(?P<item>[^.@]+)@(?P<cell>-?\d+)$")


def parse_cell_id(ident: str) -> tuple[str, str, int] | None:
    m = _CELL_RE.match(ident)
    if not m:
        return None
    return m.group("inst"), m.group("item"), int(m.group("cell"))


@dataclass
class Unfolding:
    vertices: list[str] = field(default_factory=list)
    arcs: list[tuple[str, str, str]] = field(default_factory=list)
    elements: list[str] = field(default_factory=list)


def unfold_template(t: CellTemplate, depth: int, inst: str | None = None) -> Unfolding:
    """Materialise cells ``0..depth-1``; arcs leaving that range are dropped."""
    inst = inst or t.id
    out = Unfolding()
    for c in range(depth):
        for n in t.nodes:
            out.vertices.append(cell_id(inst, n, c))
    for k in range(depth + 1):
        for a in t.arcs:
            ct, ch = k + a.dt, k + a.dh
            if 0 <= ct < depth and 0 <= ch < depth:
                out.arcs.append((cell_id(inst, a.id, k), cell_id(inst, a.tail, ct), cell_id(inst, a.head, ch)))
    return out


# -- walk presentations -----------------------------------------------------------

@dataclass(frozen=True)
class PeriodicRef:
    """One repetend entry: ``base`` instantiated at period index plus ``d``.

    Bases containing a dot are template items (``R.x`` gives ``R.x@5``);
    other bases are families (``v`` gives ``v[5]``).
    """

    base: str
    d: int = 0

    def at(self, idx: int) -> str:
        if "." in self.base:
            return f"{self.base}@{idx}"
        return f"{self.base}[{idx}]"

    def __str__(self) -> str:
        return f"{self.base}@{self.d:+d}" if self.d else self.base


@dataclass(frozen=True)
class Tail:
    """An infinite periodic run written in away-from-the-finite-part order.

    Element ``n`` is ``word[n % L]`` at index ``anchor + n // L + word[n % L].d``.
    """

    word: tuple[PeriodicRef, ...]
    anchor: int

    def element(self, n: int) -> str:
        L = len(self.word)
        r = self.word[n % L]
        return r.at(self.anchor + n // L + r.d)

    def index_of(self, n: int) -> int:
        L = len(self.word)
        return self.anchor + n // L + self.word[n % L].d

    def take(self, n: int) -> list[str]:
        return [self.element(i) for i in range(n)]

    def step_back(self) -> Tail:
        last = self.word[-1]
        return Tail((PeriodicRef(last.base, last.d - 1),) + self.word[:-1], self.anchor)

    def rotate(self, r: int) -> tuple[list[str], Tail]:
        """Advance the start by ``r`` elements, returning the emitted ones."""
        emitted = self.take(r)
        w = self.word[r:] + tuple(PeriodicRef(x.base, x.d + 1) for x in self.word[:r])
        return emitted, Tail(w, self.anchor)

    def rebased(self) -> Tail:
        d0 = self.word[0].d
        return Tail(tuple(PeriodicRef(x.base, x.d - d0) for x in self.word), self.anchor + d0)

    def key(self) -> tuple:
        d0 = self.word[0].d
        return tuple((x.base, x.d - d0) for x in self.word)

    def injective(self) -> bool:
        bases = [x.base for x in self.word]
        return len(set(bases)) == len(bases)


@dataclass(frozen=True)
class WalkPresentation:
    """Prefix plus repetend(s), written in walk (left-to-right) order.

    ``mode`` is ``in`` (infinite to the left, terminating on the right),
    ``out`` (terminating on the left, infinite to the right), ``endless``
    (uses ``left``/``left_anchor`` and ``repetend``/``anchor``), or
    ``finite`` (prefix only).
    """

    id: str
    rank: RankTag
    mode: str
    prefix: tuple[str, ...] = ()
    repetend: tuple[PeriodicRef, ...] = ()
    anchor: int = 0
    left: tuple[PeriodicRef, ...] = ()
    left_anchor: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise MalformedPresentation(f"{self.id}: unknown mode {self.mode!r}")

    def check(self) -> None:
        if self.mode in ("in", "out", "endless") and not self.repetend:
            raise MalformedPresentation(f"{self.id}: empty repetend in mode {self.mode}")
        if self.mode == "endless" and not self.left:
            raise MalformedPresentation(f"{self.id}: endless presentation needs a left repetend")
        if self.mode == "finite" and (self.repetend or self.left):
            raise MalformedPresentation(f"{self.id}: finite presentation with a repetend")
        if self.mode == "finite" and not self.prefix:
            raise MalformedPresentation(f"{self.id}: empty finite walk")

    # away-order views
    def left_tail(self) -> Tail | None:
        if self.mode == "in":
            return Tail(tuple(reversed(self.repetend)), self.anchor)
        if self.mode == "endless":
            return Tail(tuple(reversed(self.left)), self.left_anchor)
        return None

    def right_tail(self) -> Tail | None:
        if self.mode in ("out", "endless"):
            return Tail(self.repetend, self.anchor)
        return None

    def tail(self, direction: Direction) -> Tail | None:
        return self.left_tail() if direction is Direction.IN else self.right_tail()

    @property
    def terminates_left(self) -> bool:
        return self.mode in ("out", "finite")

    @property
    def terminates_right(self) -> bool:
        return self.mode in ("in", "finite")

    def unfold(self, periods: int) -> list[str]:
        """Walk-order elements with ``periods`` copies of each repetend."""
        self.check()
        seq = list(self.prefix)
        lt, rt = self.left_tail(), self.right_tail()
        if lt is not None:
            seq = list(reversed(lt.take(periods * len(lt.word)))) + seq
        if rt is not None:
            seq = seq + rt.take(periods * len(rt.word))
        return seq


def _canonical_side(near: list[str], tail: Tail) -> tuple[list[str], Tail]:
    near = list(near)
    while near and tail.index_of(-1) >= 0 and near[-1] == tail.element(-1):
        near.pop()
        tail = tail.step_back()
    L = len(tail.word)
    best = min(range(L), key=lambda r: (tail.rotate(r)[1].key(), r))
    emitted, tail = tail.rotate(best)
    return near + emitted, tail.rebased()


def normalize(p: WalkPresentation) -> WalkPresentation:
    """Canonical form: minimal rotation, shortest unabsorbed prefix.

    Presentations denoting the same walk normalise to equal values, ids aside.
    """
    p.check()
    if p.mode == "finite":
        return p
    prefix = list(p.prefix)
    left, left_anchor, rep, anchor = (), 0, (), 0
    if p.mode in ("out", "endless"):
        near, t = _canonical_side(prefix, p.right_tail())
        prefix, rep, anchor = near, t.word, t.anchor
    if p.mode in ("in", "endless"):
        near, t = _canonical_side(list(reversed(prefix)), p.left_tail())
        prefix = list(reversed(near))
        if p.mode == "in":
            rep, anchor = tuple(reversed(t.word)), t.anchor
        else:
            left, left_anchor = tuple(reversed(t.word)), t.anchor
    return replace(p, prefix=tuple(prefix), repetend=rep, anchor=anchor, left=left, left_anchor=left_anchor)


def tail_key(p: WalkPresentation, direction: Direction) -> tuple | None:
    """Hashable eventual-identity key of one side, or ``None`` if that side is finite."""
    t = p.tail(direction)
    if t is None:
        return None
    _, t = _canonical_side([], t)
    return (p.rank, direction.value, t.key())


def eventually_identical(p: WalkPresentation, q: WalkPresentation) -> bool:
    if p.rank != q.rank or p.mode != q.mode:
        raise ModeMismatch(f"{p.id} ({p.mode}, rank {p.rank}) vs {q.id} ({q.mode}, rank {q.rank})")
    if p.mode == "finite":
        raise ModeMismatch("finite presentations have no tails")
    sides = {"in": [Direction.IN], "out": [Direction.OUT], "endless": [Direction.IN, Direction.OUT]}[p.mode]
    return all(tail_key(p, s) == tail_key(q, s) for s in sides)


def is_extended(p: WalkPresentation, direction: Direction) -> bool:
    """Elements on that side are eventually distinct (structural check on the repetend)."""
    t = p.tail(direction)
    return t is not None and t.injective()


@dataclass(frozen=True)
class StubPresentation:
    """A one-ended extended walk known only by its role (rank templates use these)."""

    id: str
    rank: RankTag
    mode: str
    terminal: str

    def tail(self, direction: Direction):
        return None


def stub_key(s: StubPresentation, direction: Direction) -> tuple | None:
    if (s.mode == "out") == (direction is Direction.OUT):
        return (s.rank, direction.value, ("stub", s.id))
    return None


def presentation_key(p, direction: Direction) -> tuple | None:
    if hasattr(p, "side_key"):
        return p.side_key(direction)
    if isinstance(p, StubPresentation):
        return stub_key(p, direction)
    if not is_extended(p, direction):
        return None
    return tail_key(p, direction)


def compute_ditips(presentations: Iterable, rank: RankTag) -> list[Ditip]:
    """Group the declared extended presentations of ``rank`` into ditips.

    Each class of eventually identical tails becomes one ditip whose id is
    ``in:``/``out:`` followed by its smallest member id.
    """
    classes: dict[tuple, set[str]] = {}
    for p in presentations:
        if p.rank != rank:
            continue
        for direction in (Direction.IN, Direction.OUT):
            k = presentation_key(p, direction)
            if k is not None:
                classes.setdefault(k, set()).add(p.id)
    tips = []
    for k, members in classes.items():
        direction = Direction(k[1])
        tips.append(Ditip(f"{direction.value}:{min(members)}", direction, rank, frozenset(members)))
    return sorted(tips, key=lambda t: t.id)


def unfold(p, depth: int) -> Unfolding:
    """Bounded unfolding of a template (``depth`` cells) or presentation (``depth`` periods)."""
    if isinstance(p, CellTemplate):
        return unfold_template(p, depth)
    out = Unfolding()
    out.elements = p.unfold(depth)
    return out


def eventual_oracle(a: Sequence[str], b: Sequence[str], bound: int) -> bool:
    """Brute force: do ``a`` and ``b`` share a common suffix after dropping <= ``bound`` items?

    Both sequences are finite unfoldings in away order; the caller picks
    lengths long enough that every candidate alignment is checked on at least
    ``bound`` elements.
    """
    for i in range(bound + 1):
        for j in range(bound + 1):
            n = min(len(a) - i, len(b) - j)
            if n >= bound and list(a[i:i + n]) == list(b[j:j + n]):
                return True
    return False
