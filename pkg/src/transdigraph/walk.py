"""Diwalks and semiwalks of every rank: validation, termination, incidence."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, Flag
from .document import Structure, UnknownId, side_owner
from .model import Direction, Ditip, RankTag, TipRef, TransfiniteError, finite
from .present import StubPresentation, WalkPresentation, presentation_key


class WalkError(TransfiniteError):
    code = "walk-error"


class NonConformingDirection(WalkError):
    code = "non-conforming-direction"


class BadIncidence(WalkError):
    code = "bad-incidence"


class RankBoundViolated(WalkError):
    code = "rank-bound-violated"


class DanglingTermination(WalkError):
    code = "dangling-termination"


class Termination(Enum):
    TWO_ENDED = "two-ended"
    # terminates on the left only, so it extends rightward
    ONE_ENDED_LEFT = "one-ended-left"
    # terminates on the right only
    ONE_ENDED_RIGHT = "one-ended-right"
    ENDLESS = "endless"


class Incidence(Flag):
    NONE = 0
    INWARD = 1
    OUTWARD = 2


@dataclass(frozen=True)
class Diwalk:
    rank: RankTag
    elements: tuple[str, ...]
    termination: Termination
    presentation: WalkPresentation | None = None
    directed: bool = True


STEP_RANK_ARC = finite(-1)


def _step(s: Structure, ident: str):
    a = s.arc(ident)
    if a is not None:
        return a, STEP_RANK_ARC
    p = s.presentation(ident)
    if p is not None:
        return p, p.rank
    return None, None


def _attaches(s: Structure, step, direction: Direction, vertex: str) -> bool:
    terminal, owner = side_owner(s, step, direction)
    return vertex in (terminal, owner)


def _termination(left: bool, right: bool) -> Termination:
    if left and right:
        return Termination.TWO_ENDED
    if left:
        return Termination.ONE_ENDED_LEFT
    if right:
        return Termination.ONE_ENDED_RIGHT
    return Termination.ENDLESS


def _check(elements, rank: RankTag, s: Structure, term_left: bool, term_right: bool, directed: bool) -> None:
    if not elements:
        raise BadIncidence("a walk needs at least one vertex")
    kinds = []
    for e in elements:
        if s.vertex(e) is not None:
            kinds.append("v")
        elif _step(s, e)[0] is not None:
            kinds.append("s")
        else:
            raise UnknownId(e)
    for i in range(1, len(kinds)):
        if kinds[i] == kinds[i - 1]:
            raise BadIncidence(f"elements {elements[i - 1]!r} and {elements[i]!r} do not alternate")
    if (term_left and kinds[0] != "v") or (term_right and kinds[-1] != "v"):
        raise DanglingTermination("a terminating walk must end at a vertex")
    if "v" not in kinds:
        raise BadIncidence("a walk needs at least one vertex")

    for e, k in zip(elements, kinds):
        if k == "v" and s.vertex(e).rank > rank:
            raise RankBoundViolated(f"vertex {e} has rank {s.vertex(e).rank} above walk rank {rank}")

    for i, (e, k) in enumerate(zip(elements, kinds)):
        if k != "s":
            continue
        step, gamma = _step(s, e)
        if rank.is_finite and (not gamma.is_finite or gamma.n > rank.n - 1):
            raise RankBoundViolated(f"step {e} of rank {gamma} inside a {rank}-walk")
        left = elements[i - 1] if i > 0 else None
        right = elements[i + 1] if i + 1 < len(elements) else None
        for flank in (left, right):
            if flank is not None:
                alpha = s.vertex(flank).rank
                if alpha.is_finite and gamma.is_finite and gamma.n < alpha.n - 1:
                    raise RankBoundViolated(
                        f"step {e} of rank {gamma} cannot reach {flank} of rank {alpha}")
        fwd = (left is None or _attaches(s, step, Direction.IN, left)) and \
              (right is None or _attaches(s, step, Direction.OUT, right))
        if fwd:
            continue
        back = (left is None or _attaches(s, step, Direction.OUT, left)) and \
               (right is None or _attaches(s, step, Direction.IN, right))
        if back:
            if directed:
                raise NonConformingDirection(f"step {e} points against the walk")
            continue
        raise BadIncidence(f"step {e} is not incident to its flanking vertices")


def validate_diwalk(walk, rank: RankTag | int, s: Structure, periods: int = 3) -> Diwalk:
    """Validate a finite element sequence or a walk presentation as a ``rank``-diwalk."""
    return _validate(walk, RankTag.parse(rank), s, periods, directed=True)


def validate_semiwalk(walk, rank: RankTag | int, s: Structure, periods: int = 3) -> Diwalk:
    """Like :func:`validate_diwalk` but steps may be traversed against their direction."""
    return _validate(walk, RankTag.parse(rank), s, periods, directed=False)


def _validate(walk, rank: RankTag, s: Structure, periods: int, directed: bool) -> Diwalk:
    if isinstance(walk, WalkPresentation):
        walk.check()
        els = tuple(walk.unfold(periods))
        tl, tr = walk.terminates_left, walk.terminates_right
        _check(els, rank, s, tl, tr, directed)
        return Diwalk(rank, els, _termination(tl, tr), walk, directed)
    els = tuple(walk)
    _check(els, rank, s, True, True, directed)
    return Diwalk(rank, els, Termination.TWO_ENDED, None, directed)


def classify_termination(w) -> Termination:
    if isinstance(w, Diwalk):
        return w.termination
    if isinstance(w, StubPresentation):
        return Termination.ONE_ENDED_LEFT if w.mode == "out" else Termination.ONE_ENDED_RIGHT
    return _termination(w.terminates_left, w.terminates_right)


def incidence(w: Diwalk, vertex: str, s: Structure) -> Incidence:
    """How ``w`` meets ``vertex``, seen from the arcs: inward at tails, outward at heads."""
    out = Incidence.NONE
    els = w.elements
    for i, e in enumerate(els):
        if s.vertex(e) is not None:
            continue
        if i > 0 and els[i - 1] == vertex:
            out |= Incidence.INWARD
        if i + 1 < len(els) and els[i + 1] == vertex:
            out |= Incidence.OUTWARD
    p = w.presentation
    if p is not None:
        if p.left_tail() is not None and side_owner(s, p, Direction.IN)[1] == vertex:
            out |= Incidence.INWARD
        if p.right_tail() is not None and side_owner(s, p, Direction.OUT)[1] == vertex:
            out |= Incidence.OUTWARD
    return out


def traverses(w, tip: Ditip, s: Structure) -> bool:
    """True iff ``w`` is eventually identical, on the tip's side, to a representative."""
    p = w.presentation if isinstance(w, Diwalk) else w
    if p is None:
        return False
    mine = presentation_key(p, tip.direction)
    if mine is None:
        return False
    return any(s.key_of(TipRef(tip.direction, m)) == mine for m in sorted(tip.members))
