import itertools

import pytest

from transdigraph.model import (
    ARROW, OMEGA, Arc, DigraphBundle, Direction, Ditip, RankTag, TipRef, Vertex, finite,
    join_index, rank_compare, split_index, validate_bundle,
)

SAMPLE = [finite(n) for n in (-1, 0, 1, 2, 7, 1_000_000)] + [ARROW, OMEGA]


def test_rank_compare_examples():
    assert rank_compare(finite(3), finite(3)) == "equal"
    assert rank_compare(finite(1_000_000), ARROW) == "less"
    assert rank_compare(ARROW, OMEGA) == "less"
    assert rank_compare(OMEGA, finite(0)) == "greater"


def test_rank_order_is_total():
    for a, b in itertools.product(SAMPLE, repeat=2):
        ab, ba = rank_compare(a, b), rank_compare(b, a)
        assert {ab, ba} in ({"equal"}, {"less", "greater"})
        assert (ab == "equal") == (a == b)
    for a, b, c in itertools.product(SAMPLE, repeat=3):
        if a < b and b < c:
            assert a < c


def test_rank_parse_and_steps():
    assert RankTag.parse("arrow") == ARROW
    assert RankTag.parse("omega") == OMEGA
    assert RankTag.parse(2) == finite(2)
    assert OMEGA.below() == ARROW and ARROW.above() == OMEGA
    assert finite(0).below() == finite(-1)
    assert str(ARROW) == "arrow" and str(finite(4)) == "4"
    with pytest.raises(ValueError):
        RankTag.parse(-2)


def test_tipref_round_trip():
    t = TipRef.parse("in:W[3]")
    assert t.direction is Direction.IN and t.rep == "W[3]"
    assert str(t) == "in:W[3]"
    with pytest.raises(ValueError):
        TipRef.parse("sideways:x")


def test_split_and_join_index():
    assert split_index("R[2].x@5") == ("R[].x@5", 2)
    assert join_index("R[].x@5", 7) == "R[7].x@5"
    assert split_index("plain") is None


def _two_vertices():
    return DigraphBundle(finite(0), (Arc("a", "u", "v"),), (Vertex("u", finite(0)), Vertex("v", finite(0))))


def test_minimal_bundle_ok():
    rep = validate_bundle(_two_vertices())
    assert rep.ok and rep.violations == []


def test_self_loop_and_parallel_arcs_ok():
    d = DigraphBundle(finite(0), (Arc("a", "u", "u"), Arc("b", "u", "v"), Arc("c", "u", "v")),
                      (Vertex("u", finite(0)), Vertex("v", finite(0))))
    assert validate_bundle(d).ok


def _tips():
    return {finite(0): (Ditip("out:P", Direction.OUT, finite(0), frozenset({"P"})),
                        Ditip("in:Q", Direction.IN, finite(0), frozenset({"Q"})))}


def test_non_pristine_member_rank():
    d = DigraphBundle(finite(2), (), (
        Vertex("u", finite(0)),
        Vertex("x", finite(1), frozenset({TipRef.parse("in:Q")})),
        Vertex("y", finite(2), frozenset({TipRef.parse("out:P")})),
    ), _tips())
    assert "non-pristine member rank" in validate_bundle(d).kinds()


def test_partition_incomplete():
    d = DigraphBundle(finite(1), (), (
        Vertex("u", finite(0)), Vertex("x", finite(1), frozenset({TipRef.parse("out:P")})),
    ), _tips())
    rep = validate_bundle(d)
    assert rep.kinds() == {"partition incomplete"}
    assert rep.violations[0].ids == ("in:Q",)


def test_partition_overlap_and_empty_vertex():
    both = frozenset({TipRef.parse("out:P"), TipRef.parse("in:Q")})
    d = DigraphBundle(finite(1), (), (
        Vertex("x", finite(1), both), Vertex("y", finite(1), frozenset({TipRef.parse("in:Q")})),
        Vertex("z", finite(1)),
    ), _tips())
    kinds = validate_bundle(d).kinds()
    assert "partition overlap" in kinds and "empty vertex" in kinds


def test_bad_arc_and_duplicates():
    d = DigraphBundle(finite(0), (Arc("a", "u", "nowhere"), Arc("u", "u", "u")), (Vertex("u", finite(0)),))
    kinds = validate_bundle(d).kinds()
    assert "arc endpoint not a 0-vertex" in kinds and "duplicate id" in kinds


def test_missing_level_and_rank_overflow():
    d = DigraphBundle(finite(2), (), (Vertex("u", finite(0)),))
    rep = validate_bundle(d)
    assert rep.kinds() == {"missing level"} and len(rep.violations) == 2
    d = DigraphBundle(finite(0), (), (Vertex("x", finite(1), frozenset({TipRef.parse("out:P")})),), _tips())
    assert "vertex rank exceeds bundle rank" in validate_bundle(d).kinds()


def test_validation_is_idempotent():
    d = DigraphBundle(finite(2), (), (Vertex("u", finite(0)),))
    assert validate_bundle(d).as_dict() == validate_bundle(d).as_dict()
