import pytest

from transdigraph.elevate import (
    EmptyTipSet, NotAPartition, PartitionSpec, check_pristine, elevate, partition_tips,
    partition_undirected, underlying_graph,
)
from transdigraph.model import (
    Arc, DigraphBundle, Direction, Ditip, TipRef, Vertex, finite, validate_bundle,
)

from conftest import EXAMPLES, structure

S1 = Ditip("out:s1", Direction.OUT, finite(0), frozenset({"s1"}))
T1 = Ditip("in:t1", Direction.IN, finite(0), frozenset({"t1"}))


def test_partition_tips():
    one = partition_tips([S1, T1], PartitionSpec(finite(0), {"x": frozenset({"out:s1", "in:t1"})}))
    assert len(one) == 1 and one[0].rank == finite(1) and len(one[0].members) == 2
    two = partition_tips([S1, T1], PartitionSpec.discrete([S1, T1], finite(0)))
    assert len(two) == 2


def test_partition_errors():
    with pytest.raises(NotAPartition) as e:
        partition_tips([S1, T1], PartitionSpec(finite(0), {"x": frozenset({"out:s1", "in:zz"})}))
    assert e.value.unknown == ("in:zz",) and e.value.missing == ("in:t1",)
    with pytest.raises(NotAPartition) as e:
        partition_tips([S1, T1], PartitionSpec(finite(0), {
            "x": frozenset({"out:s1", "in:t1"}), "y": frozenset({"in:t1"})}))
    assert e.value.doubled == ("in:t1",)
    with pytest.raises(EmptyTipSet):
        partition_tips([], PartitionSpec(finite(0), {}))


def _ladder(window):
    text = (EXAMPLES / "fig1.tdg").read_text()
    head, _, _ = text.partition("partition rank 0")
    return structure(None, window, head.replace("digraph fig1 rank 1", "digraph fig1 rank 0"))


def test_pairing_partition_rebuilds_fig1():
    ladder = _ladder(8)
    d0 = ladder.bundle()
    assert validate_bundle(d0).ok
    cells = {f"v1[{j}]": frozenset({f"in:W[{j}]"} | ({f"out:W[{j - 1}]"} if j else set()))
             for j in range(8)}
    cells["v1[8]"] = frozenset({"out:W[7]"})
    d1 = elevate(d0, PartitionSpec(finite(0), cells))
    assert d1.rank == finite(1) and validate_bundle(d1).ok
    assert len(d1.levels()) == len(d0.levels()) + 1
    fig = structure("fig1.tdg", window=8).bundle()
    for v in fig.level(finite(1)):
        assert {tip_id(d0, m) for m in v.members} == {str(m) for m in d1.vertex(v.id).members}
    assert d0.vertices == ladder.bundle().vertices


def tip_id(d, ref):
    for t in d.tips[finite(0)]:
        if t.direction == ref.direction and ref.rep in t.members:
            return t.id
    raise KeyError(ref)


def test_rank_two_quadruple(fig1):
    d1 = fig1.bundle()
    tips1 = d1.tips[finite(1)]
    assert [t.id for t in tips1] == ["out:W1"]
    d2 = elevate(d1, PartitionSpec.indiscrete(tips1, finite(1), "top"))
    assert d2.rank == finite(2) and validate_bundle(d2).ok
    assert d2.levels() == [finite(0), finite(1), finite(2)]


def test_elevate_without_tips():
    d = structure("chain.tdg").bundle()
    with pytest.raises(EmptyTipSet):
        elevate(d, PartitionSpec(finite(0), {"x": frozenset({"in:a"})}))


def test_underlying_graph():
    d = DigraphBundle(finite(0), (Arc("a", "u", "v"), Arc("b", "v", "u"), Arc("c", "u", "u")),
                      (Vertex("u", finite(0)), Vertex("v", finite(0))))
    g = underlying_graph(d)
    assert len(g.branches) == 3
    assert g.branches[0][1] == g.branches[1][1] == frozenset({"u", "v"})
    assert g.branches[2][1] == frozenset({"u"})


def test_underlying_fig1_counts(fig1):
    d = fig1.bundle()
    g = underlying_graph(d)
    assert g.counts() == {r: len(d.level(r)) for r in d.levels()}
    assert len(g.branches) == len(d.arcs)


def test_underlying_commutes_with_elevation():
    d0 = _ladder(5).bundle()
    spec = PartitionSpec.discrete(d0.tips[finite(0)], finite(0))
    lhs = underlying_graph(elevate(d0, spec))
    rhs = partition_undirected(underlying_graph(d0), d0, spec)
    assert lhs == rhs


def test_check_pristine(fig1):
    d = fig1.bundle()
    d2 = elevate(d, PartitionSpec.indiscrete(d.tips[finite(1)], finite(1), "top"))
    assert check_pristine(d2).ok
    mixed = d.with_vertices([Vertex("bad", finite(2), frozenset({TipRef.parse("out:W1"),
                                                                   TipRef.parse("in:W[3]")}))], finite(2))
    assert "non-pristine member rank" in check_pristine(mixed).kinds()
    hug = d.with_vertices([Vertex("hug", finite(2), frozenset({TipRef.parse("out:v1[2]")}))], finite(2))
    assert "embraced vertex" in check_pristine(hug).kinds()
    arcs_only = DigraphBundle(finite(0), (Arc("a", "u", "v"),), (Vertex("u", finite(0)), Vertex("v", finite(0))))
    assert check_pristine(arcs_only).ok
