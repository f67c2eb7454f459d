import pytest

from transdigraph.model import Direction, finite
from transdigraph.present import (
    CellTemplate, MalformedPresentation, ModeMismatch, PeriodicRef, TemplateArc,
    WalkPresentation, compute_ditips, eventual_oracle, eventually_identical, normalize,
    subst, unfold,
)



def P(text):
    base, _, d = text.partition("@")
    return PeriodicRef(base, int(d or 0))


def out(pid, prefix, rep, anchor=0, rank=0):
    return WalkPresentation(pid, finite(rank), "out", tuple(prefix), tuple(map(P, rep)), anchor)


def test_subst():
    assert subst("v[j+1]", "j", 3) == "v[4]"
    assert subst("OR[j].x@0", "j", 2) == "OR[2].x@0"
    assert subst("v[j-1]", "j", 0) is None


def test_normalize_rotates_to_minimum():
    p = out("p", [], ["b", "c", "a"])
    assert [r.base for r in normalize(p).repetend] == ["a", "b", "c"]


def test_normalize_absorbs_full_copy():
    p = out("p", ["a[0]", "b[0]", "c[0]"], ["a", "b", "c"], anchor=1)
    n = normalize(p)
    assert n.prefix == ()
    assert n == normalize(out("p", [], ["a", "b", "c"], anchor=0))


def test_ray_presentations_with_different_prefixes_agree():
    # the same ray entered two cells later
    a = out("a", ["h", "e", "R.x@0"], ["R.e@0", "R.x@1"])
    b = out("b", ["g", "f", "R.x@2"], ["R.e@2", "R.x@3"])
    assert normalize(a).repetend == normalize(b).repetend
    assert eventually_identical(a, b)
    assert eventual_oracle(a.unfold(20), b.unfold(20), 8)


def test_eventual_identity_examples():
    p = out("p", ["x"], ["a", "b"])
    assert eventually_identical(p, p)
    assert eventually_identical(p, out("q", ["y", "z", "w"], ["a", "b"]))
    r = out("r", ["x"], ["c", "d"])
    assert not eventually_identical(p, r)
    assert not eventual_oracle(p.unfold(50), r.unfold(50), 10)


def test_mode_mismatch():
    p = out("p", ["x"], ["a"])
    q = WalkPresentation("q", finite(0), "in", ("x",), (P("a"),))
    with pytest.raises(ModeMismatch):
        eventually_identical(p, q)
    with pytest.raises(ModeMismatch):
        eventually_identical(p, out("r", ["x"], ["a"], rank=1))


def test_empty_repetend_is_malformed():
    with pytest.raises(MalformedPresentation):
        normalize(WalkPresentation("p", finite(0), "out", ("x",), ()))


def test_compute_ditips_groups_classes():
    ps = [out("p", ["x"], ["a", "b"]), out("q", ["y"], ["a", "b"], anchor=3), out("r", ["z"], ["c"])]
    tips = compute_ditips(ps, finite(0))
    assert sorted(len(t.members) for t in tips) == [1, 2]
    assert {t.id for t in tips} == {"out:p", "out:r"}
    assert compute_ditips([], finite(0)) == []


def test_fig1_one_intip_one_outtip_per_ray(fig1):
    tips = fig1.tips(finite(0))
    ins = [t for t in tips if t.direction is Direction.IN]
    outs = [t for t in tips if t.direction is Direction.OUT]
    assert len(ins) == len(outs) == 8
    for j in range(8):
        assert sum(f"in_ray[{j}]" in t.members for t in ins) == 1
        assert sum(f"out_ray[{j}]" in t.members for t in outs) == 1


LADDER = CellTemplate("L", ("x", "y"), (
    TemplateArc("r", "x", 0, "y", 0), TemplateArc("s", "x", 0, "x", 1), TemplateArc("t", "y", 1, "y", 0)))


def test_unfold_template():
    assert unfold(LADDER, 0).vertices == [] and unfold(LADDER, 0).arcs == []
    u = unfold(LADDER, 3)
    assert len(u.vertices) == 6
    # 3 rungs, 2 steps along each of the two rails
    assert len(u.arcs) == 3 + 2 + 2
    assert set(unfold(LADDER, 2).arcs) <= set(u.arcs)


def test_unfold_presentation_grows_by_repetend():
    p = out("p", ["x", "e"], ["a", "b", "c"])
    lens = [len(unfold(p, n).elements) for n in range(5)]
    assert all(b - a == 3 for a, b in zip(lens, lens[1:]))
    assert unfold(p, 2).elements == unfold(p, 3).elements[:len(unfold(p, 2).elements)]


def test_template_check_rejects_bad_offsets():
    with pytest.raises(MalformedPresentation):
        CellTemplate("T", ("x",), (TemplateArc("e", "x", 0, "x", 2),)).check()
    with pytest.raises(MalformedPresentation):
        CellTemplate("T", ("x",), (TemplateArc("e", "x", 0, "y", 1),)).check()


def test_structure_resolves_family_members(fig1):
    v = fig1.vertex("v1[731]")
    assert {str(m) for m in v.members} == {"in:in_ray[731]", "out:out_ray[730]"}
    assert fig1.vertex("v1[0]").members and len(fig1.vertex("v1[0]").members) == 1
    assert fig1.vertex("OR[4].x@9").rank == finite(0)
    a = fig1.arc("OR[2].e@5")
    assert (a.tail, a.head) == ("OR[2].x@5", "OR[2].x@6")
