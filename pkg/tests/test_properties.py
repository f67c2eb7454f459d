import itertools

import networkx as nx
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from transdigraph.connect import Connectivity, components
from transdigraph.periodic import PeriodicGraph, unfold_reach
from transdigraph.walk import TransfiniteError, validate_diwalk, validate_semiwalk

from strategies import digraph_structure, random_digraph, random_presented, random_template

FAST = settings(max_examples=200, deadline=None, suppress_health_check=list(HealthCheck))
SLOW = settings(max_examples=30, deadline=None, suppress_health_check=list(HealthCheck))


@st.composite
def digraph_and_walk(draw):
    vs, arcs = random_digraph(draw(st.randoms(use_true_random=False)), max_v=6, max_a=10)
    cur = draw(st.sampled_from(vs))
    els = [cur]
    for _ in range(draw(st.integers(0, 6))):
        # any incident arc, either way round
        options = [(a, h if t == cur else t) for a, t, h in arcs if cur in (t, h)]
        if not options:
            break
        a, cur = draw(st.sampled_from(options))
        els += [a, cur]
    return vs, arcs, els


@FAST
@given(digraph_and_walk())
def test_semiwalks_follow_incidence_and_diwalks_are_semiwalks(case):
    vs, arcs, els = case
    s = digraph_structure(vs, arcs)
    validate_semiwalk(els, 0, s)
    try:
        validate_diwalk(els, 0, s)
    except TransfiniteError:
        return
    forward = {a: (t, h) for a, t, h in arcs}
    assert all(forward[els[i]] == (els[i - 1], els[i + 1]) for i in range(1, len(els), 2))


@FAST
@given(st.randoms(use_true_random=False))
def test_components_partition_and_refine(rng):
    vs, arcs = random_digraph(rng)
    s = digraph_structure(vs, arcs)
    conn = Connectivity(s, 0)
    strong = components(s, 0, "strong", conn=conn).components
    weak = components(s, 0, "weak", conn=conn).components
    for comps in (strong, weak):
        assert sorted(v for c in comps for v in c) == sorted(vs)
    for c in strong:
        assert any(c <= w for w in weak)
    for u, v in itertools.combinations(vs, 2):
        if conn.reach(u, v) and conn.reach(v, u):
            assert any({u, v} <= c for c in strong)


@FAST
@given(st.randoms(use_true_random=False))
def test_unilateral_components_are_pairwise_one_way(rng):
    vs, arcs = random_digraph(rng, max_v=7, max_a=12)
    s = digraph_structure(vs, arcs)
    conn = Connectivity(s, 0)
    g = nx.MultiDiGraph()
    g.add_nodes_from(vs)
    g.add_edges_from((t, h) for _, t, h in arcs)
    for c in components(s, 0, "unilateral", conn=conn).components:
        for u, v in itertools.combinations(sorted(c), 2):
            assert nx.has_path(g, u, v) or nx.has_path(g, v, u)


@FAST
@given(st.randoms(use_true_random=False))
def test_periodic_reach_matches_unfolding(rng):
    g = PeriodicGraph.from_template(random_template(rng, max_nodes=3, max_arcs=5))
    for a, b in itertools.product(g.nodes, repeat=2):
        for ca, cb in itertools.product(range(4), repeat=2):
            assert g.reach((a, ca), (b, cb)) == unfold_reach(g, (a, ca), (b, cb), 30)


@SLOW
@given(st.randoms(use_true_random=False))
def test_rank_monotonicity(rng):
    s = random_presented(rng, window=4)
    for kind in ("strong", "weak", "unilateral"):
        prev = None
        for r in range(s.rank.n + 1):
            cur = components(s, r, kind).components
            if prev is not None:
                for c in prev:
                    assert any(c <= d for d in cur)
            prev = cur
