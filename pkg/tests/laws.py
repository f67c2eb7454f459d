"""Structural laws checked at 1000 random cases each.

Kept out of pytest collection; ``test_acceptance`` runs every law once.
"""

from dataclasses import replace

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from transdigraph.elevate import (
    PartitionSpec, check_pristine, elevate, partition_undirected, underlying_graph,
)
from transdigraph.model import finite, validate_bundle
from transdigraph.present import eventual_oracle, eventually_identical, normalize

from strategies import presentations, tipped_bundles

CASES = settings(max_examples=1000, deadline=None, suppress_health_check=list(HealthCheck))


@st.composite
def related(draw):
    """Three same-mode presentations; later ones often reuse an earlier repetend."""
    mode = draw(st.sampled_from(("in", "out")))
    ps = [draw(presentations(mode))]
    for _ in range(2):
        q = draw(presentations(mode))
        if draw(st.booleans()):
            src = draw(st.sampled_from(ps))
            q = replace(q, repetend=src.repetend, anchor=src.anchor + draw(st.integers(0, 2)))
        ps.append(q)
    return ps


def away(p, periods):
    seq = p.unfold(periods)
    return seq if p.mode == "out" else seq[::-1]


def oracle_bound(ps):
    # prefix, then enough whole periods to line up the anchors and shifts
    longest = max(len(p.repetend) for p in ps)
    shift = max(p.anchor for p in ps) + max(abs(r.d) for p in ps for r in p.repetend) + 2
    return max(len(p.prefix) for p in ps) + longest * shift


@CASES
@given(presentations())
def law_normalize_idempotent(p):
    n = normalize(p)
    assert normalize(n) == n
    assert eventually_identical(p, n)


@CASES
@given(related())
def law_eventual_identity_equivalence(ps):
    p, q, r = ps
    assert eventually_identical(p, p)
    assert eventually_identical(p, q) == eventually_identical(q, p)
    if eventually_identical(p, q) and eventually_identical(q, r):
        assert eventually_identical(p, r)
    bound = oracle_bound(ps)
    a, b = away(p, 3 * bound), away(q, 3 * bound)
    assert eventually_identical(p, q) == eventual_oracle(a, b, bound)


@CASES
@given(tipped_bundles())
def law_branches_match_arcs(case):
    d, _ = case
    g = underlying_graph(d)
    assert len(g.branches) == len(d.arcs)
    assert sorted(b for b, _ in g.branches) == sorted(a.id for a in d.arcs)


@CASES
@given(tipped_bundles())
def law_elevate_then_validate(case):
    d, cells = case
    up = elevate(d, PartitionSpec(finite(0), cells))
    assert validate_bundle(up).ok
    assert check_pristine(up).ok
    assert up.rank == finite(1)


@CASES
@given(tipped_bundles())
def law_underlying_commutes_with_elevation(case):
    d, cells = case
    spec = PartitionSpec(finite(0), cells)
    assert underlying_graph(elevate(d, spec)) == partition_undirected(underlying_graph(d), d, spec)


LAWS = {
    "underlying-graph commutation with elevation": law_underlying_commutes_with_elevation,
    "|branches| = |arcs|": law_branches_match_arcs,
    "elevate-then-validate ok": law_elevate_then_validate,
    "normalize idempotence": law_normalize_idempotent,
    "eventual-identity equivalence laws": law_eventual_identity_equivalence,
}
