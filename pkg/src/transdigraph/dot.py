"""Deterministic Graphviz output."""

from __future__ import annotations

from .document import Structure
from .present import parse_cell_id


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(s: Structure) -> str:
    """Arcs as solid edges, vertices grouped by rank, tip membership as dashed edges.

    Template cells are unfolded up to the structure's window.
    """
    b = s.bundle()
    arcs = {a.id: a for a in b.arcs}
    for use in s.doc.uses:
        insts = [use.name] if use.index is None else [f"{use.name}[{j}]" for j in range(s.window)]
        t = s.templates[use.template]
        for inst in insts:
            for ta in t.arcs:
                for k in range(s.window):
                    a = s.arc(f"{inst}.{ta.id}@{k}")
                    if a is not None:
                        arcs[a.id] = a
    zero = sorted({v.id for v in b.vertices if v.rank.is_finite and v.rank.n == 0}
                  | {e for a in arcs.values() for e in (a.tail, a.head)})
    lines = [f"digraph {_q(s.doc.name)} {{", '  node [shape=circle];', "  subgraph cluster_rank_0 {",
             '    label="rank 0";']
    for v in zero:
        attrs = ' [label="", shape=point]' if parse_cell_id(v) else ""
        lines.append(f"    {_q(v)}{attrs};")
    lines.append("  }")
    for r in b.levels():
        if r.is_finite and r.n == 0:
            continue
        lines += [f"  subgraph cluster_rank_{r} {{", f'    label="rank {r}";']
        for v in b.level(r):
            lines.append(f"    {_q(v.id)} [label={_q(f'v^{r}_{v.id}')}, shape=box];")
        lines.append("  }")
    for a in sorted(arcs.values(), key=lambda a: a.id):
        lines.append(f"  {_q(a.tail)} -> {_q(a.head)} [label={_q(a.id)}];")
    tips = {}
    for ts in b.tips.values():
        for t in ts:
            for m in t.members:
                tips[(t.direction, m)] = t.id
    tip_nodes = set()
    for v in sorted(b.vertices, key=lambda v: v.id):
        for m in sorted(v.members, key=str):
            tid = tips.get((m.direction, m.rep), str(m))
            tip_nodes.add(tid)
            lines.append(f"  {_q(v.id)} -> {_q('tip ' + tid)} [style=dashed, arrowhead=none];")
    for tid in sorted(tip_nodes):
        lines.append(f"  {_q('tip ' + tid)} [label={_q(tid)}, shape=plaintext];")
    lines.append("}")
    return "\n".join(lines) + "\n"
