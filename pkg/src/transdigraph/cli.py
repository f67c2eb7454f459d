"""Command line front end for ``.tdg`` files."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .connect import KINDS, Connectivity, components
from .document import Structure
from .elevate import underlying_graph
from .model import ARROW, OMEGA, RankTag, TransfiniteError, ValidationReport, validate_bundle
from .omega import arrow_ditips, assemble_arrow, elevate_to_omega
from .present import StubPresentation
from .syntax import parse_spec
from .walk import validate_diwalk

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE = 0, 1, 2


class UsageError(TransfiniteError):
    code = "usage"


def load(path: str, depth: int, extra: str = "") -> Structure:
    text = Path(path).read_text(encoding="utf-8")
    return Structure(parse_spec(text + ("\n" + extra if extra else "")), window=depth)


def _rank(text: str) -> RankTag:
    try:
        return RankTag.parse(int(text) if text.lstrip("-").isdigit() else text)
    except (ValueError, TypeError):
        raise UsageError(f"bad rank {text!r}")


# -- commands: each returns (result, text lines, exit code) -------------------------

def check_structure(s: Structure) -> ValidationReport:
    rep = validate_bundle(s.bundle())
    for p in s.listed_presentations + s.listed_walks:
        if isinstance(p, StubPresentation) or not p.rank.is_finite:
            continue
        try:
            validate_diwalk(p, p.rank, s)
        except TransfiniteError as e:
            rep.add("invalid walk", p.id, detail=f"{e.code}: {e}")
    if s.doc.arrow_templates or s.doc.arrow_walks:
        try:
            assemble_arrow(s)
        except TransfiniteError as e:
            rep.add("invalid arrow structure", detail=f"{e.code}: {e}")
    return rep


def cmd_validate(s: Structure, args):
    rep = check_structure(s)
    lines = ["ok"] if rep.ok else [
        f"{v.kind}: {', '.join(v.ids)}" + (f" ({v.detail})" if v.detail else "") for v in rep.violations]
    return rep.as_dict(), lines, EXIT_OK if rep.ok else EXIT_VIOLATIONS


def cmd_tips(s: Structure, args):
    rank = _rank(args.rank)
    tips = arrow_ditips(s) if rank == ARROW else s.tips(rank)
    tips = sorted(tips, key=lambda t: t.id)
    res = [{"id": t.id, "direction": t.direction.value, "rank": str(t.rank),
            "members": sorted(t.members)} for t in tips]
    lines = [f"{t['id']} {t['direction']} rank {t['rank']}: {', '.join(t['members'])}" for t in res]
    return res, lines, EXIT_OK


def cmd_elevate(s: Structure, args):
    extra = Path(args.partition).read_text(encoding="utf-8")
    s2 = load(args.spec, args.unfold_depth, extra)
    new = [p for p in s2.doc.partitions[len(s.doc.partitions):]]
    if not new:
        raise UsageError("the partition file declares no partition")
    if any(p.rank == ARROW for p in new):
        from .elevate import PartitionSpec
        p = next(p for p in new if p.rank == ARROW)
        spec = PartitionSpec(ARROW, {c.name: frozenset(c.members) for c in p.cells})
        b = elevate_to_omega(s, spec)
        rep = validate_bundle(b)
        added = [v for v in b.vertices if v.rank == OMEGA]
    else:
        if not any(s.tips(p.rank) for p in new):
            from .elevate import EmptyTipSet
            raise EmptyTipSet(f"no ditips of rank {new[0].rank} to partition")
        top = max(p.rank.above() for p in new)
        if top > s2.doc.rank:
            s2.doc.rank = top
        rep = check_structure(s2)
        names = {c.name for p in new for c in p.cells}
        added = [v for v in s2.listed_vertices if v.id in names or v.id.split("[")[0] in names]
    res = {"ok": rep.ok, "violations": rep.as_dict()["violations"],
           "vertices": [{"id": v.id, "rank": str(v.rank), "members": sorted(map(str, v.members))}
                        for v in sorted(added, key=lambda v: v.id)]}
    lines = [f"{v['id']} rank {v['rank']}: {', '.join(v['members'])}" for v in res["vertices"]]
    lines += [f"{v['kind']}: {', '.join(v['ids'])}" for v in res["violations"]]
    return res, lines, EXIT_OK if rep.ok else EXIT_VIOLATIONS


def cmd_components(s: Structure, args):
    cs = components(s, _rank(args.rank), args.kind, limit=args.max_components)
    comps = cs.sorted_lists()
    res = {"kind": args.kind, "rank": args.rank, "components": comps,
           "truncated": cs.truncated, "window": cs.window}
    lines = ["{" + ", ".join(c) + "}" for c in comps]
    if cs.truncated:
        lines.append(f"(truncated at {args.max_components} components)")
    return res, lines, EXIT_OK


def cmd_reach(s: Structure, args):
    ok = Connectivity(s, _rank(args.rank)).reach(args.source, args.target)
    return ok, ["true" if ok else "false"], EXIT_OK


def cmd_underlying(s: Structure, args):
    g = underlying_graph(s.bundle())
    res = {"branches": [[b, sorted(ends)] for b, ends in g.branches],
           "levels": {str(r): {n: sorted(m) for n, m in sorted(nodes.items())}
                      for r, nodes in sorted(g.levels.items())}}
    lines = [f"branch {b}: {' -- '.join(ends)}" for b, ends in res["branches"]]
    for r, nodes in res["levels"].items():
        lines.append(f"rank {r}: {len(nodes)} nodes")
    return res, lines, EXIT_OK


def cmd_export_dot(s: Structure, args):
    from .dot import export_dot
    text = export_dot(s)
    return text, text.rstrip("\n").split("\n"), EXIT_OK


COMMANDS = {
    "validate": cmd_validate, "tips": cmd_tips, "elevate": cmd_elevate,
    "components": cmd_components, "reach": cmd_reach, "underlying": cmd_underlying,
    "export-dot": cmd_export_dot,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--unfold-depth", type=int, default=argparse.SUPPRESS,
                        help="family listing window and search cap (default 50)")
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("--max-components", type=int, default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="tdg", description=__doc__, parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        c = sub.add_parser(name, parents=[common])
        c.add_argument("spec", help=".tdg file")
        if name == "tips":
            c.add_argument("--rank", required=True)
        elif name == "elevate":
            c.add_argument("--partition", required=True)
        elif name == "components":
            c.add_argument("--kind", required=True, choices=KINDS)
            c.add_argument("--rank", required=True)
        elif name == "reach":
            c.add_argument("source")
            c.add_argument("target")
            c.add_argument("--rank", required=True)
    return p


def run_command(argv: list[str]) -> tuple[str, int]:
    """Run one command; returns the rendered output and the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    args.unfold_depth = getattr(args, "unfold_depth", 50)
    args.format = getattr(args, "format", "text")
    args.max_components = getattr(args, "max_components", 10_000)
    if args.unfold_depth < 1 or args.max_components < 1:
        parser.error("--unfold-depth and --max-components must be positive")
    meta = {"unfold_depth": args.unfold_depth}
    try:
        s = load(args.spec, args.unfold_depth)
        result, lines, code = COMMANDS[args.command](s, args)
    except UsageError as e:
        return _render(args, {"error": e.code, "message": str(e)}, [f"usage error: {e}"], meta), EXIT_USAGE
    except OSError as e:
        return _render(args, {"error": "io", "message": str(e)}, [f"error: {e}"], meta), EXIT_USAGE
    except TransfiniteError as e:
        return (_render(args, {"error": e.code, "message": str(e)}, [f"error: {e.code}: {e}"], meta),
                EXIT_VIOLATIONS)
    return _render(args, result, lines, meta), code


def _render(args, result, lines, meta) -> str:
    if args.format == "json":
        return json.dumps({"command": args.command, "result": result, "meta": meta},
                          indent=2, sort_keys=True) + "\n"
    if args.command == "export-dot" and isinstance(result, str):
        return result
    return "\n".join(lines) + "\n"


def main(argv: list[str] | None = None) -> int:
    out, code = run_command(sys.argv[1:] if argv is None else argv)
    (sys.stdout if code == EXIT_OK else sys.stderr if code == EXIT_USAGE else sys.stdout).write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
