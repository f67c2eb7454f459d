"""The ``.tdg`` text format: tokenizer, parser and printer."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .document import (
    ArcDecl, ArrowJoinDecl, ArrowStepPattern, ArrowTemplateDecl, ArrowVertexPattern,
    ArrowWalkDecl, CellDecl, PartitionDecl, PresentationDecl, SpecDocument, VertexDecl,
    WalkDecl, _arrow_fmt,
)
from .model import RankTag, TransfiniteError
from .present import CellTemplate, TemplateArc, TemplateUse, parse_cell_id

KEYWORDS = (
    "digraph", "template", "use", "vertex", "vertex-family", "arc", "walk",
    "walk-presentation", "partition", "arrow-template", "arrow-walk", "arrow-join",
)

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<num>-?\d+(?![\w\[]))
  | (?P<word>[A-Za-z_~](?:[\w.@:~+\-]|\[[^\]\s,]*\]|\{[^{}\s;,]*\})*)
  | (?P<punct>[{}\[\];,=:])
""", re.X)


class SpecSyntaxError(TransfiniteError):
    code = "syntax-error"

    def __init__(self, msg: str, line: int, col: int, expected=()):
        exp = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{line}:{col}: {msg}{exp}")
        self.line, self.col, self.expected = line, col, tuple(expected)


class DuplicateId(TransfiniteError):
    code = "duplicate-id"


class ForwardReference(TransfiniteError):
    code = "forward-reference"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    line, start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise SpecSyntaxError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind != "ws":
            out.append(Token(kind, m.group(), line, m.start() - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.doc = SpecDocument()
        self.names: set[str] = set()
        self.families: set[str] = set()
        self.arrow_ids: set[str] = set()

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg: str, *expected: str):
        raise SpecSyntaxError(msg, self.tok.line, self.tok.col, expected)

    def next(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("word", "punct")

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"found {self.tok.text or 'end of file'!r}", repr(text))
        return self.next()

    def word(self, what: str = "identifier") -> str:
        if self.tok.kind != "word":
            self.fail(f"found {self.tok.text or 'end of file'!r}", what)
        return self.next().text

    def int(self) -> int:
        if self.tok.kind != "num":
            self.fail(f"found {self.tok.text or 'end of file'!r}", "integer")
        return int(self.next().text)

    def rank(self) -> RankTag:
        if self.tok.kind == "num":
            return RankTag.parse(self.int())
        w = self.word("rank")
        if w not in ("arrow", "omega"):
            self.i -= 1
            self.fail(f"bad rank {w!r}", "integer", "arrow", "omega")
        return RankTag.parse(w)

    def list(self) -> tuple[str, ...]:
        self.expect("[")
        out = []
        while not self.at("]"):
            out.append(self.word("element"))
            if not self.at("]"):
                self.expect(",")
        self.next()
        return tuple(out)

    def index_clause(self) -> str | None:
        if self.at("index"):
            self.next()
            return self.word("index variable")
        return None

    # -- names
    def declare(self, name: str, family: bool = False) -> None:
        if name in self.names or name in self.families:
            raise DuplicateId(f"line {self.toks[self.i - 1].line}: {name} is declared twice")
        (self.families if family else self.names).add(name)

    def known(self, ref: str, var: str | None = None) -> bool:
        if ref in self.names or ref in self.arrow_ids:
            return True
        c = parse_cell_id(ref)
        if c is not None:
            inst, item = c[0], c[1]
            base = inst.split("[", 1)[0]
            use = next((u for u in self.doc.uses if u.name == base), None)
            if use is None or ("[" in inst) != (use.index is not None):
                return False
            t = next(t for t in self.doc.templates if t.id == use.template)
            return item in t.nodes or any(a.id == item for a in t.arcs)
        m = re.fullmatch(r"([^\[\]]+)\[([^\]]+)\]", ref)
        if m:
            return m.group(1) in self.families
        return False

    def need(self, ref: str, var: str | None = None) -> None:
        if not self.known(ref, var):
            raise ForwardReference(f"line {self.toks[self.i - 1].line}: {ref} is not declared before use")

    def need_periodic(self, entry: str) -> None:
        base = entry.partition("@")[0]
        if "." in base:
            self.need(f"{base}@0")
        elif base not in self.families:
            raise ForwardReference(f"line {self.toks[self.i - 1].line}: family {base} is not declared before use")

    def record(self, kind: str, lst: list, item) -> None:
        self.doc.order.append((kind, len(lst)))
        lst.append(item)

    # -- statements
    def parse(self) -> SpecDocument:
        self.expect("digraph")
        self.doc.name = self.word("digraph name")
        self.expect("rank")
        self.doc.rank = self.rank()
        handlers = {
            "template": self.template, "use": self.use, "vertex": self.vertex,
            "vertex-family": self.vertex, "arc": self.arc, "walk": self.walk,
            "walk-presentation": self.presentation, "partition": self.partition,
            "arrow-template": self.arrow_template, "arrow-walk": self.arrow_walk,
            "arrow-join": self.arrow_join,
        }
        while self.tok.kind != "eof":
            if self.at(";"):
                self.next()
                continue
            t = self.tok
            if t.kind != "word" or t.text not in handlers:
                self.fail(f"unknown keyword {t.text!r}", *KEYWORDS[1:])
            self.next()
            handlers[t.text](t.text)
        return self.doc

    def template(self, _kw) -> None:
        tid = self.word("template name")
        self.declare(tid)
        nodes, arcs = [], []
        self.expect("{")
        while not self.at("}"):
            kw = self.word("node or arc")
            if kw == "node":
                nodes.append(self.word("node name"))
            elif kw == "arc":
                aid = self.word("arc name")
                self.expect("from")
                tail, dt = self._endpoint(nodes)
                self.expect("to")
                head, dh = self._endpoint(nodes)
                arcs.append(TemplateArc(aid, tail, dt, head, dh))
            else:
                self.i -= 1
                self.fail(f"unknown template item {kw!r}", "node", "arc")
            self.expect(";")
        self.next()
        t = CellTemplate(tid, tuple(nodes), tuple(arcs))
        t.check()
        self.record("templates", self.doc.templates, t)

    def _endpoint(self, nodes) -> tuple[str, int]:
        text = self.word("template endpoint")
        m = re.fullmatch(r"(\w+)@k(?:([+-])(\d+))?", text)
        if m is None:
            self.i -= 1
            self.fail(f"bad endpoint {text!r}", "NODE@k", "NODE@k+1", "NODE@k-1")
        if m.group(1) not in nodes:
            raise ForwardReference(f"line {self.toks[self.i - 1].line}: template node {m.group(1)} is not declared")
        d = int(m.group(3) or 0) * (-1 if m.group(2) == "-" else 1)
        return m.group(1), d

    def use(self, _kw) -> None:
        template = self.word("template name")
        if not any(t.id == template for t in self.doc.templates):
            raise ForwardReference(f"line {self.tok.line}: template {template} is not declared before use")
        self.expect("as")
        name = self.word("instance name")
        index = self.index_clause()
        self.declare(name, family=index is not None)
        self.record("uses", self.doc.uses, TemplateUse(name, template, index))

    def vertex(self, kw) -> None:
        name = self.word("vertex name")
        self.expect("rank")
        rank = self.rank()
        index = None
        if kw == "vertex-family":
            self.expect("index")
            index = self.word("index variable")
        members = []
        if self.at("{"):
            self.next()
            while not self.at("}"):
                side = self.word("intip or outtip")
                if side not in ("intip", "outtip"):
                    self.i -= 1
                    self.fail(f"unknown member kind {side!r}", "intip", "outtip")
                rep = self.word("presentation id")
                self.need(rep)
                members.append(("in:" if side == "intip" else "out:") + rep)
                self.expect(";")
            self.next()
        self.declare(name, family=index is not None)
        self.record("vertices", self.doc.vertices, VertexDecl(name, rank, tuple(members), index))

    def arc(self, _kw) -> None:
        name = self.word("arc name")
        index = self.index_clause()
        self.expect("from")
        tail = self.word("vertex")
        self.need(tail)
        self.expect("to")
        head = self.word("vertex")
        self.need(head)
        self.declare(name, family=index is not None)
        self.record("arcs", self.doc.arcs, ArcDecl(name, tail, head, index))

    def walk(self, _kw) -> None:
        name = self.word("walk name")
        index = self.index_clause()
        self.expect("rank")
        rank = self.rank()
        self.expect("=")
        els = self.list()
        for e in els:
            self.need(e)
        self.declare(name, family=index is not None)
        self.record("walks", self.doc.walks, WalkDecl(name, rank, els, index))

    def presentation(self, _kw) -> None:
        name = self.word("presentation name")
        index = self.index_clause()
        self.expect("rank")
        rank = self.rank()
        self.expect("mode")
        mode = self.word("mode")
        if mode not in ("in", "out", "endless", "finite"):
            self.i -= 1
            self.fail(f"unknown mode {mode!r}", "in", "out", "endless", "finite")
        left, left_anchor = (), 0
        if self.at("left"):
            self.next()
            left = self.list()
            self.expect("anchor")
            left_anchor = self.int()
        self.expect("prefix")
        prefix = self.list()
        repetend, anchor = (), 0
        if self.at("repetend"):
            self.next()
            repetend = self.list()
            self.expect("anchor")
            anchor = self.int()
        for e in prefix:
            self.need(e)
        for e in left + repetend:
            self.need_periodic(e)
        self.declare(name, family=index is not None)
        self.record("presentations", self.doc.presentations, PresentationDecl(
            name, rank, mode, prefix, repetend, anchor, left, left_anchor, index))

    def partition(self, _kw) -> None:
        self.expect("rank")
        rank = self.rank()
        index = self.index_clause()
        cells = []
        self.expect("{")
        while not self.at("}"):
            cell = self.word("cell name")
            if cell.endswith(":"):
                cell = cell[:-1]
            else:
                self.expect(":")
            members = [self.word("tip")]
            while self.at(","):
                self.next()
                members.append(self.word("tip"))
            for m in members:
                side, _, rep = m.partition(":")
                if side not in ("in", "out") or not rep:
                    self.i -= 1
                    self.fail(f"bad tip {m!r}", "in:ID", "out:ID")
                self.need(rep)
            self.expect(";")
            cidx = None
            if index is not None and cell.endswith(f"[{index}]"):
                cell, cidx = cell[: -len(index) - 2], index
            self.declare(cell, family=cidx is not None)
            cells.append(CellDecl(cell, tuple(members), cidx))
        self.next()
        self.record("partitions", self.doc.partitions, PartitionDecl(rank, tuple(cells)))

    def arrow_template(self, _kw) -> None:
        name = self.word("arrow template name")
        self.declare(name)
        self.expect("base")
        base = self.int()
        verts, steps = [], []
        self.expect("{")
        while not self.at("}"):
            kw = self.word("vertex or step")
            pat = self.word("pattern")
            self.expect("offset")
            off = self.int()
            lo, hi = 0, None
            if self.at("from"):
                self.next()
                lo = self.int()
            if self.at("to"):
                self.next()
                hi = self.int()
            if kw == "vertex":
                members = ()
                if self.at("members"):
                    self.next()
                    members = self.list()
                verts.append(ArrowVertexPattern(pat, off, members, lo, hi))
            elif kw == "step":
                self.expect("mode")
                mode = self.word("in or out")
                if mode not in ("in", "out"):
                    self.i -= 1
                    self.fail(f"unknown mode {mode!r}", "in", "out")
                self.expect("terminal")
                steps.append(ArrowStepPattern(pat, off, mode, self.word("terminal pattern"), lo, hi))
            else:
                self.fail(f"unknown arrow template item {kw!r}", "vertex", "step")
            self.expect(";")
        self.next()
        for k in range(_ARROW_NAMES):
            for it in verts + steps:
                x = _arrow_fmt(it.pattern, k) if it.live(k) else None
                if x is not None:
                    self.arrow_ids.add(x)
        self.record("arrow_templates", self.doc.arrow_templates, ArrowTemplateDecl(name, base, tuple(verts), tuple(steps)))

    def arrow_walk(self, _kw) -> None:
        name = self.word("arrow walk name")
        self.expect("kind")
        kind = self.word("in or out")
        if kind not in ("in", "out"):
            self.i -= 1
            self.fail(f"unknown kind {kind!r}", "in", "out")
        self.expect("template")
        template = self.word("arrow template name")
        if not any(t.name == template for t in self.doc.arrow_templates):
            raise ForwardReference(f"line {self.tok.line}: arrow template {template} is not declared before use")
        self.expect("vertex")
        vertex = self.word("vertex pattern")
        self.expect("step")
        step = self.word("step pattern")
        overrides = []
        while self.at("override"):
            self.next()
            k = self.int()
            self.expect("vertex")
            v = self.word("vertex")
            self.expect("step")
            overrides.append((k, v, self.word("step")))
        self.declare(name)
        self.record("arrow_walks", self.doc.arrow_walks,
                    ArrowWalkDecl(name, kind, template, vertex, step, tuple(overrides)))

    def arrow_join(self, _kw) -> None:
        name = self.word("join name")
        self.expect("in")
        inward = self.word("in-walk")
        self.expect("out")
        outward = self.word("out-walk")
        walks = {w.name for w in self.doc.arrow_walks}
        for w in (inward, outward):
            if w not in walks:
                raise ForwardReference(f"line {self.tok.line}: arrow walk {w} is not declared before use")
        self.declare(name)
        self.record("arrow_joins", self.doc.arrow_joins, ArrowJoinDecl(name, inward, outward))


# arrow template instances a reference may name without declaring them
_ARROW_NAMES = 64


def parse_spec(text: str) -> SpecDocument:
    """Parse ``.tdg`` text. References must name something declared on an earlier line."""
    return _Parser(text).parse()


# -- printing -----------------------------------------------------------------------

def _lst(xs) -> str:
    return "[" + ", ".join(xs) + "]"


def _print_item(kind: str, x) -> str:
    if kind == "templates":
        body = [f"  node {n};" for n in x.nodes]
        for a in x.arcs:
            body.append(f"  arc {a.id} from {a.tail}@k{_off(a.dt)} to {a.head}@k{_off(a.dh)};")
        return "\n".join([f"template {x.id} {{", *body, "}"])
    if kind == "uses":
        return f"use {x.template} as {x.name}" + (f" index {x.index}" if x.index else "")
    if kind == "vertices":
        kw = "vertex-family" if x.index else "vertex"
        head = f"{kw} {x.name} rank {x.rank}" + (f" index {x.index}" if x.index else "")
        if not x.members:
            return head
        body = [f"  {'intip' if m.startswith('in:') else 'outtip'} {m.partition(':')[2]};" for m in x.members]
        return "\n".join([head + " {", *body, "}"])
    if kind == "arcs":
        idx = f" index {x.index}" if x.index else ""
        return f"arc {x.name}{idx} from {x.tail} to {x.head}"
    if kind == "walks":
        idx = f" index {x.index}" if x.index else ""
        return f"walk {x.name}{idx} rank {x.rank} = {_lst(x.elements)}"
    if kind == "presentations":
        out = f"walk-presentation {x.name}" + (f" index {x.index}" if x.index else "")
        out += f" rank {x.rank} mode {x.mode}"
        if x.left:
            out += f" left {_lst(x.left)} anchor {x.left_anchor}"
        out += f" prefix {_lst(x.prefix)}"
        if x.repetend:
            out += f" repetend {_lst(x.repetend)} anchor {x.anchor}"
        return out
    if kind == "partitions":
        var = next((c.index for c in x.cells if c.index), None)
        head = f"partition rank {x.rank}" + (f" index {var}" if var else "") + " {"
        body = [f"  {c.name}{f'[{c.index}]' if c.index else ''}: {', '.join(c.members)};" for c in x.cells]
        return "\n".join([head, *body, "}"])
    if kind == "arrow_templates":
        body = []
        for v in x.vertices:
            body.append(f"  vertex {v.pattern} offset {v.offset}{_bounds(v)}" + (f" members {_lst(v.members)}" if v.members else "") + ";")
        for s in x.steps:
            body.append(f"  step {s.pattern} offset {s.offset}{_bounds(s)} mode {s.mode} terminal {s.terminal};")
        return "\n".join([f"arrow-template {x.name} base {x.base} {{", *body, "}"])
    if kind == "arrow_walks":
        out = f"arrow-walk {x.name} kind {x.kind} template {x.template} vertex {x.vertex} step {x.step}"
        return out + "".join(f" override {k} vertex {v} step {s}" for k, v, s in x.overrides)
    if kind == "arrow_joins":
        return f"arrow-join {x.name} in {x.inward} out {x.outward}"
    raise ValueError(kind)


def _bounds(item) -> str:
    return (f" from {item.lo}" if item.lo else "") + (f" to {item.hi}" if item.hi is not None else "")


def _off(d: int) -> str:
    return "" if d == 0 else f"{d:+d}"


_DEFAULT_ORDER = ("templates", "uses", "vertices", "arcs", "presentations", "walks",
                  "partitions", "arrow_templates", "arrow_walks", "arrow_joins")


def print_spec(doc: SpecDocument) -> str:
    """Canonical text for ``doc``; declarations keep their parsed order."""
    order = list(doc.order)
    if not order:
        order = [(k, i) for k in _DEFAULT_ORDER for i in range(len(getattr(doc, k)))]
    lines = [f"digraph {doc.name} rank {doc.rank}"]
    lines += [_print_item(k, getattr(doc, k)[i]) for k, i in order]
    return "\n".join(lines) + "\n"
