"""Abstract syntax: expressions, statements and patterns.

Every node carries a ``pos`` that does not take part in equality, so two
trees parsed from differently laid-out text compare equal.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, fields

from .errors import NOPOS, SourcePos


@dataclass(eq=True)
class Node:
    pos: SourcePos = field(default=NOPOS, compare=False, repr=False, kw_only=True)

    def children(self):
        for f in fields(self):
            if f.name == "pos":
                continue
            yield from _walk_value(getattr(self, f.name))


def _walk_value(v):
    if isinstance(v, Node):
        yield v
    elif isinstance(v, (list, tuple)):
        for x in v:
            yield from _walk_value(x)


# ---------------------------------------------------------------- types


@dataclass(eq=True)
class TypePath(Node):
    segments: tuple  # folded names; a leading "root" marks an absolute path


@dataclass(eq=True)
class TypeExpr(Node):
    expr: "Node"


# ---------------------------------------------------------------- expressions


@dataclass(eq=True)
class Lit(Node):
    value: object  # int | str | bool | Interval


@dataclass(eq=True)
class RealLit(Node):
    text: str


@dataclass(eq=True)
class NilE(Node):
    pass


@dataclass(eq=True)
class Var(Node):
    name: str


@dataclass(eq=True)
class This(Node):
    pass


@dataclass(eq=True)
class RootE(Node):
    pass


@dataclass(eq=True)
class Con(Node):
    name: str  # folded
    display: str = field(compare=False)
    arg: Node | None = None


@dataclass(eq=True)
class Send(Node):
    target: Node
    msg: str


@dataclass(eq=True)
class App(Node):
    fn: Node
    arg: Node


@dataclass(eq=True)
class LensApp(Node):
    target: Node
    lens: Node


@dataclass(eq=True)
class ConsE(Node):
    head: Node
    tail: Node


@dataclass(eq=True)
class ListE(Node):
    items: list


@dataclass(eq=True)
class VectE(Node):
    items: list


@dataclass(eq=True)
class SetE(Node):
    items: list


@dataclass(eq=True)
class MapE(Node):
    pairs: list  # [(key, value)]


@dataclass(eq=True)
class RecordE(Node):
    fields: list  # [(name, expr)]


@dataclass(eq=True)
class IntervalE(Node):
    lo: Node
    hi: Node


@dataclass(eq=True)
class Lambda(Node):
    """Anonymous function; each clause is (pattern, body) with body a Block."""

    clauses: list


@dataclass(eq=True)
class Block(Node):
    stmts: list


@dataclass(eq=True)
class ObjectE(Node):
    stmts: list
    parents: Node | None = None


@dataclass(eq=True)
class If(Node):
    branches: list  # [(cond, Block)]
    orelse: Block | None = None


@dataclass(eq=True)
class Match(Node):
    scrutinee: Node
    cases: list  # [(pattern, Block)]


@dataclass(eq=True)
class Try(Node):
    body: Block
    cases: list


@dataclass(eq=True)
class While(Node):
    cond: Node
    body: Block


@dataclass(eq=True)
class For(Node):
    pattern: "Node"
    coll: Node
    body: Block


@dataclass(eq=True)
class With(Node):
    collector: Node
    body: Block


@dataclass(eq=True)
class Unary(Node):
    op: str  # "-" | "not"
    operand: Node


@dataclass(eq=True)
class Binary(Node):
    op: str
    left: Node
    right: Node


@dataclass(eq=True)
class Chain(Node):
    operands: list
    ops: list


@dataclass(eq=True)
class Prefix(Node):
    """lazy, concurrent, force, exception, typeof, random, choose, min, max."""

    kw: str
    operand: Node


@dataclass(eq=True)
class Xor(Node):
    left: Node
    right: Node


@dataclass(eq=True)
class LensE(Node):
    """``lens (g, p)`` when ``pair`` is set, else ``lens x => path``."""

    pair: Node | None = None
    var: str | None = None
    path: Node | None = None


@dataclass(eq=True)
class TypeLit(Node):
    type: Node


@dataclass(eq=True)
class Convert(Node):
    expr: Node
    type: Node


@dataclass(eq=True)
class NativeE(Node):
    name: str
    arg: Node | None = None


# ---------------------------------------------------------------- statements


@dataclass(eq=True)
class Val(Node):
    pattern: Node
    expr: Node


@dataclass(eq=True)
class PathTarget(Node):
    """Left-hand side ``x.m.(l).n arg``: a root identifier plus access steps."""

    root: str
    steps: list  # [("msg", name) | ("msgarg", name, expr) | ("lens", expr)]


@dataclass(eq=True)
class Assign(Node):
    target: Node  # Pattern or PathTarget
    op: str
    expr: Node


@dataclass(eq=True)
class Def(Node):
    name: str
    arg: Node | None
    body: Node
    rettype: Node | None = None


@dataclass(eq=True)
class ConvDef(Node):
    """``def this : t = e`` (auto) or ``def this :> t = e``."""

    type: Node
    auto: bool
    body: Node


@dataclass(eq=True)
class Typedef(Node):
    name: str
    clauses: list  # [(pattern, expr | None)]


@dataclass(eq=True)
class Memoize(Node):
    refs: list  # [(name, weak)]


@dataclass(eq=True)
class Import(Node):
    items: list  # [(segments, alias | None)]; alias "_" for a wildcard


@dataclass(eq=True)
class Private(Node):
    names: list


@dataclass(eq=True)
class Yield(Node):
    expr: Node


@dataclass(eq=True)
class Pragma(Node):
    kind: str
    expr: Node
    pattern: Node | None = None


@dataclass(eq=True)
class Module(Node):
    path: tuple
    stmts: list


@dataclass(eq=True)
class UnittestMarker(Node):
    pass


# ---------------------------------------------------------------- patterns


@dataclass(eq=True)
class PWild(Node):
    pass


@dataclass(eq=True)
class PVar(Node):
    name: str


@dataclass(eq=True)
class PAs(Node):
    name: str
    pattern: Node


@dataclass(eq=True)
class PLit(Node):
    value: object


@dataclass(eq=True)
class PCon(Node):
    name: str
    display: str = field(compare=False)
    arg: Node | None = None


@dataclass(eq=True)
class PGuard(Node):
    pattern: Node
    cond: Node


@dataclass(eq=True)
class PVal(Node):
    expr: Node


@dataclass(eq=True)
class PDestruct(Node):
    con: str
    display: str = field(compare=False)
    arg: Node | None = None


@dataclass(eq=True)
class PPred(Node):
    fn: Node
    arg: Node | None = None


@dataclass(eq=True)
class PRecord(Node):
    fields: list  # [(name, pattern)]
    delta: Node | None = None


@dataclass(eq=True)
class PNil(Node):
    pass


@dataclass(eq=True)
class PExc(Node):
    pattern: Node


@dataclass(eq=True)
class PType(Node):
    pattern: Node
    type: Node


@dataclass(eq=True)
class PInner(Node):
    type: Node  # TypePath
    pattern: Node


@dataclass(eq=True)
class PSeq(Node):
    """List or vector display pattern; they match either kind of sequence."""

    items: list
    delta: Node | None = None
    brackets: str = field(default="[]", compare=False)


@dataclass(eq=True)
class PCons(Node):
    head: Node
    tail: Node


@dataclass(eq=True)
class PSet(Node):
    items: list
    delta: Node | None = None


@dataclass(eq=True)
class PMap(Node):
    pairs: list
    delta: Node | None = None


@dataclass(eq=True)
class PFor(Node):
    items: list
    delta: Node | None = None


@dataclass(eq=True)
class PDelta(Node):
    """A rest pattern: ``...``, ``(x as δ)`` or ``(δ if e)``."""

    name: str | None = None
    cond: Node | None = None
    inner: "PDelta | None" = None


CONTROL_NODES = (Block, If, Match, Try, For, While)


def pattern_vars(p: Node) -> list[str]:
    """Identifiers bound by a pattern, in left-to-right order."""
    out: list[str] = []

    def go(n):
        if isinstance(n, PVar):
            out.append(n.name)
        elif isinstance(n, PAs):
            out.append(n.name)
            go(n.pattern)
        elif isinstance(n, PDelta):
            if n.name:
                out.append(n.name)
            if n.inner is not None:
                go(n.inner)
        elif isinstance(n, (PGuard,)):
            go(n.pattern)
        elif isinstance(n, PPred):
            if n.arg is not None:
                go(n.arg)
        elif isinstance(n, (PVal,)):
            pass
        elif isinstance(n, PType):
            go(n.pattern)
        elif isinstance(n, PRecord):
            for _, q in n.fields:
                go(q)
            if n.delta is not None:
                go(n.delta)
        elif isinstance(n, PMap):
            for k, v in n.pairs:
                go(k)
                go(v)
            if n.delta is not None:
                go(n.delta)
        elif isinstance(n, (PSeq, PSet, PFor)):
            for q in n.items:
                go(q)
            if n.delta is not None:
                go(n.delta)
        elif isinstance(n, PCons):
            go(n.head)
            go(n.tail)
        elif isinstance(n, (PCon, PDestruct)):
            if n.arg is not None:
                go(n.arg)
        elif isinstance(n, PInner):
            go(n.pattern)
        elif isinstance(n, PExc):
            go(n.pattern)

    go(p)
    return out


@dataclass(eq=True)
class LensPath(Node):
    """``lens x => x.m.(l) ...`` compiled to access steps (see PathTarget)."""

    var: str
    steps: list


@dataclass(eq=True)
class ModuleDecl(Node):
    """A flattened module after desugaring."""

    path: tuple
    stmts: list
    section: bool = False  # unittest section sharing its parent's environment
    filename: str | None = None


@dataclass
class Program:
    modules: list
    stmts: list
    filename: str | None = None


# ---------------------------------------------------------------- s-expressions
#
# Nodes print as (Name field ...), lists as [..], tuples as <..>, strings as
# JSON strings, None as nil and booleans as #t / #f. Positions are dropped.


def sexp(v) -> str:
    if isinstance(v, Node):
        args = [sexp(getattr(v, f.name)) for f in fields(v) if f.name != "pos"]
        return "(" + " ".join([type(v).__name__] + args) + ")"
    if isinstance(v, list):
        return "[" + " ".join(sexp(x) for x in v) + "]"
    if isinstance(v, tuple):
        return "<" + " ".join(sexp(x) for x in v) + ">"
    if v is None:
        return "nil"
    if isinstance(v, bool):
        return "#t" if v else "#f"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    raise TypeError(f"cannot print {v!r} as an s-expression")


_SEXP_TOKEN = re.compile(r'\s*("(?:[^"\\]|\\.)*"|[()\[\]<>]|[^\s()\[\]<>"]+)')


def read_sexp(text: str):
    """Inverse of :func:`sexp`."""
    toks = _SEXP_TOKEN.findall(text)
    pos = 0

    def read():
        nonlocal pos
        t = toks[pos]
        pos += 1
        if t in ("(", "[", "<"):
            close = {"(": ")", "[": "]", "<": ">"}[t]
            items = []
            while toks[pos] != close:
                items.append(read())
            pos += 1
            if t == "[":
                return items
            if t == "<":
                return tuple(items)
            cls = globals().get(items[0]) if isinstance(items[0], _Sym) else None
            if not (isinstance(cls, type) and issubclass(cls, Node)):
                raise ValueError(f"unknown node {items[0]!r}")
            return cls(*items[1:])
        if t.startswith('"'):
            return json.loads(t)
        if t == "nil":
            return None
        if t in ("#t", "#f"):
            return t == "#t"
        if re.fullmatch(r"-?\d+", t):
            return int(t)
        return _Sym(t)

    v = read()
    if pos != len(toks):
        raise ValueError("trailing text after s-expression")
    return v


class _Sym(str):
    """A bare word read from an s-expression (only node names)."""

