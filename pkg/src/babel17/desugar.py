"""Translate the surface tree into the core tree and check static rules.

The translations follow the language definition: operators become message
sends, boolean operators and ``if`` become matches, modifying assignments
become plain assignments, return types become conversions, and nested
modules are flattened. :class:`ScopeChecker` then enforces the static
rules (scoping, val/def conflicts, linear scope, import placement and the
production/unittest separation).
"""

from __future__ import annotations

import itertools

from . import nodes as N
from .errors import DesugarError

BINARY_MSGS = {
    "+": "plus_", "-": "minus_", "*": "times_", "/": "slash_", "div": "div_", "mod": "mod_",
    "^": "pow_", "++": "plus__", "--": "minus__", "**": "times__", "//": "slash__",
    "to": "to_", "downto": "downto_",
}

_fresh = itertools.count(1)


def fresh(prefix: str = "t") -> str:
    # '%' cannot occur in source identifiers
    return f"%{prefix}{next(_fresh)}"


def _con(name: str, pos) -> N.Con:
    return N.Con(name.casefold(), name, None, pos=pos)


def _raise(name: str, pos) -> N.Block:
    return N.Block([N.Yield(N.Prefix("exception", _con(name, pos), pos=pos), pos=pos)], pos=pos)


def _yield_block(e) -> N.Block:
    return N.Block([N.Yield(e, pos=e.pos)], pos=e.pos)


def _bool_case(v: bool, body, pos):
    return (N.PLit(v, pos=pos), body)


def _bool_check(b, pos) -> N.Match:
    """``match b case true => true case false => false case _ => exception DomainError end``"""
    return N.Match(b, [
        _bool_case(True, _yield_block(N.Lit(True, pos=pos)), pos),
        _bool_case(False, _yield_block(N.Lit(False, pos=pos)), pos),
        (N.PWild(pos=pos), _raise("DomainError", pos)),
    ], pos=pos)


class Desugarer:
    def __init__(self, filename: str | None = None):
        self.filename = filename

    def error(self, msg, node) -> DesugarError:
        return DesugarError(msg, node.pos, self.filename)

    # ------------------------------------------------------------ program

    def program(self, stmts: list) -> N.Program:
        modules: list = []
        top: list = []
        for s in stmts:
            if isinstance(s, N.Module):
                self.flatten_module(s.path, s.stmts, [], modules, s.pos)
            elif isinstance(s, N.UnittestMarker):
                raise self.error("'unittest' sections are only allowed inside modules", s)
            else:
                top.append(self.stmt(s))
        return N.Program(modules, top, self.filename)

    def flatten_module(self, path, stmts, inherited_imports, out, pos):
        own, nested, test_part = [], [], None
        target = own
        for s in stmts:
            if isinstance(s, N.UnittestMarker):
                if test_part is not None:
                    raise self.error("a module may contain only one 'unittest' section", s)
                test_part = []
                target = test_part
            elif isinstance(s, N.Module):
                nested.append(s)
            else:
                target.append(s)
        imports = inherited_imports + [s for s in own if isinstance(s, N.Import)]
        body = [self.stmt(s) for s in inherited_imports] + [self.stmt(s) for s in own]
        out.append(N.ModuleDecl(tuple(path), body, False, self.filename, pos=pos))
        if test_part is not None:
            tbody = [self.stmt(s) for s in test_part]
            out.append(N.ModuleDecl(tuple(path) + ("unittest",), tbody, True, self.filename, pos=pos))
        for m in nested:
            self.flatten_module(tuple(path) + tuple(m.path), m.stmts, imports, out, m.pos)

    # ------------------------------------------------------------ statements

    def block(self, b: N.Block) -> N.Block:
        return N.Block([self.stmt(s) for s in b.stmts], pos=b.pos)

    def stmts(self, ss):
        return [self.stmt(s) for s in ss]

    def stmt(self, s):
        pos = s.pos
        if isinstance(s, N.Val):
            return N.Val(self.pattern(s.pattern), self.expr(s.expr), pos=pos)
        if isinstance(s, N.Yield):
            return N.Yield(self.expr(s.expr), pos=pos)
        if isinstance(s, N.Def):
            body = self.expr(s.body)
            if s.rettype is not None:
                body = N.Convert(body, self.type_ref(s.rettype), pos=body.pos)
            arg = self.pattern(s.arg) if s.arg is not None else None
            return N.Def(s.name, arg, body, None, pos=pos)
        if isinstance(s, N.ConvDef):
            return N.ConvDef(self.type_ref(s.type), s.auto, self.expr(s.body), pos=pos)
        if isinstance(s, N.Typedef):
            clauses = [(self.pattern(p), self.expr(e) if e is not None else None) for p, e in s.clauses]
            return N.Typedef(s.name, clauses, pos=pos)
        if isinstance(s, N.Assign):
            return self.assign(s)
        if isinstance(s, N.Pragma):
            pat = self.pattern(s.pattern) if s.pattern is not None else None
            return N.Pragma(s.kind, self.expr(s.expr), pat, pos=pos)
        if isinstance(s, (N.Memoize, N.Import, N.Private)):
            return s
        if isinstance(s, N.Module):
            raise self.error("modules may only be declared at the top level or inside modules", s)
        if isinstance(s, N.UnittestMarker):
            raise self.error("'unittest' sections are only allowed inside modules", s)
        raise self.error(f"unexpected statement {type(s).__name__}", s)

    def assign(self, s: N.Assign):
        pos = s.pos
        target = s.target
        rhs = s.expr
        if s.op != "=":
            from .parser import ASSIGN_OPS

            op, flipped = ASSIGN_OPS[s.op]
            current = self.target_expr(target)
            if op in ("min", "max"):
                rhs = N.Prefix(op, N.VectE([current, rhs], pos=pos), pos=pos)
            elif op == "xor":
                rhs = N.Xor(rhs, current, pos=pos) if flipped else N.Xor(current, rhs, pos=pos)
            else:
                left, right = (rhs, current) if flipped else (current, rhs)
                rhs = N.Binary(op, left, right, pos=pos)
        if isinstance(target, N.PathTarget):
            steps = [self.step(st) for st in target.steps]
            return N.Assign(N.PathTarget(target.root, steps, pos=target.pos), "=", self.expr(rhs), pos=pos)
        return N.Assign(self.pattern(target), "=", self.expr(rhs), pos=pos)

    def target_expr(self, target):
        if isinstance(target, N.PathTarget):
            e = N.Var(target.root, pos=target.pos)
            for st in target.steps:
                if st[0] == "msg":
                    e = N.Send(e, st[1], pos=target.pos)
                elif st[0] == "msgarg":
                    e = N.App(N.Send(e, st[1], pos=target.pos), st[2], pos=target.pos)
                else:
                    e = N.LensApp(e, st[1], pos=target.pos)
            return e
        if isinstance(target, N.PVar):
            return N.Var(target.name, pos=target.pos)
        raise self.error("modifying assignment needs an identifier or access path", target)

    def step(self, st):
        if st[0] == "msg":
            return st
        if st[0] == "msgarg":
            return ("msgarg", st[1], self.expr(st[2]))
        return ("lens", self.expr(st[1]))

    def type_ref(self, t):
        if isinstance(t, N.TypeExpr):
            return N.TypeExpr(self.expr(t.expr), pos=t.pos)
        return t

    # ------------------------------------------------------------ expressions

    def expr(self, e):
        m = getattr(self, "e_" + type(e).__name__, None)
        if m is None:
            raise self.error(f"unexpected expression {type(e).__name__}", e)
        return m(e)

    def e_Lit(self, e):
        return e

    e_RealLit = e_NilE = e_Var = e_This = e_RootE = e_TypeLit = e_Lit

    def e_TypeLit(self, e):
        return N.TypeLit(self.type_ref(e.type), pos=e.pos)

    def e_Con(self, e):
        return N.Con(e.name, e.display, self.expr(e.arg) if e.arg is not None else None, pos=e.pos)

    def e_Send(self, e):
        return N.Send(self.expr(e.target), e.msg, pos=e.pos)

    def e_App(self, e):
        return N.App(self.expr(e.fn), self.expr(e.arg), pos=e.pos)

    def e_LensApp(self, e):
        return N.LensApp(self.expr(e.target), self.expr(e.lens), pos=e.pos)

    def e_ConsE(self, e):
        return N.ConsE(self.expr(e.head), self.expr(e.tail), pos=e.pos)

    def e_ListE(self, e):
        return N.ListE([self.expr(x) for x in e.items], pos=e.pos)

    def e_VectE(self, e):
        return N.VectE([self.expr(x) for x in e.items], pos=e.pos)

    def e_SetE(self, e):
        return N.SetE([self.expr(x) for x in e.items], pos=e.pos)

    def e_MapE(self, e):
        return N.MapE([(self.expr(k), self.expr(v)) for k, v in e.pairs], pos=e.pos)

    def e_RecordE(self, e):
        seen = set()
        for name, _ in e.fields:
            if name in seen:
                raise self.error(f"duplicate record field {name}", e)
            seen.add(name)
        return N.RecordE([(n, self.expr(x)) for n, x in e.fields], pos=e.pos)

    def e_IntervalE(self, e):
        return N.IntervalE(self.expr(e.lo), self.expr(e.hi), pos=e.pos)

    def e_Lambda(self, e):
        return N.Lambda([(self.pattern(p), self.block(b)) for p, b in e.clauses], pos=e.pos)

    def e_Block(self, e):
        return self.block(e)

    def e_ObjectE(self, e):
        parents = self.expr(e.parents) if e.parents is not None else None
        return N.ObjectE(self.stmts(e.stmts), parents, pos=e.pos)

    def e_If(self, e):
        orelse = self.block(e.orelse) if e.orelse is not None else N.Block([], pos=e.pos)
        for cond, body in reversed(e.branches):
            pos = cond.pos
            orelse = N.Match(self.expr(cond), [
                (N.PLit(True, pos=pos), self.block(body)),
                (N.PLit(False, pos=pos), orelse),
                (N.PWild(pos=pos), _raise("DomainError", pos)),
            ], pos=e.pos)
            orelse = N.Block([N.Yield(orelse, pos=e.pos)], pos=e.pos)
        # unwrap the outermost block so the result is the match itself
        return orelse.stmts[0].expr

    def e_Match(self, e):
        return N.Match(self.expr(e.scrutinee), [(self.pattern(p), self.block(b)) for p, b in e.cases], pos=e.pos)

    def e_Try(self, e):
        return N.Try(self.block(e.body), [(self.pattern(p), self.block(b)) for p, b in e.cases], pos=e.pos)

    def e_While(self, e):
        return N.While(self.expr(e.cond), self.block(e.body), pos=e.pos)

    def e_For(self, e):
        return N.For(self.pattern(e.pattern), self.expr(e.coll), self.block(e.body), pos=e.pos)

    def e_With(self, e):
        return N.With(self.expr(e.collector), self.block(e.body), pos=e.pos)

    def e_Unary(self, e):
        x = self.expr(e.operand)
        if e.op == "-":
            return N.Send(x, "uminus_", pos=e.pos)
        pos = e.pos
        return N.Match(x, [
            _bool_case(True, _yield_block(N.Lit(False, pos=pos)), pos),
            _bool_case(False, _yield_block(N.Lit(True, pos=pos)), pos),
            (N.PWild(pos=pos), _raise("DomainError", pos)),
        ], pos=pos)

    def e_Binary(self, e):
        pos = e.pos
        if e.op in BINARY_MSGS:
            return N.App(N.Send(self.expr(e.left), BINARY_MSGS[e.op], pos=pos), self.expr(e.right), pos=pos)
        if e.op == "~":
            return N.Binary("~", self.expr(e.left), self.expr(e.right), pos=pos)
        a, b = self.expr(e.left), self.expr(e.right)
        if e.op == "and":
            return N.Match(a, [
                _bool_case(True, _yield_block(_bool_check(b, pos)), pos),
                _bool_case(False, _yield_block(N.Lit(False, pos=pos)), pos),
                (N.PWild(pos=pos), _raise("DomainError", pos)),
            ], pos=pos)
        if e.op == "or":
            return N.Match(a, [
                _bool_case(False, _yield_block(_bool_check(b, pos)), pos),
                _bool_case(True, _yield_block(N.Lit(True, pos=pos)), pos),
                (N.PWild(pos=pos), _raise("DomainError", pos)),
            ], pos=pos)
        raise self.error(f"unknown operator {e.op}", e)

    def e_Xor(self, e):
        return N.Xor(self.expr(e.left), self.expr(e.right), pos=e.pos)

    def e_Chain(self, e):
        return N.Chain([self.expr(x) for x in e.operands], list(e.ops), pos=e.pos)

    def e_Prefix(self, e):
        return N.Prefix(e.kw, self.expr(e.operand), pos=e.pos)

    def e_LensE(self, e):
        if e.pair is not None:
            return N.LensE(self.expr(e.pair), pos=e.pos)
        path = self.expr(e.path)
        steps = []
        cur = path
        while True:
            if isinstance(cur, N.Send):
                steps.append(("msg", cur.msg))
                cur = cur.target
            elif isinstance(cur, N.App) and isinstance(cur.fn, N.Send):
                steps.append(("msgarg", cur.fn.msg, cur.arg))
                cur = cur.fn.target
            elif isinstance(cur, N.LensApp):
                steps.append(("lens", cur.lens))
                cur = cur.target
            else:
                break
        if not (isinstance(cur, N.Var) and cur.name == e.var):
            raise self.error("a lens body must be an access path starting with the lens variable", e)
        steps.reverse()
        return N.LensPath(e.var, steps, pos=e.pos)

    def e_Convert(self, e):
        return N.Convert(self.expr(e.expr), self.type_ref(e.type), pos=e.pos)

    def e_NativeE(self, e):
        return N.NativeE(e.name, self.expr(e.arg) if e.arg is not None else None, pos=e.pos)

    # already-core nodes (desugaring is idempotent)
    def e_LensPath(self, e):
        return N.LensPath(e.var, [self.step(st) for st in e.steps], pos=e.pos)

    # ------------------------------------------------------------ patterns

    def pattern(self, p):
        if p is None:
            return None
        if isinstance(p, (N.PWild, N.PVar, N.PLit, N.PNil)):
            return p
        if isinstance(p, N.PAs):
            return N.PAs(p.name, self.pattern(p.pattern), pos=p.pos)
        if isinstance(p, N.PCon):
            return N.PCon(p.name, p.display, self.pattern(p.arg), pos=p.pos)
        if isinstance(p, N.PDestruct):
            return N.PDestruct(p.con, p.display, self.pattern(p.arg), pos=p.pos)
        if isinstance(p, N.PGuard):
            return N.PGuard(self.pattern(p.pattern), self.expr(p.cond), pos=p.pos)
        if isinstance(p, N.PVal):
            return N.PVal(self.expr(p.expr), pos=p.pos)
        if isinstance(p, N.PPred):
            return N.PPred(self.expr(p.fn), self.pattern(p.arg), pos=p.pos)
        if isinstance(p, N.PRecord):
            return N.PRecord([(n, self.pattern(q)) for n, q in p.fields], self.pattern(p.delta), pos=p.pos)
        if isinstance(p, N.PExc):
            return N.PExc(self.pattern(p.pattern), pos=p.pos)
        if isinstance(p, N.PType):
            return N.PType(self.pattern(p.pattern), self.type_ref(p.type), pos=p.pos)
        if isinstance(p, N.PInner):
            return N.PInner(p.type, self.pattern(p.pattern), pos=p.pos)
        if isinstance(p, N.PSeq):
            return N.PSeq([self.pattern(q) for q in p.items], self.pattern(p.delta), p.brackets, pos=p.pos)
        if isinstance(p, N.PCons):
            return N.PCons(self.pattern(p.head), self.pattern(p.tail), pos=p.pos)
        if isinstance(p, N.PSet):
            return N.PSet([self.pattern(q) for q in p.items], self.pattern(p.delta), pos=p.pos)
        if isinstance(p, N.PMap):
            return N.PMap([(self.pattern(k), self.pattern(v)) for k, v in p.pairs], self.pattern(p.delta), pos=p.pos)
        if isinstance(p, N.PFor):
            return N.PFor([self.pattern(q) for q in p.items], self.pattern(p.delta), pos=p.pos)
        if isinstance(p, N.PDelta):
            cond = self.expr(p.cond) if p.cond is not None else None
            return N.PDelta(p.name, cond, self.pattern(p.inner), pos=p.pos)
        raise self.error(f"unexpected pattern {type(p).__name__}", p)


# ==================================================================== checks

VAL, DEF, IMPORT, PATTERN, TYPE, THIS = "val", "def", "import", "pattern", "typedef", "this"


class Scope:
    __slots__ = ("names", "parent", "barrier", "in_object", "function")

    def __init__(self, parent=None, barrier=False, in_object=None, function=False):
        self.names: dict = {}
        self.parent = parent
        self.barrier = barrier
        # captured identifiers may be reassigned inside a function body; the
        # update is local to the invocation
        self.function = function
        self.in_object = parent.in_object if (in_object is None and parent is not None) else bool(in_object)

    def lookup(self, name):
        s = self
        crossed = frozen = False
        while s is not None:
            if name in s.names:
                return s.names[name], crossed
            if s.function:
                frozen = True
            elif not frozen:
                crossed = crossed or s.barrier
            s = s.parent
        return None, crossed


class ScopeChecker:
    """Static checks over a desugared program.

    ``module_roots`` are the first path segments of every known module;
    they may be used as identifiers anywhere.
    """

    def __init__(self, module_roots=frozenset(), filename=None, module_paths=frozenset()):
        self.module_roots = set(module_roots)
        self.module_paths = set(module_paths)
        self.filename = filename

    def error(self, msg, node) -> DesugarError:
        return DesugarError(msg, node.pos, self.filename)

    def check_program(self, prog: N.Program, scope: Scope | None = None, production: bool = True) -> Scope:
        scopes: dict = {}
        for m in prog.modules:
            scopes[m.path] = self.check_module(m, scopes.get(m.path[:-1]) if m.section else None)
        scope = scope or Scope()
        self.check_block_stmts(prog.stmts, scope, production=production, toplevel=True)
        return scope

    def check_module(self, m: N.ModuleDecl, parent_scope: Scope | None = None) -> Scope:
        production = "unittest" not in m.path
        # a unittest section sees its module's members
        scope = Scope(parent_scope, barrier=True)
        self.check_block_stmts(m.stmts, scope, production=production, module=True)
        return scope

    # ------------------------------------------------------------ blocks

    def check_block_stmts(self, stmts, scope: Scope, production=True, module=False, toplevel=False, obj=False):
        """Check a statement sequence; ``scope`` is extended in place."""
        defs: dict = {}
        for s in stmts:
            if isinstance(s, N.Def):
                kind = "fn" if s.arg is not None else "simple"
                prev = defs.get(s.name)
                if prev == "simple" or (prev is not None and kind == "simple"):
                    if prev == "simple" and kind == "simple":
                        raise self.error(f"'{s.name}' has more than one simple definition", s)
                    raise self.error(f"'{s.name}' mixes simple and function definitions", s)
                defs[s.name] = kind
            elif isinstance(s, N.Typedef):
                if defs.get(s.name) not in (None, "typedef"):
                    raise self.error(f"'{s.name}' is defined both as a type and a function", s)
                defs[s.name] = "typedef"
        vals = set()
        for s in stmts:
            if isinstance(s, N.Val):
                for v in N.pattern_vars(s.pattern):
                    if v in defs:
                        raise self.error(f"'{v}' is introduced by both val and def in the same block", s)
                    vals.add(v)
        for name in defs:
            scope.names[name] = DEF if defs[name] != "typedef" else TYPE
        seen_other = False
        for s in stmts:
            if isinstance(s, N.Import):
                if seen_other:
                    raise self.error("imports must be grouped together at the beginning of a block", s)
                self.check_import(s, scope, production)
                continue
            seen_other = True
            self.check_stmt(s, scope, defs, production, module)

    def check_import(self, s: N.Import, scope, production):
        for segs, alias in s.items:
            if production and "unittest" in segs:
                raise self.error("production code cannot import unit test code", s)
            if alias == "_":
                # members of a wildcard import are only known at runtime
                scope.names["%wild"] = IMPORT
                continue
            scope.names[alias or segs[-1]] = IMPORT

    def check_stmt(self, s, scope: Scope, defs, production, module):
        if isinstance(s, N.Val):
            self.check_expr(s.expr, scope, stmt=True)
            self.bind_pattern(s.pattern, scope, VAL)
        elif isinstance(s, N.Yield):
            self.check_expr(s.expr, scope, stmt=True)
        elif isinstance(s, N.Assign):
            self.check_expr(s.expr, scope, stmt=True)
            if isinstance(s.target, N.PathTarget):
                self.check_assignable(s.target.root, scope, s)
                for st in s.target.steps:
                    if st[0] == "msgarg":
                        self.check_expr(st[2], scope)
                    elif st[0] == "lens":
                        self.check_expr(st[1], scope)
            else:
                names = N.pattern_vars(s.target)
                self.check_linear(names, s.target)
                self.check_pattern_exprs(s.target, scope)
                for n in names:
                    self.check_assignable(n, scope, s)
        elif isinstance(s, N.Def):
            inner = Scope(scope, barrier=True, function=True)
            if s.arg is not None:
                self.bind_pattern(s.arg, inner, PATTERN)
            self.check_expr(s.body, inner, stmt=True)
        elif isinstance(s, N.ConvDef):
            if not scope.in_object:
                raise self.error("'def this' is only allowed inside objects", s)
            self.check_type(s.type, scope)
            self.check_expr(s.body, Scope(scope, barrier=True, function=True), stmt=True)
        elif isinstance(s, N.Typedef):
            if not module:
                raise self.error("typedefs are only allowed inside modules", s)
            for p, e in s.clauses:
                inner = Scope(scope, barrier=True, function=True)
                self.bind_pattern(p, inner, PATTERN)
                if e is not None:
                    self.check_expr(e, inner, stmt=True)
        elif isinstance(s, N.Memoize):
            for name, _weak in s.refs:
                if defs.get(name) not in ("fn", "simple"):
                    raise self.error(f"memoize refers to '{name}', which is not defined by def in this block", s)
        elif isinstance(s, N.Private):
            if not module:
                raise self.error("'private' is only allowed inside modules", s)
            for name in s.names:
                if name not in defs and scope.names.get(name) is None:
                    raise self.error(f"private refers to unknown member '{name}'", s)
        elif isinstance(s, N.Pragma):
            if s.pattern is not None:
                inner = Scope(scope, barrier=True)
                self.check_expr(s.expr, inner)
                self.bind_pattern(s.pattern, Scope(scope, barrier=True), PATTERN)
            else:
                self.check_expr(s.expr, Scope(scope, barrier=True))
        else:
            raise self.error(f"unexpected statement {type(s).__name__}", s)

    def check_assignable(self, name, scope: Scope, node):
        kind, crossed = scope.lookup(name)
        if kind is None:
            raise self.error(f"assignment to unbound identifier '{name}'", node)
        if kind not in (VAL, PATTERN) or crossed:
            raise self.error(f"'{name}' is not in linear scope here", node)

    # ------------------------------------------------------------ patterns

    def check_linear(self, names, node):
        seen = set()
        for n in names:
            if n in seen:
                raise self.error(f"identifier '{n}' is bound twice in one pattern", node)
            seen.add(n)

    def bind_pattern(self, p, scope: Scope, kind):
        names = N.pattern_vars(p)
        self.check_linear(names, p)
        self.check_pattern_exprs(p, scope, names)
        for n in names:
            scope.names[n] = kind

    def check_pattern_exprs(self, p, scope, names=None):
        """Expressions inside a pattern see the pattern's own bindings (for guards)."""
        if names is None:
            names = N.pattern_vars(p)
        inner = Scope(scope, barrier=True)
        for n in names:
            inner.names[n] = PATTERN
        for q in _walk_pattern(p):
            if isinstance(q, N.PGuard):
                self.check_expr(q.cond, inner)
            elif isinstance(q, N.PDelta) and q.cond is not None:
                self.check_expr(q.cond, inner)
            elif isinstance(q, N.PVal):
                self.check_expr(q.expr, Scope(scope, barrier=True))
            elif isinstance(q, N.PPred):
                self.check_expr(q.fn, Scope(scope, barrier=True))
            elif isinstance(q, N.PType):
                self.check_type(q.type, scope)

    def check_type(self, t, scope):
        if isinstance(t, N.TypeExpr):
            self.check_expr(t.expr, Scope(scope, barrier=True))

    # ------------------------------------------------------------ expressions

    def check_expr(self, e, scope: Scope, stmt: bool = False):
        if isinstance(e, N.CONTROL_NODES) and not stmt:
            scope = Scope(scope, barrier=True)
        m = getattr(self, "c_" + type(e).__name__)
        m(e, scope)

    def c_Lit(self, e, scope):
        pass

    c_RealLit = c_NilE = c_RootE = c_NativeE_noarg = c_Lit

    def c_Var(self, e, scope):
        kind, _ = scope.lookup(e.name)
        if kind is None and e.name not in self.module_roots and scope.lookup("%wild")[0] is None:
            raise self.error(f"unbound identifier '{e.name}'", e)

    def c_This(self, e, scope):
        if not scope.in_object:
            raise self.error("'this' may only be used inside an object definition", e)

    def c_TypeLit(self, e, scope):
        self.check_type(e.type, scope)

    def c_Con(self, e, scope):
        if e.arg is not None:
            self.check_expr(e.arg, scope)

    def c_Send(self, e, scope):
        self.check_expr(e.target, scope)

    def c_App(self, e, scope):
        self.check_expr(e.fn, scope)
        self.check_expr(e.arg, scope)

    def c_LensApp(self, e, scope):
        self.check_expr(e.target, scope)
        self.check_expr(e.lens, scope)

    def c_ConsE(self, e, scope):
        self.check_expr(e.head, scope)
        self.check_expr(e.tail, scope)

    def c_ListE(self, e, scope):
        for x in e.items:
            self.check_expr(x, scope)

    c_VectE = c_SetE = c_ListE

    def c_MapE(self, e, scope):
        for k, v in e.pairs:
            self.check_expr(k, scope)
            self.check_expr(v, scope)

    def c_RecordE(self, e, scope):
        for _, v in e.fields:
            self.check_expr(v, scope)

    def c_IntervalE(self, e, scope):
        self.check_expr(e.lo, scope)
        self.check_expr(e.hi, scope)

    def c_Lambda(self, e, scope):
        for p, b in e.clauses:
            inner = Scope(scope, barrier=True, function=True)
            self.bind_pattern(p, inner, PATTERN)
            self.check_block_stmts(b.stmts, Scope(inner))

    def c_Block(self, e, scope):
        self.check_block_stmts(e.stmts, Scope(scope))

    def c_ObjectE(self, e, scope):
        if e.parents is not None:
            self.check_expr(e.parents, scope)
        inner = Scope(scope, barrier=True, in_object=True)
        self.check_block_stmts(e.stmts, inner, obj=True)

    def c_Match(self, e, scope):
        self.check_expr(e.scrutinee, scope)
        for p, b in e.cases:
            inner = Scope(scope)
            self.bind_pattern(p, inner, PATTERN)
            self.check_block_stmts(b.stmts, Scope(inner))

    def c_Try(self, e, scope):
        self.check_block_stmts(e.body.stmts, Scope(scope))
        for p, b in e.cases:
            inner = Scope(scope)
            self.bind_pattern(p, inner, PATTERN)
            self.check_block_stmts(b.stmts, Scope(inner))

    def c_While(self, e, scope):
        self.check_expr(e.cond, scope)
        self.check_block_stmts(e.body.stmts, Scope(scope))

    def c_For(self, e, scope):
        self.check_expr(e.coll, scope)
        inner = Scope(scope)
        self.bind_pattern(e.pattern, inner, PATTERN)
        self.check_block_stmts(e.body.stmts, Scope(inner))

    def c_With(self, e, scope):
        self.check_expr(e.collector, scope)
        self.check_block_stmts(e.body.stmts, Scope(scope, barrier=True))

    def c_Binary(self, e, scope):
        self.check_expr(e.left, scope)
        self.check_expr(e.right, scope)

    c_Xor = c_Binary

    def c_Chain(self, e, scope):
        for x in e.operands:
            self.check_expr(x, scope)

    def c_Prefix(self, e, scope):
        self.check_expr(e.operand, scope)

    def c_LensE(self, e, scope):
        self.check_expr(e.pair, scope)

    def c_LensPath(self, e, scope):
        inner = Scope(scope, barrier=True)
        inner.names[e.var] = PATTERN
        for st in e.steps:
            if st[0] == "msgarg":
                self.check_expr(st[2], inner)
            elif st[0] == "lens":
                self.check_expr(st[1], inner)

    def c_Convert(self, e, scope):
        self.check_expr(e.expr, scope)
        self.check_type(e.type, scope)

    def c_NativeE(self, e, scope):
        if e.arg is not None:
            self.check_expr(e.arg, scope)


def _walk_pattern(p):
    if p is None:
        return
    yield p
    if isinstance(p, N.PGuard):
        yield from _walk_pattern(p.pattern)
        return
    for c in p.children():
        if _is_pattern(c):
            yield from _walk_pattern(c)


def _is_pattern(n) -> bool:
    return type(n).__name__.startswith("P") and type(n).__name__ not in ("PathTarget", "Prefix", "Private", "Pragma")


def desugar_program(stmts, filename=None) -> N.Program:
    return Desugarer(filename).program(stmts)


def desugar_expr(e, filename=None):
    return Desugarer(filename).expr(e)
