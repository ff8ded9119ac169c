"""Recursive-descent parser producing the surface syntax tree.

Precedence, tightest first: message send, application, unary minus, ``^``,
multiplicative, additive, ``::``, ``to``/``downto``, ``:>``, relational
chain, ``not``, ``and``, ``or``/``xor``, ``=>``.
"""

from __future__ import annotations

from .errors import ParseError
from .lexer import Token, tokenize
from . import nodes as N

ASSIGN_OPS = {
    "=": None,
    "+=": ("+", False), "=+": ("+", True),
    "++=": ("++", False), "=++": ("++", True),
    "-=": ("-", False), "=-": ("-", True),
    "--=": ("--", False), "=--": ("--", True),
    "*=": ("*", False), "=*": ("*", True),
    "**=": ("**", False), "=**": ("**", True),
    "/=": ("/", False), "=/": ("/", True),
    "//=": ("//", False), "=//": ("//", True),
    "^=": ("^", False), "=^": ("^", True),
    "div=": ("div", False), "=div": ("div", True),
    "mod=": ("mod", False), "=mod": ("mod", True),
    "xor=": ("xor", False), "=xor": ("xor", True),
    "and=": ("and", False), "=and": ("and", True),
    "or=": ("or", False), "=or": ("or", True),
    "min=": ("min", False), "max=": ("max", False),
}

REL_OPS = ("==", "<>", "<", "<=", ">", ">=")
ADD_OPS = ("+", "-", "++", "--")
MUL_SYMS = ("*", "/", "**", "//")
WORD_MUL = ("div", "mod")
PREFIX_KWS = ("lazy", "concurrent", "force", "exception", "typeof", "random", "choose", "min", "max")
BLOCK_END_KWS = frozenset({"end", "case", "catch", "else", "elseif"})

_ATOM_KWS = frozenset({"nil", "true", "false", "this", "root", "begin", "object"})


class Parser:
    def __init__(self, tokens: list[Token], filename: str | None = None):
        self.toks = tokens
        self.i = 0
        self.filename = filename

    # ------------------------------------------------------------ helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        t = tok or self.tok
        found = t.raw if t.kind != "eof" else "end of input"
        if t.kind == "nl":
            found = "newline"
        return ParseError(f"{msg} (found {found!r})", t.pos, self.filename)

    def at_sym(self, *syms: str) -> bool:
        return self.tok.kind == "sym" and self.tok.value in syms

    def at_kw(self, *kws: str) -> bool:
        return self.tok.kind == "kw" and self.tok.value in kws

    def expect_sym(self, sym: str) -> Token:
        if not self.at_sym(sym):
            raise self.error(f"expected {sym!r}")
        return self.advance()

    def expect_kw(self, kw: str) -> Token:
        self.skip_nl()
        if not self.at_kw(kw):
            raise self.error(f"expected {kw!r}")
        return self.advance()

    def expect_ident(self) -> Token:
        if self.tok.kind != "ident":
            raise self.error("expected an identifier")
        return self.advance()

    def skip_nl(self) -> None:
        while self.tok.kind == "nl":
            self.advance()

    def skip_seps(self) -> None:
        while self.tok.kind == "nl" or self.at_sym(";"):
            self.advance()

    def nl_then(self, pred) -> bool:
        """True if, after skipping newlines, ``pred`` holds; newlines are consumed only then."""
        j = self.i
        while self.toks[j].kind == "nl":
            j += 1
        save = self.i
        self.i = j
        if pred():
            return True
        self.i = save
        return False

    # ------------------------------------------------------------ program

    def program(self) -> list:
        stmts = self.block_stmts(top=True)
        if self.tok.kind != "eof":
            raise self.error("unexpected token")
        return stmts

    def block_stmts(self, top: bool = False, close_paren: bool = False) -> list:
        stmts = []
        while True:
            self.skip_seps()
            if self.at_block_end(top, close_paren):
                return stmts
            stmts.append(self.statement())
            if self.tok.kind == "nl" or self.at_sym(";"):
                continue
            if self.at_block_end(top, close_paren):
                return stmts
            raise self.error("expected a newline or ';' between statements")

    def at_block_end(self, top: bool, close_paren: bool) -> bool:
        t = self.tok
        if t.kind == "eof":
            return True
        if top:
            return False
        if t.kind == "kw" and t.value in BLOCK_END_KWS:
            return True
        return close_paren and t.kind == "sym" and t.value == ")"

    def block(self, close_paren: bool = False) -> N.Block:
        pos = self.tok.pos
        return N.Block(self.block_stmts(close_paren=close_paren), pos=pos)

    # ------------------------------------------------------------ statements

    def statement(self):
        t = self.tok
        pos = t.pos
        if t.kind == "pragma":
            return self.pragma()
        if t.kind == "kw":
            kw = t.value
            if kw == "val":
                self.advance()
                p = self.pattern()
                self.expect_sym("=")
                return N.Val(p, self.expr(), pos=pos)
            if kw == "def":
                return self.def_stmt()
            if kw == "typedef":
                return self.typedef_stmt()
            if kw == "memoize":
                self.advance()
                refs = []
                while True:
                    if self.at_sym("("):
                        self.advance()
                        refs.append((self.expect_ident().value, True))
                        self.expect_sym(")")
                    else:
                        refs.append((self.expect_ident().value, False))
                    if not self.at_sym(","):
                        break
                    self.advance()
                return N.Memoize(refs, pos=pos)
            if kw == "import":
                return self.import_stmt()
            if kw == "private":
                self.advance()
                names = [self.expect_ident().value]
                while self.at_sym(","):
                    self.advance()
                    names.append(self.expect_ident().value)
                return N.Private(names, pos=pos)
            if kw == "yield":
                self.advance()
                return N.Yield(self.expr(), pos=pos)
            if kw == "module":
                self.advance()
                path = self.dotted_path()
                stmts = self.block_stmts()
                self.expect_kw("end")
                return N.Module(tuple(path), stmts, pos=pos)
            if kw == "unittest" and (self.peek().kind in ("nl", "eof") or self.peek().is_sym(";")):
                self.advance()
                return N.UnittestMarker(pos=pos)
        e = self.expr()
        if self.tok.kind == "sym" and self.tok.value in ASSIGN_OPS:
            op_tok = self.advance()
            rhs = self.expr()
            target = self.to_target(e, op_tok.value)
            return N.Assign(target, op_tok.value, rhs, pos=pos)
        return N.Yield(e, pos=pos)

    def pragma(self):
        t = self.advance()
        if t.value == "catch":
            p = self.pattern()
            self.expect_kw("try")
            return N.Pragma("catch", self.expr(), p, pos=t.pos)
        return N.Pragma(t.value, self.expr(), pos=t.pos)

    def def_stmt(self):
        pos = self.advance().pos
        if self.at_kw("this"):
            self.advance()
            if self.at_sym(":"):
                auto = True
            elif self.at_sym(":>"):
                auto = False
            else:
                raise self.error("expected ':' or ':>' after 'def this'")
            self.advance()
            ty = self.type_ref()
            self.expect_sym("=")
            return N.ConvDef(ty, auto, self.expr(), pos=pos)
        name = self.expect_ident().value
        arg = None
        if not self.at_sym("=", ":"):
            arg = self.atom_pattern()
        rettype = None
        if self.at_sym(":"):
            self.advance()
            rettype = self.type_ref()
        self.expect_sym("=")
        return N.Def(name, arg, self.expr(), rettype, pos=pos)

    def typedef_stmt(self):
        pos = self.advance().pos
        name = self.expect_ident().value
        clauses = []
        while True:
            p = self.pattern()
            body = None
            if self.at_sym("="):
                self.advance()
                body = self.expr()
            clauses.append((p, body))
            if not self.at_sym(","):
                break
            self.advance()
        return N.Typedef(name, clauses, pos=pos)

    def import_stmt(self):
        pos = self.advance().pos
        segs = [self.path_segment(first=True)]
        while self.at_sym("."):
            self.advance()
            if self.at_sym("{"):
                self.advance()
                items = []
                while True:
                    self.skip_nl()
                    name = self.expect_ident().value
                    alias = None
                    if self.at_sym("=>"):
                        self.advance()
                        alias = self.expect_ident().value
                    items.append((tuple(segs + [name]), alias))
                    self.skip_nl()
                    if self.at_sym(","):
                        self.advance()
                        continue
                    self.expect_sym("}")
                    return N.Import(items, pos=pos)
            if self.at_sym("_"):
                self.advance()
                return N.Import([(tuple(segs), "_")], pos=pos)
            segs.append(self.path_segment())
        alias = None
        if self.at_sym("=>"):
            self.advance()
            alias = self.expect_ident().value
        return N.Import([(tuple(segs), alias)], pos=pos)

    def path_segment(self, first: bool = False) -> str:
        if first and self.at_kw("root"):
            self.advance()
            return "root"
        if not first and self.at_kw("unittest"):
            self.advance()
            return "unittest"
        return self.expect_ident().value

    def dotted_path(self) -> list:
        segs = [self.path_segment(first=True)]
        while self.at_sym(".") and (self.peek().kind == "ident" or self.peek().is_kw("unittest")):
            self.advance()
            segs.append(self.advance().value)
        return segs

    def type_ref(self):
        pos = self.tok.pos
        if self.at_sym("("):
            self.advance()
            e = self.expr()
            self.skip_nl()
            self.expect_sym(")")
            return N.TypeExpr(e, pos=pos)
        return N.TypePath(tuple(self.dotted_path()), pos=pos)

    def to_target(self, e, op: str):
        if isinstance(e, N.Var):
            return N.PathTarget(e.name, [], pos=e.pos)
        steps = []
        cur = e
        while True:
            if isinstance(cur, N.Send):
                steps.append(("msg", cur.msg))
                cur = cur.target
            elif isinstance(cur, N.LensApp):
                steps.append(("lens", cur.lens))
                cur = cur.target
            elif isinstance(cur, N.App) and isinstance(cur.fn, N.Send):
                steps.append(("msgarg", cur.fn.msg, cur.arg))
                cur = cur.fn.target
            else:
                break
        if isinstance(cur, N.Var) and steps:
            steps.reverse()
            return N.PathTarget(cur.name, steps, pos=e.pos)
        if op != "=":
            raise ParseError("modifying assignment needs an identifier or access path", e.pos, self.filename)
        return self.expr_to_pattern(e)

    def expr_to_pattern(self, e):
        if isinstance(e, N.Var):
            return N.PVar(e.name, pos=e.pos)
        if isinstance(e, N.VectE):
            return N.PSeq([self.expr_to_pattern(x) for x in e.items], None, "()", pos=e.pos)
        if isinstance(e, N.ListE):
            return N.PSeq([self.expr_to_pattern(x) for x in e.items], None, "[]", pos=e.pos)
        if isinstance(e, N.ConsE):
            return N.PCons(self.expr_to_pattern(e.head), self.expr_to_pattern(e.tail), pos=e.pos)
        if isinstance(e, N.Con):
            arg = self.expr_to_pattern(e.arg) if e.arg is not None else None
            return N.PCon(e.name, e.display, arg, pos=e.pos)
        if isinstance(e, N.Lit) and isinstance(e.value, (int, str)):
            return N.PLit(e.value, pos=e.pos)
        raise ParseError("invalid assignment target", e.pos, self.filename)

    # ------------------------------------------------------------ expressions

    def expr(self):
        if self.starts_pattern():
            save = self.i
            try:
                p = self.pattern()
                if self.at_sym("=>"):
                    pos = self.advance().pos
                    body = self.expr()
                    return N.Lambda([(p, N.Block([N.Yield(body, pos=body.pos)], pos=body.pos))], pos=p.pos)
            except ParseError:
                pass
            self.i = save
        return self.or_expr()

    def or_expr(self):
        left = self.and_expr()
        while self.at_kw("or", "xor"):
            t = self.advance()
            right = self.and_expr()
            if t.value == "or":
                left = N.Binary("or", left, right, pos=t.pos)
            else:
                left = N.Xor(left, right, pos=t.pos)
        return left

    def and_expr(self):
        left = self.not_expr()
        while self.at_kw("and"):
            t = self.advance()
            left = N.Binary("and", left, self.not_expr(), pos=t.pos)
        return left

    def not_expr(self):
        if self.at_kw("not"):
            t = self.advance()
            return N.Unary("not", self.not_expr(), pos=t.pos)
        return self.rel_expr()

    def rel_expr(self):
        first = self.conv_expr()
        if self.at_sym("~"):
            t = self.advance()
            return N.Binary("~", first, self.conv_expr(), pos=t.pos)
        operands = [first]
        ops = []
        while self.at_sym(*REL_OPS):
            ops.append(self.advance().value)
            operands.append(self.conv_expr())
        if not ops:
            return first
        return N.Chain(operands, ops, pos=first.pos)

    def conv_expr(self):
        e = self.range_expr()
        while self.at_sym(":>"):
            t = self.advance()
            e = N.Convert(e, self.type_ref(), pos=t.pos)
        return e

    def range_expr(self):
        left = self.cons_expr()
        if self.at_kw("to", "downto"):
            t = self.advance()
            return N.Binary(t.value, left, self.cons_expr(), pos=t.pos)
        return left

    def cons_expr(self):
        left = self.add_expr()
        if self.at_sym("::"):
            t = self.advance()
            return N.ConsE(left, self.cons_expr(), pos=t.pos)
        return left

    def add_expr(self):
        left = self.mul_expr()
        while self.at_sym(*ADD_OPS):
            t = self.advance()
            left = N.Binary(t.value, left, self.mul_expr(), pos=t.pos)
        return left

    def at_mul(self) -> bool:
        if self.at_sym(*MUL_SYMS):
            return True
        return self.tok.kind == "ident" and self.tok.value in WORD_MUL

    def mul_expr(self):
        left = self.pow_expr()
        while self.at_mul():
            t = self.advance()
            left = N.Binary(t.value, left, self.pow_expr(), pos=t.pos)
        return left

    def pow_expr(self):
        base = self.unary_expr()
        if self.at_sym("^"):
            t = self.advance()
            return N.Binary("^", base, self.pow_expr(), pos=t.pos)
        return base

    def unary_expr(self):
        t = self.tok
        if self.at_sym("-"):
            self.advance()
            operand = self.unary_expr()
            if isinstance(operand, N.Lit) and type(operand.value) is int:
                return N.Lit(-operand.value, pos=t.pos)
            return N.Unary("-", operand, pos=t.pos)
        if t.kind == "kw" and t.value in PREFIX_KWS:
            self.advance()
            return N.Prefix(t.value, self.unary_expr(), pos=t.pos)
        return self.app_expr()

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("int", "real", "string", "con"):
            return True
        if t.kind == "ident":
            return t.value not in WORD_MUL
        if t.kind == "kw":
            return t.value in _ATOM_KWS
        return t.kind == "sym" and t.value in ("(", "[", "{")

    def app_expr(self):
        fn = self.postfix_expr()
        while self.starts_atom():
            arg = self.postfix_expr()
            fn = N.App(fn, arg, pos=arg.pos)
        return fn

    def postfix_expr(self):
        e = self.primary()
        while self.at_sym("."):
            t = self.advance()
            if self.at_sym("("):
                self.advance()
                lens = self.expr()
                self.skip_nl()
                self.expect_sym(")")
                e = N.LensApp(e, lens, pos=t.pos)
            else:
                e = N.Send(e, self.expect_ident().value, pos=t.pos)
        return e

    def primary(self):
        t = self.tok
        pos = t.pos
        k = t.kind
        if k == "int" or k == "string":
            self.advance()
            return N.Lit(t.value, pos=pos)
        if k == "real":
            self.advance()
            return N.RealLit(t.value, pos=pos)
        if k == "ident":
            self.advance()
            return N.Var(t.value, pos=pos)
        if k == "con":
            self.advance()
            arg = self.postfix_expr() if self.starts_atom() else None
            return N.Con(t.value, t.raw, arg, pos=pos)
        if k == "sym":
            v = t.value
            if v == "(":
                return self.paren_expr()
            if v == "[":
                return self.bracket_expr()
            if v == "{":
                return self.brace_expr()
            if v in ("&", "|"):
                raise self.error("reserved symbol")
            raise self.error("expected an expression")
        if k == "kw":
            v = t.value
            if v in ("true", "false"):
                self.advance()
                return N.Lit(v == "true", pos=pos)
            if v == "nil":
                self.advance()
                return N.NilE(pos=pos)
            if v == "this":
                self.advance()
                return N.This(pos=pos)
            if v == "root":
                self.advance()
                return N.RootE(pos=pos)
            if v == "begin":
                self.advance()
                b = self.block()
                self.expect_kw("end")
                b.pos = pos
                return b
            if v == "object":
                self.advance()
                parents = None
                if self.at_sym("+"):
                    self.advance()
                    parents = self.app_expr()
                stmts = self.block_stmts()
                self.expect_kw("end")
                return N.ObjectE(stmts, parents, pos=pos)
            if v == "if":
                return self.if_expr()
            if v == "match":
                self.advance()
                scrut = self.expr()
                cases = self.cases()
                self.expect_kw("end")
                return N.Match(scrut, cases, pos=pos)
            if v == "try":
                self.advance()
                body = self.block()
                self.expect_kw("catch")
                cases = self.cases()
                if not cases:
                    raise self.error("try needs at least one catch case")
                self.expect_kw("end")
                return N.Try(body, cases, pos=pos)
            if v == "while":
                self.advance()
                cond = self.expr()
                self.expect_kw("do")
                body = self.block()
                self.expect_kw("end")
                return N.While(cond, body, pos=pos)
            if v == "for":
                self.advance()
                p = self.pattern()
                self.expect_kw("in")
                coll = self.expr()
                self.expect_kw("do")
                body = self.block()
                self.expect_kw("end")
                return N.For(p, coll, body, pos=pos)
            if v == "with":
                self.advance()
                coll = self.expr()
                if self.at_sym(":"):
                    self.advance()
                    self.skip_nl()
                    stmt = self.statement()
                    return N.With(coll, N.Block([stmt], pos=stmt.pos), pos=pos)
                self.expect_kw("do")
                body = self.block()
                self.expect_kw("end")
                return N.With(coll, body, pos=pos)
            if v == "lens":
                self.advance()
                e = self.expr()
                if isinstance(e, N.Lambda) and len(e.clauses) == 1 and isinstance(e.clauses[0][0], N.PVar):
                    p, body = e.clauses[0]
                    return N.LensE(None, p.name, body.stmts[0].expr, pos=pos)
                return N.LensE(e, pos=pos)
            if v == "native":
                self.advance()
                if self.tok.kind != "con":
                    raise self.error("expected a constructor after 'native'")
                name = self.advance().value
                arg = self.postfix_expr() if self.starts_atom() else None
                return N.NativeE(name, arg, pos=pos)
        raise self.error("expected an expression")

    def if_expr(self):
        pos = self.advance().pos
        branches = []
        cond = self.expr()
        self.expect_kw("then")
        branches.append((cond, self.block()))
        orelse = None
        while True:
            self.skip_nl()
            if self.at_kw("elseif"):
                self.advance()
                cond = self.expr()
                self.expect_kw("then")
                branches.append((cond, self.block()))
                continue
            if self.at_kw("else"):
                self.advance()
                orelse = self.block()
            break
        self.expect_kw("end")
        return N.If(branches, orelse, pos=pos)

    def cases(self, close_paren: bool = False) -> list:
        out = []
        while self.nl_then(lambda: self.at_kw("case")):
            self.advance()
            p = self.pattern()
            self.expect_sym("=>")
            out.append((p, self.block(close_paren=close_paren)))
        return out

    def paren_expr(self):
        pos = self.advance().pos
        self.skip_nl()
        if self.at_sym(")"):
            self.advance()
            return N.VectE([], pos=pos)
        if self.at_sym(":"):
            self.advance()
            ty = self.type_ref()
            self.skip_nl()
            self.expect_sym(")")
            return N.TypeLit(ty, pos=pos)
        if self.at_kw("case"):
            cases = self.cases(close_paren=True)
            self.skip_nl()
            self.expect_sym(")")
            return N.Lambda(cases, pos=pos)
        first = self.expr()
        self.skip_nl()
        if self.at_sym(")"):
            self.advance()
            return first
        items = [first]
        while self.at_sym(","):
            self.advance()
            self.skip_nl()
            if self.at_sym(")"):
                break
            items.append(self.expr())
            self.skip_nl()
        self.expect_sym(")")
        return N.VectE(items, pos=pos)

    def bracket_expr(self):
        pos = self.advance().pos
        self.skip_nl()
        if self.at_sym("]"):
            self.advance()
            return N.ListE([], pos=pos)
        first = self.expr()
        self.skip_nl()
        if self.at_sym(";"):
            self.advance()
            hi = self.expr()
            self.skip_nl()
            self.expect_sym("]")
            return N.IntervalE(first, hi, pos=pos)
        items = [first]
        while self.at_sym(","):
            self.advance()
            self.skip_nl()
            items.append(self.expr())
            self.skip_nl()
        self.expect_sym("]")
        return N.ListE(items, pos=pos)

    def brace_expr(self):
        pos = self.advance().pos
        self.skip_nl()
        if self.at_sym("}"):
            self.advance()
            return N.SetE([], pos=pos)
        if self.at_sym("->"):
            self.advance()
            self.skip_nl()
            self.expect_sym("}")
            return N.MapE([], pos=pos)
        if self.tok.kind == "ident" and self.peek().is_sym("="):
            fields = []
            while True:
                self.skip_nl()
                name = self.expect_ident().value
                self.expect_sym("=")
                fields.append((name, self.expr()))
                self.skip_nl()
                if self.at_sym(","):
                    self.advance()
                    continue
                self.expect_sym("}")
                return N.RecordE(fields, pos=pos)
        first = self.expr()
        self.skip_nl()
        if self.at_sym("->"):
            self.advance()
            pairs = [(first, self.expr())]
            self.skip_nl()
            while self.at_sym(","):
                self.advance()
                self.skip_nl()
                k = self.expr()
                self.expect_sym("->")
                pairs.append((k, self.expr()))
                self.skip_nl()
            self.expect_sym("}")
            return N.MapE(pairs, pos=pos)
        items = [first]
        while self.at_sym(","):
            self.advance()
            self.skip_nl()
            items.append(self.expr())
            self.skip_nl()
        self.expect_sym("}")
        return N.SetE(items, pos=pos)

    # ------------------------------------------------------------ patterns

    def starts_pattern(self) -> bool:
        t = self.tok
        if t.kind in ("int", "string", "ident", "con"):
            return True
        if t.kind == "kw":
            return t.value in ("nil", "true", "false", "exception")
        if t.kind == "sym":
            return t.value in ("_", "(", "[", "{", "...") or (t.value == "-" and self.peek().kind == "int")
        return False

    def starts_atom_pattern(self) -> bool:
        t = self.tok
        if t.kind in ("int", "string", "ident", "con"):
            return True
        if t.kind == "kw":
            return t.value in ("nil", "true", "false")
        return t.kind == "sym" and t.value in ("_", "(", "[", "{")

    def pattern(self):
        p = self.as_pattern()
        if self.at_kw("if"):
            t = self.advance()
            return N.PGuard(p, self.or_expr(), pos=t.pos)
        return p

    def as_pattern(self):
        t = self.tok
        if t.kind == "ident" and self.peek().is_kw("as"):
            self.advance()
            self.advance()
            return N.PAs(t.value, self.as_pattern(), pos=t.pos)
        p = self.cons_pattern()
        if self.at_sym(":"):
            c = self.advance()
            return N.PType(p, self.type_ref(), pos=c.pos)
        return p

    def cons_pattern(self):
        head = self.app_pattern()
        if self.at_sym("::"):
            t = self.advance()
            return N.PCons(head, self.cons_pattern(), pos=t.pos)
        return head

    def app_pattern(self):
        t = self.tok
        if t.kind == "con":
            self.advance()
            if self.at_sym("!"):
                self.advance()
                arg = self.atom_pattern() if self.starts_atom_pattern() else None
                return N.PDestruct(t.value, t.raw, arg, pos=t.pos)
            if self.at_sym("-") and self.peek().kind == "int":
                arg = self.neg_int_pattern()
            else:
                arg = self.atom_pattern() if self.starts_atom_pattern() else None
            return N.PCon(t.value, t.raw, arg, pos=t.pos)
        if t.kind == "kw" and t.value == "exception":
            self.advance()
            return N.PExc(self.app_pattern(), pos=t.pos)
        if t.kind == "ident":
            j = 1
            segs = [t.value]
            while self.peek(j).is_sym(".") and self.peek(j + 1).kind == "ident":
                segs.append(self.peek(j + 1).value)
                j += 2
            save = self.i
            self.i += j
            if self.starts_atom_pattern():
                inner = self.atom_pattern()
                return N.PInner(N.TypePath(tuple(segs), pos=t.pos), inner, pos=t.pos)
            self.i = save
        if self.at_sym("-") and self.peek().kind == "int":
            return self.neg_int_pattern()
        return self.atom_pattern()

    def neg_int_pattern(self):
        pos = self.advance().pos
        return N.PLit(-self.advance().value, pos=pos)

    def atom_pattern(self):
        t = self.tok
        pos = t.pos
        k = t.kind
        if k == "ident":
            self.advance()
            return N.PVar(t.value, pos=pos)
        if k in ("int", "string"):
            self.advance()
            return N.PLit(t.value, pos=pos)
        if k == "con":
            self.advance()
            return N.PCon(t.value, t.raw, None, pos=pos)
        if k == "kw":
            if t.value in ("true", "false"):
                self.advance()
                return N.PLit(t.value == "true", pos=pos)
            if t.value == "nil":
                self.advance()
                return N.PNil(pos=pos)
        if k == "sym":
            v = t.value
            if v == "_":
                self.advance()
                return N.PWild(pos=pos)
            if v == "...":
                self.advance()
                return N.PDelta(pos=pos)
            if v == "(":
                return self.paren_pattern()
            if v == "[":
                self.advance()
                items, delta = self.pattern_items("]")
                return N.PSeq(items, delta, "[]", pos=pos)
            if v == "{":
                return self.brace_pattern()
        raise self.error("expected a pattern")

    def pattern_items(self, close: str):
        items = []
        self.skip_nl()
        if self.at_sym(close):
            self.advance()
            return items, None
        while True:
            self.skip_nl()
            items.append(self.pattern())
            self.skip_nl()
            if self.at_sym(","):
                self.advance()
                continue
            break
        self.expect_sym(close)
        return self.split_delta(items)

    def split_delta(self, items):
        for p in items[:-1]:
            if _is_delta(p):
                raise ParseError("a rest pattern may only appear last", p.pos, self.filename)
        if items and _is_delta(items[-1]):
            return items[:-1], _to_delta(items[-1])
        return items, None

    def paren_pattern(self):
        pos = self.advance().pos
        self.skip_nl()
        if self.at_sym(")"):
            self.advance()
            return N.PSeq([], None, "()", pos=pos)
        if self.at_kw("val"):
            self.advance()
            e = self.or_expr()
            self.skip_nl()
            self.expect_sym(")")
            return N.PVal(e, pos=pos)
        if self.at_kw("for"):
            self.advance()
            items = []
            while True:
                self.skip_nl()
                if self.at_kw("end"):
                    break
                items.append(self.pattern())
                self.skip_nl()
                if self.at_sym(","):
                    self.advance()
                    continue
                break
            self.expect_kw("end")
            self.skip_nl()
            self.expect_sym(")")
            items, delta = self.split_delta(items)
            return N.PFor(items, delta, pos=pos)
        # predicate pattern (f ? p)
        save = self.i
        try:
            fn = self.or_expr()
            if self.at_sym("?"):
                self.advance()
                self.skip_nl()
                arg = None
                if not self.at_sym(")"):
                    arg = self.pattern()
                    self.skip_nl()
                self.expect_sym(")")
                return N.PPred(fn, arg, pos=pos)
        except ParseError:
            pass
        self.i = save
        first = self.pattern()
        self.skip_nl()
        if self.at_sym(")"):
            self.advance()
            return first
        items = [first]
        single = False
        while self.at_sym(","):
            self.advance()
            self.skip_nl()
            if self.at_sym(")"):
                single = len(items) == 1
                break
            items.append(self.pattern())
            self.skip_nl()
        self.expect_sym(")")
        items, delta = self.split_delta(items)
        del single
        return N.PSeq(items, delta, "()", pos=pos)

    def brace_pattern(self):
        pos = self.advance().pos
        self.skip_nl()
        if self.at_sym("}"):
            self.advance()
            return N.PSet([], None, pos=pos)
        if self.at_sym("->"):
            self.advance()
            self.skip_nl()
            self.expect_sym("}")
            return N.PMap([], None, pos=pos)
        if self.tok.kind == "ident" and self.peek().is_sym("="):
            fields = []
            delta = None
            while True:
                self.skip_nl()
                if self.tok.kind == "ident" and self.peek().is_sym("="):
                    name = self.advance().value
                    self.advance()
                    fields.append((name, self.pattern()))
                else:
                    p = self.pattern()
                    if not _is_delta(p):
                        raise ParseError("expected 'message = pattern'", p.pos, self.filename)
                    delta = _to_delta(p)
                    self.skip_nl()
                    break
                self.skip_nl()
                if self.at_sym(","):
                    self.advance()
                    continue
                break
            self.expect_sym("}")
            return N.PRecord(fields, delta, pos=pos)
        first = self.pattern()
        self.skip_nl()
        if self.at_sym("->"):
            self.advance()
            pairs = [(first, self.pattern())]
            delta = None
            self.skip_nl()
            while self.at_sym(","):
                self.advance()
                self.skip_nl()
                k = self.pattern()
                if _is_delta(k):
                    delta = _to_delta(k)
                    self.skip_nl()
                    break
                self.expect_sym("->")
                pairs.append((k, self.pattern()))
                self.skip_nl()
            self.expect_sym("}")
            return N.PMap(pairs, delta, pos=pos)
        items = [first]
        while self.at_sym(","):
            self.advance()
            self.skip_nl()
            items.append(self.pattern())
            self.skip_nl()
        self.expect_sym("}")
        items, delta = self.split_delta(items)
        return N.PSet(items, delta, pos=pos)


_SUGAR_MSGS = {
    "+": "plus_", "-": "minus_", "*": "times_", "/": "slash_", "div": "div_", "mod": "mod_",
    "^": "pow_", "++": "plus__", "--": "minus__", "**": "times__", "//": "slash__",
    "to": "to_", "downto": "downto_",
}


def _is_delta(p) -> bool:
    if isinstance(p, N.PDelta):
        return True
    if isinstance(p, N.PAs):
        return _is_delta(p.pattern)
    if isinstance(p, N.PGuard):
        return _is_delta(p.pattern)
    return False


def _to_delta(p) -> N.PDelta:
    if isinstance(p, N.PDelta):
        return p
    if isinstance(p, N.PAs):
        return N.PDelta(name=p.name, inner=_to_delta(p.pattern), pos=p.pos)
    return N.PDelta(cond=p.cond, inner=_to_delta(p.pattern), pos=p.pos)


def parse_program(source, filename: str | None = None) -> list:
    tokens = source if isinstance(source, list) else tokenize(source)
    return Parser(tokens, filename).program()


def parse_expression(source, filename: str | None = None):
    tokens = source if isinstance(source, list) else tokenize(source)
    p = Parser(tokens, filename)
    p.skip_nl()
    e = p.expr()
    p.skip_seps()
    if p.tok.kind != "eof":
        raise p.error("unexpected token after expression")
    return e
