"""Tree-walking evaluation of desugared programs."""

from __future__ import annotations

import random
import threading
import time

from . import interval as iv
from . import nodes as N
from . import order
from . import stdlib
from .errors import BabelException
from .matcher import match_cases, try_match
from .render import Const, render
from .runtime import (
    EMPTY_COLLECTOR, BuiltinCollector, DefGroup, DefInfo, Env, ImportRef, MemoTable, State,
    ValueCollector,
)
from .values import (
    NIL, BList, BMap, BSet, Builtin, BUILTIN_TYPES, BVect, CExpr, Closure, DynExc, Lens,
    ModuleRef, Obj, PersistentExc, Thunk, TypeCtor, TypeValue, UserValue, domain_error, exc,
    force, no_match, type_of,
)

_BUILTIN_COLLECTIONS = (BList, BVect, BSet, BMap, str)


class PragmaResult:
    __slots__ = ("kind", "pos", "ok", "message", "module")

    def __init__(self, kind, pos, ok, message, module):
        self.kind = kind
        self.pos = pos
        self.ok = ok
        self.message = message
        self.module = module


class Interp:
    """Evaluates expressions and statement sequences.

    ``modules`` is the module registry (see :mod:`babel17.modsys`).
    ``on_pragma`` receives a :class:`PragmaResult` for every #assert and
    #catch; ``log`` receives formatted log lines.
    """

    def __init__(self, modules=None, seed=None, pool=None, pragmas=True, log=None,
                 on_pragma=None, filename=None):
        self.modules = modules
        self.rng = random.Random(seed)
        self.rng_lock = threading.Lock()
        self.pool = pool
        self.pragmas = pragmas
        self.log = log or (lambda line: None)
        self.on_pragma = on_pragma or (lambda r: None)
        self.filename = filename
        self.memo_tables: list = []

    # ------------------------------------------------------------ protocol used by matcher/order

    def bind_env(self, env, binds):
        return env.child(binds) if binds else env

    def auto_convert(self, v, t):
        return stdlib.try_convert(self, v, t, explicit=False)

    def iterate_step(self, c):
        return stdlib.iterate_step(self, c)

    def inside_type_module(self, env, t) -> bool:
        return not t.builtin and env.module is not None and tuple(env.module) == t.path[:-1]

    def inherits_collection(self, o: Obj) -> bool:
        return all(m in o.members and m not in o.private for m in stdlib.COLLECTION_GATE)

    def responds_to(self, v, msg) -> bool:
        v = force(v)
        if isinstance(v, UserValue):
            o = force(v.outer)
            if isinstance(o, Obj):
                return self._obj_has(o, msg)
            return self.responds_to(o, msg)
        if isinstance(v, Obj):
            return self._obj_has(v, msg)
        if isinstance(v, ModuleRef):
            return self.modules.has_member(v, msg)
        table = stdlib.METHODS.get(type(v))
        return table is not None and msg in table

    def _obj_has(self, o, msg):
        if msg in o.members and msg not in o.private:
            return True
        return msg in stdlib.INHERITED and self.inherits_collection(o)

    # ------------------------------------------------------------ messages and application

    def send(self, v, msg):
        v = force(v)
        t = type(v)
        if t is Obj:
            return self._send_obj(v, v, msg)
        if t is UserValue:
            o = force(v.outer)
            if type(o) is Obj:
                return self._send_obj(o, v, msg)
            return self.send(o, msg)
        if t is PersistentExc:
            raise BabelException(v.param)
        if t is ModuleRef:
            return self.modules.send(v, msg)
        table = stdlib.METHODS.get(t)
        if table is not None:
            entry = table.get(msg)
            if entry is not None:
                arity, fn = entry
                if arity == 0:
                    return fn(self, v)
                return Builtin(lambda x: fn(self, v, x), msg)
        raise invalid_message(v, msg)

    def _send_obj(self, o, this, msg):
        m = o.members.get(msg)
        if m is not None and msg not in o.private:
            return m(this)
        if msg in stdlib.INHERITED and self.inherits_collection(o):
            arity, fn = stdlib.INHERITED[msg]
            if arity == 0:
                return fn(self, this)
            return Builtin(lambda x: fn(self, this, x), msg)
        raise invalid_message(this, msg)

    def call_method(self, v, msg, arg):
        """``(v.msg) arg`` with a fast path for built-in members."""
        v = force(v)
        table = stdlib.METHODS.get(type(v))
        if table is not None:
            entry = table.get(msg)
            if entry is not None and entry[0] == 1:
                return entry[1](self, v, arg)
        return self.apply(self.send(v, msg), arg)

    def apply(self, f, x):
        f = force(f)
        t = type(f)
        if t is Closure:
            return self.call_closure(f, x)
        if t is Builtin:
            return f.fn(x)
        if t is TypeCtor:
            return self.modules.construct(f, x)
        if t is BList or t is BVect:
            i = force(x)
            if type(i) is not int or not 0 <= i < len(f.items):
                raise domain_error()
            return f.items[i]
        if t is BSet:
            return stdlib.g_contains(self, f, x)
        if t is BMap:
            return stdlib.map_lookup(self, f, x)
        if t is Lens:
            return f.get(x)
        if t is TypeValue:
            return stdlib.convert(self, x, f, explicit=True)
        if t is PersistentExc:
            raise BabelException(f.param)
        if t is UserValue:
            o = force(f.outer)
            if type(o) is not Obj:
                return self.apply(o, x)
        if t is Obj or t is UserValue:
            if self.responds_to(f, "apply_"):
                return self.apply(self.send(f, "apply_"), x)
        raise domain_error()

    def call_closure(self, c: Closure, x):
        memo = c.memo
        if memo is not None:
            key = force(x)
            found, v = memo.get(self, key)
            if found:
                return v
            v = force(self._run_clauses(c, key))
            with memo.lock:
                memo.computed += 1
            memo.put(self, key, v)
            return v
        return self._run_clauses(c, x)

    def _run_clauses(self, c, x):
        r = match_cases(self, c.clauses, x, c.env)
        if r is None:
            raise domain_error()
        body, binds = r
        return self.eval(body, self.bind_env(c.env, binds))

    # ------------------------------------------------------------ types

    def resolve_type(self, t, env, binds=None):
        if binds:
            env = env.child(binds)
        if isinstance(t, TypeValue):
            return t
        if isinstance(t, N.TypeExpr):
            v = force(self.eval(t.expr, env))
            if isinstance(v, TypeCtor):
                return v.type
            if not isinstance(v, TypeValue):
                raise domain_error()
            return v
        segs = tuple(t.segments)
        if segs[0] == "root":
            return self.modules.type_for_path(segs[1:])
        b = env.lookup(segs[0])
        if b is not None:
            v = b[1]
            if isinstance(v, ImportRef):
                return self.modules.type_for_path(v.path + segs[1:])
            if len(segs) == 1:
                if isinstance(v, TypeCtor):
                    return v.type
                if isinstance(v, TypeValue):
                    return v
            if isinstance(v, ModuleRef):
                return self.modules.type_for_path(v.path + segs[1:])
        if len(segs) == 1 and segs[0] in BUILTIN_TYPES:
            return BUILTIN_TYPES[segs[0]]
        return self.modules.type_for_path(segs)

    # ------------------------------------------------------------ expressions

    def eval(self, e, env):
        return getattr(self, "e_" + type(e).__name__)(e, env)

    def e_Lit(self, e, env):
        return e.value

    def e_RealLit(self, e, env):
        try:
            return iv.from_literal(e.text)
        except iv.IntervalDomainError:
            raise domain_error() from None

    def e_NilE(self, e, env):
        return NIL

    def e_Var(self, e, env):
        b = env.lookup(e.name)
        if b is None:
            if self.modules is not None and self.modules.is_root(e.name):
                return ModuleRef((e.name,))
            raise RuntimeError(f"unbound identifier {e.name}")
        return self.resolve_binding(b[1], env)

    def resolve_binding(self, v, env):
        t = type(v)
        if t is DefInfo:
            return self.def_value(v, env)
        if t is ImportRef:
            return self.modules.resolve_value(v.path)
        return v

    def e_This(self, e, env):
        b = env.lookup("this")
        if b is None:
            raise domain_error()
        return b[1]

    def e_RootE(self, e, env):
        return ModuleRef(())

    def e_TypeLit(self, e, env):
        return self.resolve_type(e.type, env)

    def e_Con(self, e, env):
        param = NIL if e.arg is None else self.eval(e.arg, env)
        return CExpr(e.name, e.display, param)

    def e_Send(self, e, env):
        return self.send(self.eval(e.target, env), e.msg)

    def e_App(self, e, env):
        fn = e.fn
        if type(fn) is N.Send:
            target = self.eval(fn.target, env)
            return self.call_method(target, fn.msg, self.eval(e.arg, env))
        f = self.eval(fn, env)
        return self.apply(f, self.eval(e.arg, env))

    def e_LensApp(self, e, env):
        target = self.eval(e.target, env)
        return self.apply(self._lens(self.eval(e.lens, env)), target)

    def _lens(self, l):
        l = force(l)
        if not isinstance(l, Lens):
            raise domain_error()
        return l

    def e_ConsE(self, e, env):
        h = self.eval(e.head, env)
        t = force(self.eval(e.tail, env))
        if type(t) is BList:
            return BList((h,) + t.items)
        return BList((h, t))

    def e_ListE(self, e, env):
        return BList(tuple(self.eval(x, env) for x in e.items))

    def e_VectE(self, e, env):
        return BVect(tuple(self.eval(x, env) for x in e.items))

    def e_SetE(self, e, env):
        return stdlib.make_set(self, [self.eval(x, env) for x in e.items])

    def e_MapE(self, e, env):
        m = BMap()
        for k, v in e.pairs:
            kv = force(self.eval(k, env))
            m = stdlib.map_put(self, m, kv, self.eval(v, env))
        return m

    def e_RecordE(self, e, env):
        return Obj({n: Const(self.eval(x, env)) for n, x in e.fields})

    def e_IntervalE(self, e, env):
        lo, hi = force(self.eval(e.lo, env)), force(self.eval(e.hi, env))
        if not isinstance(lo, iv.Interval) or not isinstance(hi, iv.Interval):
            raise domain_error()
        return iv.hull(lo, hi)

    def e_Lambda(self, e, env):
        return Closure(e.clauses, env)

    def e_Binary(self, e, env):
        a = self.eval(e.left, env)
        return order.tilde(self, a, self.eval(e.right, env))

    def e_Xor(self, e, env):
        a = force(self.eval(e.left, env))
        b = force(self.eval(e.right, env))
        if type(a) is not bool or type(b) is not bool:
            raise domain_error()
        return a != b

    def e_Chain(self, e, env):
        left = self.eval(e.operands[0], env)
        for op, rhs in zip(e.ops, e.operands[1:]):
            right = self.eval(rhs, env)
            if not order.relational(self, op, left, right):
                return False
            left = right
        return True

    def e_Convert(self, e, env):
        v = self.eval(e.expr, env)
        return stdlib.convert(self, v, self.resolve_type(e.type, env), explicit=True)

    def e_NativeE(self, e, env):
        if e.arg is not None:
            self.eval(e.arg, env)
        if e.name.casefold() == "platform":
            return NIL
        raise domain_error()

    def e_Prefix(self, e, env):
        kw = e.kw
        if kw == "lazy":
            return Thunk(lambda: self.eval(e.operand, env), "lazy")
        if kw == "concurrent":
            th = Thunk(lambda: self.eval(e.operand, env), "concurrent")
            if self.pool is not None:
                self.pool.submit(th.try_claim_and_run)
            return th
        v = force(self.eval(e.operand, env))
        if kw == "force":
            return v
        if kw == "exception":
            raise BabelException(v)
        if kw == "typeof":
            return type_of(v)
        if kw == "random":
            if type(v) is not int or v <= 0:
                raise domain_error()
            with self.rng_lock:
                return self.rng.randrange(v)
        if kw == "choose":
            step = stdlib.iterate_step(self, v)
            if step is None:
                raise domain_error()
            return step[0]
        if kw == "min":
            return order.min_of(self, stdlib.elements(self, v))
        if kw == "max":
            return order.max_of(self, stdlib.elements(self, v))
        raise ValueError(kw)

    # lenses ---------------------------------------------------------------

    def e_LensE(self, e, env):
        pair = force(self.eval(e.pair, env))
        if not isinstance(pair, BVect) or len(pair.items) != 2:
            raise domain_error()
        g, p = pair.items
        return Lens(lambda u: self.apply(g, u), lambda u, t: self.apply(self.apply(p, u), t))

    def e_LensPath(self, e, env):
        steps = e.steps

        def get(u):
            return self.get_path(u, self._eval_steps(steps, env.child({e.var: u})))

        def put(u, t):
            return self.put_path(u, self._eval_steps(steps, env.child({e.var: u})), t)

        return Lens(get, put)

    def _eval_steps(self, steps, env):
        out = []
        for st in steps:
            if st[0] == "msg":
                out.append(st)
            elif st[0] == "msgarg":
                out.append(("msgarg", st[1], self.eval(st[2], env)))
            else:
                out.append(("lens", self._lens(self.eval(st[1], env))))
        return out

    def _get_step(self, u, st):
        if st[0] == "msg":
            return self.send(u, st[1])
        if st[0] == "msgarg":
            return self.call_method(u, st[1], st[2])
        return st[1].get(u)

    def get_path(self, u, steps):
        for st in steps:
            u = self._get_step(u, st)
        return u

    def put_path(self, u, steps, t):
        """Replace the part of ``u`` reached by the evaluated ``steps`` with ``t``."""
        if not steps:
            return t
        st = steps[0]
        if len(steps) > 1:
            t = self.put_path(self._get_step(u, st), steps[1:], t)
        if st[0] == "lens":
            return st[1].put(u, t)
        pb = st[1] + "_putback_"
        has_pb = self.responds_to(u, pb)
        if st[0] == "msgarg":
            if not has_pb:
                raise domain_error()
            return self.apply(self.call_method(u, pb, st[2]), t)
        if has_pb:
            return self.apply(self.send(u, pb), t)
        o = force(u)
        if isinstance(o, Obj):
            members = dict(o.members)
            members[st[1]] = Const(t)
            return Obj(members, o.convs, o.private - {st[1]})
        raise domain_error()

    # ------------------------------------------------------------ control expressions

    def e_Block(self, e, env):
        return self._eval_control(e, env)

    e_Match = e_Try = e_While = e_For = e_Block

    def _eval_control(self, e, env):
        st = State(env)
        self.exec_control(e, st)
        return st.coll.close(self)

    def eval_rhs(self, e, st: State):
        """Right-hand side of val/assignment: linear scope extends into control expressions."""
        if isinstance(e, N.CONTROL_NODES):
            sub = State(st.env)
            self.exec_control(e, sub)
            st.merge(sub.updates)
            return sub.coll.close(self)
        return self.eval(e, st.env)

    def exec_control(self, e, st: State):
        t = type(e)
        if t is N.Block:
            self._run_nested(e, st.env, st)
        elif t is N.Match:
            try:
                v = self.eval(e.scrutinee, st.env)
            except BabelException as ex:
                v = DynExc(ex.param)
            r = match_cases(self, e.cases, v, st.env)
            if r is None:
                if isinstance(v, DynExc):
                    raise BabelException(v.param)
                raise no_match()
            body, binds = r
            self._run_nested(body, self.bind_env(st.env, binds), st)
        elif t is N.Try:
            saved = st.coll
            sub = State(st.env, st.coll)
            try:
                self.exec_stmts(e.body.stmts, sub)
            except BabelException as ex:
                st.coll = saved
                r = match_cases(self, e.cases, ex.param, st.env)
                if r is None:
                    raise
                body, binds = r
                self._run_nested(body, self.bind_env(st.env, binds), st)
            else:
                st.coll = sub.coll
                st.merge(sub.updates)
        elif t is N.While:
            while True:
                c = force(self.eval(e.cond, st.env))
                if type(c) is not bool:
                    raise domain_error()
                if not c:
                    break
                self._run_nested(e.body, st.env, st)
        elif t is N.For:
            coll = self.eval(e.coll, st.env)
            for x in stdlib.iter_elements(self, coll):
                binds = try_match(self, e.pattern, x, st.env)
                if binds is None:
                    continue
                self._run_nested(e.body, self.bind_env(st.env, binds), st)
        else:
            raise ValueError(t)

    def _run_nested(self, block, env, st: State):
        sub = State(env, st.coll)
        self.exec_stmts(block.stmts, sub)
        st.coll = sub.coll
        st.merge(sub.updates)

    def e_With(self, e, env):
        c = force(self.eval(e.collector, env))
        coll = BuiltinCollector(c) if isinstance(c, _BUILTIN_COLLECTIONS) else ValueCollector(c)
        st = State(env, coll)
        self.exec_stmts(e.body.stmts, st)
        return st.coll.close(self)

    # ------------------------------------------------------------ objects

    def e_ObjectE(self, e, env):
        members: dict = {}
        convs: dict = {}
        if e.parents is not None:
            pv = force(self.eval(e.parents, env))
            if not isinstance(pv, (BList, BVect, BSet)):
                raise domain_error()
            for p in reversed(pv.items):
                p = force(p)
                if isinstance(p, UserValue):
                    p = force(p.outer)
                if not isinstance(p, Obj):
                    raise domain_error()
                members.update((n, m) for n, m in p.members.items() if n not in p.private)
                convs.update(p.convs)
        st = State(Env({}, env))
        group = self.bind_defs(e.stmts, st, in_object=True)
        own_convs: dict = {}
        for s in e.stmts:
            if isinstance(s, N.ConvDef):
                t = self.resolve_type(s.type, st.env)
                fn = self._conv_fn(s.body, st.env)
                auto_fn, explicit_fn = own_convs.get(t, (None, None))
                own_convs[t] = (fn, explicit_fn) if s.auto else (auto_fn, fn)
            else:
                self.exec_stmt(s, st, group)
        convs.update(own_convs)
        for name, info in group.defs.items():
            members[name] = self._member_fn(info)
        return Obj(members, convs)

    def _conv_fn(self, body, env):
        return lambda this: self.eval(body, env.child({"this": this}))

    def _member_fn(self, info):
        return lambda this: self.def_value(info, None, this)

    # ------------------------------------------------------------ definitions

    def bind_defs(self, stmts, st: State, in_object=False, module=False) -> DefGroup:
        """Bind every def of a statement sequence (mutually recursive) into ``st.env``."""
        group = DefGroup(in_object)
        binds: dict = {}
        for s in stmts:
            if isinstance(s, N.Def):
                info = group.defs.get(s.name)
                if info is None:
                    info = group.defs[s.name] = DefInfo(s.name, group)
                    binds[s.name] = info
                info.clauses.append((s.arg, s.body))
        for s in stmts:
            if isinstance(s, N.Memoize):
                for name, weak in s.refs:
                    info = group.defs.get(name)
                    if info is not None and not in_object:
                        info.memo = MemoTable(weak)
                        self.memo_tables.append((name, info.memo))
        if binds:
            st.env = st.env.child(binds)
        group.env = st.env
        return group

    def def_value(self, info: DefInfo, env, this=None):
        group = info.group
        denv = info.env if info.env is not None else group.env
        if group.in_object:
            if this is None:
                b = env.lookup("this") if env is not None else None
                if b is None:
                    raise domain_error()
                this = b[1]
            denv = denv.child({"this": this})
        if info.simple:
            body = info.clauses[0][1]
            if info.memo is not None:
                found, v = info.memo.get(self, BVect(()))
                if found:
                    return v
                v = force(self.eval(body, denv))
                with info.memo.lock:
                    info.memo.computed += 1
                info.memo.put(self, BVect(()), v)
                return v
            return self.eval(body, denv)
        if info.closure is not None:
            return info.closure
        c = Closure(info.clauses, denv, info.name, info.memo)
        if info.env is not None and not group.in_object:
            info.closure = c
        return c

    # ------------------------------------------------------------ statements

    def exec_block(self, stmts, env, coll=EMPTY_COLLECTOR):
        st = State(env, coll)
        self.exec_stmts(stmts, st)
        return st

    def exec_stmts(self, stmts, st: State, group=None):
        if group is None:
            group = self.bind_defs(stmts, st)
        self.bind_imports(stmts, st)
        group.env = st.env
        for s in stmts:
            self.exec_stmt(s, st, group)

    def bind_imports(self, stmts, st: State):
        for s in stmts:
            if isinstance(s, N.Import):
                for segs, alias in s.items:
                    path = self.import_path(tuple(segs), st.env)
                    if alias == "_":
                        names = self.modules.public_names(path)
                        st.env = st.env.child({n: ImportRef(path + (n,)) for n in names})
                    else:
                        st.env = st.env.child({alias or path[-1]: ImportRef(path)})

    def import_path(self, segs, env):
        if segs[0] == "root":
            return segs[1:]
        b = env.lookup(segs[0])
        if b is not None and isinstance(b[1], ImportRef):
            return b[1].path + segs[1:]
        return segs

    def exec_stmt(self, s, st: State, group):
        t = type(s)
        if t is N.Yield:
            e = s.expr
            if isinstance(e, N.CONTROL_NODES):
                self.exec_control(e, st)
            else:
                st.coll = st.coll.add(self, self.eval(e, st.env))
        elif t is N.Val:
            v = self.eval_rhs(s.expr, st)
            binds = try_match(self, s.pattern, v, st.env)
            if binds is None:
                raise no_match()
            if binds:
                st.env = st.env.child(binds)
        elif t is N.Assign:
            self.exec_assign(s, st)
        elif t is N.Def:
            info = group.defs[s.name]
            if info.env is None:
                info.env = st.env
        elif t is N.Pragma:
            self.exec_pragma(s, st.env)
        elif t in (N.Memoize, N.Import, N.Private, N.Typedef, N.ConvDef):
            pass
        else:
            raise ValueError(f"unexpected statement {t.__name__}")
        group.env = st.env

    def exec_assign(self, s, st: State):
        v = self.eval_rhs(s.expr, st)
        target = s.target
        if isinstance(target, N.PathTarget):
            b = st.env.lookup(target.root)
            if b is None:
                raise RuntimeError(f"unbound identifier {target.root}")
            steps = self._eval_steps(target.steps, st.env)
            self._rebind(st, target.root, b[0], self.put_path(b[1], steps, v))
            return
        binds = try_match(self, target, v, st.env)
        if binds is None:
            raise no_match()
        for name, x in binds.items():
            b = st.env.lookup(name)
            if b is None:
                raise RuntimeError(f"unbound identifier {name}")
            self._rebind(st, name, b[0], x)

    def _rebind(self, st, name, ident, value):
        st.env = st.env.rebind(name, ident, value)
        st.updates[ident] = (name, value)

    # ------------------------------------------------------------ pragmas

    def _where(self, s, env) -> str:
        fname = self.modules.filename_of(env.module) if env.module and self.modules else None
        fname = fname or self.filename
        f = f"{fname}:" if fname else ""
        return f"{f}{s.pos.line}:{s.pos.column}"

    def exec_pragma(self, s, env):
        if not self.pragmas:
            return
        kind = s.kind
        where = self._where(s, env)
        module = ".".join(env.module) if env.module else None
        if kind in ("print", "log", "profile"):
            t0 = time.perf_counter()
            try:
                v = self.eval(s.expr, env)
                text = render(v, deep=kind != "log")
            except BabelException as ex:
                text = "exception " + render(ex.param)
            if kind == "profile":
                text += f" ({(time.perf_counter() - t0) * 1000:.3f} ms)"
            self.log(f"{where} {kind}: {text}")
            return
        if kind == "assert":
            try:
                v = force(self.eval(s.expr, env))
            except BabelException as ex:
                self._report(kind, where, False, "exception " + render(ex.param), module)
                return
            ok = v is True
            self._report(kind, where, ok, render(v), module)
            return
        if kind == "catch":
            try:
                v = force(self.eval(s.expr, env))
            except BabelException as ex:
                ok = try_match(self, s.pattern, ex.param, env) is not None
                self._report(kind, where, ok, "exception " + render(ex.param), module)
                return
            self._report(kind, where, False, "no exception: " + render(v), module)
            return
        raise ValueError(kind)

    def _report(self, kind, where, ok, message, module):
        self.on_pragma(PragmaResult(kind, where, ok, message, module))
        if not ok:
            self.log(f"{where} {kind}: failed: {message}")


def invalid_message(v, msg) -> BabelException:
    return exc("InvalidMessage", BVect((type_of(force(v)).name, msg)))
