"""Module registry: loading states, deadlock detection, user types and imports."""

from __future__ import annotations

import threading

from . import nodes as N
from .errors import BabelException, DesugarError
from .matcher import try_match
from .runtime import Env, State
from .values import (
    BUILTIN_TYPES, ModuleRef, TypeCtor, TypeValue, UserValue, domain_error, exc, force,
)

DOWN, LOADING, UP = "DOWN", "LOADING", "UP"

_STATIC_STMTS = (N.Def, N.Typedef, N.Import, N.Private, N.Memoize)


class Module:
    def __init__(self, decl: N.ModuleDecl):
        self.path = tuple(decl.path)
        self.stmts = decl.stmts
        self.section = decl.section
        self.filename = decl.filename
        self.state = DOWN
        self.loader = None  # thread currently running the initialization
        self.error = None
        self.env = None
        self.needs_init = not all(isinstance(s, _STATIC_STMTS) for s in self.stmts)
        self.unittest = "unittest" in self.path
        self.private: set = set()
        self.members: set = set()
        self.typedefs: dict = {}
        for s in self.stmts:
            if isinstance(s, N.Def):
                self.members.add(s.name)
            elif isinstance(s, N.Typedef):
                self.members.add(s.name)
                self.typedefs.setdefault(s.name, []).extend(s.clauses)
            elif isinstance(s, N.Val):
                self.members.update(N.pattern_vars(s.pattern))
            elif isinstance(s, N.Private):
                self.private.update(s.names)
        self.public = sorted(self.members - self.private)
        self.ctors = {n: TypeCtor(TypeValue(self.path + (n,)), cl, None, self)
                      for n, cl in self.typedefs.items()}

    def __repr__(self) -> str:
        return f"Module({'.'.join(self.path)}, {self.state})"


class Registry:
    """All modules known to an engine."""

    def __init__(self, interp=None):
        self.interp = interp
        self.modules: dict = {}
        self.prefixes: set = set()
        self.roots: set = set()
        self.cond = threading.Condition()
        self.waiting: dict = {}  # thread id -> module it waits for

    # ------------------------------------------------------------ registration

    def register(self, decl: N.ModuleDecl) -> Module:
        path = tuple(decl.path)
        if path in self.modules:
            raise DesugarError(f"module {'.'.join(path)} is defined more than once", decl.pos, decl.filename)
        m = Module(decl)
        self.modules[path] = m
        for i in range(1, len(path) + 1):
            self.prefixes.add(path[:i])
        self.roots.add(path[0])
        return m

    def is_root(self, name: str) -> bool:
        return name in self.roots

    def filename_of(self, path):
        m = self.modules.get(tuple(path)) if path else None
        return m.filename if m is not None else None

    def public_names(self, path) -> list:
        m = self.modules.get(tuple(path))
        return list(m.public) if m is not None else []

    def test_modules(self) -> list:
        return [m for m in self.modules.values() if m.unittest]

    # ------------------------------------------------------------ messages

    def has_member(self, ref: ModuleRef, msg: str) -> bool:
        m = self.modules.get(ref.path)
        if m is not None and msg in m.members and msg not in m.private:
            return True
        return ref.path + (msg,) in self.prefixes

    def send(self, ref: ModuleRef, msg: str):
        m = self.modules.get(ref.path)
        if m is not None and msg in m.members and msg not in m.private:
            self.ensure_loaded(m)
            return self.member(m, msg)
        sub = ref.path + (msg,)
        if sub in self.prefixes:
            return ModuleRef(sub)
        from .evaluator import invalid_message

        raise invalid_message(ref, msg)

    def member(self, m: Module, name: str):
        b = m.env.lookup(name)
        if b is None:
            raise domain_error()
        return self.interp.resolve_binding(b[1], m.env)

    def resolve_value(self, path):
        v = ModuleRef(())
        for seg in path:
            v = self.interp.send(v, seg)
        return v

    # ------------------------------------------------------------ types

    def type_for_path(self, path) -> TypeValue:
        path = tuple(path)
        owner = self.modules.get(path[:-1])
        if owner is not None and path[-1] in owner.typedefs:
            return TypeValue(path)
        m = self.modules.get(path)
        if m is not None and path[-1] in m.typedefs:
            return TypeValue(path + (path[-1],))
        if len(path) == 1 and path[0] in BUILTIN_TYPES:
            return BUILTIN_TYPES[path[0]]
        raise domain_error()

    def construct(self, ctor: TypeCtor, x):
        m = ctor.module
        env = m.env
        for p, body in ctor.clauses:
            binds = try_match(self.interp, p, x, env)
            if binds is None:
                continue
            if body is None:
                outer = x
            else:
                outer = force(self.interp.eval(body, self.interp.bind_env(env, binds)))
            return UserValue(ctor.type, x, outer)
        raise domain_error()

    # ------------------------------------------------------------ loading

    def ensure_loaded(self, m: Module) -> None:
        if m.state == UP and m.error is None:
            return
        me = threading.get_ident()
        with self.cond:
            while True:
                if m.state == UP:
                    if m.error is not None:
                        _reraise(m.error)
                    return
                if m.state == DOWN:
                    m.state = LOADING
                    m.loader = me
                    break
                if self._closes_cycle(m, me):
                    raise exc("DeadLock")
                self.waiting[me] = m
                try:
                    self.cond.wait()
                finally:
                    del self.waiting[me]
        err = None
        try:
            self._load(m)
        except BaseException as e:  # recorded and delivered to every later sender
            err = e
        with self.cond:
            m.error = err
            m.state = UP
            m.loader = None
            self.cond.notify_all()
        if err is not None:
            _reraise(err)

    def _closes_cycle(self, target: Module, me) -> bool:
        """Would ``me`` waiting for ``target`` close a wait-for cycle?"""
        seen = set()
        m = target
        while m is not None and m.state == LOADING:
            t = m.loader
            if t == me:
                return True
            if t in seen:
                return False
            seen.add(t)
            m = self.waiting.get(t)
        return False

    def _load(self, m: Module) -> None:
        interp = self.interp
        if m.section:
            parent = self.modules.get(m.path[:-1])
            if parent is None:
                raise domain_error()
            self.ensure_loaded(parent)
            env = Env({}, parent.env)
        else:
            env = Env({}, None, module=m.path)
        st = State(env)
        group = interp.bind_defs(m.stmts, st)
        if m.ctors:
            st.env = st.env.child(m.ctors)
        interp.bind_imports(m.stmts, st)
        group.env = m.env = st.env
        if not m.needs_init and not m.unittest:
            for s in m.stmts:
                if isinstance(s, N.Def):
                    group.defs[s.name].env = st.env
            return
        for s in m.stmts:
            interp.exec_stmt(s, st, group)
            m.env = st.env
        m.env = st.env


def _reraise(err):
    if isinstance(err, BabelException):
        raise BabelException(err.param)
    raise err
