"""Interpreter plumbing: environments, definitions, memo tables, collectors."""

from __future__ import annotations

import threading
from collections import OrderedDict

from . import order
from .values import BVect, EMPTY_VECT, fresh_id


class Env:
    """Persistent chain of frames mapping names to ``(id, value)`` bindings.

    The id identifies the introduction of a name; a linear assignment
    rebinds the name with the same id so enclosing blocks can tell whether
    an update concerns a binding they can see.
    """

    __slots__ = ("vars", "parent", "module")

    def __init__(self, vars=None, parent=None, module=None):
        self.vars = vars if vars is not None else {}
        self.parent = parent
        self.module = module if module is not None or parent is None else parent.module

    def lookup(self, name):
        e = self
        while e is not None:
            b = e.vars.get(name)
            if b is not None:
                return b
            e = e.parent
        return None

    def child(self, values: dict) -> "Env":
        return Env({k: (fresh_id(), v) for k, v in values.items()}, self)

    def rebind(self, name: str, ident: int, value) -> "Env":
        return Env({name: (ident, value)}, self)

    def with_module(self, module) -> "Env":
        e = Env({}, self)
        e.module = module
        return e


class ImportRef:
    """An imported name; resolved each time it is used."""

    __slots__ = ("path",)

    def __init__(self, path: tuple):
        self.path = path

    def __repr__(self) -> str:
        return f"ImportRef({'.'.join(self.path)})"


class MemoTable:
    """Argument -> result cache ordered by the built-in order."""

    def __init__(self, weak: bool = False, capacity: int = 4096):
        self.weak = weak
        self.capacity = capacity
        self.keys: list = []
        self.vals: list = []
        self.computed = 0
        self.lock = threading.RLock()
        self._lru: OrderedDict = OrderedDict()

    def get(self, rt, key):
        with self.lock:
            i, found = order.search(rt, self.keys, key)
            if not found:
                return False, None
            if self.weak:
                self._lru.move_to_end(id(self.keys[i]), last=True)
            return True, self.vals[i]

    def put(self, rt, key, value) -> None:
        with self.lock:
            i, found = order.search(rt, self.keys, key)
            if found:
                return
            self.keys.insert(i, key)
            self.vals.insert(i, value)
            if self.weak:
                self._lru[id(key)] = key
                while len(self.keys) > self.capacity:
                    _, old = self._lru.popitem(last=False)
                    j, ok = order.search(rt, self.keys, old)
                    if ok:
                        del self.keys[j]
                        del self.vals[j]


class DefGroup:
    """The defs of one block; ``env`` tracks the block's latest environment."""

    __slots__ = ("env", "in_object", "defs")

    def __init__(self, in_object: bool = False):
        self.env = None
        self.in_object = in_object
        self.defs: dict = {}


class DefInfo:
    """One defined name: its clauses, frozen environment and memo table."""

    __slots__ = ("name", "clauses", "group", "env", "memo", "closure")

    def __init__(self, name, group):
        self.name = name
        self.clauses: list = []  # [(pattern | None, body)]
        self.group = group
        self.env = None
        self.memo: MemoTable | None = None
        self.closure = None

    @property
    def simple(self) -> bool:
        return self.clauses[0][0] is None

    def __repr__(self) -> str:
        return f"DefInfo({self.name})"


# ---------------------------------------------------------------- collectors


class DefaultCollector:
    """Vector collector collapsing zero or one values."""

    __slots__ = ("prev", "item", "n")

    def __init__(self, prev=None, item=None, n=0):
        self.prev = prev
        self.item = item
        self.n = n

    def add(self, rt, v):
        return DefaultCollector(self, v, self.n + 1)

    def items(self) -> tuple:
        out = []
        c = self
        while c.n:
            out.append(c.item)
            c = c.prev
        out.reverse()
        return tuple(out)

    def close(self, rt):
        if self.n == 0:
            return EMPTY_VECT
        if self.n == 1:
            return self.item
        return BVect(self.items())


EMPTY_COLLECTOR = DefaultCollector()


class BuiltinCollector:
    """Accumulates into a built-in collection; equivalent to repeated ``collector_add_``."""

    __slots__ = ("base", "added")

    def __init__(self, base, added=None):
        self.base = base
        self.added = added or DefaultCollector()

    def add(self, rt, v):
        return BuiltinCollector(self.base, self.added.add(rt, v))

    def close(self, rt):
        from .stdlib import extend_collection

        return extend_collection(rt, self.base, self.added.items())


class ValueCollector:
    """A user collector object driven by its collector messages."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def add(self, rt, v):
        return ValueCollector(rt.call_method(self.value, "collector_add_", v))

    def close(self, rt):
        return rt.send(self.value, "collector_close_")


class State:
    """Execution state of a statement sequence."""

    __slots__ = ("env", "updates", "coll")

    def __init__(self, env, coll=EMPTY_COLLECTOR):
        self.env = env
        self.updates: dict = {}
        self.coll = coll

    def merge(self, updates: dict) -> None:
        """Apply a nested block's linear assignments to bindings visible here."""
        for ident, (name, value) in updates.items():
            b = self.env.lookup(name)
            if b is not None and b[0] == ident:
                self.env = self.env.rebind(name, ident, value)
                self.updates[ident] = (name, value)
