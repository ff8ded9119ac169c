"""Runtime value universe.

Integers, booleans and strings are plain Python ``int``/``bool``/``str``;
reals are :class:`Interval`. Always test for ``bool`` before ``int``.
Dynamic exceptions are not values: they travel as the Python exception
:class:`BabelException` and are only reified as :class:`DynExc` while a
match statement inspects them.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

from .errors import BabelException
from .interval import Interval


@dataclass(frozen=True, slots=True)
class BList:
    items: tuple = ()


@dataclass(frozen=True, slots=True)
class BVect:
    items: tuple = ()


@dataclass(frozen=True, slots=True)
class BSet:
    """Elements in ascending built-in order, no two equal."""

    items: tuple = ()


@dataclass(frozen=True, slots=True)
class BMap:
    """Keys in ascending built-in order with parallel values."""

    keys: tuple = ()
    vals: tuple = ()


@dataclass(frozen=True, slots=True)
class CExpr:
    name: str  # case-folded constructor
    display: str = field(compare=False)
    param: object = None


@dataclass(frozen=True, slots=True)
class PersistentExc:
    param: object


@dataclass(frozen=True, slots=True)
class DynExc:
    """A dynamic exception reified for the duration of a match."""

    param: object


@dataclass(frozen=True, slots=True)
class TypeValue:
    path: tuple  # ("int",) for built-ins, module path + name for user types
    builtin: bool = False

    @property
    def name(self) -> str:
        return ".".join(self.path)


@dataclass(frozen=True, slots=True)
class ModuleRef:
    path: tuple


@dataclass(eq=False, slots=True)
class Lens:
    get: object
    put: object


@dataclass(eq=False, slots=True)
class Native:
    obj: object


class Obj:
    """A user object.

    ``members`` maps message names to functions ``this -> value``;
    ``convs`` maps a type to ``(auto_fn, explicit_fn)``, each ``this -> value`` or None. Parents are
    flattened into both tables when the object is built.
    """

    __slots__ = ("members", "convs", "private")

    def __init__(self, members=None, convs=None, private=frozenset()):
        self.members = members or {}
        self.convs = convs or {}
        self.private = private

    def __repr__(self) -> str:
        return f"Obj({sorted(self.members)})"


NIL = Obj()


class Closure:
    """A function value: pattern clauses evaluated in a captured environment."""

    __slots__ = ("clauses", "env", "name", "memo", "fail_exc")

    def __init__(self, clauses, env, name="<lambda>", memo=None, fail_exc="domainerror"):
        self.clauses = clauses
        self.env = env
        self.name = name
        self.memo = memo
        self.fail_exc = fail_exc

    def __repr__(self) -> str:
        return f"Closure({self.name})"


class Builtin:
    """A function implemented in Python."""

    __slots__ = ("fn", "name")

    def __init__(self, fn, name="<builtin>"):
        self.fn = fn
        self.name = name

    def __repr__(self) -> str:
        return f"Builtin({self.name})"


class TypeCtor:
    """The constructor function introduced by a typedef."""

    __slots__ = ("type", "clauses", "env", "module")

    def __init__(self, type_, clauses, env, module):
        self.type = type_
        self.clauses = clauses
        self.env = env
        self.module = module

    def __repr__(self) -> str:
        return f"TypeCtor({self.type.name})"


class UserValue:
    """A value of a user-defined type: it behaves like its outer value."""

    __slots__ = ("type", "inner", "outer")

    def __init__(self, type_, inner, outer):
        self.type = type_
        self.inner = inner
        self.outer = outer

    def __repr__(self) -> str:
        return f"UserValue({self.type.name})"


# ---------------------------------------------------------------- thunks

_NEW, _RUNNING, _DONE = 0, 1, 2


class Thunk:
    """A deferred computation shared by every holder of the reference.

    A concurrent thunk is also handed to the worker pool; whichever party
    claims it first (a worker or a forcing thread) runs the body, so the body
    executes at most once and a saturated pool cannot starve a forcer.
    """

    __slots__ = ("compute", "kind", "state", "value", "error", "lock", "event", "owner", "runs")

    def __init__(self, compute, kind="lazy"):
        self.compute = compute
        self.kind = kind
        self.state = _NEW
        self.value = None
        self.error = None
        self.lock = threading.Lock()
        self.event = threading.Event()
        self.owner = None
        self.runs = 0

    @property
    def done(self) -> bool:
        return self.state == _DONE

    def try_claim_and_run(self) -> None:
        with self.lock:
            if self.state != _NEW:
                return
            self.state = _RUNNING
            self.owner = threading.get_ident()
        self._run()

    def force(self):
        if self.state == _DONE:
            return self._result()
        run_here = False
        with self.lock:
            if self.state == _NEW:
                self.state = _RUNNING
                self.owner = threading.get_ident()
                run_here = True
        if run_here:
            self._run()
        else:
            if self.state != _DONE and self.owner == threading.get_ident():
                raise domain_error()
            self.event.wait()
        return self._result()

    def _result(self):
        if self.error is not None:
            raise self.error
        return self.value

    def _run(self) -> None:
        self.runs += 1
        try:
            v = force(self.compute())
        except BabelException as e:
            v = PersistentExc(e.param)
        except BaseException as e:  # interpreter fault: surface to every forcer
            self.error = e
            v = None
        self.value = v
        self.compute = None
        self.state = _DONE
        self.event.set()


def force(v):
    while isinstance(v, Thunk):
        v = v.force()
    return v


def settle(v):
    """Force ``v`` and every thunk reachable through data (not object members)."""
    v = force(v)
    todo = [v]
    while todo:
        x = todo.pop()
        if isinstance(x, (BList, BVect, BSet)):
            todo.extend(force(y) for y in x.items)
        elif isinstance(x, BMap):
            todo.extend(force(y) for y in x.keys)
            todo.extend(force(y) for y in x.vals)
        elif isinstance(x, (CExpr, PersistentExc)):
            todo.append(force(x.param))
        elif isinstance(x, UserValue):
            todo.append(force(x.outer))
    return v


# ---------------------------------------------------------------- types

_BUILTIN_TYPE_NAMES = (
    "int", "real", "bool", "string", "list", "vect", "set", "map", "cexp",
    "obj", "fun", "exc", "type", "module_", "lens_", "native_",
)
BUILTIN_TYPES = {n: TypeValue((n,), True) for n in _BUILTIN_TYPE_NAMES}
T_INT = BUILTIN_TYPES["int"]
T_REAL = BUILTIN_TYPES["real"]
T_BOOL = BUILTIN_TYPES["bool"]
T_STRING = BUILTIN_TYPES["string"]
T_LIST = BUILTIN_TYPES["list"]
T_VECT = BUILTIN_TYPES["vect"]
T_SET = BUILTIN_TYPES["set"]
T_MAP = BUILTIN_TYPES["map"]
T_CEXP = BUILTIN_TYPES["cexp"]
T_OBJ = BUILTIN_TYPES["obj"]
T_FUN = BUILTIN_TYPES["fun"]
T_EXC = BUILTIN_TYPES["exc"]
T_TYPE = BUILTIN_TYPES["type"]
T_MODULE = BUILTIN_TYPES["module_"]
T_LENS = BUILTIN_TYPES["lens_"]
T_NATIVE = BUILTIN_TYPES["native_"]


def type_of(v) -> TypeValue:
    """Type of a forced, non-exceptional value."""
    if isinstance(v, bool):
        return T_BOOL
    if isinstance(v, int):
        return T_INT
    if isinstance(v, str):
        return T_STRING
    if isinstance(v, Interval):
        return T_REAL
    if isinstance(v, BList):
        return T_LIST
    if isinstance(v, BVect):
        return T_VECT
    if isinstance(v, BSet):
        return T_SET
    if isinstance(v, BMap):
        return T_MAP
    if isinstance(v, CExpr):
        return T_CEXP
    if isinstance(v, Obj):
        return T_OBJ
    if isinstance(v, (Closure, Builtin, TypeCtor)):
        return T_FUN
    if isinstance(v, PersistentExc):
        return T_EXC
    if isinstance(v, TypeValue):
        return T_TYPE
    if isinstance(v, ModuleRef):
        return T_MODULE
    if isinstance(v, Lens):
        return T_LENS
    if isinstance(v, Native):
        return T_NATIVE
    if isinstance(v, UserValue):
        return v.type
    if isinstance(v, Thunk):
        return type_of(force(v))
    raise TypeError(f"not a Babel-17 value: {v!r}")


def con(name: str, param=None) -> CExpr:
    """Build a constructor value from its display spelling."""
    return CExpr(name.casefold(), name, NIL if param is None else param)


def exc(name: str, param=None) -> BabelException:
    return BabelException(con(name, param))


def domain_error() -> BabelException:
    return exc("DomainError")


def unrelated() -> BabelException:
    return exc("Unrelated")


def no_match() -> BabelException:
    return exc("NoMatch")


EMPTY_VECT = BVect(())
EMPTY_LIST = BList(())

_ids = itertools.count(1)


def fresh_id() -> int:
    return next(_ids)
