"""The built-in partial order.

:func:`compare` returns -1, 0 or 1, or ``None`` when the operands are
unrelated. Operands are forced first; dynamic exceptions raised while
forcing (or by user ``compare_`` members, which are absorbed) follow the
usual propagation rules. ``rt`` is the interpreter; only ``send``,
``apply`` and ``auto_convert`` are used.
"""

from __future__ import annotations

from . import interval as iv
from .errors import BabelException
from .values import (
    BList, BMap, BSet, Builtin, BVect, CExpr, Closure, Lens, ModuleRef, Native, Obj,
    PersistentExc, Thunk, TypeCtor, TypeValue, UserValue, domain_error, force, type_of, unrelated,
)

_FUNS = (Closure, Builtin, TypeCtor)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def compare(rt, a, b) -> int | None:
    if isinstance(a, Thunk):
        a = force(a)
    if isinstance(b, Thunk):
        b = force(b)
    ta, tb = type(a), type(b)
    # fast paths
    if ta is int and tb is int:
        return _sign(a - b)
    if ta is str and tb is str:
        return -1 if a < b else (1 if a > b else 0)
    if a is b:
        return 0
    if ta is bool and tb is bool:
        return _sign(int(a) - int(b))
    if ta is iv.Interval and tb is iv.Interval:
        return iv.compare(a, b)
    if ta is not tb or (ta is UserValue and a.type != b.type):
        return _compare_mixed(rt, a, b)
    if ta is BList or ta is BVect or ta is BSet:
        if ta is BSet and len(a.items) != len(b.items):
            return _sign(len(a.items) - len(b.items))
        return _lex(rt, a.items, b.items)
    if ta is BMap:
        if len(a.keys) != len(b.keys):
            return _sign(len(a.keys) - len(b.keys))
        c = _lex(rt, a.keys, b.keys)
        if c != 0:
            return c
        return _lex(rt, a.vals, b.vals)
    if ta is CExpr:
        if a.name != b.name:
            return -1 if a.name < b.name else 1
        return compare(rt, a.param, b.param)
    if ta is PersistentExc:
        return compare(rt, a.param, b.param)
    if ta is TypeValue:
        return _cmp_names(a.name, b.name)
    if ta is ModuleRef:
        return _cmp_names(".".join(a.path), ".".join(b.path))
    if ta is Obj or ta is UserValue:
        return _compare_objects(rt, a, b)
    # functions, lenses and native values: only identity relates them
    return None


def _cmp_names(x: str, y: str) -> int:
    return -1 if x < y else (1 if x > y else 0)


def _lex(rt, xs, ys) -> int | None:
    for x, y in zip(xs, ys):
        c = compare(rt, x, y)
        if c != 0:
            return c
    return _sign(len(xs) - len(ys))


def _compare_mixed(rt, a, b) -> int | None:
    # lists and vectors form one ordered family
    if isinstance(a, (BList, BVect)) and isinstance(b, (BList, BVect)):
        return _lex(rt, a.items, b.items)
    if isinstance(a, _FUNS) and isinstance(b, _FUNS):
        return None
    ca = rt.auto_convert(a, type_of(b))
    if ca is not None and type(ca) is not type(a):
        return compare(rt, ca, b)
    cb = rt.auto_convert(b, type_of(a))
    if cb is not None and type(cb) is not type(b):
        return compare(rt, a, cb)
    return None


def public_members(v) -> list[str]:
    o = v.outer if isinstance(v, UserValue) else v
    if not isinstance(o, Obj):
        return []
    return sorted(n for n in o.members if n not in o.private)


def _has_member(v, name: str) -> bool:
    o = v.outer if isinstance(v, UserValue) else v
    return isinstance(o, Obj) and name in o.members and name not in o.private


def _compare_objects(rt, a, b) -> int | None:
    if _has_member(a, "compare_"):
        try:
            u = force(rt.apply(rt.send(a, "compare_"), b))
        except BabelException:
            return None
        if type(u) is int:
            return _sign(u)
        return None
    if isinstance(a, UserValue) and not isinstance(a.outer, Obj):
        return compare(rt, a.outer, b.outer)
    na, nb = public_members(a), public_members(b)
    if len(na) != len(nb):
        return _sign(len(na) - len(nb))
    c = _lex(rt, na, nb)
    if c != 0:
        return c
    for name in na:
        try:
            x, y = rt.send(a, name), rt.send(b, name)
        except BabelException:
            return None
        c = compare(rt, x, y)
        if c != 0:
            return c
    return 0


# ---------------------------------------------------------------- operators


def tilde(rt, a, b) -> int:
    """``a ~ b``: raises Unrelated when the operands are not related."""
    c = compare(rt, a, b)
    if c is None:
        raise unrelated()
    return c


def relational(rt, op: str, a, b) -> bool:
    """``==`` and ``<>`` absorb unrelatedness; the others answer false."""
    c = compare(rt, a, b)
    if c is None:
        return op == "<>"
    if op == "==":
        return c == 0
    if op == "<>":
        return c != 0
    if op == "<":
        return c < 0
    if op == "<=":
        return c <= 0
    if op == ">":
        return c > 0
    if op == ">=":
        return c >= 0
    raise ValueError(op)


def equal(rt, a, b) -> bool:
    return compare(rt, a, b) == 0


def min_of(rt, items):
    return _extreme(rt, items, -1)


def max_of(rt, items):
    return _extreme(rt, items, 1)


def _extreme(rt, items, want: int):
    it = iter(items)
    try:
        best = next(it)
    except StopIteration:
        raise domain_error() from None
    for x in it:
        c = tilde(rt, x, best)
        if c == want:
            best = x
    return best


# ---------------------------------------------------------------- sorted tuples


def search(rt, items: tuple, x) -> tuple[int, bool]:
    """Binary search in an ascending tuple; raises Unrelated on incomparable keys."""
    lo, hi = 0, len(items)
    while lo < hi:
        mid = (lo + hi) // 2
        c = tilde(rt, items[mid], x)
        if c == 0:
            return mid, True
        if c < 0:
            lo = mid + 1
        else:
            hi = mid
    return lo, False


def sort_unique(rt, items) -> tuple:
    """Sort and deduplicate (later duplicates are dropped)."""
    out: list = []
    for x in items:
        i, found = search(rt, out, x)
        if not found:
            out.insert(i, x)
    return tuple(out)


def isa_function(v) -> bool:
    return isinstance(v, (_FUNS, Lens, Native))
