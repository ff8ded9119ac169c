"""Canonical text rendering of runtime values."""

from __future__ import annotations

from . import interval as iv
from .values import (
    NIL, BList, BMap, BSet, Builtin, BVect, CExpr, Closure, Lens, ModuleRef, Native, Obj,
    PersistentExc, Thunk, TypeCtor, TypeValue, UserValue, DynExc,
)


class Const:
    """A member that always answers the same value (record fields)."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __call__(self, this):
        return self.value


def quote(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def render(v, deep: bool = True) -> str:
    """Render ``v``; with ``deep`` every pending thunk is forced first."""
    return _render(v, deep)


def _render(v, deep: bool) -> str:
    if isinstance(v, Thunk):
        if deep or v.done:
            try:
                v = v.force()
            except Exception as e:  # a forced thunk never raises a dynamic exception
                return f"<error {e}>"
            return _render(v, deep)
        return "<pending>"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return quote(v)
    if isinstance(v, iv.Interval):
        return iv.render(v)
    if isinstance(v, BList):
        return "[" + ", ".join(_render(x, deep) for x in v.items) + "]"
    if isinstance(v, BVect):
        if len(v.items) == 1:
            return "(" + _render(v.items[0], deep) + ",)"
        return "(" + ", ".join(_render(x, deep) for x in v.items) + ")"
    if isinstance(v, BSet):
        return "{" + ", ".join(_render(x, deep) for x in v.items) + "}"
    if isinstance(v, BMap):
        if not v.keys:
            return "{->}"
        return "{" + ", ".join(f"{_render(k, deep)} -> {_render(x, deep)}" for k, x in zip(v.keys, v.vals)) + "}"
    if isinstance(v, CExpr):
        if v.param is NIL or v.param is None:
            return v.display
        return f"{v.display} {_render_arg(v.param, deep)}"
    if isinstance(v, Obj):
        if v is NIL or not v.members:
            return "nil"
        names = sorted(v.members)
        if all(isinstance(v.members[n], Const) for n in names):
            return "{" + ", ".join(f"{n} = {_render(v.members[n].value, deep)}" for n in names) + "}"
        return "object(" + ", ".join(names) + ")"
    if isinstance(v, UserValue):
        return _render(v.outer, deep)
    if isinstance(v, PersistentExc):
        return f"PersistentException {_render_arg(v.param, deep)}"
    if isinstance(v, DynExc):
        return f"DynamicException {_render_arg(v.param, deep)}"
    if isinstance(v, TypeValue):
        return f"(: {v.name})"
    if isinstance(v, ModuleRef):
        return f"(module {'.'.join(v.path)})"
    if isinstance(v, TypeCtor):
        return f"<function {v.type.name}>"
    if isinstance(v, (Closure, Builtin)):
        return "<function>"
    if isinstance(v, Lens):
        return "<lens>"
    if isinstance(v, Native):
        return "<native>"
    return repr(v)


def _render_arg(v, deep: bool) -> str:
    s = _render(v, deep)
    if isinstance(v, Thunk) and v.done:
        v = v.value
    if isinstance(v, (CExpr, PersistentExc)) and " " in s:
        return f"({s})"
    if isinstance(v, int) and not isinstance(v, bool) and v < 0:
        return f"({s})"
    if isinstance(v, iv.Interval) and v.lo < 0 and v.is_point:
        return f"({s})"
    return s
