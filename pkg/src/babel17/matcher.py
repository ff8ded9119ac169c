"""Pattern matching.

``match(rt, p, v, env, binds)`` matches ``v`` against ``p`` and stores the
bindings in ``binds``. It answers ``True``/``False``; dynamic exceptions
raised by embedded expressions propagate as :class:`BabelException`. A
dynamic exception under inspection is passed in as :class:`DynExc` and is
only matched by ``exception p`` patterns.
"""

from __future__ import annotations

from . import nodes as N
from . import order
from .values import (
    NIL, BList, BMap, BSet, BVect, CExpr, DynExc, Obj, PersistentExc, Thunk, UserValue,
    domain_error, force, type_of,
)


def match(rt, p, v, env, binds: dict) -> bool:
    # identifiers and wildcards must not force a lazily stored element
    tp = type(p)
    if tp is N.PVar:
        if isinstance(v, DynExc):
            return False
        binds[p.name] = v
        return True
    if tp is N.PWild:
        return not isinstance(v, DynExc)
    if isinstance(v, Thunk):
        v = force(v)
    if isinstance(v, DynExc):
        if tp is N.PExc:
            return match(rt, p.pattern, v.param, env, binds)
        return False
    return _MATCHERS[tp](rt, p, v, env, binds)


def _eval(rt, e, env, binds):
    return force(rt.eval(e, rt.bind_env(env, binds) if binds else env))


def _bool(x) -> bool:
    if type(x) is not bool:
        raise domain_error()
    return x


def m_as(rt, p, v, env, binds):
    if match(rt, p.pattern, v, env, binds):
        binds[p.name] = v
        return True
    return False


def m_lit(rt, p, v, env, binds):
    return type(v) is type(p.value) and v == p.value


def m_con(rt, p, v, env, binds):
    if isinstance(v, UserValue):
        v = force(v.outer)
    if not isinstance(v, CExpr) or v.name != p.name:
        return False
    if p.arg is None:
        return True
    return match(rt, p.arg, v.param, env, binds)


def m_guard(rt, p, v, env, binds):
    if not match(rt, p.pattern, v, env, binds):
        return False
    return _bool(_eval(rt, p.cond, env, binds))


def m_val(rt, p, v, env, binds):
    w = _eval(rt, p.expr, env, binds)
    return order.compare(rt, v, w) == 0


def m_destruct(rt, p, v, env, binds):
    o = force(v.outer) if isinstance(v, UserValue) else v
    if isinstance(o, CExpr):
        if o.name != p.con:
            return False
        return p.arg is None or match(rt, p.arg, o.param, env, binds)
    if not rt.responds_to(v, "destruct_"):
        return False
    r = force(rt.apply(rt.send(v, "destruct_"), CExpr(p.con, p.display, NIL)))
    if p.arg is None:
        return True
    return match(rt, p.arg, r, env, binds)


def m_pred(rt, p, v, env, binds):
    f = _eval(rt, p.fn, env, binds)
    r = rt.apply(f, v)
    if p.arg is None:
        return force(r) is True
    return match(rt, p.arg, r, env, binds)


def m_record(rt, p, v, env, binds):
    if not isinstance(v, Obj):
        return False
    names = order.public_members(v)
    wanted = [n for n, _ in p.fields]
    if p.delta is None:
        if sorted(wanted) != names:
            return False
    elif not set(wanted) <= set(names):
        return False
    for name, q in p.fields:
        if not match(rt, q, rt.send(v, name), env, binds):
            return False
    if p.delta is not None:
        rest = Obj({n: v.members[n] for n in names if n not in wanted})
        return match_delta(rt, p.delta, rest, env, binds)
    return True


def m_nil(rt, p, v, env, binds):
    return isinstance(v, Obj) and not order.public_members(v)


def m_exc(rt, p, v, env, binds):
    if isinstance(v, PersistentExc):
        return match(rt, p.pattern, v.param, env, binds)
    return False


def m_type(rt, p, v, env, binds):
    t = rt.resolve_type(p.type, env, binds)
    if type_of(v) != t:
        w = rt.auto_convert(v, t)
        if w is None:
            return False
        v = w
    return match(rt, p.pattern, v, env, binds)


def m_inner(rt, p, v, env, binds):
    t = rt.resolve_type(p.type, env, binds)
    if not isinstance(v, UserValue) or v.type != t:
        return False
    if not rt.inside_type_module(env, t):
        return False
    return match(rt, p.pattern, v.inner, env, binds)


def _seq_items(v):
    if isinstance(v, (BList, BVect)):
        return v.items
    return None


def m_seq(rt, p, v, env, binds):
    items = _seq_items(v)
    if items is None:
        return False
    n = len(p.items)
    if p.delta is None:
        if len(items) != n:
            return False
    elif len(items) < n:
        return False
    for q, x in zip(p.items, items):
        if not match(rt, q, x, env, binds):
            return False
    if p.delta is not None:
        return match_delta(rt, p.delta, type(v)(items[n:]), env, binds)
    return True


def m_cons(rt, p, v, env, binds):
    items = _seq_items(v)
    if not items:
        return False
    if not match(rt, p.head, items[0], env, binds):
        return False
    return match(rt, p.tail, type(v)(items[1:]), env, binds)


def m_set(rt, p, v, env, binds):
    if not isinstance(v, BSet):
        return False
    items = v.items
    n = len(p.items)
    if (p.delta is None and len(items) != n) or len(items) < n:
        return False
    for q, x in zip(p.items, items):
        if not match(rt, q, x, env, binds):
            return False
    if p.delta is not None:
        return match_delta(rt, p.delta, BSet(items[n:]), env, binds)
    return True


def m_map(rt, p, v, env, binds):
    if not isinstance(v, BMap):
        return False
    n = len(p.pairs)
    if (p.delta is None and len(v.keys) != n) or len(v.keys) < n:
        return False
    for (qk, qv), k, x in zip(p.pairs, v.keys, v.vals):
        if not match(rt, qk, k, env, binds) or not match(rt, qv, x, env, binds):
            return False
    if p.delta is not None:
        return match_delta(rt, p.delta, BMap(v.keys[n:], v.vals[n:]), env, binds)
    return True


def m_for(rt, p, v, env, binds):
    if not rt.responds_to(v, "iterate_"):
        return False
    cur = v
    for q in p.items:
        step = rt.iterate_step(cur)
        if step is None:
            return False
        head, cur = step
        if not match(rt, q, head, env, binds):
            return False
    if p.delta is None:
        return rt.iterate_step(cur) is None
    return match_delta(rt, p.delta, cur, env, binds)


def match_delta(rt, d: N.PDelta, rest, env, binds) -> bool:
    if d.inner is not None and not match_delta(rt, d.inner, rest, env, binds):
        return False
    if d.name is not None:
        binds[d.name] = rest
    if d.cond is not None:
        return _bool(_eval(rt, d.cond, env, binds))
    return True


def m_delta(rt, p, v, env, binds):
    # a bare rest pattern outside a bracketed pattern matches anything
    return match_delta(rt, p, v, env, binds)


_MATCHERS = {
    N.PAs: m_as, N.PLit: m_lit, N.PCon: m_con, N.PGuard: m_guard, N.PVal: m_val,
    N.PDestruct: m_destruct, N.PPred: m_pred, N.PRecord: m_record, N.PNil: m_nil,
    N.PExc: m_exc, N.PType: m_type, N.PInner: m_inner, N.PSeq: m_seq, N.PCons: m_cons,
    N.PSet: m_set, N.PMap: m_map, N.PFor: m_for, N.PDelta: m_delta,
}


def match_cases(rt, cases, v, env):
    """First matching ``(pattern, body)`` with its bindings, or ``None``."""
    for p, body in cases:
        binds: dict = {}
        if match(rt, p, v, env, binds):
            return body, binds
    return None


def try_match(rt, p, v, env) -> dict | None:
    binds: dict = {}
    return binds if match(rt, p, v, env, binds) else None
