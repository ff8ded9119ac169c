"""Built-in messages, the collection/collector protocols and type conversions.

``METHODS[type][name] = (arity, fn)``: arity-0 members are called as
``fn(rt, v)``, arity-1 members as ``fn(rt, v, x)``.
"""

from __future__ import annotations

from . import interval as iv
from . import order
from .errors import BabelException
from .values import (
    NIL, BList, BMap, BSet, Builtin, BVect, CExpr, Closure, EMPTY_VECT, Lens, Obj, Thunk,
    TypeCtor, UserValue, BUILTIN_TYPES, T_BOOL, T_INT, T_LIST, T_MAP, T_REAL, T_SET, T_STRING,
    T_VECT, domain_error, force, type_of,
)

COLLECTION_GATE = ("collector_add_", "collector_close_", "empty", "iterate_")


def _int(x) -> int:
    x = force(x)
    if type(x) is not int:
        if isinstance(x, iv.Interval):
            n = iv.auto_to_int(x)
            if n is not None:
                return n
        raise domain_error()
    return x


def _real(x) -> iv.Interval:
    x = force(x)
    if isinstance(x, iv.Interval):
        return x
    if type(x) is int:
        try:
            return iv.from_int(x)
        except iv.IntervalDomainError:
            raise domain_error() from None
    raise domain_error()


def _rcall(fn, *args):
    try:
        return fn(*args)
    except (iv.IntervalDomainError, OverflowError):
        raise domain_error() from None


# ---------------------------------------------------------------- integers


def _int_arith(op):
    def go(rt, a, b):
        b = force(b)
        if type(b) is int:
            return op(a, b)
        if isinstance(b, iv.Interval):
            return _real_arith_fns[op](rt, _real(a), b)
        raise domain_error()

    return go


def _add(a, b):
    return a + b


def _sub(a, b):
    return a - b


def _mul(a, b):
    return a * b


def _ediv(a, b):
    if b == 0:
        raise domain_error()
    q = a // b
    if a - b * q < 0:  # only possible for negative divisors
        q += 1
    return q


def _emod(a, b):
    if b == 0:
        raise domain_error()
    return a - b * _ediv(a, b)


def _int_slash(rt, a, b):
    return real_div(rt, _real(a), b)


def _int_pow(rt, a, b):
    b = force(b)
    if type(b) is int:
        if b < 0:
            return _rcall(iv.pow_int, _real(a), b)
        return a ** b
    if isinstance(b, iv.Interval):
        return _rcall(iv.pow, _real(a), b)
    raise domain_error()


def _int_div(rt, a, b):
    return _ediv(a, _int(b))


def _int_mod(rt, a, b):
    return _emod(a, _int(b))


def _to(rt, a, b):
    return BList(tuple(range(a, _int(b) + 1)))


def _downto(rt, a, b):
    return BList(tuple(range(a, _int(b) - 1, -1)))


def _num_plus_putback(rt, a, c, t=None):
    return Builtin(lambda t: _arith(rt, "minus_", t, c), "plus__putback_")


def _arith(rt, msg, a, b):
    return rt.call_method(a, msg, b)


def _putback2(inverse_msg):
    def mk(rt, a, c):
        return Builtin(lambda t: rt.call_method(t, inverse_msg, c), "putback")

    return mk


def _times_putback(rt, a, c):
    def go(t):
        t, c_ = force(t), force(c)
        if type(t) is int and type(c_) is int:
            if c_ == 0 or t % c_:
                raise domain_error()
            return t // c_
        return real_div(rt, _real(t), c_)

    return Builtin(go, "times__putback_")


# ---------------------------------------------------------------- reals


def real_div(rt, a, b):
    return _rcall(iv.div, a, _real(b))


_real_arith_fns = {
    _add: lambda rt, a, b: _rcall(iv.add, a, _real(b)),
    _sub: lambda rt, a, b: _rcall(iv.sub, a, _real(b)),
    _mul: lambda rt, a, b: _rcall(iv.mul, a, _real(b)),
}


def _real_pow(rt, a, b):
    b = force(b)
    if type(b) is int:
        return _rcall(iv.pow_int, a, b)
    return _rcall(iv.pow, a, _real(b))


# ---------------------------------------------------------------- collections


def is_collection(rt, c) -> bool:
    if isinstance(c, (BList, BVect, BSet, BMap, str)):
        return True
    return rt.responds_to(c, "iterate_")


def iterate_step(rt, c):
    """``None`` for an empty collection, else ``(head, rest)``."""
    c = force(c)
    t = type(c)
    if t is BList or t is BVect or t is BSet:
        if not c.items:
            return None
        return c.items[0], t(c.items[1:])
    if t is BMap:
        if not c.keys:
            return None
        return BVect((c.keys[0], c.vals[0])), BMap(c.keys[1:], c.vals[1:])
    if t is str:
        if not c:
            return None
        return c[0], c[1:]
    r = force(rt.send(c, "iterate_"))
    if isinstance(r, BVect):
        if not r.items:
            return None
        if len(r.items) == 2:
            return r.items[0], r.items[1]
    raise domain_error()


def elements(rt, c):
    """All elements of a collection, in iteration order."""
    c = force(c)
    t = type(c)
    if t is BList or t is BVect or t is BSet:
        return c.items
    if t is BMap:
        return tuple(BVect((k, v)) for k, v in zip(c.keys, c.vals))
    if t is str:
        return tuple(c)
    out = []
    while True:
        step = iterate_step(rt, c)
        if step is None:
            return tuple(out)
        out.append(step[0])
        c = step[1]


def iter_elements(rt, c):
    """Lazily iterate a collection (for loops may stop early)."""
    c = force(c)
    if isinstance(c, (BList, BVect, BSet, BMap, str)):
        yield from elements(rt, c)
        return
    while True:
        step = iterate_step(rt, c)
        if step is None:
            return
        yield step[0]
        c = step[1]


def _pair(rt, x):
    x = force(x)
    if isinstance(x, (BVect, BList)) and len(x.items) == 2:
        return force(x.items[0]), x.items[1]
    raise domain_error()


def map_put(rt, m: BMap, k, v) -> BMap:
    i, found = order.search(rt, m.keys, k)
    if found:
        return BMap(m.keys, m.vals[:i] + (v,) + m.vals[i + 1:])
    return BMap(m.keys[:i] + (k,) + m.keys[i:], m.vals[:i] + (v,) + m.vals[i:])


def map_remove(rt, m: BMap, k) -> BMap:
    i, found = order.search(rt, m.keys, k)
    if not found:
        return m
    return BMap(m.keys[:i] + m.keys[i + 1:], m.vals[:i] + m.vals[i + 1:])


def set_add(rt, s: BSet, x) -> BSet:
    i, found = order.search(rt, s.items, x)
    if found:
        return s
    return BSet(s.items[:i] + (x,) + s.items[i:])


def make_set(rt, items) -> BSet:
    return BSet(order.sort_unique(rt, [force(x) for x in items]))


def make_map(rt, pairs) -> BMap:
    m = BMap()
    for p in pairs:
        k, v = _pair(rt, p)
        m = map_put(rt, m, k, v)
    return m


def to_string(rt, x) -> str:
    return convert(rt, force(x), T_STRING, explicit=True)


def extend_collection(rt, base, items):
    """Add ``items`` to ``base`` as repeated ``collector_add_`` would."""
    base = force(base)
    t = type(base)
    if t is BList or t is BVect:
        return t(base.items + tuple(items))
    if t is BSet:
        s = base
        for x in items:
            s = set_add(rt, s, force(x))
        return s
    if t is BMap:
        m = base
        for p in items:
            k, v = _pair(rt, p)
            m = map_put(rt, m, k, v)
        return m
    if t is str:
        return base + "".join(to_string(rt, x) for x in items)
    c = base
    for x in items:
        c = rt.call_method(c, "collector_add_", x)
    return rt.send(c, "collector_close_")


def rebuild(rt, c, items):
    """A collection of the same kind as ``c`` holding ``items``."""
    return extend_collection(rt, empty_of(rt, c), items)


def empty_of(rt, c):
    c = force(c)
    t = type(c)
    if t is BList or t is BVect or t is BSet:
        return t(())
    if t is BMap:
        return BMap()
    if t is str:
        return ""
    return rt.send(c, "empty")


def _contains(rt, xs, x) -> bool:
    return any(order.compare(rt, y, x) == 0 for y in xs)


# generic Table 11 implementations -------------------------------------------


def g_is_empty(rt, c):
    return iterate_step(rt, c) is None


def g_size(rt, c):
    c = force(c)
    if isinstance(c, (BList, BVect, BSet)):
        return len(c.items)
    if isinstance(c, BMap):
        return len(c.keys)
    if isinstance(c, str):
        return len(c)
    return len(elements(rt, c))


def g_plus(rt, c, x):
    c = force(c)
    if isinstance(c, BMap):
        k, v = _pair(rt, x)
        return map_put(rt, c, k, v)
    if isinstance(c, BSet):
        return set_add(rt, c, force(x))
    return extend_collection(rt, c, (x,))


def g_plus_all(rt, c, d):
    return extend_collection(rt, c, elements(rt, d))


def g_minus(rt, c, x):
    return rebuild(rt, c, [y for y in elements(rt, c) if order.compare(rt, y, x) != 0])


def g_minus_all(rt, c, d):
    ds = elements(rt, d)
    return rebuild(rt, c, [y for y in elements(rt, c) if not _contains(rt, ds, y)])


def g_intersect(rt, c, d):
    ds = elements(rt, d)
    return rebuild(rt, c, [y for y in elements(rt, c) if _contains(rt, ds, y)])


def g_head(rt, c):
    step = iterate_step(rt, c)
    if step is None:
        raise domain_error()
    return step[0]


def g_tail(rt, c):
    c = force(c)
    if isinstance(c, (BList, BVect, BMap, str, BSet)):
        step = iterate_step(rt, c)
        if step is None:
            raise domain_error()
        return step[1]
    xs = elements(rt, c)
    if not xs:
        raise domain_error()
    return rebuild(rt, c, xs[1:])


def g_at_index(rt, c, i):
    i = _int(i)
    xs = elements(rt, c)
    if not 0 <= i < len(xs):
        raise domain_error()
    return xs[i]


def g_index_of(rt, c, x):
    c = force(c)
    if isinstance(c, str):
        x = force(x)
        if type(x) is not str:
            raise domain_error()
        i = c.find(x)
        if i < 0:
            raise domain_error()
        return i
    for i, y in enumerate(elements(rt, c)):
        if order.compare(rt, y, x) == 0:
            return i
    raise domain_error()


def g_contains(rt, c, x):
    c = force(c)
    if isinstance(c, str):
        x = force(x)
        return type(x) is str and x in c
    if isinstance(c, BSet):
        return order.search(rt, c.items, force(x))[1]
    return _contains(rt, elements(rt, c), x)


def g_take(rt, c, n):
    n = max(_int(n), 0)
    c = force(c)
    if isinstance(c, (BList, BVect, BSet)):
        return type(c)(c.items[:n])
    if isinstance(c, str):
        return c[:n]
    if isinstance(c, BMap):
        return BMap(c.keys[:n], c.vals[:n])
    return rebuild(rt, c, elements(rt, c)[:n])


def g_drop(rt, c, n):
    n = max(_int(n), 0)
    c = force(c)
    if isinstance(c, (BList, BVect, BSet)):
        return type(c)(c.items[n:])
    if isinstance(c, str):
        return c[n:]
    if isinstance(c, BMap):
        return BMap(c.keys[n:], c.vals[n:])
    return rebuild(rt, c, elements(rt, c)[n:])


def g_map(rt, c, f):
    return rebuild(rt, c, [rt.apply(f, x) for x in elements(rt, c)])


def g_fold(rt, c, f):
    xs = elements(rt, c)

    def run(a0):
        a = a0
        for x in xs:
            a = rt.apply(f, BVect((x, a)))
        return a

    return Builtin(run, "fold")


def g_filter(rt, c, f):
    keep = []
    for x in elements(rt, c):
        r = force(rt.apply(f, x))
        if type(r) is not bool:
            raise domain_error()
        if r:
            keep.append(x)
    return rebuild(rt, c, keep)


def g_key_map(rt, c, f):
    m = BMap()
    for x in elements(rt, c):
        m = map_put(rt, m, force(x), rt.apply(f, x))
    return m


def g_empty(rt, c):
    return empty_of(rt, c)


def g_iterate(rt, c):
    step = iterate_step(rt, c)
    if step is None:
        return EMPTY_VECT
    return BVect(step)


def g_collector_add(rt, c, x):
    return g_plus(rt, c, x)


def g_collector_close(rt, c):
    return c


GENERIC = {
    "isempty": (0, g_is_empty), "empty": (0, g_empty), "size": (0, g_size),
    "plus_": (1, g_plus), "plus__": (1, g_plus_all), "minus_": (1, g_minus),
    "minus__": (1, g_minus_all), "times__": (1, g_intersect), "head": (0, g_head),
    "tail": (0, g_tail), "atindex": (1, g_at_index), "indexof": (1, g_index_of),
    "contains": (1, g_contains), "take": (1, g_take), "drop": (1, g_drop),
    "slash_": (1, g_map), "times_": (1, g_fold), "pow_": (1, g_filter), "slash__": (1, g_key_map),
}
# inherited by qualifying objects (they already have the protocol members)
INHERITED = dict(GENERIC)

BUILTIN_COLLECTION = dict(GENERIC)
BUILTIN_COLLECTION.update({
    "iterate_": (0, g_iterate), "collector_add_": (1, g_collector_add),
    "collector_close_": (0, g_collector_close),
})


# list / vector --------------------------------------------------------------


def _seq_reverse(rt, c):
    return type(c)(c.items[::-1])


def _seq_at_index_putback(rt, c, i):
    def go(t):
        j = _int(i)
        if not 0 <= j < len(c.items):
            raise domain_error()
        return type(c)(c.items[:j] + (t,) + c.items[j + 1:])

    return Builtin(go, "atindex_putback_")


SEQ = dict(BUILTIN_COLLECTION)
SEQ.update({"uminus_": (0, _seq_reverse), "atindex_putback_": (1, _seq_at_index_putback)})


# map --------------------------------------------------------------------------


def _map_contains(rt, m, x):
    k, v = _pair(rt, x)
    i, found = order.search(rt, m.keys, k)
    return found and order.compare(rt, m.vals[i], v) == 0


def _map_contains_key(rt, m, k):
    return order.search(rt, m.keys, force(k))[1]


def _map_minus(rt, m, k):
    return map_remove(rt, m, force(k))


def _map_minus_all(rt, m, n):
    for k in elements(rt, n):
        m = map_remove(rt, m, force(k))
    return m


def _map_keep(rt, m, n):
    ks = [force(k) for k in elements(rt, n)]
    keys, vals = [], []
    for k, v in zip(m.keys, m.vals):
        if _contains(rt, ks, k):
            keys.append(k)
            vals.append(v)
    return BMap(tuple(keys), tuple(vals))


def _map_slash2(rt, m, f):
    return BMap(m.keys, tuple(rt.apply(f, BVect((k, v))) for k, v in zip(m.keys, m.vals)))


def map_lookup(rt, m, k):
    i, found = order.search(rt, m.keys, force(k))
    if not found:
        raise domain_error()
    return m.vals[i]


def _map_lookup_putback(rt, m, k):
    return Builtin(lambda t: map_put(rt, m, force(k), t), "lookup_putback_")


MAP = dict(BUILTIN_COLLECTION)
MAP.update({
    "contains": (1, _map_contains), "containskey": (1, _map_contains_key),
    "minus_": (1, _map_minus), "minus__": (1, _map_minus_all), "times__": (1, _map_keep),
    "slash__": (1, _map_slash2), "lookup": (1, map_lookup),
    "lookup_putback_": (1, _map_lookup_putback),
})


# string -----------------------------------------------------------------------


def _str_plus(rt, s, x):
    return s + to_string(rt, x)


STRING = dict(BUILTIN_COLLECTION)
STRING.update({"plus_": (1, _str_plus)})


# numbers ----------------------------------------------------------------------


INT = {
    "plus_": (1, _int_arith(_add)), "minus_": (1, _int_arith(_sub)),
    "times_": (1, _int_arith(_mul)), "slash_": (1, _int_slash),
    "div_": (1, _int_div), "mod_": (1, _int_mod), "pow_": (1, _int_pow),
    "uminus_": (0, lambda rt, a: -a), "to_": (1, _to), "downto_": (1, _downto),
    "plus__putback_": (1, _putback2("minus_")), "minus__putback_": (1, _putback2("plus_")),
    "times__putback_": (1, _times_putback),
    "uminus__putback_": (0, lambda rt, a: Builtin(lambda t: rt.send(t, "uminus_"), "uminus__putback_")),
}

REAL = {
    "plus_": (1, lambda rt, a, b: _rcall(iv.add, a, _real(b))),
    "minus_": (1, lambda rt, a, b: _rcall(iv.sub, a, _real(b))),
    "times_": (1, lambda rt, a, b: _rcall(iv.mul, a, _real(b))),
    "slash_": (1, real_div), "pow_": (1, _real_pow),
    "uminus_": (0, lambda rt, a: iv.neg(a)),
    "plus__putback_": INT["plus__putback_"], "minus__putback_": INT["minus__putback_"],
    "times__putback_": INT["times__putback_"], "uminus__putback_": INT["uminus__putback_"],
}


# lenses -----------------------------------------------------------------------


def lens_compose(a: Lens, b: Lens) -> Lens:
    return Lens(lambda u: b.get(a.get(u)), lambda u, t: a.put(u, b.put(a.get(u), t)))


def _lens_times(rt, l, m):
    m = force(m)
    if not isinstance(m, Lens):
        raise domain_error()
    return lens_compose(l, m)


def _lens_putback(rt, l, u):
    return Builtin(lambda t: l.put(u, t), "putback")


def _lens_modify(rt, l, u):
    return Builtin(lambda f: l.put(u, rt.apply(f, l.get(u))), "modify")


LENS = {"times_": (1, _lens_times), "putback": (1, _lens_putback), "modify": (1, _lens_modify)}


# cexprs -----------------------------------------------------------------------


def _cexp_destruct(rt, c, k):
    k = force(k)
    if isinstance(k, CExpr) and k.name == c.name:
        return c.param
    raise domain_error()


CEXP = {"destruct_": (1, _cexp_destruct)}

FUN = {"apply_": (0, lambda rt, f: f)}

METHODS = {
    int: INT, iv.Interval: REAL, str: STRING, BList: SEQ, BVect: SEQ, BSet: BUILTIN_COLLECTION,
    BMap: MAP, Lens: LENS, CExpr: CEXP, Closure: FUN, Builtin: FUN, TypeCtor: FUN,
}


# ---------------------------------------------------------------- conversions


def _str_to_int(rt, s):
    t = s.strip()
    try:
        return int(t, 10)
    except ValueError:
        try:
            return int(t, 0)
        except ValueError:
            raise domain_error() from None


def _str_to_bool(rt, s):
    t = s.strip()
    if t == "true":
        return True
    if t == "false":
        return False
    raise domain_error()


def _int_to_bool(rt, n):
    if n in (0, 1):
        return n == 1
    raise domain_error()


def _int_to_real(rt, n):
    try:
        return iv.from_int(n)
    except iv.IntervalDomainError:
        raise domain_error() from None


def _real_to_int(rt, r):
    try:
        return iv.to_int(r)
    except iv.IntervalDomainError:
        raise domain_error() from None


def _real_to_int_auto(rt, r):
    return iv.auto_to_int(r)


def _str_to_real(rt, s):
    try:
        return iv.parse_real(s)
    except iv.IntervalDomainError:
        raise domain_error() from None


def _elems_to(kind):
    def go(rt, c):
        xs = elements(rt, c)
        if kind is BList or kind is BVect:
            return kind(xs)
        if kind is BSet:
            return make_set(rt, xs)
        return make_map(rt, xs)

    return go


# (source type, destination type) -> (auto, fn); fn may answer None for "not applicable"
CONVERSIONS = {
    (int, T_BOOL): (False, _int_to_bool),
    (int, T_REAL): (True, _int_to_real),
    (int, T_STRING): (False, lambda rt, n: str(n)),
    (bool, T_INT): (False, lambda rt, b: int(b)),
    (bool, T_STRING): (False, lambda rt, b: "true" if b else "false"),
    (iv.Interval, T_INT): (True, _real_to_int),
    (iv.Interval, T_STRING): (False, lambda rt, r: iv.render(r)),
    (str, T_INT): (False, _str_to_int),
    (str, T_BOOL): (False, _str_to_bool),
    (str, T_REAL): (False, _str_to_real),
    (str, T_LIST): (False, _elems_to(BList)),
    (str, T_VECT): (False, _elems_to(BVect)),
    (str, T_SET): (False, _elems_to(BSet)),
    (BList, T_VECT): (True, _elems_to(BVect)),
    (BList, T_SET): (False, _elems_to(BSet)),
    (BList, T_MAP): (False, _elems_to(BMap)),
    (BVect, T_LIST): (True, _elems_to(BList)),
    (BVect, T_SET): (False, _elems_to(BSet)),
    (BVect, T_MAP): (False, _elems_to(BMap)),
    (BSet, T_LIST): (False, _elems_to(BList)),
    (BSet, T_VECT): (False, _elems_to(BVect)),
    (BSet, T_MAP): (False, _elems_to(BMap)),
    (BMap, T_LIST): (False, _elems_to(BList)),
    (BMap, T_VECT): (False, _elems_to(BVect)),
    (BMap, T_SET): (False, _elems_to(BSet)),
}

_INHERITED_CONVS = {T_LIST: _elems_to(BList), T_VECT: _elems_to(BVect), T_SET: _elems_to(BSet)}


def _obj_of(v):
    return v.outer if isinstance(v, UserValue) else v


def convert(rt, v, t, explicit: bool = True):
    """``v :> t`` (explicit) or the automatic conversion; DomainError when impossible."""
    r = try_convert(rt, v, t, explicit)
    if r is None:
        raise domain_error()
    return r


def try_convert(rt, v, t, explicit: bool):
    v = force(v)
    if type_of(v) == t:
        return v
    o = _obj_of(v)
    if isinstance(o, Obj):
        auto_fn, explicit_fn = o.convs.get(t, (None, None))
        if auto_fn is not None:
            return force(auto_fn(v))
        if explicit and explicit_fn is not None:
            return force(explicit_fn(v))
        if explicit and t in _INHERITED_CONVS and rt.inherits_collection(o):
            return _INHERITED_CONVS[t](rt, v)
        return None
    if isinstance(v, UserValue):
        return try_convert(rt, v.outer, t, explicit)
    entry = CONVERSIONS.get((type(v), t))
    if entry is None:
        return None
    auto, fn = entry
    if not explicit:
        if not auto:
            return None
        if type(v) is iv.Interval:
            return _real_to_int_auto(rt, v)
    return fn(rt, v)


def builtin_type(name: str):
    return BUILTIN_TYPES.get(name)
