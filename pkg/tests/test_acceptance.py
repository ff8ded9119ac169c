"""Acceptance criteria 1-9; each test reports one pass/fail line."""

from __future__ import annotations

import random
import threading
import time
from decimal import Decimal, localcontext
from fractions import Fraction

from babel17 import Engine, EngineConfig, render
from babel17 import interval as iv
from babel17 import order
from babel17.errors import BabelException
from babel17.interval import Interval
from babel17.values import BList, BMap, BSet, BVect, Thunk, con

import oracles
from corpus import (
    GOLDEN, ILLEGAL, LIBRARY, ORDERED_SET_SECTION, ORDERED_SET_TEST_MODULE, Raises,
)
from helpers import fresh_outcome, outcome, report


def _golden_failures(workers: int) -> list[str]:
    bad = []
    for name, src, expected in GOLDEN:
        got = fresh_outcome(src, LIBRARY, workers=workers)
        if got != expected:
            bad.append(f"{name}: got {got!r}, expected {expected!r}")
    return bad


def _unit_report(src: str):
    with Engine(EngineConfig(mode="test", log=lambda line: None)) as eng:
        eng.load([(src, "orderedset.b17")])
        rep = eng.run_tests()
    return rep.passed, rep.failed, rep.errors


# ---------------------------------------------------------------- 1


def test_criterion_1_golden_corpus():
    bad = _golden_failures(workers=1)
    section = _unit_report(ORDERED_SET_SECTION)
    module = _unit_report(ORDERED_SET_TEST_MODULE)
    if section != (2, 0, 0):
        bad.append(f"orderedSet unittest section: {section}")
    if module != (2, 0, 0):
        bad.append(f"orderedSet unittest module: {module}")
    report(1, not bad, f"{len(GOLDEN)} snippets and 2 assertion pairs, exact match; "
                       f"{len(bad)} mismatches {bad[:3]}")


# ---------------------------------------------------------------- 2


def _outcomes(src: str, runs: int = 200) -> set:
    seen = set()
    for seed in range(runs):
        with Engine(EngineConfig(seed=seed)) as eng:
            seen.add(render(eng.run(src)))
    return seen


def test_criterion_2_nondeterminism_envelopes():
    val_seen = _outcomes("val x = random 2\n(x, x)")
    def_seen = _outcomes("def x = random 2\n(x, x)")
    ok_val = val_seen <= {"(0, 0)", "(1, 1)"}
    ok_def = def_seen == {"(0, 0)", "(0, 1)", "(1, 0)", "(1, 1)"}
    report(2, ok_val and ok_def,
           f"val variant saw {sorted(val_seen)}, def variant saw {sorted(def_seen)} over 200 seeds")


# ---------------------------------------------------------------- 3

# (template, expected) where expected is "raise V", "value V" or a literal rendering
EXCEPTION_RULES = [
    ("(exception {v}).foo", "raise"),                       # (Exception v).m
    ("(lazy (exception {v})).foo", "raise"),                # persistent receiver
    ("(exception {v}) 1", "raise"),                         # (Dyn v) x
    ("(x => 0) (exception {v})", "raise"),                  # f (Dyn v)
    ("(lazy (exception {v})) 5", "raise"),                  # (Persistent v) g
    ("(concurrent (exception {v})) (x => x)", "raise"),
    ("exception {v}", "raise"),                             # exception v
    ("((a, b) => a) (0, lazy (exception {v}))", "0"),       # lazy keeps it persistent
    ("((a, b) => a) (0, concurrent (exception {v}))", "0"),
    ("match lazy (exception {v}) case (exception w) => w end", "value"),
    ("match concurrent (exception {v}) case (exception w) => w end", "value"),
    ("force (exception {v})", "raise"),                     # force is the identity
    ("force ({v})", "value"),
    ("match force (lazy (exception {v})) case (exception w) => w end", "value"),
    ("(exception {v}) :: [1]", "raise"),                    # (Dyn v) :: t
    ("1 :: (exception {v})", "raise"),                      # h :: (Dyn v)
    ("(exception {v}) :: (exception Other)", "raise"),      # leftmost wins
    ("Con (exception {v})", "raise"),                       # c (Dyn v)
]


def test_criterion_3_exception_algebra():
    rng = random.Random(17)
    cases = violations = 0
    examples = []
    with Engine() as eng:
        for _ in range(70):
            src = oracles.gen_param_src(rng)
            expected_value = eng.run(src)
            for template, kind in EXCEPTION_RULES:
                prog = template.format(v=src)
                cases += 1
                try:
                    got = eng.run(prog)
                    raised = False
                except BabelException as e:
                    got, raised = e.param, True
                if kind == "raise":
                    ok = raised and order.equal(eng.interp, got, expected_value)
                elif kind == "value":
                    ok = not raised and order.equal(eng.interp, got, expected_value)
                else:
                    ok = not raised and render(got) == kind
                if not ok:
                    violations += 1
                    examples.append(prog)
    report(3, cases >= 1000 and violations == 0,
           f"{cases} generated cases over {len(EXCEPTION_RULES)} rewrite rules, "
           f"{violations} violations {examples[:3]}")


# ---------------------------------------------------------------- 4


def _order_value(rng: random.Random, rt, kind: str, depth: int = 2):
    if kind == "int":
        return rng.randint(-3, 3)
    if kind == "real":
        a = rng.choice([-1.0, 0.0, 0.5, 1.0, 2.0])
        return Interval(a, a + rng.choice([0.0, 0.0, 0.25, 1.0]))
    if kind == "str":
        return rng.choice(["", "a", "ab", "b", "ba"])
    if kind == "bool":
        return rng.random() < 0.5
    if kind == "con":
        inner = "int" if depth == 0 else rng.choice(["int", "str", "vect"])
        return con(rng.choice(["A", "B"]), _order_value(rng, rt, inner, depth - 1))
    if kind in ("vect", "list"):
        inner = rng.choice(["int", "real"]) if depth > 0 else "int"
        items = tuple(_order_value(rng, rt, inner, depth - 1) for _ in range(rng.randrange(3)))
        return BVect(items) if kind == "vect" else BList(items)
    if kind == "set":
        return BSet(order.sort_unique(rt, [rng.randint(0, 4) for _ in range(rng.randrange(4))]))
    if kind == "map":
        keys = order.sort_unique(rt, [rng.randint(0, 3) for _ in range(rng.randrange(3))])
        return BMap(keys, tuple(rng.randint(0, 2) for _ in keys))
    raise ValueError(kind)


ORDER_KINDS = ["int", "real", "str", "bool", "con", "vect", "list", "set", "map"]


def _chain_log_count(src: str):
    lines = []
    with Engine(EngineConfig(pragmas=True, log=lines.append)) as eng:
        value = render(eng.run(src))
    return value, [ln.split("log: ")[1] for ln in lines]


def test_criterion_4_order_properties():
    rng = random.Random(4)
    problems = []
    with Engine() as eng:
        rt = eng.interp
        triples = 0
        while triples < 10_000:
            kind = rng.choice(ORDER_KINDS)
            kinds = [kind if rng.random() < 0.85 else rng.choice(ORDER_KINDS) for _ in range(3)]
            a, b, c = (_order_value(rng, rt, k) for k in kinds)
            ab, bc, ac = order.compare(rt, a, b), order.compare(rt, b, c), order.compare(rt, a, c)
            # == and <> absorb unrelatedness, related or not
            for x, y in ((a, b), (b, c), (a, c)):
                if order.relational(rt, "==", x, y) == order.relational(rt, "<>", x, y):
                    problems.append(("==/<>", x, y))
            if ab is None or bc is None or ac is None:
                continue
            triples += 1
            for x in (a, b, c):
                if order.compare(rt, x, x) != 0:
                    problems.append(("reflexivity", x))
            if order.compare(rt, b, a) != -ab:
                problems.append(("antisymmetry", a, b))
            if ab <= 0 and bc <= 0 and not ac <= 0:
                problems.append(("transitivity", a, b, c))
            if ab < 0 and bc < 0 and not ac < 0:
                problems.append(("strict transitivity", a, b, c))
        # == and <> on functions and unrelated values never raise
        eq_src = "((x => x) == (x => x), (x => x) <> (x => x), 1 == \"a\", [1.0; 2.0] <> 1.5)"
        if render(eng.run(eq_src)) != "(false, true, false, true)":
            problems.append(("==/<> on unrelated", eq_src))
    # chained operands are evaluated once each, left to right, with short-circuit
    probe = "def t n = begin\n  #log n\n  n\nend\n"
    full = _chain_log_count(probe + "t 1 <= t 2 <= t 3 < t 4 <> t 5")
    short = _chain_log_count(probe + "t 2 <= t 1 <= t 3")
    if full != ("true", ["1", "2", "3", "4", "5"]):
        problems.append(("chain", full))
    if short != ("false", ["2", "1"]):
        problems.append(("chain short-circuit", short))
    report(4, not problems,
           f"10000 related triples, chain counts full={len(full[1])} short={len(short[1])}; "
           f"{len(problems)} problems {problems[:2]}")


# ---------------------------------------------------------------- 5

INTERVAL_OPS = {
    "add": (iv.add, lambda x, y: x + y, False),
    "sub": (iv.sub, lambda x, y: x - y, False),
    "mul": (iv.mul, lambda x, y: x * y, False),
    "div": (iv.div, lambda x, y: x / y, True),
}


def _escapes_exact(rng, op, f, positive_b) -> int:
    escapes = 0
    for _ in range(10_000):
        a = Interval(*oracles.gen_bound_pair(rng))
        b = Interval(*oracles.gen_bound_pair(rng, positive=positive_b))
        r = op(a, b)
        x, y = oracles.sample_point(rng, a.lo, a.hi), oracles.sample_point(rng, b.lo, b.hi)
        if not (Fraction(r.lo) <= f(x, y) <= Fraction(r.hi)):
            escapes += 1
    return escapes


def _escapes_pow(rng) -> int:
    escapes = 0
    with localcontext() as ctx:
        ctx.prec = 60
        for i in range(10_000):
            a = Interval(*oracles.gen_bound_pair(rng, positive=True))
            if i % 2:
                n = rng.randint(-4, 6)
                r = iv.pow(a, iv.point(float(n)))
                x = oracles.sample_point(rng, a.lo, a.hi)
                exact = x ** n
                inside = Fraction(r.lo) <= exact <= Fraction(r.hi)
            else:
                lo = rng.uniform(-3, 3)
                b = Interval(lo, lo + rng.choice([0.0, 0.5]))
                r = iv.pow(a, b)
                x = Decimal(rng.uniform(a.lo, a.hi))
                y = Decimal(rng.uniform(b.lo, b.hi))
                exact = x ** y
                inside = Decimal(r.lo) <= exact <= Decimal(r.hi)
            if not inside:
                escapes += 1
    return escapes


GRID = [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 2.0), (2.0, 3.0)]


def test_criterion_5_interval_enclosure():
    rng = random.Random(5)
    escapes = {name: _escapes_exact(rng, op, f, pos) for name, (op, f, pos) in INTERVAL_OPS.items()}
    escapes["neg"] = 0
    for _ in range(10_000):
        a = Interval(*oracles.gen_bound_pair(rng))
        r = iv.neg(a)
        x = oracles.sample_point(rng, a.lo, a.hi)
        if not (Fraction(r.lo) <= -x <= Fraction(r.hi)):
            escapes["neg"] += 1
    escapes["pow"] = _escapes_pow(rng)
    grid_bad = []
    with Engine() as eng:
        for a in GRID:
            for b in GRID:
                src = f"[{a[0]}; {a[1]}] <= [{b[0]}; {b[1]}]"
                got = render(eng.run(src))
                want = "true" if oracles.interval_leq_formula(a, b) else "false"
                if got != want:
                    grid_bad.append(src)
    total = sum(escapes.values())
    report(5, total == 0 and not grid_bad,
           f"10000 samples per operation, escapes {escapes}; "
           f"5x5 order grid disagreements {grid_bad}")


# ---------------------------------------------------------------- 6


def test_criterion_6_matcher_oracle():
    rng = random.Random(6)
    disagreements = []
    total = 0
    with Engine() as eng:
        for _ in range(100):
            pairs = [(oracles.gen_pattern(rng), oracles.gen_value(rng)) for _ in range(100)]
            lines = [f"match {oracles.value_src(v)} case {oracles.pattern_src(p)} => 1 case _ => 0 end"
                     for p, v in pairs]
            got = eng.run("\n".join(lines)).items
            for (p, v), g, line in zip(pairs, got, lines):
                total += 1
                if (g == 1) != oracles.brute_match(p, v):
                    disagreements.append(line)
    report(6, total == 10_000 and not disagreements,
           f"{total} generated (pattern, value) pairs, {len(disagreements)} disagreements "
           f"{disagreements[:3]}")


# ---------------------------------------------------------------- 7

# Table 12: source witness and the cell for each destination
CONVERSION_WITNESSES = {
    "int": "1", "bool": "true", "real": "2.0", "string": '"1"',
    "list": "[(1, 2)]", "vect": "((1, 2), (3, 4))", "set": "{(1, 2)}", "map": "{1 -> 2}",
}
STRING_WITNESS = {"int": '"12"', "bool": '"true"', "real": '"1.5"'}
DESTS = ["int", "bool", "real", "string", "list", "vect", "set", "map"]
TABLE_12 = {
    "int":    ["-", "yes", "auto", "yes", "no", "no", "no", "no"],
    "bool":   ["yes", "-", "no", "yes", "no", "no", "no", "no"],
    "real":   ["auto", "no", "-", "yes", "no", "no", "no", "no"],
    "string": ["yes", "yes", "yes", "-", "yes", "yes", "yes", "no"],
    "list":   ["no", "no", "no", "no", "-", "auto", "yes", "yes"],
    "vect":   ["no", "no", "no", "no", "auto", "-", "yes", "yes"],
    "set":    ["no", "no", "no", "no", "yes", "yes", "-", "yes"],
    "map":    ["no", "no", "no", "no", "yes", "yes", "yes", "-"],
}


def _conversion_problems(eng) -> tuple[int, list]:
    cells, bad = 0, []
    for src, row in TABLE_12.items():
        for dest, cell in zip(DESTS, row):
            cells += 1
            w = STRING_WITNESS.get(dest, CONVERSION_WITNESSES[src]) if src == "string" \
                else CONVERSION_WITNESSES[src]
            got = outcome(eng, f"typeof ({w} :> {dest}) == (: {dest})")
            if cell == "no":
                if got != Raises("DomainError"):
                    bad.append((src, dest, got))
                continue
            if got != "true":
                bad.append((src, dest, got))
            if cell == "auto":
                # automatic conversions relate the two types under the built-in order
                rel = outcome(eng, f"{w} == ({w} :> {dest})")
                if rel != "true":
                    bad.append((src, dest, "compare", rel))
    return cells, bad


def _bsrc(kind, xs):
    return oracles.list_src(kind, xs)


def _table_11_problems(eng, rng) -> tuple[int, list]:
    """Each Table 11 row against a naive oracle on lists, vectors and sets of small ints."""
    checks, bad = 0, []

    def expect(src, want_src):
        nonlocal checks
        checks += 1
        got, want = outcome(eng, src), outcome(eng, want_src)
        if got != want or ILLEGAL in (got, want):
            bad.append((src, got, want))

    for _ in range(40):
        kind = rng.choice(["list", "vect", "set"])
        xs = oracles.canon(kind, [rng.randint(0, 5) for _ in range(rng.randrange(6))])
        ys = oracles.canon(kind, [rng.randint(0, 5) for _ in range(rng.randrange(4))])
        c, d = _bsrc(kind, xs), _bsrc(kind, ys)
        x = rng.randint(0, 5)
        n = rng.randint(0, 6)

        def same(zs):
            return _bsrc(kind, oracles.canon(kind, zs))

        expect(f"{c}.isempty", "true" if not xs else "false")
        expect(f"{c}.empty", same([]))
        expect(f"{c}.size", str(len(xs)))
        expect(f"{c} + {x}", same(xs + [x]))
        expect(f"{c} ++ {d}", same(xs + ys))
        expect(f"{c} - {x}", same([z for z in xs if z != x]))
        expect(f"{c} -- {d}", same([z for z in xs if z not in ys]))
        expect(f"{c} ** {d}", same([z for z in xs if z in ys]))
        expect(f"{c}.head", str(xs[0]) if xs else "exception DomainError")
        expect(f"{c}.tail", same(xs[1:]) if xs else "exception DomainError")
        expect(f"{c}.atindex {n}", str(xs[n]) if n < len(xs) else "exception DomainError")
        expect(f"{c}.indexof {x}", str(xs.index(x)) if x in xs else "exception DomainError")
        expect(f"{c}.contains {x}", "true" if x in xs else "false")
        expect(f"{c}.take {n}", same(xs[:n]))
        expect(f"{c}.drop {n}", same(xs[n:]))
        expect(f"{c} / (z => z * 3)", same([z * 3 for z in xs]))
        folded = 0
        for z in xs:
            folded = folded * 10 + z
        expect(f"({c} * ((z, a) => a * 10 + z)) 0", str(folded))
        expect(f"{c} ^ (z => z > 2)", same([z for z in xs if z > 2]))
        pairs = {}
        for z in xs:
            pairs[z] = z * z
        expect(f"{c} // (z => z * z)",
               "{" + ", ".join(f"{k} -> {v}" for k, v in sorted(pairs.items())) + "}" if pairs else "{->}")
    # strings iterate single code points; search extends to substrings
    for s in ["", "a", "abc", "hello"]:
        expect(f'"{s}".size', str(len(s)))
        expect(f'"{s}" :> list', "[" + ", ".join(f'"{ch}"' for ch in s) + "]")
        expect(f'"{s}".isempty', "true" if not s else "false")
    expect('"abcd".indexof "cd"', "2")
    expect('"abcd".contains "bc"', "true")
    return checks, bad


def _table_13_14_problems(eng, rng) -> tuple[int, list]:
    checks, bad = 0, []

    def expect(src, want_src):
        nonlocal checks
        checks += 1
        got, want = outcome(eng, src), outcome(eng, want_src)
        if got != want or ILLEGAL in (got, want):
            bad.append((src, got, want))

    for _ in range(30):
        kind = rng.choice(["list", "vect"])
        xs = [rng.randint(0, 9) for _ in range(rng.randrange(5))]
        c = _bsrc(kind, xs)
        i = rng.randint(0, 5)
        expect(f"{c} {i}", str(xs[i]) if i < len(xs) else "exception DomainError")
        expect(f"-{c}", _bsrc(kind, xs[::-1]))
        # maps
        m = {rng.randint(0, 5): rng.randint(0, 9) for _ in range(rng.randrange(5))}
        n = {rng.randint(0, 5): rng.randint(0, 9) for _ in range(rng.randrange(3))}

        def msrc(d):
            return "{" + ", ".join(f"{k} -> {v}" for k, v in sorted(d.items())) + "}" if d else "{->}"

        k, v = rng.randint(0, 5), rng.randint(0, 9)
        ks = sorted(n)
        kset = "{" + ", ".join(map(str, ks)) + "}"
        expect(f"{msrc(m)}.contains ({k}, {v})", "true" if m.get(k, None) == v else "false")
        expect(f"{msrc(m)}.containskey {k}", "true" if k in m else "false")
        expect(f"{msrc(m)} + ({k}, {v})", msrc({**m, k: v}))
        expect(f"{msrc(m)} - {k}", msrc({a: b for a, b in m.items() if a != k}))
        expect(f"{msrc(m)} ++ {msrc(n)}", msrc({**m, **n}))
        expect(f"{msrc(m)} -- {kset}", msrc({a: b for a, b in m.items() if a not in n}))
        expect(f"{msrc(m)} ** {kset}", msrc({a: b for a, b in m.items() if a in n}))
        expect(f"{msrc(m)} {k}", str(m[k]) if k in m else "exception DomainError")
        expect(f"{msrc(m)} // ((a, b) => a + b)", msrc({a: a + b for a, b in m.items()}))
    return checks, bad


def test_criterion_7_stdlib_matrix():
    rng = random.Random(7)
    with Engine() as eng:
        cells, conv_bad = _conversion_problems(eng)
        t11, t11_bad = _table_11_problems(eng, rng)
        t1314, t1314_bad = _table_13_14_problems(eng, rng)
        law_bad = []
        for n in range(-50, 51):
            ds = [d for d in range(-50, 51) if d != 0]
            pairs = eng.run("\n".join(f"(({n}) div ({d}), ({n}) mod ({d}))" for d in ds)).items
            for d, (q, r) in zip(ds, (p.items for p in pairs)):
                if (q, r) != oracles.euclid(n, d) or n != d * q + r or not 0 <= r < abs(d):
                    law_bad.append((n, d, q, r))
    bad = conv_bad + t11_bad + t1314_bad + law_bad
    report(7, not bad,
           f"{cells} Table 12 cells, {t11} Table 11 checks, {t1314} Table 13/14 checks, "
           f"10100 div/mod pairs; {len(bad)} problems {bad[:3]}")


# ---------------------------------------------------------------- 8

FIB = "def fib 0 = 0\ndef fib 1 = 1\ndef fib n = fib (n - 1) + fib (n - 2)\n"


def test_criterion_8_memoization():
    with Engine() as eng:
        memo_value = render(eng.run(FIB + "memoize fib\nfib 25"))
        computed = [m.computed for name, m in eng.interp.memo_tables if name == "fib"]
    with Engine() as eng:
        plain_value = render(eng.run(FIB + "fib 25"))
    ok = computed == [26] and memo_value == plain_value == "75025"
    report(8, ok, f"fib 25 body evaluations {computed}, memoized {memo_value}, plain {plain_value}")


# ---------------------------------------------------------------- 9

SLOW_MODULE = """\
module slowinit
  #log 1
  val a = begin
    val s = 0
    for i in 1 to 3000 do
      s = s + i
    end
    s
  end
  def y = a
end
"""


def _thunk_runs(threads: int = 8) -> tuple[int, set]:
    runs = []
    barrier = threading.Barrier(threads)

    def body():
        runs.append(1)
        time.sleep(0.05)
        return 42

    t = Thunk(body)
    results = set()

    def worker():
        barrier.wait()
        results.add(t.force())

    ts = [threading.Thread(target=worker) for _ in range(threads)]
    for th in ts:
        th.start()
    for th in ts:
        th.join()
    return len(runs), results


def _module_loads(threads: int = 8) -> tuple[int, set]:
    lines = []
    with Engine(EngineConfig(pragmas=True, workers=threads, log=lines.append)) as eng:
        eng.load([(SLOW_MODULE, "slow.b17")])
        barrier = threading.Barrier(threads)
        results = set()

        def worker():
            barrier.wait()
            results.add(render(eng.registry.resolve_value(("slowinit", "y"))))

        threading.stack_size(64 * 1024 * 1024)
        try:
            ts = [threading.Thread(target=worker) for _ in range(threads)]
        finally:
            threading.stack_size(0)
        for th in ts:
            th.start()
        for th in ts:
            th.join()
    return sum("log: 1" in ln for ln in lines), results


def test_criterion_9_concurrency():
    bad = _golden_failures(workers=8)
    runs, thunk_results = _thunk_runs()
    loads, module_results = _module_loads()
    ok = not bad and runs == 1 and thunk_results == {42} and loads == 1 \
        and module_results == {str(3000 * 3001 // 2)}
    report(9, ok, f"golden corpus with 8 workers: {len(bad)} mismatches {bad[:2]}; "
                  f"thunk forced by 8 threads ran {runs}x; module initialized {loads}x "
                  f"under 8 concurrent first messages")
