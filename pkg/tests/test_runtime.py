import random
import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from babel17 import Engine, render
from babel17.errors import BabelException
from babel17.values import (
    BList, BMap, BSet, BVect, CExpr, DynExc, PersistentExc, Thunk, con, force,
)
from corpus import GOLDEN, ILLEGAL, LIBRARY, Raises
from helpers import outcome
from oracles import gen_param_src


@pytest.fixture(scope="module")
def eng():
    with Engine() as e:
        yield e


EXAMPLES = [
    # send
    ("(lazy exception 3).m", Raises("3")),
    ("{m = 1}.m", "1"),
    ("3.plus_ 5", "8"),
    ("5.nosuchmessage", Raises('InvalidMessage ("int", "nosuchmessage")')),
    # apply
    ("(exception 3) 4", Raises("3")),
    ("(lazy exception 3) 4", Raises("3")),
    ("[10,20,30] 1", "20"),
    ("{1 -> 2, 4 -> 0} 4", "0"),
    ("{1 -> 2} 7", Raises("DomainError")),
    ("{1, 2} 2", "true"),
    ("5 6", Raises("DomainError")),
    ("(x => 1) (exception E)", Raises("E")),
    ("(x => 1) (lazy exception E)", "1"),
    # force, lazy, concurrent
    ("force 5", "5"),
    ("typeof (force (lazy (1 div 0)))", "(: exc)"),
    ("val fst = (a, _) => a\nfst (0, lazy (1 div 0))", "0"),
    ("force (concurrent 7)", "7"),
    ("typeof (concurrent (exception E))", "(: exc)"),
    ("force (lazy exception E) == (lazy exception E)", "true"),
    # raise
    ("exception NoMatch", Raises("NoMatch")),
    ("exception 0", Raises("0")),
    ("exception (lazy exception 4)", Raises("PersistentException 4")),
    # data structures never hold dynamic exceptions
    ("(exception V) :: [1]", Raises("V")),
    ("1 :: (exception V)", Raises("V")),
    ("[1, exception E]", Raises("E")),
    ("(1, exception E)", Raises("E")),
    ("{1 -> exception E}", Raises("E")),
    ("A (exception E)", Raises("E")),
    # h::t with a non-list t
    ("(1 :: 2) == [1, 2]", "true"),
    ("1 :: 2 :: 3", "[1, 2, 3]"),
]


@pytest.mark.parametrize("src,expected", EXAMPLES)
def test_examples(eng, src, expected):
    assert outcome(eng, src) == expected


RULES = [
    # (template, expected) where V is a non-exceptional value
    ("(lazy exception V).m", "raise"),
    ("(exception V).m", "raise"),
    ("(exception V) 1", "raise"),
    ("(x => x) (exception V)", "raise"),
    ("(lazy exception V) 1", "raise"),
    ("(exception V) :: []", "raise"),
    ("[] :: (exception V)", "raise"),
    ("C (exception V)", "raise"),
    ("force (lazy exception V) ~ (lazy exception V)", "0"),
]


@pytest.mark.parametrize("template,expected", RULES)
@settings(max_examples=25)
@given(seed=st.integers(0, 2**32))
def test_exception_algebra(eng, template, expected, seed):
    v = gen_param_src(random.Random(seed))
    got = outcome(eng, template.replace("V", f"({v})"))
    if expected == "raise":
        assert got == Raises(render(eng.run(v)))
    else:
        assert got == expected


def _scan(v):
    """True when no dynamic exception hides in v."""
    if isinstance(v, DynExc):
        return False
    if isinstance(v, (BList, BVect, BSet)):
        return all(_scan(x) for x in v.items)
    if isinstance(v, BMap):
        return all(_scan(x) for x in v.keys) and all(_scan(x) for x in v.vals)
    if isinstance(v, CExpr):
        return _scan(v.param)
    if isinstance(v, PersistentExc):
        return not isinstance(v.param, (DynExc, PersistentExc)) or _scan(v.param)
    return True


@pytest.mark.parametrize("name,src,expected", [g for g in GOLDEN if not isinstance(g[2], Raises)])
def test_golden_values_hold_no_dynamic_exceptions(name, src, expected):
    with Engine() as e:
        e.load(list(LIBRARY))
        try:
            v = e.run(src)
        except Exception:
            return
        assert _scan(force(v))


def test_thunk_runs_once():
    calls = []
    t = Thunk(lambda: calls.append(1) or 42)
    assert force(t) == 42 and force(t) == 42
    assert calls == [1] and t.runs == 1


def test_thunk_converts_dynamic_exception():
    def body():
        raise BabelException(con("E"))

    t = Thunk(body)
    v = force(t)
    assert isinstance(v, PersistentExc) and v.param == con("E")
    assert force(t) is v


def test_thunk_concurrent_forcers():
    gate = threading.Event()
    calls = []

    def body():
        gate.wait(5)
        calls.append(1)
        return 7

    t = Thunk(body, kind="concurrent")
    results = []
    threads = [threading.Thread(target=lambda: results.append(force(t))) for _ in range(8)]
    for th in threads:
        th.start()
    gate.set()
    for th in threads:
        th.join(10)
    assert results == [7] * 8 and calls == [1]


def test_val_cannot_refer_to_itself(eng):
    assert outcome(eng, "val x = lazy (x + 1)\nx") == ILLEGAL


def test_deep_recursion():
    src = "def f n = if n == 0 then 0 else 1 + f (n - 1) end\nf 20000"
    with Engine() as e:
        assert outcome(e, src) == "20000"


def test_unbounded_recursion_is_stack_overflow():
    # the result is forced on the evaluation thread, never in the caller's
    with Engine() as e:
        assert outcome(e, "def x = lazy (x + 1)\nx") == Raises("StackOverflow")


def test_render_of_lazy_collection_forces(eng):
    assert render(eng.run("[lazy (1 + 1), concurrent 3]")) == "[2, 3]"
