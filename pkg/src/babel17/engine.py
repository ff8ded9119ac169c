"""Engine facade: parse, check and run programs; run unit tests."""

from __future__ import annotations

import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .desugar import Scope, ScopeChecker, desugar_program
from .errors import BabelException
from .evaluator import Interp, PragmaResult
from .modsys import Registry
from .parser import parse_program
from .runtime import Env, State
from .values import con, settle

# deep Babel-17 recursion maps onto deep Python recursion
STACK_SIZE = 1024 * 1024 * 1024
RECURSION_LIMIT = 1_500_000  # stays well inside STACK_SIZE


@dataclass
class EngineConfig:
    mode: str = "production"  # or "test"
    pragmas: bool | None = None  # default: on in test mode, off in production mode
    seed: int | None = None
    workers: int = 1
    log: object = None  # callable taking one line; default standard error

    @property
    def pragmas_enabled(self) -> bool:
        return self.mode == "test" if self.pragmas is None else self.pragmas


@dataclass
class ModuleReport:
    name: str
    passed: int = 0
    failed: int = 0
    errors: int = 0
    failures: list = field(default_factory=list)  # "FILE:LINE:COL kind: message"


@dataclass
class TestReport:
    modules: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> int:
        return sum(m.passed for m in self.modules)

    @property
    def failed(self) -> int:
        return sum(m.failed for m in self.modules)

    @property
    def errors(self) -> int:
        return sum(m.errors for m in self.modules)

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.errors == 0


def _stderr_log(line: str) -> None:
    print(line, file=sys.stderr)


def run_with_big_stack(fn, *args):
    """Run ``fn`` on a thread with a large stack; re-raise its exception here."""
    result: dict = {}

    def target():
        try:
            result["value"] = fn(*args)
        except BaseException as e:  # handed back to the caller
            result["error"] = e

    old = threading.stack_size()
    threading.stack_size(STACK_SIZE)
    try:
        t = threading.Thread(target=target, name="babel17-eval")
        t.start()
    finally:
        threading.stack_size(old)
    t.join()
    if "error" in result:
        err = result["error"]
        if isinstance(err, RecursionError):
            raise BabelException(con("StackOverflow")) from None
        raise err
    return result.get("value")


class Engine:
    def __init__(self, config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        if sys.getrecursionlimit() < RECURSION_LIMIT:
            sys.setrecursionlimit(RECURSION_LIMIT)
        old = threading.stack_size()
        threading.stack_size(STACK_SIZE)
        try:
            self.pool = ThreadPoolExecutor(max_workers=max(1, self.config.workers))
            # start the workers now so they inherit the large stack size
            for f in [self.pool.submit(time.sleep, 0) for _ in range(max(1, self.config.workers))]:
                f.result()
        finally:
            threading.stack_size(old)
        self.registry = Registry()
        self.results: list = []
        self.interp = Interp(
            self.registry, seed=self.config.seed, pool=self.pool,
            pragmas=self.config.pragmas_enabled, log=self.config.log or _stderr_log,
            on_pragma=self.results.append,
        )
        self.registry.interp = self.interp
        self.programs: list = []
        self.top_scope = Scope()
        self._pending_scope = None
        self.top_env = Env({}, None)

    def close(self) -> None:
        self.pool.shutdown(wait=False, cancel_futures=True)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # ------------------------------------------------------------ loading

    @property
    def production(self) -> bool:
        return self.config.mode != "test"

    def load(self, sources) -> list:
        """Parse, desugar, register and check ``[(text, filename)]``; returns the programs."""
        progs = []
        for text, filename in sources:
            prog = desugar_program(parse_program(text, filename), filename)
            progs.append(prog)
        for prog in progs:
            for m in prog.modules:
                if self.production and "unittest" in m.path:
                    continue
                self.registry.register(m)
        paths = frozenset(self.registry.modules)
        scope = Scope(self.top_scope)
        for prog in progs:
            checker = ScopeChecker(self.registry.roots, prog.filename, paths)
            if self.production:
                prog.modules = [m for m in prog.modules if "unittest" not in m.path]
            checker.check_program(prog, scope, production=True)
        # top-level names become visible to later loads once the statements ran
        self._pending_scope = scope
        self.programs.extend(progs)
        return progs

    # ------------------------------------------------------------ running

    def exec_top(self, stmts, filename=None):
        """Run top-level statements in the persistent top-level environment."""
        self.interp.filename = filename
        st = State(self.top_env)
        self.interp.exec_stmts(stmts, st)
        self.top_env = st.env
        if self._pending_scope is not None:
            self.top_scope.names.update(self._pending_scope.names)
            self._pending_scope = None
        return st.coll.close(self.interp)

    def run(self, text: str, filename: str | None = None):
        """Load one source text and evaluate its top-level statements."""
        prog = self.load([(text, filename)])[0]
        return run_with_big_stack(self._exec_settled, prog.stmts, filename)

    def run_files(self, sources):
        progs = self.load(sources)
        stmts = [s for p in progs for s in p.stmts]
        fname = progs[-1].filename if progs else None
        return run_with_big_stack(self._exec_settled, stmts, fname)

    def _exec_settled(self, stmts, filename):
        # force pending thunks here, on the big stack, not in the caller's thread
        return settle(self.exec_top(stmts, filename))

    # ------------------------------------------------------------ unit tests

    def run_tests(self) -> TestReport:
        if self.production:
            raise RuntimeError("unit tests can only run in test mode")
        t0 = time.perf_counter()
        report = TestReport()
        for m in self.registry.test_modules():
            name = ".".join(m.path)
            mr = ModuleReport(name)
            start = len(self.results)
            try:
                run_with_big_stack(self.registry.ensure_loaded, m)
            except BabelException as e:
                mr.errors += 1
                mr.failures.append(f"{m.filename or '<input>'}: error: uncaught exception: {_render(e.param)}")
            for r in self.results[start:]:
                if r.ok:
                    mr.passed += 1
                else:
                    mr.failed += 1
                    mr.failures.append(f"{r.pos} {r.kind}: {r.message}")
            report.modules.append(mr)
        report.seconds = time.perf_counter() - t0
        return report


def _render(v) -> str:
    from .render import render

    return render(v)


def evaluate(text: str, **config):
    """Evaluate a program in a fresh engine and return its value."""
    with Engine(EngineConfig(**config)) as eng:
        return eng.run(text)


__all__ = ["Engine", "EngineConfig", "TestReport", "ModuleReport", "PragmaResult", "evaluate"]
