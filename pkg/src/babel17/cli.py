"""The ``babel17`` command line tool."""

from __future__ import annotations

import argparse
import os
import sys

from .desugar import desugar_program
from .engine import Engine, EngineConfig
from .errors import BabelException, ParseError, StaticError
from .lexer import tokenize
from .nodes import sexp
from .parser import parse_program
from .render import render

EXIT_OK, EXIT_RUNTIME, EXIT_STATIC = 0, 1, 2


def collect_sources(paths) -> list:
    """``[(text, filename)]`` for the given files and (recursively) directories."""
    files = []
    for p in paths:
        if os.path.isdir(p):
            for root, dirs, names in os.walk(p):
                dirs.sort()
                files.extend(os.path.join(root, n) for n in sorted(names) if n.endswith(".b17"))
        else:
            files.append(p)
    out = []
    for f in files:
        with open(f, encoding="utf-8") as fh:
            out.append((fh.read(), f))
    return out


def _make_engine(args, mode: str) -> Engine:
    log = None
    if args.log:
        fh = open(args.log, "a", encoding="utf-8")
        log = lambda line: (fh.write(line + "\n"), fh.flush())  # noqa: E731
    return Engine(EngineConfig(mode=mode, pragmas=not args.no_pragmas, seed=args.seed,
                               workers=args.workers, log=log))


def _dump(args, sources) -> None:
    for text, filename in sources:
        if len(sources) > 1 and (args.dump_tokens or args.dump_ast):
            print(f"## {filename}")
        if args.dump_tokens:
            for tok in tokenize(text):
                raw = tok.raw.replace("\r", "\\r").replace("\n", "\\n")
                print(f"{tok.pos} {tok.kind} {raw}")
        if args.dump_ast:
            prog = desugar_program(parse_program(text, filename), filename)
            for form in prog.modules + prog.stmts:
                print(sexp(form))


def cmd_run(args) -> int:
    try:
        sources = collect_sources(args.paths)
        _dump(args, sources)
        with _make_engine(args, "production") as eng:
            value = eng.run_files(sources)
            print(render(value))
    except StaticError as e:
        print(str(e), file=sys.stderr)
        return EXIT_STATIC
    except BabelException as e:
        print(str(e), file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        sources = collect_sources(args.paths)
        _dump(args, sources)
        with _make_engine(args, "test") as eng:
            eng.load(sources)
    except StaticError as e:
        print(str(e), file=sys.stderr)
        return EXIT_STATIC
    return EXIT_OK


def cmd_test(args) -> int:
    try:
        sources = collect_sources(args.paths)
        _dump(args, sources)
        with _make_engine(args, "test") as eng:
            eng.load(sources)
            report = eng.run_tests()
    except StaticError as e:
        print(str(e), file=sys.stderr)
        return EXIT_STATIC
    width = max([len(m.name) for m in report.modules] + [6])
    print(f"{'module':<{width}}  passed  failed  errors")
    for m in report.modules:
        print(f"{m.name:<{width}}  {m.passed:>6}  {m.failed:>6}  {m.errors:>6}")
    for m in report.modules:
        for line in m.failures:
            print(f"FAIL {line}")
    print(f"total: {report.passed} passed, {report.failed} failed, {report.errors} errors "
          f"in {report.seconds:.2f}s")
    return EXIT_OK if report.ok else EXIT_RUNTIME


def _incomplete(e: ParseError, text: str) -> bool:
    # a parse error on the last line usually means the entry continues
    return e.pos.line >= text.count("\n") + 1 and not text.endswith("\n\n")


def cmd_repl(args, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    interactive = stdin.isatty()
    eng = _make_engine(args, "production")

    def prompt(p):
        if interactive:
            stdout.write(p)
            stdout.flush()

    def submit(text, filename="<repl>"):
        try:
            value = eng.run(text, filename)
            print(render(value), file=stdout)
        except StaticError as e:
            print(str(e), file=stdout)
        except BabelException as e:
            print(str(e), file=stdout)

    buf = ""
    try:
        while True:
            prompt("... " if buf else "b17> ")
            line = stdin.readline()
            if not line:
                break
            stripped = line.strip()
            if not buf and stripped in (":quit", ":q"):
                break
            if not buf and stripped.startswith(":load "):
                path = stripped[6:].strip()
                try:
                    with open(path, encoding="utf-8") as fh:
                        submit(fh.read(), path)
                except OSError as e:
                    print(f"cannot read {path}: {e.strerror}", file=stdout)
                continue
            if not buf and not stripped:
                continue
            buf += line
            try:
                parse_program(buf)
            except ParseError as e:
                if _incomplete(e, buf) and stripped:
                    continue
            except StaticError:
                pass
            text, buf = buf, ""
            submit(text)
    finally:
        eng.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed for random and choose")
    common.add_argument("--workers", type=int, default=1, help="worker threads for concurrent")
    common.add_argument("--no-pragmas", action="store_true", help="ignore #print, #assert and friends")
    common.add_argument("--dump-tokens", action="store_true", help="print the token stream")
    common.add_argument("--dump-ast", action="store_true", help="print the desugared syntax tree")
    common.add_argument("--log", metavar="FILE", help="append pragma output to FILE instead of stderr")

    parser = argparse.ArgumentParser(prog="babel17", description="Babel-17 interpreter")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("run", "run programs"), ("test", "run unit tests"),
                        ("check", "check programs without running them")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("paths", nargs="+", help=".b17 files or directories")
    sub.add_parser("repl", parents=[common], help="interactive session")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        print("--workers must be positive", file=sys.stderr)
        return EXIT_STATIC
    handler = {"run": cmd_run, "test": cmd_test, "check": cmd_check, "repl": cmd_repl}[args.command]
    try:
        return handler(args)
    except FileNotFoundError as e:
        print(f"{e.filename}: no such file", file=sys.stderr)
        return EXIT_STATIC


if __name__ == "__main__":
    sys.exit(main())
