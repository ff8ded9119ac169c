"""Shared helpers for running snippets and reporting acceptance criteria."""

from __future__ import annotations

from babel17 import BabelException, Engine, EngineConfig, StaticError, render
from corpus import ILLEGAL, Raises

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def outcome(eng: Engine, src: str, filename: str | None = None):
    """Rendered value, ``Raises(param)`` or ``ILLEGAL``."""
    try:
        return render(eng.run(src, filename))
    except BabelException as e:
        return Raises(render(e.param))
    except StaticError:
        return ILLEGAL


def fresh_outcome(src: str, library=(), **config):
    with Engine(EngineConfig(**config)) as eng:
        if library:
            eng.load(list(library))
        return outcome(eng, src)


def report(n: int, ok: bool, detail: str) -> None:
    line = f"acceptance criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line
