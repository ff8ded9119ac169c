"""An interpreter and unit-test runner for the Babel-17 language."""

from .engine import Engine, EngineConfig, TestReport, evaluate
from .errors import BabelException, StaticError
from .render import render

__version__ = "0.1.0"

__all__ = ["Engine", "EngineConfig", "TestReport", "evaluate", "BabelException", "StaticError", "render"]
