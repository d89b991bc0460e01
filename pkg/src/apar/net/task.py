"""Worker-side evaluation of a shipped task expression."""
from __future__ import annotations

from ..interp import DEFAULT_MAX_DEPTH, Interpreter
from ..lang import Program
from ..lang.resolve import check_expr, symbol_table


class TaskRunner:
    """Evaluates self-contained task expressions against a loaded program."""

    def __init__(self, program: Program, max_depth: int = DEFAULT_MAX_DEPTH):
        self.symbols = symbol_table(program)
        self.interp = Interpreter(program, max_depth)

    def run(self, expr):
        check_expr(expr, set(), self.symbols, effect_ok=True)
        return self.interp.evaluate(expr)
