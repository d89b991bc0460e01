"""Sequential reference interpreter.

Evaluation is call-by-value, left to right, with 64-bit wrapping
arithmetic.  The evaluator runs on an explicit work stack instead of Python
recursion, so deep user-level recursion is bounded only by the configured
call-depth limit.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EvalError
from .kernels import BUILTINS
from .lang import (
    Bare, Bind, BinOp, Call, DoBody, If, Let, Lit, Program, Quote, Tuple, Var,
    entry_def,
)
from .values import UNIT, VInt, VTuple, Value, kind_name, wrap64

DEFAULT_MAX_DEPTH = 10_000

# work-stack opcodes
_EVAL, _BRANCH, _TUPLE, _BINOP, _APPLY, _STMT, _AFTER, _RETURN = range(8)


@dataclass
class Env:
    bindings: dict = field(default_factory=dict)
    call_depth: int = 0


class Interpreter:
    def __init__(self, program: Program | None = None, max_depth: int = DEFAULT_MAX_DEPTH):
        self.defs = program.defs if program is not None else {}
        self.max_depth = max_depth

    def evaluate(self, expr, bindings=None, depth: int = 0) -> tuple[Value, str]:
        """Evaluate ``expr``; returns the value and any printed text."""
        out: list[str] = []
        value = self._run(expr, dict(bindings or {}), depth, out)
        return value, "".join(out)

    def _run(self, expr, env: dict, depth: int, out: list) -> Value:
        values: list = []
        todo: list = [(_EVAL, expr, env)]
        defs = self.defs
        while todo:
            op, a, b = todo.pop()
            if op == _EVAL:
                e = a
                t = type(e)
                if t is Lit:
                    values.append(VInt(e.value))
                elif t is Var:
                    try:
                        values.append(b[e.name])
                    except KeyError:
                        raise EvalError(f"unbound variable '{e.name}'") from None
                elif t is Quote:
                    values.append(e.value)
                elif t is BinOp:
                    todo.append((_BINOP, e.op, None))
                    todo.append((_EVAL, e.rhs, b))
                    todo.append((_EVAL, e.lhs, b))
                elif t is Call:
                    todo.append((_APPLY, e, None))
                    for arg in reversed(e.args):
                        todo.append((_EVAL, arg, b))
                elif t is If:
                    todo.append((_BRANCH, e, b))
                    todo.append((_EVAL, e.cond, b))
                elif t is Tuple:
                    todo.append((_TUPLE, len(e.elements), None))
                    for x in reversed(e.elements):
                        todo.append((_EVAL, x, b))
                else:
                    raise EvalError(f"cannot evaluate {e!r}")
            elif op == _BINOP:
                rhs = values.pop()
                lhs = values.pop()
                if type(lhs) is not VInt or type(rhs) is not VInt:
                    raise EvalError(
                        f"operator '{a}' needs Int operands, got {kind_name(lhs)} and {kind_name(rhs)}")
                x, y = lhs.value, rhs.value
                r = x + y if a == "+" else x - y if a == "-" else x * y
                values.append(VInt(wrap64(r)))
            elif op == _BRANCH:
                cond = values.pop()
                if type(cond) is not VInt:
                    raise EvalError(f"if condition must be Int, got {kind_name(cond)}")
                todo.append((_EVAL, a.then if cond.value != 0 else a.else_, b))
            elif op == _TUPLE:
                if a == 0:
                    values.append(UNIT)
                else:
                    items = tuple(values[-a:])
                    del values[-a:]
                    values.append(VTuple(items))
            elif op == _APPLY:
                call = a
                n = len(call.args)
                args = values[len(values) - n:]
                del values[len(values) - n:]
                fd = defs.get(call.callee)
                if fd is not None:
                    if len(args) != len(fd.params):
                        raise EvalError(f"'{call.callee}' expects {len(fd.params)} argument(s)")
                    depth += 1
                    if depth > self.max_depth:
                        raise EvalError(f"call depth limit exceeded ({self.max_depth})")
                    todo.append((_RETURN, None, None))
                    frame = dict(zip(fd.params, args))
                    if isinstance(fd.body, DoBody):
                        if fd.body.stmts:
                            todo.append((_STMT, (fd.body.stmts, 0), frame))
                        else:
                            values.append(UNIT)
                    else:
                        todo.append((_EVAL, fd.body.expr, frame))
                    continue
                builtin = BUILTINS.get(call.callee)
                if builtin is None:
                    raise EvalError(f"unknown function '{call.callee}'")
                if len(args) != builtin.arity:
                    raise EvalError(f"'{call.callee}' expects {builtin.arity} argument(s)")
                value, text = builtin.call(args)
                if text:
                    out.append(text)
                values.append(value)
            elif op == _STMT:
                stmts, i = a
                todo.append((_AFTER, a, b))
                todo.append((_EVAL, stmts[i].rhs, b))
            elif op == _AFTER:
                stmts, i = a
                if i + 1 < len(stmts):
                    value = values.pop()
                    s = stmts[i]
                    if not isinstance(s, Bare):
                        b[s.name] = value
                    todo.append((_STMT, (stmts, i + 1), b))
            elif op == _RETURN:
                depth -= 1
        return values.pop()


def eval_expr(env: Env, expr, program: Program | None, max_depth: int = DEFAULT_MAX_DEPTH):
    """Evaluate one expression; returns ``(value, printed_text)``."""
    return Interpreter(program, max_depth).evaluate(expr, env.bindings, env.call_depth)


@dataclass(frozen=True)
class SequentialRun:
    final: Value
    output: str
    steps: tuple  # (task id, value) per statement


def run_sequential(program: Program, entry: str = "main",
                   max_depth: int = DEFAULT_MAX_DEPTH) -> SequentialRun:
    """Run the entry function statement by statement in source order."""
    fd = entry_def(program, entry)
    stmts = fd.body.stmts
    if not stmts:
        raise EvalError("entry body is empty")
    interp = Interpreter(program, max_depth)
    env: dict = {}
    out: list[str] = []
    steps = []
    value: Value = UNIT
    for i, stmt in enumerate(stmts):
        try:
            value, text = interp.evaluate(stmt.rhs, env)
        except EvalError as err:
            raise EvalError(f"statement {i}: {err}") from None
        out.append(text)
        steps.append((i, value))
        if isinstance(stmt, (Bind, Let)):
            env[stmt.name] = value
    return SequentialRun(value, "".join(out), tuple(steps))
