"""Pretty printer producing source that parses back to the same AST."""
from __future__ import annotations

from .ast import (
    BinOp, Bare, Bind, Call, DoBody, If, Let, Lit, Program, Quote, TArrow, TInt,
    TIO, TMatrix, TSummary, TTuple, TUnit, Tuple, Var,
)

_PREC = {"+": 1, "-": 1, "*": 2}
_ATOM = 3


def format_type(t) -> str:
    if isinstance(t, TArrow):
        return f"{format_type(t.param)} -> {format_type(t.result)}"
    if isinstance(t, TIO):
        inner = format_type(t.inner)
        if isinstance(t.inner, TArrow):
            inner = f"({inner})"
        return f"IO {inner}"
    if isinstance(t, TTuple):
        return "(" + ", ".join(format_type(e) for e in t.elements) + ")"
    return {TInt: "Int", TUnit: "()", TMatrix: "Matrix", TSummary: "Summary"}[type(t)]


def format_expr(e, level: int = 0) -> str:
    """Render ``e``; ``level`` is the binding strength the context needs."""
    if isinstance(e, Lit):
        text = str(e.value) if e.value >= 0 else f"(0 - {-e.value})"
        return text
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Tuple):
        return "(" + ", ".join(format_expr(x) for x in e.elements) + ")"
    if isinstance(e, Call):
        if not e.args:
            return e.callee
        text = " ".join([e.callee] + [format_expr(a, _ATOM) for a in e.args])
        return f"({text})" if level >= _ATOM else text
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        text = f"{format_expr(e.lhs, p)} {e.op} {format_expr(e.rhs, p + 1)}"
        return f"({text})" if level > p else text
    if isinstance(e, If):
        text = f"if {format_expr(e.cond)} then {format_expr(e.then)} else {format_expr(e.else_)}"
        return f"({text})" if level > 0 else text
    if isinstance(e, Quote):
        raise ValueError("quoted runtime values have no source form")
    raise TypeError(f"not an expression: {e!r}")


def format_stmt(s) -> str:
    if isinstance(s, Bind):
        return f"{s.name} <- {format_expr(s.rhs)}"
    if isinstance(s, Let):
        return f"let {s.name} = {format_expr(s.rhs)}"
    return format_expr(s.rhs)


def format_program(program: Program, indent: str = "    ") -> str:
    chunks = []
    for fd in program.defs.values():
        lines = [f"{fd.name} :: {format_type(fd.signature)}"]
        head = " ".join((fd.name,) + fd.params)
        if isinstance(fd.body, DoBody):
            lines.append(f"{head} = do")
            lines.extend(indent + format_stmt(s) for s in fd.body.stmts)
        else:
            lines.append(f"{head} = {format_expr(fd.body.expr)}")
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + "\n"
