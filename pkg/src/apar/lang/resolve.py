"""Name, arity and purity checking."""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import ArityError, GraphError, PurityError, ResolveError, UnknownIdentifierError
from .ast import (
    Bare, Bind, BinOp, Call, DoBody, ExprBody, FuncDef, If, Let, Program, Purity,
    Quote, Tuple, Var, arity_of, purity_of,
)


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    purity: Purity
    kind: str  # "builtin" or "user"


SymbolTable = dict


def symbol_table(program: Program) -> dict[str, Symbol]:
    from ..kernels import BUILTINS

    table = {}
    for name in sorted(program.builtins):
        b = BUILTINS.get(name)
        if b is None:
            raise ResolveError(f"unknown builtin '{name}'")
        purity = Purity.EFFECTFUL if b.effectful else Purity.PURE
        table[name] = Symbol(name, b.arity, purity, "builtin")
    for name, fd in program.defs.items():
        table[name] = Symbol(name, arity_of(fd.signature), purity_of(fd.signature), "user")
    return table


def check_expr(expr, scope, symbols, effect_ok: bool = False) -> None:
    """Check one expression.

    ``effect_ok`` permits an effectful call at the top of ``expr`` only; its
    arguments, and everything else, must be pure.
    """
    stack = [(expr, effect_ok)]
    while stack:
        e, top = stack.pop()
        if isinstance(e, Var):
            if e.name not in scope:
                if e.name in symbols:
                    raise ArityError(f"function '{e.name}' used as a value", e.pos)
                raise UnknownIdentifierError(f"unknown identifier '{e.name}'", e.pos)
        elif isinstance(e, Call):
            if e.callee in scope:
                raise ResolveError(f"'{e.callee}' is a variable, not a function", e.pos)
            sym = symbols.get(e.callee)
            if sym is None:
                raise UnknownIdentifierError(f"unknown identifier '{e.callee}'", e.pos)
            if len(e.args) != sym.arity:
                raise ArityError(
                    f"'{e.callee}' expects {sym.arity} argument(s), got {len(e.args)}", e.pos)
            if sym.purity is Purity.EFFECTFUL and not top:
                raise PurityError(
                    f"effectful call to '{e.callee}' in a pure position", e.pos)
            stack.extend((a, False) for a in e.args)
        elif isinstance(e, Tuple):
            stack.extend((x, False) for x in e.elements)
        elif isinstance(e, If):
            stack.extend(((e.cond, False), (e.then, False), (e.else_, False)))
        elif isinstance(e, BinOp):
            stack.extend(((e.lhs, False), (e.rhs, False)))
        elif isinstance(e, Quote):
            pass


def _is_effectful_call(expr, symbols) -> bool:
    return (isinstance(expr, Call) and expr.callee in symbols
            and symbols[expr.callee].purity is Purity.EFFECTFUL)


def _check_def(fd: FuncDef, symbols) -> None:
    scope = set()
    for p in fd.params:
        if p in symbols:
            raise ResolveError(f"parameter '{p}' shadows a function", fd.pos)
        scope.add(p)
    effectful = fd.purity is Purity.EFFECTFUL
    if isinstance(fd.body, ExprBody):
        check_expr(fd.body.expr, scope, symbols, effect_ok=effectful)
        return
    for s in fd.body.stmts:
        if isinstance(s, Bind):
            if not _is_effectful_call(s.rhs, symbols):
                check_expr(s.rhs, scope, symbols)
                raise PurityError(
                    f"'{s.name} <- ...' needs an effectful call; use 'let' for pure values", s.pos)
            check_expr(s.rhs, scope, symbols, effect_ok=True)
        elif isinstance(s, Let):
            check_expr(s.rhs, scope, symbols)
        else:
            check_expr(s.rhs, scope, symbols, effect_ok=True)
        if isinstance(s, (Bind, Let)):
            if s.name in scope or s.name in symbols:
                raise ResolveError(f"'{s.name}' is already bound", s.pos)
            scope.add(s.name)


def resolve(program: Program) -> dict[str, Symbol]:
    """Check every body and return the symbol table."""
    symbols = symbol_table(program)
    for fd in program.defs.values():
        try:
            _check_def(fd, symbols)
        except ResolveError as err:
            raise type(err)(f"in '{fd.name}': {err.message}", err.pos) from None
    return symbols


def stmt_purity(stmt, symbols) -> Purity:
    if isinstance(stmt, Bind):
        return Purity.EFFECTFUL
    if isinstance(stmt, Bare) and _is_effectful_call(stmt.rhs, symbols):
        return Purity.EFFECTFUL
    return Purity.PURE


def entry_def(program: Program, entry: str) -> FuncDef:
    """Look up an entry function that can be split into statement tasks."""
    fd = program.defs.get(entry)
    if fd is None:
        raise GraphError(f"entry not found: '{entry}'")
    if fd.params:
        raise GraphError(f"entry '{entry}' must take no parameters")
    if fd.purity is not Purity.EFFECTFUL or not isinstance(fd.body, DoBody):
        raise GraphError(f"entry '{entry}' must be an IO function with a do-block")
    return fd
