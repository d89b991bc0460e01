"""Abstract syntax for types, expressions, statements and programs.

Positions are ``(line, column)`` pairs excluded from equality, so a program
re-parsed from its pretty-printed form compares equal to the original.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

from ..values import Value

Pos = Optional[tuple]


# -- types ------------------------------------------------------------------

@dataclass(frozen=True)
class TInt:
    pass


@dataclass(frozen=True)
class TUnit:
    pass


@dataclass(frozen=True)
class TMatrix:
    pass


@dataclass(frozen=True)
class TSummary:
    pass


@dataclass(frozen=True)
class TTuple:
    elements: tuple


@dataclass(frozen=True)
class TIO:
    inner: TypeExpr


@dataclass(frozen=True)
class TArrow:
    param: TypeExpr
    result: TypeExpr


TypeExpr = Union[TInt, TUnit, TMatrix, TSummary, TTuple, TIO, TArrow]


class Purity(enum.Enum):
    PURE = "pure"
    EFFECTFUL = "effectful"


def purity_of(signature: TypeExpr) -> Purity:
    while isinstance(signature, TArrow):
        signature = signature.result
    return Purity.EFFECTFUL if isinstance(signature, TIO) else Purity.PURE


def arity_of(signature: TypeExpr) -> int:
    n = 0
    while isinstance(signature, TArrow):
        signature = signature.result
        n += 1
    return n


# -- expressions ------------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    value: int
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Tuple:
    elements: tuple
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    callee: str
    args: tuple = ()
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Expr
    else_: Expr
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    lhs: Expr
    rhs: Expr
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Quote:
    """An already-computed value spliced into an expression.

    Never produced by the parser; the scheduler substitutes these for
    variables before shipping a task to a worker.
    """

    value: Value
    pos: Pos = field(default=None, compare=False, repr=False)


Expr = Union[Lit, Var, Tuple, Call, If, BinOp, Quote]


def free_vars(expr: Expr) -> set[str]:
    found: set[str] = set()
    stack = [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, Var):
            found.add(e.name)
        elif isinstance(e, Tuple):
            stack.extend(e.elements)
        elif isinstance(e, Call):
            stack.extend(e.args)
        elif isinstance(e, If):
            stack.extend((e.cond, e.then, e.else_))
        elif isinstance(e, BinOp):
            stack.extend((e.lhs, e.rhs))
    return found


def contains_call(expr: Expr) -> bool:
    stack = [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, Call):
            return True
        if isinstance(e, Tuple):
            stack.extend(e.elements)
        elif isinstance(e, If):
            stack.extend((e.cond, e.then, e.else_))
        elif isinstance(e, BinOp):
            stack.extend((e.lhs, e.rhs))
    return False


# -- statements and definitions --------------------------------------------

@dataclass(frozen=True)
class Bind:
    name: str
    rhs: Expr
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Let:
    name: str
    rhs: Expr
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Bare:
    rhs: Expr
    pos: Pos = field(default=None, compare=False, repr=False)


Stmt = Union[Bind, Let, Bare]


@dataclass(frozen=True)
class ExprBody:
    expr: Expr


@dataclass(frozen=True)
class DoBody:
    stmts: tuple


@dataclass(frozen=True)
class FuncDef:
    name: str
    params: tuple
    signature: TypeExpr
    body: Union[ExprBody, DoBody]
    pos: Pos = field(default=None, compare=False, repr=False)

    @property
    def purity(self) -> Purity:
        return purity_of(self.signature)


@dataclass
class Program:
    defs: dict
    builtins: frozenset = frozenset()

    def __eq__(self, other):
        if not isinstance(other, Program):
            return NotImplemented
        return (list(self.defs.items()) == list(other.defs.items())
                and self.builtins == other.builtins)
