"""Front end for the mini-language: tokens, syntax, purity and resolution."""
from .ast import (
    Bare, Bind, BinOp, Call, DoBody, ExprBody, FuncDef, If, Let, Lit, Program,
    Purity, Quote, TArrow, TInt, TIO, TMatrix, TSummary, TTuple, TUnit, Tuple, Var,
    arity_of, contains_call, free_vars, purity_of,
)
from .lexer import Tok, Token, tokenize
from .parser import parse_program
from .pretty import format_expr, format_program, format_type
from .resolve import Symbol, entry_def, resolve, stmt_purity


def parse(source: str, builtins=None) -> Program:
    return parse_program(tokenize(source), builtins)
