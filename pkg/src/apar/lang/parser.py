"""Layout-aware recursive descent parser.

Every top-level signature or definition occupies one line starting in
column 1.  A definition whose line ends in ``do`` owns the following lines
indented further than its own first column; each of those is one statement.
"""
from __future__ import annotations

from ..errors import ParseError
from ..values import INT64_MAX
from .ast import (
    BinOp, Bare, Bind, Call, DoBody, ExprBody, FuncDef, If, Let, Lit, Program,
    TArrow, TInt, TIO, TMatrix, TSummary, TTuple, TUnit, Tuple, Var, arity_of,
)
from .lexer import Tok, Token

_ATOM_START = (Tok.IDENT, Tok.INT, Tok.LPAREN, Tok.IF)


def _split_lines(tokens: list[Token]) -> list[list[Token]]:
    lines: list[list[Token]] = []
    for tok in tokens:
        if tok.line_start or not lines:
            lines.append([])
        lines[-1].append(tok)
    return lines


class _LineParser:
    """Parses the tokens of a single logical line."""

    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.i = 0

    def peek(self, offset: int = 0):
        j = self.i + offset
        return self.toks[j].kind if j < len(self.toks) else None

    def at_end(self) -> bool:
        return self.i >= len(self.toks)

    def pos(self):
        if self.i < len(self.toks):
            return self.toks[self.i].pos
        last = self.toks[-1]
        return (last.line, last.col + 1)

    def next(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: Tok, what: str | None = None) -> Token:
        if self.peek() is not kind:
            found = "end of line" if self.at_end() else repr(self.toks[self.i])
            raise ParseError(f"expected {what or repr(kind.value)}, found {found}", self.pos())
        return self.next()

    def expect_end(self):
        if not self.at_end():
            raise ParseError(f"unexpected {self.toks[self.i]!r}", self.pos())

    # types

    def type_(self, top: bool = True):
        """``type := atype { "->" type }``; IO only in final result position."""
        pos = self.pos()
        t = self.atype()
        if self.peek() is Tok.ARROW:
            if not top:
                raise ParseError("function types are only allowed at the top of a signature", pos)
            if isinstance(t, TIO):
                raise ParseError("IO is only allowed in the result position", pos)
            self.next()
            return TArrow(t, self.type_(top=True))
        return t

    def atype(self, inside_io: bool = False):
        pos = self.pos()
        kind = self.peek()
        if kind is Tok.INT_T:
            self.next()
            return TInt()
        if kind is Tok.MATRIX_T:
            self.next()
            return TMatrix()
        if kind is Tok.SUMMARY_T:
            self.next()
            return TSummary()
        if kind is Tok.IO:
            if inside_io:
                raise ParseError("nested IO is not allowed", pos)
            self.next()
            return TIO(self.atype(inside_io=True))
        if kind is Tok.LPAREN:
            self.next()
            if self.peek() is Tok.RPAREN:
                self.next()
                return TUnit()
            elems = [self._inner_type(inside_io)]
            while self.peek() is Tok.COMMA:
                self.next()
                elems.append(self._inner_type(inside_io))
            self.expect(Tok.RPAREN)
            return elems[0] if len(elems) == 1 else TTuple(tuple(elems))
        raise ParseError("expected a type", pos)

    def _inner_type(self, inside_io: bool):
        pos = self.pos()
        t = self.type_(top=False)
        if isinstance(t, TIO) or (inside_io and _mentions_io(t)):
            raise ParseError("IO is only allowed in the result position", pos)
        return t

    # expressions

    def expr(self):
        lhs = self.term()
        while self.peek() in (Tok.PLUS, Tok.MINUS):
            tok = self.next()
            lhs = BinOp(tok.kind.value, lhs, self.term(), tok.pos)
        return lhs

    def term(self):
        lhs = self.app()
        while self.peek() is Tok.STAR:
            tok = self.next()
            lhs = BinOp("*", lhs, self.app(), tok.pos)
        return lhs

    def app(self):
        pos = self.pos()
        head = self.atom()
        args = []
        while self.peek() in _ATOM_START:
            args.append(self.atom())
        if not args:
            return head
        if not isinstance(head, Var):
            raise ParseError("only a named function can be applied", pos)
        return Call(head.name, tuple(args), pos)

    def atom(self):
        pos = self.pos()
        kind = self.peek()
        if kind is Tok.IDENT:
            return Var(self.next().value, pos)
        if kind is Tok.INT:
            value = self.next().value
            if value > INT64_MAX:
                raise ParseError(f"integer literal {value} overflows 64 bits", pos)
            return Lit(value, pos)
        if kind is Tok.LPAREN:
            self.next()
            if self.peek() is Tok.RPAREN:
                self.next()
                return Tuple((), pos)
            elems = [self.expr()]
            while self.peek() is Tok.COMMA:
                self.next()
                elems.append(self.expr())
            self.expect(Tok.RPAREN)
            return elems[0] if len(elems) == 1 else Tuple(tuple(elems), pos)
        if kind is Tok.IF:
            self.next()
            cond = self.expr()
            self.expect(Tok.THEN)
            then = self.expr()
            self.expect(Tok.ELSE)
            return If(cond, then, self.expr(), pos)
        if self.at_end():
            raise ParseError("expected an expression, found end of line", pos)
        raise ParseError(f"expected an expression, found {self.toks[self.i]!r}", pos)

    def stmt(self):
        pos = self.pos()
        if self.peek() is Tok.LET:
            self.next()
            name = self.expect(Tok.IDENT, "a name").value
            self.expect(Tok.EQUALS)
            s = Let(name, self.expr(), pos)
        elif self.peek() is Tok.IDENT and self.peek(1) is Tok.BIND:
            name = self.next().value
            self.next()
            s = Bind(name, self.expr(), pos)
        else:
            s = Bare(self.expr(), pos)
        self.expect_end()
        return s


def _mentions_io(t) -> bool:
    if isinstance(t, TIO):
        return True
    if isinstance(t, TTuple):
        return any(_mentions_io(e) for e in t.elements)
    if isinstance(t, TArrow):
        return _mentions_io(t.param) or _mentions_io(t.result)
    return False


def _check_do_placement(line: list[Token]) -> None:
    for k, tok in enumerate(line):
        if tok.kind is Tok.DO and k != len(line) - 1:
            raise ParseError("'do' must be the last token on its line", tok.pos)


def parse_program(tokens: list[Token], builtins=None) -> Program:
    """Parse a token stream into a ``Program``.

    ``builtins`` defaults to the names of the kernel builtins.  Bare
    identifiers naming a function (rather than a local) become nullary
    calls.
    """
    if builtins is None:
        from ..kernels import BUILTINS
        builtins = BUILTINS
    builtins = frozenset(builtins)

    lines = _split_lines(tokens)
    sigs: dict[str, tuple] = {}
    raw_defs: list[tuple] = []
    i = 0
    while i < len(lines):
        line = lines[i]
        head = line[0]
        if head.col != 1:
            raise ParseError("unexpected indentation", head.pos)
        if head.kind is not Tok.IDENT:
            raise ParseError(f"expected a signature or definition, found {head!r}", head.pos)
        _check_do_placement(line)
        p = _LineParser(line)
        name = p.next().value
        if p.peek() is Tok.DCOLON:
            p.next()
            if name in sigs:
                raise ParseError(f"duplicate signature for '{name}'", head.pos)
            sig = p.type_()
            p.expect_end()
            sigs[name] = (sig, head.pos)
            i += 1
            continue
        params = []
        while p.peek() is Tok.IDENT:
            params.append(p.next().value)
        p.expect(Tok.EQUALS, "'=' or '::'")
        if p.peek() is Tok.DO:
            i += 1
            stmts = []
            while i < len(lines) and lines[i][0].col > head.col:
                _check_do_placement(lines[i])
                stmts.append(_LineParser(lines[i]).stmt())
                i += 1
            body = DoBody(tuple(stmts))
        else:
            body = ExprBody(p.expr())
            p.expect_end()
            i += 1
        raw_defs.append((name, tuple(params), body, head.pos))

    defs: dict[str, FuncDef] = {}
    for name, params, body, pos in raw_defs:
        if name in defs:
            raise ParseError(f"duplicate definition of '{name}'", pos)
        if name in builtins:
            raise ParseError(f"definition of '{name}' shadows a builtin", pos)
        if name not in sigs:
            raise ParseError(f"definition of '{name}' has no type signature", pos)
        sig = sigs[name][0]
        if len(set(params)) != len(params):
            raise ParseError(f"repeated parameter name in '{name}'", pos)
        if len(params) != arity_of(sig):
            raise ParseError(
                f"'{name}' has {len(params)} parameter(s) but its signature takes {arity_of(sig)}", pos)
        if isinstance(body, DoBody) and not _result_is_io(sig):
            raise ParseError(f"do-block in '{name}', whose result type is not IO", pos)
        defs[name] = FuncDef(name, params, sig, body, pos)
    for name, (_, pos) in sigs.items():
        if name not in defs:
            raise ParseError(f"signature for '{name}' has no definition", pos)

    functions = set(defs) | builtins
    defs = {name: _bind_names(fd, functions) for name, fd in defs.items()}
    return Program(defs, builtins)


def _result_is_io(sig) -> bool:
    while isinstance(sig, TArrow):
        sig = sig.result
    return isinstance(sig, TIO)


def _bind_names(fd: FuncDef, functions: set) -> FuncDef:
    """Turn bare identifiers that name functions into nullary calls."""
    scope = set(fd.params)

    def fix(e):
        if isinstance(e, Var):
            if e.name not in scope and e.name in functions:
                return Call(e.name, (), e.pos)
            return e
        if isinstance(e, Tuple):
            return Tuple(tuple(fix(x) for x in e.elements), e.pos)
        if isinstance(e, Call):
            return Call(e.callee, tuple(fix(x) for x in e.args), e.pos)
        if isinstance(e, If):
            return If(fix(e.cond), fix(e.then), fix(e.else_), e.pos)
        if isinstance(e, BinOp):
            return BinOp(e.op, fix(e.lhs), fix(e.rhs), e.pos)
        return e

    if isinstance(fd.body, ExprBody):
        body = ExprBody(fix(fd.body.expr))
    else:
        stmts = []
        for s in fd.body.stmts:
            rhs = fix(s.rhs)
            if isinstance(s, Bind):
                stmts.append(Bind(s.name, rhs, s.pos))
                scope.add(s.name)
            elif isinstance(s, Let):
                stmts.append(Let(s.name, rhs, s.pos))
                scope.add(s.name)
            else:
                stmts.append(Bare(rhs, s.pos))
        body = DoBody(tuple(stmts))
    return FuncDef(fd.name, fd.params, fd.signature, body, fd.pos)
