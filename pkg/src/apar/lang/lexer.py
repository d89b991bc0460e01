"""Tokenizer.  Layout is carried on the tokens themselves: the first token
of each physical line has ``line_start`` set, and its column is the line's
indentation."""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from ..errors import LexError


class Tok(enum.Enum):
    IDENT = "identifier"
    INT = "integer"
    DO = "do"
    LET = "let"
    IF = "if"
    THEN = "then"
    ELSE = "else"
    IO = "IO"
    INT_T = "Int"
    MATRIX_T = "Matrix"
    SUMMARY_T = "Summary"
    DCOLON = "::"
    ARROW = "->"
    BIND = "<-"
    EQUALS = "="
    LPAREN = "("
    RPAREN = ")"
    COMMA = ","
    PLUS = "+"
    MINUS = "-"
    STAR = "*"


KEYWORDS = {
    "do": Tok.DO, "let": Tok.LET, "if": Tok.IF, "then": Tok.THEN, "else": Tok.ELSE,
    "IO": Tok.IO, "Int": Tok.INT_T, "Matrix": Tok.MATRIX_T, "Summary": Tok.SUMMARY_T,
}
SYMBOLS = {t.value: t for t in Tok if not t.value.isalpha() and t not in (Tok.IDENT, Tok.INT)}


@dataclass(frozen=True)
class Token:
    kind: Tok
    value: object = None
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)
    line_start: bool = field(default=False, compare=False)

    @property
    def pos(self) -> tuple[int, int]:
        return (self.line, self.col)

    def __repr__(self):
        if self.value is None:
            return self.kind.name
        return f"{self.kind.name}({self.value!r})"


_TOKEN = re.compile(r"""
    (?P<space>[ \t\r]+)
  | (?P<comment>--.*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>::|->|<-|[=(),+*-])
""", re.VERBOSE)


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    for lineno, line in enumerate(source.split("\n"), start=1):
        pos = 0
        first = True
        while pos < len(line):
            m = _TOKEN.match(line, pos)
            col = len(line[:pos].expandtabs(8)) + 1
            if m is None:
                raise LexError(f"unexpected character {line[pos]!r}", (lineno, col))
            pos = m.end()
            kind = m.lastgroup
            text = m.group()
            if kind in ("space", "comment"):
                continue
            if kind == "int":
                tok = Token(Tok.INT, int(text), lineno, col, first)
            elif kind == "ident":
                kw = KEYWORDS.get(text)
                if kw is None:
                    tok = Token(Tok.IDENT, text, lineno, col, first)
                else:
                    tok = Token(kw, None, lineno, col, first)
            else:
                tok = Token(SYMBOLS[text], None, lineno, col, first)
            tokens.append(tok)
            first = False
    return tokens
