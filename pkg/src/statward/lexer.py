"""Tokenizer shared by the sequence and function mini-languages."""
from __future__ import annotations

import re
from dataclasses import dataclass


class DSLSyntaxError(SyntaxError):
    """Malformed input; ``position`` is the 0-based character offset."""

    def __init__(self, message, text="", position=0):
        self.position = position
        self.source = text
        caret = f"\n  {text}\n  {' ' * position}^" if text else ""
        super().__init__(f"{message} at position {position}{caret}")
        self.msg = message
        self.offset = position + 1

    def __str__(self):
        return self.args[0]


class UnknownIdentifier(DSLSyntaxError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # NUMBER, NAME, STRING, OP, EOF
    text: str
    pos: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<NUMBER>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<NAME>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<STRING>"[^"]*")
  | (?P<OP>\*\*|[-+*/^(),=\[\];])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            if kind == "OP" and tok == "**":
                tok = "^"
            tokens.append(Token(kind, tok, pos))
        pos = m.end()
    tokens.append(Token("EOF", "", len(text)))
    return tokens


class TokenStream:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def ahead(self, k: int = 1) -> Token:
        """The token ``k`` places past the current one; EOF once past the end."""
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def accept(self, text: str):
        if self.peek.kind in ("OP", "NAME") and self.peek.text == text:
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        tok = self.accept(text)
        if tok is None:
            self.error(f"expected {text!r}")
        return tok

    def error(self, message, tok=None, cls=DSLSyntaxError):
        tok = tok or self.peek
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        raise cls(f"{message}, found {found}", self.text, tok.pos)
