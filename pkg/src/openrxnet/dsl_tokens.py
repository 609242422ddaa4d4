"""Line tokenizer shared by the document grammar and CLI expressions."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DslError

_TOKEN = re.compile(r"""
    (?P<space>\s+)
  | (?P<arrow>->)
  | (?P<colon>:)
  | (?P<at>@)
  | (?P<plus>\+)
  | (?P<word>[A-Za-z0-9_'·./]+)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    column: int


def tokenize_line(line: str, line_no: int) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(line):
        match = _TOKEN.match(line, pos)
        if match is None:
            raise DslError(f"unexpected character {line[pos]!r}",
                           line_no, pos + 1)
        kind = match.lastgroup
        if kind != "space":
            tokens.append(Token(kind, match.group(), match.start() + 1))
        pos = match.end()
    return tokens
