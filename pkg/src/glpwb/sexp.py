"""Minimal S-expression reader and writer.

Atoms may contain balanced parentheses after their first character, so
ordinal literals such as ``w^(w)*2`` survive as single atoms.
"""

from __future__ import annotations

from typing import List, Union

SExp = Union[str, List["SExp"]]


class SExpError(SyntaxError):
    pass


def parse_sexp(text: str) -> SExp:
    pos = 0
    n = len(text)

    def skip() -> None:
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def read() -> SExp:
        nonlocal pos
        skip()
        if pos >= n:
            raise SExpError("unexpected end of input")
        ch = text[pos]
        if ch == ")":
            raise SExpError(f"unexpected ')' at position {pos}")
        if ch == "(":
            pos += 1
            items: List[SExp] = []
            while True:
                skip()
                if pos >= n:
                    raise SExpError("unterminated list")
                if text[pos] == ")":
                    pos += 1
                    return items
                items.append(read())
        start = pos
        depth = 0
        while pos < n:
            c = text[pos]
            if c == "(":
                depth += 1
            elif c == ")":
                if depth == 0:
                    break
                depth -= 1
            elif c.isspace() and depth == 0:
                break
            pos += 1
        if depth:
            raise SExpError(f"unbalanced atom starting at position {start}")
        return text[start:pos]

    value = read()
    skip()
    if pos != n:
        raise SExpError(f"trailing input at position {pos}")
    return value


def format_sexp(x: SExp) -> str:
    if isinstance(x, str):
        return x
    return "(" + " ".join(format_sexp(y) for y in x) + ")"
