"""Minimal s-expression reader/writer shared by the PDDL, snapshot and model formats."""

from __future__ import annotations

from typing import Union

from .errors import ParseError

SExp = Union[str, list]


def tokenize(text: str):
    """Yield (token, line, column); ';' starts a comment."""
    line, col = 1, 0
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 0
            i += 1
            continue
        col += 1
        if ch.isspace():
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line, col
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            yield text[i:j], line, col
            col += j - i - 1
            i = j


def parse_all(text: str, positions: dict | None = None) -> list:
    """Parse every top-level expression.

    When ``positions`` is given it receives id(list) -> (line, column) of the
    opening parenthesis for every parsed list (valid while the lists live).
    """
    stack: list[list] = [[]]
    opened: list[tuple[int, int]] = []
    for tok, line, col in tokenize(text):
        if tok == "(":
            stack.append([])
            opened.append((line, col))
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", line, col)
            done = stack.pop()
            where = opened.pop()
            if positions is not None:
                positions[id(done)] = where
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        line, col = opened[-1]
        raise ParseError("unclosed '('", line, col)
    return stack[0]


def parse_one(text: str, positions: dict | None = None) -> SExp:
    items = parse_all(text, positions)
    if len(items) != 1:
        raise ParseError(f"expected one expression, found {len(items)}")
    return items[0]


def dumps(x: SExp) -> str:
    if isinstance(x, str):
        return x
    return "(" + " ".join(dumps(y) for y in x) + ")"
