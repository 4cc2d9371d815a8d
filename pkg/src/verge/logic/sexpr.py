"""Minimal S-expression reader for SMT-LIB2 text."""

from __future__ import annotations

import re
from typing import Union

from ..errors import SmtSyntaxError


class Tok(str):
    """Atom token that remembers where it started."""

    pos: int
    quoted: bool

    def __new__(cls, text: str, pos: int, quoted: bool = False):
        obj = super().__new__(cls, text)
        obj.pos = pos
        obj.quoted = quoted
        return obj


class SList(list):
    pos: int = 0


SExpr = Union[Tok, SList]

_SIMPLE = re.compile(r"[A-Za-z~!@$%^&*_\-+=<>.?/][A-Za-z0-9~!@$%^&*_\-+=<>.?/]*\Z")
_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>;[^\n]*)
  | (?P<lp>\()
  | (?P<rp>\))
  | (?P<quoted>\|[^|]*\|)
  | (?P<string>"(?:[^"]|"")*")
  | (?P<atom>[^\s()|";]+)
""", re.VERBOSE)


def is_simple_symbol(name: str) -> bool:
    return bool(_SIMPLE.match(name)) and not name[0].isdigit()


def quote_symbol(name: str) -> str:
    if is_simple_symbol(name):
        return name
    if "|" in name or "\\" in name:
        raise ValueError(f"symbol {name!r} cannot be quoted")
    return f"|{name}|"


def tokenize(text: str):
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            raise SmtSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "quoted":
            yield "atom", Tok(m.group()[1:-1], pos, quoted=True)
        elif kind in ("atom", "string"):
            yield "atom", Tok(m.group(), pos)
        elif kind in ("lp", "rp"):
            yield kind, pos
        pos = m.end()


def parse_all(text: str) -> list[SExpr]:
    """Read every top-level S-expression in ``text``."""
    out: list[SExpr] = []
    stack: list[SList] = []
    for kind, val in tokenize(text):
        if kind == "lp":
            lst = SList()
            lst.pos = val
            stack.append(lst)
        elif kind == "rp":
            if not stack:
                raise SmtSyntaxError("unbalanced ')'", val)
            done = stack.pop()
            (stack[-1] if stack else out).append(done)
        else:
            (stack[-1] if stack else out).append(val)
    if stack:
        raise SmtSyntaxError("unbalanced '('", stack[-1].pos)
    return out


def parse_one(text: str) -> SExpr:
    items = parse_all(text)
    if len(items) != 1:
        raise SmtSyntaxError(f"expected one expression, found {len(items)}", 0)
    return items[0]


def dump(sx: SExpr) -> str:
    if isinstance(sx, list):
        return "(" + " ".join(dump(x) for x in sx) + ")"
    if getattr(sx, "quoted", False):
        return quote_symbol(str(sx)) if not is_simple_symbol(sx) else f"|{sx}|"
    return str(sx)
