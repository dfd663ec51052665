"""Parser for point strings.

    tree    := 'T' INT '(h=' INT ';' [ INT ':' INT { ',' INT ':' INT } ] ')'
    plane   := 'P(' FLOAT ',' FLOAT ')'
    point   := tree | plane
    product := point '|' point

Errors report the byte offset where parsing stopped.
"""

from __future__ import annotations

import math
import re

_INT = re.compile(r"-?\d+")
_FLOAT = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf|nan")


class PointParseError(ValueError):
    def __init__(self, text: str, offset: int, expected: str):
        self.text = text
        self.offset = offset
        self.expected = expected
        super().__init__(f"parse error at byte {offset}: expected {expected} in {text!r}")


class _Cursor:
    def __init__(self, text: str, pos: int = 0):
        self.text = text
        self.pos = pos

    def byte_offset(self) -> int:
        return len(self.text[: self.pos].encode())

    def fail(self, expected: str) -> PointParseError:
        return PointParseError(self.text, self.byte_offset(), expected)

    def literal(self, lit: str) -> None:
        if not self.text.startswith(lit, self.pos):
            raise self.fail(repr(lit))
        self.pos += len(lit)

    def peek(self, lit: str) -> bool:
        return self.text.startswith(lit, self.pos)

    def integer(self) -> int:
        m = _INT.match(self.text, self.pos)
        if not m:
            raise self.fail("integer")
        self.pos = m.end()
        return int(m.group())

    def real(self) -> float:
        m = _FLOAT.match(self.text, self.pos)
        if not m:
            raise self.fail("real number")
        value = float(m.group())
        if not math.isfinite(value):
            raise self.fail("finite real number")
        self.pos = m.end()
        return value


def _tree(cur: _Cursor):
    from .tree import TreeError, TreeVertex

    start = cur.pos
    cur.literal("T")
    p = cur.integer()
    cur.literal("(h=")
    n = cur.integer()
    cur.literal(";")
    digits = []
    if not cur.peek(")"):
        while True:
            lvl = cur.integer()
            cur.literal(":")
            d = cur.integer()
            digits.append((lvl, d))
            if cur.peek(","):
                cur.pos += 1
                continue
            break
    cur.literal(")")
    try:
        # zero digits are not canonical; reject rather than silently drop
        if any(d == 0 for _, d in digits):
            raise TreeError("zero digits must be omitted")
        return TreeVertex(p, n, tuple(digits))
    except TreeError as exc:
        err = PointParseError(cur.text, len(cur.text[:start].encode()), f"valid tree vertex ({exc})")
        raise err from exc


def _plane(cur: _Cursor):
    from .plane import PlanePoint

    cur.literal("P(")
    x = cur.real()
    cur.literal(",")
    z = cur.real()
    cur.literal(")")
    return PlanePoint(x, z)


def _component(cur: _Cursor):
    if cur.peek("T"):
        return _tree(cur)
    if cur.peek("P"):
        return _plane(cur)
    raise cur.fail("'T' or 'P'")


def _finish(cur: _Cursor) -> None:
    if cur.pos != len(cur.text):
        raise cur.fail("end of input")


def parse_component(text: str):
    cur = _Cursor(text.strip())
    pt = _component(cur)
    _finish(cur)
    return pt


def parse_tree_vertex(text: str):
    cur = _Cursor(text.strip())
    pt = _tree(cur)
    _finish(cur)
    return pt


def parse_plane_point(text: str):
    cur = _Cursor(text.strip())
    pt = _plane(cur)
    _finish(cur)
    return pt


def parse_pair(text: str):
    """Split a product string into its two component points."""
    cur = _Cursor(text.strip())
    left = _component(cur)
    cur.literal("|")
    right = _component(cur)
    _finish(cur)
    return left, right
