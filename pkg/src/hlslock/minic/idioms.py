"""Plain-C spellings of the locking constructs, and their recognition.

The printer expands ``LockedConst``/``LockedOp``/``LockedCond`` into ordinary
MiniC expressions over ``KEY[i]``; the parser folds those exact shapes back
so that printing and re-parsing a locked program is lossless.
"""
from __future__ import annotations

from dataclasses import fields
from typing import Optional

from .ast import (
    INT, KEY_NAME, UINT, Binary, Cast, Expr, Index, IntLit, LockedCond,
    LockedConst, LockedOp, Node, Program, Ternary, same_shape,
)

CONST_KEY_BITS = 32


def key_bit(i: int) -> Index:
    return Index(KEY_NAME, IntLit(i))


def key_word(offset: int) -> Expr:
    """``(unsigned)KEY[o] | (unsigned)KEY[o+1] << 1 | ... << 31``."""
    word: Optional[Expr] = None
    for j in range(CONST_KEY_BITS):
        term: Expr = Cast(UINT, key_bit(offset + j))
        if j:
            term = Binary("<<", term, IntLit(j))
        word = term if word is None else Binary("|", word, term)
    return word


def expand(node: Expr) -> Expr:
    """Plain-C form of one locking node (children are left as-is)."""
    if isinstance(node, LockedConst):
        xor = Binary("^", IntLit(node.stored, unsigned=True), key_word(node.key_offset))
        return Cast(UINT if node.unsigned else INT, xor)
    if isinstance(node, LockedOp):
        return Ternary(
            key_bit(node.key_index),
            Binary(node.op_one, node.left, node.right),
            Binary(node.op_zero, node.left, node.right),
        )
    if isinstance(node, LockedCond):
        test = Binary("==" if node.invert else "!=", node.cond, IntLit(0))
        return Binary("^", test, key_bit(node.key_index))
    return node


def _key_index(e: Expr) -> Optional[int]:
    if (
        isinstance(e, Index)
        and e.name == KEY_NAME
        and isinstance(e.index, IntLit)
        and not e.index.unsigned
    ):
        return e.index.value
    return None


def _match_key_word(e: Expr) -> Optional[int]:
    terms: list[Expr] = []
    while isinstance(e, Binary) and e.op == "|" and len(terms) < CONST_KEY_BITS - 1:
        terms.append(e.right)
        e = e.left
    terms.append(e)
    terms.reverse()
    if len(terms) != CONST_KEY_BITS:
        return None
    offset = None
    for j, term in enumerate(terms):
        if j:
            if not (
                isinstance(term, Binary)
                and term.op == "<<"
                and isinstance(term.right, IntLit)
                and term.right.value == j
                and not term.right.unsigned
            ):
                return None
            term = term.left
        if not (isinstance(term, Cast) and term.to == UINT):
            return None
        idx = _key_index(term.operand)
        if idx is None:
            return None
        if offset is None:
            offset = idx
        if idx != offset + j:
            return None
    return offset


def _match(e: Expr) -> Optional[Expr]:
    if isinstance(e, Cast) and e.to in (INT, UINT):
        x = e.operand
        if (
            isinstance(x, Binary)
            and x.op == "^"
            and isinstance(x.left, IntLit)
            and x.left.unsigned
        ):
            offset = _match_key_word(x.right)
            if offset is not None:
                return LockedConst(x.left.value, offset, unsigned=e.to == UINT, span=e.span)
    if isinstance(e, Ternary):
        k = _key_index(e.cond)
        a, b = e.then, e.other
        if (
            k is not None
            and isinstance(a, Binary)
            and isinstance(b, Binary)
            and same_shape(a.left, b.left)
            and same_shape(a.right, b.right)
        ):
            return LockedOp(k, a.op, b.op, a.left, a.right, span=e.span)
    if isinstance(e, Binary) and e.op == "^":
        k = _key_index(e.right)
        t = e.left
        if (
            k is not None
            and isinstance(t, Binary)
            and t.op in ("==", "!=")
            and isinstance(t.right, IntLit)
            and t.right.value == 0
            and not t.right.unsigned
        ):
            return LockedCond(t.left, t.op == "==", k, span=e.span)
    return None


def _fold(node: Node) -> Node:
    if isinstance(node, Expr):
        matched = _match(node)
        if matched is not None:
            node = matched
    for f in fields(node):
        if f.name in ("node_id", "span"):
            continue
        value = getattr(node, f.name)
        if isinstance(value, Node):
            setattr(node, f.name, _fold(value))
        elif isinstance(value, list):
            setattr(node, f.name, [_fold(v) if isinstance(v, Node) else v for v in value])
    return node


def recognize_locking(program: Program) -> Program:
    return _fold(program)
