"""AST node definitions for the MiniC subset.

Nodes compare by identity; use :func:`same_shape` for structural comparison.
Every node carries a ``node_id`` (preorder index, assigned by
:func:`number_nodes`) and an optional source ``span``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Iterator, Optional, Union

KEY_NAME = "KEY"

ARITH_OPS = ("+", "-", "*", "/", "%")
BITWISE_OPS = ("&", "|", "^")
SHIFT_OPS = ("<<", ">>")
COMPARE_OPS = ("<", "<=", ">", ">=", "==", "!=")
LOGIC_OPS = ("&&", "||")
BINARY_OPS = ARITH_OPS + BITWISE_OPS + SHIFT_OPS + COMPARE_OPS + LOGIC_OPS
UNARY_OPS = ("-", "+", "~", "!")


@dataclass(frozen=True)
class Span:
    line: int
    col: int


@dataclass(frozen=True)
class CType:
    """A fixed-width integer type."""

    signed: bool
    width: int

    @property
    def mask(self) -> int:
        return (1 << self.width) - 1

    @property
    def min(self) -> int:
        return -(1 << (self.width - 1)) if self.signed else 0

    @property
    def max(self) -> int:
        return (1 << (self.width - 1)) - 1 if self.signed else self.mask

    def spelling(self) -> str:
        return {
            (True, 8): "signed char",
            (False, 8): "unsigned char",
            (True, 16): "short",
            (False, 16): "unsigned short",
            (True, 32): "int",
            (False, 32): "unsigned int",
        }[(self.signed, self.width)]

    def convert(self, value: int) -> int:
        """Two's-complement wrap of ``value`` into this type."""
        value &= self.mask
        if self.signed and value > self.max:
            value -= 1 << self.width
        return value


INT = CType(True, 32)
UINT = CType(False, 32)
UCHAR = CType(False, 8)


@dataclass(eq=False, kw_only=True)
class Node:
    node_id: int = -1
    span: Optional[Span] = None

    def children(self) -> Iterator["Node"]:
        for f in fields(self):
            if f.name in ("node_id", "span"):
                continue
            value = getattr(self, f.name)
            if isinstance(value, Node):
                yield value
            elif isinstance(value, list):
                for item in value:
                    if isinstance(item, Node):
                        yield item


# -- expressions -------------------------------------------------------------


@dataclass(eq=False)
class Expr(Node):
    pass


@dataclass(eq=False)
class IntLit(Expr):
    value: int
    unsigned: bool = False


@dataclass(eq=False)
class Var(Expr):
    name: str


@dataclass(eq=False)
class Index(Expr):
    name: str
    index: Expr


@dataclass(eq=False)
class Unary(Expr):
    op: str
    operand: Expr


@dataclass(eq=False)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(eq=False)
class Ternary(Expr):
    cond: Expr
    then: Expr
    other: Expr


@dataclass(eq=False)
class Call(Expr):
    name: str
    args: list[Expr]


@dataclass(eq=False)
class Cast(Expr):
    to: CType
    operand: Expr


@dataclass(eq=False)
class LockedConst(Expr):
    """``stored ^ KEY[offset .. offset+31]`` cast back to the literal type."""

    stored: int
    key_offset: int
    unsigned: bool = False


@dataclass(eq=False)
class LockedOp(Expr):
    """Two-way key-selected operation: ``KEY[k] ? l op_one r : l op_zero r``."""

    key_index: int
    op_one: str
    op_zero: str
    left: Expr
    right: Expr


@dataclass(eq=False)
class LockedCond(Expr):
    """Branch condition XORed with a key bit; ``invert`` stores ``!cond``."""

    cond: Expr
    invert: bool
    key_index: int


# -- statements --------------------------------------------------------------


@dataclass(eq=False)
class Stmt(Node):
    pass


@dataclass(eq=False)
class Decl(Stmt):
    ctype: CType
    name: str
    size: Optional[int] = None
    init: Optional[Expr] = None
    init_list: Optional[list[int]] = None
    const: bool = False


@dataclass(eq=False)
class Assign(Stmt):
    target: Union[Var, Index]
    op: str
    value: Expr


@dataclass(eq=False)
class IncDec(Stmt):
    target: Union[Var, Index]
    op: str


@dataclass(eq=False)
class ExprStmt(Stmt):
    expr: Expr


@dataclass(eq=False)
class Block(Stmt):
    stmts: list[Stmt]


@dataclass(eq=False)
class If(Stmt):
    cond: Expr
    then: Stmt
    other: Optional[Stmt] = None


@dataclass(eq=False)
class For(Stmt):
    init: list[Stmt]
    cond: Optional[Expr]
    update: list[Stmt]
    body: Stmt


@dataclass(eq=False)
class While(Stmt):
    cond: Expr
    body: Stmt


@dataclass(eq=False)
class Return(Stmt):
    value: Optional[Expr] = None


@dataclass(eq=False)
class Break(Stmt):
    pass


@dataclass(eq=False)
class Continue(Stmt):
    pass


# -- top level ---------------------------------------------------------------


@dataclass(eq=False)
class Param(Node):
    name: str
    ctype: CType
    size: Optional[int] = None  # None: scalar, 0: unsized array
    const: bool = False

    @property
    def is_array(self) -> bool:
        return self.size is not None

    @property
    def direction(self) -> str:
        """Scalars and const arrays are inputs; other arrays are in/out."""
        if self.is_array and not self.const:
            return "out"
        return "in"


@dataclass(eq=False)
class FunctionDef(Node):
    name: str
    ret: Optional[CType]
    params: list[Param]
    body: Block


@dataclass(eq=False)
class Program(Node):
    globals: list[Decl]
    functions: list[FunctionDef]
    top_name: str

    @property
    def top(self) -> FunctionDef:
        return self.function(self.top_name)

    def function(self, name: str) -> FunctionDef:
        for fn in self.functions:
            if fn.name == name:
                return fn
        raise KeyError(name)

    @property
    def is_locked(self) -> bool:
        return any(p.name == KEY_NAME for p in self.top.params)

    def output_layout(self) -> list[tuple[str, CType, int]]:
        """(name, type, element count) of each output word group, in bit order.

        Out-direction parameters of the top function come first in declaration
        order, then the return value (name ``"return"``) if not void.
        """
        top = self.top
        layout = [
            (p.name, p.ctype, p.size)
            for p in top.params
            if p.direction == "out" and p.name != KEY_NAME
        ]
        if top.ret is not None:
            layout.append(("return", top.ret, 1))
        return layout

    @property
    def output_width(self) -> int:
        return sum(t.width * n for _, t, n in self.output_layout())


def walk(node: Node) -> Iterator[Node]:
    """Preorder traversal."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(list(current.children())))


def number_nodes(program: Program) -> Program:
    for i, node in enumerate(walk(program)):
        node.node_id = i
    return program


def same_shape(a: object, b: object) -> bool:
    """Structural equality ignoring node ids and spans."""
    if isinstance(a, Node) or isinstance(b, Node):
        if type(a) is not type(b):
            return False
        for f in fields(a):
            if f.name in ("node_id", "span"):
                continue
            if not same_shape(getattr(a, f.name), getattr(b, f.name)):
                return False
        return True
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(same_shape(x, y) for x, y in zip(a, b))
    return a == b
