"""Deterministic MiniC pretty-printer."""
from __future__ import annotations

from .ast import (
    Assign, Binary, Block, Break, Call, Cast, Continue, Decl, Expr, ExprStmt,
    For, FunctionDef, If, IncDec, Index, IntLit, LockedCond, LockedConst,
    LockedOp, Param, Program, Return, Stmt, Ternary, Unary, Var, While,
)
from .idioms import expand
from .parser import _BINARY_PREC

INDENT = "    "
_PRIMARY = 100
_UNARY = 90
_TERNARY = 0


def _prec(e: Expr) -> int:
    if isinstance(e, (LockedConst, LockedOp, LockedCond)):
        e = expand(e)
    if isinstance(e, Binary):
        return _BINARY_PREC[e.op]
    if isinstance(e, (Unary, Cast)):
        return _UNARY
    if isinstance(e, Ternary):
        return _TERNARY
    return _PRIMARY


_RELATIONAL = {"<", "<=", ">", ">="}
_EQUALITY = {"==", "!="}
_BITWISE = {"&", "^", "|"}


def _clarify(parent: str, child: Expr) -> bool:
    """Parentheses C does not need but readers (and compilers' warnings) want."""
    if isinstance(child, (LockedConst, LockedOp, LockedCond)):
        child = expand(child)
    if not isinstance(child, Binary):
        return False
    if parent in _BITWISE:
        return child.op in _RELATIONAL | _EQUALITY or (child.op in _BITWISE and child.op != parent)
    if parent in _EQUALITY:
        return child.op in _RELATIONAL | _EQUALITY
    return False


def _wrap(text: str, needed: bool) -> str:
    return f"({text})" if needed else text


def expr_source(e: Expr) -> str:
    if isinstance(e, (LockedConst, LockedOp, LockedCond)):
        return expr_source(expand(e))
    if isinstance(e, IntLit):
        return f"{e.value}u" if e.unsigned else str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Index):
        return f"{e.name}[{expr_source(e.index)}]"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(expr_source(a) for a in e.args)})"
    if isinstance(e, (Unary, Cast)):
        inner = expr_source(e.operand)
        inner = _wrap(inner, _prec(e.operand) < _PRIMARY)
        head = e.op if isinstance(e, Unary) else f"({e.to.spelling()})"
        return head + inner
    if isinstance(e, Binary):
        p = _BINARY_PREC[e.op]
        left = _wrap(expr_source(e.left), _prec(e.left) < p or _clarify(e.op, e.left))
        right = _wrap(expr_source(e.right), _prec(e.right) <= p or _clarify(e.op, e.right))
        return f"{left} {e.op} {right}"
    if isinstance(e, Ternary):
        cond = _wrap(expr_source(e.cond), _prec(e.cond) <= _TERNARY)
        then = _wrap(expr_source(e.then), _prec(e.then) <= _TERNARY)
        other = _wrap(expr_source(e.other), _prec(e.other) <= _TERNARY)
        return f"{cond} ? {then} : {other}"
    raise TypeError(f"cannot print {type(e).__name__}")


def _declarator(d: Decl) -> str:
    text = d.name
    if d.size is not None:
        text += f"[{d.size}]"
    if d.init is not None:
        text += f" = {expr_source(d.init)}"
    elif d.init_list is not None:
        text += " = {" + ", ".join(str(v) for v in d.init_list) + "}"
    return text


def _decl(d: Decl) -> str:
    return ("const " if d.const else "") + f"{d.ctype.spelling()} {_declarator(d)}"


def _simple(s: Stmt) -> str:
    if isinstance(s, Assign):
        return f"{expr_source(s.target)} {s.op} {expr_source(s.value)}"
    if isinstance(s, IncDec):
        return f"{expr_source(s.target)}{s.op}"
    if isinstance(s, ExprStmt):
        return expr_source(s.expr)
    raise TypeError(f"not a simple statement: {type(s).__name__}")


def _param(p: Param) -> str:
    text = ("const " if p.const else "") + f"{p.ctype.spelling()} {p.name}"
    if p.size is not None:
        text += f"[{p.size}]" if p.size else "[]"
    return text


class _Emitter:
    def __init__(self):
        self.lines: list[str] = []
        self.depth = 0

    def line(self, text: str):
        self.lines.append(INDENT * self.depth + text)

    def block_body(self, block: Block):
        self.depth += 1
        for s in block.stmts:
            self.stmt(s)
        self.depth -= 1

    def sub(self, header: str, body: Stmt):
        """Emit ``header`` followed by a sub-statement, keeping its exact shape."""
        if isinstance(body, Block):
            self.line(header + " {")
            self.block_body(body)
            self.line("}")
        else:
            self.line(header)
            self.depth += 1
            self.stmt(body)
            self.depth -= 1

    def stmt(self, s: Stmt):
        if isinstance(s, Block):
            if not s.stmts:
                self.line("{}")
                return
            self.line("{")
            self.block_body(s)
            self.line("}")
        elif isinstance(s, Decl):
            self.line(_decl(s) + ";")
        elif isinstance(s, (Assign, IncDec, ExprStmt)):
            self.line(_simple(s) + ";")
        elif isinstance(s, If):
            self.sub(f"if ({expr_source(s.cond)})", s.then)
            other = s.other
            while isinstance(other, If):
                self.sub(f"else if ({expr_source(other.cond)})", other.then)
                other = other.other
            if other is not None:
                self.sub("else", other)
        elif isinstance(s, While):
            self.sub(f"while ({expr_source(s.cond)})", s.body)
        elif isinstance(s, For):
            if s.init and isinstance(s.init[0], Decl):
                init = _decl(s.init[0])
                for d in s.init[1:]:
                    init += ", " + _declarator(d)
            else:
                init = ", ".join(_simple(x) for x in s.init)
            cond = "" if s.cond is None else " " + expr_source(s.cond)
            update = ", ".join(_simple(x) for x in s.update)
            self.sub(f"for ({init};{cond}; {update})".replace("; )", ";)"), s.body)
        elif isinstance(s, Return):
            self.line("return;" if s.value is None else f"return {expr_source(s.value)};")
        elif isinstance(s, Break):
            self.line("break;")
        elif isinstance(s, Continue):
            self.line("continue;")
        else:
            raise TypeError(f"cannot print {type(s).__name__}")

    def function(self, fn: FunctionDef):
        ret = "void" if fn.ret is None else fn.ret.spelling()
        params = ", ".join(_param(p) for p in fn.params) or "void"
        self.line(f"{ret} {fn.name}({params}) {{")
        self.block_body(fn.body)
        self.line("}")


def emit_source(program: Program) -> str:
    """Render ``program`` as MiniC text; ``parse`` of the result is isomorphic."""
    out = _Emitter()
    for g in program.globals:
        out.line(_decl(g) + ";")
    for i, fn in enumerate(program.functions):
        if i or program.globals:
            out.line("")
        out.function(fn)
    return "\n".join(out.lines) + "\n"
