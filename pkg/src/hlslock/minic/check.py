"""Name resolution and static checks for parsed MiniC programs."""
from __future__ import annotations

from typing import Optional

from .ast import (
    KEY_NAME, UCHAR, Assign, Block, Break, Call, Continue, Decl, Expr, ExprStmt,
    For, FunctionDef, If, IncDec, Index, LockedCond, LockedOp, Node, Program,
    Return, Stmt, Var, While, walk,
)
from .errors import SemanticError, UnsupportedConstruct


def _err(node: Node, message: str, cls=SemanticError):
    line, col = (node.span.line, node.span.col) if node.span else (0, 0)
    raise cls(message, line, col)


class _Symbol:
    __slots__ = ("name", "is_array", "const")

    def __init__(self, name: str, is_array: bool, const: bool):
        self.name = name
        self.is_array = is_array
        self.const = const


class _FunctionChecker:
    def __init__(self, program: Program, fn: FunctionDef, globals_: dict[str, _Symbol]):
        self.program = program
        self.fn = fn
        self.functions = {f.name: f for f in program.functions}
        self.scopes: list[dict[str, _Symbol]] = [dict(globals_)]
        self.local_names: set[str] = set()
        self.loop_depth = 0
        self.calls: set[str] = set()

    def lookup(self, node: Node, name: str) -> _Symbol:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        _err(node, f"undeclared identifier '{name}'")

    def declare(self, node: Node, name: str, is_array: bool, const: bool, is_param=False):
        if name in self.functions:
            _err(node, f"'{name}' redeclares a function")
        if name in self.scopes[-1] and len(self.scopes) > 1:
            _err(node, f"redeclaration of '{name}'")
        if any(name in scope for scope in self.scopes[1:]):
            _err(node, f"shadowing of '{name}'", UnsupportedConstruct)
        if name == KEY_NAME and not is_param:
            _err(node, f"'{KEY_NAME}' is reserved for the locking key")
        self.scopes[-1][name] = _Symbol(name, is_array, const)

    def run(self):
        self.scopes.append({})
        for p in self.fn.params:
            if p.name == KEY_NAME and not (p.ctype == UCHAR and p.const and p.is_array):
                _err(p, f"'{KEY_NAME}' parameter must be 'const unsigned char {KEY_NAME}[]'")
            self.declare(p, p.name, p.is_array, p.const, is_param=True)
        self.block(self.fn.body, new_scope=False)
        self.scopes.pop()

    def block(self, block: Block, new_scope=True):
        if new_scope:
            self.scopes.append({})
        for stmt in block.stmts:
            self.stmt(stmt)
        if new_scope:
            self.scopes.pop()

    def stmt(self, s: Stmt):
        if isinstance(s, Block):
            self.block(s)
        elif isinstance(s, Decl):
            if s.init is not None:
                self.expr(s.init)
            self.declare(s, s.name, s.size is not None, s.const)
        elif isinstance(s, (Assign, IncDec)):
            sym = self.lookup(s.target, s.target.name)
            if sym.const:
                _err(s, f"assignment to const '{sym.name}'")
            self.lvalue(s.target, sym)
            if isinstance(s, Assign):
                self.expr(s.value)
        elif isinstance(s, ExprStmt):
            if not isinstance(s.expr, Call):
                _err(s, "expression statement must be a call")
            self.expr(s.expr)
        elif isinstance(s, If):
            self.expr(s.cond)
            self.stmt(s.then)
            if s.other is not None:
                self.stmt(s.other)
        elif isinstance(s, While):
            self.expr(s.cond)
            self.loop(s.body)
        elif isinstance(s, For):
            self.scopes.append({})
            for st in s.init:
                self.stmt(st)
            if s.cond is not None:
                self.expr(s.cond)
            for st in s.update:
                self.stmt(st)
            self.loop(s.body)
            self.scopes.pop()
        elif isinstance(s, Return):
            if s.value is None and self.fn.ret is not None:
                _err(s, "missing return value")
            if s.value is not None:
                if self.fn.ret is None:
                    _err(s, "return value in void function")
                self.expr(s.value)
        elif isinstance(s, (Break, Continue)):
            if not self.loop_depth:
                _err(s, f"'{type(s).__name__.lower()}' outside a loop")
        else:  # pragma: no cover
            _err(s, f"unknown statement {type(s).__name__}")

    def loop(self, body: Stmt):
        self.loop_depth += 1
        self.stmt(body)
        self.loop_depth -= 1

    def lvalue(self, target, sym: _Symbol):
        if isinstance(target, Index):
            if not sym.is_array:
                _err(target, f"'{sym.name}' is not an array")
            self.expr(target.index)
        elif sym.is_array:
            _err(target, f"cannot assign to array '{sym.name}'")

    def expr(self, e: Expr):
        stack = [e]
        while stack:
            node = stack.pop()
            if isinstance(node, Call):
                self.call(node)
                continue
            if isinstance(node, Var) and self.lookup(node, node.name).is_array:
                _err(node, f"array '{node.name}' used as a scalar")
            if isinstance(node, Index) and not self.lookup(node, node.name).is_array:
                _err(node, f"'{node.name}' is not an array")
            if isinstance(node, (LockedOp, LockedCond)) and not any(
                p.name == KEY_NAME for p in self.fn.params
            ):
                _err(node, f"locked expression without a {KEY_NAME} parameter")
            stack.extend(node.children())

    def call(self, c: Call):
        callee = self.functions.get(c.name)
        if callee is None:
            _err(c, f"call to undefined function '{c.name}'")
        if len(c.args) != len(callee.params):
            _err(c, f"'{c.name}' expects {len(callee.params)} arguments, got {len(c.args)}")
        self.calls.add(c.name)
        for arg, param in zip(c.args, callee.params):
            if param.is_array:
                if not isinstance(arg, Var) or not self.lookup(arg, arg.name).is_array:
                    _err(arg, f"argument '{param.name}' of '{c.name}' must be an array name")
                sym = self.lookup(arg, arg.name)
                if sym.const and not param.const:
                    _err(arg, f"const array '{arg.name}' passed as writable '{param.name}'")
            else:
                self.expr(arg)


def _find_top(program: Program, top: Optional[str], called: dict[str, set[str]]) -> str:
    names = [f.name for f in program.functions]
    if top is not None:
        if names.count(top) != 1:
            raise SemanticError(f"top function '{top}' not found")
        return top
    callees = set().union(*called.values()) if called else set()
    roots = [n for n in names if n not in callees]
    if len(roots) != 1:
        if not roots:
            raise SemanticError("no top function found")
        raise SemanticError(f"ambiguous top function: {', '.join(roots)} (pass top=...)")
    return roots[0]


def check_program(program: Program, top: Optional[str] = None) -> None:
    seen: set[str] = set()
    for fn in program.functions:
        if fn.name in seen:
            _err(fn, f"redefinition of '{fn.name}'")
        seen.add(fn.name)
    if not program.functions:
        raise SemanticError("no functions defined")

    globals_: dict[str, _Symbol] = {}
    for g in program.globals:
        if g.name in globals_ or g.name in seen:
            _err(g, f"redeclaration of '{g.name}'")
        if g.name == KEY_NAME:
            _err(g, f"'{KEY_NAME}' is reserved for the locking key")
        if g.init is not None:
            checker = _FunctionChecker(program, program.functions[0], globals_)
            checker.scopes = [dict(globals_)]
            checker.expr(g.init)
            if checker.calls:
                _err(g, "function call in a global initializer", UnsupportedConstruct)
        globals_[g.name] = _Symbol(g.name, g.size is not None, g.const)

    called: dict[str, set[str]] = {}
    for fn in program.functions:
        checker = _FunctionChecker(program, fn, globals_)
        checker.run()
        called[fn.name] = checker.calls

    # recursion check: the call graph must be acyclic
    state: dict[str, int] = {}

    def visit(name: str, path: list[str]):
        if state.get(name) == 1:
            raise UnsupportedConstruct("recursion: " + " -> ".join(path + [name]))
        if state.get(name) == 2:
            return
        state[name] = 1
        for callee in sorted(called[name]):
            visit(callee, path + [name])
        state[name] = 2

    for name in called:
        visit(name, [])

    program.top_name = _find_top(program, top, called)
    for p in program.top.params:
        if p.size == 0 and p.name != KEY_NAME:
            _err(p, f"top-level array '{p.name}' needs a static size")
