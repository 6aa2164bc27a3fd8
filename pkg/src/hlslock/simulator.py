"""Execution of MiniC programs.

Programs are translated once into Python source (one Python function per
MiniC function) and executed natively.  Semantics follow fixed-width
two's-complement C: values are kept canonical for their static type, every
arithmetic result is wrapped, shift counts are masked to the operand width,
division by zero yields 0, and out-of-bounds reads yield 0 while
out-of-bounds writes are dropped.  Each loop iteration consumes one step of
the run's step budget.
"""
from __future__ import annotations

import enum
import json
import weakref
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .minic.ast import (
    INT, KEY_NAME, UINT, Assign, Binary, Block, Break, Call, Cast, Continue,
    CType, Decl, Expr, ExprStmt, For, FunctionDef, If, IncDec, Index, IntLit,
    LockedCond, LockedConst, LockedOp, Program, Return, Stmt, Ternary, Unary,
    Var, While, walk,
)
from .minic.idioms import CONST_KEY_BITS

DEFAULT_STEP_BUDGET = 10**7

InputVector = Mapping[str, Union[int, Sequence[int]]]


class Status(str, enum.Enum):
    NORMAL = "Normal"
    STEP_BUDGET_EXCEEDED = "StepBudgetExceeded"
    DIV_BY_ZERO = "DivByZero"
    OUT_OF_BOUNDS = "OutOfBounds"


class SimulationError(Exception):
    pass


class GoldenRunError(SimulationError):
    pass


@dataclass(frozen=True)
class OutputBits:
    """Output bit string packed into an int: bit ``i`` is ``(value >> i) & 1``."""

    value: int
    width: int
    status: Status = Status.NORMAL

    def __len__(self) -> int:
        return self.width

    @property
    def bits(self) -> np.ndarray:
        return unpack_bits([self.value], self.width)[0]

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.width:
            raise IndexError(i)
        return (self.value >> i) & 1


def unpack_bits(values: Sequence[int], width: int) -> np.ndarray:
    """Rows of little-endian bits, shape ``(len(values), width)``."""
    nbytes = max(1, (width + 7) // 8)
    raw = b"".join(v.to_bytes(nbytes, "little") for v in values)
    arr = np.frombuffer(raw, dtype=np.uint8).reshape(len(values), nbytes)
    return np.unpackbits(arr, axis=1, bitorder="little")[:, :width]


class _BudgetExceeded(Exception):
    pass


# -- runtime helpers shared by all generated modules ------------------------


def _budget():
    raise _BudgetExceeded


def _oob(S):
    S[2] = 1
    return 0


def _sdiv(S, a, b):
    if b == 0:
        S[1] = 1
        return 0
    q = abs(a) // abs(b)
    if (a < 0) != (b < 0):
        q = -q
    return ((q + 0x80000000) & 0xFFFFFFFF) - 0x80000000


def _smod(S, a, b):
    if b == 0:
        S[1] = 1
        return 0
    r = abs(a) % abs(b)
    return -r if a < 0 else r


def _udiv(S, a, b):
    if b == 0:
        S[1] = 1
        return 0
    return a // b


def _umod(S, a, b):
    if b == 0:
        S[1] = 1
        return 0
    return a % b


_RUNTIME = {
    "_budget": _budget, "_oob": _oob, "_sdiv": _sdiv, "_smod": _smod,
    "_udiv": _udiv, "_umod": _umod,
}


# -- static typing -----------------------------------------------------------


def promote(t: CType) -> CType:
    return INT if t.width < 32 else t


def common_type(a: CType, b: CType) -> CType:
    a, b = promote(a), promote(b)
    return UINT if UINT in (a, b) else INT


def convert_code(code: str, src: CType, dst: CType) -> str:
    if src.min >= dst.min and src.max <= dst.max:
        return code
    if dst.signed:
        half = 1 << (dst.width - 1)
        return f"(((({code}) + {half}) & {dst.mask}) - {half})"
    return f"(({code}) & {dst.mask})"


def binary_code(op: str, a: str, b: str, ta: CType, tb: CType) -> tuple[str, CType]:
    """Python code for a non-logical binary operator on canonical operands."""
    if op in ("<<", ">>"):
        rt = promote(ta)
        a = convert_code(a, ta, rt)
        if op == ">>":
            return f"({a} >> (({b}) & 31))", rt
        return convert_code(f"{a} << (({b}) & 31)", _UNBOUNDED, rt), rt
    rt = common_type(ta, tb)
    a = convert_code(a, ta, rt)
    b = convert_code(b, tb, rt)
    if op in ("<", "<=", ">", ">=", "==", "!="):
        return f"({a} {op} {b})", INT
    if op in ("&", "|", "^"):
        return f"({a} {op} {b})", rt
    if op in ("+", "-", "*"):
        return convert_code(f"{a} {op} {b}", _UNBOUNDED, rt), rt
    if op in ("/", "%"):
        fn = {("/", True): "_sdiv", ("%", True): "_smod", ("/", False): "_udiv", ("%", False): "_umod"}
        return f"{fn[op, rt.signed]}(_S, {a}, {b})", rt
    raise SimulationError(f"unknown operator {op}")


# a pseudo-type whose range contains everything; forces conversion
_UNBOUNDED = CType(True, 4096)


def expr_type(e: Expr, lookup) -> CType:
    """Static C type of ``e``; ``lookup(name)`` returns a variable's CType."""
    if isinstance(e, IntLit):
        return UINT if e.unsigned else INT
    if isinstance(e, (Var, Index)):
        return lookup(e.name)
    if isinstance(e, Unary):
        return INT if e.op == "!" else promote(expr_type(e.operand, lookup))
    if isinstance(e, Cast):
        return e.to
    if isinstance(e, (Binary, LockedOp)):
        op = e.op if isinstance(e, Binary) else e.op_one
        ta, tb = expr_type(e.left, lookup), expr_type(e.right, lookup)
        if op in ("&&", "||", "<", "<=", ">", ">=", "==", "!="):
            return INT
        if op in ("<<", ">>"):
            return promote(ta)
        return common_type(ta, tb)
    if isinstance(e, Ternary):
        return common_type(expr_type(e.then, lookup), expr_type(e.other, lookup))
    if isinstance(e, LockedConst):
        return UINT if e.unsigned else INT
    if isinstance(e, LockedCond):
        return INT
    raise SimulationError(f"cannot type {type(e).__name__}")


# -- code generation ---------------------------------------------------------


@dataclass
class _Sym:
    py: str  # python expression naming the storage
    ctype: CType
    size: Optional[int]  # None for scalars, 0 for unsized arrays


class _Codegen:
    def __init__(self, program: Program):
        self.program = program
        self.functions = {f.name: f for f in program.functions}
        self.lines: list[str] = []
        self.consts: dict[str, object] = {}
        self.global_syms: dict[str, _Sym] = {}
        self.global_init: list[tuple[int, Decl]] = []
        self.locked_consts: list[LockedConst] = []
        self.locked_ops: list[tuple[int, object, object]] = []
        self.tmp = 0
        self._setup_globals()

    # globals: const arrays/scalars become module constants, the rest live in
    # per-run state slots S[3:]
    def _setup_globals(self):
        slot = 3
        for g in self.program.globals:
            if g.const and g.size is not None:
                name = f"c_{g.name}"
                self.consts[name] = tuple(_init_values(g))
                self.global_syms[g.name] = _Sym(name, g.ctype, g.size)
            else:
                self.global_syms[g.name] = _Sym(f"_S[{slot}]", g.ctype, g.size)
                self.global_init.append((slot, g))
                slot += 1
        self.n_slots = slot

    def emit(self, depth: int, text: str):
        self.lines.append("    " * depth + text)

    def new_tmp(self) -> str:
        self.tmp += 1
        return f"_t{self.tmp}"

    def generate(self) -> str:
        self.emit(0, "def _init(_S):")
        scope = _Scope(self.global_syms)
        body_start = len(self.lines)
        for slot, g in self.global_init:
            if g.size is not None:
                self.emit(1, f"_S[{slot}] = {_init_values(g)!r}")
            elif g.init is not None:
                code, t = self.expr(g.init, scope)
                self.emit(1, f"_S[{slot}] = {convert_code(code, t, g.ctype)}")
            else:
                self.emit(1, f"_S[{slot}] = 0")
        if len(self.lines) == body_start:
            self.emit(1, "pass")
        for fn in self.program.functions:
            self.function(fn)
        return "\n".join(self.lines) + "\n"

    def function(self, fn: FunctionDef):
        scope = _Scope(self.global_syms)
        scope.ret = fn.ret
        scope.push()
        args = []
        for p in fn.params:
            py = "_K" if p.name == KEY_NAME else f"v_{p.name}"
            scope.declare(p.name, _Sym(py, p.ctype, p.size))
            if p.name != KEY_NAME:
                args.append(py)
        self.emit(0, f"def f_{fn.name}(_S, _K{''.join(', ' + a for a in args)}):")
        self.emit(1, "_kb, _kw, _ko = _K")
        self.block_body(fn.body, scope, 1, loop_update=None)
        if fn.ret is not None:
            self.emit(1, "return 0")

    def block_body(self, block: Block, scope: "_Scope", depth: int, loop_update):
        start = len(self.lines)
        scope.push()
        for s in block.stmts:
            self.stmt(s, scope, depth, loop_update)
        scope.pop()
        if len(self.lines) == start:
            self.emit(depth, "pass")

    def sub(self, s: Stmt, scope, depth, loop_update):
        if isinstance(s, Block):
            self.block_body(s, scope, depth, loop_update)
        else:
            start = len(self.lines)
            self.stmt(s, scope, depth, loop_update)
            if len(self.lines) == start:
                self.emit(depth, "pass")

    def stmt(self, s: Stmt, scope: "_Scope", depth: int, loop_update):
        if isinstance(s, Block):
            self.emit(depth, "if True:")
            self.block_body(s, scope, depth + 1, loop_update)
        elif isinstance(s, Decl):
            py = f"v_{s.name}"
            if s.size is not None:
                if s.init_list is not None:
                    self.emit(depth, f"{py} = {_init_values(s)!r}")
                else:
                    self.emit(depth, f"{py} = [0] * {s.size}")
            elif s.init is not None:
                code, t = self.expr(s.init, scope)
                self.emit(depth, f"{py} = {convert_code(code, t, s.ctype)}")
            else:
                self.emit(depth, f"{py} = 0")
            scope.declare(s.name, _Sym(py, s.ctype, s.size))
        elif isinstance(s, Assign):
            op = None if s.op == "=" else s.op[:-1]
            self.store(s.target, op, s.value, scope, depth)
        elif isinstance(s, IncDec):
            self.store(s.target, s.op[0], IntLit(1), scope, depth)
        elif isinstance(s, ExprStmt):
            code, _ = self.call(s.expr, scope, allow_void=True)
            self.emit(depth, code)
        elif isinstance(s, If):
            cond, _ = self.expr(s.cond, scope)
            self.emit(depth, f"if {cond}:")
            self.sub(s.then, scope, depth + 1, loop_update)
            if s.other is not None:
                self.emit(depth, "else:")
                self.sub(s.other, scope, depth + 1, loop_update)
        elif isinstance(s, While):
            self.loop(s.cond, [], s.body, scope, depth)
        elif isinstance(s, For):
            scope.push()
            for init in s.init:
                self.stmt(init, scope, depth, loop_update)
            self.loop(s.cond, s.update, s.body, scope, depth)
            scope.pop()
        elif isinstance(s, Return):
            if s.value is None:
                self.emit(depth, "return")
            else:
                code, t = self.expr(s.value, scope)
                self.emit(depth, f"return {convert_code(code, t, scope.ret)}")
        elif isinstance(s, Break):
            self.emit(depth, "break")
        elif isinstance(s, Continue):
            for u in loop_update or []:
                self.stmt(u, scope, depth, None)
            self.emit(depth, "continue")
        else:
            raise SimulationError(f"cannot execute {type(s).__name__}")

    def loop(self, cond: Optional[Expr], update: list[Stmt], body: Stmt, scope, depth):
        self.emit(depth, "while True:")
        self.emit(depth + 1, "_S[0] -= 1")
        self.emit(depth + 1, "if _S[0] < 0: _budget()")
        if cond is not None:
            code, _ = self.expr(cond, scope)
            self.emit(depth + 1, f"if not {code}: break")
        self.sub(body, scope, depth + 1, update)
        for u in update:
            self.stmt(u, scope, depth + 1, None)

    def store(self, target, op: Optional[str], value: Expr, scope, depth):
        sym = scope.lookup(target.name)
        if isinstance(target, Var):
            current = sym.py
            if op is None:
                code, t = self.expr(value, scope)
            else:
                rhs, tr = self.expr(value, scope)
                code, t = binary_code(op, current, rhs, sym.ctype, tr)
            self.emit(depth, f"{sym.py} = {convert_code(code, t, sym.ctype)}")
            return
        idx, _ = self.expr(target.index, scope)
        ti, tv = self.new_tmp(), self.new_tmp()
        self.emit(depth, f"{ti} = {idx}")
        bound = f"len({sym.py})" if sym.size == 0 else str(sym.size)
        if op is None:
            code, t = self.expr(value, scope)
        else:
            current = f"({sym.py}[{ti}] if 0 <= {ti} < {bound} else _oob(_S))"
            rhs, tr = self.expr(value, scope)
            code, t = binary_code(op, current, rhs, sym.ctype, tr)
        self.emit(depth, f"{tv} = {convert_code(code, t, sym.ctype)}")
        self.emit(depth, f"if 0 <= {ti} < {bound}: {sym.py}[{ti}] = {tv}")
        self.emit(depth, "else: _S[2] = 1")

    def call(self, c: Call, scope, allow_void=False) -> tuple[str, Optional[CType]]:
        callee = self.functions[c.name]
        if callee.ret is None and not allow_void:
            raise SimulationError(f"void function '{c.name}' used as a value")
        args = []
        for arg, param in zip(c.args, callee.params):
            if param.name == KEY_NAME:
                continue
            if param.is_array:
                args.append(scope.lookup(arg.name).py)
            else:
                code, t = self.expr(arg, scope)
                args.append(convert_code(code, t, param.ctype))
        return f"f_{c.name}(_S, _K{''.join(', ' + a for a in args)})", callee.ret

    def expr(self, e: Expr, scope: "_Scope") -> tuple[str, CType]:
        if isinstance(e, IntLit):
            return str(e.value), (UINT if e.unsigned else INT)
        if isinstance(e, Var):
            sym = scope.lookup(e.name)
            return sym.py, sym.ctype
        if isinstance(e, Index):
            sym = scope.lookup(e.name)
            idx, _ = self.expr(e.index, scope)
            if sym.py == "_K":
                return f"_kb[{idx}]", sym.ctype
            if isinstance(e.index, IntLit) and sym.size and e.index.value < sym.size:
                return f"{sym.py}[{e.index.value}]", sym.ctype
            t = self.new_tmp()
            bound = f"len({sym.py})" if sym.size == 0 else str(sym.size)
            return f"({sym.py}[{t}] if 0 <= ({t} := {idx}) < {bound} else _oob(_S))", sym.ctype
        if isinstance(e, Unary):
            code, t = self.expr(e.operand, scope)
            if e.op == "!":
                return f"(0 if {code} else 1)", INT
            rt = promote(t)
            code = convert_code(code, t, rt)
            if e.op == "+":
                return code, rt
            if e.op == "-":
                return convert_code(f"-{code}", _UNBOUNDED, rt), rt
            if e.op == "~":
                return (f"(~{code})" if rt.signed else f"({code} ^ {rt.mask})"), rt
        if isinstance(e, Cast):
            code, t = self.expr(e.operand, scope)
            return convert_code(code, t, e.to), e.to
        if isinstance(e, Binary):
            a, ta = self.expr(e.left, scope)
            b, tb = self.expr(e.right, scope)
            if e.op == "&&":
                return f"(1 if {a} and {b} else 0)", INT
            if e.op == "||":
                return f"(1 if {a} or {b} else 0)", INT
            return binary_code(e.op, a, b, ta, tb)
        if isinstance(e, Ternary):
            c, _ = self.expr(e.cond, scope)
            a, ta = self.expr(e.then, scope)
            b, tb = self.expr(e.other, scope)
            rt = common_type(ta, tb)
            return f"({convert_code(a, ta, rt)} if {c} else {convert_code(b, tb, rt)})", rt
        if isinstance(e, Call):
            return self.call(e, scope)
        if isinstance(e, LockedConst):
            i = len(self.locked_consts)
            self.locked_consts.append(e)
            rt = UINT if e.unsigned else INT
            return convert_code(f"(_kw[{i}] ^ {e.stored})", UINT, rt), rt
        if isinstance(e, LockedOp):
            a, ta = self.expr(e.left, scope)
            b, tb = self.expr(e.right, scope)
            one, rt = binary_code(e.op_one, "a", "b", ta, tb)
            zero, _ = binary_code(e.op_zero, "a", "b", ta, tb)
            i = len(self.locked_ops)
            self.locked_ops.append((e.key_index, one, zero))
            return f"_ko[{i}]({a}, {b})", rt
        if isinstance(e, LockedCond):
            c, _ = self.expr(e.cond, scope)
            test = f"(0 if {c} else 1)" if e.invert else f"(1 if {c} else 0)"
            return f"({test} ^ _kb[{e.key_index}])", INT
        raise SimulationError(f"cannot evaluate {type(e).__name__}")


class _Scope:
    def __init__(self, globals_: dict[str, _Sym]):
        self.frames: list[dict[str, _Sym]] = [globals_]
        self.ret: Optional[CType] = None

    def push(self):
        self.frames.append({})

    def pop(self):
        self.frames.pop()

    def declare(self, name: str, sym: _Sym):
        self.frames[-1][name] = sym

    def lookup(self, name: str) -> _Sym:
        for frame in reversed(self.frames):
            if name in frame:
                return frame[name]
        raise SimulationError(f"unresolved name '{name}'")


def _init_values(d: Decl) -> list[int]:
    values = [d.ctype.convert(v) for v in (d.init_list or [])]
    return values + [0] * (d.size - len(values))


# -- executable --------------------------------------------------------------


class Executable:
    """A compiled program; obtain one through :func:`compile_program`."""

    def __init__(self, program: Program):
        self.program = program
        gen = _Codegen(program)
        gen_source = gen.generate()
        self.source = gen_source
        namespace: dict[str, object] = dict(_RUNTIME)
        namespace.update(gen.consts)
        exec(compile(gen_source, f"<minic:{program.top_name}>", "exec"), namespace)
        self._init = namespace["_init"]
        self._top = namespace[f"f_{program.top_name}"]
        self._n_slots = gen.n_slots
        self._const_offsets = [c.key_offset for c in gen.locked_consts]
        self._op_table = []
        for key_index, one, zero in gen.locked_ops:
            fn_one = eval(f"lambda a, b: {one}", dict(_RUNTIME))
            fn_zero = eval(f"lambda a, b: {zero}", dict(_RUNTIME))
            self._op_table.append((key_index, fn_zero, fn_one))
        self.locked = program.is_locked
        self.key_bits_needed = _key_bits_needed(program)

        top = program.top
        self.params = [p for p in top.params if p.name != KEY_NAME]
        self.layout = program.output_layout()
        self.width = program.output_width
        self._out_index = [i for i, p in enumerate(self.params) if p.direction == "out"]
        self._has_return = top.ret is not None

    # -- key handling --

    def prepare_key(self, key) -> tuple:
        """Bind a key (bit sequence) into the runtime context tuple."""
        if key is None:
            if self.locked:
                raise SimulationError("locked program requires a key")
            return ((), (), ())
        if not self.locked:
            raise SimulationError("key given for an unlocked program")
        bits = [int(b) for b in _key_bits(key)]
        if len(bits) < self.key_bits_needed:
            raise SimulationError(
                f"key has {len(bits)} bits, program needs {self.key_bits_needed}"
            )
        words = []
        for off in self._const_offsets:
            w = 0
            for j in range(CONST_KEY_BITS):
                w |= bits[off + j] << j
            words.append(w)
        ops = [table[bits[k]] for k, *table in self._op_table]
        return (bits, words, ops)

    # -- inputs --

    def prepare_inputs(self, inputs: InputVector) -> list:
        unknown = set(inputs) - {p.name for p in self.params}
        if unknown:
            raise SimulationError(f"unknown input parameter(s): {', '.join(sorted(unknown))}")
        args = []
        for p in self.params:
            if p.name not in inputs:
                if p.direction == "out":
                    args.append([0] * p.size)
                    continue
                raise SimulationError(f"missing input '{p.name}'")
            value = inputs[p.name]
            if p.is_array:
                if isinstance(value, (int, np.integer)) or len(value) != p.size:
                    raise SimulationError(f"input '{p.name}' must have {p.size} elements")
                items = [int(v) for v in value]
            else:
                if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                    raise SimulationError(f"input '{p.name}' must be an integer")
                items = [int(value)]
            for v in items:
                if not p.ctype.min <= v <= p.ctype.max:
                    raise SimulationError(
                        f"input '{p.name}' value {v} out of range for {p.ctype.spelling()}"
                    )
            args.append(items if p.is_array else items[0])
        return args

    # -- execution --

    def run_prepared(self, args: list, kctx: tuple, step_budget: int) -> tuple[int, Status]:
        S = [step_budget, 0, 0] + [None] * (self._n_slots - 3)
        call_args = [list(a) if isinstance(a, list) else a for a in args]
        try:
            self._init(S)
            ret = self._top(S, kctx, *call_args)
        except _BudgetExceeded:
            return 0, Status.STEP_BUDGET_EXCEEDED
        value = 0
        offset = 0
        for (name, ctype, count), idx in zip(self.layout, self._out_index + [None]):
            mask = ctype.mask
            if name == "return" and idx is None:
                value |= (ret & mask) << offset
                offset += ctype.width
                continue
            for v in call_args[idx]:
                value |= (v & mask) << offset
                offset += ctype.width
        if S[1]:
            return value, Status.DIV_BY_ZERO
        if S[2]:
            return value, Status.OUT_OF_BOUNDS
        return value, Status.NORMAL

    def run(self, inputs: InputVector, key=None, step_budget: int = DEFAULT_STEP_BUDGET) -> OutputBits:
        value, status = self.run_prepared(
            self.prepare_inputs(inputs), self.prepare_key(key), step_budget
        )
        return OutputBits(value, self.width, status)

    def steps_used(self, inputs: InputVector, key=None, step_budget: int = DEFAULT_STEP_BUDGET) -> int:
        """Number of loop steps one run consumes (``step_budget + 1`` if exhausted)."""
        args = self.prepare_inputs(inputs)
        kctx = self.prepare_key(key)
        S = [step_budget, 0, 0] + [None] * (self._n_slots - 3)
        try:
            self._init(S)
            self._top(S, kctx, *[list(a) if isinstance(a, list) else a for a in args])
        except _BudgetExceeded:
            return step_budget + 1
        return step_budget - S[0]


def _key_bits_needed(program: Program) -> int:
    need = 0
    for node in walk(program):
        if isinstance(node, LockedConst):
            need = max(need, node.key_offset + CONST_KEY_BITS)
        elif isinstance(node, (LockedOp, LockedCond)):
            need = max(need, node.key_index + 1)
        elif isinstance(node, Index) and node.name == KEY_NAME and isinstance(node.index, IntLit):
            need = max(need, node.index.value + 1)
    return need


def _key_bits(key) -> Sequence[int]:
    bits = getattr(key, "bits", key)
    if isinstance(bits, str):
        return [int(c) for c in bits]
    return bits


_CACHE: "weakref.WeakKeyDictionary[Program, Executable]" = weakref.WeakKeyDictionary()


def compile_program(program: Program) -> Executable:
    exe = _CACHE.get(program)
    if exe is None:
        exe = Executable(program)
        _CACHE[program] = exe
    return exe


def run(
    program: Program,
    inputs: InputVector,
    key=None,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> OutputBits:
    """Execute ``program`` on one input vector (and key, if locked)."""
    return compile_program(program).run(inputs, key, step_budget)


def golden(program: Program, tests: Sequence[InputVector], step_budget: int = DEFAULT_STEP_BUDGET) -> list[OutputBits]:
    """Reference outputs of the unlocked program; abnormal runs reject the input set."""
    if program.is_locked:
        raise GoldenRunError("golden outputs must come from the original program")
    exe = compile_program(program)
    outs = []
    for i, t in enumerate(tests):
        out = exe.run(t, None, step_budget)
        if out.status is not Status.NORMAL:
            raise GoldenRunError(f"test {i}: golden run ended with {out.status.value}")
        outs.append(out)
    return outs


# -- test vectors ------------------------------------------------------------


def random_tests(program: Program, count: int, seed: int) -> list[dict]:
    """Uniform random values over each top-level parameter's type."""
    rng = np.random.default_rng(seed)
    tests = []
    params = [p for p in program.top.params if p.name != KEY_NAME]
    for _ in range(count):
        record: dict = {}
        for p in params:
            n = p.size if p.is_array else 1
            values = rng.integers(p.ctype.min, p.ctype.max, size=n, endpoint=True)
            record[p.name] = [int(v) for v in values] if p.is_array else int(values[0])
        tests.append(record)
    return tests


def load_tests(path: Union[str, Path]) -> list[dict]:
    """Read test vectors: a JSON list of ``{param: int | [int, ...]}`` records."""
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list) or not all(isinstance(r, dict) for r in data):
        raise SimulationError(f"{path}: expected a JSON list of objects")
    return data


def save_tests(tests: Sequence[Mapping], path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(list(tests), indent=1) + "\n")


def calibrate_step_budget(
    program: Program,
    tests: Sequence[InputVector],
    factor: int = 4,
    minimum: int = 64,
    cap: int = DEFAULT_STEP_BUDGET,
) -> int:
    """Budget scaled to the longest golden run: ``max(minimum, factor * steps)``, capped."""
    exe = compile_program(program)
    longest = 0
    for t in tests:
        used = exe.steps_used(t, None, cap)
        if used > cap:
            raise GoldenRunError("golden run exceeds the step budget cap")
        longest = max(longest, used)
    return min(cap, max(minimum, factor * longest))
