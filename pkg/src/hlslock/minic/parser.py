"""Recursive-descent parser for MiniC."""
from __future__ import annotations

from typing import Optional

from . import ast
from .ast import (
    Assign, Binary, Block, Break, Call, Cast, Continue, CType, Decl, Expr,
    ExprStmt, For, FunctionDef, If, IncDec, Index, IntLit, Param, Program,
    Return, Span, Stmt, Ternary, Unary, Var, While,
)
from .errors import MiniCSyntaxError, SemanticError, UnsupportedConstruct
from .lexer import Token, tokenize

_STDINT = {
    "int8_t": CType(True, 8),
    "uint8_t": CType(False, 8),
    "int16_t": CType(True, 16),
    "uint16_t": CType(False, 16),
    "int32_t": CType(True, 32),
    "uint32_t": CType(False, 32),
}
_TYPE_WORDS = {"void", "char", "short", "int", "long", "signed", "unsigned"}

_BINARY_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6, "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8, "+": 9, "-": 9, "*": 10, "/": 10, "%": 10,
}
_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="}


def parse_int_literal(text: str, line: int = 0, col: int = 0) -> IntLit:
    body = text.rstrip("uUlL")
    suffix = text[len(body):].lower()
    if suffix.count("l") > 1:
        raise UnsupportedConstruct("64-bit literal", line, col)
    if body.lower().startswith("0x"):
        value = int(body, 16)
    elif len(body) > 1 and body.startswith("0"):
        value = int(body, 8)
    else:
        value = int(body)
    if value > 0xFFFFFFFF:
        raise UnsupportedConstruct(f"literal {text} exceeds 32 bits", line, col)
    return IntLit(value, unsigned="u" in suffix or value > 0x7FFFFFFF)


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("punct", "keyword") and self.tok.text in texts

    def advance(self) -> Token:
        tok = self.tok
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def expect_ident(self) -> Token:
        if self.tok.kind != "ident":
            self.error(f"expected identifier, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def error(self, message: str):
        raise MiniCSyntaxError(message, self.tok.line, self.tok.col)

    def span(self) -> Span:
        return Span(self.tok.line, self.tok.col)

    # -- types ---------------------------------------------------------------

    def at_type(self) -> bool:
        return self.tok.kind == "keyword" and (
            self.tok.text in _TYPE_WORDS or self.tok.text in _STDINT or self.tok.text == "const"
        )

    def parse_type(self) -> tuple[Optional[CType], bool]:
        """Return (type or None for void, const flag)."""
        const = False
        words: list[str] = []
        start = self.tok
        while self.tok.kind == "keyword" and (
            self.tok.text in _TYPE_WORDS or self.tok.text in _STDINT or self.tok.text == "const"
        ):
            word = self.advance().text
            if word == "const":
                const = True
            else:
                words.append(word)
        if self.at("*"):
            raise UnsupportedConstruct("pointer type", self.tok.line, self.tok.col)
        return _resolve_type(words, start), const

    # -- top level -----------------------------------------------------------

    def parse_unit(self) -> tuple[list[Decl], list[FunctionDef]]:
        globals_: list[Decl] = []
        functions: list[FunctionDef] = []
        while self.tok.kind != "eof":
            span = self.span()
            ctype, const = self.parse_type()
            name_tok = self.expect_ident()
            if self.at("("):
                functions.append(self.parse_function(ctype, name_tok, span))
            else:
                if ctype is None:
                    raise SemanticError("void variable", name_tok.line, name_tok.col)
                globals_.extend(self.parse_declarators(ctype, const, name_tok, span))
        return globals_, functions

    def parse_function(self, ret: Optional[CType], name_tok: Token, span: Span) -> FunctionDef:
        self.expect("(")
        params: list[Param] = []
        if self.at("void") and self.peek().text == ")":
            self.advance()
        elif not self.at(")"):
            while True:
                params.append(self.parse_param())
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        if self.at(";"):
            raise UnsupportedConstruct("function prototype", name_tok.line, name_tok.col)
        body = self.parse_block()
        return FunctionDef(name_tok.text, ret, params, body, span=span)

    def parse_param(self) -> Param:
        span = self.span()
        ctype, const = self.parse_type()
        if ctype is None:
            self.error("void parameter")
        name = self.expect_ident().text
        size = None
        if self.at("["):
            self.advance()
            size = 0 if self.at("]") else self.parse_array_size()
            self.expect("]")
            if self.at("["):
                raise UnsupportedConstruct("multi-dimensional array", self.tok.line, self.tok.col)
        return Param(name, ctype, size, const, span=span)

    def parse_array_size(self) -> int:
        tok = self.tok
        if tok.kind != "number":
            raise UnsupportedConstruct("non-literal array size", tok.line, tok.col)
        self.advance()
        size = parse_int_literal(tok.text, tok.line, tok.col).value
        if size <= 0:
            raise SemanticError("array size must be positive", tok.line, tok.col)
        return size

    def parse_declarators(self, ctype: CType, const: bool, name_tok: Token, span: Span) -> list[Decl]:
        decls = [self.parse_declarator(ctype, const, name_tok, span)]
        while self.at(","):
            self.advance()
            span = self.span()
            decls.append(self.parse_declarator(ctype, const, self.expect_ident(), span))
        self.expect(";")
        return decls

    def parse_declarator(self, ctype: CType, const: bool, name_tok: Token, span: Span) -> Decl:
        decl = Decl(ctype, name_tok.text, const=const, span=span)
        if self.at("["):
            self.advance()
            decl.size = self.parse_array_size()
            self.expect("]")
            if self.at("["):
                raise UnsupportedConstruct("multi-dimensional array", self.tok.line, self.tok.col)
        if self.at("="):
            self.advance()
            if decl.size is not None:
                decl.init_list = self.parse_init_list(decl.size)
            else:
                decl.init = self.parse_expr()
        elif const:
            raise SemanticError(f"const '{decl.name}' needs an initializer", name_tok.line, name_tok.col)
        return decl

    def parse_init_list(self, size: int) -> list[int]:
        start = self.expect("{")
        values: list[int] = []
        while not self.at("}"):
            negative = False
            if self.at("-"):
                self.advance()
                negative = True
            tok = self.tok
            if tok.kind != "number":
                raise UnsupportedConstruct("non-literal array initializer", tok.line, tok.col)
            self.advance()
            value = parse_int_literal(tok.text, tok.line, tok.col).value
            values.append(-value if negative else value)
            if not self.at(","):
                break
            self.advance()
        self.expect("}")
        if len(values) > size:
            raise SemanticError("too many initializers", start.line, start.col)
        return values

    # -- statements ----------------------------------------------------------

    def parse_block(self) -> Block:
        span = self.span()
        self.expect("{")
        stmts: list[Stmt] = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unterminated block")
            stmts.extend(self.parse_statement())
        self.expect("}")
        return Block(stmts, span=span)

    def parse_statement(self) -> list[Stmt]:
        span = self.span()
        if self.at("{"):
            return [self.parse_block()]
        if self.at_type():
            ctype, const = self.parse_type()
            if ctype is None:
                self.error("void variable")
            name_tok = self.expect_ident()
            return self.parse_declarators(ctype, const, name_tok, span)
        if self.at(";"):
            self.advance()
            return [Block([], span=span)]
        if self.at("if"):
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then = self.parse_sub_statement()
            other = None
            if self.at("else"):
                self.advance()
                other = self.parse_sub_statement()
            return [If(cond, then, other, span=span)]
        if self.at("while"):
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            return [While(cond, self.parse_sub_statement(), span=span)]
        if self.at("for"):
            return [self.parse_for()]
        if self.at("return"):
            self.advance()
            value = None if self.at(";") else self.parse_expr()
            self.expect(";")
            return [Return(value, span=span)]
        if self.at("break"):
            self.advance()
            self.expect(";")
            return [Break(span=span)]
        if self.at("continue"):
            self.advance()
            self.expect(";")
            return [Continue(span=span)]
        stmt = self.parse_simple()
        self.expect(";")
        return [stmt]

    def parse_sub_statement(self) -> Stmt:
        stmts = self.parse_statement()
        if len(stmts) != 1 or isinstance(stmts[0], Decl):
            raise UnsupportedConstruct("declaration as a sub-statement", self.tok.line, self.tok.col)
        return stmts[0]

    def parse_for(self) -> For:
        span = self.span()
        self.expect("for")
        self.expect("(")
        init: list[Stmt] = []
        if self.at_type():
            dspan = self.span()
            ctype, const = self.parse_type()
            if ctype is None:
                self.error("void variable")
            init = self.parse_declarators(ctype, const, self.expect_ident(), dspan)
        else:
            if not self.at(";"):
                init = self.parse_simple_list()
            self.expect(";")
        cond = None if self.at(";") else self.parse_expr()
        self.expect(";")
        update = [] if self.at(")") else self.parse_simple_list()
        self.expect(")")
        return For(init, cond, update, self.parse_sub_statement(), span=span)

    def parse_simple_list(self) -> list[Stmt]:
        stmts = [self.parse_simple()]
        while self.at(","):
            self.advance()
            stmts.append(self.parse_simple())
        return stmts

    def parse_simple(self) -> Stmt:
        """Assignment, increment/decrement, or call statement."""
        span = self.span()
        if self.at("++", "--"):
            op = self.advance().text
            return IncDec(self.parse_lvalue(), op, span=span)
        if self.tok.kind == "ident" and self.peek().text == "(":
            return ExprStmt(self.parse_postfix(), span=span)
        target = self.parse_lvalue()
        if self.at("++", "--"):
            return IncDec(target, self.advance().text, span=span)
        if self.tok.kind == "punct" and self.tok.text in _ASSIGN_OPS:
            op = self.advance().text
            return Assign(target, op, self.parse_expr(), span=span)
        self.error("expected assignment, increment, or call")

    def parse_lvalue(self):
        span = self.span()
        if self.at("*"):
            raise UnsupportedConstruct("pointer dereference", self.tok.line, self.tok.col)
        name = self.expect_ident().text
        if self.at("["):
            self.advance()
            index = self.parse_expr()
            self.expect("]")
            return Index(name, index, span=span)
        return Var(name, span=span)

    # -- expressions ---------------------------------------------------------

    def parse_expr(self) -> Expr:
        span = self.span()
        cond = self.parse_binary(1)
        if self.at("?"):
            self.advance()
            then = self.parse_expr()
            self.expect(":")
            other = self.parse_expr()
            return Ternary(cond, then, other, span=span)
        if self.tok.kind == "punct" and self.tok.text in _ASSIGN_OPS | {"++", "--"}:
            raise UnsupportedConstruct(
                f"'{self.tok.text}' inside an expression", self.tok.line, self.tok.col
            )
        return cond

    def parse_binary(self, min_prec: int) -> Expr:
        left = self.parse_unary()
        while self.tok.kind == "punct" and _BINARY_PREC.get(self.tok.text, 0) >= min_prec:
            op_tok = self.advance()
            prec = _BINARY_PREC[op_tok.text]
            right = self.parse_binary(prec + 1)
            left = Binary(op_tok.text, left, right, span=left.span)
        return left

    def parse_unary(self) -> Expr:
        span = self.span()
        if self.at("++", "--"):
            raise UnsupportedConstruct(f"'{self.tok.text}' inside an expression", span.line, span.col)
        if self.at("&"):
            raise UnsupportedConstruct("address-of", span.line, span.col)
        if self.at("-", "+", "~", "!"):
            op = self.advance().text
            return Unary(op, self.parse_unary(), span=span)
        if self.at("(") and self.peek().kind == "keyword" and (
            self.peek().text in _TYPE_WORDS or self.peek().text in _STDINT or self.peek().text == "const"
        ):
            self.advance()
            ctype, _ = self.parse_type()
            if ctype is None:
                raise UnsupportedConstruct("cast to void", span.line, span.col)
            self.expect(")")
            return Cast(ctype, self.parse_unary(), span=span)
        return self.parse_postfix()

    def parse_postfix(self) -> Expr:
        span = self.span()
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            lit = parse_int_literal(tok.text, tok.line, tok.col)
            lit.span = span
            return lit
        if tok.kind == "ident":
            self.advance()
            if self.at("("):
                self.advance()
                args: list[Expr] = []
                if not self.at(")"):
                    while True:
                        args.append(self.parse_expr())
                        if not self.at(","):
                            break
                        self.advance()
                self.expect(")")
                return Call(tok.text, args, span=span)
            if self.at("["):
                self.advance()
                index = self.parse_expr()
                self.expect("]")
                if self.at("["):
                    raise UnsupportedConstruct("multi-dimensional array", self.tok.line, self.tok.col)
                return Index(tok.text, index, span=span)
            return Var(tok.text, span=span)
        if self.at("("):
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        self.error(f"unexpected {tok.text or 'end of input'!r}")


def _resolve_type(words: list[str], tok: Token) -> Optional[CType]:
    if not words:
        raise MiniCSyntaxError("expected a type", tok.line, tok.col)
    if len(words) == 1 and words[0] in _STDINT:
        return _STDINT[words[0]]
    if any(w in _STDINT for w in words):
        raise MiniCSyntaxError("invalid type", tok.line, tok.col)
    if words == ["void"]:
        return None
    signed = "unsigned" not in words
    if "signed" in words and "unsigned" in words:
        raise MiniCSyntaxError("invalid type", tok.line, tok.col)
    rest = [w for w in words if w not in ("signed", "unsigned")]
    if rest.count("long") > 1:
        raise UnsupportedConstruct("64-bit integer type", tok.line, tok.col)
    if rest in ([], ["int"], ["long"], ["long", "int"], ["int", "long"]):
        return CType(signed, 32)
    if rest in (["short"], ["short", "int"], ["int", "short"]):
        return CType(signed, 16)
    if rest == ["char"]:
        # plain char is treated as signed
        return CType(signed, 8)
    raise MiniCSyntaxError(f"invalid type {' '.join(words)!r}", tok.line, tok.col)


def parse(source: str, top: Optional[str] = None) -> Program:
    """Parse MiniC source text into a numbered, checked :class:`Program`.

    ``top`` names the top function; when omitted the unique function not
    called by any other function is used.
    """
    from .check import check_program
    from .idioms import recognize_locking

    globals_, functions = _Parser(source).parse_unit()
    program = Program(globals_, functions, top or "", span=Span(1, 1))
    if any(p.name == ast.KEY_NAME for fn in functions for p in fn.params):
        recognize_locking(program)
    check_program(program, top)
    return ast.number_nodes(program)
