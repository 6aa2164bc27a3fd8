"""MiniC frontend: parsing, checking, and printing of the C subset."""
from .ast import Program, same_shape
from .errors import MiniCError, MiniCSyntaxError, SemanticError, UnsupportedConstruct
from .parser import parse
from .printer import emit_source, expr_source

__all__ = [
    "MiniCError", "MiniCSyntaxError", "Program", "SemanticError",
    "UnsupportedConstruct", "emit_source", "expr_source", "parse", "same_shape",
]
