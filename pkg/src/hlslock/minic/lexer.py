"""Tokenizer for MiniC."""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import MiniCSyntaxError, UnsupportedConstruct

KEYWORDS = {
    "void", "char", "short", "int", "long", "signed", "unsigned", "const",
    "if", "else", "for", "while", "return", "break", "continue",
    "int8_t", "uint8_t", "int16_t", "uint16_t", "int32_t", "uint32_t",
}

# Recognized only to produce a clear diagnostic.
UNSUPPORTED_KEYWORDS = {
    "float", "double", "struct", "union", "enum", "goto", "switch", "case",
    "default", "do", "typedef", "static", "extern", "volatile", "sizeof",
    "int64_t", "uint64_t",
}

_PUNCT = sorted(
    """<<= >>= ++ -- += -= *= /= %= &= |= ^= << >> <= >= == != && || -> ...
    + - * / % & | ^ ~ ! < > = ? : ; , ( ) [ ] { } . #""".split(),
    key=len,
    reverse=True,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<float>\d+\.\d*|\.\d+)
  | (?P<number>0[xX][0-9a-fA-F]+[uUlL]*|\d+[uUlL]*)
  | (?P<ident>[A-Za-z_]\w*)
  | (?P<char>'(?:\\.|[^'])')
  | (?P<punct>"""
    + "|".join(re.escape(p) for p in _PUNCT)
    + r""")
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, number, punct, eof
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        col = pos - line_start + 1
        if m is None:
            raise MiniCSyntaxError(f"unexpected character {source[pos]!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind == "float":
            raise UnsupportedConstruct("floating-point literal", line, col)
        if kind == "char":
            raise UnsupportedConstruct("character literal", line, col)
        if kind == "punct" and text == "#":
            raise UnsupportedConstruct("preprocessor directive", line, col)
        if kind == "punct" and text in ("->", ".", "..."):
            raise UnsupportedConstruct(f"operator {text!r}", line, col)
        if kind == "ident":
            if text in UNSUPPORTED_KEYWORDS:
                raise UnsupportedConstruct(f"'{text}'", line, col)
            if text in KEYWORDS:
                kind = "keyword"
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens
