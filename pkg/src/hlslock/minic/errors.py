class MiniCError(Exception):
    """A diagnostic raised by the MiniC frontend."""

    kind = "error"

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {self.kind}: {message}")


class MiniCSyntaxError(MiniCError):
    kind = "syntax error"


class UnsupportedConstruct(MiniCError):
    kind = "unsupported construct"


class SemanticError(MiniCError):
    kind = "semantic error"
