import re
from dataclasses import dataclass

KEYWORDS = frozenset({
    "if", "else", "while", "for", "return", "int", "long", "float", "double",
    "boolean", "char", "void", "true", "false", "null", "public", "private", "static",
})

PRIMITIVE_TYPES = ("int", "long", "float", "double", "boolean", "char", "void")
MODIFIERS = ("public", "private", "static")


class MiniSyntaxError(SyntaxError):
    """Raised on any lexical or grammatical violation; carries 1-based line/column."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(message)
        self.line = line
        self.col = col
        self.lineno = line
        self.offset = col

    def __str__(self) -> str:
        return f"{self.msg} at line {self.line}, column {self.col}"


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, KEYWORD, NUMBER, STRING, CHAR, OP, EOF
    text: str
    line: int
    col: int
    start: int
    end: int


_OPERATORS = [
    "==", "!=", "<=", ">=", "&&", "||",
    "<", ">", "+", "-", "*", "/", "%", "!", "=", "&", "|",
    ".", ",", ";", "(", ")", "{", "}",
]

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<char>'(?:[^'\\\n]|\\.)')
  | (?P<op>""" + "|".join(re.escape(op) for op in _OPERATORS) + r""")
    """,
    re.VERBOSE | re.DOTALL,
)


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        col = pos - line_start + 1
        if m is None:
            raise MiniSyntaxError(f"unexpected character {source[pos]!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind == "ident":
            if not any(ch.isalnum() for ch in text):
                raise MiniSyntaxError(f"invalid identifier {text!r}", line, col)
            tokens.append(Token("KEYWORD" if text in KEYWORDS else "IDENT", text, line, col, pos, m.end()))
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind.upper(), text, line, col, pos, m.end()))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1, pos, pos))
    return tokens
