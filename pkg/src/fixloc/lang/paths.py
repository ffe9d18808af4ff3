import re
from dataclasses import dataclass

from .lexer import KEYWORDS
from .nodes import MethodAst, NodeKind

_CAMEL_BOUNDARY = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")


@dataclass(frozen=True)
class AstPath:
    """Root-to-leaf chain of node kinds plus the leaf's pre-order ordinal."""

    kinds: tuple[NodeKind, ...]
    leaf_index: int

    def __post_init__(self):
        if len(self.kinds) < 2 or self.kinds[0] is not NodeKind.MethodDeclaration or not self.kinds[-1].is_leaf:
            raise ValueError(f"malformed AST path {self.kinds}")

    def __str__(self) -> str:
        return "->".join(k.value for k in self.kinds)


def ast_paths(ast: MethodAst) -> list[AstPath]:
    return [AstPath(ast.kinds_of(i), i) for i in range(len(ast.leaves))]


def truncate_kinds(kinds, max_l: int):
    """Keep the leaf end of an over-long path."""
    return tuple(kinds[-max_l:]) if len(kinds) > max_l else tuple(kinds)


def split_subtokens(token: str) -> list[str]:
    """Split on underscores and lower/digit-to-upper boundaries, lowercasing every part.

    >>> split_subtokens("getFooBar")
    ['get', 'foo', 'bar']
    >>> split_subtokens("utf8Name")
    ['utf8', 'name']
    """
    parts = []
    for chunk in token.split("_"):
        parts.extend(p.lower() for p in _CAMEL_BOUNDARY.split(chunk) if p)
    # tokens made only of underscores have nothing left to split
    return parts or [token]


def is_language_keyword(token: str) -> bool:
    return token in KEYWORDS
