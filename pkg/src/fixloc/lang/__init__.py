from .lexer import KEYWORDS, MiniSyntaxError, tokenize
from .nodes import LEAF_KINDS, STATEMENT_KINDS, MethodAst, Node, NodeKind
from .parser import parse
from .paths import AstPath, ast_paths, is_language_keyword, split_subtokens, truncate_kinds
from .render import render

__all__ = [
    "KEYWORDS", "LEAF_KINDS", "STATEMENT_KINDS", "AstPath", "MethodAst", "MiniSyntaxError",
    "Node", "NodeKind", "ast_paths", "is_language_keyword", "parse", "render",
    "split_subtokens", "tokenize", "truncate_kinds",
]
