"""AST node types for the mini-language."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class NodeKind(str, Enum):
    MethodDeclaration = "MethodDeclaration"
    Modifier = "Modifier"
    TypeName = "TypeName"
    SimpleName = "SimpleName"
    Parameter = "Parameter"
    Block = "Block"
    IfStatement = "IfStatement"
    WhileStatement = "WhileStatement"
    ForStatement = "ForStatement"
    ReturnStatement = "ReturnStatement"
    VariableDeclarationStatement = "VariableDeclarationStatement"
    ExpressionStatement = "ExpressionStatement"
    Assignment = "Assignment"
    InfixExpression = "InfixExpression"
    PrefixExpression = "PrefixExpression"
    MethodInvocation = "MethodInvocation"
    FieldAccess = "FieldAccess"
    ParenthesizedExpression = "ParenthesizedExpression"
    Operator = "Operator"
    NumberLiteral = "NumberLiteral"
    BooleanLiteral = "BooleanLiteral"
    StringLiteral = "StringLiteral"
    CharLiteral = "CharLiteral"
    NullLiteral = "NullLiteral"

    @property
    def is_leaf(self) -> bool:
        return self in LEAF_KINDS

    def __str__(self) -> str:
        return self.value


LEAF_KINDS = frozenset({
    NodeKind.Modifier, NodeKind.TypeName, NodeKind.SimpleName, NodeKind.Operator,
    NodeKind.NumberLiteral, NodeKind.BooleanLiteral, NodeKind.StringLiteral,
    NodeKind.CharLiteral, NodeKind.NullLiteral,
})

STATEMENT_KINDS = frozenset({
    NodeKind.IfStatement, NodeKind.WhileStatement, NodeKind.ForStatement,
    NodeKind.ReturnStatement, NodeKind.VariableDeclarationStatement,
    NodeKind.ExpressionStatement,
})

# Stable integer ids, used by the model's node-kind vocabulary.
KIND_INDEX = {k: i for i, k in enumerate(NodeKind)}


@dataclass(eq=False)
class Node:
    kind: NodeKind
    token: str | None = None
    children: list[Node] = field(default_factory=list)
    parent: Node | None = field(default=None, repr=False)
    # syntactic variant for internal nodes whose children alone are ambiguous
    # ("." for a MethodInvocation with receiver, present-part flags for ForStatement)
    variant: str = ""
    # 1-based source position of the first character, 0-based offsets [start, end)
    line: int = 0
    col: int = 0
    start: int = 0
    end: int = 0
    leaf_index: int = -1

    @property
    def is_leaf(self) -> bool:
        return self.kind in LEAF_KINDS

    def walk(self):
        """Pre-order traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def ancestors(self):
        node = self.parent
        while node is not None:
            yield node
            node = node.parent

    def structure(self):
        """Nested tuple of (kind, token, children) ignoring positions."""
        return (self.kind.value, self.token or self.variant, tuple(c.structure() for c in self.children))


@dataclass(eq=False)
class MethodAst:
    root: Node
    leaves: list[Node]
    source: str = ""

    def token_of(self, leaf: Node | int) -> str:
        if isinstance(leaf, int):
            leaf = self.leaves[leaf]
        return leaf.token

    @property
    def tokens(self) -> list[str]:
        return [leaf.token for leaf in self.leaves]

    def kinds_of(self, leaf_index: int) -> tuple[NodeKind, ...]:
        leaf = self.leaves[leaf_index]
        chain = [leaf.kind] + [a.kind for a in leaf.ancestors()]
        return tuple(reversed(chain))

    def structure(self):
        return self.root.structure()

    def enclosing_statement(self, leaf_index: int) -> NodeKind:
        """Kind of the innermost statement holding the leaf, or MethodDeclaration for header tokens."""
        for anc in self.leaves[leaf_index].ancestors():
            if anc.kind in STATEMENT_KINDS:
                return anc.kind
        return NodeKind.MethodDeclaration

    def leaves_on_line(self, line: int) -> list[int]:
        return [leaf.leaf_index for leaf in self.leaves if leaf.line == line]


def link(node: Node, parent: Node | None = None) -> Node:
    node.parent = parent
    for child in node.children:
        link(child, node)
    return node
