"""Scope-aware symbol table for method parameters and local variables."""
from __future__ import annotations

from dataclasses import dataclass

from .nodes import MethodAst, Node, NodeKind


@dataclass(frozen=True)
class Declaration:
    name: str
    type: str
    leaf_index: int   # index of the declaring SimpleName leaf
    scope_end: int    # last leaf index where the name is visible


def _last_leaf(node: Node) -> int:
    while not node.is_leaf:
        node = node.children[-1]
    return node.leaf_index


def declarations(ast: MethodAst) -> list[Declaration]:
    out = []
    last = len(ast.leaves) - 1
    for node in ast.root.walk():
        if node.kind is NodeKind.Parameter:
            type_leaf, name_leaf = node.children
            out.append(Declaration(name_leaf.token, type_leaf.token, name_leaf.leaf_index, last))
        elif node.kind is NodeKind.VariableDeclarationStatement:
            type_leaf, name_leaf = node.children[:2]
            holder = node.parent
            end = _last_leaf(holder) if holder is not None else last
            out.append(Declaration(name_leaf.token, type_leaf.token, name_leaf.leaf_index, end))
    out.sort(key=lambda d: d.leaf_index)
    return out


def is_declaring_name(leaf: Node) -> bool:
    parent = leaf.parent
    if parent is None or leaf.kind is not NodeKind.SimpleName:
        return False
    if parent.kind in (NodeKind.Parameter, NodeKind.VariableDeclarationStatement):
        return parent.children[1] is leaf
    return parent.kind is NodeKind.MethodDeclaration


def is_member_name(leaf: Node) -> bool:
    """Called method names and accessed field names (not variables)."""
    parent = leaf.parent
    if parent is None or leaf.kind is not NodeKind.SimpleName:
        return False
    if parent.kind is NodeKind.FieldAccess:
        return parent.children[1] is leaf
    if parent.kind is NodeKind.MethodInvocation:
        return parent.children[1 if parent.variant == "." else 0] is leaf
    return False


def visible_at(ast: MethodAst, leaf_index: int, decls: list[Declaration] | None = None) -> dict[str, str]:
    """Name -> declared type for every variable visible at the leaf (inner declarations shadow outer)."""
    if decls is None:
        decls = declarations(ast)
    seen = {}
    for d in decls:
        if d.leaf_index < leaf_index <= d.scope_end:
            seen[d.name] = d.type
    return seen


def variable_uses(ast: MethodAst, decls: list[Declaration] | None = None) -> list[int]:
    """Leaf indices of SimpleNames that refer to a visible declared variable."""
    if decls is None:
        decls = declarations(ast)
    out = []
    for leaf in ast.leaves:
        if leaf.kind is not NodeKind.SimpleName or is_declaring_name(leaf) or is_member_name(leaf):
            continue
        if leaf.token in visible_at(ast, leaf.leaf_index, decls):
            out.append(leaf.leaf_index)
    return out
