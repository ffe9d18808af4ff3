"""Canonical pretty-printer: one statement per line, four-space indentation."""
from .nodes import MethodAst, Node, NodeKind

INDENT = "    "


def render(ast: MethodAst | Node) -> str:
    root = ast.root if isinstance(ast, MethodAst) else ast
    if root.kind is not NodeKind.MethodDeclaration:
        return expr(root)
    return "\n".join(_method(root)) + "\n"


def _method(node: Node) -> list[str]:
    header = []
    params = []
    body = None
    for child in node.children:
        if child.kind is NodeKind.Parameter:
            params.append(f"{child.children[0].token} {child.children[1].token}")
        elif child.kind is NodeKind.Block:
            body = child
        else:
            header.append(child.token)
    head = " ".join(header[:-1] + [header[-1] + "(" + ", ".join(params) + ")"])
    return [head + " {"] + _block_body(body, 1) + ["}"]


def _block_body(block: Node, depth: int) -> list[str]:
    lines = []
    for stmt in block.children:
        lines.extend(_statement(stmt, depth))
    return lines


def _nested(stmt: Node, depth: int, head: str) -> list[str]:
    pad = INDENT * depth
    if stmt.kind is NodeKind.Block:
        return [pad + head + " {"] + _block_body(stmt, depth + 1) + [pad + "}"]
    return [pad + head] + _statement(stmt, depth + 1)


def _statement(node: Node, depth: int) -> list[str]:
    pad = INDENT * depth
    k = node.kind
    if k is NodeKind.Block:
        return [pad + "{"] + _block_body(node, depth + 1) + [pad + "}"]
    if k is NodeKind.IfStatement:
        lines = _nested(node.children[1], depth, f"if ({expr(node.children[0])})")
        if len(node.children) == 3:
            alt = node.children[2]
            if alt.kind is NodeKind.IfStatement:
                inner = _statement(alt, depth)
                lines += [pad + "else " + inner[0].lstrip()] + inner[1:]
            else:
                lines += _nested(alt, depth, "else")
        return lines
    if k is NodeKind.WhileStatement:
        return _nested(node.children[1], depth, f"while ({expr(node.children[0])})")
    if k is NodeKind.ForStatement:
        parts = iter(node.children[:-1])
        init = _simple(next(parts)) if "i" in node.variant else ""
        cond = expr(next(parts)) if "c" in node.variant else ""
        update = _simple(next(parts)) if "u" in node.variant else ""
        head = f"for ({init}; {cond}; {update})".replace("( ;", "(;").replace("; ;", ";;").replace("; )", ";)")
        return _nested(node.children[-1], depth, head)
    if k is NodeKind.ReturnStatement:
        return [pad + f"return {expr(node.children[0])};"]
    return [pad + _simple(node) + ";"]


def _simple(node: Node) -> str:
    """Declarations, assignments and bare expressions without the trailing ';'."""
    k = node.kind
    if k is NodeKind.VariableDeclarationStatement:
        text = f"{node.children[0].token} {node.children[1].token}"
        if len(node.children) == 4:
            text += f" = {expr(node.children[3])}"
        return text
    if k is NodeKind.ExpressionStatement:
        return _simple(node.children[0])
    if k is NodeKind.Assignment:
        return f"{expr(node.children[0])} {node.children[1].token} {expr(node.children[2])}"
    return expr(node)


def expr(node: Node) -> str:
    k = node.kind
    if node.is_leaf:
        return node.token
    if k is NodeKind.InfixExpression:
        left, op, right = node.children
        return f"{expr(left)} {op.token} {expr(right)}"
    if k is NodeKind.PrefixExpression:
        op, operand = node.children
        text = expr(operand)
        # keep "- -x" from lexing as a different token sequence
        sep = " " if text.startswith(op.token) else ""
        return op.token + sep + text
    if k is NodeKind.ParenthesizedExpression:
        return f"({expr(node.children[0])})"
    if k is NodeKind.FieldAccess:
        return f"{expr(node.children[0])}.{node.children[1].token}"
    if k is NodeKind.MethodInvocation:
        if node.variant == ".":
            recv, name, *args = node.children
            prefix = f"{expr(recv)}.{name.token}"
        else:
            name, *args = node.children
            prefix = name.token
        return prefix + "(" + ", ".join(expr(a) for a in args) + ")"
    if k is NodeKind.Assignment:
        return _simple(node)
    raise ValueError(f"cannot render {k} as an expression")
