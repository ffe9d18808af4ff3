"""Recursive-descent parser for the mini-language (grammar in docs/grammar.md)."""
from .lexer import MODIFIERS, PRIMITIVE_TYPES, MiniSyntaxError, Token, tokenize
from .nodes import MethodAst, Node, NodeKind, link

# Binary levels, loosest first. Logical operators associate to the right, the rest to the left.
BINARY_LEVELS = [
    (("||",), "right"),
    (("&&",), "right"),
    (("|",), "left"),
    (("&",), "left"),
    (("==", "!="), "left"),
    (("<", "<=", ">", ">="), "left"),
    (("+", "-"), "left"),
    (("*", "/", "%"), "left"),
]
PREFIX_OPERATORS = ("!", "-")
VAR_TYPES = tuple(t for t in PRIMITIVE_TYPES if t != "void")


class Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.pos = 0

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, ahead: int = 1) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        shown = tok.text or "end of input"
        return MiniSyntaxError(f"{message}, found {shown!r}", tok.line, tok.col)

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("OP", "KEYWORD") and self.tok.text in texts

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        tok = self.tok
        self.pos += 1
        return tok

    def advance(self) -> Token:
        tok = self.tok
        self.pos += 1
        return tok

    def leaf(self, kind: NodeKind, tok: Token) -> Node:
        return Node(kind, tok.text, line=tok.line, col=tok.col, start=tok.start, end=tok.end)

    def node(self, kind: NodeKind, children: list[Node], first: Token | None = None) -> Node:
        n = Node(kind, None, children)
        if first is not None:
            n.line, n.col, n.start = first.line, first.col, first.start
        elif children:
            n.line, n.col, n.start = children[0].line, children[0].col, children[0].start
        prev = self.tokens[self.pos - 1]
        n.end = prev.end
        return n

    # declarations

    def parse_method(self) -> Node:
        first = self.tok
        children = []
        while self.at(*MODIFIERS):
            children.append(self.leaf(NodeKind.Modifier, self.advance()))
        children.append(self.parse_type(allow_void=True))
        children.append(self.parse_name())
        self.expect("(")
        if not self.at(")"):
            children.append(self.parse_param())
            while self.at(","):
                self.advance()
                children.append(self.parse_param())
        self.expect(")")
        children.append(self.parse_block())
        if self.tok.kind != "EOF":
            raise self.error("expected end of method")
        return self.node(NodeKind.MethodDeclaration, children, first)

    def parse_type(self, allow_void: bool = False) -> Node:
        tok = self.tok
        if tok.kind == "IDENT" or (tok.kind == "KEYWORD" and tok.text in VAR_TYPES):
            return self.leaf(NodeKind.TypeName, self.advance())
        if allow_void and self.at("void"):
            return self.leaf(NodeKind.TypeName, self.advance())
        raise self.error("expected a type")

    def parse_name(self) -> Node:
        if self.tok.kind != "IDENT":
            raise self.error("expected an identifier")
        return self.leaf(NodeKind.SimpleName, self.advance())

    def parse_param(self) -> Node:
        first = self.tok
        type_node = self.parse_type()
        name = self.parse_name()
        return self.node(NodeKind.Parameter, [type_node, name], first)

    # statements

    def parse_block(self) -> Node:
        first = self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "EOF":
                raise self.error("expected '}'")
            stmts.append(self.parse_statement())
        self.expect("}")
        return self.node(NodeKind.Block, stmts, first)

    def starts_declaration(self) -> bool:
        tok = self.tok
        if tok.kind == "KEYWORD" and tok.text in VAR_TYPES:
            return True
        return tok.kind == "IDENT" and self.peek().kind == "IDENT"

    def parse_statement(self) -> Node:
        first = self.tok
        if self.at("{"):
            return self.parse_block()
        if self.at("if"):
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            children = [cond, self.parse_statement()]
            if self.at("else"):
                self.advance()
                children.append(self.parse_statement())
            return self.node(NodeKind.IfStatement, children, first)
        if self.at("while"):
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            body = self.parse_statement()
            return self.node(NodeKind.WhileStatement, [cond, body], first)
        if self.at("for"):
            return self.parse_for()
        if self.at("return"):
            self.advance()
            if self.at(";"):
                raise self.error("expected an expression")
            value = self.parse_expr()
            self.expect(";")
            return self.node(NodeKind.ReturnStatement, [value], first)
        if self.starts_declaration():
            decl = self.parse_declaration()
            self.expect(";")
            decl.end = self.tokens[self.pos - 1].end
            return decl
        expr = self.parse_assignment_or_expr()
        self.expect(";")
        return self.node(NodeKind.ExpressionStatement, [expr], first)

    def parse_declaration(self) -> Node:
        first = self.tok
        children = [self.parse_type(), self.parse_name()]
        if self.at("="):
            children.append(self.leaf(NodeKind.Operator, self.advance()))
            children.append(self.parse_expr())
        return self.node(NodeKind.VariableDeclarationStatement, children, first)

    def parse_assignment_or_expr(self) -> Node:
        lhs = self.parse_expr()
        if self.at("="):
            if lhs.kind not in (NodeKind.SimpleName, NodeKind.FieldAccess):
                raise self.error("invalid assignment target")
            op = self.leaf(NodeKind.Operator, self.advance())
            rhs = self.parse_expr()
            return self.node(NodeKind.Assignment, [lhs, op, rhs])
        return lhs

    def parse_for(self) -> Node:
        first = self.expect("for")
        self.expect("(")
        children, variant = [], ""
        if not self.at(";"):
            children.append(self.parse_declaration() if self.starts_declaration() else self.parse_assignment_or_expr())
            variant += "i"
        self.expect(";")
        if not self.at(";"):
            children.append(self.parse_expr())
            variant += "c"
        self.expect(";")
        if not self.at(")"):
            children.append(self.parse_assignment_or_expr())
            variant += "u"
        self.expect(")")
        children.append(self.parse_statement())
        node = self.node(NodeKind.ForStatement, children, first)
        node.variant = variant
        return node

    # expressions

    def parse_expr(self, level: int = 0) -> Node:
        if level == len(BINARY_LEVELS):
            return self.parse_prefix()
        ops, assoc = BINARY_LEVELS[level]
        left = self.parse_expr(level + 1)
        if assoc == "right":
            if self.tok.kind == "OP" and self.tok.text in ops:
                op = self.leaf(NodeKind.Operator, self.advance())
                right = self.parse_expr(level)
                return self.node(NodeKind.InfixExpression, [left, op, right])
            return left
        while self.tok.kind == "OP" and self.tok.text in ops:
            op = self.leaf(NodeKind.Operator, self.advance())
            right = self.parse_expr(level + 1)
            left = self.node(NodeKind.InfixExpression, [left, op, right])
        return left

    def parse_prefix(self) -> Node:
        if self.tok.kind == "OP" and self.tok.text in PREFIX_OPERATORS:
            first = self.tok
            op = self.leaf(NodeKind.Operator, self.advance())
            operand = self.parse_prefix()
            return self.node(NodeKind.PrefixExpression, [op, operand], first)
        return self.parse_postfix()

    def parse_args(self) -> list[Node]:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.parse_expr())
            while self.at(","):
                self.advance()
                args.append(self.parse_expr())
        self.expect(")")
        return args

    def parse_postfix(self) -> Node:
        expr = self.parse_primary()
        while self.at("."):
            self.advance()
            name = self.parse_name()
            if self.at("("):
                args = self.parse_args()
                expr = self.node(NodeKind.MethodInvocation, [expr, name] + args)
                expr.variant = "."
            else:
                expr = self.node(NodeKind.FieldAccess, [expr, name])
        return expr

    def parse_primary(self) -> Node:
        tok = self.tok
        if tok.kind == "NUMBER":
            return self.leaf(NodeKind.NumberLiteral, self.advance())
        if tok.kind == "STRING":
            return self.leaf(NodeKind.StringLiteral, self.advance())
        if tok.kind == "CHAR":
            return self.leaf(NodeKind.CharLiteral, self.advance())
        if self.at("true", "false"):
            return self.leaf(NodeKind.BooleanLiteral, self.advance())
        if self.at("null"):
            return self.leaf(NodeKind.NullLiteral, self.advance())
        if tok.kind == "IDENT":
            name = self.parse_name()
            if self.at("("):
                args = self.parse_args()
                return self.node(NodeKind.MethodInvocation, [name] + args)
            return name
        if self.at("("):
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return self.node(NodeKind.ParenthesizedExpression, [inner], tok)
        raise self.error("expected an expression")


def parse(source: str) -> MethodAst:
    """Parse one method; raises MiniSyntaxError with line/column on failure."""
    root = link(Parser(source).parse_method())
    leaves = [n for n in root.walk() if n.is_leaf]
    for i, leaf in enumerate(leaves):
        leaf.leaf_index = i
    return MethodAst(root, leaves, source)
