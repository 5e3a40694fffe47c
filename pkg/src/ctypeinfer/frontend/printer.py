"""Render expression trees back to Java source."""

from __future__ import annotations

from .ast import ExprNode

_ATOMIC = frozenset({"constant", "var_ref", "field_access", "method_call",
                     "array_access"})


def _wrap(node: ExprNode) -> str:
    text = to_source(node)
    return text if node.kind in _ATOMIC else f"({text})"


def to_source(node: ExprNode) -> str:
    """Canonical, fully parenthesized source text for ``node``.

    Re-parsing the result yields a structurally equal tree for every node the
    parser can produce, except lambda and switch placeholders.
    """
    kind = node.kind
    if kind == "constant":
        return node.literal
    if kind == "var_ref":
        return node.name
    if kind == "field_access":
        return f"{_wrap(node.receiver)}.{node.name}"
    if kind == "method_call":
        args = ", ".join(to_source(a) for a in node.args)
        if node.has_receiver:
            return f"{_wrap(node.receiver)}.{node.name}({args})"
        return f"{node.name}({args})"
    if kind == "new_object":
        args = ", ".join(to_source(a) for a in node.args)
        if node.name.endswith("[]"):
            return f"new {node.name}{{{args}}}"
        prefix = f"{_wrap(node.receiver)}." if node.has_receiver else ""
        return f"{prefix}new {node.name}({args})"
    if kind == "unary_op":
        if node.op.startswith("post"):
            return f"{_wrap(node.children[0])}{node.op[4:]}"
        return f"{node.op}{_wrap(node.children[0])}"
    if kind == "binary_op":
        left, right = node.children
        if node.op == "instanceof":
            return f"{_wrap(left)} instanceof {right.literal}"
        return f"{_wrap(left)} {node.op} {_wrap(right)}"
    if kind == "assignment":
        left, right = node.children
        return f"{_wrap(left)} {node.op} {_wrap(right)}"
    if kind == "cast":
        return f"({node.name}) {_wrap(node.children[0])}"
    if kind == "conditional":
        cond, then, other = node.children
        return f"{_wrap(cond)} ? {_wrap(then)} : {_wrap(other)}"
    if kind == "array_access":
        array, index = node.children
        return f"{_wrap(array)}[{to_source(index)}]"
    raise ValueError(f"cannot render {kind}")
