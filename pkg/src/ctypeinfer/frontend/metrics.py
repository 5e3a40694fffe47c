"""Expression size measures."""

from __future__ import annotations

from .ast import ExprNode

# Each variable, field step, call, instantiation and constant is one
# component; operators, casts and parentheses are free.
COUNTED_KINDS = frozenset(
    {"var_ref", "field_access", "method_call", "new_object", "constant"})


def component_count(expr: ExprNode) -> int:
    """Number of components in ``expr``; ``file.getParent()`` counts 2."""
    return sum(1 for node in expr.walk() if node.kind in COUNTED_KINDS)
