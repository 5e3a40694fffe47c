"""Syntax tree types produced by the Java front end.

Nodes are frozen dataclasses. Source positions are carried on every node but
excluded from equality, so two parses of the same text compare equal even when
they sit at different offsets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

EXPR_KINDS = frozenset({
    "constant", "var_ref", "field_access", "method_call", "new_object",
    "unary_op", "binary_op", "assignment", "cast", "conditional",
    "array_access",
})

_NAMED_KINDS = frozenset({"var_ref", "field_access", "method_call"})


@dataclass(frozen=True)
class ExprNode:
    """One expression term.

    ``method_call`` children are ``[receiver] + args`` when ``has_receiver``
    is set, otherwise just the arguments. ``new_object`` children are the
    constructor arguments (or array dimensions / initializer elements).
    Lambda, switch and anonymous class bodies hang off ``body``; they are
    scanned for calls but do not take part in structural comparison.
    """

    kind: str
    children: tuple["ExprNode", ...] = ()
    name: Optional[str] = None
    literal: Optional[str] = None
    op: Optional[str] = None
    has_receiver: bool = False
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)
    start: int = field(default=0, compare=False)
    end: int = field(default=0, compare=False)
    body: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in EXPR_KINDS:
            raise ValueError(f"unknown expression kind {self.kind!r}")
        if self.kind in _NAMED_KINDS and not self.name:
            raise ValueError(f"{self.kind} requires a name")
        if self.kind == "constant" and self.literal is None:
            raise ValueError("constant requires a literal")
        arity = {"binary_op": 2, "unary_op": 1, "cast": 1, "conditional": 3,
                 "array_access": 2, "field_access": 1, "assignment": 2}
        want = arity.get(self.kind)
        if want is not None and len(self.children) != want:
            raise ValueError(
                f"{self.kind} takes {want} children, got {len(self.children)}")

    @property
    def receiver(self) -> Optional["ExprNode"]:
        if self.kind == "field_access":
            return self.children[0]
        if self.kind in ("method_call", "new_object") and self.has_receiver:
            return self.children[0]
        return None

    @property
    def args(self) -> tuple["ExprNode", ...]:
        if self.kind in ("method_call", "new_object") and self.has_receiver:
            return self.children[1:]
        if self.kind in ("method_call", "new_object"):
            return self.children
        return ()

    def walk(self) -> Iterator["ExprNode"]:
        """Pre-order traversal of this node and all sub-expressions."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


@dataclass(frozen=True)
class VarDecl:
    name: str
    type: str
    init: Optional[ExprNode] = None


@dataclass(frozen=True)
class Stmt:
    """A statement reduced to what call-site scanning needs.

    ``local_var`` binds ``decls`` into the enclosing scope. Every other kind
    opens a fresh scope, binds its ``decls`` (loop variables, resources,
    catch parameters), then visits ``exprs`` and ``body`` in order.
    """

    kind: str
    line: int = field(default=0, compare=False)
    exprs: tuple[ExprNode, ...] = ()
    body: tuple["Stmt", ...] = ()
    decls: tuple[VarDecl, ...] = ()
    type_decl: Optional["TypeDecl"] = None


@dataclass(frozen=True)
class ImportDecl:
    target: str
    on_demand: bool = False
    static_import: bool = False


@dataclass(frozen=True)
class MethodDecl:
    name: str
    params: tuple[tuple[str, str], ...]
    return_type: Optional[str]
    body: tuple[Stmt, ...] = ()
    is_constructor: bool = False
    line: int = field(default=0, compare=False)
    has_body: bool = True


@dataclass(frozen=True)
class TypeDecl:
    """A class, interface, enum, record or annotation type.

    ``initializers`` holds field initializers and initializer blocks so that
    calls made outside of method bodies are scanned too.
    """

    fq_name: str
    kind: str = "class"
    fields: tuple[tuple[str, str], ...] = ()
    methods: tuple[MethodDecl, ...] = ()
    nested: tuple["TypeDecl", ...] = ()
    supertypes: tuple[str, ...] = ()
    initializers: tuple[Stmt, ...] = ()
    line: int = field(default=0, compare=False)

    @property
    def simple_name(self) -> str:
        return self.fq_name.rsplit(".", 1)[-1]


@dataclass(frozen=True)
class CompilationUnit:
    file_path: str
    package_name: str = ""
    imports: tuple[ImportDecl, ...] = ()
    type_decls: tuple[TypeDecl, ...] = ()
    source: str = field(default="", compare=False, repr=False)

    def all_types(self) -> Iterator[TypeDecl]:
        """Every named type in the unit, nested ones included."""
        stack = list(reversed(self.type_decls))
        while stack:
            decl = stack.pop()
            yield decl
            stack.extend(reversed(decl.nested))
