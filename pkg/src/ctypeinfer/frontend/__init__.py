"""Java front end: tokenizer, parser and syntax tree."""

from .ast import (CompilationUnit, ExprNode, ImportDecl, MethodDecl, Stmt,
                  TypeDecl, VarDecl)
from .lexer import JavaSyntaxError
from .metrics import component_count
from .parser import parse_expression, parse_source
from .printer import to_source

__all__ = [
    "CompilationUnit", "ExprNode", "ImportDecl", "JavaSyntaxError",
    "MethodDecl", "Stmt", "TypeDecl", "VarDecl", "component_count",
    "parse_expression", "parse_source", "to_source",
]
