"""Recursive-descent parser for the Java subset used by call-site analysis.

Declarations, statements and the full expression grammar are understood.
Generic type arguments are parsed and erased, annotations are skipped, and
lambda / anonymous-class bodies are kept so their calls can be scanned.
"""

from __future__ import annotations

import sys
from typing import Optional

from .ast import (CompilationUnit, ExprNode, ImportDecl, MethodDecl, Stmt,
                  TypeDecl, VarDecl)
from .lexer import PRIMITIVES, JavaSyntaxError, Token, tokenize

_MODIFIERS = frozenset("""
public protected private static abstract final native synchronized transient
volatile strictfp default
""".split())

_BINARY_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5, "==": 6, "!=": 6,
    "<": 7, ">": 7, "<=": 7, ">=": 7, "instanceof": 7,
    "<<": 8, ">>": 8, ">>>": 8, "+": 9, "-": 9, "*": 10, "/": 10, "%": 10,
}

_ASSIGN_OPS = frozenset(
    ["=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<="])

_LITERAL_KEYWORDS = frozenset(["true", "false", "null"])

_UNARY_START = frozenset(["!", "~", "(", "@"])


class Parser:
    def __init__(self, text: str, path: str = "<string>"):
        self.text = text
        self.path = path
        self.toks = tokenize(text, path)
        self.i = 0
        self.no_lambda = False

    # -- token helpers -----------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("op", "keyword") and t.text in texts

    def at_ident(self, text: Optional[str] = None) -> bool:
        t = self.tok
        return t.kind == "ident" and (text is None or t.text == text)

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.error("expected identifier")
        return self.advance()

    def error(self, msg: str, tok: Optional[Token] = None):
        t = tok or self.tok
        found = t.text or "end of input"
        raise JavaSyntaxError(f"{msg}, found {found!r}", self.path,
                              t.line, t.col)

    @property
    def last_end(self) -> int:
        return self.toks[self.i - 1].end if self.i else 0

    def _adjacent(self, k: int, text: str) -> bool:
        a, b = self.peek(k - 1), self.peek(k)
        return b.kind == "op" and b.text == text and a.end == b.start

    # -- compilation unit ----------------------------------------------------

    def parse_unit(self) -> CompilationUnit:
        self.skip_annotations()
        package = ""
        if self.accept("package"):
            package = self.qualified_name()
            self.expect(";")
        imports = []
        while True:
            if self.accept(";"):
                continue
            if not self.at("import"):
                break
            imports.append(self.parse_import())
        if self.at_ident("module") or (
                self.at_ident("open") and self.peek(1).text == "module"):
            # module-info.java declares no types
            return CompilationUnit(self.path, package, tuple(imports), (),
                                   self.text)
        types = []
        while self.tok.kind != "eof":
            if self.accept(";"):
                continue
            self.skip_modifiers()
            types.append(self.parse_type_decl(package))
        return CompilationUnit(self.path, package, tuple(imports),
                               tuple(types), self.text)

    def parse_import(self) -> ImportDecl:
        self.expect("import")
        static = bool(self.accept("static"))
        parts = [self.ident().text]
        on_demand = False
        while self.accept("."):
            if self.accept("*"):
                on_demand = True
                break
            parts.append(self.ident().text)
        self.expect(";")
        return ImportDecl(".".join(parts), on_demand, static)

    def qualified_name(self) -> str:
        parts = [self.ident().text]
        while self.at(".") and self.peek(1).kind == "ident":
            self.advance()
            parts.append(self.advance().text)
        return ".".join(parts)

    # -- modifiers and annotations --------------------------------------------

    def skip_annotation(self):
        self.expect("@")
        self.qualified_name()
        if self.at("("):
            self.skip_balanced("(", ")")

    def skip_annotations(self):
        while self.at("@") and not (self.peek(1).text == "interface"):
            self.skip_annotation()

    def skip_balanced(self, open_: str, close: str):
        depth = 0
        while True:
            t = self.advance()
            if t.kind == "eof":
                self.error(f"unbalanced {open_!r}", t)
            if t.kind == "op" and t.text == open_:
                depth += 1
            elif t.kind == "op" and t.text == close:
                depth -= 1
                if depth == 0:
                    return

    def skip_modifiers(self) -> bool:
        """Consume modifiers and annotations; True if any were present."""
        seen = False
        while True:
            t = self.tok
            if t.kind == "keyword" and t.text in _MODIFIERS:
                # 'default' opens a switch label or annotation default
                if t.text == "default" and self.peek(1).text in (":", "->"):
                    return seen
                self.advance()
            elif t.kind == "op" and t.text == "@" and self.peek(1).text != "interface":
                self.skip_annotation()
            elif t.kind == "ident" and t.text == "sealed" and self._decl_follows(1):
                self.advance()
            elif (t.kind == "ident" and t.text == "non" and self._adjacent(1, "-")
                  and self.peek(2).text == "sealed"):
                self.i += 3
            else:
                return seen
            seen = True

    def _decl_follows(self, k: int) -> bool:
        t = self.peek(k)
        return t.text in _MODIFIERS or t.text in ("class", "interface", "@") or (
            t.kind == "ident" and t.text in ("sealed", "non", "record"))

    # -- type declarations ---------------------------------------------------

    def at_type_decl(self) -> bool:
        if self.at("class", "interface", "enum"):
            return True
        if self.at("@") and self.peek(1).text == "interface":
            return True
        return (self.at_ident("record") and self.peek(1).kind == "ident"
                and self.peek(2).text in ("(", "<"))

    def parse_type_decl(self, outer: str) -> TypeDecl:
        line = self.tok.line
        if self.accept("@"):
            self.expect("interface")
            kind = "annotation"
        elif self.at_ident("record"):
            self.advance()
            kind = "record"
        elif self.at("class", "interface", "enum"):
            kind = self.advance().text
        else:
            self.error("expected type declaration")
        name = self.ident().text
        fq = f"{outer}.{name}" if outer else name
        if self.at("<"):
            self.skip_type_params()
        components: list[tuple[str, str]] = []
        if kind == "record":
            self.expect("(")
            while not self.at(")"):
                self.skip_modifiers()
                ptype = self.parse_type()
                if self.accept("..."):
                    ptype += "[]"
                components.append((self.ident().text, ptype))
                if not self.accept(","):
                    break
            self.expect(")")
        supertypes = []
        while True:
            if self.accept("extends") or self.accept("implements"):
                supertypes.append(self.parse_type())
                while self.accept(","):
                    supertypes.append(self.parse_type())
            elif self.at_ident("permits"):
                self.advance()
                self.parse_type()
                while self.accept(","):
                    self.parse_type()
            else:
                break
        return self.parse_class_body(fq, kind, name, tuple(supertypes),
                                     components, line)

    def parse_class_body(self, fq: str, kind: str, name: str,
                         supertypes: tuple[str, ...] = (),
                         components=(), line: int = 0) -> TypeDecl:
        self.expect("{")
        fields = list(components)
        methods: list[MethodDecl] = []
        nested: list[TypeDecl] = []
        inits: list[Stmt] = []
        if kind == "enum":
            self.parse_enum_constants(fq, fields, inits)
        while not self.accept("}"):
            if self.tok.kind == "eof":
                self.error("unterminated class body")
            if self.accept(";"):
                continue
            mline = self.tok.line
            if self.at("{"):
                inits.append(Stmt("block", mline, body=self.parse_block()))
                continue
            if self.at("static") and self.peek(1).text == "{":
                self.advance()
                inits.append(Stmt("block", mline, body=self.parse_block()))
                continue
            self.skip_modifiers()
            if self.at_type_decl():
                nested.append(self.parse_type_decl(fq))
                continue
            if self.at("<"):
                self.skip_type_params()
            if self.at_ident(name) and self.peek(1).text == "(":
                self.advance()
                params = self.parse_params()
                self.skip_throws()
                body = self.parse_block()
                methods.append(MethodDecl(name, params, None, body, True, mline))
                continue
            if kind == "record" and self.at_ident(name) and self.peek(1).text == "{":
                # compact canonical constructor
                self.advance()
                body = self.parse_block()
                methods.append(MethodDecl(name, tuple(components), None, body,
                                          True, mline))
                continue
            mtype = self.parse_type()
            mname = self.ident()
            if self.at("("):
                params = self.parse_params()
                mtype += self.parse_dims()
                self.skip_throws()
                if self.accept("default"):
                    self.parse_element_value()
                if self.accept(";"):
                    methods.append(MethodDecl(mname.text, params, mtype, (),
                                              False, mline, has_body=False))
                else:
                    body = self.parse_block()
                    methods.append(MethodDecl(mname.text, params, mtype, body,
                                              False, mline))
                continue
            decls = self.parse_declarators(mtype, mname)
            self.expect(";")
            fields.extend((d.name, d.type) for d in decls)
            if any(d.init is not None for d in decls):
                inits.append(Stmt("field", mline, decls=decls))
        if kind == "record" and not any(
                m.is_constructor and len(m.params) == len(components)
                for m in methods):
            methods.append(MethodDecl(name, tuple(components), None, (), True,
                                      line, has_body=False))
        return TypeDecl(fq, kind, tuple(fields), tuple(methods), tuple(nested),
                        supertypes, tuple(inits), line)

    def parse_enum_constants(self, fq, fields, inits):
        while True:
            self.skip_annotations()
            if not self.at_ident():
                break
            t = self.advance()
            fields.append((t.text, fq))
            args = ()
            if self.at("("):
                args = self.parse_arguments()
            if self.at("{"):
                anon = self.parse_class_body(f"{fq}.<anon>", "class", "<anon>",
                                             (fq,), line=t.line)
                inits.append(Stmt("class", t.line, exprs=args, type_decl=anon))
            elif args:
                inits.append(Stmt("expr", t.line, exprs=args))
            if not self.accept(","):
                break
        self.accept(";")

    def parse_element_value(self):
        if self.at("{"):
            self.skip_balanced("{", "}")
        elif self.at("@"):
            self.skip_annotation()
        else:
            self.parse_ternary()

    def skip_type_params(self):
        self.expect("<")
        depth = 1
        while depth:
            t = self.advance()
            if t.kind == "eof":
                self.error("unterminated type parameters", t)
            if t.text == "<":
                depth += 1
            elif t.text == ">":
                depth -= 1

    def skip_throws(self):
        if self.accept("throws"):
            self.parse_type()
            while self.accept(","):
                self.parse_type()

    def parse_params(self) -> tuple[tuple[str, str], ...]:
        self.expect("(")
        params = []
        while not self.at(")"):
            self.skip_modifiers()
            ptype = self.parse_type()
            self.skip_annotations()
            if self.accept("..."):
                ptype += "[]"
            if self.accept("this"):
                # receiver parameter
                if not self.accept(","):
                    break
                continue
            if self.at_ident() and self.peek(1).text == "." and self.peek(2).text == "this":
                self.i += 3
                if not self.accept(","):
                    break
                continue
            pname = self.ident().text
            ptype += self.parse_dims()
            params.append((pname, ptype))
            if not self.accept(","):
                break
        self.expect(")")
        return tuple(params)

    def parse_declarators(self, vtype: str, first: Token) -> tuple[VarDecl, ...]:
        decls = []
        name = first
        while True:
            dtype = vtype + self.parse_dims()
            init = None
            if self.accept("="):
                init = self.parse_var_init(dtype)
            decls.append(VarDecl(name.text, dtype, init))
            if not self.accept(","):
                break
            name = self.ident()
        return tuple(decls)

    def parse_var_init(self, vtype: str) -> ExprNode:
        if self.at("{"):
            return self.parse_array_init(vtype)
        return self.parse_expression()

    def parse_array_init(self, vtype: str) -> ExprNode:
        start = self.expect("{")
        elem = vtype[:-2] if vtype.endswith("[]") else vtype
        items = []
        while not self.at("}"):
            items.append(self.parse_var_init(elem))
            if not self.accept(","):
                break
        self.expect("}")
        return ExprNode("new_object", tuple(items), name=vtype or "[]",
                        line=start.line, col=start.col, start=start.start,
                        end=self.last_end)

    # -- types ---------------------------------------------------------------

    def parse_dims(self) -> str:
        dims = ""
        while True:
            save = self.i
            self.skip_annotations()
            if self.at("[") and self.peek(1).text == "]":
                self.i += 2
                dims += "[]"
            else:
                self.i = save
                return dims

    def parse_type(self) -> str:
        """Parse a type and return its erased source text."""
        self.skip_annotations()
        t = self.tok
        if t.kind == "keyword" and (t.text in PRIMITIVES or t.text == "void"):
            self.advance()
            return t.text + self.parse_dims()
        if t.kind != "ident":
            self.error("expected type")
        parts = [self.advance().text]
        if self.at("<"):
            self.skip_type_args()
        while self.at(".") and (self.peek(1).kind == "ident" or self.peek(1).text == "@"):
            self.advance()
            self.skip_annotations()
            parts.append(self.ident().text)
            if self.at("<"):
                self.skip_type_args()
        return ".".join(parts) + self.parse_dims()

    def skip_type_args(self):
        self.expect("<")
        if self.accept(">"):
            return
        while True:
            self.skip_annotations()
            if self.accept("?"):
                if self.accept("extends") or self.accept("super"):
                    self.parse_type()
            else:
                self.parse_type()
            while self.accept("&"):
                self.parse_type()
            if not self.accept(","):
                break
        self.expect(">")

    def try_type(self) -> Optional[str]:
        save = self.i
        try:
            return self.parse_type()
        except JavaSyntaxError:
            self.i = save
            return None

    # -- statements ----------------------------------------------------------

    def parse_block(self) -> tuple[Stmt, ...]:
        self.expect("{")
        stmts = []
        while not self.accept("}"):
            if self.tok.kind == "eof":
                self.error("unterminated block")
            stmts.append(self.parse_block_stmt())
        return tuple(stmts)

    def parse_block_stmt(self) -> Stmt:
        line = self.tok.line
        save = self.i
        had_mods = self.skip_modifiers()
        if self.at_type_decl():
            decl = self.parse_type_decl("<local>")
            return Stmt("class", line, type_decl=decl)
        if had_mods:
            vtype = self.parse_type()
            decls = self.parse_declarators(vtype, self.ident())
            self.expect(";")
            return Stmt("local_var", line, decls=decls)
        self.i = save
        if self.at_ident("yield") and self.peek(1).text not in ("=", "(", ".", "[", "++", "--"):
            self.advance()
            expr = self.parse_expression()
            self.expect(";")
            return Stmt("yield", line, exprs=(expr,))
        if self.at_ident() or (self.tok.kind == "keyword" and self.tok.text in PRIMITIVES):
            vtype = self.try_type()
            if vtype is not None and self.at_ident() and self.peek(1).text in ("=", ";", ",", "["):
                decls = self.parse_declarators(vtype, self.ident())
                self.expect(";")
                return Stmt("local_var", line, decls=decls)
            self.i = save
        return self.parse_statement()

    def parse_statement(self) -> Stmt:
        t = self.tok
        line = t.line
        if t.kind == "op":
            if t.text == "{":
                return Stmt("block", line, body=self.parse_block())
            if t.text == ";":
                self.advance()
                return Stmt("empty", line)
        if t.kind == "ident" and self.peek(1).text == ":" and self.peek(1).kind == "op":
            self.advance()
            self.advance()
            return Stmt("labeled", line, body=(self.parse_statement(),))
        if t.kind != "keyword":
            return self.parse_expression_statement()
        word = t.text
        if word == "if":
            self.advance()
            cond = self.parse_paren_expr()
            then = self.parse_statement()
            body = (then,)
            if self.accept("else"):
                body += (self.parse_statement(),)
            return Stmt("if", line, exprs=(cond,), body=body)
        if word == "while":
            self.advance()
            cond = self.parse_paren_expr()
            return Stmt("while", line, exprs=(cond,), body=(self.parse_statement(),))
        if word == "do":
            self.advance()
            body = self.parse_statement()
            self.expect("while")
            cond = self.parse_paren_expr()
            self.expect(";")
            return Stmt("do", line, exprs=(cond,), body=(body,))
        if word == "for":
            return self.parse_for()
        if word == "try":
            return self.parse_try()
        if word == "switch":
            stmt = self.parse_switch()
            return stmt
        if word in ("return", "throw"):
            self.advance()
            exprs = ()
            if not self.at(";"):
                exprs = (self.parse_expression(),)
            self.expect(";")
            return Stmt(word, line, exprs=exprs)
        if word in ("break", "continue"):
            self.advance()
            if self.at_ident():
                self.advance()
            self.expect(";")
            return Stmt(word, line)
        if word == "synchronized":
            self.advance()
            lock = self.parse_paren_expr()
            return Stmt("synchronized", line, exprs=(lock,),
                        body=(Stmt("block", line, body=self.parse_block()),))
        if word == "assert":
            self.advance()
            exprs = [self.parse_expression()]
            if self.accept(":"):
                exprs.append(self.parse_expression())
            self.expect(";")
            return Stmt("assert", line, exprs=tuple(exprs))
        return self.parse_expression_statement()

    def parse_expression_statement(self) -> Stmt:
        line = self.tok.line
        expr = self.parse_expression()
        self.expect(";")
        return Stmt("expr", line, exprs=(expr,))

    def parse_paren_expr(self) -> ExprNode:
        self.expect("(")
        expr = self.parse_expression()
        self.expect(")")
        return expr

    def parse_for(self) -> Stmt:
        line = self.expect("for").line
        self.expect("(")
        save = self.i
        self.skip_modifiers()
        vtype = self.try_type()
        if vtype is not None and self.at_ident() and self.peek(1).text == ":":
            name = self.advance().text
            self.advance()
            iterable = self.parse_expression()
            self.expect(")")
            body = self.parse_statement()
            return Stmt("foreach", line, exprs=(iterable,), body=(body,),
                        decls=(VarDecl(name, vtype),))
        self.i = save
        decls: tuple[VarDecl, ...] = ()
        exprs: list[ExprNode] = []
        if not self.at(";"):
            had_mods = self.skip_modifiers()
            vtype = self.try_type()
            if vtype is not None and self.at_ident() and (
                    had_mods or self.peek(1).text in ("=", ",", ";", "[")):
                decls = self.parse_declarators(vtype, self.ident())
            else:
                self.i = save
                exprs.append(self.parse_expression())
                while self.accept(","):
                    exprs.append(self.parse_expression())
        self.expect(";")
        if not self.at(";"):
            exprs.append(self.parse_expression())
        self.expect(";")
        while not self.at(")"):
            exprs.append(self.parse_expression())
            if not self.accept(","):
                break
        self.expect(")")
        body = self.parse_statement()
        return Stmt("for", line, exprs=tuple(exprs), body=(body,), decls=decls)

    def parse_try(self) -> Stmt:
        line = self.expect("try").line
        decls: list[VarDecl] = []
        exprs: list[ExprNode] = []
        if self.accept("("):
            while not self.at(")"):
                save = self.i
                had_mods = self.skip_modifiers()
                vtype = self.try_type()
                if vtype is not None and self.at_ident() and self.peek(1).text == "=":
                    name = self.advance().text
                    self.advance()
                    decls.append(VarDecl(name, vtype, self.parse_expression()))
                else:
                    if had_mods:
                        self.error("expected resource declaration")
                    self.i = save
                    exprs.append(self.parse_expression())
                if not self.accept(";"):
                    break
            self.expect(")")
        body = [Stmt("block", line, body=self.parse_block())]
        while self.at("catch"):
            cline = self.advance().line
            self.expect("(")
            self.skip_modifiers()
            ctype = self.parse_type()
            while self.accept("|"):
                self.parse_type()
            cname = self.ident().text
            self.expect(")")
            body.append(Stmt("catch", cline, body=self.parse_block(),
                             decls=(VarDecl(cname, ctype),)))
        if self.at("finally"):
            fline = self.advance().line
            body.append(Stmt("block", fline, body=self.parse_block()))
        return Stmt("try", line, exprs=tuple(exprs), body=tuple(body),
                    decls=tuple(decls))

    def parse_switch(self) -> Stmt:
        line = self.expect("switch").line
        selector = self.parse_paren_expr()
        self.expect("{")
        exprs = [selector]
        body: list[Stmt] = []
        while not self.accept("}"):
            if self.tok.kind == "eof":
                self.error("unterminated switch")
            if self.accept("default"):
                pass
            elif self.accept("case"):
                self.parse_case_labels(exprs)
            else:
                body.append(self.parse_block_stmt())
                continue
            if self.accept("->"):
                if self.at("{"):
                    body.append(Stmt("block", self.tok.line, body=self.parse_block()))
                elif self.at("throw"):
                    body.append(self.parse_statement())
                else:
                    body.append(self.parse_expression_statement())
            else:
                if not self.accept(":"):
                    self.error("expected ':' or '->' after case label")
        return Stmt("switch", line, exprs=tuple(exprs), body=tuple(body))

    def parse_case_labels(self, exprs: list):
        old = self.no_lambda
        self.no_lambda = True
        try:
            while True:
                if self.accept("default"):
                    pass
                else:
                    save = self.i
                    vtype = self.try_type()
                    if vtype is not None and self.at_ident() and not self.at_ident("when"):
                        self.advance()  # type pattern binding
                    elif vtype is not None and self.at("(") and vtype[:1].isupper():
                        self.skip_balanced("(", ")")  # record pattern
                    else:
                        self.i = save
                        exprs.append(self.parse_ternary())
                if self.at_ident("when"):
                    self.advance()
                    exprs.append(self.parse_expression())
                if not self.accept(","):
                    break
        finally:
            self.no_lambda = old

    # -- expressions -----------------------------------------------------------

    def _node(self, kind, start: Token, children=(), **kw) -> ExprNode:
        return ExprNode(kind, tuple(children), line=start.line, col=start.col,
                        start=start.start, end=self.last_end, **kw)

    def _span_from(self, kind, first: ExprNode, children=(), **kw) -> ExprNode:
        return ExprNode(kind, tuple(children), line=first.line, col=first.col,
                        start=first.start, end=self.last_end, **kw)

    def parse_expression(self) -> ExprNode:
        if self.is_lambda_start():
            return self.parse_lambda()
        lhs = self.parse_ternary()
        op, width = self.assign_op()
        if op is None:
            return lhs
        self.i += width
        rhs = self.parse_expression()
        return self._span_from("assignment", lhs, (lhs, rhs), op=op)

    def assign_op(self) -> tuple[Optional[str], int]:
        t = self.tok
        if t.kind != "op":
            return None, 0
        if t.text in _ASSIGN_OPS:
            return t.text, 1
        if t.text == ">":
            if self._adjacent(1, ">="):
                return ">>=", 2
            if self._adjacent(1, ">") and self._adjacent(2, ">="):
                return ">>>=", 3
        return None, 0

    def is_lambda_start(self) -> bool:
        if self.no_lambda:
            return False
        t = self.tok
        if t.kind == "ident" and self.peek(1).text == "->":
            return True
        if t.kind == "op" and t.text == "(":
            depth = 0
            k = 0
            while True:
                u = self.peek(k)
                if u.kind == "eof":
                    return False
                if u.kind == "op" and u.text == "(":
                    depth += 1
                elif u.kind == "op" and u.text == ")":
                    depth -= 1
                    if depth == 0:
                        return self.peek(k + 1).text == "->"
                elif u.kind == "op" and u.text in (";", "{", "}"):
                    return False
                k += 1
        return False

    def parse_lambda(self) -> ExprNode:
        start = self.tok
        params: list[VarDecl] = []
        if self.at_ident():
            params.append(VarDecl(self.advance().text, ""))
        else:
            self.expect("(")
            while not self.at(")"):
                self.skip_modifiers()
                if self.at_ident() and self.peek(1).text in (",", ")"):
                    params.append(VarDecl(self.advance().text, ""))
                else:
                    ptype = self.parse_type()
                    if self.accept("..."):
                        ptype += "[]"
                    pname = self.ident().text
                    params.append(VarDecl(pname, "" if ptype == "var" else ptype))
                if not self.accept(","):
                    break
            self.expect(")")
        self.expect("->")
        old = self.no_lambda
        self.no_lambda = False
        try:
            if self.at("{"):
                body = Stmt("lambda", start.line, body=self.parse_block(),
                            decls=tuple(params))
            else:
                expr = self.parse_expression()
                body = Stmt("lambda", start.line, exprs=(expr,),
                            decls=tuple(params))
        finally:
            self.no_lambda = old
        return self._node("constant", start, literal="<lambda>", body=(body,))

    def parse_ternary(self) -> ExprNode:
        cond = self.parse_binary(1)
        if not self.at("?"):
            return cond
        self.advance()
        old = self.no_lambda
        self.no_lambda = False
        try:
            then = self.parse_lambda() if self.is_lambda_start() else self.parse_ternary()
        finally:
            self.no_lambda = old
        self.expect(":")
        other = self.parse_lambda() if self.is_lambda_start() else self.parse_ternary()
        return self._span_from("conditional", cond, (cond, then, other), op="?:")

    def binary_op(self) -> tuple[Optional[str], int]:
        t = self.tok
        if t.kind == "keyword" and t.text == "instanceof":
            return "instanceof", 1
        if t.kind != "op":
            return None, 0
        if t.text == ">":
            if self._adjacent(1, ">"):
                if self._adjacent(2, ">"):
                    return ">>>", 3
                if self._adjacent(2, ">="):
                    return None, 0
                return ">>", 2
            if self._adjacent(1, ">="):
                return None, 0
            return ">", 1
        if t.text in _BINARY_PREC:
            return t.text, 1
        return None, 0

    def parse_binary(self, min_prec: int) -> ExprNode:
        lhs = self.parse_unary()
        while True:
            op, width = self.binary_op()
            if op is None or _BINARY_PREC[op] < min_prec:
                return lhs
            self.i += width
            if op == "instanceof":
                self.skip_modifiers()
                ttok = self.tok
                ttype = self.parse_type()
                if self.at("("):
                    self.skip_balanced("(", ")")
                elif self.at_ident():
                    self.advance()
                rhs = ExprNode("constant", literal=ttype, line=ttok.line,
                               col=ttok.col, start=ttok.start, end=self.last_end)
            else:
                rhs = self.parse_binary(_BINARY_PREC[op] + 1)
            lhs = self._span_from("binary_op", lhs, (lhs, rhs), op=op)

    def parse_unary(self) -> ExprNode:
        t = self.tok
        if t.kind == "op" and t.text in ("+", "-", "++", "--", "!", "~"):
            self.advance()
            operand = self.parse_unary()
            return self._node("unary_op", t, (operand,), op=t.text)
        if t.kind == "op" and t.text == "(":
            cast = self.try_cast()
            if cast is not None:
                return cast
        return self.parse_postfix()

    def try_cast(self) -> Optional[ExprNode]:
        start = self.tok
        save = self.i
        self.advance()
        ctype = self.try_type()
        if ctype is None:
            self.i = save
            return None
        while self.accept("&"):
            if self.try_type() is None:
                self.i = save
                return None
        if not self.accept(")"):
            self.i = save
            return None
        nxt = self.tok
        primitive = ctype.rstrip("[]") in PRIMITIVES
        if primitive:
            ok = nxt.kind != "eof" and not (nxt.kind == "op" and nxt.text in (
                ")", ";", ",", "]", "}", "?", ":", "=", ".", "*", "/", "%",
                "==", "!=", "&&", "||", "<", ">", "<=", ">=", "&", "|", "^"))
        else:
            ok = (nxt.kind in ("ident", "number", "string", "char")
                  or (nxt.kind == "keyword" and (
                      nxt.text in ("this", "super", "new", "switch")
                      or nxt.text in _LITERAL_KEYWORDS
                      or nxt.text in PRIMITIVES))
                  or (nxt.kind == "op" and nxt.text in _UNARY_START))
        if not ok:
            self.i = save
            return None
        if self.is_lambda_start():
            operand = self.parse_lambda()
        else:
            operand = self.parse_unary()
        return self._node("cast", start, (operand,), name=ctype)

    def parse_postfix(self) -> ExprNode:
        expr = self.parse_primary()
        while self.at("++", "--"):
            op = self.advance().text
            expr = self._span_from("unary_op", expr, (expr,), op="post" + op)
        return expr

    def parse_arguments(self) -> tuple[ExprNode, ...]:
        self.expect("(")
        args = []
        old = self.no_lambda
        self.no_lambda = False
        try:
            while not self.at(")"):
                args.append(self.parse_expression())
                if not self.accept(","):
                    break
        finally:
            self.no_lambda = old
        self.expect(")")
        return tuple(args)

    def parse_primary(self) -> ExprNode:
        t = self.tok
        if t.kind in ("number", "string", "char") or (
                t.kind == "keyword" and t.text in _LITERAL_KEYWORDS):
            self.advance()
            expr = self._node("constant", t, literal=t.text)
        elif t.kind == "op" and t.text == "(":
            self.advance()
            old = self.no_lambda
            self.no_lambda = False
            try:
                inner = self.parse_expression()
            finally:
                self.no_lambda = old
            self.expect(")")
            # parentheses are transparent but widen the source span
            expr = ExprNode(inner.kind, inner.children, inner.name,
                            inner.literal, inner.op, inner.has_receiver,
                            line=t.line, col=t.col, start=t.start,
                            end=self.last_end, body=inner.body)
        elif t.kind == "keyword" and t.text == "this":
            self.advance()
            if self.at("("):
                args = self.parse_arguments()
                expr = self._node("method_call", t, args, name="this")
            else:
                expr = self._node("var_ref", t, name="this")
        elif t.kind == "keyword" and t.text == "super":
            self.advance()
            if self.at("("):
                args = self.parse_arguments()
                expr = self._node("method_call", t, args, name="super")
            else:
                expr = self._node("var_ref", t, name="super")
        elif t.kind == "keyword" and t.text == "new":
            expr = self.parse_creator(None)
        elif t.kind == "keyword" and t.text == "switch":
            stmt = self.parse_switch()
            expr = self._node("constant", t, literal="<switch>", body=(stmt,))
        elif t.kind == "keyword" and (t.text in PRIMITIVES or t.text == "void"):
            ptype = self.parse_type()
            if self.accept("::"):
                self.advance()
                expr = self._node("constant", t, literal=f"{ptype}::new")
            else:
                self.expect(".")
                self.expect("class")
                expr = self._node("constant", t, literal=f"{ptype}.class")
        elif t.kind == "ident":
            self.advance()
            if self.at("("):
                args = self.parse_arguments()
                expr = self._node("method_call", t, args, name=t.text)
            else:
                expr = self._node("var_ref", t, name=t.text)
        elif t.kind == "op" and t.text == "@":
            self.skip_annotations()
            return self.parse_primary()
        else:
            self.error("expected expression")
        return self.parse_selectors(expr)

    def parse_selectors(self, expr: ExprNode) -> ExprNode:
        while True:
            if self.at("."):
                nxt = self.peek(1)
                if nxt.kind == "ident":
                    self.i += 2
                    if self.at("("):
                        args = self.parse_arguments()
                        expr = self._span_from("method_call", expr, (expr,) + args,
                                               name=nxt.text, has_receiver=True)
                    else:
                        expr = self._span_from("field_access", expr, (expr,),
                                               name=nxt.text)
                elif nxt.text == "<":
                    self.advance()
                    self.skip_type_args()
                    name = self.ident().text
                    args = self.parse_arguments()
                    expr = self._span_from("method_call", expr, (expr,) + args,
                                           name=name, has_receiver=True)
                elif nxt.text == "new":
                    self.advance()
                    expr = self.parse_creator(expr)
                elif nxt.text == "class":
                    self.i += 2
                    text = self.text[expr.start:self.last_end]
                    expr = self._span_from("constant", expr, literal=_squash(text))
                elif nxt.text in ("this", "super"):
                    self.i += 2
                    if self.at("("):
                        args = self.parse_arguments()
                        expr = self._span_from("method_call", expr, args,
                                               name=nxt.text)
                    else:
                        expr = self._span_from("var_ref", expr, name=nxt.text)
                else:
                    self.error("expected member name", nxt)
            elif self.at("[") and self.peek(1).text == "]":
                # array type: String[].class or int[]::new
                dims = self.parse_dims()
                if self.accept("::"):
                    member = self.advance().text
                    text = self.text[expr.start:expr.end]
                    expr = self._span_from("constant", expr,
                                           literal=f"{_squash(text)}{dims}::{member}")
                    continue
                self.expect(".")
                self.expect("class")
                text = self.text[expr.start:expr.end]
                expr = self._span_from("constant", expr,
                                       literal=f"{_squash(text)}{dims}.class")
            elif self.at("["):
                self.advance()
                old = self.no_lambda
                self.no_lambda = False
                try:
                    index = self.parse_expression()
                finally:
                    self.no_lambda = old
                self.expect("]")
                expr = self._span_from("array_access", expr, (expr, index), op="[]")
            elif self.at("::"):
                self.advance()
                if self.at("<"):
                    self.skip_type_args()
                member = self.advance()
                if member.kind not in ("ident",) and member.text != "new":
                    self.error("expected method reference name", member)
                text = self.text[expr.start:expr.end]
                expr = self._span_from("constant", expr,
                                       literal=f"{_squash(text)}::{member.text}")
            elif (self.at("<") and expr.kind in ("var_ref", "field_access")
                  and self._generic_method_ref()):
                self.skip_type_args()
                self.expect("::")
                member = self.advance()
                text = self.text[expr.start:expr.end]
                expr = self._span_from("constant", expr,
                                       literal=f"{_squash(text)}::{member.text}")
            else:
                return expr

    def _generic_method_ref(self) -> bool:
        save = self.i
        try:
            self.skip_type_args()
            return self.at("::")
        except JavaSyntaxError:
            return False
        finally:
            self.i = save

    def parse_creator(self, outer: Optional[ExprNode]) -> ExprNode:
        start = self.expect("new")
        if self.at("<"):
            self.skip_type_args()
        self.skip_annotations()
        t = self.tok
        if t.kind == "keyword" and t.text in PRIMITIVES:
            self.advance()
            base = t.text
        else:
            parts = [self.ident().text]
            if self.at("<"):
                self.skip_type_args()
            while self.at("."):
                self.advance()
                self.skip_annotations()
                parts.append(self.ident().text)
                if self.at("<"):
                    self.skip_type_args()
            base = ".".join(parts)
        if self.at("["):
            dims = []
            ndims = 0
            while True:
                save = self.i
                self.skip_annotations()
                if not self.at("["):
                    self.i = save
                    break
                self.advance()
                ndims += 1
                if self.accept("]"):
                    continue
                dims.append(self.parse_expression())
                self.expect("]")
            atype = base + "[]" * ndims
            if not dims and self.at("{"):
                init = self.parse_array_init(atype)
                children = init.children
            else:
                children = tuple(dims)
            return self._node("new_object", start, children, name=atype)
        args = self.parse_arguments()
        body = ()
        if self.at("{"):
            anon = self.parse_class_body("<anon>", "class", "<anon>", (base,),
                                         line=self.tok.line)
            body = (anon,)
        if outer is not None:
            return ExprNode("new_object", (outer,) + args, name=base,
                            has_receiver=True, line=outer.line, col=outer.col,
                            start=outer.start, end=self.last_end, body=body)
        return self._node("new_object", start, args, name=base, body=body)


def _squash(text: str) -> str:
    return "".join(text.split())


def parse_source(text: str, path: str = "<string>") -> CompilationUnit:
    """Parse a Java compilation unit.

    Raises :class:`JavaSyntaxError` (a ``SyntaxError``) with the line and
    column of the offending token.
    """
    limit = sys.getrecursionlimit()
    if limit < 20000:
        sys.setrecursionlimit(20000)
    return Parser(text, path).parse_unit()


def parse_expression(text: str) -> ExprNode:
    """Parse a single standalone Java expression."""
    parser = Parser(text, "<expr>")
    expr = parser.parse_expression()
    if parser.tok.kind != "eof":
        parser.error("unexpected trailing input")
    return expr
