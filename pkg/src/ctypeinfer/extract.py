"""Call-site scanning and labeled argument extraction."""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence, Union

from .features import FeatureVector, featurize_expr
from .frontend import (CompilationUnit, ExprNode, JavaSyntaxError, Stmt,
                       TypeDecl, parse_expression, parse_source)
from .frontend.lexer import tokenize
from .registry import (BUNDLED_SIGNATURES, LABEL_ORDER, CType, Registry,
                       bundled_path)
from .resolve import (CallResolver, MethodId, PackageTree, ScopeTable,
                      TypeContext, build_package_tree, param_for_position,
                      resolve_type_name)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Occurrence:
    project: str
    file: str
    line: int
    callee: MethodId
    arg_pos: int
    label: CType
    expr: ExprNode = field(compare=False, repr=False)
    expr_text: str = ""
    features: Optional[FeatureVector] = None
    col: int = field(default=0, compare=False)

    @property
    def sort_key(self):
        return (self.file, self.line, self.col, str(self.callee), self.arg_pos)

    def to_json(self) -> str:
        data = {
            "project": self.project,
            "file": self.file,
            "line": self.line,
            "callee": str(self.callee),
            "arg_pos": self.arg_pos,
            "label": self.label.label,
            "expr_text": self.expr_text,
            "features": self.features.to_json() if self.features is not None else None,
        }
        return json.dumps(data, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "Occurrence":
        data = json.loads(line)
        feats = data.get("features")
        return cls(
            project=data["project"], file=data["file"], line=int(data["line"]),
            callee=MethodId.parse(data["callee"]), arg_pos=int(data["arg_pos"]),
            label=CType.parse(data["label"]),
            expr=parse_expression(data["expr_text"]), expr_text=data["expr_text"],
            features=FeatureVector.from_json(feats) if feats is not None else None)


def normalized_text(source: str, expr: ExprNode) -> str:
    """Source text of ``expr`` with every inter-token gap collapsed to one space."""
    chunk = source[expr.start:expr.end]
    tokens = [t for t in tokenize(chunk) if t.kind != "eof"]
    parts = []
    prev_end = None
    for tok in tokens:
        if prev_end is not None and tok.start > prev_end:
            parts.append(" ")
        parts.append(tok.text)
        prev_end = tok.end
    return "".join(parts)


# -- scanning ----------------------------------------------------------------------


class _UnitScanner:
    def __init__(self, unit: CompilationUnit, resolver: CallResolver,
                 registry: Registry, project: str, rel_path: str, mode: str):
        self.unit = unit
        self.resolver = resolver
        self.tree = resolver.tree
        self.registry = registry
        self.project = project
        self.rel_path = rel_path
        self.mode = mode
        self.base_ctx = TypeContext.from_unit(unit)
        self.found: list[Occurrence] = []

    def run(self) -> list[Occurrence]:
        for decl in self.unit.type_decls:
            self.scan_type(decl, (), ScopeTable())
        return self.found

    def scan_type(self, decl: TypeDecl, outer: tuple[str, ...], scope: ScopeTable):
        if decl.fq_name in self.tree:
            enclosing = (decl.fq_name,) + outer
        else:
            # local and anonymous classes act through their supertypes
            ctx = self.base_ctx.with_enclosing(outer)
            supers = tuple(t for t in (resolve_type_name(self.tree, s, ctx)
                                       for s in decl.supertypes) if t)
            enclosing = supers + outer
        ctx = self.base_ctx.with_enclosing(enclosing)
        class_scope = scope.child()
        for stmt in decl.initializers:
            self.visit_stmt(stmt, class_scope, ctx)
        for method in decl.methods:
            mscope = class_scope.child(
                {name: self.resolver.normalize(t, ctx) for name, t in method.params})
            self.visit_block(method.body, mscope, ctx)
        for nested in decl.nested:
            self.scan_type(nested, enclosing, ScopeTable())

    def visit_block(self, stmts: Sequence[Stmt], scope: ScopeTable, ctx: TypeContext):
        for stmt in stmts:
            self.visit_stmt(stmt, scope, ctx)

    def _bind(self, decl, scope: ScopeTable, ctx: TypeContext):
        if decl.init is not None:
            self.visit_expr(decl.init, scope, ctx)
        if decl.type in ("", "var"):
            init = decl.init
            if init is not None and init.kind == "new_object":
                t = self.resolver.type_of(init, scope, ctx)
                scope.bind(decl.name, t.name if t else "")
            else:
                scope.bind(decl.name, "")
        else:
            scope.bind(decl.name, self.resolver.normalize(decl.type, ctx))

    def visit_stmt(self, stmt: Stmt, scope: ScopeTable, ctx: TypeContext):
        if stmt.kind == "local_var":
            for decl in stmt.decls:
                self._bind(decl, scope, ctx)
            return
        if stmt.kind == "class" and stmt.type_decl is not None:
            for e in stmt.exprs:
                self.visit_expr(e, scope, ctx)
            self.scan_type(stmt.type_decl, ctx.enclosing, scope)
            return
        inner = scope.child()
        for decl in stmt.decls:
            self._bind(decl, inner, ctx)
        for e in stmt.exprs:
            self.visit_expr(e, inner, ctx)
        self.visit_block(stmt.body, inner, ctx)

    def visit_expr(self, expr: ExprNode, scope: ScopeTable, ctx: TypeContext):
        for node in expr.walk():
            if node.kind in ("method_call", "new_object"):
                self.match_call(node, scope, ctx)
            for part in node.body:
                if isinstance(part, Stmt):
                    self.visit_stmt(part, scope, ctx)
                elif isinstance(part, TypeDecl):
                    self.scan_type(part, ctx.enclosing, scope)

    def match_call(self, call: ExprNode, scope: ScopeTable, ctx: TypeContext):
        entry = self.registry.lookup(self.resolver.resolve_call(call, scope, ctx))
        if entry is None:
            return
        params = entry.method.param_types
        for pos, arg in enumerate(call.args):
            idx = param_for_position(params, pos)
            if idx is None:
                continue
            text = normalized_text(self.unit.source, arg)
            self.found.append(Occurrence(
                project=self.project, file=self.rel_path, line=arg.line,
                callee=entry.method, arg_pos=pos, label=entry.label_for(idx),
                expr=arg, expr_text=text,
                features=featurize_expr(arg, self.mode), col=arg.col))


def scan_units(units: Sequence[tuple[str, CompilationUnit]], registry: Registry,
               project: str, tree: Optional[PackageTree] = None,
               mode: str = "literal") -> list[Occurrence]:
    """Occurrences for already-parsed units given as (relative path, unit)."""
    if tree is None:
        tree = build_project_tree([u for _, u in units], registry)
    resolver = CallResolver(tree)
    found: list[Occurrence] = []
    for rel, unit in units:
        found.extend(_UnitScanner(unit, resolver, registry, project, rel, mode).run())
    found.sort(key=lambda o: o.sort_key)
    return found


def build_project_tree(units: Iterable[CompilationUnit], registry: Registry,
                       signatures=None) -> PackageTree:
    """Package tree with the bundled library signatures and registry methods."""
    lines = []
    sig_path = bundled_path(BUNDLED_SIGNATURES) if signatures is None else Path(signatures)
    lines.extend(sig_path.read_text(encoding="utf-8").splitlines())
    lines.extend(str(m) for m in registry)
    return build_package_tree(units, lines)


def iter_java_files(root: Path) -> Iterator[Path]:
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in sorted(filenames):
            if name.endswith(".java"):
                yield Path(dirpath) / name


@dataclass
class ScanDiagnostics:
    parsed: int = 0
    failed: list[str] = field(default_factory=list)


def _parse_file(args: tuple[str, str]):
    path, rel = args
    try:
        text = Path(path).read_text(encoding="utf-8", errors="replace")
        return rel, parse_source(text, rel), None
    except (JavaSyntaxError, RecursionError) as exc:
        return rel, None, f"{rel}: parse error: {exc}"
    except OSError as exc:
        return rel, None, f"{rel}: unreadable: {exc}"


def parse_project(root: Union[str, Path], jobs: int = 1,
                  diagnostics: Optional[ScanDiagnostics] = None
                  ) -> list[tuple[str, CompilationUnit]]:
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"project root not found: {root}")
    work = [(str(p), p.relative_to(root).as_posix()) for p in iter_java_files(root)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_parse_file, work, chunksize=8))
    else:
        results = [_parse_file(w) for w in work]
    units = []
    for rel, unit, err in results:
        if err is not None:
            log.warning(err)
            if diagnostics is not None:
                diagnostics.failed.append(err)
            continue
        units.append((rel, unit))
        if diagnostics is not None:
            diagnostics.parsed += 1
    return units


def scan_project(root: Union[str, Path], registry: Registry, project_name: str,
                 mode: str = "literal", jobs: int = 1,
                 diagnostics: Optional[ScanDiagnostics] = None) -> list[Occurrence]:
    """Parse every ``*.java`` file under ``root`` and extract registry arguments."""
    units = parse_project(root, jobs, diagnostics)
    return scan_units(units, registry, project_name, mode=mode)


# -- tables and dumps -----------------------------------------------------------------------


def tabulate_counts(occurrences: Iterable[Occurrence],
                    projects: Sequence[str] = ()) -> dict[str, dict[str, int]]:
    """project -> {label: count, ..., "All": total}, labels in canonical order."""
    table: dict[str, dict[str, int]] = {}

    def row(p):
        if p not in table:
            table[p] = {c.label: 0 for c in LABEL_ORDER}
            table[p]["All"] = 0
        return table[p]

    for p in projects:
        row(p)
    for occ in occurrences:
        r = row(occ.project)
        r[occ.label.label] += 1
        r["All"] += 1
    return {p: table[p] for p in sorted(table)}


def format_counts(table: dict[str, dict[str, int]], tsv: bool = False) -> str:
    header = ["Project"] + [c.label for c in LABEL_ORDER] + ["All"]
    rows = [[p] + [str(r[h]) for h in header[1:]] for p, r in table.items()]
    totals = ["Total"] + [str(sum(r[h] for r in table.values())) for h in header[1:]]
    rows.append(totals)
    if tsv:
        return "\n".join("\t".join(r) for r in [header] + rows) + "\n"
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    out = []
    for r in [header] + rows:
        cells = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        out.append("  ".join(cells).rstrip())
    return "\n".join(out) + "\n"


def write_jsonl(occurrences: Iterable[Occurrence], path: Union[str, Path]):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for occ in occurrences:
            fh.write(occ.to_json() + "\n")


def read_jsonl(path: Union[str, Path]) -> list[Occurrence]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(Occurrence.from_json(line))
    return out


def refeaturize(occurrences: Iterable[Occurrence], mode: str) -> list[Occurrence]:
    return [replace(o, features=featurize_expr(o.expr, mode)) for o in occurrences]
