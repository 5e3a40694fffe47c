"""Symbol tables, method identifiers and call-site resolution.

Method identities use a JVM-like descriptor in which reference types are
written by simple name, e.g. ``foo.bar.Config.findString([LString;I)I``.
Resolution is deliberately forgiving: anything that cannot be typed yields
an empty candidate set instead of an error.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional, Union

from .frontend.ast import CompilationUnit, ExprNode, TypeDecl

log = logging.getLogger(__name__)

PRIMITIVE_CODES = {
    "boolean": "Z", "byte": "B", "char": "C", "short": "S", "int": "I",
    "long": "J", "float": "F", "double": "D", "void": "V",
}
_CODE_PRIMITIVES = {v: k for k, v in PRIMITIVE_CODES.items()}

_NAME_RE = re.compile(r"[A-Za-z_$][\w$]*(?:\.[A-Za-z_$][\w$]*)*")
_METHOD_ID_RE = re.compile(
    r"(?P<cls>[A-Za-z_$][\w$]*(?:\.[A-Za-z_$][\w$]*)*)\."
    r"(?P<name><init>|[A-Za-z_$][\w$]*)"
    r"(?P<desc>\(.*\).+)$")

CONSTRUCTOR = "<init>"


class UnknownType(ValueError):
    """A type name that is neither primitive nor an identifier path."""


class DescriptorError(ValueError):
    pass


def simple_name(type_text: str) -> str:
    """``java.util.Map.Entry[]`` -> ``Entry[]``."""
    dims = ""
    while type_text.endswith("[]"):
        type_text = type_text[:-2]
        dims += "[]"
    return type_text.rsplit(".", 1)[-1] + dims


def strip_dims(type_text: str) -> tuple[str, int]:
    n = 0
    while type_text.endswith("[]"):
        type_text = type_text[:-2]
        n += 1
    return type_text, n


_TYPE_ARGS_RE = re.compile(r"<[^<>]*>")


def erase(type_text: str) -> str:
    """Drop generic type arguments: ``Map<K, List<V>>[]`` -> ``Map[]``."""
    prev = None
    while prev != type_text:
        prev, type_text = type_text, _TYPE_ARGS_RE.sub("", type_text)
    return type_text.strip()


def encode_type(type_text: str) -> str:
    base, dims = strip_dims(erase(type_text.strip()))
    prefix = "[" * dims
    if base in PRIMITIVE_CODES:
        if base == "void" and dims:
            raise UnknownType("void[] is not a type")
        return prefix + PRIMITIVE_CODES[base]
    if not _NAME_RE.fullmatch(base):
        raise UnknownType(f"not a type name: {type_text!r}")
    return f"{prefix}L{base.rsplit('.', 1)[-1]};"


def encode_descriptor(param_types: Iterable[str], return_type: str) -> str:
    params = "".join(encode_type(t) for t in param_types)
    return f"({params}){encode_type(return_type)}"


def _decode_one(desc: str, pos: int) -> tuple[str, int]:
    dims = 0
    while pos < len(desc) and desc[pos] == "[":
        dims += 1
        pos += 1
    if pos >= len(desc):
        raise DescriptorError(f"truncated descriptor {desc!r}")
    code = desc[pos]
    if code == "L":
        end = desc.find(";", pos)
        if end < 0:
            raise DescriptorError(f"unterminated class name in {desc!r}")
        name = desc[pos + 1:end].replace("/", ".")
        if not _NAME_RE.fullmatch(name):
            raise DescriptorError(f"bad class name {name!r} in {desc!r}")
        return name + "[]" * dims, end + 1
    if code in _CODE_PRIMITIVES:
        if code == "V" and dims:
            raise DescriptorError("void array in descriptor")
        return _CODE_PRIMITIVES[code] + "[]" * dims, pos + 1
    raise DescriptorError(f"bad type code {code!r} in {desc!r}")


def decode_descriptor(desc: str) -> tuple[tuple[str, ...], str]:
    """Inverse of :func:`encode_descriptor` (up to package qualification)."""
    if not desc.startswith("("):
        raise DescriptorError(f"descriptor must start with '(': {desc!r}")
    pos = 1
    params = []
    while pos < len(desc) and desc[pos] != ")":
        ptype, pos = _decode_one(desc, pos)
        if ptype == "void":
            raise DescriptorError("void parameter")
        params.append(ptype)
    if pos >= len(desc):
        raise DescriptorError(f"missing ')' in {desc!r}")
    ret, pos = _decode_one(desc, pos + 1)
    if pos != len(desc):
        raise DescriptorError(f"trailing characters in {desc!r}")
    return tuple(params), ret


@dataclass(frozen=True, order=True)
class MethodId:
    class_fqname: str
    method_name: str
    descriptor: str

    def __str__(self):
        return f"{self.class_fqname}.{self.method_name}{self.descriptor}"

    @classmethod
    def parse(cls, text: str) -> "MethodId":
        m = _METHOD_ID_RE.fullmatch(text.strip())
        if m is None:
            raise DescriptorError(f"malformed method id {text!r}")
        decode_descriptor(m["desc"])
        return cls(m["cls"], m["name"], m["desc"])

    @property
    def param_types(self) -> tuple[str, ...]:
        return decode_descriptor(self.descriptor)[0]

    @property
    def return_type(self) -> str:
        return decode_descriptor(self.descriptor)[1]

    @property
    def arity(self) -> int:
        return len(self.param_types)


def encode_method_id(class_fqname: str, name: str, param_types: Iterable[str],
                     return_type: str = "void") -> MethodId:
    """Build the unique id, e.g. ``foo.bar.Config.findString([LString;I)I``."""
    if not _NAME_RE.fullmatch(class_fqname):
        raise UnknownType(f"bad class name {class_fqname!r}")
    if name != CONSTRUCTOR and not _NAME_RE.fullmatch(name):
        raise UnknownType(f"bad method name {name!r}")
    return MethodId(class_fqname, name, encode_descriptor(param_types, return_type))


# -- symbol tables -------------------------------------------------------------


class ScopeTable:
    """Chain of name -> declared type maps, innermost first."""

    def __init__(self, bindings: Optional[dict] = None,
                 parent: Optional["ScopeTable"] = None):
        self.bindings = dict(bindings or {})
        self.parent = parent

    def child(self, bindings: Optional[dict] = None) -> "ScopeTable":
        return ScopeTable(bindings, self)

    def bind(self, name: str, type_text: str):
        self.bindings[name] = type_text

    def lookup(self, name: str) -> Optional[str]:
        scope = self
        while scope is not None:
            if name in scope.bindings:
                return scope.bindings[name]
            scope = scope.parent
        return None

    def chain(self) -> list[dict]:
        out = []
        scope = self
        while scope is not None:
            out.append(scope.bindings)
            scope = scope.parent
        return out


@dataclass(frozen=True)
class MethodInfo:
    id: MethodId
    params: tuple[str, ...]
    return_type: str


@dataclass
class TypeInfo:
    fq_name: str
    package: str
    supertypes: list[str] = field(default_factory=list)
    methods: dict[str, list[MethodInfo]] = field(default_factory=dict)
    fields: dict[str, str] = field(default_factory=dict)
    decl: Optional[TypeDecl] = None
    unit: Optional[CompilationUnit] = None
    resolved_supers: list[str] = field(default_factory=list)

    def add_method(self, info: MethodInfo) -> bool:
        bucket = self.methods.setdefault(info.id.method_name, [])
        if any(m.id == info.id for m in bucket):
            return False
        bucket.append(info)
        return True

    def all_methods(self) -> Iterator[MethodInfo]:
        for bucket in self.methods.values():
            yield from bucket


@dataclass
class PackageNode:
    name: str
    children: dict[str, "PackageNode"] = field(default_factory=dict)
    types: dict[str, TypeInfo] = field(default_factory=dict)


def split_class_name(fq: str) -> tuple[str, str]:
    """Guess the package / type split of a dotted name without source.

    Package segments start lowercase; the first capitalized segment opens
    the type name (``java.util.Map.Entry`` -> ``java.util``, ``Map.Entry``).
    """
    parts = fq.split(".")
    for i, part in enumerate(parts):
        if part[:1].isupper() or part[:1] in "_$":
            return ".".join(parts[:i]), ".".join(parts[i:])
    return ".".join(parts[:-1]), parts[-1]


class PackageTree:
    """Hierarchical table of packages, types and method signatures."""

    def __init__(self):
        self.root = PackageNode("")
        self.types: dict[str, TypeInfo] = {}
        self.diagnostics: list[str] = []
        self._by_simple: dict[str, list[str]] = {}
        self._subtypes: dict[str, set[str]] = {}
        self._ancestor_cache: dict[str, tuple[str, ...]] = {}
        self._descendant_cache: dict[str, tuple[str, ...]] = {}

    def __contains__(self, fq: str) -> bool:
        return fq in self.types

    def __len__(self) -> int:
        return len(self.types)

    def warn(self, msg: str):
        log.warning(msg)
        self.diagnostics.append(msg)

    def package(self, path: str, create: bool = False) -> Optional[PackageNode]:
        node = self.root
        if not path:
            return node
        for part in path.split("."):
            nxt = node.children.get(part)
            if nxt is None:
                if not create:
                    return None
                nxt = node.children[part] = PackageNode(part)
            node = nxt
        return node

    def packages(self) -> list[str]:
        out = []

        def visit(node, prefix):
            for name in sorted(node.children):
                path = f"{prefix}.{name}" if prefix else name
                child = node.children[name]
                if child.types:
                    out.append(path)
                visit(child, path)
        if self.root.types:
            out.append("")
        visit(self.root, "")
        return out

    def ensure_type(self, fq: str, package: Optional[str] = None) -> TypeInfo:
        info = self.types.get(fq)
        if info is not None:
            return info
        if package is None:
            package, local = split_class_name(fq)
        else:
            local = fq[len(package) + 1:] if package else fq
        info = TypeInfo(fq, package)
        self.types[fq] = info
        self.package(package, create=True).types[local] = info
        self._by_simple.setdefault(fq.rsplit(".", 1)[-1], []).append(fq)
        return info

    def add_method_id(self, mid: MethodId) -> MethodInfo:
        info = self.ensure_type(mid.class_fqname)
        params, ret = decode_descriptor(mid.descriptor)
        minfo = MethodInfo(mid, params, ret)
        info.add_method(minfo)
        return minfo

    def methods(self) -> Iterator[MethodInfo]:
        for fq in sorted(self.types):
            yield from self.types[fq].all_methods()

    def method_ids(self) -> set[MethodId]:
        return {m.id for m in self.methods()}

    def find_by_simple_name(self, simple: str) -> list[str]:
        return sorted(self._by_simple.get(simple, ()))

    def field_type(self, fq: str, name: str) -> Optional[tuple[str, TypeInfo]]:
        for anc in self.ancestors(fq):
            info = self.types[anc]
            if name in info.fields:
                return info.fields[name], info
        return None

    # -- hierarchy ---------------------------------------------------------

    def finalize(self):
        """Resolve declared supertypes and index the subtype relation."""
        self._subtypes.clear()
        self._ancestor_cache.clear()
        self._descendant_cache.clear()
        for fq in sorted(self.types):
            info = self.types[fq]
            resolved = []
            for raw in info.supertypes:
                target = self._resolve_super(raw, info)
                if target is not None and target != fq and target not in resolved:
                    resolved.append(target)
            info.resolved_supers = resolved
            for sup in resolved:
                self._subtypes.setdefault(sup, set()).add(fq)

    def _resolve_super(self, raw: str, info: TypeInfo) -> Optional[str]:
        if info.unit is not None:
            ctx = TypeContext.for_type(info.unit, info.fq_name)
            # a type's own members are not in scope for its extends clause
            ctx = TypeContext(ctx.package, ctx.single, ctx.on_demand,
                              ctx.static_single, ctx.static_on_demand,
                              ctx.enclosing[1:])
            return resolve_type_name(self, raw, ctx)
        if raw in self.types:
            return raw
        return self.resolve_global(raw, info.package)

    def ancestors(self, fq: str) -> tuple[str, ...]:
        """``fq`` followed by all transitive supertypes, breadth first."""
        cached = self._ancestor_cache.get(fq)
        if cached is not None:
            return cached
        seen = [fq]
        queue = [fq]
        while queue:
            cur = queue.pop(0)
            info = self.types.get(cur)
            if info is None:
                continue
            for sup in info.resolved_supers:
                if sup not in seen:
                    seen.append(sup)
                    queue.append(sup)
        out = tuple(s for s in seen if s in self.types)
        self._ancestor_cache[fq] = out
        return out

    def descendants(self, fq: str) -> tuple[str, ...]:
        cached = self._descendant_cache.get(fq)
        if cached is not None:
            return cached
        seen: list[str] = []
        queue = [fq]
        while queue:
            cur = queue.pop(0)
            for sub in sorted(self._subtypes.get(cur, ())):
                if sub != fq and sub not in seen:
                    seen.append(sub)
                    queue.append(sub)
        out = tuple(seen)
        self._descendant_cache[fq] = out
        return out

    def resolve_global(self, name: str, near_package: str = "") -> Optional[str]:
        """Resolve a (possibly simple) name without import context."""
        base, _ = strip_dims(name)
        if base in self.types:
            return base
        if "." in base:
            return None
        for cand in (f"{near_package}.{base}" if near_package else base,
                     f"java.lang.{base}"):
            if cand in self.types:
                return cand
        hits = self.find_by_simple_name(base)
        if len(hits) == 1:
            return hits[0]
        return None


# -- import context ------------------------------------------------------------


@dataclass(frozen=True)
class TypeContext:
    """Names visible from a point in a compilation unit."""

    package: str = ""
    single: tuple[tuple[str, str], ...] = ()
    on_demand: tuple[str, ...] = ()
    static_single: tuple[tuple[str, str], ...] = ()
    static_on_demand: tuple[str, ...] = ()
    enclosing: tuple[str, ...] = ()

    @classmethod
    def from_unit(cls, unit: CompilationUnit) -> "TypeContext":
        single, on_demand, static_single, static_demand = [], [], [], []
        for imp in unit.imports:
            if imp.static_import:
                if imp.on_demand:
                    static_demand.append(imp.target)
                else:
                    owner, _, member = imp.target.rpartition(".")
                    static_single.append((member, owner))
            elif imp.on_demand:
                on_demand.append(imp.target)
            else:
                single.append((imp.target.rsplit(".", 1)[-1], imp.target))
        return cls(unit.package_name, tuple(single), tuple(on_demand),
                   tuple(static_single), tuple(static_demand))

    @classmethod
    def for_type(cls, unit: CompilationUnit, fq: str) -> "TypeContext":
        base = cls.from_unit(unit)
        chain = []
        name = fq
        prefix = unit.package_name
        while name and name != prefix:
            chain.append(name)
            if "." not in name:
                break
            name = name.rsplit(".", 1)[0]
        return base.with_enclosing(tuple(chain))

    def with_enclosing(self, enclosing: tuple[str, ...]) -> "TypeContext":
        return TypeContext(self.package, self.single, self.on_demand,
                           self.static_single, self.static_on_demand, enclosing)

    def import_map(self) -> dict[str, str]:
        return dict(self.single)


def resolve_type_name(tree: PackageTree, name: str,
                      ctx: TypeContext) -> Optional[str]:
    """Resolve a source-level type name to a fully qualified name in ``tree``."""
    base, _ = strip_dims(name)
    if not base or base in PRIMITIVE_CODES:
        return None
    if "." in base:
        head, rest = base.split(".", 1)
        outer = resolve_type_name(tree, head, ctx)
        if outer is not None and f"{outer}.{rest}" in tree:
            return f"{outer}.{rest}"
        return base if base in tree else None
    for enc in ctx.enclosing:
        if enc.rsplit(".", 1)[-1] == base and enc in tree:
            return enc
        for anc in tree.ancestors(enc):
            if f"{anc}.{base}" in tree:
                return f"{anc}.{base}"
    singles = dict(ctx.single)
    if base in singles:
        target = singles[base]
        return target if target in tree else None
    local = f"{ctx.package}.{base}" if ctx.package else base
    if local in tree:
        return local
    for pkg in ctx.on_demand:
        if f"{pkg}.{base}" in tree:
            return f"{pkg}.{base}"
    if f"java.lang.{base}" in tree:
        return f"java.lang.{base}"
    return None


# -- tree construction ---------------------------------------------------------


SignatureSource = Union[str, Path, Iterable[str], None]


def _signature_lines(source: SignatureSource) -> Iterator[tuple[int, str]]:
    if source is None:
        return
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
        lines: Iterable[str] = text.splitlines()
    else:
        lines = source
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def load_signatures(tree: PackageTree, source: SignatureSource):
    """Merge a plain-text signature list into ``tree``.

    One ``<class>.<name><descriptor>`` per line; ``#`` starts a comment.
    ``@extends <type> <super> [<super> ...]`` lines declare hierarchy for
    library types whose sources are not scanned.
    """
    for lineno, line in _signature_lines(source):
        if line.startswith("@extends"):
            parts = line.split()
            if len(parts) < 3 or not all(_NAME_RE.fullmatch(p) for p in parts[1:]):
                tree.warn(f"signature line {lineno}: malformed @extends: {line!r}")
                continue
            info = tree.ensure_type(parts[1])
            for sup in parts[2:]:
                tree.ensure_type(sup)
                if sup not in info.supertypes:
                    info.supertypes.append(sup)
            continue
        try:
            mid = MethodId.parse(line)
        except DescriptorError as exc:
            tree.warn(f"signature line {lineno}: {exc}")
            continue
        tree.add_method_id(mid)


def _return_text(ret: Optional[str]) -> str:
    return "void" if ret is None else ret


def _add_decl(tree: PackageTree, unit: CompilationUnit, decl: TypeDecl):
    if decl.fq_name in tree.types and tree.types[decl.fq_name].decl is not None:
        tree.warn(f"duplicate type {decl.fq_name} in {unit.file_path}; merged")
    info = tree.ensure_type(decl.fq_name, unit.package_name)
    if info.decl is None:
        info.decl = decl
        info.unit = unit
    for sup in decl.supertypes:
        if sup not in info.supertypes:
            info.supertypes.append(sup)
    for name, ftype in decl.fields:
        info.fields.setdefault(name, ftype)
    has_ctor = False
    for m in decl.methods:
        params = tuple(t for _, t in m.params)
        try:
            if m.is_constructor:
                has_ctor = True
                mid = encode_method_id(decl.fq_name, CONSTRUCTOR, params, "void")
                ret = "void"
            else:
                ret = _return_text(m.return_type)
                mid = encode_method_id(decl.fq_name, m.name, params, ret)
        except UnknownType as exc:
            tree.warn(f"{unit.file_path}: {decl.fq_name}.{m.name}: {exc}")
            continue
        info.add_method(MethodInfo(mid, params, ret))
    if not has_ctor and decl.kind in ("class", "enum"):
        info.add_method(MethodInfo(
            encode_method_id(decl.fq_name, CONSTRUCTOR, (), "void"), (), "void"))
    for nested in decl.nested:
        _add_decl(tree, unit, nested)


def build_package_tree(units: Iterable[CompilationUnit],
                       extra_signatures: SignatureSource = None) -> PackageTree:
    """Register every declared type and method plus any listed signatures."""
    tree = PackageTree()
    for unit in units:
        for decl in unit.type_decls:
            _add_decl(tree, unit, decl)
    load_signatures(tree, extra_signatures)
    tree.finalize()
    return tree


# -- expression typing and call resolution ---------------------------------------


@dataclass(frozen=True)
class TypeRef:
    kind: str  # "value", "type" or "package"
    name: str


_NUMERIC_RANK = {"byte": 0, "short": 1, "char": 1, "int": 2, "long": 3,
                 "float": 4, "double": 5}


def literal_type(literal: str) -> Optional[str]:
    if literal.startswith('"'):
        return "String"
    if literal.startswith("'"):
        return "char"
    if literal in ("true", "false"):
        return "boolean"
    if literal == "null":
        return "null"
    if literal.endswith(".class"):
        return "Class"
    if literal[:1].isdigit() or literal[:1] == ".":
        low = literal.lower()
        if low.startswith("0x"):
            return "long" if low.endswith("l") else "int"
        if low.endswith("l"):
            return "long"
        if low.endswith("f"):
            return "float"
        if low.endswith("d") or "." in low or "e" in low:
            return "double"
        return "int"
    return None


class CallResolver:
    """Types expressions and resolves call sites against a package tree."""

    def __init__(self, tree: PackageTree):
        self.tree = tree

    # -- types -----------------------------------------------------------

    def normalize(self, type_text: str, ctx: TypeContext) -> str:
        """Qualify ``type_text`` when it names a type in the tree."""
        if not type_text:
            return type_text
        base, dims = strip_dims(type_text)
        fq = resolve_type_name(self.tree, base, ctx)
        return (fq or base) + "[]" * dims

    def _value_in_tree(self, type_text: Optional[str]) -> Optional[str]:
        if type_text and type_text in self.tree:
            return type_text
        return None

    def type_of(self, expr: ExprNode, scopes: ScopeTable,
                ctx: TypeContext) -> Optional[TypeRef]:
        kind = expr.kind
        if kind == "constant":
            t = literal_type(expr.literal)
            return TypeRef("value", t) if t else None
        if kind == "var_ref":
            return self._type_of_name(expr.name, scopes, ctx)
        if kind == "field_access":
            return self._type_of_field(expr, scopes, ctx)
        if kind == "method_call":
            return self._common_return(self.resolve_call(expr, scopes, ctx))
        if kind == "new_object":
            if expr.name.endswith("[]"):
                return TypeRef("value", self.normalize(expr.name, ctx))
            fq = self._creator_type(expr, scopes, ctx)
            return TypeRef("value", fq or expr.name)
        if kind == "cast":
            return TypeRef("value", self.normalize(expr.name, ctx))
        if kind == "assignment":
            return self.type_of(expr.children[0], scopes, ctx)
        if kind == "conditional":
            for branch in expr.children[1:]:
                t = self.type_of(branch, scopes, ctx)
                if t is not None and t.kind == "value" and t.name != "null":
                    return t
            return None
        if kind == "array_access":
            t = self.type_of(expr.children[0], scopes, ctx)
            if t is not None and t.kind == "value" and t.name.endswith("[]"):
                return TypeRef("value", t.name[:-2])
            return None
        if kind == "unary_op":
            if expr.op == "!":
                return TypeRef("value", "boolean")
            return self.type_of(expr.children[0], scopes, ctx)
        if kind == "binary_op":
            return self._binary_type(expr, scopes, ctx)
        return None

    def _type_of_name(self, name, scopes, ctx) -> Optional[TypeRef]:
        if name == "this":
            return TypeRef("value", ctx.enclosing[0]) if ctx.enclosing else None
        if name == "super":
            sup = self._super_of(ctx)
            return TypeRef("value", sup) if sup else None
        declared = scopes.lookup(name) if scopes is not None else None
        if declared is not None:
            if not declared:
                return None
            return TypeRef("value", declared)
        for enc in ctx.enclosing:
            hit = self.tree.field_type(enc, name)
            if hit is not None:
                ftype, owner = hit
                return TypeRef("value", self._normalize_in(ftype, owner))
        for member, owner in ctx.static_single:
            if member == name:
                owner_fq = self.tree.resolve_global(owner) or owner
                hit = self.tree.field_type(owner_fq, name) if owner_fq in self.tree else None
                if hit is not None:
                    return TypeRef("value", self._normalize_in(hit[0], hit[1]))
        fq = resolve_type_name(self.tree, name, ctx)
        if fq is not None:
            return TypeRef("type", fq)
        if name[:1].islower():
            return TypeRef("package", name)
        return None

    def _normalize_in(self, type_text: str, owner: TypeInfo) -> str:
        if owner.unit is not None:
            return self.normalize(type_text, TypeContext.for_type(owner.unit, owner.fq_name))
        base, dims = strip_dims(type_text)
        fq = self.tree.resolve_global(base, owner.package)
        return (fq or base) + "[]" * dims

    def _type_of_field(self, expr, scopes, ctx) -> Optional[TypeRef]:
        recv = self.type_of(expr.receiver, scopes, ctx)
        name = expr.name
        if recv is None:
            return None
        if recv.kind == "package":
            full = f"{recv.name}.{name}"
            if full in self.tree:
                return TypeRef("type", full)
            return TypeRef("package", full) if name[:1].islower() else None
        if recv.kind == "type":
            nested = f"{recv.name}.{name}"
            if nested in self.tree:
                return TypeRef("type", nested)
        if recv.name.endswith("[]") and name == "length":
            return TypeRef("value", "int")
        if recv.name in self.tree:
            hit = self.tree.field_type(recv.name, name)
            if hit is not None:
                return TypeRef("value", self._normalize_in(hit[0], hit[1]))
        return None

    def _binary_type(self, expr, scopes, ctx) -> Optional[TypeRef]:
        op = expr.op
        if op in ("==", "!=", "<", ">", "<=", ">=", "&&", "||", "instanceof"):
            return TypeRef("value", "boolean")
        left = self.type_of(expr.children[0], scopes, ctx)
        right = self.type_of(expr.children[1], scopes, ctx)
        names = [t.name for t in (left, right) if t is not None and t.kind == "value"]
        if op == "+" and any(simple_name(n) == "String" for n in names):
            return TypeRef("value", "String")
        if op in ("<<", ">>", ">>>"):
            return left
        if len(names) == 2 and all(n in _NUMERIC_RANK for n in names):
            wide = max(names, key=_NUMERIC_RANK.__getitem__)
            return TypeRef("value", wide if _NUMERIC_RANK[wide] >= 2 else "int")
        if len(names) == 2 and all(n == "boolean" for n in names):
            return TypeRef("value", "boolean")
        return None

    def _common_return(self, candidates: set[MethodId]) -> Optional[TypeRef]:
        types = set()
        for mid in candidates:
            info = self.tree.types.get(mid.class_fqname)
            if info is None:
                continue
            for m in info.methods.get(mid.method_name, ()):
                if m.id == mid:
                    types.add(self._normalize_in(m.return_type, info))
        if len(types) == 1:
            t = types.pop()
            return None if t == "void" else TypeRef("value", t)
        return None

    def _super_of(self, ctx: TypeContext) -> Optional[str]:
        if not ctx.enclosing or ctx.enclosing[0] not in self.tree:
            return None
        supers = self.tree.types[ctx.enclosing[0]].resolved_supers
        return supers[0] if supers else None

    def _creator_type(self, expr, scopes, ctx) -> Optional[str]:
        if expr.has_receiver:
            outer = self.type_of(expr.receiver, scopes, ctx)
            if outer is not None and outer.kind == "value":
                for anc in self.tree.ancestors(outer.name):
                    if f"{anc}.{expr.name}" in self.tree:
                        return f"{anc}.{expr.name}"
        return resolve_type_name(self.tree, expr.name, ctx)

    # -- calls -------------------------------------------------------------

    def _collect(self, owners: Iterable[str], name: str) -> list[MethodInfo]:
        out = []
        seen = set()
        for owner in owners:
            info = self.tree.types.get(owner)
            if info is None:
                continue
            for m in info.methods.get(name, ()):
                if m.id not in seen:
                    seen.add(m.id)
                    out.append(m)
        return out

    def _virtual_owners(self, fq: str) -> list[str]:
        return list(self.tree.ancestors(fq)) + list(self.tree.descendants(fq))

    def candidates(self, call: ExprNode, scopes: ScopeTable,
                   ctx: TypeContext) -> list[MethodInfo]:
        """All methods a call may reach, before arity and type filtering."""
        if call.kind == "new_object":
            if call.name.endswith("[]"):
                return []
            fq = self._creator_type(call, scopes, ctx)
            return self._collect([fq], CONSTRUCTOR) if fq else []
        name = call.name
        if not call.has_receiver and name in ("this", "super"):
            target = ctx.enclosing[0] if name == "this" and ctx.enclosing else self._super_of(ctx)
            return self._collect([target], CONSTRUCTOR) if target else []
        if call.has_receiver:
            recv = call.receiver
            if recv.kind == "var_ref" and recv.name == "super":
                sup = self._super_of(ctx)
                return self._collect(self.tree.ancestors(sup), name) if sup else []
            rtype = self.type_of(recv, scopes, ctx)
            if rtype is None or rtype.kind == "package":
                return []
            if rtype.kind == "type":
                return self._collect(self.tree.ancestors(rtype.name), name)
            if rtype.name not in self.tree:
                return []
            return self._collect(self._virtual_owners(rtype.name), name)
        for enc in ctx.enclosing:
            found = self._collect(self._virtual_owners(enc), name)
            if found:
                return found
        owners = [owner for member, owner in ctx.static_single if member == name]
        owners += list(ctx.static_on_demand)
        resolved = []
        for owner in owners:
            fq = owner if owner in self.tree else self.tree.resolve_global(owner)
            if fq is not None:
                resolved.extend(self.tree.ancestors(fq))
        return self._collect(resolved, name)

    def resolve_call(self, call: ExprNode, scopes: ScopeTable,
                     ctx: TypeContext) -> set[MethodId]:
        """Candidate methods for a call site; empty when unresolvable."""
        if call.kind not in ("method_call", "new_object"):
            return set()
        try:
            found = self.candidates(call, scopes, ctx)
        except RecursionError:
            return set()
        nargs = len(call.args)
        fitting = [m for m in found if arity_fits(m.params, nargs)]
        if not fitting:
            return set()
        arg_types = []
        for arg in call.args:
            try:
                t = self.type_of(arg, scopes, ctx)
            except RecursionError:
                t = None
            arg_types.append(t.name if t is not None and t.kind == "value" else None)
        scored = [(match_score(m.params, arg_types), m) for m in fitting]
        best = max(score for score, _ in scored)
        return {m.id for score, m in scored if score == best}


def arity_fits(params: tuple[str, ...], nargs: int) -> bool:
    """Exact arity, or a trailing array parameter absorbing varargs."""
    if len(params) == nargs:
        return True
    return bool(params) and params[-1].endswith("[]") and nargs >= len(params) - 1


def param_for_position(params: tuple[str, ...], pos: int) -> Optional[int]:
    """Declared parameter index that receives argument ``pos``."""
    if pos < len(params):
        return pos
    if params and params[-1].endswith("[]"):
        return len(params) - 1
    return None


def _compatible(arg: str, param: str) -> bool:
    if arg == "null":
        return strip_dims(param)[0] not in PRIMITIVE_CODES or param.endswith("[]")
    return simple_name(arg) == simple_name(param)


def match_score(params: tuple[str, ...], arg_types: list[Optional[str]]) -> int:
    """Number of arguments whose known static type matches textually."""
    score = 0
    for pos, arg in enumerate(arg_types):
        if arg is None:
            continue
        idx = param_for_position(params, pos)
        if idx is None:
            continue
        param = params[idx]
        if idx == len(params) - 1 and len(arg_types) != len(params) and param.endswith("[]"):
            param = param[:-2]
        if _compatible(arg, param):
            score += 1
    return score


def resolve_call(call: ExprNode, scopes: ScopeTable,
                 imports: Union[TypeContext, dict, None],
                 tree: PackageTree) -> set[MethodId]:
    """Functional entry point; ``imports`` may be a context or simple->fq map."""
    if imports is None:
        ctx = TypeContext()
    elif isinstance(imports, TypeContext):
        ctx = imports
    else:
        ctx = TypeContext(single=tuple(sorted(imports.items())))
    return CallResolver(tree).resolve_call(call, scopes or ScopeTable(), ctx)
