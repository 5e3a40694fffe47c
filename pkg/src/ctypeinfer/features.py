"""Dependency graphs, identifier ranking, word segmentation and feature vectors."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .frontend import ExprNode, parse_expression
from ._validation import check_segmentation

FEATURE_NAMES = (
    "primary_first_words",
    "primary_last_words",
    "secondary_first_words",
    "secondary_last_words",
)
# display names used in rule listings
FEATURE_LABELS = {
    "primary_first_words": "PrimaryFirstWords",
    "primary_last_words": "PrimaryLastWords",
    "secondary_first_words": "SecondaryFirstWords",
    "secondary_last_words": "SecondaryLastWords",
}

MAX_RANK = 3


# -- dependency graph ------------------------------------------------------------


@dataclass(frozen=True)
class DepNode:
    kind: str  # identifier, operator, constant
    text: str
    origin: Optional[ExprNode] = field(default=None, compare=False, repr=False)

    @property
    def ident(self) -> str:
        return self.text[:-2] if self.text.endswith("()") else self.text


@dataclass(frozen=True)
class DepGraph:
    """Producer -> consumer edges over the terms of one expression."""

    nodes: tuple[DepNode, ...]
    edges: frozenset[tuple[int, int]]
    top: int

    def producers(self, i: int) -> list[int]:
        return sorted(src for src, dst in self.edges if dst == i)

    def consumers(self, i: int) -> list[int]:
        return sorted(dst for src, dst in self.edges if src == i)

    def is_acyclic(self) -> bool:
        indeg = Counter(dst for _, dst in self.edges)
        ready = [i for i in range(len(self.nodes)) if indeg[i] == 0]
        seen = 0
        while ready:
            i = ready.pop()
            seen += 1
            for j in self.consumers(i):
                indeg[j] -= 1
                if indeg[j] == 0:
                    ready.append(j)
        return seen == len(self.nodes)

    def describe(self) -> str:
        lines = [f"top: {self.nodes[self.top].text}"]
        for src, dst in sorted(self.edges):
            lines.append(f"{self.nodes[src].text} -> {self.nodes[dst].text}")
        return "\n".join(lines)


class _GraphBuilder:
    def __init__(self):
        self.nodes: list[DepNode] = []
        self.edges: set[tuple[int, int]] = set()

    def add(self, kind: str, text: str, origin: ExprNode) -> int:
        self.nodes.append(DepNode(kind, text, origin))
        return len(self.nodes) - 1

    def link(self, src: int, dst: int):
        self.edges.add((src, dst))

    def visit(self, e: ExprNode) -> int:
        kind = e.kind
        if kind == "constant":
            return self.add("constant", e.literal, e)
        if kind == "var_ref":
            return self.add("identifier", e.name, e)
        if kind == "field_access":
            src = self.visit(e.children[0])
            node = self.add("identifier", e.name, e)
            self.link(src, node)
            return node
        if kind in ("method_call", "new_object"):
            name = e.name
            if kind == "new_object":
                name = name.replace("[]", "").rsplit(".", 1)[-1]
            recv = self.visit(e.receiver) if e.receiver is not None else None
            arg_tops = [self.visit(a) for a in e.args]
            node = self.add("identifier", name + "()", e)
            if recv is not None:
                self.link(recv, node)
            for top in arg_tops:
                self.link(top, node)
            return node
        if kind == "assignment":
            target = self.visit(e.children[0])
            value = self.visit(e.children[1])
            self.link(value, target)
            return target
        if kind == "conditional":
            # the condition selects a branch but does not flow into the value
            self.visit(e.children[0])
            inputs = [self.visit(c) for c in e.children[1:]]
            text = "?:"
        elif kind == "cast":
            inputs = [self.visit(e.children[0])]
            text = f"({e.name})"
        elif kind == "array_access":
            inputs = [self.visit(c) for c in e.children]
            text = "[]"
        else:  # unary_op, binary_op
            inputs = [self.visit(c) for c in e.children]
            text = e.op
        node = self.add("operator", text, e)
        for src in inputs:
            self.link(src, node)
        return node


def build_dependency_graph(expr: ExprNode) -> DepGraph:
    b = _GraphBuilder()
    top = b.visit(expr)
    return DepGraph(tuple(b.nodes), frozenset(b.edges), top)


# -- identifier ranking ------------------------------------------------------------


@dataclass(frozen=True)
class RankedIdentifiers:
    primary: frozenset[str] = frozenset()
    secondary: frozenset[str] = frozenset()
    ternary: frozenset[str] = frozenset()

    def layers(self) -> tuple[frozenset[str], ...]:
        return (self.primary, self.secondary, self.ternary)


def rank_identifiers(g: DepGraph, max_rank: int = MAX_RANK) -> RankedIdentifiers:
    """Identifier layers walking producers from the top node.

    Operator and constant nodes are passed through without using up a
    layer. A name already placed in an earlier layer is not repeated.
    """
    visited: set[int] = set()

    def expand(frontier: Iterable[int]) -> list[int]:
        out: list[int] = []
        stack = sorted(set(frontier), reverse=True)
        while stack:
            i = stack.pop()
            if i in visited:
                continue
            visited.add(i)
            if g.nodes[i].kind == "identifier":
                out.append(i)
            else:
                stack.extend(sorted(g.producers(i), reverse=True))
        return out

    layers: list[frozenset[str]] = []
    seen_text: set[str] = set()
    frontier = expand([g.top])
    while frontier and len(layers) < max_rank:
        texts = {g.nodes[i].ident for i in frontier} - seen_text
        layers.append(frozenset(texts))
        seen_text |= texts
        frontier = expand(p for i in frontier for p in g.producers(i))
    layers += [frozenset()] * (3 - len(layers))
    return RankedIdentifiers(*layers[:3])


# -- segmentation ---------------------------------------------------------------------


def _is_upper(c: str) -> bool:
    return "A" <= c <= "Z"


def _is_lower(c: str) -> bool:
    return "a" <= c <= "z"


def _literal_chunks(name: str) -> list[str]:
    """Longest-match scan: Capitalized words, uppercase runs, lowercase runs."""
    out = []
    i, n = 0, len(name)
    while i < n:
        c = name[i]
        if _is_upper(c):
            j = i + 1
            if j < n and _is_lower(name[j]):
                while j < n and _is_lower(name[j]):
                    j += 1
            else:
                while j < n and _is_upper(name[j]):
                    j += 1
            out.append(name[i:j])
            i = j
        elif _is_lower(c):
            j = i + 1
            while j < n and _is_lower(name[j]):
                j += 1
            out.append(name[i:j])
            i = j
        else:
            i += 1
    return out


def segment_identifier(name: str, mode: str = "literal") -> list[str]:
    """Split an identifier into lowercase word tokens.

    ``literal`` applies the capitalized-word / uppercase-run pattern as is,
    so ``URLString`` gives ``urls``, ``tring``. ``camel`` hands the last
    capital of a run to the following lowercase word (``url``, ``string``).
    """
    mode = check_segmentation(mode)
    if mode == "literal":
        return [c.lower() for c in _literal_chunks(name)]
    out = []
    for part in _split_non_alpha(name):
        out.extend(c.lower() for c in _camel_part(part))
    return out


def _split_non_alpha(name: str) -> list[str]:
    parts, cur = [], []
    for c in name:
        if _is_upper(c) or _is_lower(c):
            cur.append(c)
        elif cur:
            parts.append("".join(cur))
            cur = []
    if cur:
        parts.append("".join(cur))
    return parts


def _camel_part(part: str) -> list[str]:
    out = []
    for chunk in _literal_chunks(part):
        prev = out[-1] if out else ""
        if (_is_lower(chunk[0]) and len(prev) > 1
                and all(_is_upper(c) for c in prev)):
            out[-1] = prev[:-1]
            out.append(prev[-1] + chunk)
        else:
            out.append(chunk)
    return out


# -- feature vectors ----------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureVector:
    primary_first_words: frozenset[str] = frozenset()
    primary_last_words: frozenset[str] = frozenset()
    secondary_first_words: frozenset[str] = frozenset()
    secondary_last_words: frozenset[str] = frozenset()

    def get(self, feature: str) -> frozenset[str]:
        return getattr(self, feature)

    def words(self) -> frozenset[str]:
        return frozenset().union(*(self.get(f) for f in FEATURE_NAMES))

    def to_json(self) -> dict:
        return {f: sorted(self.get(f)) for f in FEATURE_NAMES}

    @classmethod
    def from_json(cls, data: dict) -> "FeatureVector":
        return cls(**{f: frozenset(data.get(f, ())) for f in FEATURE_NAMES})


def _first_last(names: Iterable[str], mode: str) -> tuple[frozenset, frozenset]:
    first, last = set(), set()
    for name in names:
        tokens = segment_identifier(name, mode)
        if tokens:
            first.add(tokens[0])
            last.add(tokens[-1])
    return frozenset(first), frozenset(last)


def featurize_expr(expr: ExprNode, mode: str = "literal") -> FeatureVector:
    ranked = rank_identifiers(build_dependency_graph(expr))
    pf, pl = _first_last(ranked.primary, mode)
    sf, sl = _first_last(ranked.secondary, mode)
    return FeatureVector(pf, pl, sf, sl)


def featurize(occ, mode: str = "literal") -> FeatureVector:
    """Features of an occurrence (anything with ``.expr``) or a bare expression."""
    expr = occ if isinstance(occ, ExprNode) else occ.expr
    return featurize_expr(expr, mode)


def top_words(occurrences, label, k: Optional[int] = None) -> list[tuple[str, int]]:
    """Words ranked by the number of distinct projects using them for ``label``.

    Ties go to the word seen in more occurrences, then alphabetically.
    """
    projects: dict[str, set[str]] = {}
    uses: Counter = Counter()
    for occ in occurrences:
        if occ.label != label:
            continue
        fv = occ.features if occ.features is not None else featurize(occ)
        for word in fv.words():
            projects.setdefault(word, set()).add(occ.project)
            uses[word] += 1
    order = sorted(projects, key=lambda w: (-len(projects[w]), -uses[w], w))
    ranked = [(w, len(projects[w])) for w in order]
    return ranked if k is None else ranked[:k]


ExprLike = Union[ExprNode, str]


class ExpressionFeaturizer(TransformerMixin, BaseEstimator):
    """Maps expressions (nodes or source text) to FeatureVectors."""

    def __init__(self, segmentation: str = "literal"):
        self.segmentation = segmentation

    def fit(self, X: Sequence[ExprLike] = (), y=None):
        self.segmentation_ = check_segmentation(self.segmentation)
        self.feature_names_out_ = FEATURE_NAMES
        return self

    def transform(self, X: Sequence[ExprLike]) -> list[FeatureVector]:
        check_is_fitted(self, "segmentation_")
        out = []
        for item in X:
            expr = parse_expression(item) if isinstance(item, str) else item
            if not isinstance(expr, ExprNode):
                raise TypeError(f"expected expression, got {type(item).__name__}")
            out.append(featurize_expr(expr, self.segmentation_))
        return out

    def get_feature_names_out(self, input_features=None):
        return list(FEATURE_NAMES)
