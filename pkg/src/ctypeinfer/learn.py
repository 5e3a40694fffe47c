"""ID3 decision trees over (feature, word) membership tests."""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Optional, Sequence, Union

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_consistent_length, check_min_items, check_segmentation
from .features import FEATURE_LABELS, FEATURE_NAMES, FeatureVector, featurize_expr
from .frontend import ExprNode, parse_expression
from .registry import LABEL_ORDER, CType

DEFAULT_MIN_ITEMS = 10
TIE_EPS = 1e-12


@dataclass(frozen=True)
class Sample:
    features: FeatureVector
    label: CType


@dataclass(frozen=True)
class LearnerConfig:
    min_items: int = DEFAULT_MIN_ITEMS

    def __post_init__(self):
        check_min_items(self.min_items)


@dataclass(frozen=True)
class Leaf:
    label: CType


@dataclass(frozen=True)
class Node:
    feature: str
    word: str
    present: "DecisionTree"
    absent: "DecisionTree"

    def __post_init__(self):
        if self.feature not in FEATURE_NAMES:
            raise ValueError(f"unknown feature {self.feature!r}")


DecisionTree = Union[Leaf, Node]


# -- entropy ----------------------------------------------------------------------


def _label_key(label: Hashable):
    if isinstance(label, CType):
        return (0, label.index, "")
    return (1, 0, str(label))


def _entropy_from_counts(counts: Sequence[int]) -> float:
    total = sum(counts)
    h = 0.0
    for c in counts:
        if c:
            p = c / total
            h -= p * math.log2(p)
    return h


def _ordered_counts(labels: Iterable[Hashable]) -> list[int]:
    counter = Counter(labels)
    return [counter[k] for k in sorted(counter, key=_label_key)]


def set_entropy(labels: Iterable[Hashable]) -> float:
    counts = _ordered_counts(labels)
    if not counts:
        raise ValueError("entropy of an empty set is undefined")
    return _entropy_from_counts(counts)


def split_entropy(partition: Sequence[Iterable[Hashable]]) -> float:
    """Size-weighted mean entropy of the non-empty parts."""
    parts = [_ordered_counts(p) for p in partition]
    total = sum(sum(p) for p in parts)
    if total == 0:
        raise ValueError("split with no items")
    return sum(sum(p) / total * _entropy_from_counts(p) for p in parts if sum(p))


# -- training --------------------------------------------------------------------------


def _counts_vector(labels: Iterable[CType]) -> np.ndarray:
    vec = np.zeros(len(LABEL_ORDER), dtype=np.int64)
    for label in labels:
        vec[label.index] += 1
    return vec


def _vec_entropy(vec: np.ndarray) -> float:
    return _entropy_from_counts([int(c) for c in vec])


def _candidate_counts(samples: Sequence[Sample]) -> dict[tuple[int, str], np.ndarray]:
    table: dict[tuple[int, str], np.ndarray] = {}
    for s in samples:
        idx = s.label.index
        for fi, feature in enumerate(FEATURE_NAMES):
            for word in s.features.get(feature):
                vec = table.get((fi, word))
                if vec is None:
                    vec = table[(fi, word)] = np.zeros(len(LABEL_ORDER), dtype=np.int64)
                vec[idx] += 1
    return table


def _scored_tests(samples: Sequence[Sample]) -> list[tuple[float, int, str, bool]]:
    total = _counts_vector(s.label for s in samples)
    n = int(total.sum())
    out = []
    for (fi, word), present in _candidate_counts(samples).items():
        absent = total - present
        k = int(present.sum())
        h = k / n * _vec_entropy(present)
        if n - k:
            h += (n - k) / n * _vec_entropy(absent)
        out.append((h, fi, word, k < n))
    return out


def evaluate_tests(samples: Sequence[Sample]) -> list[tuple[float, int, str]]:
    """(split entropy, feature index, word) for every candidate test."""
    return [(h, fi, word) for h, fi, word, _ in _scored_tests(samples)]


def _argmin(scored) -> tuple[str, str]:
    lowest = min(t[0] for t in scored)
    fi, word = min((t[1], t[2]) for t in scored if t[0] <= lowest + TIE_EPS)
    return FEATURE_NAMES[fi], word


def best_split(samples: Sequence[Sample]) -> Optional[tuple[str, str]]:
    """Test with minimal split entropy, or None if nothing beats the parent."""
    if not samples:
        raise ValueError("best_split needs at least one sample")
    parent = set_entropy(s.label for s in samples)
    scored = evaluate_tests(samples)
    if not scored or min(h for h, _, _ in scored) >= parent - TIE_EPS:
        return None
    return _argmin(scored)


def fallback_split(samples: Sequence[Sample]) -> Optional[tuple[str, str]]:
    """Lowest-entropy test that separates at least one sample from the rest.

    Used when no test lowers entropy (XOR-like data). None only when every
    sample carries the same words for every feature.
    """
    scored = [t for t in _scored_tests(samples) if t[3]]
    return _argmin(scored) if scored else None


def majority_label(labels: Iterable[CType]) -> CType:
    counts = Counter(labels)
    if not counts:
        raise ValueError("no labels")
    return min(counts, key=lambda c: (-counts[c], c.index))


def id3_train(samples: Sequence[Sample], config: LearnerConfig = LearnerConfig()) -> DecisionTree:
    if not samples:
        raise ValueError("cannot train on an empty sample set")
    return _grow(list(samples), config.min_items)


def _grow(samples: list[Sample], min_items: int) -> DecisionTree:
    labels = [s.label for s in samples]
    if len(samples) < min_items or len(set(labels)) == 1:
        return Leaf(majority_label(labels))
    test = best_split(samples) or fallback_split(samples)
    if test is None:
        return Leaf(majority_label(labels))
    feature, word = test
    present = [s for s in samples if word in s.features.get(feature)]
    absent = [s for s in samples if word not in s.features.get(feature)]
    return Node(feature, word, _grow(present, min_items), _grow(absent, min_items))


def classify(tree: DecisionTree, fv: FeatureVector) -> CType:
    node = tree
    while isinstance(node, Node):
        node = node.present if node.word in fv.get(node.feature) else node.absent
    return node.label


def tree_depth(tree: DecisionTree) -> int:
    if isinstance(tree, Leaf):
        return 0
    return 1 + max(tree_depth(tree.present), tree_depth(tree.absent))


def tree_size(tree: DecisionTree) -> int:
    if isinstance(tree, Leaf):
        return 1
    return 1 + tree_size(tree.present) + tree_size(tree.absent)


def paths_have_distinct_tests(tree: DecisionTree, seen=frozenset()) -> bool:
    if isinstance(tree, Leaf):
        return True
    key = (tree.feature, tree.word)
    if key in seen:
        return False
    seen = seen | {key}
    return (paths_have_distinct_tests(tree.present, seen)
            and paths_have_distinct_tests(tree.absent, seen))


# -- serialization ------------------------------------------------------------------


def tree_to_dict(tree: DecisionTree) -> dict:
    if isinstance(tree, Leaf):
        return {"leaf": tree.label.label}
    return {"feature": tree.feature, "word": tree.word,
            "present": tree_to_dict(tree.present),
            "absent": tree_to_dict(tree.absent)}


def tree_from_dict(data: dict) -> DecisionTree:
    if "leaf" in data:
        return Leaf(CType.parse(data["leaf"]))
    return Node(data["feature"], data["word"],
                tree_from_dict(data["present"]), tree_from_dict(data["absent"]))


def tree_to_json(tree: DecisionTree) -> str:
    return json.dumps(tree_to_dict(tree), indent=1, sort_keys=True) + "\n"


def tree_from_json(text: str) -> DecisionTree:
    return tree_from_dict(json.loads(text))


_LABEL_FEATURES = {v: k for k, v in FEATURE_LABELS.items()}
_TEST_RE = re.compile(r'(if|elif) ("(?:[^"\\]|\\.)*") in (\w+):')
_LEAF_RE = re.compile(r"ctype = (\w+)")


def tree_to_rules(tree: DecisionTree, indent: str = "  ") -> str:
    """Nested if/elif/else listing; parses back with :func:`tree_from_rules`."""
    lines: list[str] = []

    def emit(node: DecisionTree, depth: int):
        pad = indent * depth
        if isinstance(node, Leaf):
            lines.append(f"{pad}ctype = {node.label.label}")
            return
        keyword = "if"
        while isinstance(node, Node):
            lines.append(f"{pad}{keyword} {json.dumps(node.word)} in "
                         f"{FEATURE_LABELS[node.feature]}:")
            emit(node.present, depth + 1)
            keyword = "elif"
            node = node.absent
        lines.append(f"{pad}else:")
        emit(node, depth + 1)

    emit(tree, 0)
    return "\n".join(lines) + "\n"


def tree_from_rules(text: str, indent: str = "  ") -> DecisionTree:
    rows = []
    for raw in text.splitlines():
        if not raw.strip():
            continue
        stripped = raw.lstrip(" ")
        depth, rem = divmod(len(raw) - len(stripped), len(indent))
        if rem:
            raise ValueError(f"bad indentation: {raw!r}")
        rows.append((depth, stripped))
    pos = 0

    def block(depth: int) -> DecisionTree:
        nonlocal pos
        if pos >= len(rows) or rows[pos][0] != depth:
            raise ValueError(f"expected a block at depth {depth}")
        line = rows[pos][1]
        m = _LEAF_RE.fullmatch(line)
        if m:
            pos += 1
            return Leaf(CType.parse(m[1]))
        tests = []
        while True:
            m = _TEST_RE.fullmatch(rows[pos][1]) if pos < len(rows) else None
            if m is None or rows[pos][0] != depth or (m[1] == "if") != (not tests):
                break
            pos += 1
            feature = _LABEL_FEATURES.get(m[3])
            if feature is None:
                raise ValueError(f"unknown feature {m[3]!r}")
            tests.append((feature, json.loads(m[2]), block(depth + 1)))
        if not tests or pos >= len(rows) or rows[pos] != (depth, "else:"):
            raise ValueError(f"malformed rule near line {pos + 1}")
        pos += 1
        node = block(depth + 1)
        for feature, word, present in reversed(tests):
            node = Node(feature, word, present, node)
        return node

    tree = block(0)
    if pos != len(rows):
        raise ValueError(f"trailing rule text at line {pos + 1}")
    return tree


# -- estimator -------------------------------------------------------------------------


def _as_ctype(label) -> CType:
    return label if isinstance(label, CType) else CType.parse(str(label))


class CTypeClassifier(ClassifierMixin, BaseEstimator):
    """ID3 classifier; X holds FeatureVectors, expression nodes or source text."""

    def __init__(self, min_items: int = DEFAULT_MIN_ITEMS, segmentation: str = "literal"):
        self.min_items = min_items
        self.segmentation = segmentation

    def _features(self, X, mode) -> list[FeatureVector]:
        out = []
        for item in X:
            if isinstance(item, FeatureVector):
                out.append(item)
            elif isinstance(item, ExprNode):
                out.append(featurize_expr(item, mode))
            elif isinstance(item, str):
                out.append(featurize_expr(parse_expression(item), mode))
            else:
                raise TypeError(f"unsupported sample type {type(item).__name__}")
        return out

    def fit(self, X, y):
        min_items = check_min_items(self.min_items)
        mode = check_segmentation(self.segmentation)
        X = list(X)
        y = list(y)
        check_consistent_length(X, y)
        labels = [_as_ctype(v) for v in y]
        samples = [Sample(fv, lab) for fv, lab in zip(self._features(X, mode), labels)]
        self.tree_ = id3_train(samples, LearnerConfig(min_items))
        self.classes_ = np.array([c.label for c in LABEL_ORDER if c in set(labels)], dtype=object)
        self.segmentation_ = mode
        return self

    def predict_ctype(self, X) -> list[CType]:
        check_is_fitted(self, "tree_")
        return [classify(self.tree_, fv) for fv in self._features(X, self.segmentation_)]

    def predict(self, X) -> np.ndarray:
        return np.array([c.label for c in self.predict_ctype(X)], dtype=object)

    def rules(self) -> str:
        check_is_fitted(self, "tree_")
        return tree_to_rules(self.tree_)
