import math
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.base import clone

from ctypeinfer.features import FEATURE_NAMES, FeatureVector
from ctypeinfer.learn import (CTypeClassifier, LearnerConfig, Leaf, Node, Sample, best_split,
                              classify, evaluate_tests, id3_train, majority_label,
                              paths_have_distinct_tests, set_entropy, split_entropy,
                              tree_depth, tree_from_json, tree_from_rules, tree_size,
                              tree_to_json, tree_to_rules)
from ctypeinfer.registry import LABEL_ORDER, CType

P, U, O = CType.PATH, CType.URL, CType.OTHER


def fv(**words):
    return FeatureVector(**{f: frozenset(words.get(f, ())) for f in FEATURE_NAMES})


def sample(label, **words):
    return Sample(fv(**words), label)


# -- entropy ----------------------------------------------------------------------


def test_set_entropy_examples():
    assert set_entropy([P] * 4) == 0.0
    assert set_entropy([P, U]) == 1.0
    assert set_entropy([P, P, P, U]) == pytest.approx(0.8112781245, abs=1e-6)
    with pytest.raises(ValueError):
        set_entropy([])


def test_split_entropy_examples():
    assert split_entropy([[P, P], [U, U]]) == 0.0
    assert split_entropy([[P, P, U, U], []]) == 1.0
    assert split_entropy([[P, P, P, U], [U, U]]) == pytest.approx(0.5409, abs=1e-4)
    assert split_entropy([[P, P, P, U], [U, U]]) == pytest.approx(4 / 6 * set_entropy([P, P, P, U]))
    with pytest.raises(ValueError):
        split_entropy([[], []])


@given(st.integers(1, 13), st.integers(1, 5))
def test_uniform_entropy_is_log_k(k, m):
    labels = [c for c in LABEL_ORDER[:k] for _ in range(m)]
    assert set_entropy(labels) == pytest.approx(math.log2(k))


@given(st.lists(st.sampled_from(LABEL_ORDER), min_size=1, max_size=40))
def test_entropy_bounds(labels):
    h = set_entropy(labels)
    k = len(set(labels))
    assert -1e-12 <= h <= math.log2(k) + 1e-12
    assert (h == 0) == (k == 1)


# -- split choice ----------------------------------------------------------------------


def test_best_split_port():
    samples = ([sample(CType.PORT, primary_last_words={"port"}, primary_first_words={"get"})] * 5
               + [sample(O, primary_last_words={w}, primary_first_words={"get"})
                  for w in ("count", "size", "total", "index", "limit")])
    assert best_split(samples) == ("primary_last_words", "port")


def test_best_split_none_when_pure():
    assert best_split([sample(P, primary_first_words={"a"}), sample(P)]) is None


def test_best_split_tie_prefers_earlier_feature_then_word():
    samples = [sample(P, secondary_last_words={"a"}, primary_last_words={"z"}),
               sample(U)]
    assert best_split(samples) == ("primary_last_words", "z")
    samples = [sample(P, primary_first_words={"b", "a"}), sample(U)]
    assert best_split(samples) == ("primary_first_words", "a")


def _oracle_entropy(labels):
    n = len(labels)
    return -sum(c / n * math.log2(c / n) for c in Counter(labels).values())


def oracle_tests(samples):
    """Every (feature index, word) test with its split entropy, by direct recount."""
    n = len(samples)
    out = {}
    for fi, f in enumerate(FEATURE_NAMES):
        for word in sorted({w for s in samples for w in s.features.get(f)}):
            yes = [s.label for s in samples if word in s.features.get(f)]
            no = [s.label for s in samples if word not in s.features.get(f)]
            h = sum(len(part) / n * _oracle_entropy(part) for part in (yes, no) if part)
            out[(fi, word)] = h
    return out


def _pick(tests):
    low = min(tests.values())
    fi, word = min(k for k, h in tests.items() if h <= low + 1e-12)
    return FEATURE_NAMES[fi], word


def oracle_root(samples):
    """Root test of a min_items=1 tree, or None for a leaf."""
    tests = oracle_tests(samples)
    parent = _oracle_entropy([s.label for s in samples])
    if not tests or len(set(s.label for s in samples)) == 1:
        return None
    if min(tests.values()) < parent - 1e-12:
        return _pick(tests)
    # nothing lowers entropy: fall back to tests that separate some samples
    separating = {(fi, w): h for (fi, w), h in tests.items()
                  if not all(w in s.features.get(FEATURE_NAMES[fi]) for s in samples)}
    return _pick(separating) if separating else None


_WORDS = ["a", "b", "c"]


@st.composite
def small_datasets(draw, max_samples=50):
    # at most 6 distinct (feature, word) tests: 2 features x 3 words
    features = draw(st.lists(st.sampled_from(FEATURE_NAMES), min_size=1, max_size=2, unique=True))
    labels = draw(st.lists(st.sampled_from([P, U, CType.HOST, O]), min_size=1, max_size=4, unique=True))
    n = draw(st.integers(1, max_samples))
    out = []
    for _ in range(n):
        words = {f: draw(st.sets(st.sampled_from(_WORDS), max_size=2)) for f in features}
        out.append(Sample(fv(**words), draw(st.sampled_from(labels))))
    return out


@given(small_datasets())
@settings(max_examples=300, deadline=None)
def test_root_matches_exhaustive_oracle(samples):
    assert len(oracle_tests(samples)) <= 6
    tree = id3_train(samples, LearnerConfig(min_items=1))
    want = oracle_root(samples)
    if want is None:
        assert isinstance(tree, Leaf)
    else:
        assert (tree.feature, tree.word) == want


@given(small_datasets())
@settings(max_examples=200, deadline=None)
def test_split_entropies_match_formula(samples):
    oracle = oracle_tests(samples)
    got = {(fi, w): h for h, fi, w in evaluate_tests(samples)}
    assert got.keys() == oracle.keys()
    for key, h in oracle.items():
        assert abs(got[key] - h) <= 1e-9


@given(small_datasets())
@settings(max_examples=100, deadline=None)
def test_chosen_split_is_minimal(samples):
    choice = best_split(samples)
    if choice is not None:
        tests = oracle_tests(samples)
        chosen = tests[(FEATURE_NAMES.index(choice[0]), choice[1])]
        assert all(chosen <= h + 1e-12 for h in tests.values())


# -- training -------------------------------------------------------------------------


def test_cutoff_below_min_items():
    nine = [sample(P, primary_last_words={"path"})] * 5 + [sample(U, primary_last_words={"url"})] * 4
    assert isinstance(id3_train(nine, LearnerConfig(10)), Leaf)
    assert id3_train(nine, LearnerConfig(10)) == Leaf(P)
    ten = nine + [sample(U, primary_last_words={"url"})]
    tree = id3_train(ten, LearnerConfig(10))
    assert isinstance(tree, Node)


def test_pure_training_set():
    assert id3_train([sample(P, primary_first_words={"x"})] * 20) == Leaf(P)


def test_depth_one_tree():
    samples = ([sample(CType.PORT, primary_last_words={"port"})] * 6
               + [sample(CType.HOST, primary_last_words={"host"})] * 6)
    tree = id3_train(samples)
    assert tree_depth(tree) == 1 and tree_size(tree) == 3
    assert {tree.present, tree.absent} == {Leaf(CType.PORT), Leaf(CType.HOST)}


def test_xor_data_still_split():
    samples = [sample(P, primary_first_words={"a"}), sample(P, primary_first_words={"b"}),
               sample(U, primary_first_words={"a", "b"}), sample(U)]
    assert best_split(samples) is None
    tree = id3_train(samples, LearnerConfig(1))
    assert all(classify(tree, s.features) == s.label for s in samples)


def test_identical_features_conflicting_labels_stop():
    samples = [sample(P, primary_first_words={"x"})] * 6 + [sample(U, primary_first_words={"x"})] * 6
    assert id3_train(samples, LearnerConfig(1)) == Leaf(P)


def test_majority_tie_uses_label_order():
    assert majority_label([U, P]) is P
    assert majority_label([O, CType.DAY, O, CType.DAY]) is CType.DAY
    with pytest.raises(ValueError):
        majority_label([])


def test_empty_training_rejected():
    with pytest.raises(ValueError):
        id3_train([])
    with pytest.raises(ValueError):
        LearnerConfig(0)


def test_fig7_style_classification():
    tree = Node("primary_last_words", "year", Leaf(CType.YEAR),
                Node("primary_last_words", "port",
                     Node("primary_first_words", "host", Leaf(U), Leaf(CType.PORT)),
                     Leaf(O)))
    assert classify(tree, fv(primary_last_words={"port"}, secondary_first_words={"get"})) is CType.PORT
    assert classify(tree, fv()) is O


@given(small_datasets())
@settings(max_examples=100, deadline=None)
def test_permutation_invariance(samples):
    shuffled = list(samples)
    random.Random(len(samples)).shuffle(shuffled)
    assert id3_train(samples, LearnerConfig(2)) == id3_train(shuffled, LearnerConfig(2))


@given(small_datasets())
@settings(max_examples=100, deadline=None)
def test_memorizes_consistent_data(samples):
    by_fv = {}
    consistent = []
    for s in samples:
        if by_fv.setdefault(s.features, s.label) == s.label:
            consistent.append(s)
    tree = id3_train(consistent, LearnerConfig(1))
    assert all(classify(tree, s.features) == s.label for s in consistent)
    assert paths_have_distinct_tests(tree)


@given(small_datasets(), st.integers(1, 12))
@settings(max_examples=100, deadline=None)
def test_serialization_roundtrip(samples, min_items):
    tree = id3_train(samples, LearnerConfig(min_items))
    assert tree_from_json(tree_to_json(tree)) == tree
    assert tree_from_rules(tree_to_rules(tree)) == tree
    assert paths_have_distinct_tests(tree)


def test_rules_listing_shape():
    tree = Node("primary_last_words", "port",
                Node("primary_first_words", "host", Leaf(U), Leaf(CType.PORT)), Leaf(O))
    assert tree_to_rules(tree) == (
        'if "port" in PrimaryLastWords:\n'
        '  if "host" in PrimaryFirstWords:\n'
        '    ctype = URL\n'
        '  else:\n'
        '    ctype = PORT\n'
        'else:\n'
        '  ctype = OTHER\n')


@pytest.mark.parametrize("bad", [
    "if \"a\" in Nope:\n  ctype = PATH\nelse:\n  ctype = URL\n",
    "if \"a\" in PrimaryLastWords:\n  ctype = PATH\n",
    "ctype = PATH\nctype = URL\n",
    "   ctype = PATH\n",
])
def test_rules_parse_errors(bad):
    with pytest.raises(ValueError):
        tree_from_rules(bad)


# -- estimator -----------------------------------------------------------------------------


def test_classifier_fit_predict():
    X = ["settings.getPort()", "serverPort", "port", "hostName", "getHost()", "host"] * 2
    y = ["PORT", "PORT", "PORT", "HOST", "HOST", "HOST"] * 2
    clf = CTypeClassifier(min_items=2).fit(X, y)
    pred = clf.predict(["remotePort", "localHost"])
    assert list(pred) == ["PORT", "HOST"]
    assert list(clf.classes_) == ["HOST", "PORT"]
    assert clf.score(X, y) == 1.0
    assert "PrimaryLastWords" in clf.rules()


def test_classifier_params_and_clone():
    clf = CTypeClassifier(min_items=3, segmentation="camel")
    assert clf.get_params() == {"min_items": 3, "segmentation": "camel"}
    twin = clone(clf)
    assert twin.get_params() == clf.get_params() and twin is not clf
    with pytest.raises(ValueError):
        CTypeClassifier(min_items=0).fit(["x"], ["PATH"])
    with pytest.raises(ValueError):
        CTypeClassifier().fit(["x", "y"], ["PATH"])


def test_classifier_unfitted():
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        CTypeClassifier().predict(["x"])


def test_classifier_accepts_feature_vectors():
    X = [fv(primary_last_words={"port"})] * 3 + [fv(primary_last_words={"path"})] * 3
    y = [CType.PORT] * 3 + [P] * 3
    clf = CTypeClassifier(min_items=1).fit(X, y)
    assert isinstance(clf.predict(X), np.ndarray)
    assert clf.predict_ctype(X) == y
