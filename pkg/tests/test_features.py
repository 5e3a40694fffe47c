import heapq
import re

import pytest
from golden import SEGMENTATION
from hypothesis import assume, given, settings, strategies as st

from ctypeinfer.extract import Occurrence
from ctypeinfer.features import (FEATURE_NAMES, DepGraph, DepNode, ExpressionFeaturizer,
                                 FeatureVector, build_dependency_graph, featurize,
                                 featurize_expr, rank_identifiers, segment_identifier,
                                 top_words)
from ctypeinfer.frontend import parse_expression
from ctypeinfer.registry import CType
from ctypeinfer.resolve import MethodId


def graph(text):
    return build_dependency_graph(parse_expression(text))


def edge_texts(g):
    return {(g.nodes[s].text, g.nodes[d].text) for s, d in g.edges}


# -- dependency graph ---------------------------------------------------------------


def test_graph_call_with_receiver_and_argument():
    g = graph("config.getPath(i)")
    assert sorted(n.text for n in g.nodes) == ["config", "getPath()", "i"]
    assert edge_texts(g) == {("config", "getPath()"), ("i", "getPath()")}
    assert g.nodes[g.top].text == "getPath()"


def test_graph_binary_operator():
    g = graph("a + b")
    assert edge_texts(g) == {("a", "+"), ("b", "+")}
    assert g.nodes[g.top] == DepNode("operator", "+")


def test_graph_constant():
    g = graph('"x"')
    assert g.nodes == (DepNode("constant", '"x"'),) and not g.edges


@pytest.mark.parametrize("text,edges,top", [
    ("a.b", {("a", "b")}, "b"),
    ("-n", {("n", "-")}, "-"),
    ("b = a", {("a", "b")}, "b"),
    ("f()", set(), "f()"),
    ("(int) w", {("w", "(int)")}, "(int)"),
    ("c ? x : y", {("x", "?:"), ("y", "?:")}, "?:"),
    ("new File(dir)", {("dir", "File()")}, "File()"),
    ("arr[k]", {("arr", "[]"), ("k", "[]")}, "[]"),
])
def test_graph_rules(text, edges, top):
    g = graph(text)
    assert edge_texts(g) == edges
    assert g.nodes[g.top].text == top


def _reaches_top(g):
    seen, stack = {g.top}, [g.top]
    while stack:
        for p in g.producers(stack.pop()):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


_leaf = st.sampled_from(["a", "path", "cfg", "x", '"s"', "3"])


def _exprs():
    return st.recursive(
        _leaf,
        lambda sub: st.one_of(
            st.builds("{}.{}".format, sub.filter(lambda s: s[0].isalpha()), st.sampled_from(["f", "g"])),
            st.builds("({} + {})".format, sub, sub),
            st.builds("get({}, {})".format, sub, sub),
            st.builds("new File({})".format, sub),
            st.builds("(c ? {} : {})".format, sub, sub),
            st.builds("({} = {})".format, st.sampled_from(["v", "w"]), sub),
        ),
        max_leaves=8)


@given(_exprs())
@settings(max_examples=150, deadline=None)
def test_graph_acyclic_and_connected(text):
    g = graph(text)
    assert g.is_acyclic()
    if "c ?" not in text:
        assert _reaches_top(g) == set(range(len(g.nodes)))


# -- ranking --------------------------------------------------------------------------------


def distance_oracle(g: DepGraph):
    """Identifier layers by minimal count of identifiers on a path to the top."""
    best = {g.top: 1 if g.nodes[g.top].kind == "identifier" else 0}
    heap = [(best[g.top], g.top)]
    while heap:
        d, i = heapq.heappop(heap)
        if d > best[i]:
            continue
        for p in g.producers(i):
            nd = d + (g.nodes[p].kind == "identifier")
            if nd < best.get(p, 1 << 30):
                best[p] = nd
                heapq.heappush(heap, (nd, p))
    rank = {}
    for i, d in best.items():
        if g.nodes[i].kind == "identifier":
            t = g.nodes[i].ident
            rank[t] = min(rank.get(t, d), d)
    return tuple(frozenset(t for t, r in rank.items() if r == k) for k in (1, 2, 3))


@pytest.mark.parametrize("text,primary,secondary,ternary", [
    ("config.getPath(i)", {"getPath"}, {"config", "i"}, set()),
    ("x", {"x"}, set(), set()),
    ("leftButtonWidth + leftWidth", {"leftButtonWidth", "leftWidth"}, set(), set()),
    ("a.b.c.d.e", {"e"}, {"d"}, {"c"}),
    ('"/home/" + user.getName() + "/x"', {"getName"}, {"user"}, set()),
    ("42", set(), set(), set()),
])
def test_rank_examples(text, primary, secondary, ternary):
    g = graph(text)
    r = rank_identifiers(g)
    assert (r.primary, r.secondary, r.ternary) == (primary, secondary, ternary)
    assert r.layers() == distance_oracle(g)


@given(_exprs())
@settings(max_examples=200, deadline=None)
def test_rank_matches_distance_oracle(text):
    g = graph(text)
    r = rank_identifiers(g)
    assert r.layers() == distance_oracle(g)
    assert not (r.primary & r.secondary or r.primary & r.ternary or r.secondary & r.ternary)


@st.composite
def random_dags(draw):
    n = draw(st.integers(1, 14))
    kinds = draw(st.lists(st.sampled_from(["identifier", "identifier", "operator", "constant"]),
                          min_size=n, max_size=n))
    names = draw(st.lists(st.sampled_from(["a", "b", "c", "d", "e", "f()"]), min_size=n, max_size=n))
    edges = set()
    for j in range(1, n):
        # every node feeds some earlier node, so everything reaches node 0
        edges.add((j, draw(st.integers(0, j - 1))))
        for extra in draw(st.lists(st.integers(0, j - 1), max_size=2)):
            edges.add((j, extra))
    nodes = tuple(DepNode(k, t if k == "identifier" else "+") for k, t in zip(kinds, names))
    return DepGraph(nodes, frozenset(edges), 0)


@given(random_dags())
@settings(max_examples=300, deadline=None)
def test_rank_random_graphs(g):
    assert g.is_acyclic()
    r = rank_identifiers(g)
    assert len(r.layers()) == 3
    assert r.layers() == distance_oracle(g)


# -- segmentation ----------------------------------------------------------------------------


_REFERENCE = re.compile(r"[A-Z][a-z]+|[A-Z]+|[a-z]+")


def reference_segment(name):
    return [m.lower() for part in re.split(r"[^A-Za-z]+", name) for m in _REFERENCE.findall(part)]


@pytest.mark.parametrize("name", sorted(SEGMENTATION))
def test_segmentation_golden(name):
    literal, camel = SEGMENTATION[name]
    assert segment_identifier(name) == literal == reference_segment(name)
    assert segment_identifier(name, "camel") == camel


def test_golden_suite_size():
    assert len(SEGMENTATION) >= 20


_identifiers = st.from_regex(r"[A-Za-z_$][A-Za-z0-9_$]{0,15}", fullmatch=True)


@given(_identifiers)
def test_segmentation_matches_reference(name):
    assert segment_identifier(name) == reference_segment(name)


def _is_subsequence(needle, hay):
    it = iter(hay)
    return all(c in it for c in needle)


@given(_identifiers, st.sampled_from(["literal", "camel"]))
def test_segmentation_tokens_are_lowercase_subsequence(name, mode):
    tokens = segment_identifier(name, mode)
    letters = "".join(c for c in name if c.isascii() and c.isalpha()).lower()
    assert all(t and t.isascii() and t.isalpha() and t.islower() for t in tokens)
    assert "".join(tokens) == letters
    assert _is_subsequence("".join(tokens), letters)


_words = st.lists(st.from_regex(r"[a-z]{1,6}", fullmatch=True), min_size=1, max_size=4)


@given(_words, st.sampled_from(["literal", "camel"]))
def test_camel_and_snake_agree(words, mode):
    # one-letter inner words would create adjacent capitals
    assume(all(len(w) > 1 for w in words[1:-1]))
    camel = words[0] + "".join(w.capitalize() for w in words[1:])
    snake = "_".join(words)
    assert segment_identifier(camel, mode) == segment_identifier(snake, mode) == words


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        segment_identifier("abc", "fancy")


# -- feature vectors ------------------------------------------------------------------------


def two_step_oracle(text, mode="literal"):
    r = rank_identifiers(graph(text))
    def ends(names):
        toks = [reference_segment(n) if mode == "literal" else segment_identifier(n, mode)
                for n in names]
        return {t[0] for t in toks if t}, {t[-1] for t in toks if t}
    pf, pl = ends(r.primary)
    sf, sl = ends(r.secondary)
    return FeatureVector(frozenset(pf), frozenset(pl), frozenset(sf), frozenset(sl))


def test_featurize_get_path():
    fv = featurize_expr(parse_expression("config.getPath(i)"))
    assert fv == FeatureVector(frozenset({"get"}), frozenset({"path"}),
                               frozenset({"config", "i"}), frozenset({"config", "i"}))
    assert fv == two_step_oracle("config.getPath(i)")


def test_featurize_single_token():
    fv = featurize_expr(parse_expression("port"))
    assert fv.primary_first_words == fv.primary_last_words == {"port"}
    assert not fv.secondary_first_words and not fv.secondary_last_words


def test_featurize_constant_is_empty():
    fv = featurize_expr(parse_expression('"usr/local"'))
    assert all(not fv.get(f) for f in FEATURE_NAMES)


def test_ternary_identifiers_unused():
    fv = featurize_expr(parse_expression("a.b.c"))
    assert fv.words() == {"b", "c"}


@given(_exprs(), st.sampled_from(["literal", "camel"]))
@settings(max_examples=100, deadline=None)
def test_featurize_pure_and_matches_oracle(text, mode):
    expr = parse_expression(text)
    assert featurize_expr(expr, mode) == featurize_expr(expr, mode) == two_step_oracle(text, mode)


def test_feature_vector_json_roundtrip():
    fv = featurize_expr(parse_expression("dbURL + getHostName()"))
    assert FeatureVector.from_json(fv.to_json()) == fv


def test_featurizer_estimator():
    tr = ExpressionFeaturizer(segmentation="camel").fit()
    out = tr.transform(["getURL()", parse_expression("x")])
    assert out[0].primary_last_words == {"url"}
    assert tr.get_feature_names_out() == list(FEATURE_NAMES)
    with pytest.raises(ValueError):
        ExpressionFeaturizer(segmentation="bogus").fit()


# -- top words ---------------------------------------------------------------------------


def _occ(project, text, label=CType.PATH):
    expr = parse_expression(text)
    return Occurrence(project, "F.java", 1, MethodId.parse("java.io.File.<init>(LString;)V"),
                      0, label, expr, text, featurize(expr))


def test_top_words_counts_projects():
    occs = [_occ("p", "path"), _occ("p", "path"), _occ("q", "filePath")] + [_occ("p", "dir")] * 10
    occs += [_occ("p", "name"), _occ("q", "name")]
    occs.append(_occ("q", "port", CType.PORT))
    ranked = top_words(occs, CType.PATH)
    assert ranked[0] == ("path", 2)
    assert ("dir", 1) in ranked
    assert "port" not in dict(ranked)
    # project count first, then use count, then the word itself
    assert top_words(occs, CType.PATH, k=4) == [("path", 2), ("name", 2), ("dir", 1), ("file", 1)]


def test_top_words_on_generated_corpus(corpus_occurrences):
    top3 = {w for w, _ in top_words(corpus_occurrences, CType.PATH, k=3)}
    assert top3 == {"get", "path", "file"}
