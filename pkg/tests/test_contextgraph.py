import math
import random
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import codewords.contextgraph as cgmod
from codewords.contextgraph import (
    WEIGHT_FLOOR,
    ContextualGraph,
    EmptyBoost,
    ExpandParams,
    HateLexicon,
    build_graph,
    compute_boost,
    edge_weight,
    expand_seed,
    expand_seed_detailed,
    pagerank,
    trim_by_df,
    union_graphs,
    variants,
)
from codewords.corpus import Corpus, CorpusStats
from codewords.errors import NotInVocabulary, ParameterError

from conftest import make_model
from oracles import dense_pagerank


def cluster_model(shared=False):
    # two tight clusters around seeds s1 and s2; optional shared neighbor x
    v = {
        "s1": [1, 0, 0, 0], "a1": [0.99, 0.1, 0, 0], "b1": [0.98, 0.15, 0, 0.05],
        "s2": [0, 1, 0, 0], "a2": [0.1, 0.99, 0, 0], "b2": [0.15, 0.98, 0.05, 0],
        "f1": [0, 0, 1, 0], "f2": [0, 0, 0.9, 0.3], "f3": [0, 0, 0.3, 0.9], "f4": [0, 0, 0, 1],
    }
    if shared:
        v["b1"], v["b2"] = [0, 0, 0.7, 0.7], [0, 0, 0.6, 0.8]
        v["x"] = [1, 1, 0, 0]
    return make_model(v)


def test_variants():
    assert variants("cat") == {"cat", "cats", "cates"}
    assert {"box", "boxes"} <= variants("boxes")
    lex = HateLexicon(["Skype", "skype", " google "])
    assert lex.base == ["skype", "google"]
    assert "skypes" in lex and "googles" in lex


def test_boost_disjoint_and_shared():
    lex = ["s1", "s2"]
    b = compute_boost(cluster_model(), lex, topn=2)
    assert dict(b) == {"a1": 1, "b1": 1, "a2": 1, "b2": 1}
    b = compute_boost(cluster_model(shared=True), lex, topn=2)
    assert dict(b) == {"a1": 1, "a2": 1, "x": 2}


def test_boost_empty():
    with pytest.warns(EmptyBoost):
        assert compute_boost(cluster_model(), ["zzz"], 5) == {}
    with pytest.warns(EmptyBoost):
        assert compute_boost(cluster_model(), [], 5) == {}


def test_edge_weight_examples():
    m = make_model({"u": [1, 0], "v": [0.42, math.sqrt(1 - 0.42**2)], "w": [0.5, math.sqrt(0.75)], "n": [-1, 0]},
                   freq={"u": 100, "v": 1})
    assert edge_weight(m, {}, "u", "v") == pytest.approx(0.42)
    assert edge_weight(m, {"v": 3}, "v", "u") == pytest.approx(0.42)
    assert edge_weight(m, {"u": 2}, "u", "w") == pytest.approx(9.7103, abs=1e-4)
    assert edge_weight(m, {"u": 2}, "u", "w") == pytest.approx(2 * math.log(100) + 0.5, abs=1e-12)
    assert edge_weight(m, {}, "u", "n") == WEIGHT_FLOOR
    with pytest.raises(NotInVocabulary):
        edge_weight(m, {}, "u", "q")


def test_build_graph_exhaustion():
    m = make_model({"w": [1, 0], "x": [1, 1]})
    for depth in (1, 2, 3):
        g = build_graph("w", m, depth, None, 5)
        assert set(g.vertices) == {"w", "x"}
        assert ("w", "x") in {(u, v) for u, v, _ in g.edges()}


def test_build_graph_chain():
    # gaps shrink along the chain, so each word's nearest neighbor is the next one
    angles = [0.0, 0.5, 0.8, 1.0, 1.1]
    m = make_model({f"c{i}": [math.cos(a), math.sin(a)] for i, a in enumerate(angles)})
    g = build_graph("c0", m, 2, None, 1)
    assert g.vertices == ["c0", "c1", "c2"]
    assert [(u, v) for u, v, _ in g.edges()] == [("c0", "c1"), ("c1", "c2")]


def test_build_graph_errors():
    m = make_model({"w": [1, 0], "x": [1, 1]})
    with pytest.raises(NotInVocabulary):
        build_graph("q", m, 1, None, 1)
    with pytest.raises(ParameterError):
        build_graph("w", m, 0, None, 1)
    with pytest.raises(ParameterError):
        build_graph("w", m, 1, None, 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4), st.integers(1, 3))
def test_build_graph_bound_and_single_expansion(seed, topn, depth):
    rng = np.random.default_rng(seed)
    m = make_model({f"w{i}": rng.normal(size=4) for i in range(60)})
    calls = []
    orig = cgmod.sim_by_word

    def counting(model, w, n):
        calls.append(w)
        return orig(model, w, n)

    cgmod.sim_by_word = counting
    try:
        g = build_graph("w0", m, depth, None, topn)
    finally:
        cgmod.sim_by_word = orig
    assert len(g) <= sum(topn**i for i in range(depth + 1))
    assert len(calls) == len(set(calls))
    assert all(v in m for v in g.vertices)
    assert all(w > 0 and math.isfinite(w) for _, _, w in g.edges())


def test_union():
    g1 = ContextualGraph()
    g1.add_edge("a", "b", 0.3)
    g2 = ContextualGraph()
    g2.add_edge("a", "b", 0.9)
    g3 = ContextualGraph()
    g3.add_edge("x", "y", 1.0)
    assert list(union_graphs([g1]).edges()) == list(g1.edges())
    assert union_graphs([g1, g2]).weight("a", "b") == 0.9
    assert len(union_graphs([g1, g3])) == 4
    assert len(union_graphs([])) == 0


def test_add_edge_rejects_bad_weights():
    g = ContextualGraph()
    for bad in (0.0, -1.0, float("nan"), float("inf")):
        with pytest.raises(ParameterError):
            g.add_edge("a", "b", bad)


def random_weighted_graph(seed, n_max=50):
    rng = random.Random(seed)
    n = rng.randint(1, n_max)
    g = ContextualGraph()
    nodes = [f"v{i}" for i in range(n)]
    for v in nodes:
        g.add_vertex(v)
    for u in nodes:
        for v in nodes:
            if u != v and rng.random() < 0.1:
                g.add_edge(u, v, rng.uniform(0.01, 10.0))
    return g


def test_pagerank_small_cases():
    g = ContextualGraph()
    g.add_vertex("v")
    assert pagerank(g).scores == {"v": 1.0}
    g = ContextualGraph()
    g.add_edge("a", "b", 2.0)
    g.add_edge("b", "a", 2.0)
    pr = pagerank(g).scores
    assert pr["a"] == pytest.approx(0.5, abs=1e-12) and pr["b"] == pytest.approx(0.5, abs=1e-12)
    assert pagerank(ContextualGraph()).scores == {}


def test_pagerank_params():
    g = random_weighted_graph(1)
    with pytest.raises(ParameterError):
        pagerank(g, d=1.0)
    with pytest.raises(ParameterError):
        pagerank(g, max_iter=0)
    res = pagerank(g, eps=1e-300, max_iter=3)
    assert not res.converged and res.iterations == 3


@pytest.mark.parametrize("seed", range(20))
def test_pagerank_oracle(seed):
    g = random_weighted_graph(seed)
    got = pagerank(g).scores
    want = dense_pagerank(g.vertices, list(g.edges()))
    assert sum(abs(got[v] - want[v]) for v in g.vertices) < 1e-8
    assert abs(sum(got.values()) - 1.0) < 1e-9
    assert all(s >= 0 for s in got.values())


def test_pagerank_teleport_oracle():
    g = random_weighted_graph(7)
    tele = {v: (i % 3) for i, v in enumerate(g.vertices)}
    got = pagerank(g, teleport=tele).scores
    want = dense_pagerank(g.vertices, list(g.edges()), teleport=[tele[v] for v in g.vertices])
    assert sum(abs(got[v] - want[v]) for v in g.vertices) < 1e-8


def scaled(g, c):
    out = ContextualGraph()
    for v in g.vertices:
        out.add_vertex(v)
    for u, v, w in g.edges():
        out.add_edge(u, v, w * c)
    return out


@pytest.mark.parametrize("seed", range(10))
def test_pagerank_scaling_invariance(seed):
    g = random_weighted_graph(seed)
    base = pagerank(g).scores
    # power-of-two factors scale without rounding, so equality is exact
    for c in (0.25, 2.0, 1024.0):
        assert pagerank(scaled(g, c)).scores == base
    for c in (3.0, 0.1, 7.77):
        other = pagerank(scaled(g, c)).scores
        assert max(abs(other[v] - base[v]) for v in base) < 1e-12


def test_trim_by_df():
    hate = CorpusStats(10, {"w": 4, "eq": 2, "slur": 5, "x": 1}, {})
    clean = CorpusStats(10, {"w": 1, "eq": 2, "slur": 0, "x": 3}, {})
    ranked = [("slur", 0.4), ("x", 0.3), ("w", 0.2), ("eq", 0.1)]
    assert trim_by_df(ranked, hate, clean, ["slurs"]) == ["w"]


def test_expand_lexicon_out_of_vocab():
    m = cluster_model()
    stats = CorpusStats(1, {"a": 1}, {"a": 1})
    with pytest.warns(EmptyBoost):
        assert expand_seed(["zzz"], m, stats, stats) == []
    with pytest.raises(ParameterError):
        expand_seed([], m, stats, stats)


def test_expand_excludes_lexicon_and_uses_both_passes():
    m = cluster_model()
    hate = Corpus.from_texts(["s1 a1 b1 s2 a2 b2 s1s"] * 3 + ["f1"]).stats
    clean = Corpus.from_texts(["f1 f2 f3 f4 b2"] * 3 + ["x"]).stats
    exp = expand_seed_detailed(["s1", "s2"], m, hate, clean, ExpandParams(topn=2, boost_topn=2))
    assert set(exp.words) == {"a1", "b1", "a2"}
    lex = HateLexicon(["s1", "s2"])
    assert not any(w in lex for w in exp.words)
    assert exp.first_pass and exp.second_pass and exp.converged


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_expand_never_returns_lexicon(seed):
    rng = random.Random(seed)
    words = [f"w{i}" for i in range(30)]
    vecs = {w: [rng.gauss(0, 1) for _ in range(4)] for w in words}
    vecs["w1s"] = vecs["w1"]
    m = make_model(vecs)
    texts_h = [" ".join(rng.choice(words + ["w1s"]) for _ in range(5)) for _ in range(30)]
    texts_c = [" ".join(rng.choice(words) for _ in range(5)) for _ in range(30)]
    lex = HateLexicon(rng.sample(words, 4) + ["w1"])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = expand_seed(lex, m, Corpus.from_texts(texts_h).stats, Corpus.from_texts(texts_c).stats)
    assert not any(w in lex for w in out)
    assert len(out) == len(set(out))
