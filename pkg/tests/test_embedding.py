import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codewords.corpus import Corpus
from codewords.embedding import (
    EmbeddingModel,
    cosine,
    load_vectors,
    ppmi,
    save_vectors,
    sim_by_word,
    train_count_model,
)
from codewords.errors import DegenerateVector, InputError, NotInVocabulary, ParameterError

from conftest import make_model


def brute_neighbors(model, w, topn):
    """Exhaustive scan ranked with exact rational arithmetic.

    Cosine order for a fixed query equals the order of sign(dot) * dot^2 / |v|^2,
    which is computed exactly from the float coordinates, so mathematical
    ties are exact ties here. Scores are reported as plain floats.
    """
    q = [Fraction(x) for x in model.vectors[model.vocab[w]]]
    qn = math.sqrt(float(sum(x * x for x in q)))
    keyed = []
    for v in model.words:
        if v == w:
            continue
        row = [Fraction(x) for x in model.vectors[model.vocab[v]]]
        n2 = sum(x * x for x in row)
        if n2 == 0:
            continue
        dot = sum(a * b for a, b in zip(q, row))
        key = (1 if dot >= 0 else -1) * dot * dot / n2
        keyed.append((-key, v, float(dot) / (qn * math.sqrt(float(n2)))))
    keyed.sort(key=lambda t: (t[0], t[1]))
    return [(v, s) for _, v, s in keyed[:topn]]


def test_cosine_examples():
    m = make_model({"a": [1, 1], "b": [1, 0], "c": [0, 1], "z": [0, 0]})
    assert cosine(m, "a", "a") == pytest.approx(1.0)
    assert cosine(m, "b", "c") == 0.0
    assert cosine(m, "a", "b") == pytest.approx(0.7071, abs=1e-4)
    assert abs(cosine(m, "a", "b") - 1 / math.sqrt(2)) < 1e-12
    with pytest.raises(NotInVocabulary) as ei:
        cosine(m, "a", "nope")
    assert ei.value.word == "nope"
    with pytest.raises(DegenerateVector):
        cosine(m, "a", "z")


def test_sim_by_word_small():
    m = make_model({"a": [1, 0], "b": [1, 1], "c": [0, 1]})
    assert sim_by_word(m, "a", 0) == []
    res = sim_by_word(m, "a", 10)
    assert [n.word for n in res] == ["b", "c"]
    with pytest.raises(NotInVocabulary):
        sim_by_word(m, "q", 3)
    with pytest.raises(ParameterError):
        sim_by_word(m, "a", -1)


def test_sim_by_word_tie_order():
    m = make_model({"q": [1, 0], "d": [1, 1], "b": [1, -1], "c": [2, 2], "a": [0, 1]})
    assert [n.word for n in sim_by_word(m, "q", 4)] == ["b", "c", "d", "a"]


def test_zero_vectors_skipped():
    m = make_model({"a": [1, 0], "b": [1, 1], "z": [0, 0]})
    assert [n.word for n in sim_by_word(m, "a", 5)] == ["b"]
    with pytest.raises(DegenerateVector):
        sim_by_word(m, "z", 2)


@pytest.mark.parametrize("seed", range(5))
def test_sim_by_word_matches_scan(random_model, seed):
    m = random_model(200, 8, seed)
    rng = random.Random(seed)
    for w in rng.sample(m.words, 20):
        got = [(n.word, n.score) for n in sim_by_word(m, w, 5)]
        want = brute_neighbors(m, w, 5)
        assert [g[0] for g in got] == [x[0] for x in want]
        assert np.allclose([g[1] for g in got], [x[1] for x in want], atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 30), st.integers(0, 30))
def test_prefix_and_no_self(seed, n1, n2):
    rng = np.random.default_rng(seed)
    vecs = np.round(rng.normal(size=(25, 3)) * 2) / 2
    m = EmbeddingModel([f"w{i}" for i in range(25)], vecs)
    w = m.words[seed % 25]
    if not np.any(m.vectors[m.vocab[w]]):
        return
    lo, hi = sorted((n1, n2))
    a, b = sim_by_word(m, w, lo), sim_by_word(m, w, hi)
    assert b[: len(a)] == a
    words = [n.word for n in b]
    assert w not in words and len(words) == len(set(words))
    assert all(-1.0 <= n.score <= 1.0 for n in b)


def test_load_vectors(tmp_path):
    p = tmp_path / "v.txt"
    p.write_text("3 4\na 1 0 0 0\nb 0 1 0 0\nc 1 1 0 0\n", encoding="utf-8")
    m = load_vectors(p)
    assert len(m) == 3 and m.dim == 4
    assert all(m.freq(w) == 1 for w in m.words)


def test_load_vectors_errors(tmp_path):
    p = tmp_path / "v.txt"
    p.write_text("2 4\na 1 0 0 0\nb 0 1 0\n", encoding="utf-8")
    with pytest.raises(InputError, match="row 2"):
        load_vectors(p)
    p.write_text("2 2\na 1 0\na 0 1\n", encoding="utf-8")
    with pytest.raises(InputError, match="duplicate"):
        load_vectors(p)
    p.write_text("3 2\na 1 0\nb 0 1\n", encoding="utf-8")
    with pytest.raises(InputError):
        load_vectors(p)
    with pytest.raises(InputError):
        load_vectors(tmp_path / "none.txt")


def test_save_load_roundtrip(tmp_path, random_model):
    m = random_model(30, 5, 1)
    m.frequency = {w: i + 1 for i, w in enumerate(m.words)}
    save_vectors(m, tmp_path / "m.vec", tmp_path / "m.freq")
    back = load_vectors(tmp_path / "m.vec", tmp_path / "m.freq")
    assert back.words == m.words
    assert np.array_equal(back.vectors, m.vectors)
    assert back.frequency == m.frequency


def test_interchangeable_words():
    rng = random.Random(0)
    ctx = [f"c{i}" for i in range(30)]
    texts = []
    for _ in range(400):
        left, right = rng.choice(ctx), rng.choice(ctx)
        # every alpha sentence has a beta twin, so their contexts are identical
        texts.append(f"{left} alpha {right}")
        texts.append(f"{left} beta {right}")
        texts.append(f"{rng.choice(ctx)} {rng.choice(ctx)} {rng.choice(ctx)}")
    c = Corpus.from_texts(texts)
    for ctxt in ("window", "position"):
        m = train_count_model(c, 10, ctxt, window=1)
        assert cosine(m, "alpha", "beta") >= 0.99


def test_smallest_corpus():
    m = train_count_model(Corpus.from_texts(["a b a b"]), 1, "window", window=1)
    assert {"a", "b"} <= set(m.words)


def test_trainer_errors(tmp_path):
    c = Corpus.from_texts(["a b c", "b c d"])
    with pytest.raises(ParameterError):
        train_count_model(c, 50, "window", window=1)
    with pytest.raises(ParameterError):
        train_count_model(c, 2, "bogus")
    with pytest.raises(ParameterError):
        train_count_model(c, 2, "dependency")
    empty = tmp_path / "deps.txt"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(InputError):
        train_count_model(c, 2, "dependency", dependency_path=empty)


def test_dependency_contexts(tmp_path):
    rows = []
    for i in range(40):
        noun = "cat" if i % 2 else "dog"
        verb = ["eats", "sees", "likes"][i % 3]
        rows += [f"d{i} the 2 det", f"d{i} {noun} 3 nsubj", f"d{i} {verb} 0 root"]
    p = tmp_path / "deps.txt"
    p.write_text("\n".join(rows) + "\n", encoding="utf-8")
    m = train_count_model(Corpus.from_texts(["x"]), 3, "dependency", dependency_path=p)
    assert m.kind == "similarity"
    assert cosine(m, "cat", "dog") > 0.9


def test_model_kind_and_frequency():
    c = Corpus.from_texts(["a b c a", "b c d"])
    m = train_count_model(c, 2, "window", window=1)
    assert m.kind == "relatedness"
    assert m.freq("a") == 2
    assert train_count_model(c, 2, "position", window=1).kind == "similarity"


def test_permutation_invariance():
    rng = random.Random(3)
    vocab = [f"t{i}" for i in range(40)]
    texts = [" ".join(rng.choice(vocab) for _ in range(6)) for _ in range(300)]
    shuffled = texts[:]
    rng.shuffle(shuffled)
    a = train_count_model(Corpus.from_texts(texts), 10, "window", window=2)
    b = train_count_model(Corpus.from_texts(shuffled), 10, "window", window=2)
    assert a.words == b.words
    ga = a.vectors @ a.vectors.T
    gb = b.vectors @ b.vectors.T
    assert np.allclose(ga, gb, atol=1e-9)


def test_ppmi_nonnegative():
    from scipy import sparse

    m = sparse.csr_matrix(np.array([[4.0, 0, 1], [0, 2, 2], [1, 1, 0]]))
    p = ppmi(m).toarray()
    assert (p >= 0).all()
    # hand value for cell (0, 0): ln(4 * 11 / (5 * 5))
    assert p[0, 0] == pytest.approx(math.log(4 * 11 / 25))


@pytest.mark.parametrize("seed", range(5))
def test_sim_by_word_exact_ties(random_model, seed):
    m = random_model(150, 3, seed, quantize=1)
    for w in random.Random(seed).sample(m.words, 15):
        if not np.any(m.vectors[m.vocab[w]]):
            continue
        for n in (1, 4, 12):
            assert [x.word for x in sim_by_word(m, w, n)] == [x[0] for x in brute_neighbors(m, w, n)]
