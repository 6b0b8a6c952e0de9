import numpy as np
import pytest

from codewords.embedding import EmbeddingModel


def make_model(vectors: dict, freq=None, kind="similarity") -> EmbeddingModel:
    words = list(vectors)
    return EmbeddingModel(words, np.array([vectors[w] for w in words], dtype=float), freq or {}, kind=kind)


@pytest.fixture
def random_model():
    def build(n=200, dim=8, seed=0, quantize=None):
        rng = np.random.default_rng(seed)
        vecs = rng.normal(size=(n, dim))
        if quantize:
            # coarse values produce many exact cosine ties
            vecs = np.round(vecs * quantize) / quantize
        words = [f"w{i:04d}" for i in range(n)]
        return EmbeddingModel(words, vecs)
    return build
