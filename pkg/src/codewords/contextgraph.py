"""Contextual word graphs, boosted edge weights, weighted PageRank and df trimming.

A contextual graph links a query word to its embedding neighbors, then
repeats for the newly reached words up to ``depth`` rounds. Graphs built
from every seed word are unioned and ranked with PageRank; the ranking is
trimmed to words that are more common in the hate corpus than in the clean
one, with the seed lexicon removed.
"""

from __future__ import annotations

import logging
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .corpus import CorpusStats, doc_freq
from .embedding import EmbeddingModel, cosine, sim_by_word
from .errors import CodewordsError, NotInVocabulary, ParameterError

log = logging.getLogger(__name__)

WEIGHT_FLOOR = 1e-6


def variants(word: str) -> set[str]:
    """Naive singular/plural forms: add ``s``/``es``, strip ``s``/``es``."""
    out = {word, word + "s", word + "es"}
    if word.endswith("es") and len(word) > 2:
        out.add(word[:-2])
    if word.endswith("s") and len(word) > 1:
        out.add(word[:-1])
    return out


class HateLexicon:
    """Seed keywords plus their generated singular/plural variants."""

    def __init__(self, words):
        base = []
        for w in words:
            w = w.strip().lower()
            if w and w not in base:
                base.append(w)
        self.base = base
        self.all_words = set()
        for w in base:
            self.all_words |= variants(w)

    def __contains__(self, w):
        return w in self.all_words

    def __len__(self):
        return len(self.base)

    def __iter__(self):
        return iter(self.base)

    def in_vocab(self, model: EmbeddingModel) -> list[str]:
        """Lexicon words and variants present in ``model``, sorted."""
        return sorted(w for w in self.all_words if w in model)


class EmptyBoost(UserWarning):
    pass


def compute_boost(model: EmbeddingModel, lexicon, topn: int = 20) -> Counter:
    """Count how often each word shows up in the seed words' neighbor lists."""
    if topn < 1:
        raise ParameterError("boost topn must be >= 1")
    if not isinstance(lexicon, HateLexicon):
        lexicon = HateLexicon(lexicon)
    boost: Counter = Counter()
    seeds = lexicon.in_vocab(model)
    if not seeds:
        warnings.warn("no lexicon word is in the model vocabulary", EmptyBoost, stacklevel=2)
        return boost
    for h in seeds:
        boost.update(n.word for n in sim_by_word(model, h, topn))
    return boost


def edge_weight(model: EmbeddingModel, boost, v1: str, v2: str) -> float:
    c = cosine(model, v1, v2)
    b = boost.get(v1, 0) if boost else 0
    wt = math.log(model.freq(v1)) * b + c if b else c
    return wt if wt > 0 else WEIGHT_FLOOR


class ContextualGraph:
    """Directed word graph with one positive weight per ordered vertex pair.

    Vertices keep insertion order so every traversal is reproducible.
    """

    def __init__(self):
        self._succ: dict[str, dict[str, float]] = {}
        self._pred: dict[str, dict[str, float]] = {}

    def add_vertex(self, v: str) -> None:
        if v not in self._succ:
            self._succ[v] = {}
            self._pred[v] = {}

    def add_edge(self, u: str, v: str, weight: float) -> None:
        if not (weight > 0 and math.isfinite(weight)):
            raise ParameterError(f"edge weight must be positive and finite, got {weight}")
        self.add_vertex(u)
        self.add_vertex(v)
        old = self._succ[u].get(v)
        if old is None or weight > old:
            self._succ[u][v] = weight
            self._pred[v][u] = weight

    @property
    def vertices(self) -> list[str]:
        return list(self._succ)

    def edges(self):
        for u, nbrs in self._succ.items():
            for v, w in nbrs.items():
                yield u, v, w

    def successors(self, v) -> dict[str, float]:
        return self._succ[v]

    def predecessors(self, v) -> set[str]:
        return set(self._pred.get(v, ()))

    def weight(self, u, v) -> float:
        return self._succ[u][v]

    def __contains__(self, v):
        return v in self._succ

    def __len__(self):
        return len(self._succ)

    def n_edges(self) -> int:
        return sum(len(n) for n in self._succ.values())

    def write_tsv(self, path, header: str | None = None) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            if header:
                fh.write(f"# {header}\n")
            for u, v, w in self.edges():
                fh.write(f"{u}\t{v}\t{w!r}\n")


def build_graph(w: str, model: EmbeddingModel, depth: int, boost, topn: int) -> ContextualGraph:
    """Grow a contextual graph from ``w`` over ``depth`` expansion rounds.

    Round one links ``w`` to its ``topn`` neighbors. Each later round
    expands every vertex that has not been expanded yet, so a vertex is
    queried at most once.
    """
    if depth < 1:
        raise ParameterError("depth must be >= 1")
    if topn < 1:
        raise ParameterError("topn must be >= 1")
    model.index(w)
    boost = boost or {}
    cg = ContextualGraph()
    cg.add_vertex(w)
    seen: set[str] = set()

    def expand(v):
        try:
            nbrs = sim_by_word(model, v, topn)
        except CodewordsError as exc:
            log.info("skipping expansion of %r: %s", v, exc)
            return
        for p in nbrs:
            try:
                cg.add_edge(v, p.word, edge_weight(model, boost, v, p.word))
            except NotInVocabulary as exc:
                log.info("skipping neighbor of %r: %s", v, exc)

    expand(w)
    seen.add(w)
    for _ in range(1, depth):
        for v in cg.vertices:
            if v not in seen:
                expand(v)
                seen.add(v)
    return cg


def union_graphs(graphs) -> ContextualGraph:
    """Union of vertex and edge sets; a repeated edge keeps its largest weight."""
    out = ContextualGraph()
    for g in graphs:
        for v in g.vertices:
            out.add_vertex(v)
        for u, v, w in g.edges():
            out.add_edge(u, v, w)
    return out


@dataclass
class PageRankResult:
    scores: dict[str, float]
    converged: bool
    iterations: int

    def ranked(self) -> list[tuple[str, float]]:
        return sorted(self.scores.items(), key=lambda kv: (-kv[1], kv[0]))


def pagerank(
    g: ContextualGraph,
    d: float = 0.85,
    eps: float = 1e-10,
    max_iter: int = 200,
    teleport: dict | None = None,
) -> PageRankResult:
    """Weighted PageRank by power iteration.

    Transition ``u -> v`` has probability ``weight(u, v) / sum_x weight(u, x)``.
    Dangling vertices spread their mass uniformly. ``teleport`` optionally
    replaces the uniform restart distribution (it is normalized here).
    Iteration stops when the L1 change drops below ``eps``.
    """
    if not 0 < d < 1:
        raise ParameterError(f"damping must be in (0, 1), got {d}")
    if max_iter < 1:
        raise ParameterError("max_iter must be >= 1")
    nodes = g.vertices
    n = len(nodes)
    if n == 0:
        return PageRankResult({}, True, 0)
    idx = {v: i for i, v in enumerate(nodes)}
    rows, cols, vals = [], [], []
    out_w = np.zeros(n)
    for u, v, w in g.edges():
        rows.append(idx[u])
        cols.append(idx[v])
        vals.append(w)
        out_w[idx[u]] += w
    vals = np.asarray(vals, dtype=np.float64)
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    if vals.size:
        vals = vals / out_w[rows]
    # transposed transition matrix, so x_next = P.T @ x is a single product
    pt = sparse.csr_matrix((vals, (cols, rows)), shape=(n, n))
    dangling = out_w == 0

    if teleport:
        t = np.array([float(teleport.get(v, 0.0)) for v in nodes])
        if (t < 0).any() or t.sum() <= 0:
            raise ParameterError("teleport weights must be nonnegative with a positive sum on the graph")
        t = t / t.sum()
    else:
        t = np.full(n, 1.0 / n)

    x = np.full(n, 1.0 / n)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        nxt = d * (pt @ x + x[dangling].sum() / n) + (1.0 - d) * t
        nxt /= nxt.sum()
        delta = np.abs(nxt - x).sum()
        x = nxt
        if delta < eps:
            converged = True
            break
    if not converged:
        log.warning("PageRank did not converge in %d iterations", max_iter)
    return PageRankResult({v: float(x[i]) for i, v in enumerate(nodes)}, converged, it)


def trim_by_df(ranked, stats_hate: CorpusStats, stats_clean: CorpusStats, lexicon) -> list[str]:
    """Keep words strictly more frequent (by df) in the hate corpus, minus the lexicon."""
    if not isinstance(lexicon, HateLexicon):
        lexicon = HateLexicon(lexicon)
    out = []
    for item in ranked:
        w = item[0] if isinstance(item, tuple) else item
        if w in lexicon:
            continue
        if doc_freq(stats_hate, w) > doc_freq(stats_clean, w):
            out.append(w)
    return out


@dataclass
class ExpandParams:
    boost_topn: int = 20
    topn: int = 3
    depth: int = 2
    d: float = 0.85
    eps: float = 1e-10
    max_iter: int = 200
    recompute_boost: bool = True
    teleport_boost: bool = False


@dataclass
class Expansion:
    words: list[str]
    first_pass: list[tuple[str, float]] = field(default_factory=list)
    second_pass: list[tuple[str, float]] = field(default_factory=list)
    graph: ContextualGraph | None = None
    converged: bool = True


def _rank(words, model, boost, params: ExpandParams):
    graphs = [build_graph(w, model, params.depth, boost, params.topn) for w in words]
    cg = union_graphs(graphs)
    teleport = None
    if params.teleport_boost and boost:
        teleport = {v: boost.get(v, 0) for v in cg.vertices}
        if not any(teleport.values()):
            teleport = None
    pr = pagerank(cg, params.d, params.eps, params.max_iter, teleport)
    return cg, pr


def expand_seed_detailed(lexicon, model, stats_hate, stats_clean, params: ExpandParams | None = None) -> Expansion:
    """Full seed expansion, keeping intermediate rankings for reporting."""
    params = params or ExpandParams()
    if not isinstance(lexicon, HateLexicon):
        lexicon = HateLexicon(lexicon)
    if len(lexicon) == 0:
        raise ParameterError("seed lexicon is empty")
    boost = compute_boost(model, lexicon, params.boost_topn)
    seeds = lexicon.in_vocab(model)
    if not seeds:
        return Expansion([])

    _, pr1 = _rank(seeds, model, boost, params)
    first = pr1.ranked()
    trimmed = trim_by_df(first, stats_hate, stats_clean, lexicon)

    # refine: rebuild from the trimmed words plus the lexicon and rank again
    enlarged = trimmed + [w for w in seeds if w not in set(trimmed)]
    if params.recompute_boost:
        boost2 = Counter()
        for h in enlarged:
            boost2.update(n.word for n in sim_by_word(model, h, params.boost_topn))
    else:
        boost2 = boost
    cg2, pr2 = _rank(enlarged, model, boost2, params)
    second = pr2.ranked()
    words = trim_by_df(second, stats_hate, stats_clean, lexicon)
    return Expansion(words, first, second, cg2, pr1.converged and pr2.converged)


def expand_seed(lexicon, model, stats_hate, stats_clean, params: ExpandParams | None = None) -> list[str]:
    return expand_seed_detailed(lexicon, model, stats_hate, stats_clean, params).words
