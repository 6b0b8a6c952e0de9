"""Word vectors: loading, cosine neighbor queries and a count-based trainer.

The trainer builds a word-context co-occurrence matrix, converts it to
positive PMI and keeps a truncated SVD. Window contexts give a
*relatedness* model; position-labeled windows (``word@-1``) or pre-parsed
dependency contexts give a *similarity* model.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import svds

from .errors import DegenerateVector, InputError, NotInVocabulary, ParameterError

log = logging.getLogger(__name__)

KINDS = ("relatedness", "similarity")
CORPUS_TAGS = ("clean", "hate")
CONTEXTS = ("window", "position", "dependency")
# cosines this close are treated as equal; they differ only by rounding
TIE_TOL = 1e-12


@dataclass(frozen=True)
class Neighbor:
    word: str
    score: float


@dataclass
class EmbeddingModel:
    """Dense vectors plus per-word frequencies for one trained model."""

    words: list[str]
    vectors: np.ndarray
    frequency: dict[str, int] = field(default_factory=dict)
    kind: str = "similarity"
    corpus_tag: str = "hate"

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.words):
            raise ParameterError("vectors must be a |vocab| x dim matrix")
        if self.vectors.shape[1] < 1:
            raise ParameterError("dim must be positive")
        self.vocab = {}
        for i, w in enumerate(self.words):
            if w in self.vocab:
                raise InputError(f"duplicate word {w!r}")
            self.vocab[w] = i
        if not self.frequency:
            self.frequency = {w: 1 for w in self.words}
        else:
            self.frequency = {w: int(self.frequency.get(w, 1)) or 1 for w in self.words}
        norms = np.linalg.norm(self.vectors, axis=1)
        self._norms = norms
        self._valid = norms > 0
        safe = np.where(self._valid, norms, 1.0)
        self._unit = self.vectors / safe[:, None]
        # lexicographic rank per row, used as the tie-break key
        self._lex = np.empty(len(self.words), dtype=np.int64)
        self._lex[np.argsort(np.array(self.words, dtype=object), kind="stable")] = np.arange(len(self.words))

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.words)

    def __contains__(self, w):
        return w in self.vocab

    def index(self, w: str) -> int:
        try:
            return self.vocab[w]
        except KeyError:
            raise NotInVocabulary(w) from None

    def freq(self, w: str) -> int:
        self.index(w)
        return self.frequency[w]


def cosine(model: EmbeddingModel, w1: str, w2: str) -> float:
    i, j = model.index(w1), model.index(w2)
    for w, k in ((w1, i), (w2, j)):
        if not model._valid[k]:
            raise DegenerateVector(w)
    c = float(model._unit[i] @ model._unit[j])
    return min(1.0, max(-1.0, c))


def sim_by_word(model: EmbeddingModel, w: str, topn: int) -> list[Neighbor]:
    """The ``topn`` most cosine-similar vocabulary words to ``w``.

    The query word is never returned and zero vectors are skipped. Scores
    within ``TIE_TOL`` of each other count as equal and are ordered
    lexicographically.
    """
    if topn < 0:
        raise ParameterError("topn must be >= 0")
    i = model.index(w)
    if topn == 0:
        return []
    if not model._valid[i]:
        raise DegenerateVector(w)
    scores = model._unit @ model._unit[i]
    mask = model._valid.copy()
    mask[i] = False
    cand = np.flatnonzero(mask)
    if cand.size == 0:
        return []
    s = scores[cand]
    if topn < cand.size:
        # keep everything tied with the cutoff so lexicographic tie-breaks stay exact
        lower = -np.partition(-s, topn - 1)[topn - 1]
        while True:
            below = s[(s < lower) & (s >= lower - TIE_TOL)]
            if below.size == 0:
                break
            lower = below.min()
        keep = s >= lower
        cand, s = cand[keep], s[keep]
    order = np.argsort(-s, kind="stable")
    # scores closer than TIE_TOL (chained) form one tie group
    group = np.concatenate(([0], np.cumsum(np.diff(s[order]) < -TIE_TOL)))
    rank = np.empty_like(group)
    rank[order] = group
    order = np.lexsort((model._lex[cand], rank))[:topn]
    return [Neighbor(model.words[k], float(min(1.0, max(-1.0, s[o])))) for o, k in zip(order, cand[order])]


# -- text vector format ----------------------------------------------------

def load_vectors(path, freq_path=None, kind="similarity", corpus_tag="hate") -> EmbeddingModel:
    """Read the ``<vocab_size> <dim>`` header text format.

    Frequencies come from an optional ``word<TAB>count`` sidecar; without
    one every word gets frequency 1.
    """
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read vector file {path}: {exc}") from exc
    words: list[str] = []
    rows: list[list[float]] = []
    with fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise InputError(f"{path}: header must be '<vocab_size> <dim>'")
        try:
            size, dim = int(header[0]), int(header[1])
        except ValueError:
            raise InputError(f"{path}: non-integer header {header}") from None
        if dim < 1:
            raise InputError(f"{path}: dim must be positive")
        seen = set()
        for rowno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").rstrip(" ").split(" ")
            if parts == [""]:
                continue
            word, vals = parts[0], parts[1:]
            if len(vals) != dim:
                raise InputError(
                    f"{path}: row {rowno} ({word!r}) has {len(vals)} values, expected {dim}"
                )
            if word in seen:
                raise InputError(f"{path}: row {rowno} duplicates word {word!r}")
            seen.add(word)
            try:
                rows.append([float(v) for v in vals])
            except ValueError:
                raise InputError(f"{path}: row {rowno} has a non-numeric value") from None
            words.append(word)
    if len(words) != size:
        raise InputError(f"{path}: header declares {size} words, found {len(words)}")
    freqs = read_frequencies(freq_path) if freq_path else {}
    vectors = np.array(rows, dtype=np.float64).reshape(len(words), dim)
    return EmbeddingModel(words, vectors, freqs, kind=kind, corpus_tag=corpus_tag)


def read_frequencies(path) -> dict[str, int]:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                try:
                    w, c = line.split("\t")
                    out[w] = int(c)
                except ValueError:
                    raise InputError(f"{path}: line {lineno} is not 'word<TAB>count'") from None
    except OSError as exc:
        raise InputError(f"cannot read frequency file {path}: {exc}") from exc
    return out


def save_vectors(model: EmbeddingModel, path, freq_path=None) -> None:
    # repr() round-trips float64 exactly, which keeps reloads bit-identical
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(model.words)} {model.dim}\n")
        for w, row in zip(model.words, model.vectors):
            fh.write(w + " " + " ".join(repr(float(x)) for x in row) + "\n")
    if freq_path is not None:
        with open(freq_path, "w", encoding="utf-8") as fh:
            for w in model.words:
                fh.write(f"{w}\t{model.frequency[w]}\n")


# -- count-based trainer ---------------------------------------------------

def read_dependencies(path) -> dict[str, list[tuple[str, int, str]]]:
    """Parse ``doc_id token head_index dep_label`` rows, grouped by document.

    Token positions are 1-based in row order within each document; head 0
    marks the root.
    """
    docs: dict[str, list[tuple[str, int, str]]] = defaultdict(list)
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read dependency file {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise InputError(f"{path}: line {lineno} needs 4 fields, got {len(parts)}")
            doc_id, token, head, label = parts
            try:
                head_i = int(head)
            except ValueError:
                raise InputError(f"{path}: line {lineno} has non-integer head {head!r}") from None
            docs[doc_id].append((token.lower(), head_i, label))
    return dict(docs)


def _window_pairs(token_lists, k):
    counts: Counter = Counter()
    for toks in token_lists:
        n = len(toks)
        for i, w in enumerate(toks):
            for j in range(max(0, i - k), min(n, i + k + 1)):
                if j != i:
                    counts[(w, toks[j])] += 1
    return counts


def _position_pairs(token_lists, k):
    counts: Counter = Counter()
    for toks in token_lists:
        n = len(toks)
        for i, w in enumerate(toks):
            for j in range(max(0, i - k), min(n, i + k + 1)):
                if j != i:
                    counts[(w, f"{toks[j]}@{j - i:+d}")] += 1
    return counts


def _dependency_pairs(parsed):
    counts: Counter = Counter()
    for rows in parsed.values():
        for token, head, label in rows:
            if head <= 0 or head > len(rows):
                continue
            head_tok = rows[head - 1][0]
            counts[(token, f"{head_tok}/{label}")] += 1
            counts[(head_tok, f"{token}/{label}-1")] += 1
    return counts


def ppmi(counts: sparse.csr_matrix, cds: float = 1.0) -> sparse.csr_matrix:
    """Positive pointwise mutual information of a word x context count matrix.

    ``cds`` raises context counts to that power before normalizing (context
    distribution smoothing); 1.0 is plain PPMI.
    """
    counts = sparse.csr_matrix(counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        return counts
    row = np.asarray(counts.sum(axis=1)).ravel()
    col = np.asarray(counts.sum(axis=0)).ravel() ** cds
    p_ctx = col / col.sum()
    coo = counts.tocoo()
    vals = np.log(coo.data / (row[coo.row] * p_ctx[coo.col]))
    keep = vals > 0
    return sparse.csr_matrix(
        (vals[keep], (coo.row[keep], coo.col[keep])), shape=counts.shape
    )


def _truncated_svd(m: sparse.csr_matrix, dim: int, seed: int):
    if min(m.shape) <= 2000:
        u, s, _ = np.linalg.svd(m.toarray(), full_matrices=False)
        u, s = u[:, :dim], s[:dim]
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(min(m.shape))
        u, s, _ = svds(m, k=dim, v0=v0)
        order = np.argsort(-s, kind="stable")
        u, s = u[:, order], s[order]
    # fix the sign of each component so output does not depend on LAPACK's choice
    pivot = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[pivot, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs, s


def train_count_model(
    corpus,
    dim: int,
    context: str = "window",
    window: int = 5,
    dependency_path=None,
    corpus_tag: str = "hate",
    seed: int = 0,
    cds: float = 1.0,
    eig: float = 0.5,
) -> EmbeddingModel:
    """Train a PPMI + truncated-SVD model on a tokenized corpus.

    Parameters
    ----------
    corpus : Corpus
        Source of token lists and word frequencies.
    dim : int
        Output dimensionality; must not exceed the smaller matrix side.
    context : {"window", "position", "dependency"}
        ``window`` gives a relatedness model, the other two a similarity model.
    window : int
        Half-width of window and position contexts.
    dependency_path : path, optional
        Pre-parsed dependency rows; required when ``context="dependency"``.
    seed : int
        Seed for the sparse SVD starting vector (large matrices only).
    cds : float
        Context distribution smoothing exponent for PPMI.
    eig : float
        Vectors are ``U * S**eig``.
    """
    if context not in CONTEXTS:
        raise ParameterError(f"context must be one of {CONTEXTS}, got {context!r}")
    if dim < 1:
        raise ParameterError("dim must be >= 1")
    if window < 1:
        raise ParameterError("window must be >= 1")
    token_lists = corpus.token_lists()
    if not any(token_lists):
        raise ParameterError("cannot train on an empty corpus")

    if context == "window":
        counts = _window_pairs(token_lists, window)
    elif context == "position":
        counts = _position_pairs(token_lists, window)
    else:
        if dependency_path is None:
            raise ParameterError("dependency context requires a parsed dependency file")
        parsed = read_dependencies(dependency_path)
        if not parsed:
            raise InputError(f"dependency file {dependency_path} is empty")
        counts = _dependency_pairs(parsed)
    if not counts:
        raise ParameterError("corpus produced no co-occurrences")

    # sorted axes make the matrix independent of document order
    words = sorted({w for w, _ in counts})
    contexts = sorted({c for _, c in counts})
    wi = {w: i for i, w in enumerate(words)}
    ci = {c: i for i, c in enumerate(contexts)}
    keys = sorted(counts)
    data = np.array([counts[k] for k in keys], dtype=np.float64)
    rows = np.array([wi[w] for w, _ in keys])
    cols = np.array([ci[c] for _, c in keys])
    m = sparse.csr_matrix((data, (rows, cols)), shape=(len(words), len(contexts)))

    rank = min(m.shape)
    if dim > rank:
        raise ParameterError(f"dim={dim} exceeds available rank {rank} ({m.shape[0]} words x {m.shape[1]} contexts)")
    u, s = _truncated_svd(ppmi(m, cds), dim, seed)
    vectors = u * s ** eig

    tc = corpus.stats.term_count
    freq = {w: max(1, tc.get(w, 1)) for w in words}
    kind = "relatedness" if context == "window" else "similarity"
    log.info("trained %s model: %d words, %d contexts, dim %d", kind, len(words), len(contexts), dim)
    return EmbeddingModel(words, vectors, freq, kind=kind, corpus_tag=corpus_tag)

