"""Document ingestion, tweet-style tokenization and corpus frequency statistics."""

from __future__ import annotations

import json
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import InputError, ParameterError

log = logging.getLogger(__name__)

SOURCES = ("hate_community", "clean", "keyword_hate")

MENTION_TOKEN = "user_mention"
URL_TOKEN = "url"

_EMOJI = (
    "[\U0001F1E6-\U0001F1FF]{2}"  # regional-indicator flag pairs
    "|[\U0001F000-\U0001FAFF☀-➿⬀-⯿⌀-⏿]"
    "[️\U0001F3FB-\U0001F3FF]*"
    "(?:‍[\U0001F000-\U0001FAFF☀-➿][️\U0001F3FB-\U0001F3FF]*)*"
)

_TOKEN_RE = re.compile(
    r"(?P<url>(?:https?://|www\.)\S+)"
    r"|(?P<mention>(?<![\w@])@\w+)"
    r"|(?P<hashtag>(?<![\w#])#\w+)"
    rf"|(?P<emoji>{_EMOJI})"
    r"|(?P<word>[^\W_](?:[\w]|['’\-](?=\w))*|_\w*)",
    re.UNICODE,
)


def tokenize(text: str) -> list[str]:
    """Split raw text into normalized tokens.

    Mentions become ``user_mention``, links become ``url``, hashtags keep
    their ``#``, emoji are standalone tokens and everything is lowercased.
    Punctuation outside those rules is dropped.

    >>> tokenize("@Bob HATES #cats")
    ['user_mention', 'hates', '#cats']
    """
    tokens = []
    for m in _TOKEN_RE.finditer(text.lower()):
        kind = m.lastgroup
        if kind == "url":
            tokens.append(URL_TOKEN)
        elif kind == "mention":
            tokens.append(MENTION_TOKEN)
        else:
            tokens.append(m.group())
    return tokens


@dataclass
class Document:
    id: str
    text: str
    source: str
    tokens: list[str] = field(default_factory=list)


@dataclass
class CorpusStats:
    """Document and term counts over one corpus."""

    n_docs: int = 0
    doc_count: dict[str, int] = field(default_factory=dict)
    term_count: dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_token_lists(cls, token_lists: Iterable[list[str]]) -> "CorpusStats":
        doc_count: Counter = Counter()
        term_count: Counter = Counter()
        n = 0
        for tokens in token_lists:
            n += 1
            term_count.update(tokens)
            doc_count.update(set(tokens))
        return cls(n, dict(doc_count), dict(term_count))

    def write_tsv(self, path, header: str | None = None) -> None:
        """Write ``word<TAB>doc_count<TAB>term_count`` rows sorted by word."""
        with open(path, "w", encoding="utf-8") as fh:
            if header:
                fh.write(f"# {header}\n")
            fh.write(f"# n_docs={self.n_docs}\n")
            for w in sorted(self.doc_count):
                fh.write(f"{w}\t{self.doc_count[w]}\t{self.term_count.get(w, 0)}\n")

    @classmethod
    def read_tsv(cls, path) -> "CorpusStats":
        """Inverse of :meth:`write_tsv`."""
        n = None
        dc, tc = {}, {}
        try:
            with open(path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.rstrip("\n")
                    if line.startswith("# n_docs="):
                        n = int(line.split("=", 1)[1])
                        continue
                    if not line or line.startswith("#"):
                        continue
                    parts = line.split("\t")
                    if len(parts) != 3:
                        raise InputError(f"{path}: line {lineno} is not 'word<TAB>doc_count<TAB>term_count'")
                    try:
                        dc[parts[0]], tc[parts[0]] = int(parts[1]), int(parts[2])
                    except ValueError:
                        raise InputError(f"{path}: line {lineno} has a non-integer count") from None
        except OSError as exc:
            raise InputError(f"cannot read corpus stats {path}: {exc}") from exc
        if n is None:
            raise InputError(f"{path}: missing '# n_docs=' line")
        return cls(n, dc, tc)


@dataclass
class IngestError:
    line: int
    message: str


@dataclass
class Corpus:
    source: str
    documents: list[Document] = field(default_factory=list)
    stats: CorpusStats = field(default_factory=CorpusStats)
    errors: list[IngestError] = field(default_factory=list)

    @property
    def n_docs(self) -> int:
        return self.stats.n_docs

    def token_lists(self) -> list[list[str]]:
        return [d.tokens for d in self.documents]

    @classmethod
    def from_texts(cls, texts, source="clean", stopwords=None) -> "Corpus":
        """Build a corpus from in-memory strings, ids are the positions."""
        docs = [Document(str(i), t, source) for i, t in enumerate(texts)]
        return cls._finish(source, docs, [], stopwords)

    @classmethod
    def _finish(cls, source, docs, errors, stopwords) -> "Corpus":
        stop = set(stopwords or ())
        for d in docs:
            d.tokens = [t for t in tokenize(d.text) if t not in stop]
        stats = CorpusStats.from_token_lists(d.tokens for d in docs)
        return cls(source, docs, stats, errors)


def ingest(path, source: str, stopwords: Iterable[str] | None = None) -> Corpus:
    """Read a JSON-Lines file into a tokenized :class:`Corpus`.

    Malformed lines are recorded in ``corpus.errors`` (1-based line numbers)
    and skipped. An unreadable file raises :class:`InputError`.
    """
    if source not in SOURCES:
        raise ParameterError(f"unknown corpus source {source!r}; expected one of {SOURCES}")
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read corpus file {path}: {exc}") from exc

    docs: list[Document] = []
    errors: list[IngestError] = []
    seen: set[str] = set()
    with fh:
        try:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    errors.append(IngestError(lineno, f"invalid JSON: {exc.msg}"))
                    continue
                if not isinstance(obj, dict):
                    errors.append(IngestError(lineno, "line is not a JSON object"))
                    continue
                doc_id, text = obj.get("id"), obj.get("text")
                if not isinstance(doc_id, str) or not doc_id:
                    errors.append(IngestError(lineno, "missing or non-string 'id'"))
                    continue
                if not isinstance(text, str):
                    errors.append(IngestError(lineno, "missing or non-string 'text'"))
                    continue
                if doc_id in seen:
                    errors.append(IngestError(lineno, f"duplicate id {doc_id!r}"))
                    continue
                seen.add(doc_id)
                docs.append(Document(doc_id, text, obj.get("source", source)))
        except UnicodeDecodeError as exc:
            raise InputError(f"{path} is not valid UTF-8: {exc}") from exc

    for e in errors:
        log.warning("%s:%d: %s", path, e.line, e.message)
    return Corpus._finish(source, docs, errors, stopwords)


def doc_freq(stats: CorpusStats, w: str) -> float:
    """Fraction of documents containing ``w``; 0.0 for unseen words."""
    if stats.n_docs < 1:
        raise ParameterError("document frequency needs a corpus with at least one document")
    return stats.doc_count.get(w, 0) / stats.n_docs


def tfidf_rank(stats: CorpusStats, k: int) -> list[tuple[str, float]]:
    """Top-``k`` words by corpus-global ``term_count * ln(N / doc_count)``.

    Ties are broken lexicographically so the order is total.
    """
    if k < 0:
        raise ParameterError("k must be >= 0")
    if stats.n_docs < 1:
        raise ParameterError("tf-idf needs a corpus with at least one document")
    if k == 0:
        return []
    n = stats.n_docs
    scored = [
        (w, stats.term_count[w] * math.log(n / dc)) for w, dc in stats.doc_count.items()
    ]
    scored.sort(key=lambda ws: (-ws[1], ws[0]))
    return scored[:k]


def read_wordlist(path) -> list[str]:
    """One word per line; blank lines and ``#`` comments skipped, lowercased."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read word list {path}: {exc}") from exc
    out = []
    for line in lines:
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line.lower())
    return out


def write_jsonl(path, docs: Iterable[Document]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in docs:
            fh.write(json.dumps({"id": d.id, "text": d.text, "source": d.source}, ensure_ascii=False))
            fh.write("\n")


def load_corpus(path, source: str, stopwords=None) -> Corpus:
    """`ingest` wrapper that also checks the path exists first."""
    if not Path(path).exists():
        raise InputError(f"corpus file not found: {path}")
    return ingest(path, source, stopwords)
