"""Primary / secondary code-word bucketing of expanded seed words."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field

from .contextgraph import ContextualGraph, HateLexicon, build_graph
from .corpus import CorpusStats, doc_freq
from .embedding import EmbeddingModel, Neighbor, sim_by_word
from .errors import CodewordsError, NotInVocabulary, ParameterError

log = logging.getLogger(__name__)

PRIMARY, SECONDARY, REJECTED = "primary", "secondary", "rejected"


@dataclass
class ContextRep:
    hate_similar: list[Neighbor] = field(default_factory=list)
    hate_related: list[Neighbor] = field(default_factory=list)


@dataclass
class PrimaryEvidence:
    th_similarity: bool
    th_relatedness: bool
    freq_check: bool
    similar_hits: int
    related_hits: int
    df_hate: float
    df_clean: float


@dataclass
class CodewordReport:
    word: str
    bucket: str = REJECTED
    th_similarity: bool = False
    th_relatedness: bool = False
    freq_check: bool = False
    matched_seed_words: list[str] = field(default_factory=list)
    predecessors: list[str] = field(default_factory=list)
    df_hate: float = 0.0
    df_clean: float = 0.0
    error: str | None = None

    def to_json(self, **extra) -> str:
        d = asdict(self)
        d.update(extra)
        return json.dumps(d, sort_keys=True, ensure_ascii=False)


def get_context_rep(w: str, model_dh: EmbeddingModel, model_wh: EmbeddingModel, topn: int) -> ContextRep:
    """Neighbors of ``w`` in the hate-corpus similarity and relatedness models.

    A word missing from one model gets an empty list on that side (with a
    warning); missing from both raises :class:`NotInVocabulary`.
    """
    if topn < 0:
        raise ParameterError("topn must be >= 0")
    in_d, in_w = w in model_dh, w in model_wh
    if not in_d and not in_w:
        raise NotInVocabulary(w)
    rep = ContextRep()
    if in_d:
        rep.hate_similar = sim_by_word(model_dh, w, topn)
    else:
        log.warning("%r not in the similarity model; similar list left empty", w)
    if in_w:
        rep.hate_related = sim_by_word(model_wh, w, topn)
    else:
        log.warning("%r not in the relatedness model; related list left empty", w)
    return rep


def _hits(neighbors, lexicon: HateLexicon) -> int:
    return sum(1 for n in neighbors if n.word in lexicon)


def primary_check(
    w: str,
    rep: ContextRep,
    lexicon,
    topn: int,
    th: float,
    stats_hate: CorpusStats,
    stats_clean: CorpusStats,
) -> tuple[bool, PrimaryEvidence]:
    """Threshold test on lexicon hits (either model) AND df(hate) > df(clean).

    A side passes when ``hits / topn >= th``.
    """
    if topn < 1:
        raise ParameterError("topn must be >= 1")
    if not 0 <= th <= 1:
        raise ParameterError(f"th must be in [0, 1], got {th}")
    if not isinstance(lexicon, HateLexicon):
        lexicon = HateLexicon(lexicon)
    sim_hits = _hits(rep.hate_similar, lexicon)
    rel_hits = _hits(rep.hate_related, lexicon)
    th_sim = sim_hits / topn >= th
    th_rel = rel_hits / topn >= th
    dfh, dfc = doc_freq(stats_hate, w), doc_freq(stats_clean, w)
    freq_check = dfh > dfc
    ev = PrimaryEvidence(th_sim, th_rel, freq_check, sim_hits, rel_hits, dfh, dfc)
    return (th_sim or th_rel) and freq_check, ev


def secondary_check(w: str, cg: ContextualGraph, lexicon) -> tuple[bool, set[str]]:
    """Union of predecessors of every lexicon vertex found in ``w``'s graph."""
    if not isinstance(lexicon, HateLexicon):
        lexicon = HateLexicon(lexicon)
    preds: set[str] = set()
    for v in cg.vertices:
        if v in lexicon:
            preds |= cg.predecessors(v)
    return bool(preds), preds


def surface_codewords(
    candidates,
    model_dh: EmbeddingModel,
    model_wh: EmbeddingModel,
    lexicon,
    stats_hate: CorpusStats,
    stats_clean: CorpusStats,
    topn: int = 5,
    depth: int = 2,
    th: float = 0.2,
) -> list[CodewordReport]:
    """Bucket each candidate as primary, secondary or rejected.

    Candidates that are lexicon words (or variants) are dropped before any
    check. The primary test runs first; only words failing it get a
    contextual graph for the secondary test. Errors on a single word are
    recorded in its report and processing continues.
    """
    candidates = list(candidates)
    if not candidates:
        raise ParameterError("no candidate words to classify")
    if not isinstance(lexicon, HateLexicon):
        lexicon = HateLexicon(lexicon)

    reports = []
    done = set()
    for w in candidates:
        if w in lexicon or w in done:
            continue
        done.add(w)
        rep = CodewordReport(w)
        try:
            crep = get_context_rep(w, model_dh, model_wh, topn)
            ok, ev = primary_check(w, crep, lexicon, topn, th, stats_hate, stats_clean)
            rep.th_similarity, rep.th_relatedness = ev.th_similarity, ev.th_relatedness
            rep.freq_check, rep.df_hate, rep.df_clean = ev.freq_check, ev.df_hate, ev.df_clean
            if ok:
                rep.bucket = PRIMARY
            elif w in model_dh:
                cg = build_graph(w, model_dh, depth, None, topn)
                found, preds = secondary_check(w, cg, lexicon)
                if found:
                    rep.bucket = SECONDARY
                    rep.predecessors = sorted(preds)
                    rep.matched_seed_words = sorted(
                        v for v in cg.vertices if v in lexicon and cg.predecessors(v)
                    )
        except CodewordsError as exc:
            rep.error = str(exc)
            log.warning("candidate %r: %s", w, exc)
        reports.append(rep)
    return reports


def write_reports(reports, jsonl_path, tsv_path, config_hash: str | None = None) -> None:
    extra = {"config_hash": config_hash} if config_hash else {}
    with open(jsonl_path, "w", encoding="utf-8") as fh:
        for r in reports:
            fh.write(r.to_json(**extra) + "\n")
    with open(tsv_path, "w", encoding="utf-8") as fh:
        if config_hash:
            fh.write(f"# config_hash={config_hash}\n")
        for r in reports:
            fh.write(f"{r.word}\t{r.bucket}\n")
