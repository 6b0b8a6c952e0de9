"""Command-line pipeline: ingest, embed, community, expand, surface, baseline, eval.

Each subcommand reads the config (``--config`` file plus ``--set key=value``
overrides), writes its outputs under ``--out`` and stamps them with the
config hash. ``run`` chains ingest through baseline; ``synth`` writes a
planted-code-word fixture with a matching config file.

Exit codes: 0 success, 1 input error, 2 parameter error, 3 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import codeword, communitygraph, contextgraph, corpus, embedding, evalmetrics
from .config import PipelineConfig, load_config
from .errors import CodewordsError, InputError, ParameterError

log = logging.getLogger("codewords")

EXIT_OK, EXIT_INPUT, EXIT_PARAM, EXIT_NONCONVERGED = 0, 1, 2, 3


class NotConverged(CodewordsError):
    pass


class Stage:
    """Shared state for one invocation: config, output dir and hash."""

    def __init__(self, cfg: PipelineConfig, out):
        self.cfg = cfg
        self.out = Path(out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.hash = cfg.hash()
        with open(self.out / "config.resolved", "w", encoding="utf-8") as fh:
            fh.write(f"# config_hash={self.hash}\n")
            fh.write(cfg.resolved_text())

    @property
    def header(self) -> str:
        return f"config_hash={self.hash}"

    def path(self, name) -> Path:
        return self.out / name

    def need(self, key) -> str:
        val = getattr(self.cfg, key)
        if not val:
            raise InputError(f"config key {key!r} must name an input file")
        if not Path(val).exists():
            raise InputError(f"{key}: file not found: {val}")
        return val

    def need_output(self, name) -> Path:
        p = self.path(name)
        if not p.exists():
            raise InputError(f"missing {p}; run the stage that produces it first")
        return p

    def stopwords(self):
        return corpus.read_wordlist(self.cfg.stopwords) if self.cfg.stopwords else None

    def lexicon(self) -> contextgraph.HateLexicon:
        lex = contextgraph.HateLexicon(corpus.read_wordlist(self.need("lexicon")))
        if len(lex) == 0:
            raise ParameterError(f"lexicon file {self.cfg.lexicon} has no words")
        return lex

    def stats(self, tag) -> corpus.CorpusStats:
        return corpus.CorpusStats.read_tsv(self.need_output(f"stats_{tag}.tsv"))

    def model(self, tag, kind) -> embedding.EmbeddingModel:
        return embedding.load_vectors(
            self.need_output(f"{tag}.vec"), self.need_output(f"{tag}.freq"), kind=kind, corpus_tag="hate"
        )


# -- stages ------------------------------------------------------------------

def do_ingest(st: Stage) -> int:
    stop = st.stopwords()
    inputs = [("hate", "hate_corpus", "hate_community"), ("clean", "clean_corpus", "clean")]
    if st.cfg.keyword_corpus:
        inputs.append(("keyword", "keyword_corpus", "keyword_hate"))
    with open(st.path("ingest_errors.tsv"), "w", encoding="utf-8") as err:
        err.write(f"# {st.header}\n")
        for tag, key, source in inputs:
            c = corpus.load_corpus(st.need(key), source, stop)
            if c.n_docs == 0:
                raise InputError(f"{key}: no valid documents in {getattr(st.cfg, key)}")
            c.stats.write_tsv(st.path(f"stats_{tag}.tsv"), st.header)
            for e in c.errors:
                err.write(f"{tag}\t{e.line}\t{e.message}\n")
            log.info("ingested %s: %d docs, %d skipped lines", tag, c.n_docs, len(c.errors))
    return EXIT_OK


def do_embed(st: Stage) -> int:
    cfg = st.cfg
    hate = corpus.load_corpus(st.need("hate_corpus"), "hate_community", st.stopwords())
    if cfg.dependencies:
        dh = embedding.train_count_model(
            hate, cfg.dep_dim, "dependency", dependency_path=st.need("dependencies"),
            seed=cfg.rng_seed, cds=cfg.cds, eig=cfg.eig,
        )
    else:
        dh = embedding.train_count_model(
            hate, cfg.dep_dim, "position", window=cfg.position_window,
            seed=cfg.rng_seed, cds=cfg.cds, eig=cfg.eig,
        )
    wh = embedding.train_count_model(
        hate, cfg.word_dim, "window", window=cfg.word_window, seed=cfg.rng_seed, cds=cfg.cds, eig=cfg.eig
    )
    for tag, m in (("dh", dh), ("wh", wh)):
        embedding.save_vectors(m, st.path(f"{tag}.vec"), st.path(f"{tag}.freq"))
        # the vector format has no comment syntax, so the hash lives in the sidecar
        text = st.path(f"{tag}.freq").read_text(encoding="utf-8")
        st.path(f"{tag}.freq").write_text(f"# {st.header}\n" + text, encoding="utf-8")
    return EXIT_OK


def do_community(st: Stage) -> int:
    cfg = st.cfg
    g = communitygraph.read_edge_list(st.need("edges"))
    authors = []
    if cfg.authors:
        # user ids are case sensitive, so no lowercasing here
        authors = [
            ln.strip() for ln in Path(st.need("authors")).read_text(encoding="utf-8").splitlines()
            if ln.strip() and not ln.startswith("#")
        ]
    pivots = cfg.pivots or len(g.vertices)
    scores = communitygraph.approx_betweenness(g, pivots, cfg.rng_seed, cfg.directed)
    communitygraph.write_scores(st.path("betweenness.tsv"), scores, st.header)
    extended = communitygraph.extend_seed(g, authors, cfg.extend_k, pivots, cfg.rng_seed, cfg.directed)
    with open(st.path("extended_users.txt"), "w", encoding="utf-8") as fh:
        fh.write(f"# {st.header}\n")
        for v in sorted(extended):
            fh.write(f"{v}\n")
    return EXIT_OK


def do_expand(st: Stage) -> int:
    cfg = st.cfg
    lex = st.lexicon()
    dh = st.model("dh", "similarity")
    params = contextgraph.ExpandParams(
        boost_topn=cfg.boost_topn, topn=cfg.graph_topn, depth=cfg.graph_depth, d=cfg.damping,
        eps=cfg.eps, max_iter=cfg.max_iter, recompute_boost=cfg.recompute_boost,
        teleport_boost=cfg.teleport_boost,
    )
    exp = contextgraph.expand_seed_detailed(lex, dh, st.stats("hate"), st.stats("clean"), params)
    scores = dict(exp.second_pass)
    with open(st.path("expansion.tsv"), "w", encoding="utf-8") as fh:
        fh.write(f"# {st.header}\n")
        for w in exp.words:
            fh.write(f"{w}\t{scores[w]!r}\n")
    with open(st.path("pagerank_first_pass.tsv"), "w", encoding="utf-8") as fh:
        fh.write(f"# {st.header}\n")
        for w, s in exp.first_pass:
            fh.write(f"{w}\t{s!r}\n")
    if exp.graph is not None:
        exp.graph.write_tsv(st.path("expansion_graph.tsv"), st.header)
    log.info("expansion kept %d words", len(exp.words))
    if not exp.converged:
        raise NotConverged(f"PageRank did not converge within max_iter={cfg.max_iter}")
    return EXIT_OK


def _read_candidates(path) -> list[str]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            out.append(line.split("\t", 1)[0].strip())
    return out


def do_surface(st: Stage) -> int:
    cfg = st.cfg
    candidates = _read_candidates(st.need_output("expansion.tsv"))
    if not candidates:
        raise ParameterError("expansion produced no candidate words")
    reports = codeword.surface_codewords(
        candidates, st.model("dh", "similarity"), st.model("wh", "relatedness"), st.lexicon(),
        st.stats("hate"), st.stats("clean"), topn=cfg.search_topn, depth=cfg.search_depth, th=cfg.th,
    )
    codeword.write_reports(reports, st.path("codewords.jsonl"), st.path("codewords.tsv"), st.hash)
    counts = {b: sum(r.bucket == b for r in reports) for b in (codeword.PRIMARY, codeword.SECONDARY)}
    log.info("surfaced %d primary, %d secondary", counts["primary"], counts["secondary"])
    return EXIT_OK


def do_baseline(st: Stage) -> int:
    k = st.cfg.tfidf_k
    tags = ["hate"] + (["keyword"] if st.path("stats_keyword.tsv").exists() else [])
    ranks = {}
    for tag in tags:
        top = corpus.tfidf_rank(st.stats(tag), k)
        ranks[tag] = {w: i + 1 for i, (w, _) in enumerate(top)}
        with open(st.path(f"tfidf_{tag}.tsv"), "w", encoding="utf-8") as fh:
            fh.write(f"# {st.header}\n")
            for w, s in top:
                fh.write(f"{w}\t{s!r}\n")
    report = st.path("codewords.tsv")
    if report.exists():
        with open(st.path("baseline_comparison.tsv"), "w", encoding="utf-8") as fh:
            fh.write(f"# {st.header}\n")
            fh.write("word\tbucket\t" + "\t".join(f"tfidf_rank_{t}" for t in tags) + "\n")
            for line in report.read_text(encoding="utf-8").splitlines():
                if line.startswith("#") or not line:
                    continue
                w, bucket = line.split("\t")
                cols = [str(ranks[t].get(w, "-")) for t in tags]
                fh.write(f"{w}\t{bucket}\t" + "\t".join(cols) + "\n")
    return EXIT_OK


def _read_predictions(path) -> dict[str, str]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"item_id", "label"} <= set(reader.fieldnames):
                raise InputError(f"{path}: header must contain item_id,label")
            return {row["item_id"]: row["label"] for row in reader}
    except OSError as exc:
        raise InputError(f"cannot read predictions {path}: {exc}") from exc


def do_eval(st: Stage) -> int:
    m = evalmetrics.read_annotations(st.need("annotations"))
    result = {"config_hash": st.hash, "n_items": len(m.items), "n_annotators": len(m.annotators)}
    result["alpha_ordinal"] = evalmetrics.krippendorff_alpha(m)
    majority = {i: evalmetrics.majority_label(list(row.values())) for i, row in m.ratings.items()}
    truth = {i: evalmetrics.likert_to_binary(r) for i, r in majority.items()}
    result["majority"] = majority
    result["truth"] = truth
    if st.cfg.predictions:
        pred = _read_predictions(st.need("predictions"))
        missing = sorted(set(truth) - set(pred))
        if missing:
            raise InputError(f"predictions missing for items {missing[:5]}")
        items = sorted(truth)
        ev = evalmetrics.BinaryEval([pred[i] for i in items], [truth[i] for i in items])
        result["confusion_hate"] = ev.confusion(evalmetrics.HATE)
        for cls in (evalmetrics.HATE, evalmetrics.NOT_HATE):
            sc = evalmetrics.precision_recall_f1(ev, cls)
            result[f"scores_{cls}"] = {
                "precision": sc.precision, "recall": sc.recall, "f1": sc.f1, "undefined": sc.undefined,
            }
    with open(st.path("eval.json"), "w", encoding="utf-8") as fh:
        json.dump(result, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def do_run(st: Stage) -> int:
    for step in (do_ingest, do_embed, do_expand, do_surface, do_baseline):
        step(st)
    return EXIT_OK


def write_fixture(out, seed: int = 0, n_docs: int = 2500, dim: int = 50) -> Path:
    """Write the planted fixture corpora, lexicon and a config that uses them."""
    from .synthetic import planted_corpora

    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    fx = planted_corpora(seed=seed, n_docs=n_docs)
    for name, texts, src in (("hate", fx.hate_texts, "hate_community"), ("clean", fx.clean_texts, "clean")):
        docs = [corpus.Document(f"{name}-{i}", t, src) for i, t in enumerate(texts)]
        corpus.write_jsonl(out / f"{name}.jsonl", docs)
    (out / "lexicon.txt").write_text("".join(w + "\n" for w in fx.lexicon), encoding="utf-8")
    (out / "planted.tsv").write_text(
        "".join(f"{b}\t{s}\n" for b, s in sorted(fx.planted.items())), encoding="utf-8"
    )
    cfg = out / "fixture.cfg"
    cfg.write_text(
        f"hate_corpus = {out / 'hate.jsonl'}\n"
        f"clean_corpus = {out / 'clean.jsonl'}\n"
        f"lexicon = {out / 'lexicon.txt'}\n"
        f"word_dim = {dim}\n"
        f"dep_dim = {dim}\n"
        f"rng_seed = {seed}\n",
        encoding="utf-8",
    )
    return cfg


STAGES = {
    "ingest": (do_ingest, "tokenize the corpora and write document statistics"),
    "embed": (do_embed, "train the similarity and relatedness models on the hate corpus"),
    "community": (do_community, "betweenness ranking and seed-user extension on a follower graph"),
    "expand": (do_expand, "expand the seed lexicon with contextual graphs and PageRank"),
    "surface": (do_surface, "bucket expansion candidates as primary/secondary code words"),
    "baseline": (do_baseline, "top-k tf-idf words for comparison with the code-word report"),
    "eval": (do_eval, "annotator agreement and precision/recall/F1"),
    "run": (do_run, "ingest, embed, expand, surface and baseline in one go"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="codewords", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in STAGES.items():
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", "-c", help="flat key = value config file")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
        sp.add_argument("--out", "-o", required=True, help="output directory")
    sp = sub.add_parser("synth", help="write a synthetic planted-code-word fixture")
    sp.add_argument("--out", "-o", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--n-docs", type=int, default=2500)
    sp.add_argument("--dim", type=int, default=50)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        if args.command == "synth":
            if args.n_docs < 1 or args.dim < 1:
                raise ParameterError("--n-docs and --dim must be >= 1")
            print(write_fixture(args.out, args.seed, args.n_docs, args.dim))
            return EXIT_OK
        cfg = load_config(args.config, args.set)
        return STAGES[args.command][0](Stage(cfg, args.out))
    except ParameterError as exc:
        print(f"codewords: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except NotConverged as exc:
        print(f"codewords: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except CodewordsError as exc:
        print(f"codewords: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
