"""Pipeline configuration: a flat ``key = value`` text file.

Every tunable has a default, so an empty file gives the reference setup.
The resolved configuration is written next to each stage's outputs along
with a short hash that is stamped into every artifact.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields

from .errors import InputError, ParameterError


@dataclass
class PipelineConfig:
    # inputs
    hate_corpus: str = ""
    clean_corpus: str = ""
    keyword_corpus: str = ""
    lexicon: str = ""
    stopwords: str = ""
    dependencies: str = ""
    edges: str = ""
    authors: str = ""
    annotations: str = ""
    predictions: str = ""
    # seed expansion
    boost_topn: int = 20
    graph_topn: int = 3
    graph_depth: int = 2
    damping: float = 0.85
    eps: float = 1e-10
    max_iter: int = 200
    recompute_boost: bool = True
    teleport_boost: bool = False
    # code-word search
    search_topn: int = 5
    search_depth: int = 2
    th: float = 0.2
    # embeddings
    word_dim: int = 300
    dep_dim: int = 200
    word_window: int = 5
    position_window: int = 1
    cds: float = 1.0
    eig: float = 0.5
    # community graph
    extend_k: int = 100
    pivots: int = 0  # 0 means every vertex, i.e. exact betweenness
    directed: bool = True
    # misc
    tfidf_k: int = 50
    rng_seed: int = 0

    def validate(self) -> "PipelineConfig":
        positive = (
            "boost_topn", "graph_topn", "graph_depth", "max_iter", "search_topn",
            "search_depth", "word_dim", "dep_dim", "word_window", "position_window",
        )
        for name in positive:
            if getattr(self, name) < 1:
                raise ParameterError(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("extend_k", "pivots", "tfidf_k"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not 0 < self.damping < 1:
            raise ParameterError(f"damping must be in (0, 1), got {self.damping}")
        if not 0 <= self.th <= 1:
            raise ParameterError(f"th must be in [0, 1], got {self.th}")
        if not self.eps > 0:
            raise ParameterError(f"eps must be > 0, got {self.eps}")
        if self.cds <= 0:
            raise ParameterError(f"cds must be > 0, got {self.cds}")
        return self

    def resolved_text(self) -> str:
        return "".join(f"{f.name} = {_fmt(getattr(self, f.name))}\n" for f in fields(self))

    def hash(self) -> str:
        return hashlib.sha256(self.resolved_text().encode("utf-8")).hexdigest()[:16]

    def update(self, pairs: dict) -> "PipelineConfig":
        types = {f.name: f.type for f in fields(self)}
        for key, raw in pairs.items():
            if key not in types:
                raise ParameterError(f"unknown config key {key!r}")
            setattr(self, key, _parse(key, types[key], raw))
        return self


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def _parse(key, typ, raw: str):
    raw = raw.strip()
    try:
        if typ in (bool, "bool"):
            low = raw.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        if typ in (int, "int"):
            return int(raw)
        if typ in (float, "float"):
            return float(raw)
    except ValueError:
        raise ParameterError(f"config key {key!r}: cannot parse {raw!r} as {typ}") from None
    return raw


def parse_pairs(lines, origin: str = "<config>") -> dict:
    out = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"{origin}: line {lineno} is not 'key = value'")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def load_config(path=None, overrides=None) -> PipelineConfig:
    """Defaults, then the file (if any), then ``overrides`` (``key=value`` strings)."""
    cfg = PipelineConfig()
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                cfg.update(parse_pairs(fh.read().splitlines(), str(path)))
        except OSError as exc:
            raise InputError(f"cannot read config {path}: {exc}") from exc
    if overrides:
        cfg.update(parse_pairs(overrides, "--set"))
    return cfg.validate()
