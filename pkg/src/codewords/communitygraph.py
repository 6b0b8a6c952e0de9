"""Follower-graph analytics used to seed the community crawl.

Edges are stored as ``(s, t)`` meaning *s follows t*. Betweenness is
estimated by Brandes-style pivot sampling: single-source BFS dependency
accumulation from a random subset of sources, scaled by ``|V| / pivots``.
"""

from __future__ import annotations

import logging
import random
from collections import deque
from dataclasses import dataclass, field

from .errors import InputError, ParameterError

log = logging.getLogger(__name__)


@dataclass
class UserGraph:
    vertices: set = field(default_factory=set)
    edges: set = field(default_factory=set)

    def __post_init__(self):
        self.vertices = set(self.vertices)
        self.edges = set(self.edges)
        for s, t in self.edges:
            if s == t:
                raise ParameterError(f"self-loop on {s!r}")
            if s not in self.vertices or t not in self.vertices:
                raise ParameterError(f"edge ({s!r}, {t!r}) has an endpoint outside the vertex set")

    @classmethod
    def from_edges(cls, pairs, vertices=()) -> "UserGraph":
        """Build a graph from ``(follower, followee)`` pairs; self-loops are dropped."""
        verts = set(vertices)
        edges = set()
        for s, t in pairs:
            verts.add(s)
            verts.add(t)
            if s == t:
                log.warning("dropping self-loop on %r", s)
                continue
            edges.add((s, t))
        return cls(verts, edges)

    def adjacency(self, directed: bool = True) -> dict:
        adj = {v: set() for v in self.vertices}
        for s, t in self.edges:
            adj[s].add(t)
            if not directed:
                adj[t].add(s)
        return {v: sorted(n) for v, n in adj.items()}

    def induced(self, keep) -> "UserGraph":
        keep = set(keep)
        return UserGraph(keep, {(s, t) for s, t in self.edges if s in keep and t in keep})


def read_edge_list(path) -> UserGraph:
    """Read ``follower<TAB>followee`` lines."""
    pairs = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2 or not all(parts):
                    raise InputError(f"{path}: line {lineno} is not 'follower<TAB>followee'")
                pairs.append((parts[0], parts[1]))
    except OSError as exc:
        raise InputError(f"cannot read edge list {path}: {exc}") from exc
    return UserGraph.from_edges(pairs)


def _accumulate(order, index, adj, source, scores):
    # one Brandes pass: BFS shortest-path counts, then reverse dependency sweep
    n = len(order)
    sigma = [0] * n
    dist = [-1] * n
    preds: list[list[int]] = [[] for _ in range(n)]
    s = index[source]
    sigma[s] = 1
    dist[s] = 0
    stack = []
    queue = deque([s])
    while queue:
        v = queue.popleft()
        stack.append(v)
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
                preds[w].append(v)
    delta = [0.0] * n
    while stack:
        w = stack.pop()
        for v in preds[w]:
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
        if w != s:
            scores[w] += delta[w]


def approx_betweenness(g: UserGraph, pivots: int, seed=None, directed: bool = True) -> dict:
    """Estimate betweenness from ``pivots`` sampled sources.

    With ``pivots == |V|`` every vertex is a source and the result is the
    exact (unnormalized, ordered-pair) betweenness.
    """
    if not g.vertices:
        return {}
    if pivots < 1 or pivots > len(g.vertices):
        raise ParameterError(f"pivots must be in [1, {len(g.vertices)}], got {pivots}")
    order = sorted(g.vertices)
    index = {v: i for i, v in enumerate(order)}
    adj_named = g.adjacency(directed)
    adj = [[index[w] for w in adj_named[v]] for v in order]

    if pivots == len(order):
        sources = order
    else:
        sources = sorted(random.Random(seed).sample(order, pivots))
    scores = [0.0] * len(order)
    for src in sources:
        _accumulate(order, index, adj, src, scores)
    scale = len(order) / pivots
    return {v: scores[i] * scale for i, v in enumerate(order)}


def extend_seed(g: UserGraph, authors, k: int, pivots: int, seed=None, directed: bool = True) -> set:
    """Add the ``k`` most central non-author vertices to the author set."""
    authors = set(authors)
    missing = authors - g.vertices
    if missing:
        raise ParameterError(f"authors not in graph: {sorted(missing)[:5]}")
    if k < 0:
        raise ParameterError("k must be >= 0")
    others = g.vertices - authors
    if k > len(others):
        log.warning("k=%d exceeds the %d non-author vertices; returning all vertices", k, len(others))
        return set(g.vertices)
    if k == 0:
        return authors
    scores = approx_betweenness(g, pivots, seed, directed)
    ranked = sorted(others, key=lambda v: (-scores[v], v))
    return authors | set(ranked[:k])


def sample_subgraph(g: UserGraph, n: int, seed=None) -> UserGraph:
    """Induced subgraph on ``n`` vertices drawn uniformly without replacement."""
    if n < 1 or n > len(g.vertices):
        raise ParameterError(f"n must be in [1, {len(g.vertices)}], got {n}")
    keep = random.Random(seed).sample(sorted(g.vertices), n)
    return g.induced(keep)


def write_scores(path, scores: dict, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        for v in sorted(scores, key=lambda v: (-scores[v], v)):
            fh.write(f"{v}\t{scores[v]!r}\n")
