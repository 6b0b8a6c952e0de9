"""Synthetic corpus pair with planted code words, for end-to-end checks.

Generic sentences are drawn from topics, each with its own nouns, verbs and
adjectives. The hate corpus also has "hate frame" sentences whose target
slot holds a seed keyword; for the first ``n_planted`` seeds a benign topic
noun takes the seed's place in most of those sentences. The clean corpus
has only generic sentences (no seed keywords), where the benign words keep
their ordinary topical use. The hate corpus leans toward a few topics.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

DETERMINERS = "the a these those this that all".split()
PREPOSITIONS = "of to in on with for at by from".split()
PRONOUNS = "they we you it".split()
FUNCTION_WORDS = DETERMINERS + PREPOSITIONS + PRONOUNS

_ONSETS = "b c d f g h j k l m n p r s t v z br cr dr gr pl st tr".split()
_VOWELS = "a e i o u".split()


def _pseudo_words(rng: random.Random, n: int, taken: set, syllables=(2, 3)) -> list[str]:
    out = []
    while len(out) < n:
        w = "".join(rng.choice(_ONSETS) + rng.choice(_VOWELS) for _ in range(rng.choice(syllables)))
        # trailing s would collide with the plural variant rules
        if w in taken or w.endswith("s"):
            continue
        taken.add(w)
        out.append(w)
    return out


@dataclass
class PlantedFixture:
    hate_texts: list[str]
    clean_texts: list[str]
    lexicon: list[str]
    planted: dict[str, str]  # benign word -> seed word it stands in for
    vocab: set[str] = field(default_factory=set)


@dataclass
class _Topic:
    nouns: list[str]
    verbs: list[str]
    adjs: list[str]


def planted_corpora(
    seed: int = 0,
    n_docs: int = 2500,
    n_seeds: int = 5,
    n_planted: int = 5,
    substitution_rate: float = 0.65,
    frame_rate: float = 0.35,
    n_topics: int = 6,
    topic_size: tuple = (30, 10, 8),
    n_frame_words: int = 12,
    specificity: float = 0.9,
    favored_topics: int = 3,
    favored_weight: float = 3.0,
    sentences_per_doc: int = 1,
) -> PlantedFixture:
    """Generate the hate/clean corpus pair.

    ``substitution_rate`` is the share of a planted seed's frame sentences
    in which the benign word replaces it; ``specificity`` is how often a
    frame uses the seed's own verb and adjective rather than shared ones.
    The first ``favored_topics`` topics are ``favored_weight`` times more
    likely in the hate corpus.
    """
    rng = random.Random(seed)
    taken = set(FUNCTION_WORDS)
    n_n, n_v, n_a = topic_size
    topics = [
        _Topic(_pseudo_words(rng, n_n, taken), _pseudo_words(rng, n_v, taken), _pseudo_words(rng, n_a, taken))
        for _ in range(n_topics)
    ]
    hate_adjs = _pseudo_words(rng, n_frame_words, taken)
    hate_verbs = _pseudo_words(rng, n_frame_words, taken)
    seeds = _pseudo_words(rng, n_seeds, taken, syllables=(2,))
    # each seed has its own collocates so a stand-in word inherits that signature
    seed_verbs = [_pseudo_words(rng, 2, taken) for _ in seeds]
    seed_adjs = [_pseudo_words(rng, 2, taken) for _ in seeds]
    # benign stand-ins come from topics the hate corpus does not favor
    benign = [topics[-1 - i].nouns[0] for i in range(n_planted)]
    planted = dict(zip(benign, seeds[:n_planted]))

    det = lambda: rng.choice(DETERMINERS)
    prep = lambda: rng.choice(PREPOSITIONS)

    def generic(weights) -> str:
        t = rng.choices(topics, weights)[0]
        noun = lambda: rng.choice(t.nouns)
        k = rng.randrange(3)
        if k == 0:
            parts = [det(), rng.choice(t.adjs), noun(), rng.choice(t.verbs), prep(), noun()]
        elif k == 1:
            parts = [noun(), rng.choice(t.verbs), det(), rng.choice(t.adjs), noun()]
        else:
            parts = [rng.choice(PRONOUNS), rng.choice(t.verbs), det(), noun()]
        return " ".join(parts)

    def frame() -> str:
        i = rng.randrange(len(seeds))
        slot = seeds[i]
        if i < n_planted and rng.random() < substitution_rate:
            slot = benign[i]
        verb = rng.choice(seed_verbs[i]) if rng.random() < specificity else rng.choice(hate_verbs)
        adj = rng.choice(seed_adjs[i]) if rng.random() < specificity else rng.choice(hate_adjs)
        obj = rng.choice(rng.choice(topics[:favored_topics]).nouns)
        k = rng.randrange(3)
        if k == 0:
            parts = [det(), adj, slot, verb, prep(), obj]
        elif k == 1:
            parts = [det(), slot, verb, det(), rng.choice(hate_adjs), obj]
        else:
            parts = [obj, rng.choice(hate_verbs), det(), adj, slot, verb]
        return " ".join(parts)

    uniform = [1.0] * n_topics
    skewed = [favored_weight if i < favored_topics else 1.0 for i in range(n_topics)]
    def doc(hate_side):
        sents = []
        for _ in range(sentences_per_doc):
            if hate_side:
                sents.append(frame() if rng.random() < frame_rate else generic(skewed))
            else:
                sents.append(generic(uniform))
        return " . ".join(sents)

    hate = [doc(True) for _ in range(n_docs)]
    clean = [doc(False) for _ in range(n_docs)]

    vocab = set(FUNCTION_WORDS) | set(hate_adjs) | set(hate_verbs) | set(seeds)
    for t in topics:
        vocab |= set(t.nouns) | set(t.verbs) | set(t.adjs)
    for vs in (*seed_verbs, *seed_adjs):
        vocab |= set(vs)
    return PlantedFixture(hate, clean, list(seeds), planted, vocab)
