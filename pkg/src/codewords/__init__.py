"""Surfacing hate-speech code words from community and clean corpora.

The pipeline tokenizes two corpora, trains similarity and relatedness word
vectors on the hate corpus, expands a seed lexicon through contextual word
graphs ranked by PageRank, and buckets the expanded words as primary or
secondary code words.
"""

from .errors import (
    CodewordsError,
    DegenerateMatrix,
    DegenerateVector,
    InputError,
    NotInVocabulary,
    ParameterError,
)

__all__ = [
    "CodewordsError",
    "DegenerateMatrix",
    "DegenerateVector",
    "InputError",
    "NotInVocabulary",
    "ParameterError",
]
__version__ = "0.1.0"
