"""Exception types shared across the package."""


class CodewordsError(Exception):
    """Base class for package errors."""


class ParameterError(CodewordsError, ValueError):
    """A parameter is outside its allowed range."""


class InputError(CodewordsError):
    """An input file is missing, unreadable or malformed beyond recovery."""


class NotInVocabulary(CodewordsError, KeyError):
    def __init__(self, word):
        super().__init__(word)
        self.word = word

    def __str__(self):
        return f"word not in vocabulary: {self.word!r}"


class DegenerateVector(CodewordsError, ValueError):
    def __init__(self, word):
        super().__init__(word)
        self.word = word

    def __str__(self):
        return f"zero vector for word {self.word!r}; cosine undefined"


class DegenerateMatrix(CodewordsError, ValueError):
    """Expected disagreement is zero, so alpha is undefined."""
