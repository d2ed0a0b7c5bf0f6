"""Error types raised by copyctl.

Input problems (bad files, misaligned corpora, malformed lexicons) derive
from :class:`InputError`; the command line maps those to exit code 2.
"""


class CopyctlError(Exception):
    """Base class for every error raised by this package."""


class InputError(CopyctlError, ValueError):
    """The caller supplied inputs that violate a documented precondition."""


class LineCountMismatch(InputError):
    def __init__(self, path, expected, found):
        self.path = str(path)
        self.expected = expected
        self.found = found
        super().__init__(
            f"{self.path}: has {found} lines, expected {expected} "
            "(files are not line-aligned)"
        )


class PosLengthMismatch(InputError):
    def __init__(self, line, n_tags, n_tokens, path=None):
        self.line = line
        self.n_tags = n_tags
        self.n_tokens = n_tokens
        self.path = None if path is None else str(path)
        where = f"{self.path}:{line}" if self.path else f"line {line}"
        super().__init__(
            f"{where}: {n_tags} POS tags for {n_tokens} hypothesis tokens"
        )


class MetaFormatError(InputError):
    pass


class MissingPos(InputError):
    pass


class MissingMeta(InputError):
    def __init__(self, key, line=None):
        self.key = key
        self.line = line
        where = "" if line is None else f" (line {line})"
        super().__init__(f"metadata key {key!r} missing{where}")


class EmptyCorpus(InputError):
    pass


class BadDistribution(InputError):
    def __init__(self, word, detail=""):
        self.word = word
        super().__init__(f"bad distribution for {word!r}{': ' + detail if detail else ''}")


class DuplicateEntry(InputError):
    def __init__(self, word):
        self.word = word
        super().__init__(f"duplicate lexicon entry for {word!r}")


class LexiconFormatError(InputError):
    pass


class ModelVocabMismatch(CopyctlError, ValueError):
    pass


class PrefixTooLong(CopyctlError, ValueError):
    pass


class SearchSpaceTooLarge(InputError):
    pass
