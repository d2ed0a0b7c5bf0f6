"""Reading line-aligned parallel text and turning lines into words.

Every metric in this package counts *words*, so subword segmentations
(``@@`` BPE continuations and ``▁`` sentencepiece pieces) can be merged back
at load time.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .exceptions import (
    LineCountMismatch,
    MetaFormatError,
    PosLengthMismatch,
)

PUNCT_CATEGORIES = frozenset(
    {"Po", "Ps", "Pe", "Pi", "Pf", "Pd", "Pc", "Sm", "Sc", "Sk", "So"}
)
BPE_MARKER = "@@"
SP_MARKER = "▁"


def is_punct(surface: str) -> bool:
    """True when every character of ``surface`` is punctuation or a symbol."""
    return bool(surface) and all(
        unicodedata.category(ch) in PUNCT_CATEGORIES for ch in surface
    )


@dataclass(frozen=True)
class Token:
    surface: str
    is_punct: bool

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")

    @classmethod
    def from_surface(cls, surface: str) -> "Token":
        return cls(surface, is_punct(surface))


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    raw: str = ""

    @classmethod
    def from_words(cls, words: Sequence[str]) -> "Sentence":
        words = [w for w in words if w]
        return cls(tuple(Token.from_surface(w) for w in words), " ".join(words))

    @property
    def words(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def __len__(self) -> int:
        return len(self.tokens)

    def __str__(self) -> str:
        return " ".join(self.words)


@dataclass(frozen=True)
class ParallelExample:
    source: Sentence
    hypothesis: Sentence
    reference: Optional[Sentence] = None
    meta: Mapping[str, str] = field(default_factory=dict)
    pos_tags: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.pos_tags is not None and len(self.pos_tags) != len(self.hypothesis):
            raise PosLengthMismatch(0, len(self.pos_tags), len(self.hypothesis))


@dataclass(frozen=True)
class Corpus:
    examples: tuple[ParallelExample, ...]

    @property
    def I(self) -> int:  # noqa: E743 - sentence count, named as in the metric definitions
        return len(self.examples)

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def __getitem__(self, i):
        return self.examples[i]

    @property
    def has_references(self) -> bool:
        return all(ex.reference is not None for ex in self.examples)

    @classmethod
    def from_lines(
        cls,
        sources: Sequence[str],
        hypotheses: Sequence[str],
        references: Optional[Sequence[str]] = None,
        merge_subwords: bool = False,
    ) -> "Corpus":
        """Build a corpus from in-memory strings (handy for tests and notebooks)."""
        if len(hypotheses) != len(sources):
            raise LineCountMismatch("<hypotheses>", len(sources), len(hypotheses))
        if references is not None and len(references) != len(sources):
            raise LineCountMismatch("<references>", len(sources), len(references))
        examples = []
        for i, (s, h) in enumerate(zip(sources, hypotheses)):
            ref = None if references is None else tokenize(references[i], merge_subwords)
            examples.append(
                ParallelExample(tokenize(s, merge_subwords), tokenize(h, merge_subwords), ref)
            )
        return cls(tuple(examples))


def _merge_bpe(pieces: list[str]) -> list[str]:
    words: list[str] = []
    buf = ""
    for piece in pieces:
        if piece.endswith(BPE_MARKER):
            buf += piece[: -len(BPE_MARKER)]
        else:
            words.append(buf + piece)
            buf = ""
    if buf:
        words.append(buf)
    return [w for w in words if w]


def _merge_sentencepiece(pieces: list[str]) -> list[str]:
    words: list[str] = []
    for piece in pieces:
        if piece.startswith(SP_MARKER) or not words:
            words.append(piece.replace(SP_MARKER, ""))
        else:
            words[-1] += piece.replace(SP_MARKER, "")
    return [w for w in words if w]


def merge_pieces(pieces: list[str]) -> list[str]:
    """Join BPE and sentencepiece pieces into words.

    Sentencepiece merging only kicks in when the line carries at least one
    ``▁`` marker, otherwise ordinary words would be glued together.
    """
    if any(p.endswith(BPE_MARKER) for p in pieces):
        pieces = _merge_bpe(pieces)
    if any(SP_MARKER in p for p in pieces):
        pieces = _merge_sentencepiece(pieces)
    return pieces


def tokenize(line: str, merge_subwords: bool = False) -> Sentence:
    """Split ``line`` on whitespace, optionally merging subword pieces first.

    >>> [t.surface for t in tokenize("Feld@@ marschall war", merge_subwords=True)]
    ['Feldmarschall', 'war']
    """
    pieces = line.split()
    if merge_subwords:
        pieces = merge_pieces(pieces)
    return Sentence(tuple(Token.from_surface(p) for p in pieces), line)


def read_lines(path) -> list[str]:
    """Read a UTF-8 file as a list of lines; LF and CRLF endings both work."""
    text = Path(path).read_bytes().decode("utf-8")
    if not text:
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


def parse_meta(line: str, lineno: int = 0) -> dict[str, str]:
    meta = {}
    for field_ in line.split("\t"):
        if not field_.strip():
            continue
        key, sep, value = field_.partition("=")
        if not sep or not key.strip():
            raise MetaFormatError(f"line {lineno}: expected key=value, got {field_!r}")
        meta[key.strip()] = value.strip()
    return meta


def load_parallel(
    source_path,
    hypothesis_path,
    reference_path=None,
    meta_path=None,
    pos_path=None,
    merge_subwords: bool = False,
) -> Corpus:
    """Load line-aligned files into a :class:`Corpus`.

    Line ``i`` of every file contributes to example ``i``. All files must have
    the same number of lines.
    """
    sources = read_lines(source_path)
    n = len(sources)

    def aligned(path):
        if path is None:
            return None
        lines = read_lines(path)
        if len(lines) != n:
            raise LineCountMismatch(path, n, len(lines))
        return lines

    hypotheses = aligned(hypothesis_path)
    references = aligned(reference_path)
    metas = aligned(meta_path)
    pos_lines = aligned(pos_path)

    examples = []
    for i in range(n):
        hyp = tokenize(hypotheses[i], merge_subwords)
        tags = None
        if pos_lines is not None:
            tags = tuple(pos_lines[i].split())
            if len(tags) != len(hyp):
                raise PosLengthMismatch(i + 1, len(tags), len(hyp), pos_path)
        examples.append(
            ParallelExample(
                source=tokenize(sources[i], merge_subwords),
                hypothesis=hyp,
                reference=None if references is None else tokenize(references[i], merge_subwords),
                meta={} if metas is None else parse_meta(metas[i], i + 1),
                pos_tags=tags,
            )
        )
    return Corpus(tuple(examples))
