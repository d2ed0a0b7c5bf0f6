"""Input checks shared by the estimator wrappers."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_consistent_length

from .corpus import Sentence


def _as_text(value, what: str) -> str:
    if isinstance(value, Sentence):
        return str(value)
    if isinstance(value, (str, np.str_)):
        return str(value)
    if isinstance(value, (list, tuple)) and all(isinstance(v, str) for v in value):
        return " ".join(value)
    raise TypeError(f"{what} must be text, got {type(value).__name__}")


def check_sentences(X, name: str = "X") -> list[str]:
    """Coerce a 1-D collection of sentences (strings, token lists or Sentences) to strings."""
    if isinstance(X, str):
        raise TypeError(f"{name} must be a sequence of sentences, not a single string")
    if isinstance(X, np.ndarray):
        if X.ndim == 2 and X.shape[1] == 1:
            X = X[:, 0]
        elif X.ndim != 1:
            raise ValueError(f"{name} must be 1-D, got shape {X.shape}")
    return [_as_text(x, name) for x in X]


def check_text_columns(X, n_columns=(2, 3), name: str = "X") -> list[tuple[str, ...]]:
    """Rows of (source, hypothesis[, reference]) text."""
    rows = [tuple(row) for row in X]
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise ValueError(f"{name} rows have inconsistent widths {sorted(widths)}")
    if rows and widths.pop() not in n_columns:
        raise ValueError(f"{name} must have {' or '.join(map(str, n_columns))} columns")
    return [tuple(_as_text(v, name) for v in r) for r in rows]


def check_paired(X, y) -> tuple[list[str], list[str]]:
    X = check_sentences(X, "X")
    y = check_sentences(y, "y")
    check_consistent_length(X, y)
    return X, y
