"""Input validation helpers shared by the estimators and query functions."""
from __future__ import annotations

from typing import Sequence

from .model import SCOPES, Collection, Token


def check_scope(scope: str) -> str:
    if scope not in SCOPES:
        raise ValueError(f"unknown scope {scope!r}: expected one of {SCOPES}")
    return scope


def check_tokens(X) -> tuple[Token, ...]:
    """Accept a Collection or any sequence of Tokens."""
    if isinstance(X, Collection):
        return X.tokens
    tokens = tuple(X)
    for i, t in enumerate(tokens):
        if not isinstance(t, Token):
            raise TypeError(f"expected Token at position {i}, got {type(t).__name__}")
    return tokens


def check_collection(X) -> Collection:
    if not isinstance(X, Collection):
        raise TypeError(f"expected a Collection, got {type(X).__name__}")
    return X


def check_k(k) -> int:
    if isinstance(k, bool) or not isinstance(k, int):
        raise TypeError(f"k must be an integer, got {k!r}")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    return k
