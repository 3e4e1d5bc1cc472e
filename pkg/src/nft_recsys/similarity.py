"""Trait-content similarity: deterministic vocabulary, sparse count matrix,
and on-demand cosine rows.

Counts are plain term frequencies (every trait weighs the same; no IDF).
All dot products and squared norms are exact integers, so scores are
bit-identical across runs and token-order permutations: a score is always
``dot / sqrt(sq_norm_a * sq_norm_b)`` evaluated in float64. The full n x n
cosine matrix is never materialized; one row is computed per query from
per-column postings lists, which costs O(n + matching postings).
"""
from __future__ import annotations

import math
from collections import Counter
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import UnknownTraitError
from .model import SCOPE_LOCAL, Token, trait_document
from .validation import check_scope, check_tokens

# Sparse count vector: ((column, count), ...) with strictly increasing
# columns and all counts >= 1.
CountVector = tuple[tuple[int, int], ...]


class Vocabulary:
    """Immutable trait-string -> column map in ascending lexicographic order."""

    __slots__ = ("_terms", "_column_of")

    def __init__(self, terms: Sequence[str]):
        terms = tuple(terms)
        for a, b in zip(terms, terms[1:]):
            if not a < b:
                raise ValueError(
                    f"vocabulary terms must be strictly ascending: {a!r} !< {b!r}"
                )
        self._terms = terms
        self._column_of = {term: i for i, term in enumerate(terms)}

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, term: str) -> bool:
        return term in self._column_of

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self._terms == other._terms

    def __repr__(self) -> str:
        return f"Vocabulary({len(self._terms)} terms)"

    @property
    def terms(self) -> tuple[str, ...]:
        return self._terms

    def column(self, term: str) -> int:
        try:
            return self._column_of[term]
        except KeyError:
            raise UnknownTraitError(
                f"trait string {term!r} is not in the vocabulary; "
                "the index was built over a different collection"
            ) from None


def build_vocabulary(documents: Iterable[Sequence[str]]) -> Vocabulary:
    """Sorted distinct trait strings across all documents.

    Sorting makes the column assignment independent of token order.
    """
    distinct: set[str] = set()
    for doc in documents:
        distinct.update(doc)
    return Vocabulary(sorted(distinct))


def vectorize(document: Sequence[str], vocabulary: Vocabulary) -> CountVector:
    """Count vector of one document over a fixed vocabulary.

    Raises UnknownTraitError if the document mentions a trait string the
    vocabulary does not contain.
    """
    counts = Counter(document)
    return tuple(sorted((vocabulary.column(term), n) for term, n in counts.items()))


def dot(a: CountVector, b: CountVector) -> int:
    """Exact integer dot product of two sparse count vectors."""
    total = 0
    ia, ib = 0, 0
    while ia < len(a) and ib < len(b):
        ca, va = a[ia]
        cb, vb = b[ib]
        if ca == cb:
            total += va * vb
            ia += 1
            ib += 1
        elif ca < cb:
            ia += 1
        else:
            ib += 1
    return total


def squared_norm(v: CountVector) -> int:
    return sum(n * n for _, n in v)


def _proportional(a: CountVector, b: CountVector) -> bool:
    """True when b is a positive scalar multiple of a (both nonzero)."""
    if not a or len(a) != len(b):
        return False
    a0 = a[0][1]
    b0 = b[0][1]
    for (ca, va), (cb, vb) in zip(a, b):
        if ca != cb or va * b0 != vb * a0:
            return False
    return True


def cosine(a: CountVector, b: CountVector, norm_a: float, norm_b: float) -> float:
    """Cosine similarity given precomputed Euclidean norms.

    Zero-norm vectors score 0 against everything (a traitless token is
    similar to nothing). Proportional nonzero vectors score exactly 1.0,
    which float norm products cannot always deliver on their own.
    """
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    if _proportional(a, b):
        return 1.0
    return dot(a, b) / (norm_a * norm_b)


class CountMatrix:
    """Sparse count vectors for a whole collection, one row per token.

    Beyond the rows and their cached Euclidean norms, the matrix keeps the
    exact integer squared norms and per-column postings lists; both are
    derived data and exist so cosine rows are cheap and bit-reproducible.
    """

    __slots__ = ("rows", "row_norms", "n_columns", "_sq_norms", "_postings")

    def __init__(self, rows: Sequence[CountVector], n_columns: int):
        self.rows: tuple[CountVector, ...] = tuple(rows)
        self.n_columns = n_columns
        for i, row in enumerate(self.rows):
            prev = -1
            for col, count in row:
                if not 0 <= col < n_columns:
                    raise ValueError(f"row {i}: column {col} outside 0..{n_columns - 1}")
                if col <= prev:
                    raise ValueError(f"row {i}: columns not strictly increasing at {col}")
                if count < 1:
                    raise ValueError(f"row {i}: count {count} for column {col} must be >= 1")
                prev = col
        self._sq_norms = [squared_norm(row) for row in self.rows]
        self.row_norms = [math.sqrt(sq) for sq in self._sq_norms]
        postings: dict[int, list[tuple[int, int]]] = {}
        for i, row in enumerate(self.rows):
            for col, count in row:
                postings.setdefault(col, []).append((i, count))
        self._postings = postings

    def __len__(self) -> int:
        return len(self.rows)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CountMatrix)
            and self.rows == other.rows
            and self.n_columns == other.n_columns
        )

    def cosine_row(self, i: int) -> list[float]:
        """Cosine of row ``i`` against every row, self included.

        Dot products are accumulated exactly over the postings lists of
        row i's columns; entry i is 1.0 for a nonzero row, 0.0 otherwise.
        """
        n = len(self.rows)
        if not 0 <= i < n:
            raise IndexError(f"row index {i} outside 0..{n - 1}")
        sq_i = self._sq_norms[i]
        scores = [0.0] * n
        if sq_i == 0:
            return scores
        acc = [0] * n
        for col, count in self.rows[i]:
            for j, other_count in self._postings[col]:
                acc[j] += count * other_count
        sq = self._sq_norms
        for j, d in enumerate(acc):
            if d:
                scores[j] = d / math.sqrt(sq_i * sq[j])
        scores[i] = 1.0
        return scores


def similarity_row(i: int, matrix: CountMatrix) -> list[float]:
    """Scores of token ``i`` against the whole collection (see cosine_row)."""
    return matrix.cosine_row(i)


class TraitCountVectorizer(BaseEstimator, TransformerMixin):
    """Count-vectorizes token trait documents over a learned vocabulary.

    Parameters
    ----------
    scope : {"local", "cross"}
        "local" uses bare ``type::value`` trait strings; "cross" prefixes
        each with the token's contract so multiple collections can share
        one vocabulary.
    """

    def __init__(self, scope: str = SCOPE_LOCAL):
        self.scope = scope

    def fit(self, X: Sequence[Token], y=None) -> "TraitCountVectorizer":
        scope = check_scope(self.scope)
        tokens = check_tokens(X)
        self.vocabulary_ = build_vocabulary(trait_document(t, scope) for t in tokens)
        return self

    def transform(self, X: Sequence[Token]) -> CountMatrix:
        check_is_fitted(self, "vocabulary_")
        scope = check_scope(self.scope)
        tokens = check_tokens(X)
        rows = [vectorize(trait_document(t, scope), self.vocabulary_) for t in tokens]
        return CountMatrix(rows, n_columns=len(self.vocabulary_))

    def fit_transform(self, X: Sequence[Token], y=None) -> CountMatrix:
        # One document pass instead of fit + transform recomputing them.
        scope = check_scope(self.scope)
        tokens = check_tokens(X)
        documents = [trait_document(t, scope) for t in tokens]
        self.vocabulary_ = build_vocabulary(documents)
        rows = [vectorize(doc, self.vocabulary_) for doc in documents]
        return CountMatrix(rows, n_columns=len(self.vocabulary_))

    def feature_names(self) -> list[str]:
        check_is_fitted(self, "vocabulary_")
        return list(self.vocabulary_.terms)
