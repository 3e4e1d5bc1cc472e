"""The query index: a fitted, immutable snapshot of one collection.

``RecommenderIndex.fit`` builds everything both models need (vocabulary,
sparse count matrix, trait frequency table, per-token rarity totals) plus
the lookup tables queries use. Once fitted the index is read-only and safe
to share across threads.

On-disk layout of an index directory:

    vocabulary.txt    one trait string per line; the line number is the column
    matrix.tsv        one row per token: "ref<TAB>col:count,col:count,..."
    collection.json   the collection in the flat token-metadata JSON shape
    meta.json         {"scope": ..., "tokens": ..., "vocabulary": ...}

Loading reproduces the in-memory structures exactly from those files.
"""
from __future__ import annotations

import json
from pathlib import Path

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .errors import IndexFormatError, TokenNotFoundError
from .model import SCOPE_LOCAL, Collection, TokenRef, parse_token_ref
from .rarity import frequencies_from_documents, totals_from_documents
from .similarity import CountMatrix, TraitCountVectorizer, Vocabulary
from .validation import check_collection, check_scope

VOCABULARY_FILE = "vocabulary.txt"
MATRIX_FILE = "matrix.tsv"
COLLECTION_FILE = "collection.json"
META_FILE = "meta.json"


class RecommenderIndex(BaseEstimator):
    """Fitted artifact shared by the recommend, evaluate and serve layers."""

    def __init__(self, scope: str = SCOPE_LOCAL):
        self.scope = scope

    def fit(self, X: Collection, y=None) -> "RecommenderIndex":
        collection = check_collection(X)
        check_scope(self.scope)
        vectorizer = TraitCountVectorizer(scope=self.scope)
        matrix = vectorizer.fit_transform(collection.tokens)
        self._finish_fit(collection, vectorizer, matrix)
        return self

    def _finish_fit(self, collection: Collection, vectorizer: TraitCountVectorizer, matrix: CountMatrix):
        self.collection_ = collection
        self.vectorizer_ = vectorizer
        self.vocabulary_ = vectorizer.vocabulary_
        self.matrix_ = matrix
        # Rarity always works over collection-local trait strings; one
        # document pass feeds both the frequency table and the totals.
        local_documents = collection.documents()
        self.frequency_table_ = frequencies_from_documents(
            local_documents, collection.total_supply
        )
        self.rarity_totals_ = totals_from_documents(local_documents, self.frequency_table_)
        # (numeric id, contract) pairs give the deterministic tie-break order.
        self.sort_keys_ = [
            (int(t.ref.token_id), t.ref.contract) for t in collection.tokens
        ]

    @property
    def n_tokens(self) -> int:
        check_is_fitted(self, "collection_")
        return len(self.collection_)

    def row_index(self, ref: TokenRef) -> int:
        """Row of ``ref`` in the matrix; raises TokenNotFoundError if absent."""
        check_is_fitted(self, "collection_")
        row = self.collection_.index_of(ref)
        if row is None:
            raise TokenNotFoundError(
                f"token {ref.display()} is not in the indexed collection"
            )
        return row


def save_index(index: RecommenderIndex, directory) -> None:
    """Write a fitted index to ``directory`` (created if needed)."""
    check_is_fitted(index, "collection_")
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)

    lines = []
    for term in index.vocabulary_.terms:
        if "\n" in term or "\r" in term:
            raise IndexFormatError(
                f"trait string {term!r} contains a line break and cannot be "
                "persisted in the line-oriented vocabulary file"
            )
        lines.append(term)
    (root / VOCABULARY_FILE).write_text(
        "".join(line + "\n" for line in lines), encoding="utf-8"
    )

    with open(root / MATRIX_FILE, "w", encoding="utf-8", newline="\n") as fh:
        for token, row in zip(index.collection_.tokens, index.matrix_.rows):
            cells = ",".join(f"{col}:{count}" for col, count in row)
            fh.write(f"{token.ref.display()}\t{cells}\n")

    from .ingest import write_collection_json  # local import to avoid a cycle

    write_collection_json(index.collection_, root / COLLECTION_FILE)

    meta = {
        "scope": index.scope,
        "tokens": len(index.collection_),
        "vocabulary": len(index.vocabulary_),
    }
    (root / META_FILE).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def load_index(directory) -> RecommenderIndex:
    """Rebuild a RecommenderIndex from an index directory."""
    root = Path(directory)
    for name in (VOCABULARY_FILE, MATRIX_FILE, COLLECTION_FILE, META_FILE):
        if not (root / name).is_file():
            raise IndexFormatError(f"index directory {root} is missing {name}")

    meta = json.loads((root / META_FILE).read_text(encoding="utf-8"))
    scope = meta.get("scope", SCOPE_LOCAL)

    from .ingest import load_collection

    collection = load_collection(root / COLLECTION_FILE, "erc721-metadata")

    vocab_text = (root / VOCABULARY_FILE).read_text(encoding="utf-8")
    terms = vocab_text.splitlines()
    try:
        vocabulary = Vocabulary(terms)
    except ValueError as exc:
        raise IndexFormatError(f"{root / VOCABULARY_FILE}: {exc}") from None

    rows = []
    with open(root / MATRIX_FILE, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            ref_text, sep, payload = line.partition("\t")
            if not sep:
                raise IndexFormatError(
                    f"{root / MATRIX_FILE}:{lineno}: expected 'ref<TAB>cells'"
                )
            row_pos = lineno - 1
            if row_pos >= len(collection):
                raise IndexFormatError(
                    f"{root / MATRIX_FILE}: more rows than collection tokens"
                )
            expected = collection.tokens[row_pos].ref
            if parse_token_ref(ref_text) != expected:
                raise IndexFormatError(
                    f"{root / MATRIX_FILE}:{lineno}: ref {ref_text} does not match "
                    f"collection token {expected.display()}"
                )
            cells = []
            if payload:
                for cell in payload.split(","):
                    col_text, sep2, count_text = cell.partition(":")
                    if not sep2:
                        raise IndexFormatError(
                            f"{root / MATRIX_FILE}:{lineno}: bad cell {cell!r}"
                        )
                    cells.append((int(col_text), int(count_text)))
            rows.append(tuple(cells))
    if len(rows) != len(collection):
        raise IndexFormatError(
            f"{root / MATRIX_FILE}: {len(rows)} rows for {len(collection)} tokens"
        )

    try:
        matrix = CountMatrix(rows, n_columns=len(vocabulary))
    except ValueError as exc:
        raise IndexFormatError(f"{root / MATRIX_FILE}: {exc}") from None

    index = RecommenderIndex(scope=scope)
    vectorizer = TraitCountVectorizer(scope=scope)
    vectorizer.vocabulary_ = vocabulary
    index._finish_fit(collection, vectorizer, matrix)
    return index
