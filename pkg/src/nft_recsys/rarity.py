"""Trait rarity scoring over a collection's frequency table.

A trait's rarity is the inverse of its relative frequency: with ``count``
tokens carrying the trait out of ``total_supply`` loaded tokens, the score
is ``total_supply / count`` (1.0 for a trait every token has, and
``total_supply`` for a unique trait). A token's total rarity is the sum of
its distinct traits' scores.

Frequency counting uses token-level presence: a trait listed twice inside
one token still counts once here, unlike the similarity module where the
count vector keeps multiplicities. Totals are summed in ascending
trait-string order so parallel scoring stays bit-deterministic.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Mapping, Sequence

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import RarityDomainError, UnknownTraitError
from .model import Collection, Token, TokenRef, trait_document
from .validation import check_tokens


@dataclass(frozen=True)
class TraitFrequencyTable:
    """Occurrence count per trait string plus the collection supply."""

    counts: Mapping[str, int]
    total_supply: int

    def __post_init__(self):
        object.__setattr__(self, "counts", dict(self.counts))
        if self.counts and self.total_supply < 1:
            raise ValueError("total_supply must be >= 1 for a non-empty table")
        for term, count in self.counts.items():
            if not 1 <= count <= self.total_supply:
                raise ValueError(
                    f"count {count} for {term!r} outside 1..{self.total_supply}"
                )

    def count_of(self, term: str) -> int:
        try:
            return self.counts[term]
        except KeyError:
            raise UnknownTraitError(
                f"trait string {term!r} is not in the frequency table; "
                "the table was built over a different collection"
            ) from None


def frequencies_from_documents(
    documents: Sequence[Sequence[str]], total_supply: int
) -> TraitFrequencyTable:
    counts: dict[str, int] = {}
    for doc in documents:
        for term in set(doc):
            counts[term] = counts.get(term, 0) + 1
    return TraitFrequencyTable(counts=counts, total_supply=total_supply)


def count_frequencies(collection: Collection) -> TraitFrequencyTable:
    """Token-level presence counts for every trait string in the collection."""
    return frequencies_from_documents(
        (trait_document(t) for t in collection.tokens), collection.total_supply
    )


def trait_rarity(trait_count: int, total_supply: int) -> float:
    """Rarity of one trait: total supply over the trait's token count."""
    if not 1 <= trait_count <= total_supply:
        raise RarityDomainError(
            f"trait_count must be in 1..total_supply ({total_supply}), got {trait_count}"
        )
    return total_supply / trait_count


def _total_from_document(doc: Sequence[str], table: TraitFrequencyTable) -> float:
    total = 0.0
    for term in sorted(set(doc)):
        total += trait_rarity(table.count_of(term), table.total_supply)
    return total


def total_rarity(token: Token, table: TraitFrequencyTable) -> float:
    """Sum of rarity scores over the token's distinct trait strings."""
    return _total_from_document(trait_document(token), table)


def totals_from_documents(
    documents: Sequence[Sequence[str]], table: TraitFrequencyTable
) -> list[float]:
    return [_total_from_document(doc, table) for doc in documents]


@dataclass(frozen=True)
class TokenRarity:
    per_trait: Mapping[str, float]
    total: float


@dataclass(frozen=True)
class RarityReport:
    """Per-token rarity breakdown for a whole collection."""

    per_token: Mapping[TokenRef, TokenRarity]


def build_rarity_report(collection: Collection, table: TraitFrequencyTable | None = None) -> RarityReport:
    if table is None:
        table = count_frequencies(collection)
    per_token: dict[TokenRef, TokenRarity] = {}
    for token in collection.tokens:
        per_trait = {
            term: trait_rarity(table.count_of(term), table.total_supply)
            for term in sorted(set(trait_document(token)))
        }
        per_token[token.ref] = TokenRarity(per_trait=per_trait, total=total_rarity(token, table))
    return RarityReport(per_token=per_token)


def write_totals_csv(report: RarityReport, path) -> None:
    """CSV export, one row per token: reference_id,total_rarity."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["reference_id", "total_rarity"])
        for ref, rarity in report.per_token.items():
            writer.writerow([ref.display(), repr(rarity.total)])


def write_per_trait_csv(report: RarityReport, path) -> None:
    """Long-format CSV export: reference_id,trait,rarity."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["reference_id", "trait", "rarity"])
        for ref, rarity in report.per_token.items():
            for term, score in rarity.per_trait.items():
                writer.writerow([ref.display(), term, repr(score)])


class TraitRarityScorer(BaseEstimator, TransformerMixin):
    """Learns a collection's trait frequencies and scores tokens by total
    trait rarity: fit() counts, transform() returns one total per token."""

    def fit(self, X: Sequence[Token], y=None) -> "TraitRarityScorer":
        tokens = check_tokens(X)
        self.frequency_table_ = frequencies_from_documents(
            (trait_document(t) for t in tokens), len(tokens)
        )
        return self

    def transform(self, X: Sequence[Token]) -> list[float]:
        check_is_fitted(self, "frequency_table_")
        return [total_rarity(t, self.frequency_table_) for t in check_tokens(X)]
