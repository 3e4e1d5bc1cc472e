"""Top-k recommendation queries over a fitted index.

Both models share one total order: primary score (descending cosine for
the traits model, ascending absolute rarity difference for the rarity
model), then ascending numeric token id, then ascending contract. The
reference token is never a candidate. Selection is a bounded k-element
heap over the score stream, not a full sort.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass

from .errors import RecsysError
from .indexing import RecommenderIndex
from .model import TokenRef
from .similarity import similarity_row
from .validation import check_k

MODEL_TRAITS = "traits"
MODEL_RARITY = "rarity"
MODEL_BOTH = "both"
MODELS = (MODEL_TRAITS, MODEL_RARITY, MODEL_BOTH)


@dataclass(frozen=True)
class RankedRecommendation:
    """One result row: 1-based rank, token, score, producing model."""

    rank: int
    ref: TokenRef
    score: float
    model: str


def recommend_by_traits(ref: TokenRef, k: int, index: RecommenderIndex) -> list[RankedRecommendation]:
    """The k tokens most cosine-similar to ``ref``, best first."""
    k = check_k(k)
    i = index.row_index(ref)
    scores = similarity_row(i, index.matrix_)
    keys = index.sort_keys_
    top = heapq.nsmallest(
        k,
        (j for j in range(len(scores)) if j != i),
        key=lambda j: (-scores[j], keys[j]),
    )
    refs = index.collection_.tokens
    return [
        RankedRecommendation(rank=r, ref=refs[j].ref, score=scores[j], model=MODEL_TRAITS)
        for r, j in enumerate(top, start=1)
    ]


def recommend_by_rarity(ref: TokenRef, k: int, index: RecommenderIndex) -> list[RankedRecommendation]:
    """The k tokens whose total rarity is closest to ``ref``'s, closest first."""
    k = check_k(k)
    i = index.row_index(ref)
    totals = index.rarity_totals_
    target = totals[i]
    keys = index.sort_keys_
    top = heapq.nsmallest(
        k,
        (j for j in range(len(totals)) if j != i),
        key=lambda j: (abs(totals[j] - target), keys[j]),
    )
    refs = index.collection_.tokens
    return [
        RankedRecommendation(
            rank=r, ref=refs[j].ref, score=abs(totals[j] - target), model=MODEL_RARITY
        )
        for r, j in enumerate(top, start=1)
    ]


def recommend(ref: TokenRef, model: str, k: int, index: RecommenderIndex) -> dict[str, list[RankedRecommendation]]:
    """Dispatch to one or both models; returns a model -> results map."""
    if model not in MODELS:
        raise RecsysError(f"unknown model {model!r}: expected one of {MODELS}")
    results: dict[str, list[RankedRecommendation]] = {}
    if model in (MODEL_TRAITS, MODEL_BOTH):
        results[MODEL_TRAITS] = recommend_by_traits(ref, k, index)
    if model in (MODEL_RARITY, MODEL_BOTH):
        results[MODEL_RARITY] = recommend_by_rarity(ref, k, index)
    return results


def recommendation_payload(ref: TokenRef, model: str, k: int, results: dict[str, list[RankedRecommendation]]) -> dict:
    """JSON-ready result shape shared by the CLI and the HTTP API.

    Single-model queries carry a flat results list; "both" nests one list
    per model under the same key.
    """

    def rows(items: list[RankedRecommendation]) -> list[dict]:
        return [
            {"rank": r.rank, "id": r.ref.display(), "score": r.score} for r in items
        ]

    if model == MODEL_BOTH:
        body = {name: rows(items) for name, items in results.items()}
    else:
        body = rows(results[model])
    return {"reference": ref.display(), "model": model, "k": k, "results": body}
