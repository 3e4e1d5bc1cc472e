"""Cross-evaluation of the two models' outputs for one reference token.

Both models' top-k lists are placed on the two opposing metric axes
(cosine to the reference, total rarity) in one frame, which backs both the
CSV/JSON exports and the explorer UI's dual scatter view. An item
recommended by both models appears once with source "both" and both ranks
set, so the frame stays a function of the item id.
"""
from __future__ import annotations

import csv
import json
import statistics
from dataclasses import dataclass

from .errors import RecsysError
from .indexing import RecommenderIndex
from .model import TokenRef, parse_token_ref
from .recommend import recommend_by_rarity, recommend_by_traits
from .serialize import render_json
from .similarity import similarity_row

SOURCE_REFERENCE = "reference"
SOURCE_TRAITS = "traits-model"
SOURCE_RARITY = "rarity-model"
SOURCE_BOTH = "both"

CSV_COLUMNS = (
    "reference_id",
    "item_id",
    "source",
    "cosine_to_reference",
    "total_rarity",
    "rank_traits",
    "rank_rarity",
)


@dataclass(frozen=True)
class FrameRow:
    id: TokenRef
    source: str
    cosine_to_reference: float
    total_rarity: float
    rank_traits: int | None = None
    rank_rarity: int | None = None


@dataclass(frozen=True)
class EvaluationFrame:
    reference: TokenRef
    rows: tuple[FrameRow, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))


def cross_evaluate(ref: TokenRef, k: int, index: RecommenderIndex) -> EvaluationFrame:
    """Run both recommenders at k and compute both metrics for every row.

    Row order: reference first, then the traits-model list in rank order,
    then rarity-model items not already present, in rank order.
    """
    ref_row = index.row_index(ref)
    cosines = similarity_row(ref_row, index.matrix_)
    totals = index.rarity_totals_

    traits_results = recommend_by_traits(ref, k, index)
    rarity_results = recommend_by_rarity(ref, k, index)
    rank_traits = {r.ref: r.rank for r in traits_results}
    rank_rarity = {r.ref: r.rank for r in rarity_results}

    ordered = [ref]
    seen = {ref}
    for r in traits_results:
        ordered.append(r.ref)
        seen.add(r.ref)
    for r in rarity_results:
        if r.ref not in seen:
            ordered.append(r.ref)
            seen.add(r.ref)

    rows = []
    for item in ordered:
        row = index.row_index(item)
        if item == ref:
            source = SOURCE_REFERENCE
        elif item in rank_traits and item in rank_rarity:
            source = SOURCE_BOTH
        elif item in rank_traits:
            source = SOURCE_TRAITS
        else:
            source = SOURCE_RARITY
        rows.append(
            FrameRow(
                id=item,
                source=source,
                cosine_to_reference=cosines[row],
                total_rarity=totals[row],
                rank_traits=rank_traits.get(item),
                rank_rarity=rank_rarity.get(item),
            )
        )
    return EvaluationFrame(reference=ref, rows=tuple(rows))


def summary_stats(frame: EvaluationFrame) -> dict:
    """Per-source mean/min/max/population-stddev of both metrics.

    Sources with no rows are omitted.
    """
    by_source: dict[str, list[FrameRow]] = {}
    for row in frame.rows:
        by_source.setdefault(row.source, []).append(row)

    stats: dict[str, dict[str, dict[str, float]]] = {}
    for source, rows in by_source.items():
        entry = {}
        for metric in ("cosine_to_reference", "total_rarity"):
            values = [getattr(r, metric) for r in rows]
            entry[metric] = {
                "mean": statistics.fmean(values),
                "min": min(values),
                "max": max(values),
                "stddev": statistics.pstdev(values),
            }
        stats[source] = entry
    return stats


def frame_to_dict(frame: EvaluationFrame) -> dict:
    return {
        "reference": frame.reference.display(),
        "rows": [
            {
                "id": row.id.display(),
                "source": row.source,
                "cosine_to_reference": row.cosine_to_reference,
                "total_rarity": row.total_rarity,
                "rank_traits": row.rank_traits,
                "rank_rarity": row.rank_rarity,
            }
            for row in frame.rows
        ],
    }


def frame_from_dict(payload: dict) -> EvaluationFrame:
    rows = tuple(
        FrameRow(
            id=parse_token_ref(item["id"]),
            source=item["source"],
            cosine_to_reference=item["cosine_to_reference"],
            total_rarity=item["total_rarity"],
            rank_traits=item["rank_traits"],
            rank_rarity=item["rank_rarity"],
        )
        for item in payload["rows"]
    )
    return EvaluationFrame(reference=parse_token_ref(payload["reference"]), rows=rows)


def export_frame(frame: EvaluationFrame, fmt: str, path) -> None:
    """Write the frame as CSV (12-significant-digit reals, empty strings for
    absent ranks) or as JSON mirroring the frame structure."""
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for row in frame.rows:
                writer.writerow(
                    [
                        frame.reference.display(),
                        row.id.display(),
                        row.source,
                        format(row.cosine_to_reference, ".12g"),
                        format(row.total_rarity, ".12g"),
                        "" if row.rank_traits is None else row.rank_traits,
                        "" if row.rank_rarity is None else row.rank_rarity,
                    ]
                )
    elif fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(render_json(frame_to_dict(frame)))
    else:
        raise RecsysError(f"unknown export format {fmt!r}: expected 'csv' or 'json'")


def import_frame(path) -> EvaluationFrame:
    """Read back a JSON export; round-trips the frame exactly."""
    with open(path, encoding="utf-8") as fh:
        return frame_from_dict(json.load(fh))
