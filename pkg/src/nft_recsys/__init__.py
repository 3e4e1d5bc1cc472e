"""Trait-based NFT recommendation engine.

Two complementary models over one indexed collection: content similarity
(cosine over count-vectorized trait strings) and rarity proximity (closest
total trait-rarity score), plus a cross-evaluation facility, CLI and
read-only HTTP API.
"""

from .errors import (
    DuplicateTokenRefError,
    FetchAbortedError,
    IndexFormatError,
    IngestError,
    RarityDomainError,
    RecsysError,
    TokenNotFoundError,
    TokenRefError,
    TraitError,
    UnknownTraitError,
)
from .evaluate import EvaluationFrame, cross_evaluate, export_frame, import_frame, summary_stats
from .indexing import RecommenderIndex, load_index, save_index
from .ingest import FetchConfig, RawSnapshot, SnapshotStore, fetch_assets, load_collection
from .model import (
    Collection,
    Token,
    TokenRef,
    Trait,
    normalize_trait,
    parse_token_ref,
    trait_document,
)
from .rarity import (
    RarityReport,
    TraitFrequencyTable,
    TraitRarityScorer,
    build_rarity_report,
    count_frequencies,
    total_rarity,
    trait_rarity,
)
from .recommend import (
    RankedRecommendation,
    recommend,
    recommend_by_rarity,
    recommend_by_traits,
)
from .similarity import (
    CountMatrix,
    TraitCountVectorizer,
    Vocabulary,
    build_vocabulary,
    cosine,
    similarity_row,
    vectorize,
)

__version__ = "0.1.0"

__all__ = [
    "Collection",
    "CountMatrix",
    "DuplicateTokenRefError",
    "EvaluationFrame",
    "FetchAbortedError",
    "FetchConfig",
    "IndexFormatError",
    "IngestError",
    "RankedRecommendation",
    "RarityDomainError",
    "RarityReport",
    "RawSnapshot",
    "RecommenderIndex",
    "RecsysError",
    "SnapshotStore",
    "Token",
    "TokenNotFoundError",
    "TokenRef",
    "TokenRefError",
    "Trait",
    "TraitCountVectorizer",
    "TraitError",
    "TraitFrequencyTable",
    "TraitRarityScorer",
    "UnknownTraitError",
    "Vocabulary",
    "build_rarity_report",
    "build_vocabulary",
    "cosine",
    "count_frequencies",
    "cross_evaluate",
    "export_frame",
    "fetch_assets",
    "import_frame",
    "load_collection",
    "load_index",
    "normalize_trait",
    "parse_token_ref",
    "recommend",
    "recommend_by_rarity",
    "recommend_by_traits",
    "save_index",
    "similarity_row",
    "summary_stats",
    "total_rarity",
    "trait_document",
    "trait_rarity",
    "vectorize",
]
