"""Acceptance suite: one test per release criterion, one line per result.

The random-instance criteria all draw from the same seeded family of
synthetic collections (n in [2, 200], at most 30 trait types with at most
10 values each) so failures reproduce exactly.
"""
import math
import random
import time

import numpy as np
import pytest

from nft_recsys.cli import main
from nft_recsys.evaluate import cross_evaluate
from nft_recsys.indexing import RecommenderIndex, load_index
from nft_recsys.ingest import (
    FetchConfig,
    RateLimiter,
    SnapshotStore,
    fetch_assets,
    replay_snapshots,
    write_collection_json,
)
from nft_recsys.model import Collection
from nft_recsys.rarity import count_frequencies, total_rarity, trait_rarity
from nft_recsys.recommend import recommend, recommend_by_rarity, recommend_by_traits
from nft_recsys.similarity import build_vocabulary, similarity_row, vectorize, CountMatrix

from httpstub import FakeClock, FakeSession, asset, start_stub_server
from oracles import (
    brute_force_rarity_top_k,
    brute_force_totals,
    brute_force_traits_top_k,
    dense_cosine_matrix,
    dense_count_matrix,
)
from synthdata import bayc_like_collection, random_collection

N_INSTANCES = 500
SEEDS = range(N_INSTANCES)


def _instances():
    for seed in SEEDS:
        yield seed, random_collection(random.Random(seed))


def _pass(name, detail=""):
    suffix = f" ({detail})" if detail else ""
    print(f"[PASS] {name}{suffix}")


def test_oracle_equivalence_500_instances():
    """Both recommenders match the exhaustive full-sort oracle exactly."""
    checked = 0
    for seed, coll in _instances():
        index = RecommenderIndex().fit(coll)
        rng = random.Random(seed + 1_000_003)
        ref_row = rng.randrange(len(coll))
        ref = coll.tokens[ref_row].ref
        ks = [10]
        if seed % 10 == 0:
            ks += [0, 1, len(coll)]
        for k in ks:
            got = recommend_by_traits(ref, k, index)
            expected = brute_force_traits_top_k(coll, ref_row, k)
            assert [r.ref for r in got] == [coll.tokens[j].ref for j, _ in expected], (
                f"traits order mismatch: seed={seed} ref={ref.display()} k={k}"
            )
            for r, (_, score) in zip(got, expected):
                assert abs(r.score - score) <= 1e-12 * max(1.0, abs(score))

            got = recommend_by_rarity(ref, k, index)
            expected = brute_force_rarity_top_k(coll, ref_row, k)
            assert [r.ref for r in got] == [coll.tokens[j].ref for j, _ in expected], (
                f"rarity order mismatch: seed={seed} ref={ref.display()} k={k}"
            )
            for r, (_, score) in zip(got, expected):
                assert abs(r.score - score) <= 1e-12 * max(1.0, abs(score))
            checked += 1
    _pass("oracle equivalence", f"{N_INSTANCES} instances, {checked} (ref, k) queries")


def test_rarity_conservation_500_instances():
    """Totals sum to (distinct traits) x supply; each trait contributes
    exactly the supply across its carriers."""
    for seed, coll in _instances():
        table = count_frequencies(coll)
        supply = coll.total_supply
        totals = [total_rarity(t, table) for t in coll.tokens]
        expected = len(table.counts) * supply
        if expected:
            assert abs(sum(totals) - expected) <= 1e-9 * expected, f"seed={seed}"
        for term, count in table.counts.items():
            contribution = trait_rarity(count, supply) * count
            assert abs(contribution - supply) <= 1e-9 * supply, f"seed={seed} {term!r}"
    _pass("rarity conservation", f"{N_INSTANCES} instances")


def test_cosine_properties_500_instances():
    """Scores in [0, 1], symmetric, exact self-similarity; the canonical
    half-overlap pair scores 0.5 to 1e-12."""
    docs = [["a", "b"], ["b", "c"]]
    vocab = build_vocabulary(docs)
    matrix = CountMatrix([vectorize(d, vocab) for d in docs], n_columns=len(vocab))
    assert abs(similarity_row(0, matrix)[1] - 0.5) <= 1e-12

    full, sampled = 0, 0
    for seed, coll in _instances():
        documents = coll.documents()
        vocab = build_vocabulary(documents)
        matrix = CountMatrix(
            [vectorize(d, vocab) for d in documents], n_columns=len(vocab)
        )
        n = len(coll)
        if n <= 100:
            rows = list(range(n))
            full += 1
        else:
            rng = random.Random(seed + 7)
            rows = sorted(rng.sample(range(n), 25))
            sampled += 1
        mine = np.array([similarity_row(i, matrix) for i in rows])
        assert mine.min() >= 0.0 and mine.max() <= 1.0, f"seed={seed}"

        dense, _ = dense_count_matrix(documents)
        oracle = dense_cosine_matrix(dense)[rows]
        assert np.abs(mine - oracle).max() <= 1e-12, f"seed={seed}"

        # Symmetry across the sampled block; exact because both entries
        # divide the same integer dot by the same sqrt.
        sub = mine[:, rows]
        assert np.array_equal(sub, sub.T), f"seed={seed}"

        for offset, i in enumerate(rows):
            expected = 1.0 if documents[i] else 0.0
            assert mine[offset, i] == expected, f"seed={seed} row={i}"
    _pass("cosine properties", f"{full} full + {sampled} sampled instances")


def test_paper_scale_run(tmp_path, capsys):
    """10,000-token collection with a BAYC-like trait profile: index in
    under 60 s, answer a k=10 both-models query in under 1 s, stay under
    1 GB of resident memory."""
    psutil = pytest.importorskip("psutil")

    coll = bayc_like_collection(random.Random(2021), n_tokens=10_000)
    assert len(coll) == 10_000
    coll_dir = tmp_path / "coll"
    coll_dir.mkdir()
    write_collection_json(coll, coll_dir / "collection.json")

    idx_dir = tmp_path / "idx"
    started = time.perf_counter()
    assert main(["index", "--collection", str(coll_dir), "--out", str(idx_dir)]) == 0
    index_seconds = time.perf_counter() - started
    assert index_seconds < 60.0, f"indexing took {index_seconds:.1f}s"

    ref = coll.tokens[4242].ref.display()
    started = time.perf_counter()
    assert (
        main(
            ["recommend", "--index", str(idx_dir), "--ref", ref, "--model", "both", "-k", "10"]
        )
        == 0
    )
    query_seconds = time.perf_counter() - started
    assert query_seconds < 1.0, f"query took {query_seconds:.2f}s"
    capsys.readouterr()

    rss = psutil.Process().memory_info().rss
    assert rss < 1 * 1024**3, f"resident memory {rss / 1e6:.0f} MB"
    _pass(
        "paper-scale run",
        f"index {index_seconds:.1f}s, query {query_seconds * 1000:.0f}ms, rss {rss / 1e6:.0f}MB",
    )


def test_evaluation_frame_dominance_500_instances():
    """The traits model owns the cosine axis and the rarity model owns the
    rarity axis in every exported frame."""
    for seed, coll in _instances():
        index = RecommenderIndex().fit(coll)
        rng = random.Random(seed + 31)
        ref_row = rng.randrange(len(coll))
        ref = coll.tokens[ref_row].ref
        frame = cross_evaluate(ref, 10, index)

        traits_rows = [r for r in frame.rows if r.rank_traits is not None]
        rarity_rows = [r for r in frame.rows if r.rank_rarity is not None]

        if traits_rows and rarity_rows:
            mean_traits = sum(r.cosine_to_reference for r in traits_rows) / len(traits_rows)
            mean_rarity = sum(r.cosine_to_reference for r in rarity_rows) / len(rarity_rows)
            assert mean_traits >= mean_rarity - 1e-12, f"seed={seed}"

        ref_total = index.rarity_totals_[ref_row]
        selected = {index.row_index(r.id) for r in rarity_rows}
        outside = [
            j for j in range(len(coll)) if j != ref_row and j not in selected
        ]
        if rarity_rows and outside:
            worst = max(abs(r.total_rarity - ref_total) for r in rarity_rows)
            best_excluded = min(abs(index.rarity_totals_[j] - ref_total) for j in outside)
            assert worst <= best_excluded, f"seed={seed}"
    _pass("evaluation-figure dominance", f"{N_INSTANCES} instances")


def test_determinism_across_permutation_and_interfaces(tmp_path, capsys):
    """Permuted input order leaves query output bytes identical, and the
    HTTP body equals the CLI stdout for the same query."""
    from fastapi.testclient import TestClient

    from nft_recsys.server import create_app

    rng = random.Random(99)
    coll = random_collection(rng, n_tokens=80)
    order = list(range(len(coll)))
    rng.shuffle(order)
    permuted = Collection(tokens=[coll.tokens[i] for i in order], contract=coll.contract)
    ref = coll.tokens[11].ref

    outputs = []
    index_dirs = []
    for tag, c in (("a", coll), ("b", permuted)):
        coll_dir = tmp_path / f"coll-{tag}"
        coll_dir.mkdir()
        write_collection_json(c, coll_dir / "collection.json")
        idx = tmp_path / f"idx-{tag}"
        assert main(["index", "--collection", str(coll_dir), "--out", str(idx)]) == 0
        capsys.readouterr()
        assert (
            main(
                ["recommend", "--index", str(idx), "--ref", ref.display(), "--model", "both", "-k", "10"]
            )
            == 0
        )
        outputs.append(capsys.readouterr().out)
        index_dirs.append(idx)
    assert outputs[0] == outputs[1]

    client = TestClient(create_app(load_index(index_dirs[0])))
    response = client.get(
        f"/recommendations/{ref.contract}/{ref.token_id}",
        params={"model": "both", "k": 10},
    )
    assert response.content.decode("utf-8") == outputs[0]
    _pass("determinism", "permutation-stable bytes; CLI == HTTP")


def test_ingestion_round_trip_rate_and_backoff(tmp_path):
    """Snapshot replay equals the live parse, request spacing respects the
    rate on a virtual clock, and a 429 page succeeds after backoff."""
    records = [asset(i) for i in range(120)]

    # Live fetch vs replay of the persisted snapshots.
    store = SnapshotStore(tmp_path / "live")
    clock = FakeClock()
    session = FakeSession(records)
    cfg = FetchConfig(
        api_base="https://api.example/assets",
        contract=records[0]["asset_contract"]["address"],
        page_size=50,
        rate_limit=4.0,
        api_key=None,
    )
    live = fetch_assets(cfg, store, session=session, clock=clock.monotonic, sleep=clock.sleep)
    assert replay_snapshots(store) == live
    assert len(live) == 120

    # Rate-limiter spacing on a virtual clock.
    clock = FakeClock()
    limiter = RateLimiter(4.0, clock=clock.monotonic, sleep=clock.sleep)
    starts = [limiter.acquire() for _ in range(12)]
    assert all(b - a >= 0.25 - 1e-9 for a, b in zip(starts, starts[1:]))
    for t in starts:
        assert sum(1 for s in starts if t <= s < t + 1.0) <= math.ceil(4.0)

    # 429 -> backoff -> success against a real stub server.
    server, base_url = start_stub_server(records, fail_plan={0: 2})
    try:
        sleeps = []
        cfg = FetchConfig(
            api_base=base_url,
            contract=records[0]["asset_contract"]["address"],
            page_size=50,
            rate_limit=1000.0,
            max_retries=5,
            api_key=None,
        )
        store = SnapshotStore(tmp_path / "stub")
        coll = fetch_assets(cfg, store, sleep=sleeps.append)
        assert len(coll) == 120
        assert [s for s in sleeps if s >= 1.0] == [1.0, 2.0]
        assert replay_snapshots(store) == coll
    finally:
        server.shutdown()
    _pass("ingestion", "replay == live; spacing >= 1/rate; 429 backoff path")
