#!/usr/bin/env python3
"""Regenerate the vitest fixtures from the real backend.

Builds a deterministic 50-token collection, serves it through the actual
HTTP app, and captures raw response bytes so UI tests can assert that
displayed values byte-match real payloads.

Usage: python3 tools/make_fixtures.py   (from the frontend/ directory)
"""
import json
import random
from pathlib import Path

from fastapi.testclient import TestClient

from nft_recsys.indexing import RecommenderIndex
from nft_recsys.model import Collection, Token, TokenRef, Trait
from nft_recsys.server import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "test" / "fixtures"
CONTRACT = "0x" + "ab" * 20

TRAIT_TYPES = {
    "Fur": ["Black", "Brown", "Golden", "Cream", "Zombie"],
    "Eyes": ["Bored", "Laser", "Sleepy", "Angry", "3D"],
    "Hat": ["Crown", "Beanie", "Halo", "Fez", "None"],
    "Mouth": ["Grin", "Cigar", "Frown"],
    "Background": ["Blue", "Yellow", "Purple"],
}


def build_collection(n_tokens: int = 50) -> Collection:
    rng = random.Random(7)
    tokens = []
    for i in range(n_tokens):
        traits = []
        for trait_type, values in TRAIT_TYPES.items():
            if rng.random() < 0.9:
                weights = [1.0 / (v + 1) for v in range(len(values))]
                value = rng.choices(values, weights=weights, k=1)[0]
                traits.append(Trait(trait_type, value))
        tokens.append(
            Token(
                ref=TokenRef(CONTRACT, str(i)),
                traits=tuple(traits),
                name=f"Synthetic Ape #{i}",
                image_url=f"https://img.example/{i}.png",
            )
        )
    return Collection(tokens=tuple(tokens), contract=CONTRACT)


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    collection = build_collection()
    index = RecommenderIndex().fit(collection)
    client = TestClient(create_app(index))

    def save(name: str, response):
        assert response.status_code == 200, (name, response.status_code)
        (FIXTURES / name).write_bytes(response.content)
        print(f"wrote {name} ({len(response.content)} bytes)")

    save("tokens.json", client.get("/tokens", params={"offset": 0, "limit": 50}))

    ref = collection.tokens[0].ref
    save(
        "recommendations.json",
        client.get(
            f"/recommendations/{ref.contract}/{ref.token_id}",
            params={"model": "both", "k": 10},
        ),
    )
    save(
        "evaluation.json",
        client.get(f"/evaluation/{ref.contract}/{ref.token_id}", params={"k": 10}),
    )

    # Pivot target: the traits model's top recommendation for token 0.
    body = json.loads((FIXTURES / "recommendations.json").read_text())
    pivot_id = body["results"]["traits"][0]["id"]
    pivot_token_id = pivot_id.rsplit("-", 1)[1]
    save(
        "recommendations-pivot.json",
        client.get(
            f"/recommendations/{ref.contract}/{pivot_token_id}",
            params={"model": "both", "k": 10},
        ),
    )
    save(
        "evaluation-pivot.json",
        client.get(f"/evaluation/{ref.contract}/{pivot_token_id}", params={"k": 10}),
    )

    # Float rendering pairs: backend repr next to the same value as a JSON
    # number, for the formatter round-trip test.
    values = [
        0.0,
        1.0,
        0.5,
        1 / 3,
        2 / 3,
        0.1 + 0.2,
        1e-5,
        1.23e-7,
        9.87e-12,
        0.000123456789,
        12345.6789,
        70000.0,
        3.0000000000000004,
        0.9999999999999999,
    ]
    pairs = [[v, repr(v)] for v in values]
    (FIXTURES / "floats.json").write_text(json.dumps(pairs, indent=2) + "\n")
    print(f"wrote floats.json ({len(pairs)} pairs)")


if __name__ == "__main__":
    main()
