"""Seeded synthetic collections shared across the test suite."""
from __future__ import annotations

import random

from nft_recsys.model import Collection, Token, TokenRef, Trait

CONTRACT = "0x" + "ab" * 20
OTHER_CONTRACT = "0x" + "cd" * 20


def make_token(token_id, traits, contract: str = CONTRACT, name: str | None = None) -> Token:
    """Token from (trait_type, value) pairs; values may be raw (str or number)."""
    return Token(
        ref=TokenRef(contract, str(token_id)),
        traits=tuple(Trait.from_raw(t, v) for t, v in traits),
        name=name,
    )


def make_collection(token_traits, contract: str = CONTRACT) -> Collection:
    """Collection from a list of trait-pair lists, token ids 0..n-1."""
    tokens = [make_token(i, pairs, contract) for i, pairs in enumerate(token_traits)]
    return Collection(tokens=tokens, contract=contract if tokens else None)


def random_collection(
    rng: random.Random,
    n_tokens: int | None = None,
    max_trait_types: int = 30,
    max_values: int = 10,
    allow_traitless: bool = True,
) -> Collection:
    """Random collection matching the acceptance-scale profile.

    Tokens draw a value for each trait type with probability ~0.8, may
    occasionally repeat a pair (multiplicity matters to the similarity
    side), and may come out traitless.
    """
    n = n_tokens if n_tokens is not None else rng.randint(2, 200)
    n_types = rng.randint(1, max_trait_types)
    values_per_type = [rng.randint(1, max_values) for _ in range(n_types)]

    token_traits = []
    for _ in range(n):
        pairs = []
        for t in range(n_types):
            if rng.random() < 0.8:
                value = f"v{rng.randint(0, values_per_type[t] - 1)}"
                pairs.append((f"type{t}", value))
                if rng.random() < 0.05:
                    pairs.append((f"type{t}", value))
        if pairs or allow_traitless:
            token_traits.append(pairs)
        else:
            token_traits.append([(f"type0", "v0")])
    return make_collection(token_traits)


def bayc_like_collection(rng: random.Random, n_tokens: int = 10_000) -> Collection:
    """Paper-scale profile: ~7 trait types with 20-170 values each and a
    skewed value distribution so rarity scores spread out."""
    n_types = 7
    spec = []
    for t in range(n_types):
        n_values = rng.randint(20, 170)
        weights = [1.0 / (v + 1) for v in range(n_values)]
        spec.append((n_values, weights))

    token_traits = []
    for _ in range(n_tokens):
        pairs = []
        for t, (n_values, weights) in enumerate(spec):
            value = rng.choices(range(n_values), weights=weights, k=1)[0]
            pairs.append((f"type{t}", f"v{value}"))
        token_traits.append(pairs)
    return make_collection(token_traits)
