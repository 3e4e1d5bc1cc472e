"""Domain model for ERC-721 collections.

Tokens are identified by contract address plus token id, carry an ordered
list of (trait_type, value) traits, and are normalized into lowercase
``type::value`` trait strings that both recommendation models consume.
All types are immutable after construction and safe to share across
threads; the operations in this module are pure functions.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from .errors import DuplicateTokenRefError, TokenRefError, TraitError

ADDRESS_PATTERN = re.compile(r"^0x[0-9a-f]{40}$")
_TOKEN_ID_PATTERN = re.compile(r"^[0-9]+$")

SCOPE_LOCAL = "local"
SCOPE_CROSS = "cross"
SCOPES = (SCOPE_LOCAL, SCOPE_CROSS)


def canonical_address(raw: str) -> str:
    """Lowercase a contract address and validate the 0x + 40 hex shape."""
    addr = raw.strip().lower()
    if not ADDRESS_PATTERN.match(addr):
        raise TokenRefError(
            f"malformed contract address {raw!r}: expected '0x' followed by 40 hex characters"
        )
    return addr


def canonical_token_id(raw: str | int) -> str:
    """Render a token id as its canonical decimal string (no leading zeros)."""
    if isinstance(raw, bool):
        raise TokenRefError(f"invalid token id {raw!r}: expected a non-negative integer")
    if isinstance(raw, int):
        if raw < 0:
            raise TokenRefError(f"invalid token id {raw}: must be non-negative")
        return str(raw)
    text = raw.strip()
    if not _TOKEN_ID_PATTERN.match(text):
        raise TokenRefError(f"invalid token id {raw!r}: expected decimal digits")
    return str(int(text))


def canonical_trait_value(raw: object) -> str:
    """Render a raw trait value as a canonical string.

    Numbers collapse to one spelling per value (no trailing '.0' on
    integral floats) so a trait sourced as 3, "3" or 3.0 maps to a single
    vocabulary entry.
    """
    if raw is None:
        return ""
    if isinstance(raw, bool):
        return "true" if raw else "false"
    if isinstance(raw, float):
        if raw.is_integer():
            return str(int(raw))
        return repr(raw)
    if isinstance(raw, int):
        return str(raw)
    return str(raw)


@dataclass(frozen=True)
class TokenRef:
    """Globally unique token reference: contract address + token id.

    The display form is ``<contract>-<token_id>`` with both components in
    canonical spelling (lowercase address, decimal id).
    """

    contract: str
    token_id: str

    def __post_init__(self):
        object.__setattr__(self, "contract", canonical_address(self.contract))
        object.__setattr__(self, "token_id", canonical_token_id(self.token_id))

    def display(self) -> str:
        return f"{self.contract}-{self.token_id}"

    def __str__(self) -> str:
        return self.display()


def parse_token_ref(text: str) -> TokenRef:
    """Parse a ``<contract>-<token_id>`` reference string.

    The segment before the first hyphen must be a well-formed address;
    the remainder must be a decimal token id. Both are canonicalized.
    """
    head, sep, tail = text.partition("-")
    if not sep:
        raise TokenRefError(f"token reference {text!r} has no '-' separator")
    try:
        contract = canonical_address(head)
    except TokenRefError as exc:
        raise TokenRefError(f"token reference {text!r}: {exc}") from None
    try:
        token_id = canonical_token_id(tail)
    except TokenRefError as exc:
        raise TokenRefError(f"token reference {text!r}: {exc}") from None
    return TokenRef(contract, token_id)


@dataclass(frozen=True)
class Trait:
    """One (trait_type, value) pair; the value is stored canonically."""

    trait_type: str
    value: str

    def __post_init__(self):
        if not isinstance(self.trait_type, str) or not self.trait_type.strip():
            raise TraitError(f"trait_type must be a non-empty string, got {self.trait_type!r}")
        if not isinstance(self.value, str):
            raise TraitError(
                f"trait value must be a string after canonicalization, got {self.value!r}; "
                "use Trait.from_raw for raw metadata values"
            )

    @classmethod
    def from_raw(cls, trait_type: object, value: object) -> "Trait":
        return cls(str(trait_type), canonical_trait_value(value))


def normalize_trait(trait: Trait) -> str:
    """Build the canonical trait string: lowercased, trimmed ``type::value``."""
    return f"{trait.trait_type.strip().lower()}::{trait.value.strip().lower()}"


@dataclass(frozen=True)
class Token:
    """One collection entry with its ordered trait list."""

    ref: TokenRef
    traits: tuple[Trait, ...] = ()
    name: str | None = None
    image_url: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "traits", tuple(self.traits))

    @property
    def trait_count(self) -> int:
        return len(self.traits)


def trait_document(token: Token, scope: str = SCOPE_LOCAL) -> list[str]:
    """Normalized trait strings for one token, input order preserved.

    ``cross`` scope prefixes each string with the token's own contract so
    identically-named traits from different collections stay distinct.
    """
    if scope not in SCOPES:
        raise ValueError(f"unknown scope {scope!r}: expected one of {SCOPES}")
    doc = [normalize_trait(t) for t in token.traits]
    if scope == SCOPE_CROSS:
        prefix = token.ref.contract
        doc = [f"{prefix}::{s}" for s in doc]
    return doc


@dataclass(frozen=True)
class Collection:
    """An ordered set of tokens with unique references.

    ``total_supply`` is defined as the number of loaded tokens, which keeps
    the rarity denominator consistent on partial dumps. ``contract`` is
    informational (the first token's contract for mixed files) and None for
    an empty collection.
    """

    tokens: tuple[Token, ...]
    contract: str | None = None
    name: str | None = None
    _row_of: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.contract is not None:
            object.__setattr__(self, "contract", canonical_address(self.contract))
        row_of: dict[TokenRef, int] = {}
        for i, token in enumerate(self.tokens):
            if token.ref in row_of:
                raise DuplicateTokenRefError(
                    f"duplicate token reference {token.ref.display()} "
                    f"(records {row_of[token.ref]} and {i})"
                )
            row_of[token.ref] = i
        object.__setattr__(self, "_row_of", row_of)

    @property
    def total_supply(self) -> int:
        return len(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, ref: TokenRef) -> bool:
        return ref in self._row_of

    def index_of(self, ref: TokenRef) -> int | None:
        """Row position of ``ref`` in token order, or None if absent."""
        return self._row_of.get(ref)

    def documents(self, scope: str = SCOPE_LOCAL) -> list[list[str]]:
        return [trait_document(t, scope) for t in self.tokens]
