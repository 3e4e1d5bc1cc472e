"""Collection ingestion: local JSON files and a rate-limited assets API.

Two file shapes are supported. "opensea-assets" is a marketplace dump:

    {"assets": [{"token_id": ..., "name": ..., "image_url": ...,
                 "asset_contract": {"address": ...},
                 "traits": [{"trait_type": ..., "value": ...}]}]}

"erc721-metadata" is a flat array of per-token metadata records:

    [{"token_id": ..., "contract": ..., "name": ..., "image": ...,
      "attributes": [{"trait_type": ..., "value": ...}]}]

The HTTP fetcher paginates an OpenSea-compatible assets endpoint strictly
sequentially through a rate limiter, persists every response byte-exact
before parsing it, and resumes from the last fully persisted page after an
abort. Replaying the persisted snapshots through the parser reproduces the
live collection exactly.
"""
from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Sequence
from urllib.parse import urlencode

import requests

from .errors import FetchAbortedError, IngestError, RecsysError, TokenRefError, TraitError
from .model import Collection, Token, TokenRef, Trait

logger = logging.getLogger(__name__)

FORMAT_OPENSEA = "opensea-assets"
FORMAT_ERC721 = "erc721-metadata"
FORMATS = (FORMAT_OPENSEA, FORMAT_ERC721)

API_KEY_ENV = "RECSYS_API_KEY"
BACKOFF_BASE_SECONDS = 1.0


def _require(record: dict, key: str, where: str):
    if key not in record:
        raise IngestError(f"{where}: missing required field {key!r}")
    return record[key]


def _parse_traits(raw, where: str) -> tuple[Trait, ...]:
    if not isinstance(raw, list):
        raise IngestError(f"{where}: traits must be a list, got {type(raw).__name__}")
    traits = []
    for pos, item in enumerate(raw):
        if not isinstance(item, dict):
            raise IngestError(f"{where}: trait {pos} is not an object")
        trait_type = _require(item, "trait_type", f"{where}, trait {pos}")
        value = _require(item, "value", f"{where}, trait {pos}")
        try:
            traits.append(Trait.from_raw(trait_type, value))
        except TraitError as exc:
            raise IngestError(f"{where}, trait {pos}: {exc}") from None
    return tuple(traits)


def _optional_str(record: dict, key: str):
    value = record.get(key)
    return value if isinstance(value, str) else None


def _token_from_asset(record: dict, where: str) -> Token:
    """One token from an opensea-assets record."""
    if not isinstance(record, dict):
        raise IngestError(f"{where}: asset is not an object")
    token_id = _require(record, "token_id", where)
    contract_obj = _require(record, "asset_contract", where)
    if not isinstance(contract_obj, dict):
        raise IngestError(f"{where}: asset_contract must be an object")
    address = _require(contract_obj, "address", f"{where}, asset_contract")
    traits = _parse_traits(_require(record, "traits", where), where)
    try:
        ref = TokenRef(address, token_id)
    except TokenRefError as exc:
        raise IngestError(f"{where}: {exc}") from None
    return Token(
        ref=ref,
        traits=traits,
        name=_optional_str(record, "name"),
        image_url=_optional_str(record, "image_url"),
    )


def _token_from_metadata(record: dict, where: str) -> Token:
    """One token from an erc721-metadata record."""
    if not isinstance(record, dict):
        raise IngestError(f"{where}: record is not an object")
    token_id = _require(record, "token_id", where)
    contract = _require(record, "contract", where)
    traits = _parse_traits(_require(record, "attributes", where), where)
    try:
        ref = TokenRef(contract, token_id)
    except TokenRefError as exc:
        raise IngestError(f"{where}: {exc}") from None
    return Token(
        ref=ref,
        traits=traits,
        name=_optional_str(record, "name"),
        image_url=_optional_str(record, "image"),
    )


def _build_collection(tokens: Sequence[Token], name: str | None = None) -> Collection:
    contract = tokens[0].ref.contract if tokens else None
    return Collection(tokens=tuple(tokens), contract=contract, name=name)


def parse_assets_payload(body: bytes | str, where: str = "assets payload") -> list[Token]:
    """Tokens from one opensea-assets JSON document (file or API page)."""
    try:
        payload = json.loads(body)
    except json.JSONDecodeError as exc:
        raise IngestError(f"{where}: invalid JSON at byte {exc.pos}: {exc.msg}") from None
    if not isinstance(payload, dict):
        raise IngestError(f"{where}: expected a top-level object")
    assets = _require(payload, "assets", where)
    if not isinstance(assets, list):
        raise IngestError(f"{where}: 'assets' must be a list")
    return [_token_from_asset(a, f"{where}, record {i}") for i, a in enumerate(assets)]


def load_collection(path, fmt: str) -> Collection:
    """Load and validate a collection file in one of the documented shapes."""
    if fmt not in FORMATS:
        raise RecsysError(f"unknown format {fmt!r}: expected one of {FORMATS}")
    path = Path(path)
    data = path.read_bytes()
    where = str(path)
    if fmt == FORMAT_OPENSEA:
        tokens = parse_assets_payload(data, where)
        return _build_collection(tokens)
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        raise IngestError(f"{where}: invalid JSON at byte {exc.pos}: {exc.msg}") from None
    if not isinstance(payload, list):
        raise IngestError(f"{where}: expected a top-level array of token records")
    tokens = [
        _token_from_metadata(rec, f"{where}, record {i}") for i, rec in enumerate(payload)
    ]
    return _build_collection(tokens)


def write_collection_json(collection: Collection, path) -> None:
    """Persist a collection in the erc721-metadata shape (the canonical
    on-disk form used by ingest/fetch output and index directories)."""
    records = [
        {
            "token_id": t.ref.token_id,
            "contract": t.ref.contract,
            "name": t.name,
            "image": t.image_url,
            "attributes": [
                {"trait_type": tr.trait_type, "value": tr.value} for tr in t.traits
            ],
        }
        for t in collection.tokens
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(records, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


@dataclass
class FetchConfig:
    """Settings for one paginated assets fetch."""

    api_base: str
    contract: str
    page_size: int = 50
    rate_limit: float = 2.0
    max_retries: int = 5
    api_key: str | None = field(default_factory=lambda: os.environ.get(API_KEY_ENV))

    def __post_init__(self):
        if not 1 <= self.page_size <= 50:
            raise ValueError(f"page_size must be in 1..50, got {self.page_size}")
        if not self.rate_limit > 0:
            raise ValueError(f"rate_limit must be positive, got {self.rate_limit}")
        if self.max_retries < 0:
            raise ValueError(f"max_retries must be >= 0, got {self.max_retries}")


@dataclass(frozen=True)
class RawSnapshot:
    """Verbatim response bytes plus when/where they were fetched."""

    fetched_at: datetime
    request_url: str
    body: bytes


class SnapshotStore:
    """Directory-backed page store: raw/page-<n>.json plus cursor.json.

    The cursor records the last fully persisted page; anything after it is
    refetched on resume.
    """

    def __init__(self, root):
        self.root = Path(root)
        self.raw_dir = self.root / "raw"

    def _page_path(self, page: int) -> Path:
        return self.raw_dir / f"page-{page}.json"

    def save(self, page: int, snapshot: RawSnapshot) -> None:
        self.raw_dir.mkdir(parents=True, exist_ok=True)
        self._page_path(page).write_bytes(snapshot.body)
        cursor_path = self.root / "cursor.json"
        cursor_path.write_text(json.dumps({"last_page": page}) + "\n", encoding="utf-8")

    def last_page(self) -> int:
        """Index of the last persisted page, or -1 when the store is empty."""
        cursor_path = self.root / "cursor.json"
        if not cursor_path.is_file():
            return -1
        payload = json.loads(cursor_path.read_text(encoding="utf-8"))
        return int(payload["last_page"])

    def read_page(self, page: int) -> bytes:
        return self._page_path(page).read_bytes()

    def pages(self) -> list[tuple[int, bytes]]:
        """All persisted pages up to the cursor, in page order."""
        return [(n, self.read_page(n)) for n in range(self.last_page() + 1)]


class RateLimiter:
    """Spaces consecutive start times at least 1/rate seconds apart.

    Clock and sleep are injectable so the spacing contract is testable on
    a virtual clock.
    """

    def __init__(
        self,
        rate_per_second: float,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if not rate_per_second > 0:
            raise ValueError(f"rate must be positive, got {rate_per_second}")
        self.interval = 1.0 / rate_per_second
        self._clock = clock
        self._sleep = sleep
        self._last: float | None = None

    def acquire(self) -> float:
        """Block until the next start slot; returns the start time used."""
        now = self._clock()
        if self._last is not None:
            target = self._last + self.interval
            if now < target:
                self._sleep(target - now)
                now = self._clock()
        self._last = now
        return now


def replay_snapshots(store: SnapshotStore, name: str | None = None) -> Collection:
    """Parse every persisted page in order into one merged collection."""
    tokens: list[Token] = []
    for page, body in store.pages():
        tokens.extend(parse_assets_payload(body, f"snapshot page {page}"))
    return _build_collection(tokens, name=name)


def fetch_assets(
    cfg: FetchConfig,
    store: SnapshotStore,
    *,
    session=None,
    clock: Callable[[], float] = time.monotonic,
    sleep: Callable[[float], None] = time.sleep,
    timeout: float = 30.0,
) -> Collection:
    """Fetch a collection page by page until a short page.

    Every response body is persisted before parsing. HTTP 429 and network
    timeouts retry with exponential backoff (base 1s, doubling) up to
    cfg.max_retries; any other non-2xx aborts. Aborts raise
    FetchAbortedError carrying the last persisted page so a rerun resumes.
    """
    if session is None:
        session = requests.Session()
    limiter = RateLimiter(cfg.rate_limit, clock=clock, sleep=sleep)
    headers = {"Accept": "application/json"}
    if cfg.api_key:
        headers["X-API-KEY"] = cfg.api_key

    tokens: list[Token] = []
    start_page = store.last_page() + 1
    if start_page > 0:
        logger.info("resuming fetch from page %d", start_page)
        for page, body in store.pages():
            tokens.extend(parse_assets_payload(body, f"snapshot page {page}"))

    page = start_page
    while True:
        query = urlencode(
            {
                "asset_contract_address": cfg.contract,
                "offset": page * cfg.page_size,
                "limit": cfg.page_size,
            }
        )
        url = f"{cfg.api_base}?{query}"
        body = _request_with_retries(
            session, url, headers, cfg, limiter, sleep, timeout, last_page=page - 1
        )
        snapshot = RawSnapshot(
            fetched_at=datetime.now(timezone.utc), request_url=url, body=body
        )
        store.save(page, snapshot)
        page_tokens = parse_assets_payload(body, f"page {page}")
        tokens.extend(page_tokens)
        logger.debug("page %d: %d assets", page, len(page_tokens))
        if len(page_tokens) < cfg.page_size:
            break
        page += 1
    return _build_collection(tokens)


def _request_with_retries(
    session, url, headers, cfg: FetchConfig, limiter, sleep, timeout, last_page: int
) -> bytes:
    attempts = 0
    backoff = BACKOFF_BASE_SECONDS
    while True:
        limiter.acquire()
        try:
            response = session.get(url, headers=headers, timeout=timeout)
            status = response.status_code
        except (requests.Timeout, requests.ConnectionError) as exc:
            status = None
            reason = f"network error: {exc}"
        if status is not None:
            if 200 <= status < 300:
                return response.content
            if status != 429:
                raise FetchAbortedError(
                    f"HTTP {status} for {url}; aborting (resume after page {last_page})",
                    last_page=last_page,
                )
            reason = "HTTP 429"
        attempts += 1
        if attempts > cfg.max_retries:
            raise FetchAbortedError(
                f"{reason} for {url}: retries exhausted after {cfg.max_retries} "
                f"(resume after page {last_page})",
                last_page=last_page,
            )
        logger.warning("%s for %s; backing off %.1fs", reason, url, backoff)
        sleep(backoff)
        backoff *= 2
