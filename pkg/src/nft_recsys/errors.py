"""Exception hierarchy shared across the package."""


class RecsysError(Exception):
    """Base class for all domain errors raised by nft_recsys."""


class TokenRefError(RecsysError, ValueError):
    """A token reference string or its components are malformed."""


class TraitError(RecsysError, ValueError):
    """A trait violates its invariants (e.g. empty trait_type)."""


class DuplicateTokenRefError(RecsysError, ValueError):
    """Two tokens in one collection share the same reference."""


class IngestError(RecsysError):
    """A collection file could not be parsed; message carries the byte
    offset or record index of the offending input."""


class FetchAbortedError(RecsysError):
    """A remote fetch gave up (retries exhausted or hard HTTP error).

    ``last_page`` is the index of the last fully persisted page, or -1
    when nothing was persisted; resuming from the same snapshot store
    continues after it.
    """

    def __init__(self, message: str, last_page: int = -1):
        super().__init__(message)
        self.last_page = last_page


class UnknownTraitError(RecsysError, LookupError):
    """A trait string is absent from the vocabulary or frequency table,
    signalling an index/collection mismatch."""


class TokenNotFoundError(RecsysError, LookupError):
    """The requested reference token is not part of the indexed collection."""


class RarityDomainError(RecsysError, ValueError):
    """Trait count outside the valid range 1..total_supply."""


class IndexFormatError(RecsysError):
    """An on-disk index directory is missing files or internally inconsistent."""
