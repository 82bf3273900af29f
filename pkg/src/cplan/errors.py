"""Exception types shared across the package.

Every error carries a stable machine-readable ``code``; the API layer maps
codes to HTTP statuses and the CLI prints them on stderr.
"""

from __future__ import annotations

from typing import Any


class CplanError(Exception):
    """Base class for all domain errors."""

    code = "internal_error"

    def __init__(self, message: str, *, details: list[Any] | None = None):
        super().__init__(message)
        self.message = message
        self.details = details if details is not None else []

    def as_dict(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "details": self.details}


class ValidationFailed(CplanError):
    """Malformed or out-of-bounds input (field-level problems in ``details``)."""

    code = "validation_failed"


class DomainError(CplanError):
    """Input is well-formed but violates a mathematical domain constraint."""

    code = "domain_error"


class IllegalTransition(CplanError):
    """Operation not allowed in the session's current state."""

    code = "illegal_transition"


class NotFoundError(CplanError):
    """Referenced entity (session, case, scenario) does not exist."""

    code = "not_found"


class IntegrityError(CplanError):
    """Stored data would be corrupted by the operation (e.g. duplicate case id)."""

    code = "integrity_error"


class StoreError(CplanError):
    """Persistence failure: unreadable, corrupt or invariant-violating document."""

    code = "store_error"


class UnsupportedVersion(StoreError):
    """Persisted document carries a schema version this build cannot read."""

    code = "unsupported_version"
