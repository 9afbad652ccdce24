"""Exception types shared across the gridscroll package."""


class GridScrollError(Exception):
    """Base class for every error raised by this package."""


# -- collation ---------------------------------------------------------------

class MalformedRule(GridScrollError, ValueError):
    """Rule text violates the collation mini-language grammar."""


class DuplicateChar(MalformedRule):
    """A character appears in more than one slot of the rule text."""


class UnknownChar(GridScrollError, KeyError):
    """Character not covered by the collation rules in use."""

    def __str__(self) -> str:  # KeyError quotes its arg; keep plain text
        return Exception.__str__(self)


class NoSuchSlot(GridScrollError, LookupError):
    """Component triple addresses a slot the rule structure never filled."""


# -- codecs ------------------------------------------------------------------

class DomainError(GridScrollError, ValueError):
    """Value lies outside the codec's value domain."""


class LengthExceeded(DomainError):
    """String longer than the codec's maximum length."""


class OutOfRange(GridScrollError, ValueError):
    """Ordinal not below the codec's cardinality."""


# -- interpolation table -----------------------------------------------------

class EmptyDomain(GridScrollError, ValueError):
    """Interpolation table initialized with an empty ordinal span."""


class RangeError(GridScrollError, ValueError):
    """Interior-point operation addressed a position outside the open range."""


class StaleEndpointConflict(GridScrollError):
    """Inserted point contradicts an endpoint; endpoints are never deleted."""


# -- dataset -----------------------------------------------------------------

class SchemaError(GridScrollError, ValueError):
    """Key tuple or field configuration does not conform to the schema."""


class IngestError(GridScrollError):
    """Bad input row during ingestion; carries the 1-based data row number."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


# -- engine ------------------------------------------------------------------

class EmptyTable(GridScrollError):
    """Engine started over a table with no rows."""
