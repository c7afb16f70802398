"""Exception types shared across the package."""


class PgmParseError(ValueError):
    """Raised for malformed PGM input; the message names the byte offset."""


class ContractError(ValueError):
    """Raised when pipeline stages disagree (bit depth, dimensions, masks)."""
