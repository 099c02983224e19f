"""Exception types shared across the package."""


class ContractViolationError(ValueError):
    """An argument or data structure breaks a documented precondition."""


class PgmError(ValueError):
    """Base class for problems with PGM streams."""


class PgmParseError(PgmError):
    """Malformed PGM magic, header field, or sample value.

    The byte offset of the offending token is kept on ``offset`` and
    included in the message.
    """

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset


class PgmTruncatedError(PgmError):
    """PGM stream ended before the declared payload was complete."""


class DictionaryFormatError(ValueError):
    """Malformed serialized dictionary stream."""
