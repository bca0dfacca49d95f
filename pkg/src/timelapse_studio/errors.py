"""Exception types shared across the studio modules."""


class StudioError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(StudioError):
    pass


class NotFoundError(StudioError):
    pass


class InvalidStateError(StudioError):
    pass


class IngestError(StudioError):
    pass


class StorageError(StudioError):
    """File could not be read or written (missing, corrupt, unwritable)."""


class RenderError(StudioError):
    pass


class InvalidTransitionError(StudioError):
    """A transition cannot produce a playable segment."""

    def __init__(self, message, gap_index=None):
        super().__init__(message)
        self.gap_index = gap_index


class DecodeError(StudioError):
    pass


class ValidationError(StudioError):
    pass


class UnsupportedVersionError(StudioError):
    pass
