"""Exception hierarchy shared across the package.

Every error raised by library code derives from :class:`WhatifError` so
callers (CLI, HTTP service) can catch one base class and map subtypes to
exit codes / status codes.
"""


class WhatifError(Exception):
    """Base class for all library errors."""


class ConfigError(WhatifError):
    """A configuration value violates its documented range."""


class MalformedFile(WhatifError):
    """An input file does not match the expected layout."""


class EmptyInput(WhatifError):
    """An operation received an empty series or collection."""


class InsufficientData(WhatifError):
    """Too few windows to compute the requested statistics."""


class ShapeError(WhatifError):
    """Array shapes or channel counts do not line up."""


class InsufficientMinority(WhatifError):
    """The minority class is too small for the requested neighbourhood."""


class DegenerateLabels(WhatifError):
    """Training data contains a single class."""


class UnsupportedVersion(WhatifError):
    """A persisted artifact declares a format version we cannot read."""


class MalformedModel(WhatifError):
    """A model file is corrupt or missing required tensors."""


class EmptyIndex(WhatifError):
    """Attempted to build a spatial index over zero points."""


class InsufficientDistractors(WhatifError):
    """Requested more neighbours than the index holds."""


class EmptyClassIndex(WhatifError):
    """A class has no correctly classified windows to index."""


class NoCounterfactualFound(WhatifError):
    """No distractor substitution flipped the prediction.

    Carries advice for the caller: which locked channels to release, or
    whether raising the distractor count may help.
    """

    def __init__(self, message: str, locked_channels: list[int] | None = None):
        super().__init__(message)
        self.locked_channels = sorted(locked_channels or [])

    def advice(self) -> dict:
        return {
            "message": str(self),
            "unlock_channels": self.locked_channels,
            "raise_num_distractors": True,
        }


class DegenerateFold(WhatifError):
    """A cross-validation training portion is missing a class."""


class RangeError(WhatifError):
    """A requested window range falls outside the dataset."""


class NotFound(WhatifError):
    """A referenced dataset, model, session or request id does not exist."""


class Conflict(WhatifError):
    """The request contradicts already-recorded state."""
