"""Exception types shared across the package."""


class TokenMorphError(Exception):
    """Base class for all tokenmorph errors."""


class DimensionMismatchError(TokenMorphError):
    """Embedding dimensions or token counts of inputs do not agree."""


class InvalidWeightsError(TokenMorphError):
    """Token weights are not strictly positive or do not sum to one."""


class InvalidParameterError(TokenMorphError):
    """A parameter is outside its documented range."""


class SolverFailureError(TokenMorphError):
    """A solver failed to produce a feasible result within tolerance."""


class FormatError(TokenMorphError):
    """A token file is malformed."""


class BadMagicError(FormatError):
    """A binary token file does not start with the expected magic bytes."""


class TruncatedPayloadError(FormatError):
    """A token file ends before its declared payload is complete."""
