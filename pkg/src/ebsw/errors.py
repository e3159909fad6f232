"""Exception types shared across the package."""


class EbswError(Exception):
    """Base class for all package-specific errors."""


class MeasureFormatError(EbswError, ValueError):
    """A point-cloud file is structurally malformed (ragged rows, bad tokens)."""


class MeasureValidationError(EbswError, ValueError):
    """Point-cloud data violates an invariant (non-finite coordinate)."""


class EmptyInputError(EbswError, ValueError):
    """A point-cloud file contains no points."""


class DegenerateWeightsError(EbswError, ValueError):
    """All raw slicing weights are zero.

    Happens only for the shifted-polynomial energy with zero shift when the
    projected transport cost vanishes along every sampled direction, i.e. the
    two measures coincide on all of them.
    """


class PpmFormatError(EbswError, ValueError):
    """An image file is not a valid binary PPM (P6, maxval 255)."""


class FlowDivergedError(EbswError, RuntimeError):
    """A gradient-flow step produced a non-finite update."""

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"flow diverged at step {step}")
