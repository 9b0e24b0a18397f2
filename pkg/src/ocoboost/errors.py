"""Exception types shared across the package."""


class OcoBoostError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(OcoBoostError, ValueError):
    """A point, context, or loss has the wrong dimension for the operation."""


class NonFiniteInput(OcoBoostError, ValueError):
    """An input contains NaN or infinite entries."""


class ConfigError(OcoBoostError, ValueError):
    """A configuration record is invalid or incomplete."""


class DataError(OcoBoostError, ValueError):
    """A dataset file is missing, malformed, or unusable."""


class ProtocolError(OcoBoostError, RuntimeError):
    """Predict/update (or step/feedback) calls arrived out of order."""


class StageError(OcoBoostError, RuntimeError):
    """A weak optimizer failed during a boosting stage."""

    def __init__(self, stage, message):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage
