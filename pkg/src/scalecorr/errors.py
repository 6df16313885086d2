"""Error types shared across the pipeline.

Exit-code convention: 1 data error, 2 configuration error, 3 estimation error.
"""


class PipelineError(Exception):
    """Base class for all recoverable pipeline failures."""

    exit_code = 1


class DataError(PipelineError):
    """Malformed, inconsistent, or out-of-domain input data."""

    exit_code = 1


class ConfigError(PipelineError):
    """Invalid configuration or incompatible inputs to a stage."""

    exit_code = 2


class EstimationError(PipelineError):
    """A statistical estimate is undefined or numerically degenerate."""

    exit_code = 3
