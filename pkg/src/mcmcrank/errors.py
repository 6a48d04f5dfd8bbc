"""Exception types shared across the package.

The CLI maps ConfigError (and subclasses) to exit code 2 and every other
McmcRankError to exit code 3; plain ValueError signals a programming error
at an API boundary and is not translated.
"""


class McmcRankError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(McmcRankError):
    """Invalid or inconsistent experiment configuration."""


class UnsupportedConfigurationError(ConfigError):
    """A requested operation does not support this configuration."""


class DataError(McmcRankError):
    """Simulated or loaded data violates a contract (NaN, out of support, ...)."""


class CapacityError(McmcRankError):
    """A run would exceed the configured memory budget."""


class InvalidProposalError(McmcRankError):
    """A proposal mechanism generated a point its own density rules out."""


class GridCoverageError(McmcRankError):
    """The quadrature grid is too narrow or too coarse for the requested step."""


class ComparabilityError(McmcRankError):
    """Two divergence curves were produced under different experimental conditions."""


class DegenerateEstimateWarning(UserWarning):
    """The entropy estimate lost all observations to thresholding."""


class MinorizationWarning(UserWarning):
    """The proposal does not uniformly dominate the target on the grid."""


class KernelSupportWarning(UserWarning):
    """A kernel without compact support was selected for entropy estimation."""
