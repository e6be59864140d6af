"""
Exception hierarchy for the stochastic contraction toolkit
Author: Jay Guwalani
"""

from typing import Optional


class StoconError(Exception):
    """Base class for all toolkit errors"""


class NotPositiveDefiniteError(StoconError, ValueError):
    """A matrix expected to be symmetric positive definite is not"""


class NotSymmetricError(StoconError, ValueError):
    """A matrix expected to be symmetric is not"""


class SingularThetaError(StoconError, ValueError):
    """A metric factor Theta(t) is numerically singular"""


class MetricMismatchError(StoconError, ValueError):
    """Two certificates that must share a metric do not"""


class NonConstantMetricError(StoconError, ValueError):
    """A combination rule that needs constant metrics received a time-varying one"""


class MissingCouplingBoundError(StoconError, ValueError):
    """A coupling supremum required by a combination rule is absent"""


class DimensionMismatchError(StoconError, ValueError):
    """Matrix or vector dimensions are inconsistent"""


class LaplacianNotDiffusiveError(StoconError, ValueError):
    """A coupling operator does not annihilate the synchronization subspace"""


class ConfigError(StoconError, ValueError):
    """An experiment configuration is invalid"""


class NonFiniteError(StoconError, ArithmeticError):
    """A simulated path produced NaN or Inf"""

    def __init__(self, message: str, path_index: Optional[int] = None,
                 trajectory_id: Optional[int] = None, step: Optional[int] = None,
                 time: Optional[float] = None):
        super().__init__(message)
        self.path_index = path_index
        self.trajectory_id = trajectory_id
        self.step = step
        self.time = time
