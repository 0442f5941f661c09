"""Exceptions raised by treelasso"""

__all__ = ['TreeLassoError', 'DimensionError', 'ConfigurationError',
           'InputError', 'TreeError', 'UndefinedCorrelationError',
           'UndefinedRateError', 'SolverError']


class TreeLassoError(Exception):
    """Base class for all treelasso errors"""


class DimensionError(TreeLassoError, ValueError):
    """Array shapes are inconsistent or empty"""


class ConfigurationError(TreeLassoError, ValueError):
    """A parameter lies outside its permitted range"""


class InputError(TreeLassoError, ValueError):
    """Data contains values the operation cannot handle"""


class TreeError(TreeLassoError, ValueError):
    """A tree description is malformed"""


class UndefinedCorrelationError(InputError):
    """
    Correlation is undefined because a column has zero variance.

    Parameters
    ----------
    column : int
        Index of the offending column
    """
    def __init__(self, column):
        self.column = column
        super().__init__("Column {} has zero variance; correlation is "
                         "undefined".format(column))


class UndefinedRateError(TreeLassoError, ValueError):
    """True/false positive rates are undefined for one-class supports"""


class SolverError(TreeLassoError, RuntimeError):
    """The linear system of a coefficient update could not be solved"""
