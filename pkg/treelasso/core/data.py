"""Datasets and coefficient matrices"""

import numpy as np

from treelasso.utils.errors import DimensionError, InputError

__all__ = ['DataSet', 'CoefficientMatrix', 'center_columns',
           'coefficient_array']


def _frozen(array):
    """Return a read-only float copy of an array"""
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


def coefficient_array(b):
    """
    Return the J x K array behind a CoefficientMatrix, or the argument itself
    as a float array if a plain array is supplied.
    """
    if isinstance(b, CoefficientMatrix):
        return b.b
    b = np.asarray(b, dtype=float)
    if b.ndim != 2:
        raise DimensionError("Coefficients must be a J x K matrix")
    return b


class DataSet:
    """
    Paired input and output matrices for multiple-output regression.

    Parameters
    ----------
    x : ndarray
        N x J matrix of inputs (genotypes or general covariates)
    y : ndarray
        N x K matrix of outputs
    x_means : ndarray, optional
        Column means of the uncentered inputs. Defaults to zeros.
    y_means : ndarray, optional
        Column means of the uncentered outputs. Defaults to zeros.
    centered : bool
        Whether x and y have already been centered. Default is False.

    Attributes
    ----------
    x : ndarray
        Input matrix
    y : ndarray
        Output matrix
    x_means : ndarray
        Input column means removed by centering
    y_means : ndarray
        Output column means removed by centering
    centered : bool
        Whether the columns have been centered
    n_samples : int
        Number of rows N
    n_inputs : int
        Number of input columns J
    n_outputs : int
        Number of output columns K
    """
    def __init__(self, x, y, x_means=None, y_means=None, centered=False):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 2 or y.ndim != 2:
            raise DimensionError("Inputs and outputs must be matrices")
        if x.shape[0] != y.shape[0]:
            errmsg = "Row count mismatch: x has {} rows, y has {}"
            raise DimensionError(errmsg.format(x.shape[0], y.shape[0]))
        if x.shape[0] < 2:
            raise DimensionError("At least two samples are required")
        if x.shape[1] < 1 or y.shape[1] < 1:
            raise DimensionError("At least one input and one output required")

        self._x = _frozen(x)
        self._y = _frozen(y)
        if x_means is None:
            x_means = np.zeros(x.shape[1])
        if y_means is None:
            y_means = np.zeros(y.shape[1])
        self._x_means = _frozen(x_means)
        self._y_means = _frozen(y_means)
        if self.x_means.shape != (self.n_inputs,) \
                or self.y_means.shape != (self.n_outputs,):
            raise DimensionError("Stored means do not match column counts")
        self._centered = bool(centered)

    def __repr__(self):
        return "DataSet(N={}, J={}, K={}, centered={})".format(
            self.n_samples, self.n_inputs, self.n_outputs, self.centered)

    def check_finite(self):
        """Raise an InputError if x or y holds NaN or infinite values"""
        if not np.all(np.isfinite(self.x)):
            raise InputError("Non-finite values in input matrix")
        if not np.all(np.isfinite(self.y)):
            raise InputError("Non-finite values in output matrix")

    def take(self, rows):
        """
        Return the uncentered DataSet restricted to the given rows. Stored
        means are added back so that the subset can be re-centered on its own.
        """
        x = self.x[rows] + self.x_means
        y = self.y[rows] + self.y_means
        return self.__class__(x, y)

    @property
    def x(self):
        """Input matrix"""
        return self._x

    @property
    def y(self):
        """Output matrix"""
        return self._y

    @property
    def x_means(self):
        """Input column means removed by centering"""
        return self._x_means

    @property
    def y_means(self):
        """Output column means removed by centering"""
        return self._y_means

    @property
    def centered(self):
        """Whether the columns have been centered"""
        return self._centered

    @property
    def n_samples(self):
        """Number of samples N"""
        return self.x.shape[0]

    @property
    def n_inputs(self):
        """Number of inputs J"""
        return self.x.shape[1]

    @property
    def n_outputs(self):
        """Number of outputs K"""
        return self.y.shape[1]


def center_columns(data):
    """
    Center every column of x and y, retaining the removed means so that the
    model can be fitted without an intercept and predictions restored later.

    Parameters
    ----------
    data : DataSet
        An uncentered dataset

    Returns
    -------
    centered : DataSet
        Dataset with zero-mean columns and the original means stored
    """
    if data.centered:
        raise InputError("DataSet has already been centered")
    x_means = data.x.mean(axis=0)
    y_means = data.y.mean(axis=0)
    return DataSet(data.x - x_means, data.y - y_means,
                   x_means=x_means, y_means=y_means, centered=True)


class CoefficientMatrix:
    """
    J x K regression coefficients. Row j holds the coefficients of input j
    across all outputs, column k the coefficients of output k.

    Parameters
    ----------
    b : ndarray
        The J x K coefficient values
    """
    def __init__(self, b):
        b = np.asarray(b, dtype=float)
        if b.ndim != 2:
            raise DimensionError("Coefficients must be a J x K matrix")
        self._b = _frozen(b)

    def __repr__(self):
        return "CoefficientMatrix(J={}, K={})".format(*self.shape)

    def check_compatible(self, n_inputs=None, n_outputs=None):
        """Raise a DimensionError if the shape disagrees with J or K"""
        if n_inputs is not None and n_inputs != self.n_inputs:
            errmsg = "Coefficients have {} inputs, expected {}"
            raise DimensionError(errmsg.format(self.n_inputs, n_inputs))
        if n_outputs is not None and n_outputs != self.n_outputs:
            errmsg = "Coefficients have {} outputs, expected {}"
            raise DimensionError(errmsg.format(self.n_outputs, n_outputs))

    def row(self, j):
        """Coefficients of input j across all outputs"""
        return self.b[j]

    def column(self, k):
        """Coefficients of output k"""
        return self.b[:, k]

    @property
    def b(self):
        """The coefficient values"""
        return self._b

    @property
    def shape(self):
        """(J, K)"""
        return self.b.shape

    @property
    def n_inputs(self):
        """Number of inputs J"""
        return self.b.shape[0]

    @property
    def n_outputs(self):
        """Number of outputs K"""
        return self.b.shape[1]
