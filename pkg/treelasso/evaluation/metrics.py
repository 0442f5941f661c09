"""
Support-recovery and prediction-error metrics, and their aggregation over
replicate datasets.
"""

import logging

import numpy as np
import pandas as pd

from dataclasses import dataclass
from sklearn.metrics import roc_curve, mean_squared_error
from sklearn.metrics import auc as _trapezoid_area

from treelasso.core.data import coefficient_array
from treelasso.utils.errors import ConfigurationError, DimensionError, \
    InputError, UndefinedRateError

__all__ = ['RocCurve', 'SupportMetrics', 'MeanCurve', 'ScalarSummary',
           'default_threshold', 'support_from_coefficients',
           'roc_by_threshold', 'roc_by_lambda', 'auc', 'test_mse',
           'support_metrics', 'aggregate_replicates', 'curve_frame',
           'FPR_GRID_POINTS']

logger = logging.getLogger(__name__)

FPR_GRID_POINTS = 101
_default_relative_tau = 1e-4


@dataclass(frozen=True)
class RocCurve:
    """
    A receiver operating characteristic curve for support recovery.

    Parameters
    ----------
    fpr : ndarray
        False positive rates, non-decreasing from 0 to 1
    tpr : ndarray
        True positive rates at the same cutoffs
    thresholds : ndarray
        Cutoff behind each point. Magnitude thresholds for a threshold sweep,
        regularization strengths for a lambda sweep.
    """
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray

    def __post_init__(self):
        fpr = np.asarray(self.fpr, dtype=float)
        tpr = np.asarray(self.tpr, dtype=float)
        thresholds = np.asarray(self.thresholds, dtype=float)
        if not fpr.shape == tpr.shape == thresholds.shape or fpr.ndim != 1:
            raise DimensionError("fpr, tpr and thresholds must be matching "
                                 "vectors")
        if fpr.size < 2 or (fpr[0], tpr[0]) != (0, 0) \
                or (fpr[-1], tpr[-1]) != (1, 1):
            raise InputError("ROC curve must run from (0, 0) to (1, 1)")
        if np.any(np.diff(fpr) < 0):
            raise InputError("False positive rates must be non-decreasing")
        object.__setattr__(self, 'fpr', fpr)
        object.__setattr__(self, 'tpr', tpr)
        object.__setattr__(self, 'thresholds', thresholds)

    @property
    def points(self):
        """(fpr, tpr) pairs in sweep order"""
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))


@dataclass(frozen=True)
class SupportMetrics:
    """Confusion counts of an estimated support against the true one"""
    true_positives: int
    false_positives: int
    true_negatives: int
    false_negatives: int

    @property
    def sensitivity(self):
        """Fraction of true nonzeros recovered"""
        return self.true_positives/(self.true_positives
                                    + self.false_negatives)

    @property
    def specificity(self):
        """Fraction of true zeros left out"""
        return self.true_negatives/(self.true_negatives
                                    + self.false_positives)

    @property
    def total(self):
        """Number of coefficients, J * K"""
        return self.true_positives + self.false_positives \
            + self.true_negatives + self.false_negatives

    def to_dict(self):
        return {'tp': self.true_positives, 'fp': self.false_positives,
                'tn': self.true_negatives, 'fn': self.false_negatives,
                'sensitivity': self.sensitivity,
                'specificity': self.specificity}


@dataclass(frozen=True)
class MeanCurve:
    """TPR averaged over replicates at fixed false positive rates"""
    fpr: np.ndarray
    tpr: np.ndarray
    tpr_se: np.ndarray
    replicates: int

    def to_frame(self):
        return pd.DataFrame({'fpr': self.fpr, 'tpr': self.tpr,
                             'tpr_se': self.tpr_se})


@dataclass(frozen=True)
class ScalarSummary:
    """Mean and standard error of a metric over replicates"""
    mean: float
    se: float
    replicates: int


def _truth(b_hat, b_true):
    """Flattened |b_hat| scores and true support, with checks"""
    b_hat = coefficient_array(b_hat)
    b_true = coefficient_array(b_true)
    if b_hat.shape != b_true.shape:
        errmsg = "Estimated coefficients {} and truth {} differ in shape"
        raise DimensionError(errmsg.format(b_hat.shape, b_true.shape))
    truth = (b_true != 0).ravel()
    if truth.all() or not truth.any():
        raise UndefinedRateError("True support must contain both zero and "
                                 "nonzero coefficients")
    return np.abs(b_hat).ravel(), truth


def default_threshold(b_hat):
    """Scale-free support cutoff, 1e-4 times the largest |b_hat|"""
    return _default_relative_tau*float(np.max(np.abs(coefficient_array(b_hat)),
                                              initial=0.))


def support_from_coefficients(b, tau):
    """
    Estimated support: True where |b| exceeds tau.

    Parameters
    ----------
    b : CoefficientMatrix or ndarray
        J x K coefficients
    tau : float
        Non-negative cutoff
    """
    if not tau >= 0:
        raise ConfigurationError("tau must be non-negative")
    return np.abs(coefficient_array(b)) > tau


def roc_by_threshold(b_hat, b_true):
    """
    ROC curve of support recovery traced by sweeping a cutoff over the
    distinct values of |b_hat|.

    Parameters
    ----------
    b_hat : CoefficientMatrix or ndarray
        Estimated coefficients
    b_true : CoefficientMatrix or ndarray
        True coefficients; nonzeros define the true support

    Returns
    -------
    curve : RocCurve
        Starts at (0, 0) with an infinite cutoff and ends at (1, 1)
    """
    scores, truth = _truth(b_hat, b_true)
    fpr, tpr, thresholds = roc_curve(truth, scores, drop_intermediate=False)
    thresholds = np.where(np.arange(thresholds.size) == 0, np.inf, thresholds)
    if (fpr[-1], tpr[-1]) != (1., 1.):
        fpr = np.append(fpr, 1.)
        tpr = np.append(tpr, 1.)
        thresholds = np.append(thresholds, 0.)
    return RocCurve(fpr, tpr, thresholds)


def roc_by_lambda(b_hats, lambdas, b_true, tau=None):
    """
    ROC curve traced by sweeping the regularization strength. Each fit
    contributes one operating point, its support at cutoff tau (default
    default_threshold of that fit). Points are ordered by false positive rate
    and the true positive rate is taken as the running maximum.

    Parameters
    ----------
    b_hats : sequence
        Estimated coefficients, one per strength
    lambdas : sequence of float
        The strengths
    b_true : CoefficientMatrix or ndarray
        True coefficients
    tau : float, optional
        Fixed cutoff for every fit
    """
    if len(b_hats) != len(lambdas) or len(b_hats) == 0:
        raise DimensionError("Need one coefficient matrix per strength")
    fprs, tprs = [0.], [0.]
    for b_hat in b_hats:
        metrics = support_metrics(b_hat, b_true, tau)
        fprs.append(1. - metrics.specificity)
        tprs.append(metrics.sensitivity)
    fprs.append(1.)
    tprs.append(1.)
    thresholds = np.concatenate([[np.inf], np.asarray(lambdas, dtype=float),
                                 [0.]])
    order = np.lexsort((np.asarray(tprs), np.asarray(fprs)))
    return RocCurve(np.asarray(fprs)[order],
                    np.maximum.accumulate(np.asarray(tprs)[order]),
                    thresholds[order])


def auc(curve):
    """Trapezoidal area under a RocCurve"""
    return float(_trapezoid_area(curve.fpr, curve.tpr))


def test_mse(y_pred, y_test):
    """Mean squared error over every entry of the test outputs"""
    y_pred = np.asarray(y_pred, dtype=float)
    y_test = np.asarray(y_test, dtype=float)
    if y_pred.shape != y_test.shape:
        errmsg = "Predictions {} and test outputs {} differ in shape"
        raise DimensionError(errmsg.format(y_pred.shape, y_test.shape))
    return float(mean_squared_error(y_test, y_pred))


# Not collected by pytest
test_mse.__test__ = False


def support_metrics(b_hat, b_true, tau=None):
    """
    Confusion counts of the support of b_hat at cutoff tau.

    Parameters
    ----------
    b_hat : CoefficientMatrix or ndarray
        Estimated coefficients
    b_true : CoefficientMatrix or ndarray
        True coefficients
    tau : float, optional
        Cutoff. Defaults to default_threshold(b_hat).

    Returns
    -------
    metrics : SupportMetrics
    """
    _, truth = _truth(b_hat, b_true)
    tau = default_threshold(b_hat) if tau is None else tau
    found = support_from_coefficients(b_hat, tau).ravel()
    return SupportMetrics(true_positives=int(np.sum(found & truth)),
                          false_positives=int(np.sum(found & ~truth)),
                          true_negatives=int(np.sum(~found & ~truth)),
                          false_negatives=int(np.sum(~found & truth)))


def _resample(curve, grid):
    """TPR of a curve at the grid rates; vertical steps take their top"""
    last = np.append(curve.fpr[1:] != curve.fpr[:-1], True)
    return np.interp(grid, curve.fpr[last], curve.tpr[last])


def _standard_error(values):
    """Standard error of the mean along the first axis, zero for one value"""
    if values.shape[0] < 2:
        return np.zeros(values.shape[1:])
    return values.std(axis=0, ddof=1)/np.sqrt(values.shape[0])


def aggregate_replicates(values, grid_points=FPR_GRID_POINTS):
    """
    Average replicate results.

    Parameters
    ----------
    values : sequence of RocCurve or sequence of float
        One result per replicate
    grid_points : int
        Size of the common false positive rate grid for curves

    Returns
    -------
    summary : MeanCurve or ScalarSummary
        Vertical average of the curves on an evenly spaced grid over [0, 1],
        or the mean of the scalars, each with its standard error
    """
    values = list(values)
    if len(values) == 0:
        raise ConfigurationError("No replicates to aggregate")
    if isinstance(values[0], RocCurve):
        grid = np.linspace(0., 1., grid_points)
        tprs = np.array([_resample(c, grid) for c in values])
        return MeanCurve(grid, tprs.mean(axis=0), _standard_error(tprs),
                         len(values))
    scalars = np.asarray(values, dtype=float)
    return ScalarSummary(float(scalars.mean()),
                         float(_standard_error(scalars[:, np.newaxis])[0]),
                         len(values))


def curve_frame(curve, **labels):
    """Points of a RocCurve as a table, with constant label columns first"""
    frame = pd.DataFrame({'fpr': curve.fpr, 'tpr': curve.tpr,
                          'threshold': curve.thresholds})
    for i, (name, value) in enumerate(labels.items()):
        frame.insert(i, name, value)
    return frame
