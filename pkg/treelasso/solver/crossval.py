"""Cross-validation of the regularization strength"""

import logging

import numpy as np
import pandas as pd

from joblib import Parallel, delayed
from sklearn.model_selection import KFold
from sklearn.metrics import mean_squared_error

from treelasso.core.data import center_columns
from treelasso.core.tree import ensure_group_weights
from treelasso.solver.alternating import fit
from treelasso.solver.config import SolverConfig
from treelasso.utils.errors import ConfigurationError

__all__ = ['default_lambda_grid', 'cross_validate']

logger = logging.getLogger(__name__)


def default_lambda_grid(num=30, low=1e-3, high=1e3):
    """Logarithmically spaced regularization strengths"""
    return np.logspace(np.log10(low), np.log10(high), num)


def _fold_mse(data, tree, config, train, test):
    """Validation MSE of a single fit on one fold"""
    train_data = center_columns(data.take(train))
    result = fit(train_data, tree, config)
    held_out = data.take(test)
    return mean_squared_error(held_out.y, result.predict(held_out.x))


def cross_validate(data, tree, lambda_grid=None, folds=5, seed=0,
                   config=None, n_jobs=1):
    """
    Choose the regularization strength by k-fold cross-validation over rows.

    Parameters
    ----------
    data : DataSet
        Training data, centered or not. Every fold is re-centered on its own
        training rows.
    tree : OutputTree
        The output tree
    lambda_grid : array_like, optional
        Candidate strengths. Defaults to default_lambda_grid().
    folds : int
        Number of folds. Default is 5.
    seed : int
        Seed of the row shuffle
    config : SolverConfig, optional
        Settings other than lam used for every fit
    n_jobs : int
        Number of parallel fits. Results do not depend on it.

    Returns
    -------
    best : float
        Strength with the lowest mean validation MSE, ties broken toward the
        larger strength
    table : DataFrame
        One row per strength with columns lambda, mean_mse, se_mse and
        fold_<i> for each fold
    """
    grid = default_lambda_grid() if lambda_grid is None \
        else np.asarray(lambda_grid, dtype=float).ravel()
    if grid.size == 0:
        raise ConfigurationError("Lambda grid is empty")
    if folds < 2:
        raise ConfigurationError("At least two folds are required")
    if data.n_samples//folds < 2:
        errmsg = "{} samples give folds of fewer than two rows for {} folds"
        raise ConfigurationError(errmsg.format(data.n_samples, folds))
    config = SolverConfig() if config is None else config
    tree = ensure_group_weights(tree)

    splits = list(KFold(n_splits=folds, shuffle=True,
                        random_state=seed).split(data.x))
    tasks = [(lam, train, test) for lam in grid for train, test in splits]
    mses = Parallel(n_jobs=n_jobs)(
        delayed(_fold_mse)(data, tree, config.replace(lam=float(lam)),
                           train, test)
        for lam, train, test in tasks)
    mses = np.asarray(mses).reshape(grid.size, folds)

    table = pd.DataFrame({'lambda': grid, 'mean_mse': mses.mean(axis=1),
                          'se_mse': mses.std(axis=1, ddof=1)/np.sqrt(folds)})
    for i in range(folds):
        table['fold_{}'.format(i)] = mses[:, i]

    means = table['mean_mse'].to_numpy()
    tied = np.flatnonzero(means <= means.min())
    best = float(grid[tied[np.argmax(grid[tied])]])
    logger.info("Cross-validation chose lambda=%g (mean MSE %.6g)", best,
                means.min())
    return best, table
