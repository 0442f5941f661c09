"""
Alternating minimization of the squared-penalty objective over the
coefficients and the variational dual weights.
"""

import logging

import numpy as np
import scipy.linalg

from dataclasses import dataclass

from treelasso.core.data import CoefficientMatrix, center_columns, \
    coefficient_array
from treelasso.core.penalty import group_norms, penalty_flat
from treelasso.core.tree import ensure_group_weights
from treelasso.solver.config import SolverConfig
from treelasso.utils.errors import DimensionError, SolverError

__all__ = ['DualWeights', 'FitResult', 'objective', 'update_duals',
           'update_beta', 'ridge', 'fit', 'predict']

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DualWeights:
    """
    Variational weights d_{j,v} on the simplex.

    Parameters
    ----------
    d : ndarray
        J x |V| matrix; column i belongs to node node_ids[i]
    node_ids : tuple
        Node ids labelling the columns
    degenerate : bool
        True if the weights are the uniform fallback for all-zero
        coefficients
    """
    d: np.ndarray
    node_ids: tuple
    degenerate: bool = False

    def __getitem__(self, key):
        """d_{j,v} for key = (j, v)"""
        j, v = key
        return self.d[j, self.node_ids.index(v)]


@dataclass(frozen=True)
class FitResult:
    """
    Outcome of a fit.

    Parameters
    ----------
    coefficients : CoefficientMatrix
        Fitted J x K coefficients on the centered scale
    objective_trace : tuple
        Objective after the ridge start and after every round
    duals : DualWeights
        Dual weights used in the final round
    iterations : int
        Number of completed rounds
    converged : bool
        Whether the stopping rule was met before max_iter
    lam : float
        Regularization strength used
    x_means : ndarray
        Input means of the training data
    y_means : ndarray
        Output means of the training data
    """
    coefficients: CoefficientMatrix
    objective_trace: tuple
    duals: DualWeights
    iterations: int
    converged: bool
    lam: float
    x_means: np.ndarray
    y_means: np.ndarray

    @property
    def b(self):
        """The fitted coefficient values"""
        return self.coefficients.b

    @property
    def final_objective(self):
        """Objective value at the returned coefficients"""
        return self.objective_trace[-1]

    def predict(self, x_new):
        """Predict outputs for new uncentered inputs"""
        return predict(x_new, self.coefficients, self)

    def report(self):
        """Metadata of the fit as plain data"""
        return {'lambda': self.lam, 'iterations': self.iterations,
                'converged': self.converged,
                'final_objective': self.final_objective,
                'objective_trace': list(self.objective_trace),
                'degenerate_duals': self.duals.degenerate}


def _check_shapes(data, b, tree):
    """Check that data, coefficients and tree agree"""
    if b.shape != (data.n_inputs, data.n_outputs):
        errmsg = "Coefficients of shape {} do not match J={}, K={}"
        raise DimensionError(errmsg.format(b.shape, data.n_inputs,
                                           data.n_outputs))
    if tree.num_outputs != data.n_outputs:
        errmsg = "Tree has {} outputs but the data has {}"
        raise DimensionError(errmsg.format(tree.num_outputs, data.n_outputs))


def objective(data, b, tree, lam):
    """
    The squared-penalty objective
    sum_k ||y_k - X beta_k||^2 + lam * penalty_flat(B, tree)^2.

    Parameters
    ----------
    data : DataSet
        Centered data
    b : CoefficientMatrix or ndarray
        J x K coefficients
    tree : OutputTree
        The output tree
    lam : float
        Regularization strength

    Returns
    -------
    value : float
    """
    b = coefficient_array(b)
    _check_shapes(data, b, tree)
    resid = data.y - data.x @ b
    return float(np.sum(resid**2) + lam*penalty_flat(b, tree)**2)


def update_duals(b, tree, epsilon_floor=1e-10, weighted=True):
    """
    Closed-form minimizer of the variational surrogate for fixed
    coefficients: d_{j,v} proportional to max(w_v ||beta^j_{G_v}||_2, eps).

    Parameters
    ----------
    b : CoefficientMatrix or ndarray
        J x K coefficients
    tree : OutputTree
        The output tree
    epsilon_floor : float
        Floor applied before normalization
    weighted : bool
        Scale group norms by w_v. Default is True.

    Returns
    -------
    duals : DualWeights
        Weights summing to one. Uniform, and flagged degenerate, when the
        coefficients are identically zero.
    """
    tree = ensure_group_weights(tree)
    b = coefficient_array(b)
    node_ids = tree.node_ids
    if not np.any(b):
        logger.warning("All coefficients are zero; using uniform duals")
        size = b.shape[0]*len(node_ids)
        d = np.full((b.shape[0], len(node_ids)), 1./size)
        return DualWeights(d, node_ids, degenerate=True)

    scaled = group_norms(b, tree)
    if weighted:
        scaled = scaled*tree.weight_vector
    d = np.maximum(scaled, epsilon_floor)
    return DualWeights(d/d.sum(), node_ids)


def _ridge_diagonals(duals, tree, shared=False):
    """
    J x K matrix whose column k is the ridge diagonal of output k,
    sum over groups containing k of w_v^2 / d_{j,v}.
    """
    q = tree.weight_vector**2/duals.d
    if shared:
        return np.repeat(q.sum(axis=1)[:, np.newaxis], tree.num_outputs,
                         axis=1)
    return q @ tree.membership.astype(float)


def _solve_spd(mat, rhs, x=None):
    """Solve mat @ z = rhs through a Cholesky factorization"""
    try:
        factor = scipy.linalg.cho_factor(mat, check_finite=False)
    except np.linalg.LinAlgError:
        errmsg = "System is singular"
        if x is not None:
            errmsg += ": inputs have rank {} < J = {}".format(
                np.linalg.matrix_rank(x), x.shape[1])
        raise SolverError(errmsg)
    return scipy.linalg.cho_solve(factor, rhs, check_finite=False)


def ridge(data, lam, gram=None, xty=None):
    """
    Ridge regression with a uniform penalty lam on every coefficient, used to
    start the alternating scheme. lam = 0 gives ordinary least squares.
    """
    gram = data.x.T @ data.x if gram is None else gram
    xty = data.x.T @ data.y if xty is None else xty
    mat = gram + lam*np.eye(gram.shape[0])
    return _solve_spd(mat, xty, x=data.x)


def update_beta(data, duals, tree, lam, gram=None, xty=None,
                shared_diagonal=False):
    """
    Coefficients minimizing the surrogate for fixed duals. Output k solves
    (X'X + lam D_k) beta_k = X'y_k with D_k diagonal; outputs whose
    diagonals coincide share one Cholesky factorization.

    Parameters
    ----------
    data : DataSet
        Centered data
    duals : DualWeights
        Strictly positive dual weights
    tree : OutputTree
        The output tree
    lam : float
        Regularization strength
    gram : ndarray, optional
        Precomputed X'X
    xty : ndarray, optional
        Precomputed X'Y
    shared_diagonal : bool
        Use one diagonal summed over every node for all outputs

    Returns
    -------
    b : ndarray
        J x K coefficients
    """
    tree = ensure_group_weights(tree)
    if tree.num_outputs != data.n_outputs:
        errmsg = "Tree has {} outputs but the data has {}"
        raise DimensionError(errmsg.format(tree.num_outputs, data.n_outputs))
    if np.any(duals.d <= 0):
        raise SolverError("Dual weights must be strictly positive")
    gram = data.x.T @ data.x if gram is None else gram
    xty = data.x.T @ data.y if xty is None else xty

    diagonals = _ridge_diagonals(duals, tree, shared=shared_diagonal)
    unique, inverse = np.unique(diagonals.T, axis=0, return_inverse=True)
    inverse = np.ravel(inverse)
    b = np.empty((data.n_inputs, data.n_outputs))
    for i, diagonal in enumerate(unique):
        cols = np.flatnonzero(inverse == i)
        mat = gram + lam*np.diag(diagonal)
        b[:, cols] = _solve_spd(mat, xty[:, cols], x=data.x)
    return b


def fit(data, tree, config=None):
    """
    Fit tree-guided group lasso by alternating dual and coefficient updates
    from a ridge start until the relative objective change falls below tol.

    Parameters
    ----------
    data : DataSet
        Training data. Centered first if not already centered.
    tree : OutputTree
        The output tree. Degenerate star trees give lasso and L1/L2 fits.
    config : SolverConfig, optional
        Solver settings. Defaults to SolverConfig().

    Returns
    -------
    result : FitResult
    """
    config = SolverConfig() if config is None else config
    data.check_finite()
    if not data.centered:
        data = center_columns(data)
    tree = ensure_group_weights(tree)
    if tree.num_outputs != data.n_outputs:
        errmsg = "Tree has {} outputs but the data has {}"
        raise DimensionError(errmsg.format(tree.num_outputs, data.n_outputs))

    lam = float(config.lam)
    gram = data.x.T @ data.x
    xty = data.x.T @ data.y

    b = ridge(data, lam, gram=gram, xty=xty)
    trace = [objective(data, b, tree, lam)]
    duals = None
    converged = False
    iteration = 0
    while iteration < config.max_iter:
        iteration += 1
        duals = update_duals(b, tree, epsilon_floor=config.epsilon_floor,
                             weighted=config.weighted_duals)
        b = update_beta(data, duals, tree, lam, gram=gram, xty=xty,
                        shared_diagonal=config.shared_diagonal)
        trace.append(objective(data, b, tree, lam))
        change = abs(trace[-2] - trace[-1])
        logger.debug("Iteration %d: objective %.12g", iteration, trace[-1])
        if change <= config.tol*max(abs(trace[-2]), np.finfo(float).tiny):
            converged = True
            break

    if converged:
        logger.info("Converged after %d iterations (lambda=%g, "
                    "objective=%.8g)", iteration, lam, trace[-1])
    else:
        logger.warning("No convergence after %d iterations (lambda=%g)",
                       iteration, lam)

    return FitResult(coefficients=CoefficientMatrix(b),
                     objective_trace=tuple(trace), duals=duals,
                     iterations=iteration, converged=converged, lam=lam,
                     x_means=data.x_means, y_means=data.y_means)


def predict(x_new, b, means):
    """
    Predict outputs for new inputs.

    Parameters
    ----------
    x_new : ndarray
        M x J uncentered inputs
    b : CoefficientMatrix or ndarray
        J x K coefficients fitted on centered data
    means : DataSet, FitResult or tuple
        Source of the training input and output means, either an object
        with x_means and y_means attributes or an (x_means, y_means) pair

    Returns
    -------
    y_pred : ndarray
        M x K predictions on the original output scale
    """
    b = coefficient_array(b)
    try:
        x_means, y_means = means.x_means, means.y_means
    except AttributeError:
        x_means, y_means = means
    x_new = np.atleast_2d(np.asarray(x_new, dtype=float))
    if x_new.shape[1] != b.shape[0]:
        errmsg = "New inputs have {} columns, coefficients expect {}"
        raise DimensionError(errmsg.format(x_new.shape[1], b.shape[0]))
    return (x_new - x_means) @ b + y_means
