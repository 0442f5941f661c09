"""Tests for the alternating solver"""

import pytest
import numpy as np
import scipy.optimize

from treelasso.core.data import DataSet, center_columns
from treelasso.core.penalty import penalty_flat
from treelasso.core.tree import make_example_tree, make_lasso_tree, \
    make_l1l2_tree, make_balanced_tree, make_star_tree
from treelasso.solver.alternating import fit, objective, update_duals, \
    update_beta, predict
from treelasso.solver.config import SolverConfig
from treelasso.utils.errors import ConfigurationError, DimensionError, \
    SolverError


def make_data(seed, n=40, j=3, k=3, noise=0.5):
    """Random regression data with a dense true coefficient matrix"""
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, j))
    b = rng.normal(size=(j, k))
    y = x @ b + noise*rng.normal(size=(n, k)) + 3.
    return DataSet(x, y), b


class TestSolverConfig:
    """Tests for solver settings"""

    @pytest.mark.parametrize('kwargs', [{'lam': -1.}, {'tol': 0.},
                                        {'epsilon_floor': 0.},
                                        {'max_iter': 0}, {'max_iter': 2.5}])
    def test_invalid(self, kwargs):
        """Check that out-of-range settings are refused"""
        with pytest.raises(ConfigurationError):
            SolverConfig(**kwargs)

    def test_replace(self):
        """Check that replace keeps the other fields"""
        config = SolverConfig(tol=1e-8).replace(lam=3.)
        assert (config.lam, config.tol) == (3., 1e-8)


class TestDuals:
    """Tests for the dual update"""

    def test_simplex(self):
        """Check that the duals are positive and sum to one"""
        b = np.random.default_rng(1).normal(size=(4, 3))
        duals = update_duals(b, make_example_tree())
        assert np.all(duals.d > 0)
        assert duals.d.sum() == pytest.approx(1.)
        assert not duals.degenerate

    def test_proportional(self):
        """Check that duals follow the weighted group norms"""
        tree = make_example_tree()
        b = np.array([[3., 4., 0.]])
        duals = update_duals(b, tree)
        # Node 3 holds (0, 1) with weight 0.25; the root weight is 0.5
        assert duals[0, 3]/duals[0, 4] == pytest.approx(0.25*5/(0.5*5))

    def test_zero_coefficients(self):
        """Check the uniform fallback for all-zero coefficients"""
        duals = update_duals(np.zeros((2, 3)), make_example_tree())
        assert duals.degenerate
        assert np.allclose(duals.d, 1./10)

    def test_nonpositive_rejected(self):
        """Check that update_beta needs strictly positive duals"""
        data = center_columns(make_data(0)[0])
        tree = make_example_tree()
        duals = update_duals(np.ones((3, 3)), tree)
        duals.d[0, 0] = 0.
        with pytest.raises(SolverError):
            update_beta(data, duals, tree, 1.)

    def test_dense_inverse(self):
        """Check a single-output update against an explicit inverse"""
        tree = make_star_tree(1, 0.4)
        data = center_columns(make_data(20, n=20, j=2, k=1)[0])
        duals = update_duals(np.array([[0.7], [-0.2]]), tree)
        lam = 3.
        diagonal = np.zeros(2)
        for j in range(2):
            for i, v in enumerate(tree.node_ids):
                diagonal[j] += tree.nodes[v].derived_w**2/duals.d[j, i]
        mat = data.x.T @ data.x + lam*np.diag(diagonal)
        expected = np.linalg.inv(mat) @ data.x.T @ data.y
        b = update_beta(data, duals, tree, lam)
        assert np.allclose(b, expected, rtol=1e-10, atol=1e-12)

    def test_strong_penalty_vanishes(self):
        """Check that coefficients shrink to zero as the strength grows"""
        tree = make_example_tree()
        data = center_columns(make_data(21)[0])
        duals = update_duals(np.ones((3, 3)), tree)
        weak = update_beta(data, duals, tree, 1.)
        strong = update_beta(data, duals, tree, 1e10)
        assert np.max(np.abs(strong)) < 1e-6
        assert np.linalg.norm(strong) < np.linalg.norm(weak)

    @pytest.mark.parametrize('k', [0, 2])
    def test_columns_decouple(self, k):
        """Check that with fixed duals output k moves only beta_k"""
        tree = make_example_tree(0.3, 0.6)
        data, _ = make_data(22)
        duals = update_duals(np.random.default_rng(23).normal(size=(3, 3)),
                             tree)
        y = data.y.copy()
        y[:, k] += np.random.default_rng(24).normal(size=y.shape[0])
        before = update_beta(center_columns(data), duals, tree, 2.)
        after = update_beta(center_columns(DataSet(data.x, y)), duals, tree,
                            2.)
        others = [c for c in range(3) if c != k]
        assert np.allclose(after[:, others], before[:, others], rtol=0.,
                           atol=1e-12)
        assert not np.allclose(after[:, k], before[:, k])


class TestFit:
    """Tests for fit"""

    @pytest.mark.parametrize('tree', [make_example_tree(),
                                      make_example_tree(0.1, 0.9),
                                      make_lasso_tree(3), make_l1l2_tree(3)])
    @pytest.mark.parametrize('lam', [0.1, 10., 300.])
    def test_descent(self, tree, lam):
        """Check that the objective never increases and the fit converges"""
        data, _ = make_data(2)
        result = fit(data, tree, SolverConfig(lam=lam))
        trace = np.array(result.objective_trace)
        assert np.all(np.diff(trace) <= 1e-9*trace[:-1])
        assert result.converged

    def test_ols(self):
        """Check that lambda = 0 gives ordinary least squares"""
        data, _ = make_data(3)
        centered = center_columns(data)
        expected = np.linalg.lstsq(centered.x, centered.y, rcond=None)[0]
        result = fit(data, make_example_tree(), SolverConfig(lam=0.))
        assert np.allclose(result.b, expected, atol=1e-10)

    def test_zero_outputs(self):
        """Check that all-zero outputs give zero coefficients"""
        x = np.random.default_rng(4).normal(size=(10, 3))
        result = fit(DataSet(x, np.zeros((10, 3))), make_example_tree())
        assert np.all(result.b == 0)
        assert result.converged
        assert result.duals.degenerate

    def test_shrinkage(self):
        """Check that a larger strength gives a smaller penalty"""
        data, _ = make_data(5)
        tree = make_example_tree()
        penalties = [penalty_flat(fit(data, tree,
                                      SolverConfig(lam=lam, tol=1e-9)).b,
                                  tree)
                     for lam in (0.1, 10., 1000.)]
        assert penalties[0] > penalties[1] > penalties[2]

    @pytest.mark.parametrize('seed, tree', [(6, make_example_tree(0.4, 0.6)),
                                            (7, make_lasso_tree(2)),
                                            (8, make_l1l2_tree(2))])
    def test_oracle(self, seed, tree):
        """Check the fitted objective against a direct minimisation"""
        num = tree.num_outputs
        data, _ = make_data(seed, n=25, j=4 // num, k=num)
        centered = center_columns(data)
        lam = 2.
        result = fit(data, tree, SolverConfig(lam=lam, tol=1e-12,
                                              max_iter=5000))

        def func(flat):
            return objective(centered, flat.reshape(result.b.shape), tree,
                             lam)

        best = min((scipy.optimize.minimize(func, start, method='Powell',
                                            options={'xtol': 1e-10,
                                                     'ftol': 1e-12})
                    for start in (np.zeros(result.b.size),
                                  result.b.ravel() + 0.1)),
                   key=lambda r: r.fun)
        assert result.final_objective <= best.fun*(1 + 1e-6) + 1e-9

    def test_shared_diagonal(self):
        """Check that the shared-diagonal variant still fits"""
        data, _ = make_data(9)
        result = fit(data, make_example_tree(),
                     SolverConfig(lam=1., shared_diagonal=True, max_iter=50))
        assert np.all(np.isfinite(result.b))

    def test_unweighted_duals(self):
        """Check that the unweighted dual variant still fits"""
        data, _ = make_data(9)
        result = fit(data, make_example_tree(),
                     SolverConfig(lam=1., weighted_duals=False, max_iter=50))
        assert np.all(np.isfinite(result.b))

    def test_many_outputs(self):
        """Check a fit over a larger balanced tree"""
        rng = np.random.default_rng(10)
        x = rng.normal(size=(30, 5))
        y = rng.normal(size=(30, 12))
        result = fit(DataSet(x, y), make_balanced_tree([2, 3, 2]),
                     SolverConfig(lam=5.))
        assert result.b.shape == (5, 12)
        assert result.converged

    def test_tree_mismatch(self):
        """Check that the tree must cover the data outputs"""
        data, _ = make_data(11, k=4)
        with pytest.raises(DimensionError):
            fit(data, make_example_tree())

    def test_singular(self):
        """Check that a singular system is reported"""
        data, _ = make_data(12)
        x = data.x.copy()
        x[:, 1] = 0.
        with pytest.raises(SolverError):
            fit(DataSet(x, data.y), make_example_tree(),
                SolverConfig(lam=0.))

    def test_report(self):
        """Check the fit report contents"""
        data, _ = make_data(13)
        report = fit(data, make_example_tree(), SolverConfig(lam=2.)).report()
        assert report['lambda'] == 2.
        assert report['iterations'] == len(report['objective_trace']) - 1


class TestPredict:
    """Tests for prediction"""

    def test_noiseless_training_row(self):
        """Check that a noiseless OLS fit reproduces its training outputs"""
        data, _ = make_data(14, noise=0.)
        result = fit(data, make_example_tree(), SolverConfig(lam=0.))
        assert np.allclose(result.predict(data.x[:1]), data.y[:1], atol=1e-8)

    def test_means_pair(self):
        """Check prediction from an explicit pair of means"""
        b = np.eye(2)
        y = predict(np.array([[1., 2.]]), b, (np.zeros(2), np.ones(2)))
        assert np.allclose(y, [[2., 3.]])

    def test_wrong_width(self):
        """Check that new inputs must have J columns"""
        with pytest.raises(DimensionError):
            predict(np.ones((2, 3)), np.eye(2), (np.zeros(2), np.zeros(2)))
