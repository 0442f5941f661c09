"""Tests for datasets, centering and coefficient matrices"""

import pytest
import numpy as np

from treelasso.core.data import DataSet, CoefficientMatrix, center_columns
from treelasso.utils.errors import DimensionError, InputError


class TestDataSet:
    """Tests for the DataSet"""

    rng = np.random.default_rng(12)
    x = rng.normal(size=(8, 3)) + 2.
    y = rng.normal(size=(8, 2)) - 1.

    def test_dimensions(self):
        """Check the reported sizes"""
        data = DataSet(self.x, self.y)
        assert (data.n_samples, data.n_inputs, data.n_outputs) == (8, 3, 2)
        assert not data.centered

    @pytest.mark.parametrize('x, y', [(np.ones((4, 2)), np.ones((5, 1))),
                                      (np.ones((1, 2)), np.ones((1, 1))),
                                      (np.ones(4), np.ones((4, 1))),
                                      (np.ones((4, 0)), np.ones((4, 1)))])
    def test_bad_shapes(self, x, y):
        """Check that inconsistent or empty shapes are rejected"""
        with pytest.raises(DimensionError):
            DataSet(x, y)

    def test_read_only(self):
        """Check that stored matrices cannot be modified"""
        data = DataSet(self.x, self.y)
        with pytest.raises(ValueError):
            data.x[0, 0] = 1.

    def test_check_finite(self):
        """Check that NaN entries are flagged"""
        y = self.y.copy()
        y[2, 1] = np.nan
        with pytest.raises(InputError):
            DataSet(self.x, y).check_finite()

    def test_centering(self):
        """Check zero column means and retained means"""
        centered = center_columns(DataSet(self.x, self.y))
        assert centered.centered
        assert np.allclose(centered.x.mean(axis=0), 0)
        assert np.allclose(centered.y.mean(axis=0), 0)
        assert np.allclose(centered.x_means, self.x.mean(axis=0))
        assert np.allclose(centered.y + centered.y_means, self.y)

    def test_center_twice(self):
        """Check that centering an already centered dataset fails"""
        centered = center_columns(DataSet(self.x, self.y))
        with pytest.raises(InputError):
            center_columns(centered)

    def test_take(self):
        """Check that row subsets come back on the original scale"""
        centered = center_columns(DataSet(self.x, self.y))
        subset = centered.take([1, 4, 6])
        assert not subset.centered
        assert np.allclose(subset.x, self.x[[1, 4, 6]])
        assert np.allclose(subset.y, self.y[[1, 4, 6]])


class TestCoefficientMatrix:
    """Tests for the CoefficientMatrix"""

    def test_access(self):
        """Check rows, columns and shape"""
        b = CoefficientMatrix(np.arange(6.).reshape(3, 2))
        assert b.shape == (3, 2)
        assert np.all(b.row(1) == [2., 3.])
        assert np.all(b.column(1) == [1., 3., 5.])

    def test_compatible(self):
        """Check the shape check against J and K"""
        b = CoefficientMatrix(np.zeros((3, 2)))
        b.check_compatible(n_inputs=3, n_outputs=2)
        with pytest.raises(DimensionError):
            b.check_compatible(n_outputs=4)

    def test_vector_rejected(self):
        """Check that a vector is not a coefficient matrix"""
        with pytest.raises(DimensionError):
            CoefficientMatrix(np.zeros(3))
