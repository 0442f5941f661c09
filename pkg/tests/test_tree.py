"""Tests for output trees, their validation and group weights"""

import pytest
import numpy as np

from hypothesis import given, settings, strategies as st

from treelasso.core.tree import TreeNode, OutputTree, validate_tree, \
    compute_group_weights, weight_sum_per_leaf, make_star_tree, \
    make_lasso_tree, make_l1l2_tree, make_example_tree, make_balanced_tree, \
    random_tree
from treelasso.utils.errors import ConfigurationError, DimensionError, \
    TreeError


def weight_of(tree, v):
    return tree.nodes[v].derived_w


class TestTreeNode:
    """Tests for single nodes"""

    def test_g_defaults(self):
        """Check that g defaults to 1 - s"""
        node = TreeNode(5, children=(0, 1), s=0.3)
        assert node.g == pytest.approx(0.7)
        assert not node.is_leaf

    def test_snap(self):
        """Check that s + g is stored exactly when within tolerance"""
        node = TreeNode(5, children=(0, 1), s=0.25, g=0.75+1e-15)
        assert node.g == 0.75

    def test_replace(self):
        """Check that replacing s rederives g"""
        node = TreeNode(5, children=(0, 1), s=0.3).replace(s=0.9)
        assert node.g == pytest.approx(0.1)


class TestOutputTree:
    """Tests for tree construction and structure"""

    def test_example_structure(self):
        """Check groups, root and ancestry of the example tree"""
        tree = make_example_tree()
        assert tree.root == 4
        assert tree.leaves == (0, 1, 2)
        assert tree.internal == (3, 4)
        assert tree.nodes[3].group == (0, 1)
        assert tree.nodes[4].group == (0, 1, 2)
        assert tree.ancestors(0) == (3, 4)
        assert tree.depth(2) == 1

    def test_balanced(self):
        """Check size and height of the simulation tree"""
        tree = make_balanced_tree([3, 2, 5, 2])
        assert tree.num_outputs == 60
        assert len(tree.internal) == 1 + 3 + 6 + 30
        assert tree.root == max(tree.node_ids)
        assert {tree.depth(k) for k in tree.leaves} == {4}

    def test_membership(self):
        """Check the membership matrix of the example tree"""
        tree = make_example_tree()
        expected = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1],
                             [1, 1, 0], [1, 1, 1]], dtype=bool)
        assert np.all(tree.membership == expected)

    def test_relabel(self):
        """Check that relabelling moves leaves with their outputs"""
        tree = make_example_tree().relabel_outputs([2, 0, 1])
        assert tree.nodes[3].group == (0, 2)

    def test_dict_round_trip(self):
        """Check that the plain-data form rebuilds the same tree"""
        tree = make_example_tree(0.3, 0.6)
        rebuilt = OutputTree.from_dict(tree.to_dict())
        assert rebuilt.node_ids == tree.node_ids
        assert rebuilt.nodes[3].s == pytest.approx(0.3)
        assert rebuilt.nodes[4].g == pytest.approx(0.4)

    def test_invalid_raises(self):
        """Check that construction rejects a malformed tree"""
        nodes = [TreeNode(0), TreeNode(1), TreeNode(5, children=(0, 1), s=.5)]
        with pytest.raises(TreeError):
            OutputTree(nodes, 3)

    def test_no_outputs(self):
        """Check that an empty tree is rejected"""
        with pytest.raises(DimensionError):
            make_star_tree(0, 0.5)


class TestValidation:
    """Tests for validate_tree"""

    @pytest.mark.parametrize('nodes, num, kind', [
        ([TreeNode(0), TreeNode(1), TreeNode(5, children=(0, 1), s=.5)], 3,
         'leaf_id'),
        ([TreeNode(0), TreeNode(1), TreeNode(2, children=(0, 1), s=.5,
                                             g=.7)], 2, 'sg_sum'),
        ([TreeNode(0), TreeNode(1), TreeNode(2, children=(0, 1))], 2,
         'sg_unset'),
        ([TreeNode(0), TreeNode(1), TreeNode(2, children=(0, 1), s=1.5,
                                             g=-.5)], 2, 'sg_range'),
        ([TreeNode(0), TreeNode(1), TreeNode(2, children=(0,), s=.5),
          TreeNode(3, children=(0, 1, 2), s=.5)], 2, 'multiple_parents'),
        ([TreeNode(0), TreeNode(1), TreeNode(2, children=(0,), s=.5),
          TreeNode(3, children=(1,), s=.5)], 2, 'orphan'),
    ])
    def test_violations(self, nodes, num, kind):
        """Check that each broken invariant is reported"""
        report = validate_tree(OutputTree(nodes, num, check=False))
        assert kind in report.kinds()
        assert not report.ok

    def test_group_mismatch(self):
        """Check that a declared group disagreeing with the topology is
        reported"""
        nodes = [TreeNode(0), TreeNode(1), TreeNode(2),
                 TreeNode(3, children=(0, 1), s=.5, group=(0, 2)),
                 TreeNode(4, children=(3, 2), s=.5)]
        report = validate_tree(OutputTree(nodes, 3, check=False))
        assert 'group_mismatch' in report.kinds()

    def test_valid_is_empty(self):
        """Check that a valid tree gives an empty report"""
        assert len(validate_tree(make_example_tree(0.2, 0.9))) == 0

    def test_direct_weights_advisory(self):
        """Check that supplied weights not summing to one only warn"""
        tree = OutputTree.from_weights({0: (), 1: (), 2: (0, 1)},
                                       {0: 1., 1: 1., 2: 0.5}, 2)
        report = validate_tree(tree)
        assert report.kinds() == {'weight_sum'}
        assert report.ok


class TestGroupWeights:
    """Tests for the derived group weights"""

    @pytest.mark.parametrize('s4, s5', [(0.5, 0.5), (0.3, 0.8), (0., 1.),
                                        (1., 0.), (0.9, 0.1)])
    def test_example_weights(self, s4, s5):
        """Check the closed-form weights of the example tree"""
        tree = make_example_tree(s4, s5)
        assert weight_of(tree, 4) == pytest.approx(1-s5)
        assert weight_of(tree, 3) == pytest.approx((1-s4)*s5)
        assert weight_of(tree, 0) == pytest.approx(s4*s5)
        assert weight_of(tree, 1) == pytest.approx(s4*s5)
        assert weight_of(tree, 2) == pytest.approx(s5)

    def test_lasso_tree(self):
        """Check that the lasso tree weights only the leaves"""
        tree = make_lasso_tree(4)
        assert weight_of(tree, tree.root) == 0
        assert all(weight_of(tree, k) == 1 for k in tree.leaves)

    def test_l1l2_tree(self):
        """Check that the L1/L2 tree weights only the root"""
        tree = make_l1l2_tree(4)
        assert weight_of(tree, tree.root) == 1
        assert all(weight_of(tree, k) == 0 for k in tree.leaves)

    def test_unset_raises(self):
        """Check that weights cannot be derived without (s, g)"""
        nodes = [TreeNode(0), TreeNode(1), TreeNode(2, children=(0, 1))]
        tree = OutputTree(nodes, 2, check=False)
        with pytest.raises(ConfigurationError):
            compute_group_weights(tree)

    def test_single_output(self):
        """Check a one-output tree"""
        tree = random_tree(1, np.random.default_rng(3))
        assert np.allclose(weight_sum_per_leaf(tree), 1.)

    @settings(max_examples=50, deadline=None)
    @given(num=st.integers(min_value=1, max_value=25),
           seed=st.integers(min_value=0, max_value=2**32-1))
    def test_weights_sum_to_one(self, num, seed):
        """Check that the weights covering each output sum to one"""
        tree = random_tree(num, np.random.default_rng(seed))
        assert np.allclose(weight_sum_per_leaf(tree), 1., rtol=0,
                           atol=1e-12)
        assert np.all(tree.weight_vector >= 0)
