"""Evaluation of the tree-guided group lasso penalty"""

import numpy as np
import networkx as nx

from treelasso.core.data import coefficient_array
from treelasso.core.tree import ensure_group_weights
from treelasso.utils.errors import ConfigurationError, DimensionError

__all__ = ['group_norms', 'penalty_flat', 'penalty_recursive']


def _checked(b, tree):
    """Coefficient array with its output count checked against the tree"""
    b = coefficient_array(b)
    if b.shape[1] != tree.num_outputs:
        errmsg = "Coefficients have {} outputs but the tree has {}"
        raise DimensionError(errmsg.format(b.shape[1], tree.num_outputs))
    return b


def group_norms(b, tree):
    """
    Euclidean norms of every input's coefficients restricted to every group.

    Parameters
    ----------
    b : CoefficientMatrix or ndarray
        J x K coefficients
    tree : OutputTree
        The output tree defining the groups

    Returns
    -------
    norms : ndarray
        J x |V| matrix; column i belongs to node tree.node_ids[i]
    """
    b = _checked(b, tree)
    return np.sqrt(b**2 @ tree.membership.T.astype(float))


def penalty_flat(b, tree):
    """
    The penalty sum_j sum_v w_v ||beta^j_{G_v}||_2, without the
    regularization strength.

    Parameters
    ----------
    b : CoefficientMatrix or ndarray
        J x K coefficients
    tree : OutputTree
        The output tree. Group weights are derived if not already present.

    Returns
    -------
    penalty : float
    """
    tree = ensure_group_weights(tree)
    return float(np.sum(group_norms(b, tree) @ tree.weight_vector))


def penalty_recursive(b, tree):
    """
    The same penalty evaluated by recursion from the leaves upward:
    W(v) = s_v * sum_c |W(c)| + g_v * ||beta^j_{G_v}||_2 for internal nodes
    and W(v) = sum_{m in G_v} |beta^j_m| for leaves, summed over inputs at
    the root.
    """
    b = _checked(b, tree)
    if not tree.has_sg:
        raise ConfigurationError("Recursive penalty needs (s, g) on every "
                                 "internal node")
    values = {}
    for v in nx.dfs_postorder_nodes(tree.graph, tree.root):
        node = tree.nodes[v]
        cols = list(node.group)
        if node.is_leaf:
            values[v] = np.abs(b[:, cols]).sum(axis=1)
        else:
            separate = sum(np.abs(values[c]) for c in node.children)
            joint = np.linalg.norm(b[:, cols], axis=1)
            values[v] = node.s*separate + node.g*joint
    return float(np.sum(values[tree.root]))
