"""
Learning an output tree from data by average-linkage agglomerative clustering
of the output correlations.
"""

import logging

import numpy as np

from functools import cached_property

from treelasso.core.tree import TreeNode, OutputTree, compute_group_weights
from treelasso.utils.errors import ConfigurationError, DimensionError, \
    InputError, UndefinedCorrelationError

__all__ = ['Dendrogram', 'correlation_matrix', 'correlation_distance',
           'agglomerative_cluster', 'normalize_and_assign', 'learn_tree']

logger = logging.getLogger(__name__)


class Dendrogram:
    """
    The merge sequence of an agglomerative clustering.

    Leaves are clusters 0..K-1 and the i-th merge creates cluster K+i.

    Parameters
    ----------
    merges : sequence of tuple
        (left id, right id, height) for each merge, in merge order
    num_leaves : int
        Number of leaves K

    Attributes
    ----------
    merges : tuple
        (left id, right id, height) for each merge
    num_leaves : int
        Number of leaves K
    heights : ndarray
        Raw merge heights in merge order
    normalized_heights : ndarray
        Heights divided by the root height, so the root sits at one
    sizes : ndarray
        Number of leaves below each merge
    """
    def __init__(self, merges, num_leaves):
        self._merges = tuple((int(a), int(b), float(h)) for a, b, h in merges)
        self._num_leaves = int(num_leaves)
        if len(self.merges) != self.num_leaves - 1:
            errmsg = "{} leaves need {} merges, got {}"
            raise DimensionError(errmsg.format(self.num_leaves,
                                               self.num_leaves-1,
                                               len(self.merges)))

    def __repr__(self):
        return "Dendrogram(K={})".format(self.num_leaves)

    def children(self, cluster):
        """The two clusters joined to form the given merged cluster"""
        left, right, _ = self.merges[cluster - self.num_leaves]
        return left, right

    def to_linkage(self):
        """The merge table as a scipy-style (K-1) x 4 linkage matrix"""
        return np.column_stack([np.array([m[0] for m in self.merges]),
                                np.array([m[1] for m in self.merges]),
                                self.heights, self.sizes]).astype(float)

    @property
    def merges(self):
        """(left id, right id, height) for each merge"""
        return self._merges

    @property
    def num_leaves(self):
        """Number of leaves K"""
        return self._num_leaves

    @cached_property
    def heights(self):
        """Raw merge heights"""
        return np.array([m[2] for m in self.merges])

    @cached_property
    def normalized_heights(self):
        """Merge heights relative to the root height"""
        root = self.heights[-1]
        if root <= 0:
            # Every output identical; all merges are equally tight
            return np.ones_like(self.heights)
        return self.heights/root

    @cached_property
    def sizes(self):
        """Number of leaves below each merge"""
        sizes = np.ones(self.num_leaves + len(self.merges), dtype=int)
        for i, (left, right, _) in enumerate(self.merges):
            sizes[self.num_leaves+i] = sizes[left] + sizes[right]
        return sizes[self.num_leaves:]


def correlation_matrix(y):
    """
    Pearson correlations between the columns of y.

    Parameters
    ----------
    y : ndarray
        N x K output matrix

    Returns
    -------
    corr : ndarray
        Symmetric K x K matrix with unit diagonal
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 2 or y.shape[0] < 2:
        raise DimensionError("At least two rows are required")
    spread = y.std(axis=0)
    constant = np.flatnonzero(spread == 0)
    if constant.size:
        raise UndefinedCorrelationError(int(constant[0]))
    corr = np.atleast_2d(np.corrcoef(y, rowvar=False))
    corr = np.clip((corr + corr.T)/2, -1., 1.)
    np.fill_diagonal(corr, 1.)
    return corr


def correlation_distance(corr):
    """Distance 1 - r between outputs, in [0, 2]"""
    dist = 1. - np.asarray(corr, dtype=float)
    np.fill_diagonal(dist, 0.)
    return dist


def agglomerative_cluster(dist):
    """
    Average-linkage (UPGMA) clustering of a distance matrix. Ties between
    equally close pairs go to the lexicographically smallest pair of cluster
    ids.

    Parameters
    ----------
    dist : ndarray
        Symmetric K x K matrix of non-negative distances with zero diagonal

    Returns
    -------
    dendrogram : Dendrogram
    """
    dist = np.array(dist, dtype=float)
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        raise InputError("Distance matrix must be square")
    num = dist.shape[0]
    if num < 2:
        raise DimensionError("At least two outputs are needed to cluster")
    if not np.all(np.isfinite(dist)):
        raise InputError("Distances must be finite")
    if not np.allclose(dist, dist.T, rtol=0, atol=1e-12):
        raise InputError("Distance matrix is not symmetric")
    if np.any(dist < 0):
        raise InputError("Distances must be non-negative")
    if np.any(np.diag(dist) != 0):
        raise InputError("Distance matrix must have a zero diagonal")

    work = (dist + dist.T)/2
    np.fill_diagonal(work, np.inf)
    ids = np.arange(num)  # Cluster id held in each slot
    sizes = np.ones(num)
    merges = []
    for step in range(num-1):
        height = work.min()
        slots = np.argwhere(work == height)
        slots = slots[slots[:, 0] < slots[:, 1]]
        pair_ids = np.sort(ids[slots], axis=1)
        order = np.lexsort((pair_ids[:, 1], pair_ids[:, 0]))
        a, b = slots[order[0]]
        merges.append((*pair_ids[order[0]], height))

        # Lance-Williams update for average linkage
        joined = (sizes[a]*work[a] + sizes[b]*work[b])/(sizes[a] + sizes[b])
        work[a, :] = joined
        work[:, a] = joined
        work[a, a] = np.inf
        work[b, :] = np.inf
        work[:, b] = np.inf
        sizes[a] += sizes[b]
        ids[a] = num + step

    return Dendrogram(merges, num)


def normalize_and_assign(dend, rho=1.):
    """
    Turn a dendrogram into an output tree. Heights are normalized so the root
    sits at one; each merge v gets g_v = h'_v and s_v = 1 - h'_v. Merges
    with h'_v > rho are neutralized (s_v = 1, g_v = 0) so that their joint
    group carries no weight.

    Parameters
    ----------
    dend : Dendrogram
        The clustering
    rho : float
        Threshold in (0, 1]. Default is 1, which neutralizes nothing.

    Returns
    -------
    tree : OutputTree
        Tree with derived weights; leaf k is output k and merge i is node
        K+i
    """
    if not 0 < rho <= 1:
        raise ConfigurationError("rho must lie in (0, 1], got {}".format(rho))
    num = dend.num_leaves
    nodes = [TreeNode(k) for k in range(num)]
    neutral = 0
    for i, (left, right, _) in enumerate(dend.merges):
        height = float(dend.normalized_heights[i])
        if height > rho:
            s = 1.
            neutral += 1
        else:
            s = 1. - height
        nodes.append(TreeNode(num+i, children=(left, right), s=s))
    logger.info("Learned tree: %d of %d internal nodes neutralized at "
                "rho=%g", neutral, len(dend.merges), rho)
    return compute_group_weights(OutputTree(nodes, num))


def learn_tree(y, rho=1.):
    """
    Learn an output tree from an output matrix: correlations, 1 - r
    distances, UPGMA, then normalization and (s, g) assignment.

    Returns
    -------
    dendrogram : Dendrogram
    tree : OutputTree
    """
    dend = agglomerative_cluster(correlation_distance(correlation_matrix(y)))
    return dend, normalize_and_assign(dend, rho)
