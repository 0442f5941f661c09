"""
Synthetic genotype/expression datasets with tree-structured sparse
coefficients.
"""

import logging

import numpy as np

from dataclasses import dataclass, asdict, field

from treelasso.core.data import DataSet, CoefficientMatrix
from treelasso.core.tree import make_balanced_tree
from treelasso.utils.errors import ConfigurationError

__all__ = ['SimulationSpec', 'generate_genotypes', 'generate_true_structure',
           'generate_dataset', 'replicate_seeds']

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimulationSpec:
    """
    Settings of a simulated dataset.

    Parameters
    ----------
    n_train : int
        Number of training samples
    n_test : int
        Number of test samples
    j_inputs : int
        Number of inputs J
    k_outputs : int
        Number of outputs K. Must equal the product of branching.
    branching : tuple of int
        Children per node at each level of the true tree, root first. The
        tree height is the length of the tuple.
    signal : float
        Value of every nonzero true coefficient
    noise_sd : float
        Standard deviation of the Gaussian noise
    causal_inputs_per_group : int
        Number of inputs given to each selected group
    active_levels : tuple of int, optional
        Depths whose nodes receive causal inputs, with the root at depth 0
        and the leaves at depth len(branching). Defaults to every internal
        level below the root.
    include_root : bool
        Also give causal inputs to the root group, shared by every output
    seed : int
        Seed of the random draws
    """
    n_train: int = 150
    n_test: int = 50
    j_inputs: int = 200
    k_outputs: int = 60
    branching: tuple = (3, 2, 5, 2)
    signal: float = 0.4
    noise_sd: float = 1.
    causal_inputs_per_group: int = 2
    active_levels: tuple = field(default=None)
    include_root: bool = False
    seed: int = 0

    def __post_init__(self):
        # Lists arrive from config files
        object.__setattr__(self, 'branching',
                           tuple(int(b) for b in self.branching))
        if self.active_levels is None:
            levels = tuple(range(1, len(self.branching)))
        else:
            levels = tuple(sorted(set(int(d) for d in self.active_levels)))
        object.__setattr__(self, 'active_levels', levels)

        if self.n_train < 2 or self.n_test < 2:
            raise ConfigurationError("Train and test sets need at least two "
                                     "samples each")
        if self.j_inputs < 1:
            raise ConfigurationError("j_inputs must be positive")
        if len(self.branching) == 0 or min(self.branching) < 1:
            raise ConfigurationError("Branching factors must be positive")
        if int(np.prod(self.branching)) != self.k_outputs:
            errmsg = "Branching {} gives {} outputs, not k_outputs={}"
            raise ConfigurationError(errmsg.format(
                list(self.branching), int(np.prod(self.branching)),
                self.k_outputs))
        if not self.signal > 0:
            raise ConfigurationError("signal must be positive")
        if not self.noise_sd >= 0:
            raise ConfigurationError("noise_sd must be non-negative")
        if self.causal_inputs_per_group < 1:
            raise ConfigurationError("causal_inputs_per_group must be at "
                                     "least one")
        height = len(self.branching)
        if any(d < 0 or d > height for d in self.active_levels):
            errmsg = "Active levels must lie between 0 and {}"
            raise ConfigurationError(errmsg.format(height))

    @property
    def height(self):
        """Height of the true tree"""
        return len(self.branching)

    def replace(self, **kwargs):
        """Return a copy with the given fields replaced"""
        return self.__class__(**{**asdict(self), **kwargs})

    def to_dict(self):
        """Plain-data form for manifests"""
        fields = asdict(self)
        fields['branching'] = list(self.branching)
        fields['active_levels'] = list(self.active_levels)
        return fields


def generate_genotypes(n, j, seed):
    """
    Genotype matrix with entries drawn independently and uniformly from
    {0, 1, 2}.

    Parameters
    ----------
    n : int
        Number of samples
    j : int
        Number of inputs
    seed : int or SeedSequence
        Seed of numpy's default generator (PCG64)

    Returns
    -------
    x : ndarray
        n x j float matrix
    """
    if n < 1 or j < 1:
        raise ConfigurationError("Genotype matrix needs n, j >= 1")
    rng = np.random.default_rng(seed)
    return rng.integers(0, 3, size=(n, j)).astype(float)


def _selected_groups(spec, tree):
    """Nodes receiving causal inputs, shallowest first then by id"""
    levels = set(spec.active_levels)
    if spec.include_root:
        levels.add(0)
    depths = {v: tree.depth(v) for v in tree.node_ids}
    return sorted((v for v in tree.node_ids if depths[v] in levels),
                  key=lambda v: (depths[v], v))


def generate_true_structure(spec):
    """
    The true tree and coefficients. Each selected group gets its own block of
    consecutive causal inputs; those inputs carry the signal on every output
    of the group and nothing elsewhere.

    Parameters
    ----------
    spec : SimulationSpec

    Returns
    -------
    tree : OutputTree
        Balanced tree with s_v = g_v = 0.5
    b_true : CoefficientMatrix
        J x K true coefficients
    """
    tree = make_balanced_tree(spec.branching, s=0.5)
    groups = _selected_groups(spec, tree)
    needed = len(groups)*spec.causal_inputs_per_group
    if needed > spec.j_inputs:
        errmsg = "{} groups x {} causal inputs need {} inputs, only {} exist"
        raise ConfigurationError(errmsg.format(len(groups),
                                               spec.causal_inputs_per_group,
                                               needed, spec.j_inputs))
    b = np.zeros((spec.j_inputs, spec.k_outputs))
    for i, v in enumerate(groups):
        start = i*spec.causal_inputs_per_group
        rows = slice(start, start + spec.causal_inputs_per_group)
        b[rows, list(tree.nodes[v].group)] = spec.signal
    logger.debug("True structure: %d groups, %d nonzero coefficients",
                 len(groups), np.count_nonzero(b))
    return tree, CoefficientMatrix(b)


def generate_dataset(spec):
    """
    Independent train and test sets Y = X B_true + noise sharing one true
    structure.

    Parameters
    ----------
    spec : SimulationSpec

    Returns
    -------
    train : DataSet
        Uncentered training data
    test : DataSet
        Uncentered test data
    b_true : CoefficientMatrix
        True coefficients
    tree : OutputTree
        True tree
    """
    tree, b_true = generate_true_structure(spec)
    seeds = np.random.SeedSequence(spec.seed).spawn(3)
    x_seed, x_test_seed, noise_seed = seeds
    noise_rng = np.random.default_rng(noise_seed)

    x_train = generate_genotypes(spec.n_train, spec.j_inputs, x_seed)
    x_test = generate_genotypes(spec.n_test, spec.j_inputs, x_test_seed)
    noise_train = noise_rng.normal(0., 1., (spec.n_train, spec.k_outputs))
    noise_test = noise_rng.normal(0., 1., (spec.n_test, spec.k_outputs))

    y_train = x_train @ b_true.b + spec.noise_sd*noise_train
    y_test = x_test @ b_true.b + spec.noise_sd*noise_test
    return DataSet(x_train, y_train), DataSet(x_test, y_test), b_true, tree


def replicate_seeds(seed, replicates):
    """
    Integer seeds of the replicates of a run. Replicate r draws from child r
    of SeedSequence(seed).spawn(replicates).
    """
    if replicates < 1:
        raise ConfigurationError("At least one replicate is required")
    children = np.random.SeedSequence(seed).spawn(replicates)
    return [int(child.generate_state(1)[0]) for child in children]
