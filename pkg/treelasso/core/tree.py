"""
Output trees: topology over the outputs, per-node (s, g) weights and the
derived group weights w_v.
"""

import logging

import numpy as np
import networkx as nx

from functools import cached_property
from frozendict import frozendict

from treelasso.utils.environment import get_weight_feps
from treelasso.utils.errors import ConfigurationError, DimensionError, \
    TreeError

__all__ = ['TreeNode', 'OutputTree', 'ValidationReport', 'Violation',
           'validate_tree', 'compute_group_weights', 'ensure_group_weights',
           'weight_sum_per_leaf',
           'make_star_tree', 'make_lasso_tree', 'make_l1l2_tree',
           'make_example_tree', 'make_balanced_tree', 'random_tree']

logger = logging.getLogger(__name__)


class TreeNode:
    """
    A single node of an output tree.

    Parameters
    ----------
    id : int
        Node identifier. Leaves use the index of their output as id.
    children : iterable of int
        Ids of the child nodes. Empty for leaves.
    s : float, optional
        Weight for selecting the outputs of each child separately
    g : float, optional
        Weight for selecting the outputs below the node jointly. Defaults to
        1 - s when s is supplied.
    group : iterable of int, optional
        Output indices at the leaves below the node. Filled from the topology
        by OutputTree when not supplied.
    derived_w : float, optional
        Effective weight of the group of this node in the penalty

    Attributes
    ----------
    is_leaf : bool
        True if the node has no children
    """
    def __init__(self, id, children=(), s=None, g=None, group=None,
                 derived_w=None):
        self._id = int(id)
        self._children = tuple(int(c) for c in children)
        if s is not None and g is None:
            g = 1. - float(s)
        elif g is not None and s is None:
            s = 1. - float(g)
        elif s is not None and abs(float(s) + float(g) - 1.) \
                <= get_weight_feps():
            # Stored so that the constraint holds exactly
            g = 1. - float(s)
        self._s = None if s is None else float(s)
        self._g = None if g is None else float(g)
        self._group = None if group is None \
            else tuple(sorted(int(k) for k in group))
        self._derived_w = None if derived_w is None else float(derived_w)

    def __repr__(self):
        return "TreeNode(id={}, children={}, s={}, g={}, w={})".format(
            self.id, self.children, self.s, self.g, self.derived_w)

    def replace(self, **kwargs):
        """Return a copy of the node with the given fields replaced"""
        fields = {'id': self.id, 'children': self.children, 's': self.s,
                  'g': self.g, 'group': self.group,
                  'derived_w': self.derived_w}
        if 's' in kwargs and 'g' not in kwargs:
            fields['g'] = None
        elif 'g' in kwargs and 's' not in kwargs:
            fields['s'] = None
        fields.update(kwargs)
        return self.__class__(**fields)

    @property
    def id(self):
        """Node identifier"""
        return self._id

    @property
    def children(self):
        """Ids of the child nodes"""
        return self._children

    @property
    def is_leaf(self):
        """True if the node has no children"""
        return len(self.children) == 0

    @property
    def s(self):
        """Separate-selection weight"""
        return self._s

    @property
    def g(self):
        """Joint-selection weight"""
        return self._g

    @property
    def group(self):
        """Sorted output indices below the node"""
        return self._group

    @property
    def derived_w(self):
        """Effective penalty weight of the node's group"""
        return self._derived_w


class Violation:
    """
    A single broken tree invariant.

    Parameters
    ----------
    kind : str
        Category of the violation, e.g. 'orphan' or 'sg_sum'
    node : int or None
        Node at fault, if any
    message : str
        Human-readable description
    advisory : bool
        Advisory violations are reported but never block construction
    """
    def __init__(self, kind, node, message, advisory=False):
        self.kind = kind
        self.node = node
        self.message = message
        self.advisory = advisory

    def __repr__(self):
        return "Violation({}, node={}: {})".format(self.kind, self.node,
                                                   self.message)


class ValidationReport:
    """
    All invariant violations found in a tree. The report is empty if and only
    if every invariant holds.

    Attributes
    ----------
    violations : tuple
        Every Violation found
    errors : tuple
        Violations which are not advisory
    ok : bool
        True if there are no non-advisory violations
    """
    def __init__(self, violations):
        self._violations = tuple(violations)

    def __len__(self):
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def __str__(self):
        if len(self) == 0:
            return "ValidationReport(ok)"
        return "ValidationReport:\n" + "\n".join("  " + str(v)
                                                for v in self.violations)

    def kinds(self):
        """Set of violation kinds present"""
        return {v.kind for v in self.violations}

    @property
    def violations(self):
        """Every violation found"""
        return self._violations

    @property
    def errors(self):
        """Non-advisory violations"""
        return tuple(v for v in self.violations if not v.advisory)

    @property
    def ok(self):
        """True if there are no non-advisory violations"""
        return len(self.errors) == 0


class OutputTree:
    """
    A rooted tree over K outputs. Leaf k carries output k; each internal node
    groups the outputs of its subtree.

    Parameters
    ----------
    nodes : iterable of TreeNode
        The nodes of the tree
    num_outputs : int
        Number of outputs K
    root : int, optional
        Id of the root node. Inferred as the unique parentless node if not
        supplied.
    check : bool
        Raise a TreeError if any non-advisory invariant is violated. Default
        is True. Set to False to build a tree purely for reporting.

    Attributes
    ----------
    nodes : frozendict
        Mapping between node ids and TreeNode objects, with groups filled
    root : int
        Id of the root node
    num_outputs : int
        Number of outputs K
    graph : DiGraph
        Parent-to-child graph of the topology
    node_ids : tuple
        Node ids in ascending order
    leaves : tuple
        Leaf ids in ascending order
    internal : tuple
        Internal node ids in ascending order
    has_weights : bool
        True if every node carries a derived weight
    weight_vector : ndarray
        Derived weights in node_ids order
    membership : ndarray
        |V| x K boolean matrix, True where output k lies in the node's group
    """
    def __init__(self, nodes, num_outputs, root=None, check=True):
        self._num_outputs = int(num_outputs)
        if self._num_outputs < 1:
            raise DimensionError("A tree needs at least one output")
        node_map = {}
        for node in nodes:
            if node.id in node_map:
                raise TreeError("Duplicate node id {}".format(node.id))
            node_map[node.id] = node
        self._build_graph(node_map)
        self._root = self._find_root(root)
        self._declared_groups = frozendict({i: n.group
                                            for i, n in node_map.items()})
        self._fill_groups(node_map)

        if check:
            report = validate_tree(self)
            if not report.ok:
                raise TreeError(str(report))
            for violation in report.violations:
                logger.warning("Advisory: %s", violation.message)

    def _build_graph(self, node_map):
        """Build the parent-to-child graph with networkx"""
        graph = nx.DiGraph()
        graph.add_nodes_from(node_map)
        for node in node_map.values():
            graph.add_edges_from((node.id, child) for child in node.children)
        self._graph = graph
        self._node_map = node_map

    def _find_root(self, root):
        """Identify the root as supplied or as the unique parentless node"""
        if root is not None:
            return int(root)
        parentless = sorted(v for v, deg in self.graph.in_degree()
                            if deg == 0 and v in self._node_map)
        if len(parentless) == 0:
            raise TreeError("Tree has no parentless node")
        # Largest id by convention; other parentless nodes are orphans
        return parentless[-1]

    def _fill_groups(self, node_map):
        """Fill node groups from the topology"""
        groups = {}
        for v in node_map:
            below = nx.descendants(self.graph, v) | {v}
            groups[v] = tuple(sorted(u for u in below
                                     if self.graph.out_degree(u) == 0))
        self._nodes = frozendict({v: node.replace(group=groups[v])
                                  for v, node in node_map.items()})

    @classmethod
    def from_weights(cls, topology, weights, num_outputs, root=None):
        """
        Build a tree whose group weights w_v are supplied directly rather than
        derived from (s, g). The weight-sum property is then only advisory.

        Parameters
        ----------
        topology : dict
            Mapping between node ids and their children
        weights : dict
            Mapping between node ids and w_v
        num_outputs : int
            Number of outputs K
        """
        nodes = [TreeNode(v, children=topology[v], derived_w=weights[v])
                 for v in topology]
        return cls(nodes, num_outputs, root=root)

    def replace_nodes(self, nodes, check=True):
        """Return a tree with the same topology and replacement nodes"""
        return self.__class__(nodes, self.num_outputs, root=self.root,
                              check=check)

    def declared_group(self, v):
        """The group supplied at construction for node v, or None"""
        return self._declared_groups.get(v)

    def parent(self, v):
        """Parent of node v, or None for the root"""
        preds = list(self.graph.predecessors(v))
        return preds[0] if preds else None

    def ancestors(self, v):
        """Ids of the strict ancestors of node v, nearest first"""
        path = []
        parent = self.parent(v)
        while parent is not None:
            path.append(parent)
            parent = self.parent(parent)
        return tuple(path)

    def depth(self, v):
        """Number of edges between node v and the root"""
        return len(self.ancestors(v))

    def relabel_outputs(self, perm):
        """
        Return the tree with output k relabelled as perm[k]. Leaf ids follow
        their outputs; internal ids are unchanged.
        """
        perm = np.asarray(perm, dtype=int)
        if sorted(perm.tolist()) != list(range(self.num_outputs)):
            raise ConfigurationError("perm must be a permutation of outputs")

        def move(v):
            return int(perm[v]) if self.nodes[v].is_leaf else v

        nodes = [TreeNode(move(n.id), children=[move(c) for c in n.children],
                          s=n.s, g=n.g, derived_w=n.derived_w)
                 for n in self.nodes.values()]
        return self.__class__(nodes, self.num_outputs, root=self.root)

    def to_dict(self):
        """Plain-data description of the tree for serialization"""
        entries = []
        direct = not self.has_sg
        for v in self.node_ids:
            node = self.nodes[v]
            entry = {'id': v, 'children': list(node.children)}
            if node.s is not None:
                entry['s'] = node.s
                entry['g'] = node.g
            if direct and node.derived_w is not None:
                entry['w'] = node.derived_w
            entries.append(entry)
        return {'num_outputs': self.num_outputs, 'root': self.root,
                'nodes': entries}

    @classmethod
    def from_dict(cls, description, check=True):
        """
        Build a tree from its plain-data description. Explicit groups, if
        present, are cross-checked against the topology.
        """
        try:
            num_outputs = description['num_outputs']
            entries = description['nodes']
        except KeyError as e:
            raise TreeError("Tree description lacks field {}".format(e))
        nodes = []
        for entry in entries:
            nodes.append(TreeNode(entry['id'],
                                  children=entry.get('children', ()),
                                  s=entry.get('s'), g=entry.get('g'),
                                  group=entry.get('group'),
                                  derived_w=entry.get('w')))
        return cls(nodes, num_outputs, root=description.get('root'),
                   check=check)

    @property
    def nodes(self):
        """Mapping between node ids and nodes"""
        return self._nodes

    @property
    def root(self):
        """Id of the root node"""
        return self._root

    @property
    def num_outputs(self):
        """Number of outputs K"""
        return self._num_outputs

    @property
    def graph(self):
        """Parent-to-child topology"""
        return self._graph

    @cached_property
    def node_ids(self):
        """Node ids in ascending order"""
        return tuple(sorted(self.nodes))

    @cached_property
    def leaves(self):
        """Leaf ids in ascending order"""
        return tuple(v for v in self.node_ids if self.nodes[v].is_leaf)

    @cached_property
    def internal(self):
        """Internal node ids in ascending order"""
        return tuple(v for v in self.node_ids if not self.nodes[v].is_leaf)

    @property
    def has_weights(self):
        """True if every node carries a derived weight"""
        return all(n.derived_w is not None for n in self.nodes.values())

    @property
    def has_sg(self):
        """True if every internal node carries (s, g)"""
        return all(self.nodes[v].s is not None for v in self.internal)

    @cached_property
    def weight_vector(self):
        """Derived weights w_v in node_ids order"""
        if not self.has_weights:
            raise ConfigurationError("Group weights have not been computed")
        return np.array([self.nodes[v].derived_w for v in self.node_ids])

    @cached_property
    def membership(self):
        """|V| x K boolean group membership matrix"""
        mat = np.zeros((len(self.node_ids), self.num_outputs), dtype=bool)
        for i, v in enumerate(self.node_ids):
            mat[i, list(self.nodes[v].group)] = True
        return mat


def validate_tree(tree):
    """
    Check every structural and weight invariant of a tree.

    Parameters
    ----------
    tree : OutputTree
        The tree to check. Build it with check=False to inspect a tree that
        would otherwise be rejected.

    Returns
    -------
    report : ValidationReport
        All violations found. Empty if and only if every invariant holds.
    """
    feps = get_weight_feps()
    graph = tree.graph
    nodes = tree.nodes
    violations = []

    for u, v in graph.edges:
        if v not in nodes:
            violations.append(Violation('unknown_child', u,
                                        "Node {} lists unknown child {}"
                                        .format(u, v)))
    if tree.root not in nodes:
        violations.append(Violation('root', tree.root,
                                    "Root {} is not a node".format(tree.root)))
    for v in tree.node_ids:
        n_parents = graph.in_degree(v)
        if v != tree.root and n_parents == 0:
            violations.append(Violation('orphan', v,
                                        "Node {} has no parent".format(v)))
        elif n_parents > 1:
            violations.append(Violation('multiple_parents', v,
                                        "Node {} has {} parents"
                                        .format(v, n_parents)))
        elif v == tree.root and n_parents != 0:
            violations.append(Violation('root', v,
                                        "Root {} has a parent".format(v)))
    if not nx.is_directed_acyclic_graph(graph):
        violations.append(Violation('cycle', None, "Topology has a cycle"))

    # Leaves carry their own output index
    outputs = set(range(tree.num_outputs))
    leaf_ids = {v for v in tree.leaves}
    for v in sorted(leaf_ids - outputs):
        violations.append(Violation('leaf_id', v,
                                    "Leaf {} is not an output index in "
                                    "0..{}".format(v, tree.num_outputs-1)))
    for k in sorted(outputs - leaf_ids):
        if k in nodes:
            errmsg = "Output {} is an internal node id, not a leaf".format(k)
        else:
            errmsg = "Output {} has no leaf".format(k)
        violations.append(Violation('leaf_id', k, errmsg))

    for v in tree.node_ids:
        declared = tree.declared_group(v)
        if declared is not None and declared != nodes[v].group:
            violations.append(Violation('group_mismatch', v,
                                        "Node {} declares group {} but its "
                                        "subtree holds {}"
                                        .format(v, list(declared),
                                                list(nodes[v].group))))
    if tree.root in nodes and set(nodes[tree.root].group) != outputs:
        violations.append(Violation('group_mismatch', tree.root,
                                    "Root group does not cover every output"))

    direct = any(n.s is None and n.derived_w is not None
                 for n in nodes.values())
    for v in tree.internal:
        node = nodes[v]
        if node.s is None:
            if node.derived_w is None:
                violations.append(Violation('sg_unset', v,
                                            "Node {} has no (s, g)".format(v)))
            continue
        if not (-feps <= node.s <= 1 + feps):
            violations.append(Violation('sg_range', v,
                                        "Node {} has s={} outside [0, 1]"
                                        .format(v, node.s)))
        if abs(node.s + node.g - 1.) > feps:
            violations.append(Violation('sg_sum', v,
                                        "Node {} has s+g={} != 1"
                                        .format(v, node.s + node.g)))

    structural = [x for x in violations
                  if x.kind not in ('sg_range', 'sg_sum')]
    if not structural and (tree.has_sg or tree.has_weights):
        if not tree.has_weights:
            try:
                weighted = compute_group_weights(tree, check=False)
            except ConfigurationError:
                weighted = None
        else:
            weighted = tree
        if weighted is not None:
            sums = weight_sum_per_leaf(weighted)
            for k in np.flatnonzero(np.abs(sums - 1.) > feps):
                violations.append(Violation('weight_sum', int(k),
                                            "Weights covering output {} sum "
                                            "to {!r}, not 1"
                                            .format(k, sums[k]),
                                            advisory=direct))

    return ValidationReport(violations)


def compute_group_weights(tree, check=True):
    """
    Derive w_v for every node from the (s, g) of its ancestors:
    w_v = g_v * prod(s_m for ancestors m) for internal nodes and
    w_v = prod(s_m for ancestors m) for leaves.

    Parameters
    ----------
    tree : OutputTree
        A tree with (s, g) set on every internal node

    Returns
    -------
    weighted : OutputTree
        The same tree with derived_w filled on every node
    """
    missing = [v for v in tree.internal if tree.nodes[v].s is None]
    if missing:
        raise ConfigurationError("Nodes {} have no (s, g) set"
                                 .format(missing))

    weights = {}
    # Product of ancestor s values, propagated from the root downward
    s_prod = {tree.root: 1.}
    for parent, child in nx.bfs_edges(tree.graph, tree.root):
        s_prod[child] = s_prod[parent]*tree.nodes[parent].s
    for v, node in tree.nodes.items():
        scale = s_prod.get(v, 0.)
        weights[v] = scale if node.is_leaf else node.g*scale

    nodes = [node.replace(derived_w=weights[v])
             for v, node in tree.nodes.items()]
    return tree.replace_nodes(nodes, check=check)


def ensure_group_weights(tree):
    """The tree itself if it carries derived weights, else a weighted copy"""
    if tree.has_weights:
        return tree
    return compute_group_weights(tree)


def weight_sum_per_leaf(tree):
    """
    Sum of the group weights covering each output.

    Parameters
    ----------
    tree : OutputTree
        A tree with derived weights

    Returns
    -------
    sums : ndarray
        Length-K vector; every entry is one for a valid (s, g) tree
    """
    return tree.weight_vector @ tree.membership


def make_star_tree(num_outputs, s):
    """
    A root joined directly to K leaves. The penalty is then an elastic-net
    style mix of separate (weight s) and joint (weight 1 - s) selection.
    """
    if num_outputs < 1:
        raise DimensionError("A tree needs at least one output")
    leaves = [TreeNode(k) for k in range(num_outputs)]
    root = TreeNode(num_outputs, children=range(num_outputs), s=s)
    return compute_group_weights(OutputTree(leaves + [root], num_outputs))


def make_lasso_tree(num_outputs):
    """Star tree whose penalty reduces to the lasso"""
    return make_star_tree(num_outputs, 1.)


def make_l1l2_tree(num_outputs):
    """Star tree whose penalty reduces to the L1/L2 penalty"""
    return make_star_tree(num_outputs, 0.)


def make_example_tree(s4=0.5, s5=0.5):
    """
    The three-output example tree: outputs 0 and 1 joined at node 3, which is
    joined with output 2 at the root, node 4.
    """
    nodes = [TreeNode(0), TreeNode(1), TreeNode(2),
             TreeNode(3, children=(0, 1), s=s4),
             TreeNode(4, children=(3, 2), s=s5)]
    return compute_group_weights(OutputTree(nodes, 3))


def make_balanced_tree(branching, s=0.5):
    """
    A balanced tree whose root has branching[0] children, each of which has
    branching[1] children, and so on down to the leaves. Internal ids are
    assigned from the bottom level upward so the root has the largest id.

    Parameters
    ----------
    branching : sequence of int
        Children per node at each level, root first
    s : float
        Separate-selection weight given to every internal node
    """
    branching = [int(b) for b in branching]
    if len(branching) == 0 or any(b < 1 for b in branching):
        raise ConfigurationError("Branching factors must be positive")
    num_outputs = int(np.prod(branching))
    nodes = [TreeNode(k) for k in range(num_outputs)]
    level = list(range(num_outputs))
    next_id = num_outputs
    for b in reversed(branching):
        parents = []
        for start in range(0, len(level), b):
            nodes.append(TreeNode(next_id, children=level[start:start+b],
                                  s=s))
            parents.append(next_id)
            next_id += 1
        level = parents
    return compute_group_weights(OutputTree(nodes, num_outputs))


def random_tree(num_outputs, rng, max_children=4):
    """
    A tree with random topology and random s_v drawn uniformly from [0, 1].

    Parameters
    ----------
    num_outputs : int
        Number of outputs K
    rng : Generator
        numpy random generator
    max_children : int
        Largest number of children merged into one node
    """
    if num_outputs < 1:
        raise DimensionError("A tree needs at least one output")
    nodes = [TreeNode(k) for k in range(num_outputs)]
    clusters = list(range(num_outputs))
    next_id = num_outputs
    while len(clusters) > 1:
        size = int(rng.integers(2, min(max_children, len(clusters)) + 1))
        picked = set(rng.choice(len(clusters), size=size, replace=False))
        children = [c for i, c in enumerate(clusters) if i in picked]
        nodes.append(TreeNode(next_id, children=children,
                              s=float(rng.uniform())))
        clusters = [c for i, c in enumerate(clusters) if i not in picked]
        clusters.append(next_id)
        next_id += 1
    if next_id == num_outputs:
        nodes.append(TreeNode(next_id, children=(0,), s=float(rng.uniform())))
    return compute_group_weights(OutputTree(nodes, num_outputs))
