"""The symbolic penalty"""

import sympy as sp
import numpy as np
import networkx as nx

from treelasso.utils.errors import ConfigurationError

__all__ = ['PenaltyExpression', 'symbolic_penalty', 'penalty_function']


class PenaltyExpression:
    """
    The recursive tree penalty for a single input as a symbolic expression in
    the coefficients beta_k and the node weights s_v, g_v.

    Parameters
    ----------
    tree : OutputTree
        Tree with (s, g) set on every internal node

    Attributes
    ----------
    tree : OutputTree
        The tree the expression is built from
    beta : tuple
        Coefficient symbols, one per output
    s : dict
        Separate-selection weight symbols for each internal node
    g : dict
        Joint-selection weight symbols for each internal node
    expr : Expr
        W(root) in terms of the symbols above
    atoms : dict
        Norm term of each node's group: |beta_k| for leaves, the Euclidean
        norm of the group's coefficients for internal nodes

    Methods
    -------
    coefficient(v)
        Symbolic weight multiplying the norm term of node v
    numeric()
        The expression with the tree's numeric weights substituted
    lambdified()
        Vectorised numpy function evaluating the numeric expression
    """
    def __init__(self, tree):
        if not tree.has_sg:
            raise ConfigurationError("Symbolic penalty needs (s, g) on every "
                                     "internal node")
        self._tree = tree
        self._beta = sp.symbols('beta_0:{}'.format(tree.num_outputs),
                                real=True)
        self._s = {v: sp.Symbol('s_'+str(v), nonnegative=True)
                   for v in tree.internal}
        self._g = {v: sp.Symbol('g_'+str(v), nonnegative=True)
                   for v in tree.internal}

        self._get_atoms()
        self._get_expression()

    def __str__(self):
        return "PenaltyExpression({})".format(str(self.expr))

    def __repr__(self):
        return "PenaltyExpression({})".format(str(self.expr))

    def _get_atoms(self):
        """Get the norm term of each group"""
        atoms = {}
        for v, node in self.tree.nodes.items():
            members = [self.beta[k] for k in node.group]
            if node.is_leaf:
                atoms[v] = sum(sp.Abs(m) for m in members)
            else:
                atoms[v] = sp.sqrt(sum(m**2 for m in members))
        self._atoms = atoms

    def _get_expression(self):
        """Build W(root) from the leaves upward"""
        values = {}
        for v in nx.dfs_postorder_nodes(self.tree.graph, self.tree.root):
            node = self.tree.nodes[v]
            if node.is_leaf:
                values[v] = self.atoms[v]
            else:
                separate = sum(sp.Abs(values[c]) for c in node.children)
                values[v] = self.s[v]*separate + self.g[v]*self.atoms[v]
        # Abs of the non-negative child terms evaluates away
        self._expr = sp.expand(values[self.tree.root])

    def coefficient(self, v):
        """
        Symbolic weight multiplying the norm term of node v. Groups of
        internal nodes with a single output share their term with the leaf.
        """
        return sp.factor(self.expr.coeff(self.atoms[v]))

    def numeric(self):
        """The expression with the tree's (s, g) values substituted"""
        reps = {}
        for v in self.tree.internal:
            reps[self.s[v]] = self.tree.nodes[v].s
            reps[self.g[v]] = self.tree.nodes[v].g
        return self.expr.subs(reps)

    def lambdified(self):
        """
        Return a function evaluating the numeric penalty. Arguments are the K
        coefficient values (scalars or arrays of identical shape).
        """
        gen_func = sp.lambdify(self.beta, self.numeric(), 'numpy')

        def penfunc(*beta_vals):
            shape = np.shape(beta_vals[0])
            for val in beta_vals:
                if np.shape(val) != shape:
                    raise ValueError("Inconsistent coefficient array sizes")
            return np.broadcast_to(gen_func(*beta_vals), shape)

        return penfunc

    @property
    def tree(self):
        """The tree the expression is built from"""
        return self._tree

    @property
    def beta(self):
        """Coefficient symbols"""
        return self._beta

    @property
    def s(self):
        """Separate-selection weight symbols"""
        return self._s

    @property
    def g(self):
        """Joint-selection weight symbols"""
        return self._g

    @property
    def atoms(self):
        """Norm term of each node's group"""
        return self._atoms

    @property
    def expr(self):
        """The symbolic penalty"""
        return self._expr


def symbolic_penalty(tree):
    """W(root) for one input as a sympy expression"""
    return PenaltyExpression(tree).expr


def penalty_function(tree):
    """Numeric single-input penalty of the tree as a numpy function"""
    return PenaltyExpression(tree).lambdified()
