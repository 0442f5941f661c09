"""
Replicate pipelines behind the reproduction command: simulate, choose lambda,
fit each method and score support recovery and prediction error.
"""

import itertools
import logging

import numpy as np
import pandas as pd

from joblib import Parallel, delayed
from operator import itemgetter
from pathlib import Path

from treelasso.core.symbolic import penalty_function
from treelasso.core.tree import make_example_tree, make_l1l2_tree, \
    make_lasso_tree
from treelasso.evaluation.metrics import aggregate_replicates, auc, \
    roc_by_threshold, test_mse
from treelasso.simgen.generator import SimulationSpec, generate_dataset, \
    replicate_seeds
from treelasso.solver.alternating import fit
from treelasso.solver.config import SolverConfig
from treelasso.solver.crossval import cross_validate
from treelasso.treelearn.clustering import learn_tree
from treelasso.utils.errors import ConfigurationError
from treelasso.utils.io import write_matrix, write_table

__all__ = ['METHODS', 'method_tree', 'run_replicate', 'run_signal',
           'reproduce_fig2', 'reproduce_fig3', 'reproduce_fig4',
           'reproduce_fig5', 'FIGURES']

logger = logging.getLogger(__name__)

METHODS = ('lasso', 'l1l2', 'tree', 'T0.9', 'T0.7')

# (g4, g5) settings of the example-tree penalty surfaces
_EXAMPLE_WEIGHTS = ((0.5, 0.5), (0.7, 0.7), (0.2, 0.7), (0.7, 0.2))


def method_tree(method, true_tree, train):
    """
    The tree a method fits with: a degenerate star tree, the true tree, or a
    tree learned from the training outputs and thresholded at rho for
    methods named T<rho>.
    """
    num = train.n_outputs
    if method == 'lasso':
        return make_lasso_tree(num)
    if method == 'l1l2':
        return make_l1l2_tree(num)
    if method == 'tree':
        return true_tree
    if method.startswith('T'):
        try:
            rho = float(method[1:])
        except ValueError:
            raise ConfigurationError("Unknown method {}".format(method))
        return learn_tree(train.y, rho)[1]
    raise ConfigurationError("Unknown method {}".format(method))


def _solver_config(options):
    return SolverConfig(tol=options['tol'], max_iter=options['max_iter'])


def run_replicate(spec, methods, options, lambdas=None, n_jobs=1):
    """
    Simulate one dataset and fit every method on it.

    Parameters
    ----------
    spec : SimulationSpec
        Settings of the replicate, seed included
    methods : sequence of str
        Methods to fit
    options : dict
        Resolved command options (folds, lambda_grid, tol, max_iter)
    lambdas : dict, optional
        Strength per method. Chosen by cross-validation when absent.
    n_jobs : int
        Parallel cross-validation fits

    Returns
    -------
    records : list of dict
        One record per method with its strength, ROC curve, AUC, test MSE
        and fitted coefficients
    b_true : ndarray
        True coefficients of the replicate
    """
    train, test, b_true, true_tree = generate_dataset(spec)
    config = _solver_config(options)
    records = []
    for method in methods:
        tree = method_tree(method, true_tree, train)
        if lambdas is None:
            lam, _ = cross_validate(train, tree,
                                    lambda_grid=options['lambda_grid'],
                                    folds=options['folds'], seed=spec.seed,
                                    config=config, n_jobs=n_jobs)
        else:
            lam = lambdas[method]
        result = fit(train, tree, config.replace(lam=lam))
        curve = roc_by_threshold(result.coefficients, b_true)
        records.append({'method': method, 'lambda': lam, 'curve': curve,
                        'auc': auc(curve),
                        'mse': test_mse(result.predict(test.x), test.y),
                        'b_hat': result.b})
    return records, b_true.b


def run_signal(signal, options, n_jobs=1):
    """
    All replicates of one signal strength. Lambda is chosen by
    cross-validation on the first replicate and reused for the rest unless
    options['cv_every_replicate'] is set.

    Returns
    -------
    records : list of dict
        Records of run_replicate tagged with signal and replicate index
    """
    seeds = replicate_seeds(options['seed'], options['replicates'])
    base = _base_spec(options, signal)
    methods = options['methods']

    first, _ = run_replicate(base.replace(seed=seeds[0]), methods, options,
                             n_jobs=n_jobs)
    lambdas = None if options['cv_every_replicate'] \
        else {r['method']: r['lambda'] for r in first}
    rest = Parallel(n_jobs=n_jobs)(
        delayed(run_replicate)(base.replace(seed=seed), methods, options,
                               lambdas=lambdas)
        for seed in seeds[1:])

    records = []
    for replicate, batch in enumerate([first] + [r[0] for r in rest]):
        for record in batch:
            records.append({**record, 'signal': signal,
                            'replicate': replicate})
    logger.info("Signal %g: %d replicates x %d methods done", signal,
                len(seeds), len(methods))
    return records


def _base_spec(options, signal):
    """Simulation settings shared by every replicate of a signal"""
    branching = tuple(options['branching'])
    return SimulationSpec(n_train=options['n_train'],
                          n_test=options['n_test'],
                          j_inputs=options['j_inputs'],
                          k_outputs=int(np.prod(branching)),
                          branching=branching, signal=signal,
                          noise_sd=options['noise_sd'],
                          causal_inputs_per_group=options[
                              'causal_inputs_per_group'])


def _run_all(options, n_jobs):
    records = []
    for signal in options['signals']:
        records.extend(run_signal(signal, options, n_jobs=n_jobs))
    return records


def reproduce_fig2(out_dir, options, n_jobs=1):
    """
    Penalty values over a cube of coefficients (beta_0, beta_1, beta_2) for
    lasso, L1/L2 and the example tree at several (g4, g5).
    """
    axis = np.linspace(-1., 1., options['grid_points'])
    b0, b1, b2 = (a.ravel() for a in np.meshgrid(axis, axis, axis,
                                                 indexing='ij'))
    penalties = [('lasso', make_lasso_tree(3)), ('l1l2', make_l1l2_tree(3))]
    for g4, g5 in _EXAMPLE_WEIGHTS:
        penalties.append(('tree_g4={}_g5={}'.format(g4, g5),
                          make_example_tree(s4=1.-g4, s5=1.-g5)))

    frames = []
    for name, tree in penalties:
        frames.append(pd.DataFrame({'penalty': name, 'beta_0': b0,
                                    'beta_1': b1, 'beta_2': b2,
                                    'value': penalty_function(tree)(b0, b1,
                                                                    b2)}))
    path = Path(out_dir)/'penalty_grid.csv'
    write_table(path, pd.concat(frames, ignore_index=True))
    return {'penalty_grid': str(path)}


def reproduce_fig3(out_dir, options, n_jobs=1):
    """True and estimated coefficients of a single replicate"""
    seed = replicate_seeds(options['seed'], 1)[0]
    spec = _base_spec(options, options['signals'][0]).replace(seed=seed)
    records, b_true = run_replicate(spec, options['methods'], options,
                                    n_jobs=n_jobs)
    outputs = {'b_true': str(Path(out_dir)/'b_true.csv')}
    write_matrix(outputs['b_true'], b_true, prefix='output')
    for record in records:
        name = 'b_hat_{}'.format(record['method'])
        outputs[name] = str(Path(out_dir)/'{}.csv'.format(name))
        write_matrix(outputs[name], record['b_hat'], prefix='output')
    return outputs


def reproduce_fig4(out_dir, options, n_jobs=1):
    """Replicate-averaged ROC curves per signal and method, with AUCs"""
    records = _run_all(options, n_jobs)
    curves, aucs = [], []
    keyfunc = itemgetter('signal', 'method')
    for (signal, method), group in itertools.groupby(
            sorted(records, key=keyfunc), keyfunc):
        group = list(group)
        mean = aggregate_replicates([r['curve'] for r in group]).to_frame()
        mean.insert(0, 'method', method)
        mean.insert(0, 'signal', signal)
        curves.append(mean)
        aucs.extend({'signal': signal, 'method': method,
                     'replicate': r['replicate'], 'lambda': r['lambda'],
                     'auc': r['auc']} for r in group)

    outputs = {'roc_mean': str(Path(out_dir)/'roc_mean.csv'),
               'auc': str(Path(out_dir)/'auc.csv')}
    write_table(outputs['roc_mean'], pd.concat(curves, ignore_index=True))
    write_table(outputs['auc'], pd.DataFrame(aucs))
    return outputs


def reproduce_fig5(out_dir, options, n_jobs=1):
    """Test MSE per replicate and its replicate mean per signal and method"""
    records = _run_all(options, n_jobs)
    table = pd.DataFrame([{'method': r['method'], 'signal': r['signal'],
                           'replicate': r['replicate'],
                           'lambda': r['lambda'], 'mse': r['mse']}
                          for r in records])
    summary = []
    for (method, signal), group in table.groupby(['method', 'signal'],
                                                 sort=False):
        stats = aggregate_replicates(group['mse'])
        summary.append({'method': method, 'signal': signal,
                        'mean_mse': stats.mean, 'se_mse': stats.se,
                        'replicates': stats.replicates})

    outputs = {'mse': str(Path(out_dir)/'mse.csv'),
               'mse_summary': str(Path(out_dir)/'mse_summary.csv')}
    write_table(outputs['mse'], table)
    write_table(outputs['mse_summary'], pd.DataFrame(summary))
    return outputs


FIGURES = {'fig2': reproduce_fig2, 'fig3': reproduce_fig3,
           'fig4': reproduce_fig4, 'fig5': reproduce_fig5}
