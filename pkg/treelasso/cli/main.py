"""
The treelasso command line: simulate, cluster, fit, eval, reproduce and
rerun.

Every sub-command takes --config FILE, a YAML mapping of option names to
values. Explicit flags override the file, which overrides the built-in
defaults. The resolved options are written to <command>_manifest.json next
to the outputs.

Exit codes: 0 success, 2 invalid input or options, 3 file system error,
4 solver failure.
"""

import argparse
import logging
import sys
import time

import numpy as np
import pandas as pd

from collections import namedtuple
from pathlib import Path

import treelasso
from treelasso.cli.manifest import RunManifest, manifest_path
from treelasso.cli.reproduce import FIGURES, METHODS
from treelasso.core.data import DataSet
from treelasso.core.tree import make_l1l2_tree, make_lasso_tree
from treelasso.evaluation.metrics import aggregate_replicates, auc, \
    curve_frame, roc_by_lambda, roc_by_threshold, support_metrics, test_mse
from treelasso.simgen.generator import SimulationSpec, generate_dataset
from treelasso.solver.alternating import fit
from treelasso.solver.config import SolverConfig
from treelasso.solver.crossval import cross_validate
from treelasso.treelearn.clustering import learn_tree
from treelasso.utils.environment import get_data_dir
from treelasso.utils.errors import ConfigurationError, SolverError, \
    TreeLassoError
from treelasso.utils.io import load_config, read_matrix, read_tree, \
    write_dendrogram, write_json, write_matrix, write_table, write_tree
from treelasso.utils.logger import set_log_level

__all__ = ['main', 'run', 'build_parser', 'resolve_options', 'run_command',
           'COMMANDS']

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_SOLVER = 4

# A command-line option: dest name, argparse keywords, default, and whether
# it is required after resolution or names an input file
Option = namedtuple('Option', ['name', 'kwargs', 'default', 'required',
                               'input'], defaults=(None, False, False))

_common = [Option('out_dir', {'help': "Output directory (default "
                              "$TREELASSO_DATA_DIR or the working "
                              "directory)"}),
           Option('jobs', {'type': int, 'help': "Parallel fits"}, 1)]

_solver = [Option('tol', {'type': float,
                          'help': "Relative objective change to stop at"},
                  1e-6),
           Option('max_iter', {'type': int, 'help': "Iteration limit"}, 1000)]

_cv = [Option('folds', {'type': int, 'help': "Cross-validation folds"}, 5),
       Option('lambda_grid', {'type': float, 'nargs': '+',
                              'help': "Candidate strengths for "
                                      "cross-validation"})]

_options = {
    'simulate': [
        Option('seed', {'type': int, 'help': "Base seed"}, required=True),
        Option('n_train', {'type': int}, 150),
        Option('n_test', {'type': int}, 50),
        Option('j_inputs', {'type': int}, 200),
        Option('branching', {'type': int, 'nargs': '+',
                             'help': "Children per level, root first"},
               [3, 2, 5, 2]),
        Option('signal', {'type': float}, 0.4),
        Option('noise_sd', {'type': float}, 1.),
        Option('causal_inputs_per_group', {'type': int}, 2),
        Option('active_levels', {'type': int, 'nargs': '+',
                                 'help': "Depths of groups given causal "
                                         "inputs"}),
        Option('include_root', {'action': 'store_true'}, False),
    ] + _common,
    'cluster': [
        Option('y', {'help': "Output matrix file"}, required=True,
               input=True),
        Option('rho', {'type': float,
                       'help': "Neutralize merges above this normalized "
                               "height"}, 1.),
    ] + _common,
    'fit': [
        Option('x', {'help': "Input matrix file"}, required=True, input=True),
        Option('y', {'help': "Output matrix file"}, required=True,
               input=True),
        Option('tree', {'help': "Tree file, for --method tree"}, input=True),
        Option('method', {'choices': ['lasso', 'l1l2', 'tree']}, 'tree'),
        Option('lam', {'type': float, 'help': "Regularization strength"},
               1.),
        Option('cv', {'action': 'store_true',
                      'help': "Choose lambda by cross-validation"}, False),
        Option('seed', {'type': int, 'help': "Cross-validation seed"}, 0),
        Option('x_test', {'help': "Inputs to predict outputs for"},
               input=True),
    ] + _cv + _solver + _common,
    'eval': [
        Option('b_hat', {'nargs': '+', 'help': "Estimated coefficient "
                         "file(s)"}, input=True),
        Option('b_true', {'help': "True coefficient file"}, input=True),
        Option('y_pred', {'help': "Predicted output file"}, input=True),
        Option('y_test', {'help': "Test output file"}, input=True),
        Option('replicate_dir', {'help': "Directory of replicate "
                                 "sub-directories"}, input=True),
        Option('roc_mode', {'choices': ['threshold', 'lambda']},
               'threshold'),
        Option('lambdas', {'type': float, 'nargs': '+',
                           'help': "Strength of each --b-hat file in lambda "
                                   "mode"}),
        Option('tau', {'type': float, 'help': "Support cutoff"}),
        Option('method', {'help': "Label of the method evaluated"}, 'model'),
    ] + _common,
    'reproduce': [
        Option('replicates', {'type': int}, 50),
        Option('signals', {'type': float, 'nargs': '+'}, [0.2, 0.4, 0.6]),
        Option('methods', {'nargs': '+', 'choices': list(METHODS)},
               list(METHODS)),
        Option('seed', {'type': int}, 0),
        Option('cv_every_replicate', {'action': 'store_true'}, False),
        Option('grid_points', {'type': int,
                               'help': "Points per axis of the penalty grid"},
               21),
        Option('n_train', {'type': int}, 150),
        Option('n_test', {'type': int}, 50),
        Option('j_inputs', {'type': int}, 200),
        Option('branching', {'type': int, 'nargs': '+'}, [3, 2, 5, 2]),
        Option('noise_sd', {'type': float}, 1.),
        Option('causal_inputs_per_group', {'type': int}, 2),
    ] + _cv + _solver + _common,
}


def resolve_options(command, explicit, config_file=None):
    """
    Merge built-in defaults, the config file and explicit flags, in
    increasing precedence.

    Parameters
    ----------
    command : str
        Sub-command name
    explicit : dict
        Options given on the command line
    config_file : str, optional
        YAML file of option values

    Returns
    -------
    options : dict
        Every option of the command with its resolved value
    """
    known = {opt.name: opt for opt in _options[command]}
    from_file = load_config(config_file)
    unknown = set(from_file) - set(known) - {'figure'}
    if unknown:
        errmsg = "Unknown options for {}: {}"
        raise ConfigurationError(errmsg.format(command, sorted(unknown)))

    options = {name: opt.default for name, opt in known.items()}
    options.update(from_file)
    options.update(explicit)
    if options['out_dir'] is None:
        options['out_dir'] = get_data_dir()
    missing = [name for name, opt in known.items()
               if opt.required and options[name] is None]
    if missing:
        errmsg = "Missing required options for {}: {}"
        raise ConfigurationError(errmsg.format(
            command, ', '.join('--'+m.replace('_', '-') for m in missing)))
    return options


def _out(options, name):
    return str(Path(options['out_dir'])/name)


def cmd_simulate(options):
    """Simulate train and test data with a tree-structured truth"""
    spec = SimulationSpec(n_train=options['n_train'],
                          n_test=options['n_test'],
                          j_inputs=options['j_inputs'],
                          k_outputs=int(np.prod(options['branching'])),
                          branching=options['branching'],
                          signal=options['signal'],
                          noise_sd=options['noise_sd'],
                          causal_inputs_per_group=options[
                              'causal_inputs_per_group'],
                          active_levels=options['active_levels'],
                          include_root=options['include_root'],
                          seed=options['seed'])
    train, test, b_true, tree = generate_dataset(spec)
    outputs = {name: _out(options, name+'.csv')
               for name in ('x_train', 'y_train', 'x_test', 'y_test',
                            'b_true')}
    write_matrix(outputs['x_train'], train.x, prefix='input')
    write_matrix(outputs['y_train'], train.y, prefix='output')
    write_matrix(outputs['x_test'], test.x, prefix='input')
    write_matrix(outputs['y_test'], test.y, prefix='output')
    write_matrix(outputs['b_true'], b_true.b, prefix='output')
    outputs['tree'] = _out(options, 'tree.json')
    write_tree(outputs['tree'], tree)
    return outputs


def cmd_cluster(options):
    """Learn an output tree from an output matrix"""
    dend, tree = learn_tree(read_matrix(options['y']), options['rho'])
    outputs = {'dendrogram': _out(options, 'dendrogram.csv'),
               'tree': _out(options, 'learned_tree.json')}
    write_dendrogram(outputs['dendrogram'], dend)
    write_tree(outputs['tree'], tree)
    return outputs


def _fit_tree(options, num_outputs):
    method = options['method']
    if method == 'lasso':
        return make_lasso_tree(num_outputs)
    if method == 'l1l2':
        return make_l1l2_tree(num_outputs)
    if method != 'tree':
        raise ConfigurationError("Unknown method {}".format(method))
    if options['tree'] is None:
        raise ConfigurationError("--method tree needs --tree")
    return read_tree(options['tree'])


def cmd_fit(options):
    """Fit coefficients, optionally choosing lambda by cross-validation"""
    data = DataSet(read_matrix(options['x']), read_matrix(options['y']))
    tree = _fit_tree(options, data.n_outputs)
    config = SolverConfig(lam=options['lam'], tol=options['tol'],
                          max_iter=options['max_iter'])
    outputs = {}
    if options['cv']:
        lam, table = cross_validate(data, tree,
                                    lambda_grid=options['lambda_grid'],
                                    folds=options['folds'],
                                    seed=options['seed'], config=config,
                                    n_jobs=options['jobs'])
        config = config.replace(lam=lam)
        outputs['cv_table'] = _out(options, 'cv_table.csv')
        write_table(outputs['cv_table'], table)

    result = fit(data, tree, config)
    outputs['coefficients'] = _out(options, 'coefficients.csv')
    write_matrix(outputs['coefficients'], result.b, prefix='output')
    report = {**result.report(), 'method': options['method'],
              'cross_validated': options['cv'], 'solver': config.to_dict()}
    outputs['report'] = _out(options, 'fit_report.json')
    write_json(outputs['report'], report)
    if options['x_test'] is not None:
        outputs['predictions'] = _out(options, 'predictions.csv')
        write_matrix(outputs['predictions'],
                     result.predict(read_matrix(options['x_test'])),
                     prefix='output')
    return outputs


def _metrics_row(b_hat, b_true, tau, y_pred, y_test):
    row = {}
    if b_hat is not None:
        curve = roc_by_threshold(b_hat, b_true)
        row.update(auc=auc(curve), **support_metrics(b_hat, b_true,
                                                     tau).to_dict())
    else:
        curve = None
    if y_pred is not None:
        row['mse'] = test_mse(y_pred, y_test)
    return curve, row


def _eval_replicates(options):
    """Evaluate every replicate sub-directory and average the results"""
    root = Path(options['replicate_dir'])
    dirs = sorted(d for d in root.iterdir()
                  if (d/'coefficients.csv').exists())
    if not dirs:
        raise ConfigurationError("No replicate directories with "
                                 "coefficients.csv under {}".format(root))
    curves, rows, frames = [], [], []
    for i, d in enumerate(dirs):
        has_y = (d/'predictions.csv').exists() and (d/'y_test.csv').exists()
        curve, row = _metrics_row(
            read_matrix(d/'coefficients.csv'), read_matrix(d/'b_true.csv'),
            options['tau'],
            read_matrix(d/'predictions.csv') if has_y else None,
            read_matrix(d/'y_test.csv') if has_y else None)
        curves.append(curve)
        rows.append({'method': options['method'], 'replicate': i, **row})
        frames.append(curve_frame(curve, method=options['method'],
                                  replicate=i))

    mean = aggregate_replicates(curves).to_frame()
    mean.insert(0, 'method', options['method'])
    metrics = pd.DataFrame(rows)
    summary = {'method': options['method'], 'replicates': len(dirs)}
    for column in metrics.columns.drop(['method', 'replicate']):
        stats = aggregate_replicates(metrics[column])
        summary['mean_'+column] = stats.mean
        summary['se_'+column] = stats.se

    outputs = {'roc': _out(options, 'roc.csv'),
               'roc_mean': _out(options, 'roc_mean.csv'),
               'metrics': _out(options, 'metrics.csv'),
               'metrics_summary': _out(options, 'metrics_summary.csv')}
    write_table(outputs['roc'], pd.concat(frames, ignore_index=True))
    write_table(outputs['roc_mean'], mean)
    write_table(outputs['metrics'], metrics)
    write_table(outputs['metrics_summary'], pd.DataFrame([summary]))
    return outputs


def cmd_eval(options):
    """Support-recovery and prediction-error metrics"""
    if options['replicate_dir'] is not None:
        return _eval_replicates(options)

    b_hats = options['b_hat'] or []
    if b_hats and options['b_true'] is None:
        raise ConfigurationError("Support evaluation needs --b-true")
    if (options['y_pred'] is None) != (options['y_test'] is None):
        raise ConfigurationError("--y-pred and --y-test go together")
    if not b_hats and options['y_pred'] is None:
        raise ConfigurationError("Nothing to evaluate: give --b-hat and "
                                 "--b-true, or --y-pred and --y-test")

    b_true = None if options['b_true'] is None \
        else read_matrix(options['b_true'])
    y_pred = None if options['y_pred'] is None \
        else read_matrix(options['y_pred'])
    y_test = None if options['y_test'] is None \
        else read_matrix(options['y_test'])

    outputs = {}
    if options['roc_mode'] == 'lambda' and b_hats:
        lambdas = options['lambdas'] or []
        if len(lambdas) != len(b_hats):
            raise ConfigurationError("Lambda mode needs one --lambdas value "
                                     "per --b-hat file")
        curve = roc_by_lambda([read_matrix(p) for p in b_hats], lambdas,
                              b_true, options['tau'])
        _, row = _metrics_row(None, None, None, y_pred, y_test)
        row['auc'] = auc(curve)
    else:
        if len(b_hats) > 1:
            raise ConfigurationError("Threshold mode takes a single --b-hat")
        b_hat = read_matrix(b_hats[0]) if b_hats else None
        curve, row = _metrics_row(b_hat, b_true, options['tau'], y_pred,
                                  y_test)

    if curve is not None:
        outputs['roc'] = _out(options, 'roc.csv')
        write_table(outputs['roc'], curve_frame(curve,
                                                method=options['method'],
                                                replicate=0))
    outputs['metrics'] = _out(options, 'metrics.csv')
    write_table(outputs['metrics'],
                pd.DataFrame([{'method': options['method'], **row}]))
    return outputs


def cmd_reproduce(options):
    """Data behind the simulation-study figures"""
    figure = options['figure']
    if figure not in FIGURES:
        raise ConfigurationError("Unknown figure {}".format(figure))
    unknown = set(options['methods']) - set(METHODS)
    if unknown:
        raise ConfigurationError("Unknown methods {}".format(sorted(unknown)))
    if options['replicates'] < 1:
        raise ConfigurationError("At least one replicate is required")
    return FIGURES[figure](options['out_dir'], options,
                           n_jobs=options['jobs'])


COMMANDS = {'simulate': cmd_simulate, 'cluster': cmd_cluster,
            'fit': cmd_fit, 'eval': cmd_eval, 'reproduce': cmd_reproduce}


def run_command(command, options):
    """
    Run a sub-command with resolved options and write its manifest.

    Returns
    -------
    manifest : RunManifest
    """
    start = time.perf_counter()
    Path(options['out_dir']).mkdir(parents=True, exist_ok=True)
    outputs = COMMANDS[command](options)
    inputs = {opt.name: options[opt.name] for opt in _options[command]
              if opt.input and options[opt.name] is not None}
    manifest = RunManifest(command=command, config=options, inputs=inputs,
                           outputs=outputs, seed=options.get('seed'),
                           version=treelasso.__version__,
                           wall_time=time.perf_counter() - start)
    manifest.write(manifest_path(options['out_dir'], command))
    logger.info("%s wrote %d files to %s", command, len(outputs),
                options['out_dir'])
    return manifest


def rerun(path, out_dir=None):
    """Re-run the command recorded in a manifest"""
    recorded = RunManifest.read(path)
    if recorded.command not in COMMANDS:
        raise ConfigurationError("Manifest records unknown command "
                                 "{}".format(recorded.command))
    options = dict(recorded.config)
    if out_dir is not None:
        options['out_dir'] = out_dir
    return run_command(recorded.command, options)


def build_parser():
    """The argparse parser of every sub-command"""
    parser = argparse.ArgumentParser(
        prog='treelasso', description="Tree-guided group lasso for "
        "multiple-output regression")
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help="More logging")
    parser.add_argument('-q', '--quiet', action='count', default=0,
                        help="Less logging")
    sub = parser.add_subparsers(dest='command', required=True)
    for command, options in _options.items():
        handler = COMMANDS[command]
        p = sub.add_parser(command, help=handler.__doc__,
                           argument_default=argparse.SUPPRESS)
        if command == 'reproduce':
            p.add_argument('figure', choices=sorted(FIGURES))
        p.add_argument('--config', help="YAML file of option values")
        for opt in options:
            p.add_argument('--'+opt.name.replace('_', '-'), dest=opt.name,
                           **opt.kwargs)

    p = sub.add_parser('rerun', help="Re-run a command from its manifest")
    p.add_argument('manifest')
    p.add_argument('--out-dir', dest='out_dir', default=None)
    return parser


def _set_verbosity(verbose, quiet):
    if verbose or quiet:
        level = logging.INFO + 10*(quiet - verbose)
        set_log_level(min(max(level, logging.DEBUG), logging.CRITICAL))


def main(argv=None):
    """
    Entry point of the command line.

    Returns
    -------
    code : int
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    explicit = vars(args)
    command = explicit.pop('command')
    _set_verbosity(explicit.pop('verbose'), explicit.pop('quiet'))

    try:
        if command == 'rerun':
            rerun(explicit['manifest'], explicit['out_dir'])
        else:
            config_file = explicit.pop('config', None)
            run_command(command, resolve_options(command, explicit,
                                                 config_file))
    except SolverError as e:
        logger.error("Solver failure: %s", e)
        return EXIT_SOLVER
    except (TreeLassoError, ValueError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except OSError as e:
        logger.error("%s", e)
        return EXIT_IO
    return EXIT_OK


def run():
    """Console script entry point"""
    sys.exit(main())
