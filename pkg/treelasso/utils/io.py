"""Readers and writers for the files exchanged between commands"""

import json
import logging

import numpy as np
import pandas as pd
import yaml

from pathlib import Path

from treelasso.utils.errors import ConfigurationError, InputError, TreeError

__all__ = ['read_matrix', 'write_matrix', 'read_tree', 'write_tree',
           'read_dendrogram', 'write_dendrogram', 'read_json', 'write_json',
           'write_table', 'read_table', 'load_config', 'DENDROGRAM_COLUMNS']

logger = logging.getLogger(__name__)

DENDROGRAM_COLUMNS = ['left', 'right', 'height', 'normalized_height', 'size']


def _prepare(path):
    """Path object with its parent directory created"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_matrix(path, array, prefix='c'):
    """
    Write a matrix as comma-separated text with a '#'-prefixed header naming
    the columns <prefix>0, <prefix>1, ...
    """
    array = np.atleast_2d(np.asarray(array, dtype=float))
    header = ','.join('{}{}'.format(prefix, i) for i in range(array.shape[1]))
    np.savetxt(_prepare(path), array, delimiter=',', fmt='%.17g',
               header=header, comments='# ')
    logger.debug("Wrote %s matrix to %s", array.shape, path)


def read_matrix(path):
    """Read a matrix written by write_matrix (or any comma-separated table)"""
    try:
        return np.loadtxt(path, delimiter=',', comments='#', ndmin=2)
    except ValueError as e:
        raise InputError("Cannot parse matrix {}: {}".format(path, e))


def write_json(path, content):
    """Write plain data as indented JSON with sorted keys"""
    with open(_prepare(path), 'w') as f:
        json.dump(content, f, indent=2, sort_keys=True)
        f.write('\n')


def read_json(path):
    """Read a JSON file"""
    with open(path) as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise InputError("Cannot parse JSON {}: {}".format(path, e))


def write_tree(path, tree):
    """Write an OutputTree as JSON"""
    write_json(path, tree.to_dict())


def read_tree(path, check=True):
    """Read an OutputTree written by write_tree"""
    from treelasso.core.tree import OutputTree
    try:
        description = read_json(path)
    except InputError as e:
        raise TreeError(str(e))
    if not isinstance(description, dict):
        raise TreeError("Tree file {} does not hold a mapping".format(path))
    return OutputTree.from_dict(description, check=check)


def write_table(path, frame):
    """Write a metric table as CSV without the index"""
    frame.to_csv(_prepare(path), index=False)


def read_table(path):
    """Read a CSV table"""
    return pd.read_csv(path)


def write_dendrogram(path, dend):
    """Write the merge table of a Dendrogram as CSV"""
    frame = pd.DataFrame({'left': [m[0] for m in dend.merges],
                          'right': [m[1] for m in dend.merges],
                          'height': dend.heights,
                          'normalized_height': dend.normalized_heights,
                          'size': dend.sizes})
    write_table(path, frame[DENDROGRAM_COLUMNS])


def read_dendrogram(path):
    """Read a Dendrogram written by write_dendrogram"""
    from treelasso.treelearn.clustering import Dendrogram
    frame = read_table(path)
    missing = set(DENDROGRAM_COLUMNS) - set(frame.columns)
    if missing:
        errmsg = "Dendrogram file {} lacks columns {}"
        raise InputError(errmsg.format(path, sorted(missing)))
    merges = zip(frame['left'], frame['right'], frame['height'])
    return Dendrogram(list(merges), len(frame) + 1)


def load_config(path):
    """
    Read a YAML configuration file holding a mapping of option names to
    values. Dashes in option names are read as underscores.
    """
    if path is None:
        return {}
    with open(path) as f:
        try:
            content = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigurationError("Cannot parse config {}: {}".format(path,
                                                                         e))
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise ConfigurationError("Config {} must hold a mapping".format(path))
    return {str(k).replace('-', '_'): v for k, v in content.items()}
