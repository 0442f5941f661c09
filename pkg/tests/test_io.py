"""Tests for the file formats exchanged between commands"""

import pytest
import numpy as np
import pandas as pd

from treelasso.core.tree import make_example_tree, make_balanced_tree, \
    ensure_group_weights
from treelasso.treelearn.clustering import Dendrogram
from treelasso.utils.errors import ConfigurationError, InputError, TreeError
from treelasso.utils.io import read_matrix, write_matrix, read_tree, \
    write_tree, read_dendrogram, write_dendrogram, read_json, write_json, \
    read_table, write_table, load_config


class TestMatrix:
    """Tests for matrix files"""

    def test_exact(self, tmp_path):
        """Check that written values are read back bit for bit"""
        array = np.random.default_rng(0).normal(size=(5, 3))
        write_matrix(tmp_path/'sub'/'m.csv', array)
        assert np.array_equal(read_matrix(tmp_path/'sub'/'m.csv'), array)

    def test_header(self, tmp_path):
        """Check the column header"""
        write_matrix(tmp_path/'m.csv', np.zeros((2, 3)), prefix='y')
        first = (tmp_path/'m.csv').read_text().splitlines()[0]
        assert first == '# y0,y1,y2'

    def test_single_row(self, tmp_path):
        """Check that one row stays two-dimensional"""
        write_matrix(tmp_path/'m.csv', np.arange(4.))
        assert read_matrix(tmp_path/'m.csv').shape == (1, 4)

    def test_garbage(self, tmp_path):
        """Check that unparsable text is an input error"""
        (tmp_path/'m.csv').write_text('1,2\nthree,4\n')
        with pytest.raises(InputError):
            read_matrix(tmp_path/'m.csv')


class TestTree:
    """Tests for tree files"""

    @pytest.mark.parametrize('tree', [make_example_tree(0.3, 0.6),
                                      make_balanced_tree([2, 3])])
    def test_same_tree(self, tmp_path, tree):
        """Check that topology and weights survive a file"""
        write_tree(tmp_path/'tree.json', tree)
        loaded = read_tree(tmp_path/'tree.json')
        assert loaded.root == tree.root
        assert loaded.num_outputs == tree.num_outputs
        for v in tree.node_ids:
            assert loaded.nodes[v].children == tree.nodes[v].children
            assert loaded.nodes[v].s == tree.nodes[v].s
        assert np.allclose(ensure_group_weights(loaded).weight_vector,
                           tree.weight_vector)

    def test_bad_json(self, tmp_path):
        """Check that a broken file is a tree error"""
        (tmp_path/'tree.json').write_text('{"nodes": [')
        with pytest.raises(TreeError):
            read_tree(tmp_path/'tree.json')

    def test_missing_field(self, tmp_path):
        """Check that a description without outputs is a tree error"""
        write_json(tmp_path/'tree.json', {'nodes': []})
        with pytest.raises(TreeError):
            read_tree(tmp_path/'tree.json')

    def test_not_mapping(self, tmp_path):
        """Check that a list is not a tree"""
        write_json(tmp_path/'tree.json', [1, 2])
        with pytest.raises(TreeError):
            read_tree(tmp_path/'tree.json')


class TestTables:
    """Tests for JSON, CSV tables and dendrograms"""

    def test_json_sorted(self, tmp_path):
        """Check that keys are written in sorted order"""
        write_json(tmp_path/'a.json', {'b': 1, 'a': [1, 2]})
        assert read_json(tmp_path/'a.json') == {'a': [1, 2], 'b': 1}
        text = (tmp_path/'a.json').read_text()
        assert text.index('"a"') < text.index('"b"')

    def test_bad_json(self, tmp_path):
        """Check that broken JSON is an input error"""
        (tmp_path/'a.json').write_text('{')
        with pytest.raises(InputError):
            read_json(tmp_path/'a.json')

    def test_table(self, tmp_path):
        """Check that tables are written without an index"""
        frame = pd.DataFrame({'method': ['tree', 'lasso'], 'auc': [0.9, 0.7]})
        write_table(tmp_path/'t.csv', frame)
        assert read_table(tmp_path/'t.csv').equals(frame)

    def test_dendrogram(self, tmp_path):
        """Check that the merge table survives a file"""
        dend = Dendrogram([(0, 1, 0.2), (2, 3, 0.5), (4, 5, 1.)], 4)
        write_dendrogram(tmp_path/'d.csv', dend)
        loaded = read_dendrogram(tmp_path/'d.csv')
        assert loaded.merges == dend.merges
        frame = read_table(tmp_path/'d.csv')
        assert list(frame['size']) == [2, 2, 4]

    def test_dendrogram_columns(self, tmp_path):
        """Check that missing columns are reported"""
        write_table(tmp_path/'d.csv', pd.DataFrame({'left': [0]}))
        with pytest.raises(InputError):
            read_dendrogram(tmp_path/'d.csv')


class TestConfig:
    """Tests for YAML configuration files"""

    def test_mapping(self, tmp_path):
        """Check that dashes become underscores"""
        (tmp_path/'c.yaml').write_text('lambda-grid: [0.1, 1.0]\nrho: 0.7\n')
        assert load_config(tmp_path/'c.yaml') == {'lambda_grid': [0.1, 1.],
                                                 'rho': 0.7}

    def test_empty(self, tmp_path):
        """Check that empty files and no file give no options"""
        (tmp_path/'c.yaml').write_text('')
        assert load_config(tmp_path/'c.yaml') == {}
        assert load_config(None) == {}

    @pytest.mark.parametrize('text', ['- 1\n- 2\n', 'a: [1\n'])
    def test_invalid(self, tmp_path, text):
        """Check that lists and broken YAML are refused"""
        (tmp_path/'c.yaml').write_text(text)
        with pytest.raises(ConfigurationError):
            load_config(tmp_path/'c.yaml')
