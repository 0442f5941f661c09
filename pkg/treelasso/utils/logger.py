"""The package logger"""

import os
import logging

from treelasso.utils.environment import get_log_level

__all__ = ['set_log_level']

_logger = logging.getLogger('treelasso')

if not _logger.handlers:
    _handler = logging.StreamHandler()
    _handler.setFormatter(logging.Formatter('%(levelname)s %(name)s: '
                                            '%(message)s'))
    _logger.addHandler(_handler)
    _logger.setLevel(get_log_level())


def set_log_level(level):
    """
    Set the level of the treelasso logger (name or integer). The level is
    also exported as TREELASSO_LOGGING so that worker processes started
    afterwards log at the same level.
    """
    if isinstance(level, str):
        level = level.upper()
    _logger.setLevel(level)
    os.environ['TREELASSO_LOGGING'] = logging.getLevelName(_logger.level)
