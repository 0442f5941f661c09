"""Objects for handling environment variables"""

import os
import logging

__all__ = ['get_weight_feps', 'get_data_dir', 'get_log_level']

logger = logging.getLogger(__name__)

_default_feps = 1e-12


def get_weight_feps():
    """
    Amount of error tolerated when checking node weights. Governs the
    s + g = 1 check on load and the per-output weight-sum check. Larger values
    allow more slack in hand-edited tree files.
    """
    try:
        eps = float(os.environ['TREELASSO_WEIGHT_FEPS'])
    except KeyError:
        eps = _default_feps
    except ValueError:
        logger.warning("Weight FEPS cannot be parsed, reverting to default")
        eps = _default_feps
    return eps


def get_data_dir():
    """Default directory for command-line inputs and outputs"""
    return os.environ.get('TREELASSO_DATA_DIR', os.getcwd())


def get_log_level():
    """Log level name for the package logger"""
    level = os.environ.get('TREELASSO_LOGGING', 'INFO').upper()
    if not isinstance(logging.getLevelName(level), int):
        logger.warning("Log level %s not recognised, reverting to INFO", level)
        level = 'INFO'
    return level
