from treelasso.utils import *  # noqa
from treelasso.core import *  # noqa
from treelasso.solver import *  # noqa
from treelasso.treelearn import *  # noqa
from treelasso.simgen import *  # noqa
from treelasso.evaluation import *  # noqa

from importlib.metadata import version, PackageNotFoundError

try:
    __version__ = version('treelasso')
except PackageNotFoundError:
    __version__ = '0+unknown'
