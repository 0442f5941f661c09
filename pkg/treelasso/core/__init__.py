from .data import *  # noqa
from .tree import *  # noqa
from .penalty import *  # noqa
from .symbolic import *  # noqa
