from .config import *  # noqa
from .alternating import *  # noqa
from .crossval import *  # noqa
