from .environment import *  # noqa
from .errors import *  # noqa
from .logger import *  # noqa
from .io import *  # noqa
