from .manifest import *  # noqa
from .reproduce import *  # noqa
from .main import *  # noqa
