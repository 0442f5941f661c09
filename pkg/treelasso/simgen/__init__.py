from .generator import *  # noqa
