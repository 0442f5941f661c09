from .clustering import *  # noqa
