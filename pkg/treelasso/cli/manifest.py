"""Records of command-line runs"""

from dataclasses import dataclass, field, asdict
from pathlib import Path

from treelasso.utils.errors import InputError
from treelasso.utils.io import read_json, write_json

__all__ = ['RunManifest', 'manifest_path']


def manifest_path(out_dir, command):
    """Location of the manifest of a command writing into out_dir"""
    return Path(out_dir)/'{}_manifest.json'.format(command)


@dataclass
class RunManifest:
    """
    Everything needed to re-run a command.

    Parameters
    ----------
    command : str
        Sub-command name
    config : dict
        Resolved options, defaults included
    inputs : dict
        Input file paths by option name
    outputs : dict
        Written file paths by artifact name
    seed : int, optional
        Base seed of the run, where one applies
    version : str
        Package version that produced the outputs
    wall_time : float
        Seconds spent running the command
    """
    command: str
    config: dict
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    seed: int = None
    version: str = ''
    wall_time: float = 0.

    def write(self, path):
        write_json(path, asdict(self))

    @classmethod
    def read(cls, path):
        content = read_json(path)
        try:
            return cls(**content)
        except TypeError as e:
            raise InputError("{} is not a run manifest: {}".format(path, e))
