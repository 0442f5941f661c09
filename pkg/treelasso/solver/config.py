"""Configuration of the alternating solver"""

from dataclasses import dataclass, asdict

from treelasso.utils.errors import ConfigurationError

__all__ = ['SolverConfig']


@dataclass(frozen=True)
class SolverConfig:
    """
    Settings for a single fit.

    Parameters
    ----------
    lam : float
        Regularization strength multiplying the squared penalty
    epsilon_floor : float
        Floor applied to the dual weights before normalization. Keeps the
        ridge diagonal finite when a group's coefficients vanish.
    tol : float
        Relative change of the objective at which iteration stops
    max_iter : int
        Largest number of (duals, coefficients) rounds
    weighted_duals : bool
        Scale the dual update by the group weights w_v. Setting this to False
        gives the unweighted update, kept for comparison only.
    shared_diagonal : bool
        Use a single ridge diagonal summed over every node for all outputs
        instead of the per-output diagonal. Kept for comparison only; the
        objective is then no longer guaranteed to decrease.
    """
    lam: float = 1.
    epsilon_floor: float = 1e-10
    tol: float = 1e-6
    max_iter: int = 1000
    weighted_duals: bool = True
    shared_diagonal: bool = False

    def __post_init__(self):
        if not self.lam >= 0:
            raise ConfigurationError("lam must be non-negative")
        if not self.epsilon_floor > 0:
            raise ConfigurationError("epsilon_floor must be positive")
        if not self.tol > 0:
            raise ConfigurationError("tol must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigurationError("max_iter must be a positive integer")

    def replace(self, **kwargs):
        """Return a copy with the given fields replaced"""
        return self.__class__(**{**asdict(self), **kwargs})

    def to_dict(self):
        """Plain-data form for reports and manifests"""
        return asdict(self)
