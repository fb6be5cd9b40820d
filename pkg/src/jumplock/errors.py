"""Exception hierarchy shared by every module of the package."""


class JumplockError(Exception):
    """Base class for all package errors."""


class DimensionError(JumplockError, ValueError):
    """A matrix or vector has the wrong shape for the requested operation."""


class DomainError(JumplockError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ConfigurationError(JumplockError, ValueError):
    """Inconsistent or unsafe simulation settings (step size, units, gains)."""


class RegimeError(JumplockError, ValueError):
    """Parameters violate the regime in which a closed-form result holds."""


class SingularityError(JumplockError, ZeroDivisionError):
    """A closed-form expression hits a vanishing denominator."""


class ConvergenceError(JumplockError, RuntimeError):
    """An iterative relaxation did not settle within its budget."""


class TrajectoryError(JumplockError, RuntimeError):
    """A trajectory of an ensemble failed; ``seed`` and ``index`` identify it."""

    def __init__(self, message: str, seed: int, index: int):
        super().__init__(f"trajectory {index} (seed {seed}) failed: {message}")
        self.seed = seed
        self.index = index

    def __reduce__(self):
        return (_rebuild_trajectory_error, (self.args[0], self.seed, self.index))


def _rebuild_trajectory_error(text, seed, index):
    err = TrajectoryError.__new__(TrajectoryError)
    JumplockError.__init__(err, text)
    err.seed, err.index = seed, index
    return err
