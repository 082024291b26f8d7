"""Exception hierarchy shared by every sepkit module."""


class SepkitError(Exception):
    """Base class for all sepkit errors."""


class InputError(SepkitError, ValueError):
    """Malformed or out-of-contract input (unknown ids, bad preconditions)."""


class CapacityError(SepkitError):
    """An exhaustive computation would exceed its configured budget."""


class ConsistencyError(SepkitError):
    """An internal checkpoint failed; carries the failing witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotInducibleError(SepkitError):
    """A haven or profile cannot be induced on a torso."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
