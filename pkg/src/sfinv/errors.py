"""Shared exception types."""


class BudgetError(RuntimeError):
    """A search or enumeration budget was exhausted.

    ``partial`` may carry whatever incomplete result was built before the
    budget ran out.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class SoundnessError(RuntimeError):
    """Two certificate sources contradicted each other.

    This is never a legitimate verdict; the CLI maps it to exit code 2.
    """
