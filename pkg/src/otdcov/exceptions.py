"""Exception types raised by otdcov."""


class DomainError(ValueError):
    """A map was evaluated outside the set where it is defined."""


class PoleCollisionError(DomainError):
    """An observation sits at the antipode of the chart pole and cannot be embedded."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
