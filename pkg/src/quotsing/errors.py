"""Exception types shared across the package."""


class QuotsingError(Exception):
    """Base class for all errors raised by this package."""


class BadModulus(QuotsingError):
    pass


class NonFaithful(QuotsingError):
    pass


class GroupTooLarge(QuotsingError):
    pass


class BadGroupSpec(QuotsingError):
    pass


class UnknownFormat(QuotsingError):
    pass


class CapExceeded(QuotsingError):
    pass


class WindowTooLarge(QuotsingError):
    pass


class WindowInsufficient(QuotsingError):
    pass


class NotMCM(QuotsingError):
    pass


class NotIsolated(QuotsingError):
    pass


class MismatchReport(QuotsingError):
    """Raised when two independent computations disagree.

    ``cells`` holds one entry per discrepant cell.
    """

    def __init__(self, message, cells):
        super().__init__(message)
        self.cells = list(cells)
