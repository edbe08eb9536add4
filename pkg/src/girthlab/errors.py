"""Exception types shared by all girthlab modules."""


class GirthlabError(Exception):
    """Base class for domain errors raised by girthlab."""


class InvalidArgument(GirthlabError, ValueError):
    pass


class InvalidCode(InvalidArgument):
    """An LCF code that does not describe a simple cubic graph."""


class OutOfDomain(GirthlabError, ValueError):
    """A parameter lies outside the region where a formula is defined."""


class GateViolation(GirthlabError):
    """A requested monomial degree exceeds what the graph's girth supports."""

    def __init__(self, message, required_girth=None):
        super().__init__(message)
        self.required_girth = required_girth
