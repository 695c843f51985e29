"""Exception hierarchy.

Every error carries a ``code`` equal to its class name; the CLI reports
that code in its structured stderr output.
"""


class RicciHomogError(Exception):
    """Base class for all library errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class ParseError(RicciHomogError):
    pass


class SchemaError(RicciHomogError):
    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class InvalidTable(RicciHomogError):
    """A bracket table violates antisymmetry, Jacobi, closure or stability."""


class NonProportional(RicciHomogError):
    """Killing form restricted to a block is not a multiple of Q."""


class NonScalarCasimir(RicciHomogError):
    """Isotropy Casimir operator does not act as a scalar on a block."""


class MissingZeta(RicciHomogError):
    pass


class SummandCountTooLarge(RicciHomogError):
    pass


class ZeroTensor(RicciHomogError):
    pass


class NotMaximal(RicciHomogError):
    """The maximality constant vanishes, so no search box exists."""


class UnsortedInput(RicciHomogError):
    pass


class WrongSummandCount(RicciHomogError):
    pass


class DegenerateGamma(RicciHomogError):
    """gamma_22^1 = 0: every invariant metric has the same Ricci tensor."""


class NonIntermediate(RicciHomogError):
    """gamma_11^2 != 0, so m_1 does not close up with h to a subalgebra."""


class InvalidOptions(RicciHomogError):
    pass
