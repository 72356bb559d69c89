"""Exception taxonomy shared across the package.

The CLI maps these onto its exit codes: OSError -> 2, FormatError -> 3,
NumericError -> 4, ParamError -> 5.
"""


class FalqError(Exception):
    """Base class for all falq-specific failures."""


class FormatError(FalqError):
    """A file or byte stream does not follow the FATF/FALQ format."""


class ParamError(FalqError):
    """An argument violates an operation's precondition."""


class NumericError(FalqError):
    """Numerical failure: non-finite input, singular scaling, no convergence."""


class SymmetryError(NumericError):
    """A half spectrum violates the DC/Nyquist conjugate-symmetry invariants."""
