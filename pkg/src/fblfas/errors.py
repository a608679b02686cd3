"""Shared exception types.

Domain and parameter problems raise plain ValueError; NumericError is
reserved for internal routines that ran but could not produce a result
worth trusting (eigensolver failure, quadrature budget exhaustion with a
hopeless estimate, non-finite integrand values).
"""


class NumericError(RuntimeError):
    """A numerical routine failed to deliver a trustworthy result."""
