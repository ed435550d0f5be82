"""Exception taxonomy shared by the whole lab.

The CLI maps these onto its exit codes: InputError -> 1,
ResourceRefusal -> 2, InvariantViolation -> 3.
"""


class InputError(ValueError):
    """An argument violates a documented precondition."""


class ResourceRefusal(RuntimeError):
    """The request is well-formed but exceeds a hard enumeration budget.

    The lab refuses rather than silently approximating.
    """


class InvariantViolation(RuntimeError):
    """An internal mathematical invariant failed; indicates a bug."""
