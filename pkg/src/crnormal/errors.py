class ValidationError(ValueError):
    """Input violates a documented precondition or data invariant."""


class InternalInvariantError(RuntimeError):
    """A branch excluded by the theory was reached: singular line system,
    failed certificate, oracle disagreement."""


class NonUniquenessError(InternalInvariantError):
    """An exact linear system that should have a unique solution does not."""
