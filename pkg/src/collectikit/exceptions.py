"""Error types shared across the package."""


class InvariantViolation(ValueError):
    """An internal quantity failed a validation that correct code never fails.

    Raised when a computed object (density matrix, probability table,
    two-photon amplitude) is outside its mathematically guaranteed range.
    Distinct from plain ValueError, which signals rejected caller input.
    """
