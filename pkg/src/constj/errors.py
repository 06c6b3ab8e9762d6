"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad user-supplied data: primes, multiplicities, roots, CLI flags."""


class InvariantViolation(RuntimeError):
    """An internal consistency check failed (counts, genera, dimensions)."""


class CountDataError(InvariantViolation):
    """Point-count data is inconsistent with an integral zeta numerator."""


class BranchInconsistencyError(InvariantViolation):
    """The eigenspace factor division left a nonzero remainder."""


class FalsifiedClaimError(InvariantViolation):
    """A verdict that should hold numerically came out false."""
