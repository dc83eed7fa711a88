"""Exceptions raised by the optimization engine."""


class IllConditionedError(RuntimeError):
    """The kernel matrix could not be factorized even after jitter escalation."""


class DegenerateDataError(ValueError):
    """Hyperparameters cannot be fitted to the given observations."""


class ConditionedVarianceError(ValueError):
    """A posterior variance that must be positive is zero."""


class NonFiniteValueError(ValueError):
    """An objective handed to the optimizer returned a non-finite value."""


class CorruptRecordError(ValueError):
    """A run record is malformed, incomplete, or flagged invalid."""
