"""
Error Types

Exception hierarchy shared by the algebra modules and the CLI.
"""

from typing import Any, Optional


class DeformationError(Exception):
    """Base error; carries JSON-serialisable witness data for reports."""

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class ShapeMismatchError(DeformationError):
    """Operands have incompatible dimensions."""
    pass


class ContainmentError(DeformationError):
    """A subspace is not contained where it is required to be."""
    pass


class TruncationOrderError(DeformationError):
    """Requested truncation order is outside the supported range."""
    pass


class InputValidationError(DeformationError):
    """Input document failed schema or invariant validation."""

    def __init__(self, message: str, pointer: str = "", witness: Optional[Any] = None):
        super().__init__(message, witness)
        self.pointer = pointer


class ModelHypothesisError(DeformationError):
    """The supplied model does not satisfy a hypothesis the computation needs."""
    pass


class DdbarViolationError(ModelHypothesisError):
    """The double complex fails the d'd''-lemma."""
    pass


class AugmentationNotInjectiveError(ModelHypothesisError):
    """The augmentation is not injective on H^0."""
    pass


class SplittingViolationError(ModelHypothesisError):
    """The splitting axioms fail, or gauge fixing did not converge."""
    pass


class ObstructionError(ModelHypothesisError):
    """An order-by-order linear system has no solution."""
    pass


class ModelInconsistencyError(ModelHypothesisError):
    """A verified postcondition (e.g. vanishing MC defect) failed."""
    pass


class TypeCompatibilityError(ModelHypothesisError):
    """A map does not respect the supplied Hodge bigradings."""
    pass


class TwistPreconditionError(ModelHypothesisError):
    """A twisting operator is not unipotent relative to the weight filtration."""

    def __init__(self, message: str, weight: Optional[int] = None, witness: Optional[Any] = None):
        super().__init__(message, witness)
        self.weight = weight
