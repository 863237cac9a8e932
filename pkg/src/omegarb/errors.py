"""Exception types raised across the package."""

from __future__ import annotations


class OmegaRBError(Exception):
    """Base class for all package errors."""


class SemigroupNotAssociative(OmegaRBError):
    def __init__(self, triple):
        self.triple = tuple(triple)
        super().__init__(f"semigroup table is not associative at {self.triple}")


class ShapeError(OmegaRBError, ValueError):
    pass


class DimensionMismatch(OmegaRBError, ValueError):
    pass


class SlotOutOfRange(OmegaRBError, IndexError):
    pass


class SlotMembershipViolation(OmegaRBError, ValueError):
    pass


class ImageExceedsKernel(OmegaRBError):
    """The coboundary of degree n-1 does not land in the kernel of degree n."""


class CoboundaryNotSquareZero(OmegaRBError):
    pass


class ComponentFormulaMismatch(OmegaRBError):
    def __init__(self, message, block=None):
        self.block = block
        super().__init__(message)


class NotMaurerCartan(OmegaRBError):
    pass


class EmbeddingMismatch(OmegaRBError):
    pass


class ExactnessFailure(OmegaRBError):
    pass


class NotACoboundaryWitness(OmegaRBError):
    pass


class InvalidDeformation(OmegaRBError):
    pass


class DegreeCapExceeded(OmegaRBError):
    pass


class FieldError(OmegaRBError, ValueError):
    pass


class SchemaError(OmegaRBError, ValueError):
    def __init__(self, message, pointer=""):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")
