"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the CLI can map
failures to exit codes and JSON fields without string matching.
"""


class CprError(Exception):
    """Base class; ``code`` identifies the failure kind."""

    code = "error"

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code


class DimensionMismatchError(CprError):
    code = "DimensionMismatch"


class ValidationError(CprError):
    """Bad input values (non-finite entries, wrong shapes, bad parameters)."""

    code = "Validation"


class FileFormatError(CprError):
    """Malformed or inconsistent on-disk data; message names the offending field."""

    code = "FileFormat"


class UnderdeterminedError(CprError):
    """Lifted system has a nullspace; the linear route cannot be used."""

    code = "Underdetermined"


class NotPSDError(CprError):
    """Lift estimate has a significantly negative eigenvalue."""

    code = "NotPSD"


class NoKernelError(CprError):
    """Exact falsification requested but the lifted operator is injective."""

    code = "NoKernel"


class IndefinitenessViolationError(CprError):
    """Kernel matrix is one-signed; the input cannot be a spanning frame."""

    code = "IndefinitenessViolation"


class DefiniteInputError(CprError):
    """Witness synthesis needs a target with eigenvalues of both signs."""

    code = "DefiniteInput"


class WrongDimensionError(CprError):
    code = "WrongDimension"
