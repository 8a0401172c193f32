"""Exception and warning types shared across the package."""


class GamapError(Exception):
    """Base class for every error this package raises deliberately."""


class LengthMismatchError(GamapError):
    """Inputs that must agree in length or feature order do not."""


class AllZeroAttributionError(GamapError):
    """An attribution with every weight equal to zero cannot be normalized."""


class EmptyInputError(GamapError):
    """An operation that needs at least one (or two) items received none."""


class KZeroError(GamapError):
    """Requested cluster count is below one."""


class KTooLargeError(GamapError):
    """Requested cluster count exceeds what the input supports."""


class InvalidMedoidIndexError(GamapError):
    """A medoid index is out of range or duplicated."""


class EmptyClusterError(GamapError):
    """A cluster operation received an empty member list."""


class SingleClusterError(GamapError):
    """Silhouette needs at least two distinct cluster labels."""


class RowCountMismatchError(GamapError):
    """A raw feature table does not line up with the attribution set."""


class ShapeMismatchError(GamapError):
    """Array shapes are incompatible with the model or each other."""


class IndexOutOfRangeError(GamapError):
    """An output index points outside the model's final layer."""


class EmptyDatasetError(GamapError):
    """Training requires at least one sample."""


class MalformedModelFileError(GamapError):
    """A model document failed validation while loading."""


class UnsupportedActivationError(GamapError):
    """An explainer met an activation it has no propagation rule for."""


class OddCountError(GamapError):
    """Balanced synthetic generators need an even sample count."""


class DegenerateFractionError(GamapError):
    """A mixture fraction that leaves one group empty."""


class MalformedCsvError(GamapError):
    """A CSV file violates the expected layout."""


class UnknownLabelColumnError(GamapError):
    """The named label column is not in the CSV header."""


class NonNumericWithoutOneHotError(GamapError):
    """A text-valued column was met while one-hot encoding is disabled."""


class ZeroVarianceWarning(UserWarning):
    """All surrogate targets were identical; a zero attribution is returned."""
