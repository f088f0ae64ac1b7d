"""Exception hierarchy shared across the toolkit."""


class CalwqError(Exception):
    """Base class for all toolkit errors."""


class UnknownClimate(CalwqError, ValueError):
    """Climate code is not one of the nine California sub-climates."""


class OutsideRaster(CalwqError, ValueError):
    """Point lies beyond the climate raster plus its search radius."""


class MissingColumn(CalwqError, ValueError):
    """A required CSV column is absent from the header."""


class EmptyInput(CalwqError, ValueError):
    """Operation received no usable rows/values."""


class TooFewRecords(CalwqError, ValueError):
    """Not enough records for the requested operation."""


class UnenrichedRecord(CalwqError, ValueError):
    """Record lacks climate/geographical labels required at this stage."""


class DegenerateInput(CalwqError, ValueError):
    """Design matrix unusable even after the ridge fallback."""


class InvalidHyperparameter(CalwqError, ValueError):
    """Hyperparameter missing, unknown, or outside its valid range."""


class SingularKernel(CalwqError, ArithmeticError):
    """Kernel matrix not positive definite after nugget escalation."""


class ColumnMismatch(CalwqError, ValueError):
    """Prediction matrix columns do not match the training columns."""


class LengthMismatch(CalwqError, ValueError):
    """Paired vectors have different lengths."""


class ZeroVariance(CalwqError, ValueError):
    """Observed values are constant; the statistic is undefined."""


class EmptyGrid(CalwqError, ValueError):
    """Hyperparameter grid contains no candidates."""


class RegimeMismatch(CalwqError, ValueError):
    """Model was trained under a feature regime this product rejects."""


class EmptyMask(CalwqError, ValueError):
    """No grid cell center falls inside the region mask."""


class UnsupportedModelKind(CalwqError, TypeError):
    """Operation is not defined for this model family."""


class InvalidSpec(CalwqError, ValueError):
    """Synthetic-data specification fails validation."""


class ConfigError(CalwqError, ValueError):
    """Run configuration is malformed or references bad values."""


class StageInputMissing(CalwqError):
    """A pipeline stage's input artifact does not exist yet."""
