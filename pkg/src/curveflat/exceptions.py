"""Exception hierarchy shared across the package."""


class CurveflatError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CurveflatError):
    """Malformed or schema-violating input data.

    `row` is the 1-based data-row number when the problem is tied to a
    specific line, else None.
    """

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class FitError(CurveflatError):
    """A model fit cannot proceed (bad window, degenerate data, ...)."""


class RankDeficiencyError(FitError):
    """Design matrix has linearly dependent columns.

    `columns` names the offending basis columns.
    """

    def __init__(self, message: str, columns: tuple[str, ...] = ()):
        super().__init__(message)
        self.columns = columns


class CalibrationError(CurveflatError):
    """Golden-table calibration received unusable input."""
