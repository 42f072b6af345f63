"""Exception types shared across the library."""


class DimensionMismatch(ValueError):
    """Operands disagree on a required dimension."""


class DegenerateData(ValueError):
    """The data cannot support a classifier (e.g. a single class present)."""


class NumericFailure(RuntimeError):
    """A numerical routine failed to converge."""


class BoostingFailure(RuntimeError):
    """Boosting retained no round: the first weak learner was no better than chance."""


class NoTrainablePartition(RuntimeError):
    """Every partition was skipped, so the ensemble would be empty."""


class ParseError(ValueError):
    """A data file could not be parsed; carries the path and 1-based line number."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class InconsistentDimension(ParseError):
    """Rows of a data file disagree on column count."""
