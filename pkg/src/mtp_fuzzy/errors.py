"""Exception types raised across the package."""


class FuzzyError(Exception):
    """Base class for every error raised by mtp_fuzzy."""


class FuzzyInputError(FuzzyError, ValueError):
    """Invalid argument: non-finite value, bad width, mismatched lengths."""


class UnsupportedCompositionError(FuzzyError):
    """Hedge composition without defined semantics (e.g. "not" of a powered set)."""


class DomainError(FuzzyError, ValueError):
    """A mapping evaluated outside its real domain."""


class EmptyResultError(FuzzyError):
    """Inference produced nothing to defuzzify (no rule matched the input)."""

    def __init__(self, message, movements=None):
        super().__init__(message)
        self.movements = movements


class NoActiveRuleError(EmptyResultError):
    """The active-rule set of a T-S style inference is empty."""


class DegenerateWeightsError(FuzzyError):
    """All rule weights in a weighted average sum to zero."""


class DegenerateDistanceError(FuzzyError):
    """Several rules sit at distance zero in distance-type reasoning."""


class TrainingDivergedError(FuzzyError):
    def __init__(self, message, iteration):
        super().__init__(message)
        self.iteration = iteration


class MetricUndefinedError(FuzzyError, ValueError):
    """Percentage error requested for a zero target."""


class DatasetParseError(FuzzyError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
