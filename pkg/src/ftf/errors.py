"""Exception hierarchy.

Data problems derive from :class:`DataError`, parameter problems from
:class:`ConfigError`; the CLI maps them onto distinct exit codes.
"""


class FTFError(Exception):
    """Base class for every error raised by the engine."""


class DataError(FTFError):
    """Input prices are unusable."""


class MalformedRow(DataError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class NonPositivePrice(DataError):
    pass


class UnsortedDuplicateDate(DataError):
    pass


class LeadingGap(DataError):
    pass


class TooShort(DataError):
    pass


class InsufficientHistory(DataError):
    pass


class ConfigError(FTFError, ValueError):
    """A parameter violates its invariant. ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class InvalidLambda(ConfigError):
    def __init__(self, value, field: str = "signal.lambda_ema"):
        super().__init__(field, f"must lie in (0, 1), got {value!r}")


class InvalidTheta(ConfigError):
    def __init__(self, value, field: str = "vol.theta"):
        super().__init__(field, f"must lie in (0, 1), got {value!r}")


class DegenerateTraining(FTFError):
    """Training window has zero dispersion where a positive one is required."""


class UndefinedMomentum(FTFError):
    """Momentum bit requested inside its warm-up region."""


class Warmup(FTFError):
    """Not enough observations for a rolling statistic."""


class OverlapInStitch(FTFError):
    pass


class ZeroVol(FTFError):
    pass


class DegenerateBenchmark(FTFError):
    pass


class DegenerateLoss(FTFError):
    pass


class NoPositiveBranch(UserWarning):
    """Mean edge does not clear linear costs; capacity is zero."""
