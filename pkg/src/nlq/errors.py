"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class NLQError(Exception):
    exit_code = 3
    kind = "error"


class ConfigError(NLQError):
    exit_code = 2
    kind = "config-error"


class InvalidTruncationError(NLQError, ValueError):
    kind = "invalid-truncation"


class DimensionMismatchError(NLQError, ValueError):
    kind = "dimension-mismatch"


class OutOfRangeError(NLQError, IndexError):
    kind = "out-of-range"


class InvalidGeometryError(NLQError, ValueError):
    kind = "invalid-geometry"


class FrequencyLookupError(NLQError, KeyError):
    kind = "frequency-lookup"

    def __str__(self):
        return Exception.__str__(self)


class NonPositiveDielectricError(NLQError, ValueError):
    kind = "non-positive-dielectric"


class SingularDielectricError(NonPositiveDielectricError):
    kind = "singular-dielectric"


class ProcessMismatchError(NLQError, ValueError):
    kind = "process-mismatch"


class InvalidModeError(NLQError, ValueError):
    kind = "invalid-mode"


class NotHermitianError(NLQError, ValueError):
    kind = "not-hermitian"


class UnstableMediumError(NLQError, ArithmeticError):
    exit_code = 4
    kind = "unstable-medium"


class NumericFailure(NLQError, ArithmeticError):
    exit_code = 4
    kind = "numeric-failure"
