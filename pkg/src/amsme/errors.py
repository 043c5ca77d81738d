"""Exception hierarchy.

Each class carries the process exit code the CLI maps it to.
"""


class AmsmeError(Exception):
    exit_code = 1


class InvalidArgument(AmsmeError, ValueError):
    exit_code = 2


class PreconditionViolated(InvalidArgument):
    pass


class DimensionError(InvalidArgument):
    pass


class FormatError(AmsmeError, ValueError):
    exit_code = 3


class ZeroNormError(AmsmeError, ValueError):
    exit_code = 3


class LengthMismatch(AmsmeError, ValueError):
    exit_code = 3


class DegenerateInput(AmsmeError, ArithmeticError):
    exit_code = 4


class PipelineError(AmsmeError):
    """A step of the pipeline failed; ``step`` names it and ``__cause__`` holds the original error."""

    def __init__(self, step, cause):
        super().__init__(f"step '{step}' failed: {cause}")
        self.step = step
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 3 if isinstance(cause, OSError) else 1)
