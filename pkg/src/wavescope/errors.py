"""Exception hierarchy.

``ValidationError`` subclasses are caller mistakes (CLI exit code 1);
``NumericalError`` subclasses are algorithmic failures (exit code 2).
"""


class WavescopeError(Exception):
    pass


class ValidationError(WavescopeError, ValueError):
    pass


class NumericalError(WavescopeError, ArithmeticError):
    pass


class ConstantVorticityError(ValidationError):
    def __init__(self, msg="constant-vorticity out of scope (alpha0 = 0)"):
        super().__init__(msg)


class InfeasibleLambdaError(ValidationError):
    pass


class LambdaZeroError(ValidationError):
    pass


class ConfigError(ValidationError):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


class NoSignChangeError(NumericalError):
    pass


class DivergedError(NumericalError):
    pass


class SingularJacobianError(NumericalError):
    pass


class StepUnderflowError(NumericalError):
    pass


class ContinuationError(NumericalError):
    pass


class DegenerateCriticalPointError(NumericalError):
    pass
