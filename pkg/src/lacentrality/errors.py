"""Exception hierarchy shared by all modules."""


class LACentralityError(Exception):
    """Base class for errors raised by this package."""


class ParseError(LACentralityError, ValueError):
    def __init__(self, lineno, line, reason):
        self.lineno = lineno
        self.line = line
        self.reason = reason
        super().__init__(f"line {lineno}: {reason}: {line!r}")


class EmptyGraph(LACentralityError, ValueError):
    pass


class ConditioningError(LACentralityError, ValueError):
    pass


class ParamError(LACentralityError, ValueError):
    pass


class DivergenceError(LACentralityError, ValueError):
    """Attenuation is at or beyond the convergence radius of the series."""


class NotConverged(LACentralityError, RuntimeError):
    """Raised by solvers in strict mode; ``result`` holds the last iterate."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NotConvergedWarning(RuntimeWarning):
    pass


class SingularSystem(LACentralityError, ArithmeticError):
    pass


class ShapeError(LACentralityError, ValueError):
    pass


class EmptyLog(LACentralityError, ValueError):
    pass


class InsufficientData(LACentralityError, ValueError):
    pass


class ConfigError(LACentralityError, ValueError):
    """Carries every violated field, not just the first."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
