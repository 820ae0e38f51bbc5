"""Exception hierarchy shared by all modules."""


class GsvdNomaError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(GsvdNomaError, ValueError):
    pass


class FileParseError(GsvdNomaError, ValueError):
    pass


class FileDimensionMismatch(GsvdNomaError, ValueError):
    pass


class SingularGram(GsvdNomaError, ArithmeticError):
    """The Gram matrix of the second channel (or its augmentation) is numerically singular."""


class NoConvergence(GsvdNomaError, RuntimeError):
    def __init__(self, max_iter, residual):
        super().__init__(f"fixed point did not converge in {max_iter} iterations (residual {residual:.3e})")
        self.max_iter = max_iter
        self.residual = residual


class SingularInnerMatrix(GsvdNomaError, ArithmeticError):
    def __init__(self, factor, detail=""):
        msg = f"inner matrix {factor} is numerically singular"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.factor = factor


class NotConverged(GsvdNomaError, ValueError):
    pass


class OnSupport(GsvdNomaError, ValueError):
    pass


class DomainCrossesSupport(GsvdNomaError, ValueError):
    pass


class QuadratureFailure(GsvdNomaError, RuntimeError):
    pass
