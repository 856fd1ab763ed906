"""Exception hierarchy shared by every module."""


class WhdetError(Exception):
    """Base class; ``kind`` is the short name recorded in reports."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class BlockSizeMismatch(WhdetError, ValueError):
    pass


class WindowTooSmall(WhdetError, ValueError):
    pass


class SingularOnCircle(WhdetError, ArithmeticError):
    pass


class NotResolved(WhdetError, ArithmeticError):
    """Grid or truncation cap reached before coefficients decayed."""


class NonzeroWinding(WhdetError, ValueError):
    pass


class PhaseStepTooLarge(WhdetError, ValueError):
    pass


class AmbiguousWinding(WhdetError, ValueError):
    pass


class IllConditioned(WhdetError, ArithmeticError):
    pass


class WindowNotFlipSymmetric(WhdetError, ValueError):
    pass


class NotConverged(WhdetError, ArithmeticError):
    pass


class ScalarCrossCheckFailed(WhdetError, ArithmeticError):
    pass


class ConstraintViolated(WhdetError, ValueError):
    pass


class CorpusError(WhdetError, ValueError):
    """Invalid corpus file; message carries the offending cell coordinates."""
