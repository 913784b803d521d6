"""Exception hierarchy shared by all qrev modules."""


class QrevError(Exception):
    """Base class for all errors raised by qrev."""


class DimensionMismatch(QrevError, ValueError):
    pass


class NotPSD(QrevError, ValueError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""


class NotCommuting(QrevError):
    """A family of matrices admits no common eigenbasis."""


class NotOrthonormal(QrevError, ValueError):
    pass


class InvalidProbability(QrevError, ValueError):
    pass


class InvalidChannel(QrevError, ValueError):
    """Kraus operators fail the completeness relation."""


class InvalidState(QrevError, ValueError):
    pass


class RankTooSmall(QrevError, ValueError):
    pass


class InvalidShape(QrevError, ValueError):
    pass


class InvalidParameter(QrevError, ValueError):
    pass


class SnapTooCoarse(QrevError, ValueError):
    """Rational snapping of floating-point data moved an entry too far."""


class DilationInvalid(QrevError, ValueError):
    """Dilation blocks do not assemble into a symplectic transformation."""


class NotDisjoint(QrevError, ValueError):
    pass
