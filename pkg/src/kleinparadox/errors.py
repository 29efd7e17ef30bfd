"""Exception hierarchy shared by all modules."""


class KleinError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(KleinError, ValueError):
    pass


class NoPropagatingBeam(KleinError, ValueError):
    """The incident energy does not exceed the mass (E <= m)."""


class UnsupportedRegime(KleinError, ValueError):
    pass


class DegenerateMomenta(UnsupportedRegime):
    """k1 == k2, so the closed-form amplitudes divide by zero."""


class InconsistentSolutions(KleinError, ValueError):
    pass


class InvalidConfig(KleinError, ValueError):
    pass


class PacketTooClose(KleinError, ValueError):
    pass


class NumericalBlowup(KleinError, ArithmeticError):
    pass


class PacketNeverSeparated(KleinError, RuntimeError):
    pass


class SingularPoint(KleinError, ValueError):
    pass


class OutOfDomain(KleinError, ValueError):
    pass


class EmptySweep(UserWarning):
    """Every sample of a sweep landed in an unusable regime."""
