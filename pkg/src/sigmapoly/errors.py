"""Error taxonomy shared across the package.

ConfigError / NumericError / IOFailure map onto the CLI exit codes
2 / 3 / 4 respectively.
"""

from __future__ import annotations


class SigmapolyError(Exception):
    """Base class."""


class ConfigError(SigmapolyError):
    """Bad input: malformed files, unknown keys, invalid knobs."""


class NumericError(SigmapolyError):
    """Numerical failure with context."""


class IOFailure(SigmapolyError):
    """Filesystem trouble."""


# -- core ----------------------------------------------------------------

class OutOfDomain(NumericError):
    pass


class NotOnSigma(NumericError):
    pass


class DegenerateContact(NumericError):
    pass


class EquilibriumOnSigmaError(NumericError):
    pass


class NotSliding(NumericError):
    pass


class DenominatorNearZero(NumericError):
    pass


class NearDegenerate(NumericError):
    """Raised only in strict mode; otherwise carried as a flag."""


class UnsupportedSingularity(NumericError):
    pass


# -- flow ------------------------------------------------------------------

class DomainExit(NumericError):
    def __init__(self, msg, point=None, time=None):
        super().__init__(msg)
        self.point = point
        self.time = time


class NoHit(NumericError):
    pass


class TangentialHit(NumericError):
    pass


class NoReturn(NumericError):
    pass


class NonDeterministicExit(NumericError):
    pass


# -- maps --------------------------------------------------------------------

class IllConditioned(NumericError):
    pass


class WindowTooSmall(NumericError):
    pass


class InExclusionSet(NumericError):
    pass


class OrbitHitsSliding(NumericError):
    pass


# -- polycycle ----------------------------------------------------------------

class OutsideWindow(NumericError):
    pass


class NoConvergence(NumericError):
    pass


class SingularJacobian(NumericError):
    pass


class EscapedAnnulus(NumericError):
    pass


# -- bifurcation ---------------------------------------------------------------

class NegativeLambda(NumericError):
    pass


class WrongSign(NumericError):
    pass
