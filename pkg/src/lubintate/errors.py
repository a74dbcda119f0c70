"""Exception hierarchy.

Every computational failure raises a subclass of :class:`LubinTateError`;
the CLI reports ``type(exc).__name__`` verbatim.
"""


class LubinTateError(Exception):
    pass


# construction
class NotPrime(LubinTateError):
    pass


class ReducibleModulus(LubinTateError):
    pass


class NotEisenstein(LubinTateError):
    pass


class NotAdmissible(LubinTateError):
    """The series is not a Lubin-Tate series for the field's uniformizer."""


# arithmetic
class PrecisionExhausted(LubinTateError):
    pass


class NotAUnit(LubinTateError):
    pass


class InexactDivision(LubinTateError):
    pass


class IndistinguishableFromZero(LubinTateError):
    pass


class HenselConditionFails(LubinTateError):
    pass


# series
class NonzeroConstantInComposition(LubinTateError):
    pass


class NonUnitLinearTerm(LubinTateError):
    pass


class IntegralityViolation(LubinTateError):
    pass


class CapTooSmall(LubinTateError):
    pass


# tower
class NotTopologicallyNilpotent(LubinTateError):
    pass


class CapInsufficient(LubinTateError):
    pass


class ConjugateNotRoot(LubinTateError):
    pass


# coefficient rings
class WindowOverflow(LubinTateError):
    pass


class PerfectionDepthExceeded(LubinTateError):
    pass


# descent
class ZeroInput(LubinTateError):
    pass


class NoPthRootHypothesis(LubinTateError):
    pass


class OrderNotPPower(LubinTateError):
    pass


class MissingRootsOfUnity(LubinTateError):
    pass
