"""Exception hierarchy shared by all modules.

Every error carries an ``exit_code`` used by the command line front end:
2 for domain errors, 3 for precision or validation failures.
"""


class PadixError(Exception):
    exit_code = 3


class DomainError(PadixError):
    exit_code = 2


class PrecisionError(PadixError):
    exit_code = 3


class NotIrreducible(DomainError):
    pass


class NotEisenstein(DomainError):
    pass


class NotMonic(DomainError):
    pass


class DenominatorNotUnit(DomainError):
    pass


class NotInDomain(DomainError):
    pass


class InsufficientPrecision(PrecisionError):
    pass


class SingularPoint(DomainError):
    pass


class BadDenominator(DomainError):
    pass


class LeadingCoefficientVanishes(DomainError):
    pass


class OutOfDisk(DomainError):
    pass


class DegenerateStep(PrecisionError):
    pass


class IrregularSingularity(DomainError):
    pass


class FactorizationUnsupported(DomainError):
    pass


class NotSplit(PrecisionError):
    pass


class PrecisionLoss(PrecisionError):
    pass


class BadParameters(DomainError):
    pass


class NoUnitRoot(PrecisionError):
    pass


class NotUnique(PrecisionError):
    pass


class MissingInitialData(PrecisionError):
    pass
