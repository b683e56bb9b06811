class TPhaseError(Exception):
    """Base class for analysis failures raised by tphase_core"""


class FormatError(TPhaseError, ValueError):
    """A tensor or system file could not be parsed"""


class DimensionMismatch(TPhaseError, ValueError):
    pass


class RankOutOfRange(TPhaseError, ValueError):
    pass


class NotBlockCirculant(TPhaseError, ValueError):
    pass


class SingularTensor(TPhaseError):
    pass


class NotSectorial(TPhaseError):
    pass


class BranchSpread(TPhaseError):
    """Phase spread reached pi, so no canonical branch exists"""


class BranchCut(TPhaseError):
    """An eigenvalue sits on the principal branch cut (-inf, 0]"""


class NotAccretive(TPhaseError):
    pass


class NotHermitian(TPhaseError):
    pass


class NotInSector(TPhaseError):
    pass


class QuadratureNotConverged(TPhaseError):
    pass


class PoleAtFrequency(TPhaseError):
    pass


class Unstable(TPhaseError):
    pass


class IllPosed(TPhaseError):
    pass


class SectorAssumptionViolated(TPhaseError):
    def __init__(self, message, frequencies=()):
        super().__init__(message)
        self.frequencies = list(frequencies)


class CertificateInconsistent(TPhaseError):
    """A sufficient stability condition held but the closed loop is unstable"""


class InvalidTensor(TPhaseError, ValueError):
    """Tensor data with the wrong rank or non-finite entries"""


class ImproperSystem(TPhaseError, ValueError):
    """A rational entry has a numerator of higher degree than its denominator"""
