class SictomoError(Exception):
    """Base class for every error raised by sictomo"""


class DimensionError(SictomoError, ValueError):
    """Matrix of an unsupported size, or a tensor product that would exceed three qubits"""


class NotHermitianError(SictomoError, ValueError):
    """Hermiticity, unit trace or positivity precondition violated"""


class ParameterError(SictomoError, ValueError):
    """Parameter checking failed"""


class NumericalError(SictomoError, ArithmeticError):
    """A numerical procedure could not produce a result"""


class SingularMeasurementError(NumericalError):
    """Measurement matrix or Fisher matrix is singular: the measurement is not informationally complete there"""


class DegenerateSpectrumError(NumericalError):
    """The two eigenvalues of a qubit operator coincide, no dominant eigenstate exists"""


class ConvergenceError(NumericalError):
    """An iterative procedure failed to converge and the caller asked for strict behaviour"""
