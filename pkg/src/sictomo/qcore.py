"""Dense qubit linear algebra at one, two and three qubits.

Matrices are numpy ``complex128`` arrays of shape (2, 2), (4, 4) or (8, 8). Qubit order in every tensor product is
most-significant-first: ``tensor(a, b)`` puts ``a`` on the leading qubit, so the three-qubit register used by the
estimation circuit is ordered (A, S, B).
"""
import numpy as np

from sictomo._utils._constants import pauli, allowed_dims, unitary_tol, hermitian_tol, trace_tol, psd_tol, \
    physical_tol, degenerate_tol, halfpi, pi
from sictomo._utils._errors import DimensionError, NotHermitianError, DegenerateSpectrumError, ParameterError
from sictomo._utils._logger._sictomo_logger import _get_sictomo_logger


class BlochVec:
    """
    Bloch vector s = (s0, s1, s2, s3) of a qubit, ordered for (I, x, y, z). s0 is always 1.

    Linear inversion may produce vectors outside the Bloch ball, those are kept and flagged through ``is_physical``.
    """
    def __init__(self, sx, sy=None, sz=None):
        logger = _get_sictomo_logger()
        if sy is None and sz is None:
            comps = np.asarray(sx, dtype=float).ravel()
            if comps.shape[0] == 4:
                if abs(comps[0] - 1.0) > trace_tol:
                    msg = f'[BlochVec]: Bloch vector must have s0 = 1, got {comps[0]}'
                    logger.error(msg)
                    raise NotHermitianError(msg)
                comps = comps[1:]
            elif comps.shape[0] != 3:
                msg = f'[BlochVec]: Bloch vector needs 3 or 4 components, got {comps.shape[0]}'
                logger.error(msg)
                raise DimensionError(msg)
        else:
            comps = np.array([sx, sy, sz], dtype=float)

        if not np.all(np.isfinite(comps)):
            msg = f'[BlochVec]: Bloch vector components must be finite, got {comps.tolist()}'
            logger.error(msg)
            raise ParameterError(msg)

        self._s = np.concatenate(([1.0], comps))
        self._s.setflags(write=False)

    @property
    def s(self):
        """Full 4-vector (1, sx, sy, sz)"""
        return self._s

    @property
    def vector(self):
        """Bloch 3-vector (sx, sy, sz)"""
        return self._s[1:]

    @property
    def norm(self):
        return float(np.linalg.norm(self._s[1:]))

    def is_physical(self, tol=physical_tol):
        return self.norm**2 <= 1.0 + tol

    def __eq__(self, other):
        if not isinstance(other, BlochVec):
            return NotImplemented
        return bool(np.array_equal(self._s, other._s))

    def __hash__(self):
        return hash(self._s.tobytes())

    def __repr__(self):
        return 'BlochVec({0:.6g}, {1:.6g}, {2:.6g})'.format(*self._s[1:])


class StateAngles:
    """
    Angles xi = (alpha_1, alpha_2) of the pure state e^{i alpha_2} cos(alpha_1)|0> + e^{-i alpha_2} sin(alpha_1)|1>
    with alpha_1 in [0, pi/2] and alpha_2 in [0, pi].
    """

    def __init__(self, alpha1, alpha2):
        alpha1 = float(alpha1)
        alpha2 = float(alpha2)
        if not (0.0 <= alpha1 <= halfpi) or not (0.0 <= alpha2 <= pi):
            logger = _get_sictomo_logger()
            msg = f'[StateAngles]: alpha1={alpha1} must be in [0, pi/2] and alpha2={alpha2} in [0, pi]'
            logger.error(msg)
            raise ParameterError(msg)
        self.alpha1 = alpha1
        self.alpha2 = alpha2

    def __iter__(self):
        return iter((self.alpha1, self.alpha2))

    def __eq__(self, other):
        if not isinstance(other, StateAngles):
            return NotImplemented
        return (self.alpha1, self.alpha2) == (other.alpha1, other.alpha2)

    def __repr__(self):
        return f'StateAngles({self.alpha1:.6g}, {self.alpha2:.6g})'


def _as_matrix(mat):
    """
    Casts a matrix to complex128 and checks it is square with one of the supported dimensions
    """
    mat = np.asarray(mat, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] not in allowed_dims:
        logger = _get_sictomo_logger()
        msg = f'[_as_matrix]: Matrix must be square with dimension in {allowed_dims}, got shape {mat.shape}'
        logger.error(msg)
        raise DimensionError(msg)
    if not np.all(np.isfinite(mat)):
        logger = _get_sictomo_logger()
        msg = '[_as_matrix]: Matrix entries must be finite'
        logger.error(msg)
        raise ParameterError(msg)
    return mat


def is_unitary(mat, tol=unitary_tol):
    mat = _as_matrix(mat)
    return float(np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])))) < tol


def is_hermitian(mat, tol=hermitian_tol):
    mat = _as_matrix(mat)
    return float(np.max(np.abs(mat - mat.conj().T))) < tol


def _check_density(caller, rho, check_psd=False):
    """
    Raises NotHermitianError if rho is not a 2x2 Hermitian unit trace operator, optionally also positive
    """
    logger = _get_sictomo_logger()
    rho = _as_matrix(rho)
    if rho.shape != (2, 2):
        msg = f'[{caller}]: Expected a single qubit operator, got shape {rho.shape}'
        logger.error(msg)
        raise DimensionError(msg)
    if not is_hermitian(rho, tol=trace_tol):
        msg = f'[{caller}]: Operator is not Hermitian'
        logger.error(msg)
        raise NotHermitianError(msg)
    if abs(np.trace(rho).real - 1.0) > trace_tol:
        msg = f'[{caller}]: Operator trace is {np.trace(rho).real}, expected 1'
        logger.error(msg)
        raise NotHermitianError(msg)
    if check_psd:
        eig_min = _qubit_eigenvalues(rho)[0]
        if eig_min < -psd_tol:
            msg = f'[{caller}]: Operator is not positive semi-definite, minimum eigenvalue {eig_min}'
            logger.error(msg)
            raise NotHermitianError(msg)
    return rho


def _qubit_eigenvalues(mat):
    """
    Closed form eigenvalues of a 2x2 Hermitian matrix from trace and determinant, ascending
    """
    half_trace = 0.5*(mat[0, 0].real + mat[1, 1].real)
    half_diff = 0.5*(mat[0, 0].real - mat[1, 1].real)
    radius = np.sqrt(half_diff**2 + abs(mat[0, 1])**2)
    return half_trace - radius, half_trace + radius


def tensor(a, b):
    """
    Kronecker product with the first argument on the most significant qubit

    Args:
        a: (2,2) or (4,4) matrix
        b: (2,2) or (4,4) matrix

    Returns: Kronecker product a ⊗ b, at most 8x8
    """
    a = _as_matrix(a)
    b = _as_matrix(b)
    dim = a.shape[0]*b.shape[0]
    if dim > allowed_dims[-1]:
        logger = _get_sictomo_logger()
        msg = f'[tensor]: Tensor product dimension {dim} exceeds three qubits'
        logger.error(msg)
        raise DimensionError(msg)
    return np.kron(a, b)


def bloch_to_density(bloch):
    """
    rho = 1/2 sum_mu s_mu sigma_mu
    """
    if not isinstance(bloch, BlochVec):
        bloch = BlochVec(bloch)
    s = bloch.s
    return 0.5*(s[0]*pauli[0] + s[1]*pauli[1] + s[2]*pauli[2] + s[3]*pauli[3])


def density_to_bloch(rho):
    """
    s_mu = Tr(rho sigma_mu); rho must be a Hermitian unit trace 2x2 operator
    """
    rho = _check_density('density_to_bloch', rho)
    comps = [np.trace(rho @ pauli[mu]).real for mu in range(1, 4)]
    return BlochVec(comps)


def bloch_from_angles(xi):
    """
    Bloch vector of the pure state parametrized by xi = (alpha_1, alpha_2)
    """
    alpha1, alpha2 = xi
    return BlochVec(np.sin(2*alpha1)*np.cos(2*alpha2), -np.sin(2*alpha1)*np.sin(2*alpha2), np.cos(2*alpha1))


def angles_from_bloch(bloch):
    """
    Angles of the pure state along the direction of a Bloch vector, inverse of bloch_from_angles
    """
    if not isinstance(bloch, BlochVec):
        bloch = BlochVec(bloch)
    norm = bloch.norm
    if norm == 0.0:
        logger = _get_sictomo_logger()
        msg = '[angles_from_bloch]: The maximally mixed state has no Bloch direction'
        logger.error(msg)
        raise DegenerateSpectrumError(msg)
    sx, sy, sz = bloch.vector/norm
    alpha1 = 0.5*np.arccos(np.clip(sz, -1.0, 1.0))
    # relative phase -2 alpha_2 is the azimuth of the Bloch vector
    alpha2 = np.mod(-np.arctan2(sy, sx), 2*pi)/2.0
    return StateAngles(alpha1, alpha2)


def pure_state_from_angles(xi):
    """
    Density operator |psi><psi| of |psi> = e^{i alpha_2} cos(alpha_1)|0> + e^{-i alpha_2} sin(alpha_1)|1>
    """
    alpha1, alpha2 = xi
    ket = np.array([np.exp(1j*alpha2)*np.cos(alpha1), np.exp(-1j*alpha2)*np.sin(alpha1)])
    return np.outer(ket, ket.conj())


def purity(rho):
    """
    Tr(rho^2)
    """
    rho = _check_density('purity', rho)
    return float(np.trace(rho @ rho).real)


def fidelity(rho, sigma):
    """
    Uhlmann fidelity [Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2 of two qubit density operators, in the closed form
    Tr(rho sigma) + 2 sqrt(det(rho) det(sigma)) valid for 2x2 operators
    """
    rho = _check_density('fidelity', rho, check_psd=True)
    sigma = _check_density('fidelity', sigma, check_psd=True)
    overlap = np.trace(rho @ sigma).real
    det_prod = max(np.linalg.det(rho).real, 0.0)*max(np.linalg.det(sigma).real, 0.0)
    return float(overlap + 2.0*np.sqrt(det_prod))


def dominant_eigenstate(rho):
    """
    Pure density operator of the eigenvector belonging to the largest eigenvalue of rho

    Raises DegenerateSpectrumError when both eigenvalues agree within 1e-12, the caller decides the fallback.
    """
    rho = _check_density('dominant_eigenstate', rho)
    eig_low, eig_high = _qubit_eigenvalues(rho)
    if eig_high - eig_low < degenerate_tol:
        logger = _get_sictomo_logger()
        msg = '[dominant_eigenstate]: Degenerate spectrum, there is no dominant eigenstate'
        logger.warning(msg)
        raise DegenerateSpectrumError(msg)

    # The projector onto the top eigenvector is (rho - eig_low I)/(eig_high - eig_low)
    projector = (rho - eig_low*np.eye(2))/(eig_high - eig_low)
    return 0.5*(projector + projector.conj().T)
