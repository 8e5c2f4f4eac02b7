"""Parametrized estimation circuits, their Kraus operators and POVMs.

The full circuit acts on three qubits ordered (A, S, B): a gate U_A1 on the meter A, a CNOT with S as control and A as
target, U_A2 on A, a Hadamard on S, then U_B1 on the meter B, a CNOT from S to B and U_B2 on B. The simplified
circuit keeps the first half on (A, S) and measures S directly.

Outcome pairs (k, l) are indexed by nu = 2*k + l, where k is the bit read on A and l the bit read on B (full circuit) or
on S (simplified circuit).
"""
import numpy as np

from sictomo.qcore import tensor, is_unitary, _as_matrix, _qubit_eigenvalues
from sictomo._utils._constants import sigma_0, sigma_x, sigma_y, sigma_z, hadamard, povm_tol, outcome_bits, \
    optimal_theta_a1, optimal_phi_a1
from sictomo._utils._dio import _read_theta_file, _write_theta_file
from sictomo._utils._errors import DimensionError, NotHermitianError, ParameterError
from sictomo._utils._logger._sictomo_logger import _get_sictomo_logger

_ket0_projector = np.array([[1, 0], [0, 0]], dtype=np.complex128)
_ket1_projector = np.array([[0, 0], [0, 1]], dtype=np.complex128)


class GateAngles:
    """
    Angles (theta, phi, lambda) of a general single qubit rotation
    """

    def __init__(self, theta=0.0, phi=0.0, lam=0.0):
        angles = np.array([theta, phi, lam], dtype=float)
        if not np.all(np.isfinite(angles)):
            logger = _get_sictomo_logger()
            msg = f'[GateAngles]: Gate angles must be finite, got {angles}'
            logger.error(msg)
            raise ParameterError(msg)
        self.theta, self.phi, self.lam = (float(angle) for angle in angles)

    def __iter__(self):
        return iter((self.theta, self.phi, self.lam))

    def __eq__(self, other):
        if not isinstance(other, GateAngles):
            return NotImplemented
        return tuple(self) == tuple(other)

    def __repr__(self):
        return f'GateAngles({self.theta:.6g}, {self.phi:.6g}, {self.lam:.6g})'


class CircuitParams:
    """
    Gate angles of the estimation circuit: a1, a2 on the meter A and b1, b2 on the meter B. The simplified circuit
    only uses a1 and a2, ``simplified`` marks parameter sets that were built for it.
    """
    gate_names = ('a1', 'a2', 'b1', 'b2')

    def __init__(self, a1=None, a2=None, b1=None, b2=None, simplified=False):
        self.simplified = simplified
        self.a1 = _to_gate(a1)
        self.a2 = _to_gate(a2)
        self.b1 = _to_gate(b1)
        self.b2 = _to_gate(b2)

    @property
    def gates(self):
        if self.simplified:
            return self.a1, self.a2
        return self.a1, self.a2, self.b1, self.b2

    @classmethod
    def from_vector(cls, vector):
        """
        Builds parameters from 12 reals (full circuit) or 6 reals (simplified circuit), three per gate
        """
        vector = np.asarray(vector, dtype=float).ravel()
        if vector.shape[0] == 12:
            return cls(*vector.reshape(4, 3), simplified=False)
        if vector.shape[0] == 6:
            return cls(*vector.reshape(2, 3), simplified=True)
        logger = _get_sictomo_logger()
        msg = f'[CircuitParams]: Circuit parameter vectors have 6 or 12 entries, got {vector.shape[0]}'
        logger.error(msg)
        raise DimensionError(msg)

    def to_vector(self):
        return np.array([angle for gate in self.gates for angle in gate])

    @classmethod
    def from_file(cls, file):
        """
        Reads a theta file: JSON array of 4 (full) or 2 (simplified) objects {theta, phi, lambda}
        """
        gates = _read_theta_file(file)
        return cls(*gates, simplified=(len(gates) == 2))

    def to_file(self, file, overwrite=True):
        _write_theta_file(file, [tuple(gate) for gate in self.gates], overwrite=overwrite)

    def __eq__(self, other):
        if not isinstance(other, CircuitParams):
            return NotImplemented
        return self.simplified == other.simplified and np.array_equal(self.to_vector(), other.to_vector())

    def __repr__(self):
        body = ', '.join(f'{name}={gate!r}' for name, gate in zip(self.gate_names, self.gates))
        return f'CircuitParams({body})'


def _to_gate(gate):
    if gate is None:
        return GateAngles()
    if isinstance(gate, GateAngles):
        return gate
    return GateAngles(*gate)


# Tetrahedral optimum of the full circuit, every gate but the first one is the identity
OPTIMAL_PARAMS = CircuitParams(a1=(optimal_theta_a1, optimal_phi_a1, 0.0))
OPTIMAL_SIMPLIFIED_PARAMS = CircuitParams(a1=(optimal_theta_a1, optimal_phi_a1, 0.0), simplified=True)

# Randomly drawn parameter sets used to show the state dependence of the estimation error
SAMPLE_THETA_1 = CircuitParams(a1=(2.01, 1.32, 0.51), a2=(0.00, 4.60, 4.24), b1=(0.95, 5.56, 4.48),
                               b2=(2.35, 0.54, 0.60))
SAMPLE_THETA_2 = CircuitParams(a1=(2.26, 2.48, 5.25), a2=(3.07, 5.18, 6.07), b1=(1.47, 5.88, 5.3),
                               b2=(1.18, 1.09, 3.68))


class PovmSet:
    """
    Four qubit POVM elements E_kl indexed by nu = 2*k + l. Construction checks Hermiticity, positivity and
    completeness to 1e-10.
    """

    def __init__(self, elements, tol=povm_tol):
        logger = _get_sictomo_logger()
        elements = [_as_matrix(element) for element in elements]
        if len(elements) != 4 or any(element.shape != (2, 2) for element in elements):
            msg = '[PovmSet]: A qubit POVM set needs exactly four 2x2 elements'
            logger.error(msg)
            raise DimensionError(msg)

        for nu, element in enumerate(elements):
            if np.max(np.abs(element - element.conj().T)) > tol:
                msg = f'[PovmSet]: POVM element {nu} is not Hermitian'
                logger.error(msg)
                raise NotHermitianError(msg)
            if _qubit_eigenvalues(element)[0] < -tol:
                msg = f'[PovmSet]: POVM element {nu} is not positive semi-definite'
                logger.error(msg)
                raise NotHermitianError(msg)

        completeness = np.max(np.abs(sum(elements) - sigma_0))
        if completeness > tol:
            msg = f'[PovmSet]: POVM elements do not sum to the identity, deviation {completeness:.3e}'
            logger.error(msg)
            raise NotHermitianError(msg)

        self._elements = tuple(elements)
        for element in self._elements:
            element.setflags(write=False)

    @property
    def elements(self):
        return self._elements

    def __getitem__(self, index):
        """
        Element by outcome index nu or by outcome pair (k, l)
        """
        if isinstance(index, tuple):
            k, l = index
            index = 2*k + l
        return self._elements[index]

    def __len__(self):
        return 4

    def __iter__(self):
        return iter(self._elements)

    def traces(self):
        return np.array([np.trace(element).real for element in self._elements])

    def bloch_directions(self):
        """
        Bloch vectors a of the elements written as E = Tr(E)/2 (I + a.sigma); rows are zero for null elements
        """
        directions = np.zeros((4, 3))
        for nu, element in enumerate(self._elements):
            trace = np.trace(element).real
            if trace > povm_tol:
                directions[nu] = [np.trace(element @ pauli_mat).real/trace for pauli_mat in (sigma_x, sigma_y, sigma_z)]
        return directions

    def permuted(self, order):
        """
        Relabels the outcomes, element nu of the result is element order[nu] of this set
        """
        return PovmSet([self._elements[index] for index in order])

    def __repr__(self):
        return f'PovmSet(traces={np.round(self.traces(), 6).tolist()})'


def u_gate(gate):
    """
    General rotation [[cos t/2, -e^{i l} sin t/2], [e^{i p} sin t/2, e^{i(p+l)} cos t/2]]
    """
    if not isinstance(gate, GateAngles):
        gate = GateAngles(*gate)
    cos_half = np.cos(gate.theta/2)
    sin_half = np.sin(gate.theta/2)
    return np.array([
        [cos_half, -np.exp(1j*gate.lam)*sin_half],
        [np.exp(1j*gate.phi)*sin_half, np.exp(1j*(gate.phi + gate.lam))*cos_half]
    ], dtype=np.complex128)


def _embed(gates):
    """
    Tensor product of per-qubit operators, most significant qubit first
    """
    result = gates[0]
    for gate in gates[1:]:
        result = tensor(result, gate)
    return result


def _controlled_not(n_qubits, control, target):
    """
    CNOT on a register of n_qubits, qubit 0 is the most significant
    """
    identities = [sigma_0]*n_qubits
    not_taken = list(identities)
    not_taken[control] = _ket0_projector
    taken = list(identities)
    taken[control] = _ket1_projector
    taken[target] = sigma_x
    return _embed(not_taken) + _embed(taken)


def full_circuit_unitary(params):
    """
    8x8 unitary of the full estimation circuit on (A, S, B)

    Args:
        params: CircuitParams with the four gates a1, a2, b1, b2

    Returns: product in temporal order of U_A1, CNOT(S->A), U_A2, H_S, U_B1, CNOT(S->B), U_B2
    """
    if params.simplified:
        logger = _get_sictomo_logger()
        msg = '[full_circuit_unitary]: The four gates of the full circuit'
        logger.error(msg)
        raise ParameterError(msg)
    eye = sigma_0
    steps = [
        _embed([u_gate(params.a1), eye, eye]),
        _controlled_not(3, control=1, target=0),
        _embed([u_gate(params.a2), eye, eye]),
        _embed([eye, hadamard, eye]),
        _embed([eye, eye, u_gate(params.b1)]),
        _controlled_not(3, control=1, target=2),
        _embed([eye, eye, u_gate(params.b2)]),
    ]
    unitary = np.eye(8, dtype=np.complex128)
    for step in steps:
        unitary = step @ unitary
    return unitary


def simplified_circuit_unitary(a1, a2):
    """
    4x4 unitary of the simplified circuit on (A, S): U_A1, CNOT(S->A), U_A2 and a Hadamard on S
    """
    eye = sigma_0
    steps = [
        _embed([u_gate(a1), eye]),
        _controlled_not(2, control=1, target=0),
        _embed([u_gate(a2), eye]),
        _embed([eye, hadamard]),
    ]
    unitary = np.eye(4, dtype=np.complex128)
    for step in steps:
        unitary = step @ unitary
    return unitary


def kraus_from_unitary(unitary):
    """
    Kraus operators M_kl of the indirect measurement described by a circuit unitary

    For the 8x8 full circuit M_kl = <k_A l_B| U |0_A 0_B> acts on S. For the 4x4 simplified circuit S itself is read
    out as l, the Kraus operator is |l><v_kl| with v_kl = <k_A l_S| U |0_A>, so that M_kl^dagger M_kl is the POVM
    element and the post-measurement state of S is |l>.

    Returns: list of four 2x2 Kraus operators ordered by nu = 2*k + l
    """
    logger = _get_sictomo_logger()
    unitary = _as_matrix(unitary)
    if unitary.shape[0] not in (4, 8):
        msg = f'[kraus_from_unitary]: Expected a 4x4 or 8x8 circuit unitary, got {unitary.shape}'
        logger.error(msg)
        raise DimensionError(msg)
    if not is_unitary(unitary, tol=povm_tol):
        msg = '[kraus_from_unitary]: Circuit matrix is not unitary'
        logger.error(msg)
        raise NotHermitianError(msg)

    kraus = []
    for k, l in outcome_bits:
        if unitary.shape[0] == 8:
            # |a s b> sits at row 4a + 2s + b; meters start in |0>
            rows = [4*k + 2*s_out + l for s_out in (0, 1)]
            cols = [2*s_in for s_in in (0, 1)]
            kraus.append(unitary[np.ix_(rows, cols)])
        else:
            # |a s> sits at row 2a + s
            row = unitary[2*k + l, 0:2]
            operator = np.zeros((2, 2), dtype=np.complex128)
            operator[l, :] = row
            kraus.append(operator)
    return kraus


def povm_from_kraus(kraus):
    """
    E_kl = M_kl^dagger M_kl
    """
    if len(kraus) != 4:
        logger = _get_sictomo_logger()
        msg = '[povm_from_kraus]: Four Kraus operators are needed'
        logger.error(msg)
        raise DimensionError(msg)
    completeness = sum(np.asarray(m).conj().T @ np.asarray(m) for m in kraus)
    deviation = np.max(np.abs(completeness - sigma_0))
    if deviation > povm_tol:
        logger = _get_sictomo_logger()
        msg = f'[povm_from_kraus]: Kraus operators are not complete, deviation {deviation:.3e}'
        logger.error(msg)
        raise NotHermitianError(msg)
    return PovmSet([np.asarray(m).conj().T @ np.asarray(m) for m in kraus])


def analytic_simplified_povm(a1, a2):
    """
    Closed form POVM of the simplified circuit,
    E_kl = 1/4 [(1 - k b) I + (l x1 - k l x2) sigma_x + k l y sigma_y + k z sigma_z]
    with k and l the signs (-1)^bit of the outcome bits.
    It does not depend on lambda_1 and phi_2.
    """
    if not isinstance(a1, GateAngles):
        a1 = GateAngles(*a1)
    if not isinstance(a2, GateAngles):
        a2 = GateAngles(*a2)
    theta1, phi1 = a1.theta, a1.phi
    theta2, lam2 = a2.theta, a2.lam

    x1 = np.sin(theta1)*np.cos(phi1)
    x2 = np.sin(theta2)*np.cos(lam2)
    b = x1*x2
    y = np.cos(theta1)*np.sin(theta2)*np.sin(lam2) - np.sin(theta1)*np.sin(phi1)*np.cos(theta2)
    z = np.cos(theta1)*np.cos(theta2) + np.sin(theta1)*np.sin(phi1)*np.sin(theta2)*np.sin(lam2)

    elements = []
    for bit_k, bit_l in outcome_bits:
        k = 1 - 2*bit_k
        l = 1 - 2*bit_l
        elements.append(0.25*((1 - k*b)*sigma_0 + (l*x1 - k*l*x2)*sigma_x + k*l*y*sigma_y + k*z*sigma_z))
    return PovmSet(elements)


def canonical_sic_povm():
    """
    Tetrahedral SIC-POVM E_kl = 1/4 [I - (l sigma_x + k l sigma_y - k sigma_z)/sqrt(3)] for signed k, l
    """
    elements = []
    for bit_k, bit_l in outcome_bits:
        k = 1 - 2*bit_k
        l = 1 - 2*bit_l
        elements.append(0.25*(sigma_0 - (l*sigma_x + k*l*sigma_y - k*sigma_z)/np.sqrt(3)))
    return PovmSet(elements)


def povm_from_params(params):
    """
    POVM of the full or simplified circuit, depending on the parameter set
    """
    if params.simplified:
        return povm_from_kraus(kraus_from_unitary(simplified_circuit_unitary(params.a1, params.a2)))
    return povm_from_kraus(kraus_from_unitary(full_circuit_unitary(params)))
