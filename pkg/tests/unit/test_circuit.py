import pytest

import numpy as np

from sictomo.circuit import GateAngles, CircuitParams, PovmSet, OPTIMAL_PARAMS, OPTIMAL_SIMPLIFIED_PARAMS, \
    SAMPLE_THETA_1, u_gate, full_circuit_unitary, simplified_circuit_unitary, kraus_from_unitary, povm_from_kraus, \
    analytic_simplified_povm, canonical_sic_povm, povm_from_params, _controlled_not
from sictomo.qcore import is_unitary
from sictomo._utils._constants import sigma_0, sigma_x, hadamard, outcome_bits
from sictomo._utils._errors import DimensionError, NotHermitianError, ParameterError


def _random_gate(rng):
    return GateAngles(*rng.uniform(0, 2*np.pi, size=3))


def _max_povm_difference(povm_a, povm_b):
    return max(np.max(np.abs(elem_a - elem_b)) for elem_a, elem_b in zip(povm_a, povm_b))


class TestGates:
    tolerance = 1e-12

    def test_u_gate_unitary(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            assert is_unitary(u_gate(_random_gate(rng))), 'U gate must be unitary'

    def test_u_gate_identity(self):
        assert np.max(np.abs(u_gate((0, 0, 0)) - sigma_0)) < self.tolerance, 'U(0, 0, 0) must be the identity'

    def test_u_gate_not(self):
        assert np.max(np.abs(u_gate((np.pi, 0, np.pi)) - sigma_x)) < self.tolerance, 'U(pi, 0, pi) must be X'

    def test_controlled_not(self):
        # S (qubit 1) controls A (qubit 0): |a s> -> |a xor s, s>
        cnot = _controlled_not(2, control=1, target=0)
        for a_bit in (0, 1):
            for s_bit in (0, 1):
                column = cnot[:, 2*a_bit + s_bit]
                assert column[2*(a_bit ^ s_bit) + s_bit] == 1, 'CNOT maps the basis state to the wrong state'

    def test_non_finite_angles(self, caplog):
        with pytest.raises(ParameterError):
            GateAngles(np.nan, 0, 0)
        assert any(record.levelname == 'ERROR' for record in caplog.records), 'The error must be logged'

    def test_u_gate_hadamard(self):
        assert np.max(np.abs(u_gate((np.pi/2, 0, np.pi)) - hadamard)) < self.tolerance, 'U(pi/2, 0, pi) must be H'


def _single_qubit_oracle(gate, qubit):
    """
    8x8 matrix of a one qubit gate on (A, S, B) built entry by entry, qubit 0 is the most significant
    """
    matrix = np.zeros((8, 8), dtype=complex)
    for row in range(8):
        for col in range(8):
            row_bits = [(row >> (2 - q)) & 1 for q in range(3)]
            col_bits = [(col >> (2 - q)) & 1 for q in range(3)]
            others_equal = all(row_bits[q] == col_bits[q] for q in range(3) if q != qubit)
            if others_equal:
                matrix[row, col] = gate[row_bits[qubit], col_bits[qubit]]
    return matrix


def _cnot_oracle(control, target):
    matrix = np.zeros((8, 8))
    for col in range(8):
        bits = [(col >> (2 - q)) & 1 for q in range(3)]
        if bits[control]:
            bits[target] ^= 1
        matrix[4*bits[0] + 2*bits[1] + bits[2], col] = 1.0
    return matrix


class TestFullCircuit:

    def test_gate_by_gate(self):
        params = SAMPLE_THETA_1
        steps = [
            _single_qubit_oracle(u_gate(params.a1), 0),
            _cnot_oracle(control=1, target=0),
            _single_qubit_oracle(u_gate(params.a2), 0),
            _single_qubit_oracle(hadamard, 1),
            _single_qubit_oracle(u_gate(params.b1), 2),
            _cnot_oracle(control=1, target=2),
            _single_qubit_oracle(u_gate(params.b2), 2),
        ]
        expected = np.eye(8, dtype=complex)
        for step in steps:
            expected = step @ expected
        assert np.max(np.abs(full_circuit_unitary(params) - expected)) < 1e-12, \
            'Circuit unitary differs from the gate by gate product'


class TestCircuitParams:

    def test_vector_round_trip(self):
        vector = np.arange(12, dtype=float)/10
        params = CircuitParams.from_vector(vector)
        assert not params.simplified, 'Twelve parameters describe the full circuit'
        assert np.array_equal(params.to_vector(), vector), 'Parameter vector round trip failed'
        assert CircuitParams.from_vector(vector[:6]).simplified, 'Six parameters describe the simplified circuit'

    def test_wrong_length(self):
        with pytest.raises(DimensionError):
            CircuitParams.from_vector(np.zeros(5))

    def test_theta_file(self, tmp_path):
        file = str(tmp_path/'theta.json')
        SAMPLE_THETA_1.to_file(file)
        assert CircuitParams.from_file(file) == SAMPLE_THETA_1, 'Theta file round trip failed'

    def test_bad_theta_file(self, tmp_path):
        file = tmp_path/'theta.json'
        file.write_text('[{"theta": 1.0, "phi": 0.0}]')
        with pytest.raises(ParameterError):
            CircuitParams.from_file(str(file))

    def test_full_unitary_needs_four_gates(self):
        with pytest.raises(ParameterError):
            full_circuit_unitary(OPTIMAL_SIMPLIFIED_PARAMS)


class TestKraus:
    tolerance = 1e-10

    def test_full_circuit_complete(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            params = CircuitParams(*[_random_gate(rng) for _ in range(4)])
            unitary = full_circuit_unitary(params)
            assert is_unitary(unitary), 'Full circuit must be unitary'
            kraus = kraus_from_unitary(unitary)
            completeness = sum(m.conj().T @ m for m in kraus)
            assert np.max(np.abs(completeness - sigma_0)) < self.tolerance, 'Kraus operators must be complete'

    def test_simplified_post_measurement_state(self):
        kraus = kraus_from_unitary(simplified_circuit_unitary(GateAngles(0.3, 0.2, 0.1), GateAngles(1.1, 0.5, 0.7)))
        for (k, l), operator in zip(outcome_bits, kraus):
            assert np.max(np.abs(operator[1 - l])) < self.tolerance, 'Simplified circuit leaves S in |l>'

    def test_not_unitary(self):
        with pytest.raises(NotHermitianError):
            kraus_from_unitary(2*np.eye(8))

    def test_wrong_size(self):
        with pytest.raises(DimensionError):
            kraus_from_unitary(np.eye(2))

    def test_incomplete_kraus(self):
        with pytest.raises(NotHermitianError):
            povm_from_kraus([0.4*sigma_0]*4)


class TestPovmSet:
    tolerance = 1e-12

    def test_not_complete(self):
        with pytest.raises(NotHermitianError):
            PovmSet([0.3*sigma_0]*4)

    def test_not_positive(self):
        elements = [np.diag([1.5, 0]), np.diag([-0.5, 1]), np.zeros((2, 2)), np.zeros((2, 2))]
        with pytest.raises(NotHermitianError):
            PovmSet(elements)

    def test_wrong_count(self):
        with pytest.raises(DimensionError):
            PovmSet([sigma_0])

    def test_indexing(self):
        povm = canonical_sic_povm()
        assert np.array_equal(povm[(1, 0)], povm[2]), 'Outcome (k, l) must map to nu = 2k + l'

    def test_sic_directions(self):
        directions = canonical_sic_povm().bloch_directions()
        for (bit_k, bit_l), direction in zip(outcome_bits, directions):
            k = 1 - 2*bit_k
            l = 1 - 2*bit_l
            expected = -np.array([l, k*l, -k])/np.sqrt(3)
            assert np.max(np.abs(direction - expected)) < self.tolerance, 'Tetrahedron direction is wrong'

    def test_permuted(self):
        povm = canonical_sic_povm()
        swapped = povm.permuted([3, 2, 1, 0])
        assert np.array_equal(swapped[0], povm[3]), 'Permutation relabels the outcomes'


class TestAnalyticPovm:
    tolerance = 1e-10

    def test_matches_circuit(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            a1 = _random_gate(rng)
            a2 = _random_gate(rng)
            from_circuit = povm_from_kraus(kraus_from_unitary(simplified_circuit_unitary(a1, a2)))
            analytic = analytic_simplified_povm(a1, a2)
            assert _max_povm_difference(from_circuit, analytic) < self.tolerance, \
                'Closed form POVM does not match the simplified circuit'

    def test_independent_of_lambda1_and_phi2(self):
        a1 = GateAngles(0.7, 1.3, 0.0)
        a2 = GateAngles(2.1, 0.0, 0.4)
        reference = povm_from_kraus(kraus_from_unitary(simplified_circuit_unitary(a1, a2)))
        changed = povm_from_kraus(kraus_from_unitary(
            simplified_circuit_unitary(GateAngles(0.7, 1.3, 2.5), GateAngles(2.1, 4.0, 0.4))))
        assert _max_povm_difference(reference, changed) < self.tolerance, 'POVM must not depend on lambda_1, phi_2'

    def test_optimal_angles_give_sic(self):
        sic = canonical_sic_povm()
        analytic = analytic_simplified_povm(OPTIMAL_SIMPLIFIED_PARAMS.a1, OPTIMAL_SIMPLIFIED_PARAMS.a2)
        from_circuit = povm_from_params(OPTIMAL_SIMPLIFIED_PARAMS)
        assert _max_povm_difference(analytic, sic) < 1e-12, 'Closed form at the optimal angles must be the SIC'
        assert _max_povm_difference(from_circuit, sic) < 1e-12, 'Simplified circuit at the optimal angles is the SIC'

    def test_full_circuit_optimum(self):
        povm = povm_from_params(OPTIMAL_PARAMS)
        assert _max_povm_difference(povm, canonical_sic_povm()) < self.tolerance, \
            'Full circuit at the optimal parameters must give the tetrahedral SIC'
        assert np.max(np.abs(povm.traces() - 0.5)) < self.tolerance, 'SIC element traces must be 1/2'
