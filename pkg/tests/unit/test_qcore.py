import pytest

import numpy as np
from scipy.linalg import sqrtm

from sictomo.qcore import BlochVec, StateAngles, tensor, bloch_to_density, density_to_bloch, bloch_from_angles, \
    angles_from_bloch, pure_state_from_angles, purity, fidelity, dominant_eigenstate, is_unitary, is_hermitian
from sictomo._utils._constants import sigma_0, sigma_x, sigma_y, sigma_z, hadamard
from sictomo._utils._errors import DimensionError, NotHermitianError, DegenerateSpectrumError, ParameterError


def _random_unitary(rng, dim=2):
    matrix = rng.normal(size=(dim, dim)) + 1j*rng.normal(size=(dim, dim))
    q_mat, r_mat = np.linalg.qr(matrix)
    return q_mat*(np.diag(r_mat)/np.abs(np.diag(r_mat)))


def _random_bloch(rng, max_norm=1.0):
    vector = rng.normal(size=3)
    return BlochVec(vector*max_norm*rng.uniform()/np.linalg.norm(vector))


def _random_ket(rng):
    ket = rng.normal(size=2) + 1j*rng.normal(size=2)
    return ket/np.linalg.norm(ket)


class TestBlochVec:
    tolerance = 1e-12

    def test_three_and_four_components(self):
        three = BlochVec(0.1, -0.2, 0.3)
        four = BlochVec([1.0, 0.1, -0.2, 0.3])
        assert three == four, 'Three and four component construction should agree'
        assert three.s[0] == 1.0, 's0 must always be 1'
        assert abs(three.norm - np.sqrt(0.14)) < self.tolerance, 'Wrong Bloch vector norm'

    def test_s0_must_be_one(self):
        with pytest.raises(NotHermitianError):
            BlochVec([0.5, 0.0, 0.0, 0.0])

    def test_wrong_length(self):
        with pytest.raises(DimensionError):
            BlochVec([0.1, 0.2])

    def test_non_finite_is_logged(self, caplog):
        with pytest.raises(ParameterError):
            BlochVec(np.nan, 0.0, 0.0)
        assert any(record.levelname == 'ERROR' and '[BlochVec]' in record.getMessage()
                   for record in caplog.records), 'The error must be logged before it is raised'

    def test_physical(self):
        assert BlochVec(0, 0, 1).is_physical(), 'Pure state should be physical'
        assert not BlochVec(0.8, 0.8, 0).is_physical(), 'Vector outside the ball should not be physical'

    def test_immutable(self):
        bloch = BlochVec(0.1, 0.2, 0.3)
        with pytest.raises(ValueError):
            bloch.s[1] = 0.5


class TestStateAngles:

    def test_range(self):
        StateAngles(np.pi/2, np.pi)
        with pytest.raises(ParameterError):
            StateAngles(-0.1, 0.0)
        with pytest.raises(ParameterError):
            StateAngles(0.0, 3.2)

    def test_unpacks(self):
        alpha1, alpha2 = StateAngles(0.3, 0.4)
        assert (alpha1, alpha2) == (0.3, 0.4), 'Angles should unpack in order'


class TestTensor:

    def test_qubit_order(self):
        ket1_projector = np.diag([0, 1]).astype(complex)
        product = tensor(ket1_projector, sigma_0)
        assert np.allclose(np.diag(product), [0, 0, 1, 1]), 'First factor must be the most significant qubit'

    def test_three_qubits(self):
        product = tensor(tensor(sigma_x, sigma_y), sigma_z)
        assert product.shape == (8, 8), 'Three qubit product must be 8x8'
        assert is_unitary(product), 'Product of Paulis is unitary'

    def test_overflow(self):
        with pytest.raises(DimensionError):
            tensor(np.eye(4), np.eye(4))

    def test_bad_dimension(self):
        with pytest.raises(DimensionError):
            tensor(np.eye(3), sigma_x)

    def test_index_loop(self):
        product = tensor(hadamard, sigma_x)
        expected = np.zeros((4, 4), dtype=complex)
        for i_a in range(2):
            for j_a in range(2):
                for i_b in range(2):
                    for j_b in range(2):
                        expected[2*i_a + i_b, 2*j_a + j_b] = hadamard[i_a, j_a]*sigma_x[i_b, j_b]
        assert np.max(np.abs(product - expected)) < 1e-15, 'H (x) sigma_x does not match the index definition'

    def test_associative(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            a, b, c = (_random_unitary(rng) for _ in range(3))
            assert np.max(np.abs(tensor(tensor(a, b), c) - tensor(a, tensor(b, c)))) < 1e-12, \
                'Tensor product must be associative'

    def test_mixed_product(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            a, b, c, d = (_random_unitary(rng) for _ in range(4))
            assert np.max(np.abs(tensor(a, b) @ tensor(c, d) - tensor(a @ c, b @ d))) < 1e-12, \
                '(A (x) B)(C (x) D) must equal AC (x) BD'


class TestChecks:

    def test_unitary(self):
        assert is_unitary(hadamard), 'Hadamard is unitary'
        assert not is_unitary(2*sigma_0), 'Scaled identity is not unitary'

    def test_hermitian(self):
        assert is_hermitian(sigma_y), 'sigma_y is Hermitian'
        assert not is_hermitian(np.array([[0, 1], [0, 0]])), 'Raising operator is not Hermitian'


class TestConversions:
    tolerance = 1e-12

    def test_round_trip(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            vector = rng.normal(size=3)
            vector *= rng.uniform()/np.linalg.norm(vector)
            bloch = BlochVec(vector)
            back = density_to_bloch(bloch_to_density(bloch))
            assert np.max(np.abs(back.vector - vector)) < self.tolerance, 'Bloch to density round trip failed'

    def test_density_of_z_state(self):
        rho = bloch_to_density(BlochVec(0, 0, 1))
        assert np.allclose(rho, np.diag([1, 0])), 'Bloch (0, 0, 1) must be |0><0|'

    def test_not_hermitian(self):
        with pytest.raises(NotHermitianError):
            density_to_bloch(np.array([[0.5, 1.0], [0.0, 0.5]]))

    def test_trace(self):
        with pytest.raises(NotHermitianError):
            density_to_bloch(np.eye(2))

    def test_pure_state_angles(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            xi = StateAngles(rng.uniform(0, np.pi/2), rng.uniform(0, np.pi))
            from_ket = density_to_bloch(pure_state_from_angles(xi))
            from_formula = bloch_from_angles(xi)
            assert np.max(np.abs(from_ket.vector - from_formula.vector)) < self.tolerance, \
                'Bloch vector of the pure state does not match its angles'

    def test_angles_inverse(self):
        xi = StateAngles(0.4, 2.1)
        back = angles_from_bloch(bloch_from_angles(xi))
        assert abs(back.alpha1 - xi.alpha1) < 1e-10 and abs(back.alpha2 - xi.alpha2) < 1e-10, \
            'angles_from_bloch should invert bloch_from_angles'


class TestMetrics:
    tolerance = 1e-12

    def test_purity(self):
        assert abs(purity(np.diag([1, 0])) - 1.0) < self.tolerance, 'Pure state purity must be 1'
        assert abs(purity(sigma_0/2) - 0.5) < self.tolerance, 'Maximally mixed purity must be 1/2'

    def test_fidelity_pure(self):
        rho = bloch_to_density(BlochVec(0, 0, 1))
        sigma = bloch_to_density(BlochVec(1, 0, 0))
        assert abs(fidelity(rho, rho) - 1.0) < self.tolerance, 'Fidelity of a state with itself must be 1'
        assert abs(fidelity(rho, sigma) - 0.5) < self.tolerance, 'Fidelity of |0> and |+> must be 1/2'

    def test_fidelity_mixed(self):
        rho = bloch_to_density(BlochVec(0.3, 0.1, -0.2))
        assert abs(fidelity(rho, rho) - 1.0) < 1e-10, 'Fidelity of a mixed state with itself must be 1'
        assert abs(fidelity(rho, sigma_0/2) - fidelity(sigma_0/2, rho)) < self.tolerance, 'Fidelity is symmetric'

    def test_fidelity_needs_psd(self):
        with pytest.raises(NotHermitianError):
            fidelity(bloch_to_density(BlochVec(0.9, 0.9, 0)), sigma_0/2)

    def test_purity_of_bloch_vector(self):
        rng = np.random.default_rng(19)
        for _ in range(1000):
            bloch = _random_bloch(rng)
            assert abs(purity(bloch_to_density(bloch)) - (1 + bloch.norm**2)/2) < self.tolerance, \
                'Purity must be (1 + |s|^2)/2'

    def test_fidelity_square_root_definition(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            rho = bloch_to_density(_random_bloch(rng, max_norm=0.95))
            sigma = bloch_to_density(_random_bloch(rng, max_norm=0.95))
            sqrt_rho = sqrtm(rho)
            expected = np.trace(sqrtm(sqrt_rho @ sigma @ sqrt_rho)).real**2
            assert abs(fidelity(rho, sigma) - expected) < 1e-8, 'Closed form fidelity differs from the definition'

    def test_fidelity_pure_overlap(self):
        rng = np.random.default_rng(29)
        for _ in range(100):
            psi = _random_ket(rng)
            phi = _random_ket(rng)
            expected = abs(np.vdot(psi, phi))**2
            assert abs(fidelity(np.outer(psi, psi.conj()), np.outer(phi, phi.conj())) - expected) < 1e-10, \
                'Fidelity of pure states must be the squared overlap'


class TestDominantEigenstate:
    tolerance = 1e-12

    def test_projection(self):
        rho = bloch_to_density(BlochVec(0.3, 0.0, 0.4))
        projected = density_to_bloch(dominant_eigenstate(rho))
        assert abs(projected.norm - 1.0) < self.tolerance, 'Projection must be pure'
        assert np.allclose(projected.vector, [0.6, 0.0, 0.8]), 'Projection must keep the Bloch direction'

    def test_degenerate(self):
        with pytest.raises(DegenerateSpectrumError):
            dominant_eigenstate(sigma_0/2)

    def test_matches_eigh(self):
        rng = np.random.default_rng(37)
        for _ in range(100):
            direction = rng.normal(size=3)
            bloch = BlochVec(direction*rng.uniform(0.05, 1.0)/np.linalg.norm(direction))
            rho = bloch_to_density(bloch)
            _, vectors = np.linalg.eigh(rho)
            top = vectors[:, -1]
            assert np.max(np.abs(dominant_eigenstate(rho) - np.outer(top, top.conj()))) < 1e-10, \
                'Projector must belong to the largest eigenvalue'
