import numpy as np
import scipy.constants as constants

# Trigonometric constants
pi = constants.pi
twopi = 2.0*constants.pi
halfpi = 0.5*constants.pi

# Pauli matrices, sigma_0 is the identity
sigma_0 = np.array([[1, 0], [0, 1]], dtype=np.complex128)
sigma_x = np.array([[0, 1], [1, 0]], dtype=np.complex128)
sigma_y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
sigma_z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
pauli = (sigma_0, sigma_x, sigma_y, sigma_z)

hadamard = np.array([[1, 1], [1, -1]], dtype=np.complex128)/np.sqrt(2)

for _matrix in pauli + (hadamard,):
    _matrix.setflags(write=False)

# Supported matrix dimensions, one to three qubits
allowed_dims = (2, 4, 8)

# Tolerances
unitary_tol = 1e-12
hermitian_tol = 1e-12
trace_tol = 1e-9
psd_tol = 1e-9
physical_tol = 1e-9
povm_tol = 1e-10
degenerate_tol = 1e-12
det_tol = 1e-12
fisher_cond_max = 1e12
fisher_p_floor = 1e-10

# Maximum likelihood defaults
rpr_max_iter = 10000
rpr_tol = 1e-10
rpr_p_floor = 1e-12
rpr_max_dilutions = 60

# Measurement outcome ordering (k, l) by measured bits; nu = 2*k + l
outcome_labels = ('00', '01', '10', '11')
outcome_bits = ((0, 0), (0, 1), (1, 0), (1, 1))

# Tetrahedral optimum of the measurement circuit, first gate on the meter A
optimal_theta_a1 = -np.arccos(1.0/np.sqrt(3.0))
optimal_phi_a1 = -pi/4

# Quadrature
quadrature_rules = ['gauss-legendre', 'midpoint']
singular_policies = ['raise', 'skip']

# Experiment harness
circuit_kinds = ['full', 'simplified', 'canonical-sic']
estimator_kinds = ['li', 'rpr', 'both']
prng_name = 'PCG64'
csv_columns = ['state', 'rep', 'estimator', 'sx', 'sy', 'sz', 'purity', 'fidelity']
