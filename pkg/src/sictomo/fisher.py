"""Fisher information, the Fisher error parameter Delta = Tr(F^-1) and its Haar average over pure states, the quantum
tomographic transfer function (qTTF).
"""
import numpy as np
from scipy.special import roots_legendre

from sictomo.qcore import BlochVec, bloch_from_angles
from sictomo.tomo import MeasurementMatrix
from sictomo._utils._algorithms import _fisher_matrix_kernel, _fisher_error_kernel, _fisher_error_batch, \
    FISHER_OK, FISHER_FLOOR
from sictomo._utils._constants import fisher_p_floor, fisher_cond_max, quadrature_rules, singular_policies, \
    halfpi, pi
from sictomo._utils._errors import SingularMeasurementError
from sictomo._utils._logger._sictomo_logger import _get_sictomo_logger
from sictomo._utils._param_utils._check_parms import _check_parms, _parm_check_passed


class QuadratureSpec:
    """
    Product quadrature over the pure state angles, alpha_1 in [0, pi/2] and alpha_2 in [0, pi]

    :param n_alpha1: Number of nodes on alpha_1, at least 4, defaults to 64
    :type n_alpha1: int, optional
    :param n_alpha2: Number of nodes on alpha_2, at least 4, defaults to 64
    :type n_alpha2: int, optional
    :param rule: 'gauss-legendre' or 'midpoint', both use interior nodes only, defaults to 'gauss-legendre'
    :type rule: str, optional
    :param on_singular: 'raise' aborts on a node with a singular Fisher matrix, 'skip' drops the node with a warning
    :type on_singular: str, optional
    """

    def __init__(self, n_alpha1=64, n_alpha2=64, rule='gauss-legendre', on_singular='raise'):
        fname = 'QuadratureSpec'
        parms = {'n_alpha1': n_alpha1, 'n_alpha2': n_alpha2, 'rule': rule, 'on_singular': on_singular}
        parms_passed = _check_parms(fname, parms, 'n_alpha1', [int], acceptable_range=[4, np.inf])
        parms_passed = parms_passed and _check_parms(fname, parms, 'n_alpha2', [int], acceptable_range=[4, np.inf])
        parms_passed = parms_passed and _check_parms(fname, parms, 'rule', [str], acceptable_data=quadrature_rules)
        parms_passed = parms_passed and _check_parms(fname, parms, 'on_singular', [str],
                                                     acceptable_data=singular_policies)
        _parm_check_passed(fname, parms_passed)
        self.n_alpha1 = int(parms['n_alpha1'])
        self.n_alpha2 = int(parms['n_alpha2'])
        self.rule = parms['rule']
        self.on_singular = parms['on_singular']

    def nodes(self):
        """
        Quadrature nodes and weights for (1/V) int Delta sin(2 alpha_1) d alpha_1 d alpha_2 with V = pi

        Returns: (alpha1, alpha2, weight) flattened arrays, the weights include the Haar factor and sum to 1
        """
        alpha1, w1 = _interval_rule(self.rule, self.n_alpha1, 0.0, halfpi)
        alpha2, w2 = _interval_rule(self.rule, self.n_alpha2, 0.0, pi)
        grid1, grid2 = np.meshgrid(alpha1, alpha2, indexing='ij')
        weights = np.outer(w1*np.sin(2*alpha1), w2)/pi
        return grid1.ravel(), grid2.ravel(), weights.ravel()

    def __repr__(self):
        return f'QuadratureSpec({self.n_alpha1}x{self.n_alpha2}, rule={self.rule})'


def _interval_rule(rule, n_nodes, lower, upper):
    half_width = 0.5*(upper - lower)
    center = 0.5*(upper + lower)
    if rule == 'gauss-legendre':
        nodes, weights = roots_legendre(n_nodes)
        return center + half_width*nodes, half_width*weights
    step = (upper - lower)/n_nodes
    return lower + step*(np.arange(n_nodes) + 0.5), np.full(n_nodes, step)


class FisherMatrix:
    """
    Per-shot Fisher matrix over the Bloch components (x, y, z); the full information of N shots is N F
    """

    def __init__(self, f):
        f = np.array(f, dtype=float)
        f.setflags(write=False)
        self.f = f

    def rank(self, tol=1e-10):
        return int(np.linalg.matrix_rank(self.f, tol=tol))

    def __repr__(self):
        return f'FisherMatrix({np.round(self.f, 6).tolist()})'


def _pure_states(alpha1, alpha2):
    """
    Bloch 4-vectors of the pure states on a set of angle pairs, as an (n, 4) array
    """
    states = np.empty((alpha1.shape[0], 4))
    states[:, 0] = 1.0
    states[:, 1] = np.sin(2*alpha1)*np.cos(2*alpha2)
    states[:, 2] = -np.sin(2*alpha1)*np.sin(2*alpha2)
    states[:, 3] = np.cos(2*alpha1)
    return states


def _state_array(bloch):
    if not isinstance(bloch, BlochVec):
        bloch = BlochVec(bloch)
    return np.ascontiguousarray(bloch.s)


def fisher_matrix(t, bloch, p_floor=fisher_p_floor):
    """
    F = [T^T P^-1 T] restricted to mu, nu in {1, 2, 3}, with P = diag(p_0, ..., p_3)

    Outcomes whose POVM element is zero are skipped; any other outcome with probability at or below p_floor raises
    SingularMeasurementError.
    """
    fisher, status = _fisher_matrix_kernel(np.ascontiguousarray(t.t), _state_array(bloch), p_floor)
    if status == FISHER_FLOOR:
        logger = _get_sictomo_logger()
        msg = f'[fisher_matrix]: An outcome probability is below {p_floor:g}, the state lies on a POVM null direction'
        logger.error(msg)
        raise SingularMeasurementError(msg)
    return FisherMatrix(fisher)


def fisher_error(t, bloch, p_floor=fisher_p_floor, cond_max=fisher_cond_max):
    """
    Fisher error parameter Delta = Tr(F^-1)

    Raises SingularMeasurementError when F is singular (condition number above 1e12) or a probability is at the floor.
    """
    delta, status = _fisher_error_kernel(np.ascontiguousarray(t.t), _state_array(bloch), p_floor, cond_max)
    if status != FISHER_OK:
        logger = _get_sictomo_logger()
        reason = 'probability at the floor' if status == FISHER_FLOOR else 'singular Fisher matrix'
        msg = f'[fisher_error]: No finite error parameter at {bloch!r}: {reason}, the measurement is not ' \
              f'informationally complete there'
        logger.error(msg)
        raise SingularMeasurementError(msg)
    return float(delta)


def cramer_rao_bound(t, bloch, shots):
    """
    Tr(J^-1) = Delta / N, the smallest total mean squared error of an unbiased estimator with N shots
    """
    return fisher_error(t, bloch)/shots


def delta_grid(t, n_alpha1=32, n_alpha2=32):
    """
    Delta over a regular interior grid of pure states, used to study how the error depends on the state

    Returns: (alpha1, alpha2, delta) with delta of shape (n_alpha1, n_alpha2), nan where F is singular
    """
    alpha1 = halfpi*(np.arange(n_alpha1) + 0.5)/n_alpha1
    alpha2 = pi*(np.arange(n_alpha2) + 0.5)/n_alpha2
    grid1, grid2 = np.meshgrid(alpha1, alpha2, indexing='ij')
    deltas, _ = _fisher_error_batch(np.ascontiguousarray(t.t), _pure_states(grid1.ravel(), grid2.ravel()),
                                    fisher_p_floor, fisher_cond_max)
    return alpha1, alpha2, deltas.reshape(n_alpha1, n_alpha2)


def qttf(t, quadrature=None):
    """
    Quantum tomographic transfer function, the Haar average of Delta over pure states,
    (1/pi) int Delta(s(xi)) sin(2 alpha_1) d alpha_1 d alpha_2

    :param t: Measurement matrix
    :type t: MeasurementMatrix
    :param quadrature: Quadrature over the state angles, defaults to 64x64 Gauss-Legendre
    :type quadrature: QuadratureSpec, optional

    :return: qTTF value
    :rtype: float

    Nodes where the Fisher matrix is singular abort with SingularMeasurementError, or are dropped with a warning and
    the remaining weights renormalized when ``quadrature.on_singular == 'skip'``.
    """
    logger = _get_sictomo_logger()
    if quadrature is None:
        quadrature = QuadratureSpec()
    if not isinstance(t, MeasurementMatrix):
        t = MeasurementMatrix(t)

    alpha1, alpha2, weights = quadrature.nodes()
    deltas, status = _fisher_error_batch(np.ascontiguousarray(t.t), _pure_states(alpha1, alpha2), fisher_p_floor,
                                         fisher_cond_max)
    failed = status != FISHER_OK
    n_failed = int(np.count_nonzero(failed))
    if n_failed > 0:
        if quadrature.on_singular == 'raise' or n_failed == failed.shape[0]:
            msg = f'[qttf]: Fisher matrix singular at {n_failed} of {failed.shape[0]} quadrature nodes, the ' \
                  f'measurement is not informationally complete'
            logger.error(msg)
            raise SingularMeasurementError(msg)
        logger.warning(f'[qttf]: Skipping {n_failed} quadrature nodes with a singular Fisher matrix')
        weights = np.where(failed, 0.0, weights)
        weights = weights/np.sum(weights)
        deltas = np.where(failed, 0.0, deltas)

    # numpy sums pairwise, the reduction order is fixed by the node order
    return float(np.sum(weights*deltas))


def state_fisher_error(t, xi):
    """
    Delta at the pure state with angles xi
    """
    return fisher_error(t, bloch_from_angles(xi))
