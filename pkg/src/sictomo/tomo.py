"""Measurement matrix, outcome probabilities and the two state estimators: linear inversion and R rho R maximum
likelihood.

Outcome index nu runs over the four outcomes (k, l) = (0,0), (0,1), (1,0), (1,1); the Pauli index mu over (I, x, y, z).
"""
import numbers

import numpy as np

from sictomo.qcore import BlochVec
from sictomo._utils._algorithms import _rpr_kernel, _log_likelihood
from sictomo._utils._constants import pauli, det_tol, rpr_max_iter, rpr_tol, rpr_p_floor, rpr_max_dilutions, \
    trace_tol
from sictomo._utils._errors import SingularMeasurementError, ParameterError, DimensionError, ConvergenceError
from sictomo._utils._logger._sictomo_logger import _get_sictomo_logger
from sictomo._utils._param_utils._check_parms import _check_parms, _parm_check_passed


class MeasurementMatrix:
    """
    T[nu][mu] = 1/2 Tr(E_nu sigma_mu), so that p = T s
    """

    def __init__(self, t):
        t = np.array(t, dtype=float)
        if t.shape != (4, 4):
            logger = _get_sictomo_logger()
            msg = f'[MeasurementMatrix]: Measurement matrix must be 4x4, got {t.shape}'
            logger.error(msg)
            raise DimensionError(msg)
        t.setflags(write=False)
        self.t = t

    @property
    def det(self):
        return float(np.linalg.det(self.t))

    def is_informationally_complete(self, tol=det_tol):
        return abs(self.det) > tol

    def __repr__(self):
        return f'MeasurementMatrix(det={self.det:.6g})'


class CountVector:
    """
    Shot counts n = (n_00, n_01, n_10, n_11) with N = sum n >= 1
    """

    def __init__(self, counts):
        counts = np.asarray(counts)
        if counts.shape != (4,):
            logger = _get_sictomo_logger()
            msg = f'[CountVector]: Four outcome counts are needed, got shape {counts.shape}'
            logger.error(msg)
            raise DimensionError(msg)
        if not np.all(np.equal(np.mod(counts, 1), 0)) or np.any(counts < 0):
            logger = _get_sictomo_logger()
            msg = f'[CountVector]: Counts must be non-negative integers, got {counts.tolist()}'
            logger.error(msg)
            raise ParameterError(msg)
        counts = counts.astype(np.int64)
        if counts.sum() < 1:
            logger = _get_sictomo_logger()
            msg = '[CountVector]: At least one shot is needed'
            logger.error(msg)
            raise ParameterError(msg)
        counts.setflags(write=False)
        self.n = counts

    @property
    def shots(self):
        return int(self.n.sum())

    def frequencies(self):
        """
        Empirical probabilities n / N
        """
        return self.n/self.shots

    def __eq__(self, other):
        if not isinstance(other, CountVector):
            return NotImplemented
        return bool(np.array_equal(self.n, other.n))

    def __repr__(self):
        return f'CountVector({self.n.tolist()})'


class RprOptions:
    """
    Iteration control of the R rho R estimator

    :param max_iter: Maximum number of iterations, defaults to 10000
    :type max_iter: int, optional
    :param tol: Stop when the last step and the estimated distance to the fixed point are both below tol, defaults
        to 1e-10
    :type tol: float, optional
    :param p_floor: Model probabilities are clamped from below at p_floor, defaults to 1e-12
    :type p_floor: float, optional
    """

    def __init__(self, max_iter=rpr_max_iter, tol=rpr_tol, p_floor=rpr_p_floor):
        fname = 'RprOptions'
        parms = {'max_iter': max_iter, 'tol': tol, 'p_floor': p_floor}
        parms_passed = _check_parms(fname, parms, 'max_iter', [int], acceptable_range=[1, np.inf])
        parms_passed = parms_passed and _check_parms(fname, parms, 'tol', [float], acceptable_range=[0, np.inf])
        parms_passed = parms_passed and _check_parms(fname, parms, 'p_floor', [float], acceptable_range=[0, 1])
        _parm_check_passed(fname, parms_passed and parms['tol'] > 0)
        self.max_iter = int(parms['max_iter'])
        self.tol = float(parms['tol'])
        self.p_floor = float(parms['p_floor'])

    @classmethod
    def from_dict(cls, parms):
        return cls(**parms)

    def __repr__(self):
        return f'RprOptions(max_iter={self.max_iter}, tol={self.tol:g}, p_floor={self.p_floor:g})'


class RprResult:
    """
    Outcome of the R rho R iteration: the estimate, the number of iterations, whether the stopping rule was met and
    the per-shot log-likelihood of every iterate.
    """

    def __init__(self, bloch, n_iter, converged, loglik_trace):
        self.bloch = bloch
        self.n_iter = n_iter
        self.converged = converged
        self.loglik_trace = loglik_trace

    def __repr__(self):
        return f'RprResult({self.bloch!r}, n_iter={self.n_iter}, converged={self.converged})'


def measurement_matrix(povm):
    """
    Measurement matrix T[nu][mu] = 1/2 Tr(E_nu sigma_mu) of a POVM set
    """
    t = np.empty((4, 4))
    for nu, element in enumerate(povm):
        for mu in range(4):
            t[nu, mu] = 0.5*np.trace(element @ pauli[mu]).real
    return MeasurementMatrix(t)


def _bloch_array(bloch):
    if not isinstance(bloch, BlochVec):
        bloch = BlochVec(bloch)
    return np.ascontiguousarray(bloch.s)


def _check_distribution(caller, p_hat):
    logger = _get_sictomo_logger()
    p_hat = np.asarray(p_hat, dtype=float)
    if p_hat.shape != (4,):
        msg = f'[{caller}]: Four outcome frequencies are needed, got shape {p_hat.shape}'
        logger.error(msg)
        raise DimensionError(msg)
    if np.any(p_hat < 0) or abs(p_hat.sum() - 1.0) > trace_tol:
        msg = f'[{caller}]: Outcome frequencies must be non-negative and sum to 1, got {p_hat.tolist()}'
        logger.error(msg)
        raise ParameterError(msg)
    return np.ascontiguousarray(p_hat)


def probabilities(t, bloch):
    """
    Outcome probabilities p = T s, tiny negative values from rounding are clamped to 0
    """
    probs = t.t @ _bloch_array(bloch)
    return np.where(probs < 0.0, 0.0, probs)


def li_estimate(t, p_hat):
    """
    Linear inversion estimate s = T^-1 p_hat

    The estimate is not projected to the Bloch ball; check ``is_physical`` on the result.

    Raises SingularMeasurementError when |det T| <= 1e-12, i.e. the POVM is not informationally complete.
    """
    logger = _get_sictomo_logger()
    p_hat = _check_distribution('li_estimate', p_hat)
    if not t.is_informationally_complete():
        msg = f'[li_estimate]: Measurement matrix is singular (det = {t.det:.3e}), the POVM is not informationally ' \
              f'complete'
        logger.error(msg)
        raise SingularMeasurementError(msg)

    s = np.linalg.solve(t.t, p_hat)
    if abs(s[0] - 1.0) > trace_tol:
        logger.warning(f'[li_estimate]: s0 = {s[0]:.12f} differs from 1, renormalizing')
    estimate = BlochVec(s[1:])
    if not estimate.is_physical():
        logger.debug(f'[li_estimate]: Non-physical estimate with |s| = {estimate.norm:.6f}')
    return estimate


def rpr_result(t, p_hat, opts=None, strict=False):
    """
    R rho R maximum likelihood iteration started at the maximally mixed state, with the full iteration record.
    With ``strict`` set, running out of iterations raises ConvergenceError instead of returning the last iterate.
    """
    if opts is None:
        opts = RprOptions()
    p_hat = _check_distribution('rpr_estimate', p_hat)
    s_init = np.array([1.0, 0.0, 0.0, 0.0])
    s, n_iter, converged, loglik = _rpr_kernel(np.ascontiguousarray(t.t), p_hat, s_init, opts.max_iter, opts.tol,
                                               opts.p_floor, rpr_max_dilutions, 1e-13)
    if not converged:
        logger = _get_sictomo_logger()
        msg = f'[rpr_estimate]: No convergence after {n_iter} iterations'
        if strict:
            logger.error(msg)
            raise ConvergenceError(msg)
        logger.warning(f'{msg}, returning the last iterate')
    return RprResult(BlochVec(s[1:]), int(n_iter), bool(converged), np.array(loglik))


def rpr_estimate(t, p_hat, opts=None):
    """
    R rho R maximum likelihood estimate: rho <- N[R rho R] with R = sum_nu (p_hat_nu / p_nu(rho)) E_nu

    Every iterate is a physical state with s0 = 1. Non-convergence after max_iter iterations logs a warning and
    returns the last iterate; use ``rpr_result`` for the convergence status.
    """
    return rpr_result(t, p_hat, opts).bloch


def log_likelihood(t, counts, bloch, p_floor=rpr_p_floor):
    """
    Multinomial log-likelihood sum_nu n_nu ln p_nu(s) of counts, constant term dropped
    """
    if not isinstance(counts, CountVector):
        counts = CountVector(counts)
    per_shot = _log_likelihood(np.ascontiguousarray(t.t), np.ascontiguousarray(counts.frequencies()),
                               _bloch_array(bloch), p_floor)
    return counts.shots*per_shot


def counts_to_frequencies(counts):
    if isinstance(counts, CountVector):
        return counts.frequencies()
    if isinstance(counts, numbers.Number):
        logger = _get_sictomo_logger()
        msg = '[counts_to_frequencies]: Counts must be a sequence of four integers'
        logger.error(msg)
        raise ParameterError(msg)
    return CountVector(counts).frequencies()
