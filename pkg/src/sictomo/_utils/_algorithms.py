import numba
import numpy as np

FISHER_OK = 0
FISHER_FLOOR = 1
FISHER_SINGULAR = 2


@numba.njit(cache=False, nogil=True)
def _model_probabilities(t, s, p_floor):
    """
    p = T s for s = (1, sx, sy, sz), clamped from below at p_floor
    """
    n_out = t.shape[0]
    probs = np.empty(n_out)
    for nu in range(n_out):
        value = 0.0
        for mu in range(4):
            value += t[nu, mu]*s[mu]
        probs[nu] = max(value, p_floor)
    return probs


@numba.njit(cache=False, nogil=True)
def _log_likelihood(t, p_hat, s, p_floor):
    """
    Per-shot multinomial log-likelihood sum_nu p_hat_nu ln p_nu(s), the constant term is dropped
    """
    probs = _model_probabilities(t, s, p_floor)
    total = 0.0
    for nu in range(t.shape[0]):
        if p_hat[nu] > 0.0:
            total += p_hat[nu]*np.log(probs[nu])
    return total


@numba.njit(cache=False, nogil=True)
def _rpr_update(s, r):
    """
    Bloch vector of N[R rho R] for rho = (I + s.sigma)/2 and R = r0 I + r.sigma
    """
    r0 = r[0]
    r_sq = r[1]*r[1] + r[2]*r[2] + r[3]*r[3]
    r_dot_s = r[1]*s[1] + r[2]*s[2] + r[3]*s[3]
    den = r0*r0 + r_sq + 2.0*r0*r_dot_s
    new_s = np.empty(4)
    new_s[0] = 1.0
    norm_sq = 0.0
    for mu in range(1, 4):
        new_s[mu] = (2.0*r0*r[mu] + (r0*r0 - r_sq)*s[mu] + 2.0*r_dot_s*r[mu])/den
        norm_sq += new_s[mu]*new_s[mu]
    # N[R rho R] is a state, anything above the unit norm is rounding
    if norm_sq > 1.0:
        norm = np.sqrt(norm_sq)
        for mu in range(1, 4):
            new_s[mu] /= norm
    return new_s


@numba.njit(cache=False, nogil=True)
def _inverse_3x3(mat):
    """
    Adjugate inverse of a 3x3 matrix, returns the inverse and the determinant
    """
    inv = np.empty((3, 3))
    inv[0, 0] = mat[1, 1]*mat[2, 2] - mat[1, 2]*mat[2, 1]
    inv[0, 1] = mat[0, 2]*mat[2, 1] - mat[0, 1]*mat[2, 2]
    inv[0, 2] = mat[0, 1]*mat[1, 2] - mat[0, 2]*mat[1, 1]
    inv[1, 0] = mat[1, 2]*mat[2, 0] - mat[1, 0]*mat[2, 2]
    inv[1, 1] = mat[0, 0]*mat[2, 2] - mat[0, 2]*mat[2, 0]
    inv[1, 2] = mat[0, 2]*mat[1, 0] - mat[0, 0]*mat[1, 2]
    inv[2, 0] = mat[1, 0]*mat[2, 1] - mat[1, 1]*mat[2, 0]
    inv[2, 1] = mat[0, 1]*mat[2, 0] - mat[0, 0]*mat[2, 1]
    inv[2, 2] = mat[0, 0]*mat[1, 1] - mat[0, 1]*mat[1, 0]
    det = mat[0, 0]*inv[0, 0] + mat[0, 1]*inv[1, 0] + mat[0, 2]*inv[2, 0]
    if det != 0.0:
        for i in range(3):
            for j in range(3):
                inv[i, j] /= det
    return inv, det


@numba.njit(cache=False, nogil=True)
def _newton_candidate(t, p_hat, s, p_floor):
    """
    Newton step of the log-likelihood over the Bloch 3-vector. The negative Hessian is the observed Fisher matrix
    sum_nu p_hat_nu t_nu t_nu^T / p_nu^2.

    Returns: candidate Bloch 4-vector and a flag telling whether the step could be taken
    """
    probs = _model_probabilities(t, s, p_floor)
    grad = np.zeros(3)
    hess = np.zeros((3, 3))
    for nu in range(t.shape[0]):
        if p_hat[nu] > 0.0:
            weight = p_hat[nu]/probs[nu]
            for i in range(3):
                grad[i] += weight*t[nu, i + 1]
                for j in range(3):
                    hess[i, j] += weight*t[nu, i + 1]*t[nu, j + 1]/probs[nu]
    candidate = s.copy()
    inv, det = _inverse_3x3(hess)
    if not det > 1e-300:
        return candidate, False
    norm_sq = 0.0
    for i in range(3):
        for j in range(3):
            candidate[i + 1] += inv[i, j]*grad[j]
        norm_sq += candidate[i + 1]*candidate[i + 1]
    return candidate, norm_sq < 1.0


@numba.njit(cache=False, nogil=True)
def _rpr_kernel(t, p_hat, s_init, max_iter, tol, p_floor, max_dilutions, loglik_slack):
    """
    R rho R maximum likelihood iteration in Bloch form

    A plain step that would lower the log-likelihood is replaced by the diluted step with R_eps = I + eps R, eps
    halved until the likelihood does not decrease. After every step a Newton step inside the Bloch ball is tried and
    kept when it raises the likelihood, which turns the linear convergence towards an interior maximum into
    quadratic convergence.

    The iteration stops when both the last step and the distance to the fixed point estimated from the ratio q of
    successive steps, step q / (1 - q), are below tol. A start that is already a fixed point takes no iteration.

    Returns: final Bloch 4-vector, number of iterations, convergence flag and the log-likelihood of every iterate
    """
    s = s_init.copy()
    loglik = np.empty(max_iter + 1)
    loglik[0] = _log_likelihood(t, p_hat, s, p_floor)
    n_out = t.shape[0]
    n_iter = 0
    converged = False
    stationary = min(tol, 1e-14)
    previous_step = 0.0

    for it in range(max_iter):
        probs = _model_probabilities(t, s, p_floor)
        r = np.zeros(4)
        for nu in range(n_out):
            if p_hat[nu] > 0.0:
                ratio = p_hat[nu]/probs[nu]
                for mu in range(4):
                    r[mu] += ratio*t[nu, mu]

        new_s = _rpr_update(s, r)
        new_ll = _log_likelihood(t, p_hat, new_s, p_floor)
        eps = 1.0
        n_dilution = 0
        while new_ll < loglik[it] - loglik_slack and n_dilution < max_dilutions:
            r_eps = eps*r
            r_eps[0] += 1.0
            new_s = _rpr_update(s, r_eps)
            new_ll = _log_likelihood(t, p_hat, new_s, p_floor)
            eps *= 0.5
            n_dilution += 1

        if new_ll < loglik[it] - loglik_slack:
            # no ascent direction left at machine precision
            converged = True
            break

        step = 0.0
        for mu in range(1, 4):
            step += (new_s[mu] - s[mu])**2
        if np.sqrt(step) <= stationary:
            converged = True
            break

        candidate, inside = _newton_candidate(t, p_hat, new_s, p_floor)
        if inside:
            candidate_ll = _log_likelihood(t, p_hat, candidate, p_floor)
            if candidate_ll >= new_ll:
                new_s = candidate
                new_ll = candidate_ll

        step = 0.0
        for mu in range(1, 4):
            step += (new_s[mu] - s[mu])**2
        step = np.sqrt(step)
        s = new_s
        n_iter = it + 1
        loglik[n_iter] = new_ll

        if step < tol and previous_step > 0.0:
            rate = step/previous_step
            if rate < 1.0 and step*rate/(1.0 - rate) < tol:
                converged = True
                break
        previous_step = step

    return s, n_iter, converged, loglik[:n_iter + 1]


@numba.njit(cache=False, nogil=True)
def _fisher_matrix_kernel(t, s, p_floor):
    """
    Per-shot Fisher matrix F = sum_nu (1/p_nu) grad p_nu grad p_nu^T over the Bloch components 1..3.
    Outcomes with an identically zero element carry no information and are skipped.

    Returns: 3x3 matrix and status flag (FISHER_OK or FISHER_FLOOR)
    """
    fisher = np.zeros((3, 3))
    for nu in range(t.shape[0]):
        row_max = 0.0
        for mu in range(4):
            row_max = max(row_max, abs(t[nu, mu]))
        if row_max < 1e-14:
            continue
        prob = 0.0
        for mu in range(4):
            prob += t[nu, mu]*s[mu]
        if prob <= p_floor:
            return fisher, FISHER_FLOOR
        for i in range(3):
            for j in range(3):
                fisher[i, j] += t[nu, i + 1]*t[nu, j + 1]/prob
    return fisher, FISHER_OK


@numba.njit(cache=False, nogil=True)
def _fisher_error_kernel(t, s, p_floor, cond_max):
    """
    Delta = Tr(F^-1) at one state. The Frobenius condition number bounds the 2-norm one from above.

    Returns: Delta (nan on failure) and status flag
    """
    fisher, status = _fisher_matrix_kernel(t, s, p_floor)
    if status != FISHER_OK:
        return np.nan, status
    inv, det = _inverse_3x3(fisher)
    if det <= 0.0:
        return np.nan, FISHER_SINGULAR
    cond = np.sqrt(np.sum(fisher*fisher))*np.sqrt(np.sum(inv*inv))
    if not cond < cond_max:
        return np.nan, FISHER_SINGULAR
    return inv[0, 0] + inv[1, 1] + inv[2, 2], FISHER_OK


@numba.njit(cache=False, nogil=True)
def _fisher_error_batch(t, states, p_floor, cond_max):
    """
    Delta over many states, states is an (n, 4) array of Bloch 4-vectors
    """
    n_states = states.shape[0]
    deltas = np.empty(n_states)
    status = np.zeros(n_states, dtype=np.int64)
    for i in range(n_states):
        delta, flag = _fisher_error_kernel(t, states[i], p_floor, cond_max)
        deltas[i] = delta
        status[i] = flag
    return deltas, status
