import numpy as np

from sictomo.circuit import CircuitParams, povm_from_params, analytic_simplified_povm
from sictomo.fisher import QuadratureSpec, qttf
from sictomo.tomo import measurement_matrix
from sictomo._utils._constants import twopi
from sictomo._utils._dask_graph_tools import _dask_general_compute
from sictomo._utils._errors import SictomoError, NumericalError, ParameterError
from sictomo._utils._logger._sictomo_logger import _get_sictomo_logger
from sictomo._utils._param_utils._check_parms import _check_parms, _parm_check_passed

NM_CONVERGED = 'converged'
NM_MAX_EVALS = 'max_evals'

_max_start_draws = 10


class NmOptions:
    """
    Settings of the Nelder-Mead simplex search

    :param max_evals: Maximum number of objective evaluations, defaults to 5000
    :type max_evals: int, optional
    :param x_tol: Stop when every vertex is within x_tol of the best one in every coordinate, defaults to 1e-8
    :type x_tol: float, optional
    :param f_tol: ... and every vertex value is within f_tol of the best value, defaults to 1e-10
    :type f_tol: float, optional
    :param rho: Reflection coefficient, > 0, defaults to 1
    :type rho: float, optional
    :param chi: Expansion coefficient, > 1, defaults to 2
    :type chi: float, optional
    :param gamma: Contraction coefficient, in (0, 1), defaults to 0.5
    :type gamma: float, optional
    :param sigma: Shrink coefficient, in (0, 1), defaults to 0.5
    :type sigma: float, optional
    :param init_simplex_scale: Edge length of the initial simplex along each axis, defaults to 0.5
    :type init_simplex_scale: float, optional
    :param stagnation: Iterations without improvement of the best value before the simplex is rebuilt around the
                       incumbent, defaults to 50
    :type stagnation: int, optional
    """

    def __init__(self, max_evals=5000, x_tol=1e-8, f_tol=1e-10, rho=1.0, chi=2.0, gamma=0.5, sigma=0.5,
                 init_simplex_scale=0.5, stagnation=50):
        fname = 'NmOptions'
        parms = {'max_evals': max_evals, 'x_tol': x_tol, 'f_tol': f_tol, 'rho': rho, 'chi': chi, 'gamma': gamma,
                 'sigma': sigma, 'init_simplex_scale': init_simplex_scale, 'stagnation': stagnation}
        parms_passed = _check_parms(fname, parms, 'max_evals', [int], acceptable_range=[1, np.inf])
        parms_passed = parms_passed and _check_parms(fname, parms, 'x_tol', [float], acceptable_range=[0, np.inf])
        parms_passed = parms_passed and _check_parms(fname, parms, 'f_tol', [float], acceptable_range=[0, np.inf])
        parms_passed = parms_passed and _check_parms(fname, parms, 'rho', [float], acceptable_range=[0, np.inf])
        parms_passed = parms_passed and _check_parms(fname, parms, 'chi', [float], acceptable_range=[1, np.inf])
        parms_passed = parms_passed and _check_parms(fname, parms, 'gamma', [float], acceptable_range=[0, 1])
        parms_passed = parms_passed and _check_parms(fname, parms, 'sigma', [float], acceptable_range=[0, 1])
        parms_passed = parms_passed and _check_parms(fname, parms, 'init_simplex_scale', [float],
                                                     acceptable_range=[0, np.inf])
        parms_passed = parms_passed and _check_parms(fname, parms, 'stagnation', [int], acceptable_range=[1, np.inf])
        # open ends of the admissible ranges
        parms_passed = parms_passed and parms['rho'] > 0 and parms['chi'] > 1 and 0 < parms['gamma'] < 1 and \
            0 < parms['sigma'] < 1 and parms['init_simplex_scale'] > 0
        _parm_check_passed(fname, parms_passed)

        self.max_evals = int(parms['max_evals'])
        self.x_tol = float(parms['x_tol'])
        self.f_tol = float(parms['f_tol'])
        self.rho = float(parms['rho'])
        self.chi = float(parms['chi'])
        self.gamma = float(parms['gamma'])
        self.sigma = float(parms['sigma'])
        self.init_simplex_scale = float(parms['init_simplex_scale'])
        self.stagnation = int(parms['stagnation'])

    @classmethod
    def from_dict(cls, parms):
        return cls(**parms)

    def to_dict(self):
        return {'max_evals': self.max_evals, 'x_tol': self.x_tol, 'f_tol': self.f_tol, 'rho': self.rho,
                'chi': self.chi, 'gamma': self.gamma, 'sigma': self.sigma,
                'init_simplex_scale': self.init_simplex_scale, 'stagnation': self.stagnation}

    def __repr__(self):
        return f'NmOptions({self.to_dict()})'


class NmResult:
    """
    Outcome of a Nelder-Mead search. Unpacks as (x_star, f_star, evals).
    """

    def __init__(self, x_star, f_star, evals, status, n_reseeds):
        self.x_star = x_star
        self.f_star = f_star
        self.evals = evals
        self.status = status
        self.n_reseeds = n_reseeds

    @property
    def converged(self):
        return self.status == NM_CONVERGED

    def __iter__(self):
        return iter((self.x_star, self.f_star, self.evals))

    def __repr__(self):
        return f'NmResult(f_star={self.f_star:.10g}, evals={self.evals}, status={self.status})'


class _Simplex:
    """
    Vertices and values of the working simplex, kept sorted by value
    """

    def __init__(self, objective, center, f_center, scale):
        n_dim = center.shape[0]
        self.objective = objective
        self.evals = 0
        self.vertices = np.tile(center, (n_dim + 1, 1))
        self.vertices[1:] += scale*np.eye(n_dim)
        self.values = np.empty(n_dim + 1)
        self.values[0] = f_center
        for i_vertex in range(1, n_dim + 1):
            self.values[i_vertex] = self.evaluate(self.vertices[i_vertex])
        self.sort()

    def evaluate(self, point):
        self.evals += 1
        value = float(self.objective(point))
        return value if np.isfinite(value) else np.inf

    def sort(self):
        order = np.argsort(self.values, kind='stable')
        self.vertices = self.vertices[order]
        self.values = self.values[order]

    def spread(self):
        x_spread = np.max(np.abs(self.vertices[1:] - self.vertices[0]))
        f_spread = np.max(np.abs(self.values[1:] - self.values[0]))
        return x_spread, f_spread


def _take_a_step(simplex, opts):
    """
    One Nelder-Mead iteration: reflect the worst vertex through the centroid of the others, then expand, contract or
    shrink the simplex towards the best vertex.
    """
    worst = simplex.vertices[-1]
    centroid = np.mean(simplex.vertices[:-1], axis=0)

    x_refl = centroid + opts.rho*(centroid - worst)
    f_refl = simplex.evaluate(x_refl)

    if f_refl < simplex.values[0]:
        x_exp = centroid + opts.rho*opts.chi*(centroid - worst)
        f_exp = simplex.evaluate(x_exp)
        if f_exp < f_refl:
            simplex.vertices[-1], simplex.values[-1] = x_exp, f_exp
        else:
            simplex.vertices[-1], simplex.values[-1] = x_refl, f_refl

    elif f_refl < simplex.values[-2]:
        simplex.vertices[-1], simplex.values[-1] = x_refl, f_refl

    else:
        if f_refl < simplex.values[-1]:
            x_con = centroid + opts.gamma*opts.rho*(centroid - worst)
            f_con = simplex.evaluate(x_con)
            accepted = f_con <= f_refl
        else:
            x_con = centroid - opts.gamma*(centroid - worst)
            f_con = simplex.evaluate(x_con)
            accepted = f_con < simplex.values[-1]

        if accepted:
            simplex.vertices[-1], simplex.values[-1] = x_con, f_con
        else:
            best = simplex.vertices[0]
            for i_vertex in range(1, simplex.vertices.shape[0]):
                simplex.vertices[i_vertex] = best + opts.sigma*(simplex.vertices[i_vertex] - best)
                simplex.values[i_vertex] = simplex.evaluate(simplex.vertices[i_vertex])
    simplex.sort()


def nelder_mead(objective, x0, opts=None):
    """
    Minimizes a function of n reals with the Nelder-Mead simplex method

    When the best value has not improved for ``opts.stagnation`` iterations the simplex is rebuilt around the best
    vertex, with an edge length halved at every rebuild.

    :param objective: Function of a 1D float array returning a float, non-finite values are treated as +inf
    :type objective: callable
    :param x0: Starting point
    :type x0: numpy.ndarray
    :param opts: Search settings, defaults to NmOptions()
    :type opts: NmOptions, optional

    :return: Best point, its value, the number of evaluations and a status, either converged or max_evals
    :rtype: NmResult
    """
    logger = _get_sictomo_logger()
    if opts is None:
        opts = NmOptions()

    x0 = np.array(x0, dtype=float).ravel()
    f0 = float(objective(x0))
    if not np.isfinite(f0):
        msg = f'[nelder_mead]: Objective is not finite at the starting point, got {f0}'
        logger.error(msg)
        raise NumericalError(msg)

    scale = opts.init_simplex_scale
    simplex = _Simplex(objective, x0, f0, scale)
    evals = 1
    n_reseeds = 0
    best_value = simplex.values[0]
    since_improvement = 0
    status = NM_MAX_EVALS

    while evals + simplex.evals < opts.max_evals:
        x_spread, f_spread = simplex.spread()
        if x_spread <= opts.x_tol and f_spread <= opts.f_tol:
            status = NM_CONVERGED
            break

        _take_a_step(simplex, opts)

        if simplex.values[0] < best_value:
            best_value = simplex.values[0]
            since_improvement = 0
        else:
            since_improvement += 1

        if since_improvement >= opts.stagnation:
            evals += simplex.evals
            scale *= 0.5
            n_reseeds += 1
            logger.debug(f'[nelder_mead]: No improvement in {opts.stagnation} iterations, rebuilding the simplex with '
                         f'edge {scale:.3e}')
            simplex = _Simplex(objective, simplex.vertices[0].copy(), simplex.values[0], scale)
            since_improvement = 0

    evals += simplex.evals
    if status == NM_MAX_EVALS:
        logger.debug(f'[nelder_mead]: Evaluation budget of {opts.max_evals} exhausted, returning the best vertex')
    return NmResult(simplex.vertices[0].copy(), float(simplex.values[0]), evals, status, n_reseeds)


class SicReport:
    """
    Symmetry check of a qubit POVM: traces of the elements and overlaps Tr(Pi_i Pi_j) of Pi = 2 E
    """

    def __init__(self, traces, overlaps, tol):
        self.traces = traces
        self.overlaps = overlaps
        self.tol = tol
        off_diagonal = ~np.eye(4, dtype=bool)
        self.max_trace_dev = float(np.max(np.abs(traces - 0.5)))
        self.max_overlap_dev = float(np.max(np.abs(overlaps[off_diagonal] - 1.0/3.0)))
        self.is_sic = self.max_trace_dev <= tol and self.max_overlap_dev <= tol

    def to_dict(self):
        return {'traces': self.traces, 'overlaps': self.overlaps, 'max_trace_dev': self.max_trace_dev,
                'max_overlap_dev': self.max_overlap_dev, 'tol': self.tol, 'is_sic': self.is_sic}

    def __repr__(self):
        return f'SicReport(is_sic={self.is_sic}, max_trace_dev={self.max_trace_dev:.3e}, ' \
               f'max_overlap_dev={self.max_overlap_dev:.3e})'


def sic_check(povm, tol=1e-10):
    """
    Checks that every element has trace 1/2 and every pair of distinct Pi = 2 E has overlap 1/3
    """
    projectors = [2.0*element for element in povm]
    overlaps = np.empty((4, 4))
    for i_elem in range(4):
        for j_elem in range(4):
            overlaps[i_elem, j_elem] = np.trace(projectors[i_elem] @ projectors[j_elem]).real
    return SicReport(povm.traces(), overlaps, tol)


class OptimizationResult:
    """
    Best circuit parameters over all restarts. Unpacks as (params, value, history).

    Every history entry is a dict with the restart index, start and end vectors, the search value on the coarse
    quadrature, the reported value on the fine quadrature and the Nelder-Mead status.
    """

    def __init__(self, params, value, history):
        self.params = params
        self.value = value
        self.history = history

    def povm(self):
        return _povm_of(self.params)

    def __iter__(self):
        return iter((self.params, self.value, self.history))

    def __repr__(self):
        return f'OptimizationResult(value={self.value:.10g}, restarts={len(self.history)})'


def _povm_of(params):
    if params.simplified:
        return analytic_simplified_povm(params.a1, params.a2)
    return povm_from_params(params)


def qttf_of_params(vector, quadrature):
    """
    qTTF of the circuit with the given parameter vector, 12 reals for the full circuit or 6 for the simplified one
    """
    params = CircuitParams.from_vector(vector)
    return qttf(measurement_matrix(_povm_of(params)), quadrature)


def _qttf_objective(vector, quadrature):
    try:
        return qttf_of_params(vector, quadrature)
    except NumericalError:
        return np.inf


def _restart_chunk(param_dict):
    """
    One optimizer restart, the cell holds the restart index and its start vector
    """
    logger = _get_sictomo_logger()
    index, start = param_dict['this_cell']
    quadrature = param_dict['quadrature']
    final_quadrature = param_dict['final_quadrature']

    def objective(vector):
        return _qttf_objective(vector, quadrature)

    entry = {'restart': index, 'start': start, 'end': None, 'value': np.inf, 'final_value': np.inf, 'evals': 0,
             'status': 'failed'}

    # starts on a singular measurement are redrawn from a stream derived from the restart index
    rng = np.random.default_rng([param_dict['seed'], index])
    for _ in range(_max_start_draws):
        if np.isfinite(objective(start)):
            break
        start = rng.uniform(0.0, twopi, size=start.shape[0])
    entry['start'] = start

    try:
        result = nelder_mead(objective, start, param_dict['opts'])
        entry.update({'end': result.x_star, 'value': result.f_star, 'evals': result.evals,
                      'status': result.status})
        entry['final_value'] = qttf_of_params(result.x_star, final_quadrature)
    except SictomoError as err:
        logger.warning(f'[optimize_circuit]: Restart {index} failed: {err}')

    logger.debug(f"[optimize_circuit]: Restart {index} ended at qTTF {entry['final_value']:.8g}")
    return entry


def _optimize(caller, n_params, restarts, seed, quadrature, opts, final_quadrature, starts, parallel):
    logger = _get_sictomo_logger()
    parms = {'restarts': restarts, 'seed': seed}
    parms_passed = _check_parms(caller, parms, 'restarts', [int], acceptable_range=[1, np.inf])
    parms_passed = parms_passed and _check_parms(caller, parms, 'seed', [int], acceptable_range=[0, np.inf])
    _parm_check_passed(caller, parms_passed)

    if quadrature is None:
        quadrature = QuadratureSpec(16, 16)
    if final_quadrature is None:
        final_quadrature = QuadratureSpec(64, 64)
    if opts is None:
        opts = NmOptions()

    rng = np.random.default_rng(seed)
    drawn = rng.uniform(0.0, twopi, size=(restarts, n_params))
    if starts is not None:
        starts = [np.asarray(start, dtype=float).ravel() for start in starts]
        if any(start.shape[0] != n_params for start in starts):
            msg = f'[{caller}]: Start vectors must have {n_params} entries'
            logger.error(msg)
            raise ParameterError(msg)
        # explicit starts take the first restart slots
        drawn[:min(len(starts), restarts)] = starts[:restarts]

    cells = [(index, drawn[index]) for index in range(restarts)]
    param_dict = {'quadrature': quadrature, 'final_quadrature': final_quadrature, 'opts': opts, 'seed': seed}
    history = _dask_general_compute(caller, cells, _restart_chunk, param_dict, parallel=parallel)

    finished = [entry for entry in history if entry['end'] is not None and np.isfinite(entry['final_value'])]
    if len(finished) == 0:
        msg = f'[{caller}]: Every restart failed'
        logger.error(msg)
        raise NumericalError(msg)

    # ties resolve to the lowest restart index
    best = min(finished, key=lambda entry: (entry['final_value'], entry['restart']))
    logger.info(f"[{caller}]: Best qTTF {best['final_value']:.10g} from restart {best['restart']} of {restarts}")
    return OptimizationResult(CircuitParams.from_vector(best['end']), best['final_value'], history)


def optimize_circuit(restarts=20, seed=0, quadrature=None, opts=None, final_quadrature=None, starts=None,
                     parallel=False):
    """
    Minimizes the qTTF over the 12 gate angles of the full circuit with random restarts

    :param restarts: Number of Nelder-Mead runs, defaults to 20
    :type restarts: int, optional
    :param seed: Seed of the start point generator, defaults to 0
    :type seed: int, optional
    :param quadrature: Quadrature used during the search, defaults to 16x16 Gauss-Legendre
    :type quadrature: QuadratureSpec, optional
    :param opts: Nelder-Mead settings, defaults to NmOptions()
    :type opts: NmOptions, optional
    :param final_quadrature: Quadrature used to report the value of every restart, defaults to 64x64 Gauss-Legendre
    :type final_quadrature: QuadratureSpec, optional
    :param starts: Explicit start vectors used for the first restarts, the rest are drawn uniformly in [0, 2 pi)
    :type starts: list, optional
    :param parallel: Run restarts as dask tasks, defaults to False
    :type parallel: bool, optional

    :return: Best parameters, their qTTF on the final quadrature and the per restart history
    :rtype: OptimizationResult

    .. _Description:

    Start points are drawn once from ``numpy.random.default_rng(seed)`` in restart order, so results do not depend on
    whether restarts run in parallel.
    """
    return _optimize('optimize_circuit', 12, restarts, seed, quadrature, opts, final_quadrature, starts, parallel)


def optimize_simplified(restarts=20, seed=0, quadrature=None, opts=None, final_quadrature=None, starts=None,
                        parallel=False):
    """
    Same search as optimize_circuit over the 6 gate angles of the simplified circuit, through its closed form POVM
    """
    return _optimize('optimize_simplified', 6, restarts, seed, quadrature, opts, final_quadrature, starts, parallel)
