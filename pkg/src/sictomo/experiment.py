"""Shot noise experiments: multinomial sampling of the measurement outcomes, state estimation with linear inversion
and R rho R, and aggregation of the estimates over repetitions.
"""
import numbers

import numpy as np

from sictomo.circuit import CircuitParams, OPTIMAL_PARAMS, OPTIMAL_SIMPLIFIED_PARAMS, canonical_sic_povm, \
    povm_from_params
from sictomo.qcore import BlochVec, StateAngles, bloch_from_angles, bloch_to_density, density_to_bloch, \
    pure_state_from_angles, purity, fidelity, dominant_eigenstate
from sictomo.tomo import RprOptions, CountVector, measurement_matrix, probabilities, li_estimate, rpr_estimate
from sictomo._utils._constants import circuit_kinds, estimator_kinds, prng_name, csv_columns, halfpi, pi, \
    trace_tol
from sictomo._utils._dask_graph_tools import _dask_general_compute
from sictomo._utils._dio import _read_json, _write_json, _write_csv
from sictomo._utils._errors import ParameterError, NumericalError, DegenerateSpectrumError
from sictomo._utils._logger._sictomo_logger import _get_sictomo_logger
from sictomo._utils._param_utils._check_parms import _check_parms, _parm_check_passed
from sictomo._utils._tools import _print_summary_table, _sictomo_version

_suite = (
    ('z0', StateAngles(0.0, 0.0)),
    ('z1', StateAngles(halfpi, 0.0)),
    ('x0', StateAngles(halfpi/2, 0.0)),
    ('x1', StateAngles(halfpi/2, halfpi)),
    ('y0', StateAngles(halfpi/2, 3*pi/4)),
    ('y1', StateAngles(halfpi/2, pi/4)),
)

_config_keys = ('circuit', 'theta', 'states', 'shots', 'repetitions', 'estimator', 'project_pure', 'seed', 'rpr')


def pauli_eigenstate_suite():
    """
    The six Pauli eigenstates |0>, |1>, |+>, |->, |+i>, |-i> as (label, StateAngles) pairs, labelled z0, z1, x0, x1,
    y0, y1
    """
    return list(_suite)


class ExperimentConfig:
    """
    Settings of a shot noise experiment

    :param circuit: Measurement, one of 'full', 'simplified' or 'canonical-sic', defaults to 'canonical-sic'
    :type circuit: str, optional
    :param theta: Gate angles for the full or simplified circuit, defaults to the tetrahedral optimum
    :type theta: CircuitParams or list, optional
    :param states: Input states as suite labels, (alpha_1, alpha_2) pairs or {label, alpha1, alpha2} dicts, defaults
                   to the six Pauli eigenstates
    :type states: list, optional
    :param shots: Shots per repetition, defaults to 1024
    :type shots: int, optional
    :param repetitions: Repetitions per state, defaults to 5
    :type repetitions: int, optional
    :param estimator: 'li', 'rpr' or 'both', defaults to 'both'
    :type estimator: str, optional
    :param project_pure: Also report the dominant eigenstate of every estimate, defaults to False
    :type project_pure: bool, optional
    :param seed: Root seed of the per cell random streams, defaults to 0
    :type seed: int, optional
    :param rpr: Keyword arguments of RprOptions, defaults to the RprOptions defaults
    :type rpr: dict, optional
    """

    def __init__(self, circuit='canonical-sic', theta=None, states=None, shots=1024, repetitions=5, estimator='both',
                 project_pure=False, seed=0, rpr=None):
        fname = 'ExperimentConfig'
        parms = {'circuit': circuit, 'shots': shots, 'repetitions': repetitions, 'estimator': estimator,
                 'project_pure': project_pure, 'seed': seed}
        parms_passed = _check_parms(fname, parms, 'circuit', [str], acceptable_data=circuit_kinds)
        parms_passed = parms_passed and _check_parms(fname, parms, 'shots', [int], acceptable_range=[1, np.inf])
        parms_passed = parms_passed and _check_parms(fname, parms, 'repetitions', [int],
                                                     acceptable_range=[1, np.inf])
        parms_passed = parms_passed and _check_parms(fname, parms, 'estimator', [str], acceptable_data=estimator_kinds)
        parms_passed = parms_passed and _check_parms(fname, parms, 'project_pure', [bool])
        parms_passed = parms_passed and _check_parms(fname, parms, 'seed', [int], acceptable_range=[0, np.inf])
        _parm_check_passed(fname, parms_passed)

        self.circuit = parms['circuit']
        self.shots = int(parms['shots'])
        self.repetitions = int(parms['repetitions'])
        self.estimator = parms['estimator']
        self.project_pure = bool(parms['project_pure'])
        self.seed = int(parms['seed'])
        self.rpr = RprOptions(**(rpr or {}))
        self.theta = _resolve_theta(self.circuit, theta)
        self.states = _resolve_states(states)

    @property
    def estimators(self):
        if self.estimator == 'both':
            return ['li', 'rpr']
        return [self.estimator]

    @classmethod
    def from_dict(cls, parms):
        logger = _get_sictomo_logger()
        unknown = sorted(set(parms) - set(_config_keys))
        if len(unknown) > 0:
            msg = f'[ExperimentConfig]: Unknown configuration keys {unknown}'
            logger.error(msg)
            raise ParameterError(msg)
        return cls(**parms)

    @classmethod
    def from_json(cls, file):
        content = _read_json(file)
        if not isinstance(content, dict):
            logger = _get_sictomo_logger()
            msg = f'[ExperimentConfig]: {file} must hold a JSON object'
            logger.error(msg)
            raise ParameterError(msg)
        return cls.from_dict(content)

    def to_dict(self):
        theta = None
        if self.theta is not None:
            theta = [{'theta': gate.theta, 'phi': gate.phi, 'lambda': gate.lam} for gate in self.theta.gates]
        return {
            'circuit': self.circuit,
            'theta': theta,
            'states': [{'label': label, 'alpha1': angles.alpha1, 'alpha2': angles.alpha2}
                       for label, angles in self.states],
            'shots': self.shots,
            'repetitions': self.repetitions,
            'estimator': self.estimator,
            'project_pure': self.project_pure,
            'seed': self.seed,
            'rpr': {'max_iter': self.rpr.max_iter, 'tol': self.rpr.tol, 'p_floor': self.rpr.p_floor},
        }

    def povm(self):
        if self.circuit == 'canonical-sic':
            return canonical_sic_povm()
        return povm_from_params(self.theta)

    def __repr__(self):
        return f'ExperimentConfig({self.circuit}, {len(self.states)} states, shots={self.shots}, ' \
               f'repetitions={self.repetitions}, estimator={self.estimator}, seed={self.seed})'


def _resolve_theta(circuit, theta):
    logger = _get_sictomo_logger()
    if circuit == 'canonical-sic':
        if theta is not None:
            logger.warning('[ExperimentConfig]: theta is ignored for the canonical SIC measurement')
        return None

    if theta is None:
        return OPTIMAL_SIMPLIFIED_PARAMS if circuit == 'simplified' else OPTIMAL_PARAMS
    if not isinstance(theta, CircuitParams):
        try:
            gates = [(gate['theta'], gate['phi'], gate['lambda']) if isinstance(gate, dict) else tuple(gate)
                     for gate in theta]
        except (KeyError, TypeError):
            msg = '[ExperimentConfig]: theta must be a list of {theta, phi, lambda} objects or angle triples'
            logger.error(msg)
            raise ParameterError(msg)
        theta = CircuitParams(*gates, simplified=(len(gates) == 2))

    if theta.simplified != (circuit == 'simplified'):
        msg = f'[ExperimentConfig]: The {circuit} circuit needs {2 if circuit == "simplified" else 4} gates'
        logger.error(msg)
        raise ParameterError(msg)
    return theta


def _resolve_states(states):
    logger = _get_sictomo_logger()
    if states is None:
        return pauli_eigenstate_suite()

    suite = dict(_suite)
    resolved = []
    for i_state, state in enumerate(states):
        try:
            if isinstance(state, str):
                resolved.append((state, suite[state]))
            elif isinstance(state, StateAngles):
                resolved.append((f'state{i_state}', state))
            elif isinstance(state, dict):
                resolved.append((state.get('label', f'state{i_state}'),
                                 StateAngles(state['alpha1'], state['alpha2'])))
            else:
                resolved.append((f'state{i_state}', StateAngles(*state)))
        except (KeyError, TypeError, ValueError) as err:
            msg = f'[ExperimentConfig]: Cannot interpret state {state!r}: {err}'
            logger.error(msg)
            raise ParameterError(msg)
    if len(resolved) == 0:
        msg = '[ExperimentConfig]: At least one state is needed'
        logger.error(msg)
        raise ParameterError(msg)
    return resolved


def sample_counts(p, shots, seed):
    """
    Draws multinomial outcome counts by inverse CDF sampling

    :param p: Outcome probabilities, non-negative and summing to 1
    :type p: numpy.ndarray
    :param shots: Number of shots
    :type shots: int
    :param seed: Seed, or a numpy SeedSequence, of the PCG64 generator
    :type seed: int

    :return: Counts summing to shots
    :rtype: CountVector
    """
    logger = _get_sictomo_logger()
    p = np.asarray(p, dtype=float)
    if p.shape != (4,) or np.any(p < -1e-12) or abs(p.sum() - 1.0) > trace_tol:
        msg = f'[sample_counts]: Not a probability distribution over four outcomes: {p.tolist()}'
        logger.error(msg)
        raise ParameterError(msg)
    if not isinstance(shots, numbers.Integral) or shots < 1:
        msg = f'[sample_counts]: shots must be a positive integer, got {shots}'
        logger.error(msg)
        raise ParameterError(msg)

    rng = np.random.Generator(np.random.PCG64(seed))
    cdf = np.cumsum(np.clip(p, 0.0, None))
    cdf[-1] = 1.0
    outcomes = np.searchsorted(cdf, rng.random(shots), side='right')
    return CountVector(np.bincount(outcomes, minlength=4))


def mixed_state_counts(t, states, weights, shots, seed):
    """
    Counts of a convex combination sum_i w_i rho_i of states measured with T, used to study low purity inputs
    """
    weights = np.asarray(weights, dtype=float)
    if weights.shape[0] != len(states) or np.any(weights < 0) or abs(weights.sum() - 1.0) > trace_tol:
        logger = _get_sictomo_logger()
        msg = '[mixed_state_counts]: weights must be non-negative, sum to 1 and match the states'
        logger.error(msg)
        raise ParameterError(msg)
    p = sum(weight*probabilities(t, state) for weight, state in zip(weights, states))
    return sample_counts(p/np.sum(p), shots, seed)


def _cell_seed(seed, state_index, repetition):
    return np.random.SeedSequence([seed, state_index, repetition])


def _estimate_metrics(caller, estimate, rho_true):
    rho = bloch_to_density(estimate)
    est_purity = purity(rho)
    if estimate.is_physical():
        est_fidelity = fidelity(rho_true, rho)
    else:
        logger = _get_sictomo_logger()
        logger.warning(f'[{caller}]: Estimate {estimate!r} lies outside the Bloch ball, fidelity is undefined')
        est_fidelity = np.nan
    return est_purity, est_fidelity


def _experiment_chunk(param_dict):
    """
    One (state, repetition) cell: sample, estimate with every requested estimator and compute the metrics
    """
    logger = _get_sictomo_logger()
    state_index, repetition = param_dict['this_cell']
    label, angles = param_dict['states'][state_index]
    t = param_dict['t']

    rho_true = pure_state_from_angles(angles)
    p = probabilities(t, bloch_from_angles(angles))
    counts = sample_counts(p/np.sum(p), param_dict['shots'], _cell_seed(param_dict['seed'], state_index, repetition))
    p_hat = counts.frequencies()

    rows = []
    failures = []
    for name in param_dict['estimators']:
        try:
            if name == 'li':
                estimate = li_estimate(t, p_hat)
            else:
                estimate = rpr_estimate(t, p_hat, param_dict['rpr'])
        except NumericalError as err:
            logger.warning(f'[run_experiment]: {name} failed on {label} repetition {repetition}: {err}')
            failures.append({'state': label, 'rep': repetition, 'estimator': name, 'error': str(err)})
            continue

        found = [(name, estimate)]
        if param_dict['project_pure']:
            try:
                projected = density_to_bloch(dominant_eigenstate(bloch_to_density(estimate)))
            except DegenerateSpectrumError:
                logger.warning(f'[run_experiment]: No dominant eigenstate for {label} repetition {repetition}, '
                               f'keeping the {name} estimate')
                projected = estimate
            found.append((f'{name}_pure', projected))

        for row_name, bloch in found:
            est_purity, est_fidelity = _estimate_metrics('run_experiment', bloch, rho_true)
            rows.append({'state': label, 'rep': repetition, 'estimator': row_name, 'sx': float(bloch.vector[0]),
                         'sy': float(bloch.vector[1]), 'sz': float(bloch.vector[2]), 'purity': est_purity,
                         'fidelity': est_fidelity})

    return {'state_index': state_index, 'rep': repetition, 'counts': counts, 'rows': rows, 'failures': failures}


class ExperimentRecord:
    """
    Everything measured on one input state: counts per repetition and the per repetition estimates of every
    estimator, with their purity and fidelity to the true state.
    """

    def __init__(self, label, angles, repetitions):
        self.label = label
        self.angles = angles
        self.true_bloch = bloch_from_angles(angles)
        self.counts = [None]*repetitions
        self.rows = []
        self.failures = []

    @property
    def estimators(self):
        names = []
        for row in self.rows:
            if row['estimator'] not in names:
                names.append(row['estimator'])
        return names

    def estimates(self, estimator):
        """
        Bloch vectors of one estimator in repetition order
        """
        return [BlochVec(row['sx'], row['sy'], row['sz']) for row in self.rows if row['estimator'] == estimator]

    def summary(self):
        summary = []
        for estimator in self.estimators:
            rows = [row for row in self.rows if row['estimator'] == estimator]
            comps = np.array([[row['sx'], row['sy'], row['sz']] for row in rows])
            n_rows = comps.shape[0]
            std = np.std(comps, axis=0, ddof=1) if n_rows > 1 else np.full(3, np.nan)
            fidelities = np.array([row['fidelity'] for row in rows], dtype=float)
            summary.append({
                'state': self.label,
                'estimator': estimator,
                'n': n_rows,
                'true': self.true_bloch.vector.copy(),
                'mean': np.mean(comps, axis=0),
                'std': std,
                'std_of_mean': std/np.sqrt(n_rows),
                'mean_purity': float(np.mean([row['purity'] for row in rows])),
                'mean_fidelity': float(np.nanmean(fidelities)) if np.any(np.isfinite(fidelities)) else np.nan,
            })
        return summary

    def __repr__(self):
        return f'ExperimentRecord({self.label}, {len(self.rows)} estimates, {len(self.failures)} failures)'


def run_experiment(config, parallel=False):
    """
    Runs the shot noise experiment described by a configuration

    :param config: Experiment settings, a dict is turned into an ExperimentConfig
    :type config: ExperimentConfig or dict
    :param parallel: Run the (state, repetition) cells as dask tasks, defaults to False
    :type parallel: bool, optional

    :return: One record per state, in configuration order
    :rtype: list of ExperimentRecord

    .. _Description:

    Every cell draws its counts from its own PCG64 stream seeded with (seed, state index, repetition), so the results
    do not depend on the execution order. An estimator failing on a cell is recorded in the record's failures and the
    run continues.
    """
    logger = _get_sictomo_logger()
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)

    t = measurement_matrix(config.povm())
    logger.info(f'[run_experiment]: {config!r}')

    cells = [(state_index, repetition) for state_index in range(len(config.states))
             for repetition in range(config.repetitions)]
    param_dict = {'t': t, 'states': config.states, 'shots': config.shots, 'seed': config.seed,
                  'estimators': config.estimators, 'rpr': config.rpr, 'project_pure': config.project_pure}
    results = _dask_general_compute('run_experiment', cells, _experiment_chunk, param_dict, parallel=parallel)

    records = [ExperimentRecord(label, angles, config.repetitions) for label, angles in config.states]
    for result in results:
        record = records[result['state_index']]
        record.counts[result['rep']] = result['counts']
        record.rows.extend(result['rows'])
        record.failures.extend(result['failures'])
    return records


def summarize_records(records, print_table=False):
    """
    Mean, sample standard deviation (n - 1 denominator) and standard deviation of the mean of every Bloch component,
    with the mean purity and fidelity, per state and estimator
    """
    summary = [row for record in records for row in record.summary()]
    if print_table:
        _print_summary_table(summary)
    return summary


def results_rows(records):
    """
    One row per (state, repetition, estimator), ordered by the position of the state in the configuration then
    repetition; repeated labels keep their own blocks
    """
    return [row for record in records for row in sorted(record.rows, key=lambda row: row['rep'])]


def write_results_csv(file, records, overwrite=False):
    _write_csv(file, results_rows(records), csv_columns, overwrite=overwrite)


def write_results_json(file, config, records, overwrite=False):
    """
    Results with the configuration echo, the library version and the PRNG algorithm
    """
    content = {
        'sictomo_version': _sictomo_version(),
        'prng': prng_name,
        'config': config.to_dict(),
        'records': [{'state': record.label, 'true': record.true_bloch.vector,
                     'counts': [None if counts is None else counts.n for counts in record.counts],
                     'failures': record.failures} for record in records],
        'rows': results_rows(records),
        'summary': summarize_records(records),
    }
    _write_json(file, content, overwrite=overwrite)
