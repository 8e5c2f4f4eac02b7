import os
import sys
import json

import click

from sictomo.circuit import CircuitParams, OPTIMAL_PARAMS, OPTIMAL_SIMPLIFIED_PARAMS, canonical_sic_povm, \
    povm_from_params
from sictomo.experiment import ExperimentConfig, run_experiment, summarize_records, write_results_csv, \
    write_results_json
from sictomo.fisher import QuadratureSpec, qttf
from sictomo.optim import NmOptions, optimize_circuit, optimize_simplified, sic_check
from sictomo.qcore import bloch_to_density, purity
from sictomo.tomo import CountVector, RprOptions, measurement_matrix, li_estimate, rpr_result
from sictomo._utils._constants import circuit_kinds, estimator_kinds
from sictomo._utils._dio import _read_json, _read_counts_file, _write_json, _check_if_file_will_be_overwritten
from sictomo._utils._errors import SictomoError, NumericalError
from sictomo._utils._logger._sictomo_logger import _setup_sictomo_logger
from sictomo._utils._param_utils._check_logger_parms import _check_logger_parms
from sictomo._utils._param_utils._check_parms import _parm_check_passed
from sictomo._utils._tools import NumpyEncoder, _parse_quadrature

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


def _emit(payload, output=None, overwrite=False):
    """
    Writes a JSON result to a file, or to standard output as one line
    """
    if output is None:
        click.echo(json.dumps(payload, cls=NumpyEncoder))
    else:
        _write_json(output, payload, overwrite=overwrite)


def _quadrature(quad_string, rule='gauss-legendre'):
    n_alpha1, n_alpha2 = _parse_quadrature('cli', quad_string)
    return QuadratureSpec(n_alpha1, n_alpha2, rule=rule)


def _measurement(circuit, theta):
    """
    POVM selected by --circuit and --theta; a theta file decides between the full and simplified circuit by its gate
    count
    """
    if theta is not None:
        params = CircuitParams.from_file(theta)
        kind = 'simplified' if params.simplified else 'full'
        if circuit is not None and circuit != kind:
            raise click.UsageError(f'--theta holds a {kind} circuit but --circuit is {circuit}')
        return povm_from_params(params), params

    if circuit is None or circuit == 'canonical-sic':
        return canonical_sic_povm(), None
    params = OPTIMAL_SIMPLIFIED_PARAMS if circuit == 'simplified' else OPTIMAL_PARAMS
    return povm_from_params(params), params


def _theta_payload(params):
    if params is None:
        return None
    return [{'theta': gate.theta, 'phi': gate.phi, 'lambda': gate.lam} for gate in params.gates]


_circuit_option = click.option('--circuit', type=click.Choice(circuit_kinds), default=None,
                               help='Measurement circuit, canonical-sic when neither --circuit nor --theta is given')
_theta_option = click.option('--theta', type=click.Path(), default=None,
                             help='JSON file with 4 (full) or 2 (simplified) {theta, phi, lambda} objects')
_output_option = click.option('--output', type=click.Path(), default=None,
                              help='Write the JSON result to this file instead of standard output')
_overwrite_option = click.option('--overwrite', is_flag=True, default=False, help='Overwrite existing output files')


@click.group()
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR']), default='WARNING',
              help='Logging level, log messages go to standard error')
def cli(log_level):
    """Qubit tomography with SIC measurement circuits."""
    log_parms = {'log_level': log_level}
    _parm_check_passed('cli', _check_logger_parms(log_parms))
    _setup_sictomo_logger(term_max_level='ERROR', **log_parms)


@cli.command()
@click.option('--restarts', type=int, default=20, show_default=True, help='Number of Nelder-Mead restarts')
@click.option('--seed', type=int, default=0, show_default=True, help='Seed of the start point generator')
@click.option('--quadrature', default='16x16', show_default=True, help='Search quadrature as NxM')
@click.option('--final-quadrature', default='64x64', show_default=True, help='Reporting quadrature as NxM')
@click.option('--max-evals', type=int, default=5000, show_default=True, help='Evaluations per restart')
@click.option('--circuit', type=click.Choice(['full', 'simplified']), default='full', show_default=True)
@click.option('--parallel', is_flag=True, default=False, help='Run restarts as dask tasks')
@_output_option
@_overwrite_option
def optimize(restarts, seed, quadrature, final_quadrature, max_evals, circuit, parallel, output, overwrite):
    """Search the circuit parameters that minimize the qTTF."""
    if output is not None:
        _check_if_file_will_be_overwritten(output, overwrite)
    search = optimize_simplified if circuit == 'simplified' else optimize_circuit
    result = search(restarts=restarts, seed=seed, quadrature=_quadrature(quadrature),
                    opts=NmOptions(max_evals=max_evals), final_quadrature=_quadrature(final_quadrature),
                    parallel=parallel)
    report = sic_check(result.povm(), tol=1e-4)
    _emit({'circuit': circuit, 'theta': _theta_payload(result.params), 'qttf': result.value, 'seed': seed,
           'restarts': [{'restart': entry['restart'], 'value': entry['final_value'], 'status': entry['status']}
                        for entry in result.history],
           'is_sic': report.is_sic}, output, overwrite=True)


@cli.command(name='qttf')
@_circuit_option
@_theta_option
@click.option('--quadrature', default='64x64', show_default=True, help='Quadrature as NxM')
@click.option('--rule', type=click.Choice(['gauss-legendre', 'midpoint']), default='gauss-legendre',
              show_default=True)
@_output_option
@_overwrite_option
def qttf_command(circuit, theta, quadrature, rule, output, overwrite):
    """Evaluate the qTTF of a measurement."""
    povm, params = _measurement(circuit, theta)
    quad = _quadrature(quadrature, rule=rule)
    value = qttf(measurement_matrix(povm), quad)
    _emit({'theta': _theta_payload(params), 'quadrature': f'{quad.n_alpha1}x{quad.n_alpha2}', 'rule': rule,
           'qttf': value}, output, overwrite)


@cli.command(name='sic-check')
@_circuit_option
@_theta_option
@click.option('--tol', type=float, default=1e-10, show_default=True, help='Tolerance on traces and overlaps')
@_output_option
@_overwrite_option
def sic_check_command(circuit, theta, tol, output, overwrite):
    """Check whether a measurement is a SIC-POVM."""
    povm, params = _measurement(circuit, theta)
    payload = sic_check(povm, tol).to_dict()
    payload['theta'] = _theta_payload(params)
    _emit(payload, output, overwrite)


@cli.command()
@click.option('--counts', 'counts_file', type=click.Path(), required=True,
              help='JSON file {"counts": [n00, n01, n10, n11]}')
@_circuit_option
@_theta_option
@click.option('--estimator', type=click.Choice(estimator_kinds), default='both', show_default=True)
@_output_option
@_overwrite_option
def estimate(counts_file, circuit, theta, estimator, output, overwrite):
    """Estimate a state from externally measured counts."""
    counts = CountVector(_read_counts_file(counts_file))
    povm, _ = _measurement(circuit, theta)
    t = measurement_matrix(povm)
    names = ['li', 'rpr'] if estimator == 'both' else [estimator]

    payload = {'counts': counts.n, 'shots': counts.shots, 'estimates': {}}
    for name in names:
        entry = {}
        if name == 'li':
            bloch = li_estimate(t, counts.frequencies())
        else:
            result = rpr_result(t, counts.frequencies(), RprOptions())
            bloch = result.bloch
            entry.update({'n_iter': result.n_iter, 'converged': result.converged})
        entry.update({'sx': bloch.vector[0], 'sy': bloch.vector[1], 'sz': bloch.vector[2],
                      'purity': purity(bloch_to_density(bloch)), 'physical': bloch.is_physical()})
        payload['estimates'][name] = entry
    _emit(payload, output, overwrite)


@cli.command()
@click.option('--config', 'config_file', type=click.Path(), default=None, help='JSON experiment configuration')
@_circuit_option
@_theta_option
@click.option('--seed', type=int, default=None, help='Overrides the configuration seed')
@click.option('--shots', type=int, default=None, help='Overrides the shots per repetition')
@click.option('--reps', type=int, default=None, help='Overrides the number of repetitions')
@click.option('--estimator', type=click.Choice(estimator_kinds), default=None, help='Overrides the estimator')
@click.option('--project-pure', is_flag=True, default=False, help='Also report dominant eigenstate projections')
@click.option('--output-dir', type=click.Path(), default='.', show_default=True,
              help='Directory for results.csv and results.json')
@click.option('--parallel', is_flag=True, default=False, help='Run the cells as dask tasks')
@_overwrite_option
def experiment(config_file, circuit, theta, seed, shots, reps, estimator, project_pure, output_dir, parallel,
               overwrite):
    """Run the shot noise experiment and write results.csv and results.json."""
    parms = _read_json(config_file) if config_file is not None else {}
    if not isinstance(parms, dict):
        raise click.UsageError(f'{config_file} must hold a JSON object')

    overrides = {'circuit': circuit, 'seed': seed, 'shots': shots, 'repetitions': reps, 'estimator': estimator}
    parms.update({key: value for key, value in overrides.items() if value is not None})
    if project_pure:
        parms['project_pure'] = True
    if theta is not None:
        params = CircuitParams.from_file(theta)
        parms['theta'] = params
        parms.setdefault('circuit', 'simplified' if params.simplified else 'full')

    config = ExperimentConfig.from_dict(parms)
    csv_file = os.path.join(output_dir, 'results.csv')
    json_file = os.path.join(output_dir, 'results.json')
    for file in (csv_file, json_file):
        _check_if_file_will_be_overwritten(file, overwrite)
    os.makedirs(output_dir, exist_ok=True)

    records = run_experiment(config, parallel=parallel)
    summarize_records(records, print_table=True)
    write_results_csv(csv_file, records, overwrite=True)
    write_results_json(json_file, config, records, overwrite=True)
    _emit({'csv': csv_file, 'json': json_file, 'states': len(records),
           'failures': sum(len(record.failures) for record in records)})


def _report_error(kind, message):
    click.echo(json.dumps({'error': kind, 'message': message}), err=True)


def cli_main(args=None):
    """
    Runs the command line with the given arguments and returns the exit code: 0 on success, 1 on usage or parameter
    errors, 2 on numerical failures. Errors are reported on standard error as one JSON line.
    """
    try:
        cli.main(args=args, prog_name='sictomo', standalone_mode=False)
    except click.exceptions.Abort:
        _report_error('Abort', 'Aborted')
        return EXIT_USAGE
    except click.ClickException as err:
        _report_error('UsageError', err.format_message())
        return EXIT_USAGE
    except NumericalError as err:
        _report_error(type(err).__name__, str(err))
        return EXIT_NUMERICAL
    except (SictomoError, ValueError, OSError) as err:
        _report_error(type(err).__name__, str(err))
        return EXIT_USAGE
    return EXIT_OK


def main():
    sys.exit(cli_main(sys.argv[1:]))
