import os
import csv
import json
import inspect
import numbers

from sictomo._utils._errors import ParameterError
from sictomo._utils._logger._sictomo_logger import _get_sictomo_logger
from sictomo._utils._tools import NumpyEncoder

CALLING_FUNCTION = 1


def _check_if_file_exists(file):
    logger = _get_sictomo_logger()
    caller = inspect.stack()[CALLING_FUNCTION].function

    if os.path.exists(file) is False:
        logger.error(f'[{caller}]: File {file} does not exists.')
        raise FileNotFoundError(file)


def _check_if_file_will_be_overwritten(file, overwrite):
    logger = _get_sictomo_logger()
    caller = inspect.stack()[CALLING_FUNCTION].function

    if (os.path.exists(file) is True) and (overwrite is False):
        logger.error(f'[{caller}]: {file} already exists. To overwite set overwrite to True, or remove current file.')
        raise FileExistsError("{file} exists.".format(file=file))

    elif (os.path.exists(file) is True) and (overwrite is True):
        logger.warning(f'[{caller}]: {file} will be overwritten.')


def _read_json(file):
    _check_if_file_exists(file)
    with open(file, 'r') as json_file:
        try:
            return json.load(json_file)
        except json.JSONDecodeError as err:
            logger = _get_sictomo_logger()
            msg = f'[_read_json]: {file} is not valid JSON: {err}'
            logger.error(msg)
            raise ParameterError(msg)


def _write_json(file, data, overwrite=True):
    _check_if_file_will_be_overwritten(file, overwrite)
    with open(file, 'w') as json_file:
        json.dump(data, json_file, cls=NumpyEncoder, indent=2, sort_keys=False)
        json_file.write('\n')


def _write_csv(file, rows, columns, overwrite=True):
    """
    Writes rows of dictionaries as a CSV file with a fixed column order
    Args:
        file: Output file name
        rows: list of dictionaries keyed by column name
        columns: Column order
        overwrite: Overwrite previous file of same name?
    """
    _check_if_file_will_be_overwritten(file, overwrite)
    with open(file, 'w', newline='') as csv_file:
        writer = csv.DictWriter(csv_file, fieldnames=columns, lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({key: row[key] for key in columns})


def _read_theta_file(file):
    """
    Reads gate angles from a JSON array of {theta, phi, lambda} objects
    Args:
        file: Theta file name

    Returns: list of (theta, phi, lambda) tuples, 4 for the full circuit, 2 for the simplified one
    """
    logger = _get_sictomo_logger()
    content = _read_json(file)
    if not isinstance(content, list) or len(content) not in (2, 4):
        msg = f'[_read_theta_file]: {file} must hold a list of 2 or 4 gate angle objects'
        logger.error(msg)
        raise ParameterError(msg)

    gates = []
    for gate in content:
        try:
            angles = (gate['theta'], gate['phi'], gate['lambda'])
        except (KeyError, TypeError):
            msg = f'[_read_theta_file]: every gate in {file} needs theta, phi and lambda keys'
            logger.error(msg)
            raise ParameterError(msg)
        if not all(isinstance(angle, numbers.Real) and not isinstance(angle, bool) for angle in angles):
            msg = f'[_read_theta_file]: gate angles in {file} must be real numbers'
            logger.error(msg)
            raise ParameterError(msg)
        gates.append(tuple(float(angle) for angle in angles))
    return gates


def _write_theta_file(file, gates, overwrite=True):
    content = [{'theta': gate[0], 'phi': gate[1], 'lambda': gate[2]} for gate in gates]
    _write_json(file, content, overwrite=overwrite)


def _read_counts_file(file):
    """
    Reads outcome counts from a JSON object {"counts": [n00, n01, n10, n11]}
    """
    logger = _get_sictomo_logger()
    content = _read_json(file)
    counts = content.get('counts') if isinstance(content, dict) else None
    if not isinstance(counts, list) or len(counts) != 4 or \
            not all(isinstance(n, numbers.Integral) and not isinstance(n, bool) and n >= 0 for n in counts):
        msg = f'[_read_counts_file]: {file} must hold {{"counts": [n00, n01, n10, n11]}} with non-negative integers'
        logger.error(msg)
        raise ParameterError(msg)
    return [int(n) for n in counts]
