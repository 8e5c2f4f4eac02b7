import json
import re
from importlib.metadata import version, PackageNotFoundError

import numpy as np

from prettytable import PrettyTable

from sictomo._utils._errors import ParameterError
from sictomo._utils._logger._sictomo_logger import _get_sictomo_logger


class NumpyEncoder(json.JSONEncoder):
    def default(self, obj):
        if isinstance(obj, np.ndarray):
            return obj.tolist()

        elif isinstance(obj, np.floating):
            return float(obj)

        elif isinstance(obj, np.integer):
            return int(obj)

        elif isinstance(obj, np.bool_):
            return bool(obj)

        elif isinstance(obj, complex):
            return [obj.real, obj.imag]

        return json.JSONEncoder.default(self, obj)


def _parse_quadrature(caller, quad_string):
    """
    Parses a quadrature size given as NxM
    Args:
        caller: Function calling, used for logger messages
        quad_string: String like '64x64'

    Returns: tuple with the node counts on alpha_1 and alpha_2
    """
    match = re.fullmatch(r'\s*(\d+)\s*[xX]\s*(\d+)\s*', quad_string)
    if match is None:
        logger = _get_sictomo_logger()
        msg = f'[{caller}]: Quadrature must be given as NxM, got {quad_string}'
        logger.error(msg)
        raise ParameterError(msg)
    return int(match.group(1)), int(match.group(2))


def _print_summary_table(summary, alignment='r'):
    """
    Logs the experiment summary as a prettytable, one row per state and estimator
    Args:
        summary: list of summary dictionaries as produced by summarize_records
        alignment: Contents of the table to be aligned Left or Right
    """
    logger = _get_sictomo_logger()
    table = PrettyTable()
    table.field_names = ['State', 'Estimator', 'sx', 'sy', 'sz', 'Purity', 'Fidelity']
    table.align = alignment
    for row in summary:
        cells = [row['state'], row['estimator']]
        for comp in range(3):
            cells.append(f"{row['mean'][comp]:+.3f} ± {row['std'][comp]:.3f}")
        cells.append(f"{row['mean_purity']:.4f}")
        cells.append(f"{row['mean_fidelity']:.4f}")
        table.add_row(cells)
    logger.info('Experiment summary:\n' + table.get_string())
    return table


def _sictomo_version():
    try:
        return version('sictomo')
    except PackageNotFoundError:
        return '0.0.0'
