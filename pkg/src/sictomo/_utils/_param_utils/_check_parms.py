#  CASA Next Generation Infrastructure
#  Copyright (C) 2021 AUI, Inc. Washington DC, USA
#
#  This program is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 3 of the License, or
#  (at your option) any later version.
#
#  This program is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with this program.  If not, see <https://www.gnu.org/licenses/>.
import numbers

import numpy as np

from sictomo._utils._errors import ParameterError
from sictomo._utils._logger._sictomo_logger import _get_sictomo_logger


def _is_of_type(value, acceptable_data_types):
    """
    isinstance over a list of types, with the usual numeric leniencies: bool is never an int, and an int is a
    valid float.
    """
    if isinstance(value, (bool, np.bool_)):
        return bool in acceptable_data_types
    for adt in acceptable_data_types:
        if adt is float and isinstance(value, numbers.Real):
            return True
        if adt is int and isinstance(value, numbers.Integral):
            return True
        if isinstance(value, adt):
            return True
    return False


def _check_parms(caller, parm_dict, string_key, acceptable_data_types, acceptable_data=None, acceptable_range=None,
                 list_acceptable_data_types=None, list_len=None, default=None, log_default_setting=True):
    """

    Parameters
    ----------
    caller: str
        Name of the calling function, used in log messages
    parm_dict: dict
        The dictionary in which the parameter will be checked
    string_key : str
    acceptable_data_types : list
    acceptable_data : list
    acceptable_range : list (length of 2)
    list_acceptable_data_types : list
    list_len : int
        If list_len is None than the list can be any length.
    default :
    Returns
    -------
    parm_passed : bool

    """
    logger = _get_sictomo_logger()

    if (string_key in parm_dict) and (parm_dict[string_key] is not None):
        value = parm_dict[string_key]
        if not _is_of_type(value, acceptable_data_types):
            logger.error(f'[{caller}]: Parameter {string_key} must be of type {acceptable_data_types}.')
            return False

        if isinstance(value, (list, tuple, np.ndarray)):
            if (list_len is not None) and (len(value) != list_len):
                logger.error(f'[{caller}]: Parameter {string_key} must be a list of '
                             f'{list_acceptable_data_types} and length {list_len}. Wrong length.')
                return False
            items = list(value)
        else:
            items = [value]

        for item in items:
            if (list_acceptable_data_types is not None) and (item is not value):
                if not _is_of_type(item, list_acceptable_data_types):
                    logger.error(f'[{caller}]: Parameter {string_key} must be a list of '
                                 f'{list_acceptable_data_types}. Wrong type of {type(item)}.')
                    return False

            if acceptable_data is not None:
                if not(item in acceptable_data):
                    logger.error(f'[{caller}]: Invalid {string_key}. Can only be one of {acceptable_data}.')
                    return False

            if acceptable_range is not None:
                if (item < acceptable_range[0]) or (item > acceptable_range[1]):
                    logger.error(f'[{caller}]: Invalid {string_key}. Must be within the range '
                                 f'{acceptable_range}.')
                    return False
    else:
        if default is not None:
            parm_dict[string_key] = default

            if log_default_setting:
                logger.debug(f'[{caller}]: Setting default {string_key} to {parm_dict[string_key]}.')
        else:
            logger.error(f'[{caller}]: Parameter {string_key} must be specified.')
            return False

    return True


def _parm_check_passed(caller, parms_passed):
    logger = _get_sictomo_logger()
    if not parms_passed:
        logger.error(f"{caller} parameter checking failed.")
        raise ParameterError(f"{caller} parameter checking failed.")
