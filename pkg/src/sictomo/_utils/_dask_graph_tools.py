import dask

from sictomo._utils._logger._sictomo_logger import _get_sictomo_logger


def _dask_general_compute(caller, cells, chunk_function, param_dict, parallel=False):
    """
    General tool for looping over independent cells and constructing graphs for dask parallel processing
    Args:
        caller: Function calling, used for logger messages
        cells: list of cell descriptions, each one is handed to the chunk function as param_dict['this_cell']
        chunk_function: The chunk function to be executed
        param_dict: The parameter dictionary for the chunk function
        parallel: Are loops to be executed in parallel?

    Returns: list with the chunk function results in cell order, empty if there was nothing to process

    """
    logger = _get_sictomo_logger()
    if len(cells) == 0:
        logger.warning(f"[{caller}]: No data to process")
        return []

    if parallel:
        delayed_list = []
        for cell in cells:
            chunk_params = dict(param_dict)
            chunk_params['this_cell'] = cell
            delayed_list.append(dask.delayed(chunk_function)(chunk_params))
        logger.debug(f"[{caller}]: Computing {len(delayed_list)} cells in parallel")
        return list(dask.compute(*delayed_list))

    results = []
    for cell in cells:
        chunk_params = dict(param_dict)
        chunk_params['this_cell'] = cell
        results.append(chunk_function(chunk_params))
    return results
