"""
Worker pool control for the numba kernels.
"""
import logging

import numba

logger = logging.getLogger(__name__)


def set_thread_cap(threads):
    """
    Cap the number of threads used by parallel numba kernels.

    Args:
        threads: Requested worker count; None or non-positive keeps the default

    Returns:
        int: Thread count in effect
    """
    available = numba.config.NUMBA_NUM_THREADS
    if threads is None or int(threads) <= 0:
        return numba.get_num_threads()
    effective = min(int(threads), available)
    if effective < int(threads):
        logger.warning(f'Requested {threads} threads, only {available} available')
    numba.set_num_threads(effective)
    return effective
