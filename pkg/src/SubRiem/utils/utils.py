"""
--- SubRiem Utils ---

This module includes small utilities shared by the SubRiem project.

License:  Apache-2.0 license
"""

import os
import re
import sys
import functools
from threading import Lock
from collections import OrderedDict
from traceback import format_exc
from typing import Tuple, Final, List, Optional, Union

import numpy as np

try:
    from src.SubRiem.utils.cons import THREADS_ENVIRONMENT_VARIABLE, DEFAULT_MAX_THREADS
except ImportError:
    from utils.cons import THREADS_ENVIRONMENT_VARIABLE, DEFAULT_MAX_THREADS


FLOAT_PATTERN: Final[re.Pattern] = re.compile(
    r'^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$'
)


def is_float(value: str) -> bool:
    """
    Check if a given string represents a valid float.

    Args:
        value (str): The string to be checked.

    Returns:
        bool: True if the string represents a valid float, False otherwise.
    """

    if not isinstance(value, str):
        return False

    return bool(FLOAT_PATTERN.match(value.strip()))


def parse_csv_floats(value: str) -> List[float]:
    """
    Parse a comma separated list of numbers such as "1,2,-0.5".

    Args:
        value (str): The comma separated text.

    Returns:
        List[float]: The parsed numbers.

    Raises:
        ValueError: If an item is not a number.
    """

    items = [item.strip() for item in value.split(",") if item.strip() != ""]
    for item in items:
        if not is_float(item):
            raise ValueError(f"'{item}' is not a number")

    return [float(item) for item in items]


def handle_exception(exception: Union[Exception, str], *args) -> None:
    """
    Handles an exception by printing the exception message and traceback to stderr.

    Args:
        exception (Union[Exception, str]): The exception to handle or a message.
        *args: Additional arguments to be printed alongside the exception message.

    Returns:
        None: This function does not return a value; it only prints the exception details.
    """

    if isinstance(exception, str):
        print(exception, *args, file = sys.stderr)
        return

    traceback = format_exc()
    if traceback.strip() == "NoneType: None":
        print(exception, *args, file = sys.stderr)
        return

    print(exception, traceback, *args, file = sys.stderr)


def memoize(max_entries: int = 256) -> callable:
    """
    Caches the results of a pure function, evicting the oldest entries first.

    Args:
        max_entries (int): The maximum number of cached results.

    Returns:
        callable: The decorator.
    """

    def decorator(func: callable) -> callable:
        cache: OrderedDict = OrderedDict()
        lock = Lock()

        @functools.wraps(func)
        def wrapper(*args):
            key = args
            with lock:
                if key in cache:
                    cache.move_to_end(key)
                    return cache[key]

            result = func(*args)

            with lock:
                cache[key] = result
                if len(cache) > max_entries:
                    cache.popitem(last = False)

            return result

        wrapper.cache_clear = cache.clear
        return wrapper

    return decorator


def get_thread_count(requested: Optional[int] = None) -> int:
    """
    Determine the number of worker threads for per-point work.

    Without a request the count is min(DEFAULT_MAX_THREADS, cpu count). A
    positive integer in SUBRIEM_THREADS is an upper bound on either.

    Args:
        requested (Optional[int]): An explicit request, values below 1 are ignored.

    Returns:
        int: A positive number of threads.
    """

    threads = requested if requested is not None and requested >= 1 \
        else min(DEFAULT_MAX_THREADS, os.cpu_count() or 1)

    raw_cap = os.environ.get(THREADS_ENVIRONMENT_VARIABLE, "").strip()
    if raw_cap.isdigit() and int(raw_cap) > 0:
        threads = min(threads, int(raw_cap))

    return max(1, threads)


def max_abs(values) -> float:
    """
    Largest absolute entry of an array-like, 0 for empty input.
    """

    array = np.asarray(values, dtype = float)
    if array.size == 0:
        return 0.0

    return float(np.max(np.abs(array)))


class Logger:
    """
    A simple logging class that provides functionality to log messages
    with various parameters.
    """


    def log(self, **kwargs) -> None:
        """
        Logs a message with the provided keyword arguments.

        Args:
            **kwargs: Arbitrary keyword arguments that represent the
                      details of the log entry.

        Returns:
            None: This method does not return any value.
        """


def point_key(point) -> Tuple[float, ...]:
    """
    Normalize a point to a hashable tuple of floats.
    """

    return tuple(float(value) for value in point)


if __name__ == "__main__":
    print("utils.py: This file is not designed to be executed.")
