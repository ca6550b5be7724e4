"""
--- File Tools ---

This module includes functionalities to read from and write to files
and a cached JSON loader used for spec files.

License:  Apache-2.0 license
"""

import os
import json
from typing import Optional, Any
from threading import Lock

try:
    from src.SubRiem.utils.utils import handle_exception
except ImportError:
    from utils.utils import handle_exception


def can_read(file_path: str) -> bool:
    """
    Checks if a file can be read.

    Args:
        file_path (str): The name to the file to check.

    Returns:
        bool: True if the file can be read, False otherwise.
    """

    if not os.path.isfile(file_path):
        return False

    return os.access(file_path, os.R_OK)


def can_write(file_path: str) -> bool:
    """
    Checks if a file can be written to.

    Args:
        file_path (str): The path to the file to check.

    Returns:
        bool: True if the file can be written to, False otherwise.
    """

    directory_path = os.path.dirname(os.path.abspath(file_path))
    if not os.path.isdir(directory_path):
        return False

    return os.access(directory_path, os.W_OK)


def read(file_path: str, default: Any = None) -> Any:
    """
    Reads a UTF-8 text file.

    Args:
        file_path (str): The path to the file to read.
        default (Any, optional): The value returned if the file cannot be read.

    Returns:
        Any: The contents of the file, or the default value.
    """

    if not can_read(file_path):
        return default

    try:
        with open(file_path, "r", encoding = "utf-8") as file:
            return file.read()

    except (FileNotFoundError, IsADirectoryError, IOError,
            PermissionError, ValueError, UnicodeDecodeError,
            TypeError, OSError) as exc:
        handle_exception(exc)

    return default


def write(file_path: str, content: str) -> bool:
    """
    Writes a UTF-8 text file.

    Args:
        file_path (str): The path to the file to write to.
        content (str): The content to write to the file.

    Returns:
        bool: True if the file was written successfully, False otherwise.
    """

    if not can_write(file_path):
        return False

    try:
        with open(file_path, "w", encoding = "utf-8") as file:
            file.write(content)

        return True

    except (FileNotFoundError, IsADirectoryError, IOError,
            PermissionError, ValueError, TypeError, OSError) as exc:
        handle_exception(exc)

    return False


file_locks: dict = {}
file_locks_lock = Lock()


def _get_lock(file_path: str) -> Lock:
    with file_locks_lock:
        if file_path not in file_locks:
            file_locks[file_path] = Lock()

        return file_locks[file_path]


class CachedFile:
    """
    A interface for an file type with caching.
    """


    def __init__(self) -> None:
        self._data = {}


    def _load(self, file_path: str) -> Any:
        return read(file_path)


    def _dump(self, data: Any, file_path: str) -> None:
        write(file_path, data)


    def clear(self) -> None:
        """
        Drops every cached value.
        """

        self._data = {}


    def load(self, file_path: str, default: Any = None) -> Any:
        """
        Loads the file, using the cached value when the file is unchanged.

        Args:
            file_path (str): The path to the file to load.
            default (Any, optional): The default value to return if the file
                                     does not exist or cannot be decoded.

        Returns:
            Any: The loaded file.
        """

        if not can_read(file_path):
            return default

        modified = os.path.getmtime(file_path)
        cached = self._data.get(file_path)
        if cached is not None and cached[0] == modified:
            return cached[1]

        with _get_lock(file_path):
            try:
                data = self._load(file_path)
            except (FileNotFoundError, IsADirectoryError, IOError,
                    PermissionError, ValueError, json.JSONDecodeError,
                    UnicodeDecodeError) as exc:
                handle_exception(exc)
                return default

            self._data[file_path] = (modified, data)
            return data


    def dump(self, file_path: str, data: Any) -> bool:
        """
        Dumps the data to the file.

        Args:
            file_path (str): The path to the file to dump the data to.
            data (Any): The data to dump to the file.

        Returns:
            bool: True if the data was dumped successfully, False otherwise.
        """

        if not can_write(file_path):
            return False

        try:
            with _get_lock(file_path):
                self._dump(data, file_path)
        except (FileNotFoundError, IsADirectoryError, IOError,
                PermissionError, ValueError, TypeError, OSError) as exc:
            handle_exception(exc)
            return False

        self._data.pop(file_path, None)
        return True


class JSONFile(CachedFile):
    """
    A JSON file type with caching.
    """


    def _load(self, file_path: str) -> Any:
        with open(file_path, "r", encoding = "utf-8") as file:
            return json.load(file)


    def _dump(self, data: Any, file_path: str) -> None:
        with open(file_path, "w", encoding = "utf-8") as file:
            if isinstance(data, str):
                file.write(data)
            else:
                json.dump(data, file, indent = 2)


JSON = JSONFile()


if __name__ == "__main__":
    print("fileutils.py: This file is not designed to be executed.")
