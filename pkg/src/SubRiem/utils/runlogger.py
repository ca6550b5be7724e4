"""
--- Run Logger ---

Structured diagnostics for command runs. Context is buffered with
`log(...)` and written as one JSON line on stderr once a call passes
`end_of_information = True`. stdout is left to the report.

License:  Apache-2.0 license
"""

import sys
import json
import time
from typing import Final, Optional, TextIO

try:
    from src.SubRiem.utils.hashing import SHA256
    from src.SubRiem.utils.utils import Logger
except ImportError:
    from utils.hashing import SHA256
    from utils.utils import Logger


SHA256_RUN: Final[SHA256] = SHA256(hash_length = 8)


def get_run_id(identifiable_information: list) -> str:
    """
    Generate a run id from a list of identifiable information.

    Args:
        identifiable_information (list): Strings that are concatenated and hashed,
                                         usually the spec digest and the command.

    Returns:
        str: A 16 character hexadecimal run id.
    """

    identifiable_information_str = ""
    for information in identifiable_information:
        if isinstance(information, str):
            identifiable_information_str += information

    return SHA256_RUN.hash(identifiable_information_str)


class RunLogger(Logger):
    """
    Writes buffered key/value diagnostics for one run as JSON lines.
    """


    def __init__(self, run_id: str, stream: Optional[TextIO] = None) -> None:
        """
        Args:
            run_id (str): The identifier written with every entry.
            stream (Optional[TextIO]): Destination, stderr when omitted.
        """

        self.run_id = run_id
        self.stream = stream
        self.data = {}
        self.entries = []


    def log(self, **kwargs) -> None:
        """
        Buffers context, or writes an entry when `end_of_information` is True.

        Args:
            **kwargs: Key/value pairs for the entry.

        Returns:
            None: Nothing.
        """

        if kwargs.get("end_of_information") is not True:
            self.data.update(kwargs)
            return

        del kwargs["end_of_information"]

        data = {
            "time": round(time.time(), 3),
            "run_id": self.run_id
        }
        data.update(self.data)
        data.update(kwargs)

        self.entries.append(data)
        self.data = {}

        stream = self.stream if self.stream is not None else sys.stderr
        print(json.dumps(data, default = str), file = stream)


if __name__ == "__main__":
    print("runlogger.py: This file is not designed to be executed.")
