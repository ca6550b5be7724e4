"""
--- Base Properties ---

Lazily computed properties shared by the report builders: the spec digest,
the run id and logger of the current command and the group data of the
spec. Values are computed on first access and cached on the instance.

License:  Apache-2.0 license
"""

from typing import Optional

try:
    from src.SubRiem.manifold import ManifoldSpec, spec_digest
    from src.SubRiem.lie import LieData, lie_data
    from src.SubRiem.utils.runlogger import RunLogger, get_run_id
except ImportError:
    from manifold import ManifoldSpec, spec_digest
    from lie import LieData, lie_data
    from utils.runlogger import RunLogger, get_run_id


class BaseProperties:
    """
    A class for common properties used by the SubRiem facade.
    """


    def __init__(self, spec: ManifoldSpec, command: str = "") -> None:
        self.spec = spec
        self.command = command
        self.default_settings = {}


    @property
    def spec_digest(self) -> str:
        """
        Retrieves the SHA-256 digest of the canonical spec document.

        Returns:
            str: The hexadecimal digest.
        """

        cached_spec_digest = getattr(self, "_subriem_spec_digest", None)
        if cached_spec_digest is not None:
            return cached_spec_digest

        digest = spec_digest(self.spec)
        setattr(self, "_subriem_spec_digest", digest)

        return digest


    @property
    def run_id(self) -> str:
        """
        Retrieves the run id derived from the spec digest and the command.

        Returns:
            str: A 16 character hexadecimal id.
        """

        cached_run_id = getattr(self, "_subriem_run_id", None)
        if cached_run_id is not None:
            return cached_run_id

        run_id = get_run_id([self.spec_digest, self.command])
        setattr(self, "_subriem_run_id", run_id)

        return run_id


    @property
    def run_logger(self) -> RunLogger:
        """
        Gets an instance of RunLogger initialized with the current run id.

        Returns:
            RunLogger: The logger for diagnostics of this run.
        """

        cached_run_logger = getattr(self, "_subriem_run_logger", None)
        if cached_run_logger is not None:
            return cached_run_logger

        run_logger = RunLogger(self.run_id)
        setattr(self, "_subriem_run_logger", run_logger)

        return run_logger


    @property
    def lie_data(self) -> LieData:
        """
        Structure constants and trace vector at the identity point.

        Raises:
            MissingInputError: If the spec declares no identity_point.
        """

        cached_lie_data: Optional[LieData] = getattr(self, "_subriem_lie_data", None)
        if cached_lie_data is not None:
            return cached_lie_data

        data = lie_data(self.spec)
        setattr(self, "_subriem_lie_data", data)

        return data


if __name__ == "__main__":
    print("baseproperties.py: This file is not designed to be executed.")
