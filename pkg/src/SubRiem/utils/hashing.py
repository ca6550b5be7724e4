"""
--- Hashing ---

SHA-256 digests of canonical spec documents. Reports embed the digest so
that a result can be traced to the exact spec it was computed from.

License:  Apache-2.0 license
"""

from typing import Union

from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.backends import default_backend


class SHA256:
    """
    Implements the SHA-256 hashing algorithm with hexadecimal output.

    For more information, refer to RFC 6234:
    https://datatracker.ietf.org/doc/html/rfc6234
    """


    def __init__(self, hash_length: int = 32) -> None:
        """
        Args:
            hash_length (int, optional): Number of digest bytes kept. Default is 32.
        """

        self.hash_length = max(1, min(32, hash_length))


    def hash(self, plain_value: Union[str, bytes]) -> str:
        """
        Hashes the given value.

        Args:
            plain_value (Union[str, bytes]): The value to hash.

        Returns:
            str: The hexadecimal digest.
        """

        if isinstance(plain_value, str):
            plain_value = plain_value.encode("utf-8")

        digest = hashes.Hash(hashes.SHA256(), backend = default_backend())
        digest.update(plain_value)
        hashed_bytes = digest.finalize()

        return hashed_bytes[:self.hash_length].hex()


if __name__ == "__main__":
    print("hashing.py: This file is not designed to be executed.")
