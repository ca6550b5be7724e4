"""
--- Manifold Specs ---

ManifoldSpec holds the symbolic description of a chart: coordinates, the
full frame (horizontal columns first), the vertical scaling, named volume
densities, the optional inverse modular function and the sample points.
This module converts specs from and to the JSON spec file document.

License:  Apache-2.0 license
"""

import re
import math
import dataclasses
from dataclasses import dataclass
from typing import Final, Tuple, Optional, Sequence, Dict, Any

import numpy as np

try:
    from src.SubRiem.expr import (
        ExprNode, parse, to_source, constant, binary, SUPPORTED_FUNCTIONS, NAMED_CONSTANTS
    )
    from src.SubRiem.utils.errors import SpecError, ExpressionSyntaxError
    from src.SubRiem.utils.fileutils import JSON, can_read
    from src.SubRiem.utils.hashing import SHA256
    from src.SubRiem.utils.serialization import canonical_dumps
except ImportError:
    from expr import (
        ExprNode, parse, to_source, constant, binary, SUPPORTED_FUNCTIONS, NAMED_CONSTANTS
    )
    from utils.errors import SpecError, ExpressionSyntaxError
    from utils.fileutils import JSON, can_read
    from utils.hashing import SHA256
    from utils.serialization import canonical_dumps


Point = Tuple[float, ...]

REQUIRED_KEYS: Final[Tuple[str, ...]] = (
    "name", "dimension", "horizontal_rank", "coordinates", "full_frame", "sample_points"
)
OPTIONAL_KEYS: Final[Tuple[str, ...]] = (
    "vertical_scaling", "volume_densities", "modular_inverse",
    "identity_point", "domain_notes"
)
RESERVED_NAMES: Final[Tuple[str, ...]] = tuple(SUPPORTED_FUNCTIONS) + tuple(NAMED_CONSTANTS)
IDENTIFIER_PATTERN: Final[re.Pattern] = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")

SHA256_SPEC: Final[SHA256] = SHA256()


@dataclass(frozen = True, eq = False)
class ManifoldSpec:
    """
    A chart with a full frame. full_frame[k] is the column of vector field
    X_k, so the frame matrix entry F[i][k] is full_frame[k][i]. Columns
    0..m-1 are horizontal and orthonormal by declaration.

    Specs compare by identity; they are immutable and used as cache keys.
    """

    name: str
    dimension: int
    horizontal_rank: int
    coordinates: Tuple[str, ...]
    full_frame: Tuple[Tuple[ExprNode, ...], ...]
    frame_sources: Tuple[Tuple[str, ...], ...]
    sample_points: Tuple[Point, ...] = ()
    vertical_scaling: float = 1.0
    volume_densities: Tuple[Tuple[str, ExprNode, str], ...] = ()
    modular_inverse: Optional[ExprNode] = None
    modular_inverse_source: Optional[str] = None
    identity_point: Optional[Point] = None
    domain_notes: str = ""


    def frame_entry(self, row: int, column: int) -> ExprNode:
        """
        The expression for F[row][column].
        """

        return self.full_frame[column][row]


    @property
    def density_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _, _ in self.volume_densities)


    def density(self, name: str) -> ExprNode:
        """
        Look up a named volume density.

        Args:
            name (str): The density name, e.g. "left_haar".

        Returns:
            ExprNode: The density expression.

        Raises:
            KeyError: If the spec declares no such density.
        """

        for density_name, node, _ in self.volume_densities:
            if density_name == name:
                return node

        raise KeyError(name)


    def parse(self, source: str) -> ExprNode:
        """
        Parse an expression over this spec's coordinates.
        """

        return parse(source, self.coordinates)


def _fail(location: str, message: str) -> SpecError:
    return SpecError(f"{location}: {message}")


def _parse_field(source: Any, coordinates: Sequence[str], location: str) -> Tuple[ExprNode, str]:
    if isinstance(source, bool) or not isinstance(source, (str, int, float)):
        raise _fail(location, "expected an expression string")

    text = source if isinstance(source, str) else repr(source)

    try:
        return parse(text, coordinates), text
    except ExpressionSyntaxError as exc:
        exc.args = (f"{location}: {exc.args[0]}",)
        raise


def _parse_point(value: Any, dimension: int, location: str) -> Point:
    if not isinstance(value, (list, tuple)) or len(value) != dimension:
        raise _fail(location, f"expected an array of {dimension} numbers")

    point = []
    for item in value:
        if isinstance(item, bool) or not isinstance(item, (int, float)) or not math.isfinite(item):
            raise _fail(location, "expected finite numbers")
        point.append(float(item))

    return tuple(point)


def from_document(document: Any) -> ManifoldSpec:
    """
    Build and validate a ManifoldSpec from a spec file document.

    Args:
        document (Any): The decoded JSON document.

    Returns:
        ManifoldSpec: The spec.

    Raises:
        SpecError: If a key is missing or inconsistent, or an expression
                   does not parse; the message names the location.
    """

    if not isinstance(document, dict):
        raise SpecError("spec document must be a JSON object")

    for key in REQUIRED_KEYS:
        if key not in document:
            raise _fail(key, "missing required key")

    unknown = sorted(set(document) - set(REQUIRED_KEYS) - set(OPTIONAL_KEYS))
    if unknown:
        raise _fail(unknown[0], "unknown key")

    name = document["name"]
    if not isinstance(name, str) or name.strip() == "":
        raise _fail("name", "expected a non-empty string")

    dimension = document["dimension"]
    if isinstance(dimension, bool) or not isinstance(dimension, int) or dimension < 1:
        raise _fail("dimension", "expected a positive integer")

    horizontal_rank = document["horizontal_rank"]
    if isinstance(horizontal_rank, bool) or not isinstance(horizontal_rank, int)\
        or not 1 <= horizontal_rank <= dimension:

        raise _fail("horizontal_rank", f"expected an integer between 1 and {dimension}")

    coordinates = document["coordinates"]
    if not isinstance(coordinates, list) or len(coordinates) != dimension:
        raise _fail("coordinates", f"expected {dimension} names")

    for index, coordinate in enumerate(coordinates):
        location = f"coordinates[{index}]"
        if not isinstance(coordinate, str) or not IDENTIFIER_PATTERN.fullmatch(coordinate):
            raise _fail(location, "expected an identifier")
        if coordinate in RESERVED_NAMES:
            raise _fail(location, f"'{coordinate}' is reserved")

    if len(set(coordinates)) != dimension:
        raise _fail("coordinates", "names must be unique")

    coordinates = tuple(coordinates)

    raw_frame = document["full_frame"]
    if not isinstance(raw_frame, list) or len(raw_frame) != dimension:
        raise _fail("full_frame", f"expected {dimension} columns")

    columns, column_sources = [], []
    for column_index, raw_column in enumerate(raw_frame):
        if not isinstance(raw_column, list) or len(raw_column) != dimension:
            raise _fail(f"full_frame[{column_index}]", f"expected {dimension} components")

        nodes, sources = [], []
        for row_index, raw_entry in enumerate(raw_column):
            node, text = _parse_field(
                raw_entry, coordinates, f"full_frame[{column_index}][{row_index}]"
            )
            nodes.append(node)
            sources.append(text)

        columns.append(tuple(nodes))
        column_sources.append(tuple(sources))

    vertical_scaling = document.get("vertical_scaling", 1.0)
    if isinstance(vertical_scaling, bool) or not isinstance(vertical_scaling, (int, float))\
        or not math.isfinite(vertical_scaling) or vertical_scaling <= 0:

        raise _fail("vertical_scaling", "expected a positive number")

    raw_densities = document.get("volume_densities", {})
    if not isinstance(raw_densities, dict):
        raise _fail("volume_densities", "expected an object")

    densities = []
    for density_name, raw_density in raw_densities.items():
        node, text = _parse_field(raw_density, coordinates, f"volume_densities.{density_name}")
        densities.append((str(density_name), node, text))

    modular_inverse, modular_inverse_source = None, None
    if document.get("modular_inverse") is not None:
        modular_inverse, modular_inverse_source = _parse_field(
            document["modular_inverse"], coordinates, "modular_inverse"
        )

    identity_point = None
    if document.get("identity_point") is not None:
        identity_point = _parse_point(document["identity_point"], dimension, "identity_point")

    raw_points = document["sample_points"]
    if not isinstance(raw_points, list):
        raise _fail("sample_points", "expected an array of points")

    sample_points = tuple(
        _parse_point(raw_point, dimension, f"sample_points[{index}]")
        for index, raw_point in enumerate(raw_points)
    )

    domain_notes = document.get("domain_notes", "")
    if not isinstance(domain_notes, str):
        raise _fail("domain_notes", "expected a string")

    return ManifoldSpec(
        name = name,
        dimension = dimension,
        horizontal_rank = horizontal_rank,
        coordinates = coordinates,
        full_frame = tuple(columns),
        frame_sources = tuple(column_sources),
        sample_points = sample_points,
        vertical_scaling = float(vertical_scaling),
        volume_densities = tuple(densities),
        modular_inverse = modular_inverse,
        modular_inverse_source = modular_inverse_source,
        identity_point = identity_point,
        domain_notes = domain_notes
    )


def to_document(spec: ManifoldSpec) -> Dict[str, Any]:
    """
    Convert a spec back into a spec file document.

    Args:
        spec (ManifoldSpec): The spec.

    Returns:
        Dict[str, Any]: A JSON compatible document that from_document accepts.
    """

    document = {
        "name": spec.name,
        "dimension": spec.dimension,
        "horizontal_rank": spec.horizontal_rank,
        "coordinates": list(spec.coordinates),
        "full_frame": [list(column) for column in spec.frame_sources],
        "vertical_scaling": spec.vertical_scaling,
        "volume_densities": {name: source for name, _, source in spec.volume_densities},
        "modular_inverse": spec.modular_inverse_source,
        "identity_point": None if spec.identity_point is None else list(spec.identity_point),
        "sample_points": [list(point) for point in spec.sample_points],
        "domain_notes": spec.domain_notes
    }

    return document


def spec_digest(spec: ManifoldSpec) -> str:
    """
    SHA-256 of the canonical spec document.
    """

    return SHA256_SPEC.hash(canonical_dumps(to_document(spec)))


def load_spec(file_path: str) -> ManifoldSpec:
    """
    Load a spec file.

    Args:
        file_path (str): Path to a JSON spec file.

    Returns:
        ManifoldSpec: The validated spec.

    Raises:
        SpecError: If the file cannot be read, is not JSON or is invalid.
    """

    if not can_read(file_path):
        raise SpecError(f"{file_path}: cannot read spec file")

    document = JSON.load(file_path)
    if document is None:
        raise SpecError(f"{file_path}: not a valid JSON document")

    return from_document(document)


def with_vertical_scaling(spec: ManifoldSpec, vertical_scaling: float) -> ManifoldSpec:
    """
    The same spec with another vertical scaling λ.
    """

    if not vertical_scaling > 0:
        raise SpecError("vertical_scaling: expected a positive number")

    return dataclasses.replace(spec, vertical_scaling = float(vertical_scaling))


def with_sample_points(spec: ManifoldSpec, sample_points: Sequence[Sequence[float]]) -> ManifoldSpec:
    """
    The same spec evaluated at other points.
    """

    points = tuple(
        _parse_point(list(point), spec.dimension, f"point[{index}]")
        for index, point in enumerate(sample_points)
    )
    return dataclasses.replace(spec, sample_points = points)


def with_horizontal_rotation(spec: ManifoldSpec, rotation: np.ndarray) -> ManifoldSpec:
    """
    Replace the horizontal columns X_k by Y_k = Σ_j rotation[j][k]·X_j.

    Args:
        spec (ManifoldSpec): The spec.
        rotation (np.ndarray): A constant m×m matrix, usually orthogonal.

    Returns:
        ManifoldSpec: The spec with the rotated horizontal frame.
    """

    rotation = np.asarray(rotation, dtype = float)
    rank = spec.horizontal_rank
    if rotation.shape != (rank, rank):
        raise SpecError(f"rotation: expected a {rank}x{rank} matrix")

    columns = list(spec.full_frame)
    sources = list(spec.frame_sources)

    for k in range(rank):
        nodes = []
        for row in range(spec.dimension):
            total = None
            for j in range(rank):
                term = binary("*", constant(rotation[j, k]), spec.full_frame[j][row])
                total = term if total is None else binary("+", total, term)
            nodes.append(total)

        columns[k] = tuple(nodes)

    for k in range(rank):
        sources[k] = tuple(to_source(node) for node in columns[k])

    return dataclasses.replace(spec, full_frame = tuple(columns), frame_sources = tuple(sources))


if __name__ == "__main__":
    print("manifold.py: This file is not designed to be executed.")
