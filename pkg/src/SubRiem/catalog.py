"""
--- Catalog ---

Built-in specs with pinned expected values: the Heisenberg group, SU(2)
in Euler angles, the affine group, the Heisenberg group with a rotated
(non left-invariant) horizontal frame and flat three-space.

Each golden value names the quantity it pins, the point it is evaluated
at and where the expected value comes from: "literature" for closed forms
of the known examples, "derived" for values computed by hand from the
frame and "trivial" for values that follow from constant coefficients.

License:  Apache-2.0 license
"""

import os
import math
from dataclasses import dataclass
from typing import Final, Tuple, Optional, List, Any, Dict

import numpy as np

try:
    from src.SubRiem.manifold import ManifoldSpec, Point, from_document, to_document, with_vertical_scaling
    from src.SubRiem.geometry import (
        beta_matrix, extension_metric, g_vertical, horizontal_projection, sum_of_squares,
        lv_coefficients, div_grad_h, equality_residual, hamiltonian, hormander_rank
    )
    from src.SubRiem.lie import HaarOperator, haar_left_density, haar_right_density
    from src.SubRiem.utils.fileutils import JSON
    from src.SubRiem.utils.serialization import dumps
    from src.SubRiem.utils.utils import max_abs
except ImportError:
    from manifold import ManifoldSpec, Point, from_document, to_document, with_vertical_scaling
    from geometry import (
        beta_matrix, extension_metric, g_vertical, horizontal_projection, sum_of_squares,
        lv_coefficients, div_grad_h, equality_residual, hamiltonian, hormander_rank
    )
    from lie import HaarOperator, haar_left_density, haar_right_density
    from utils.fileutils import JSON
    from utils.serialization import dumps
    from utils.utils import max_abs


PROVENANCES: Final[Tuple[str, ...]] = ("literature", "derived", "trivial")

QUANTITIES: Final[Tuple[str, ...]] = (
    "beta", "extension_metric", "g_vertical", "projection",
    "sos.second", "sos.first", "lv.second", "lv.first",
    "divgrad.second", "divgrad.first", "residual", "hamiltonian",
    "haar_left.frame_first", "haar_right.frame_first",
    "haar_left.density", "haar_right.density", "hormander_rank"
)

THIRD: Final[float] = 1.0 / 3.0


HEISENBERG_DOCUMENT: Final[Dict[str, Any]] = {
    "name": "heisenberg",
    "dimension": 3,
    "horizontal_rank": 2,
    "coordinates": ["x", "y", "z"],
    "full_frame": [
        ["1", "0", "-y/2"],
        ["0", "1", "x/2"],
        ["0", "0", "1"]
    ],
    "vertical_scaling": 1.0,
    "volume_densities": {"haar": "1"},
    "modular_inverse": "1",
    "identity_point": [0.0, 0.0, 0.0],
    "sample_points": [
        [0.0, 0.0, 0.0], [2.0, -1.0, 0.0], [1.0, 2.0, 3.0], [-1.0, 0.5, 2.0],
        [0.5, -1.5, -1.0], [3.0, 1.0, -2.0], [-2.0, -2.0, 0.5], [0.25, 0.75, 1.0],
        [1.5, -0.5, 4.0], [-0.5, 2.5, -3.0]
    ],
    "domain_notes": "global chart, group law (x,y,z)(x',y',z') = (x+x', y+y', z+z'+(xy'-yx')/2)"
}

SU2_DOCUMENT: Final[Dict[str, Any]] = {
    "name": "su2",
    "dimension": 3,
    "horizontal_rank": 2,
    "coordinates": ["theta", "phi", "psi"],
    "full_frame": [
        ["cos(psi)", "sin(psi)/sin(theta)", "-cos(theta)*sin(psi)/sin(theta)"],
        ["-sin(psi)", "cos(psi)/sin(theta)", "-cos(theta)*cos(psi)/sin(theta)"],
        ["0", "0", "1"]
    ],
    "vertical_scaling": 1.0,
    "volume_densities": {"haar": "sin(theta)"},
    "modular_inverse": "1",
    "identity_point": [math.pi / 2.0, 0.0, 0.0],
    "sample_points": [
        [math.pi / 6.0, 0.3, 0.1],
        [math.pi / 4.0, 1.0, -0.5],
        [math.pi / 3.0, -0.7, 2.0],
        [math.pi / 2.0, 0.0, 0.0],
        [math.pi / 2.0, 2.0, 1.3]
    ],
    "domain_notes": "Euler angle chart, valid for 0 < theta < pi; the group identity lies on the "
                    "chart boundary, so identity_point is the in-chart base point (pi/2, 0, 0)"
}

AFFINE_DOCUMENT: Final[Dict[str, Any]] = {
    "name": "affine",
    "dimension": 3,
    "horizontal_rank": 2,
    "coordinates": ["x", "y", "z"],
    "full_frame": [
        ["x", "0", "0"],
        ["0", "x", "1"],
        ["0", "x", "0"]
    ],
    "vertical_scaling": 1.0,
    "volume_densities": {"left_haar": "x^-2", "right_haar": "x^-1"},
    "modular_inverse": "x",
    "identity_point": [1.0, 0.0, 0.0],
    "sample_points": [[0.5, 0.3, -0.2], [1.0, 0.0, 0.0], [2.0, -1.0, 1.5]],
    "domain_notes": "x > 0; the frame is singular on x = 0"
}

HEISENBERG_ROTATED_DOCUMENT: Final[Dict[str, Any]] = {
    "name": "heisenberg-rotated",
    "dimension": 3,
    "horizontal_rank": 2,
    "coordinates": ["x", "y", "z"],
    "full_frame": [
        ["cos(z)", "-sin(z)", "-(x*sin(z) + y*cos(z))/2"],
        ["sin(z)", "cos(z)", "(x*cos(z) - y*sin(z))/2"],
        ["0", "0", "1"]
    ],
    "vertical_scaling": 1.0,
    "volume_densities": {"lebesgue": "1"},
    "sample_points": [
        [0.0, 0.0, 0.0], [2.0, -1.0, 0.0], [1.0, 2.0, 3.0], [-1.0, 0.5, 2.0], [0.5, -1.5, -1.0]
    ],
    "domain_notes": "the Heisenberg distribution with its frame rotated by the angle z; "
                    "orthonormal for the same metric but not left-invariant"
}

EUCLIDEAN3_DOCUMENT: Final[Dict[str, Any]] = {
    "name": "euclidean3",
    "dimension": 3,
    "horizontal_rank": 3,
    "coordinates": ["x", "y", "z"],
    "full_frame": [
        ["1", "0", "0"],
        ["0", "1", "0"],
        ["0", "0", "1"]
    ],
    "vertical_scaling": 1.0,
    "volume_densities": {"lebesgue": "1"},
    "modular_inverse": "1",
    "identity_point": [0.0, 0.0, 0.0],
    "sample_points": [[0.0, 0.0, 0.0], [1.0, -2.0, 0.5], [3.0, 1.0, -1.0]],
    "domain_notes": "Riemannian case, the horizontal space is the whole tangent space"
}


@dataclass(frozen = True)
class Golden:
    """
    One pinned value. `tau` names the density expression for quantities
    that need one, `momentum` the covector for "hamiltonian".
    """

    name: str
    quantity: str
    point: Point
    expected: Any
    provenance: str
    anchor: str
    tolerance: float = 1e-10
    tau: Optional[str] = None
    momentum: Optional[Tuple[float, ...]] = None
    vertical_scaling: Optional[float] = None


    def __post_init__(self) -> None:
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity '{self.quantity}'")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance '{self.provenance}'")
        if not self.anchor:
            raise ValueError(f"golden '{self.name}' has no anchor")


@dataclass(frozen = True, eq = False)
class CatalogEntry:
    spec: ManifoldSpec
    goldens: Tuple[Golden, ...]


    @property
    def name(self) -> str:
        return self.spec.name


    def golden(self, name: str) -> Golden:
        for golden in self.goldens:
            if golden.name == name:
                return golden

        raise KeyError(name)


def _heisenberg_goldens() -> Tuple[Golden, ...]:
    return (
        Golden(
            "beta at (2,-1,0)", "beta", (2.0, -1.0, 0.0),
            [[1.0, 0.0, 0.5], [0.0, 1.0, 1.0], [0.5, 1.0, 1.25]],
            "literature", "cometric X⊗X + Y⊗Y of the Heisenberg frame"
        ),
        Golden(
            "extension_metric at (2,-1,0)", "extension_metric", (2.0, -1.0, 0.0),
            [[1.25, 0.5, -0.5], [0.5, 2.0, -1.0], [-0.5, -1.0, 1.0]],
            "derived", "G = F^-T F^-1 with dual frame dx, dy, dz + y/2 dx - x/2 dy"
        ),
        Golden(
            "g_vertical at (1,2,3)", "g_vertical", (1.0, 2.0, 3.0),
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]],
            "literature", "g^V = dx⊗dx + dy⊗dy for the Heisenberg frame"
        ),
        Golden(
            "projection at (2,-1,0)", "projection", (2.0, -1.0, 0.0),
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.5, 1.0, 0.0]],
            "derived", "P = BG maps ∂x, ∂y to X, Y and ∂z to 0"
        ),
        Golden(
            "sum_of_squares.first at (1,2,3)", "sos.first", (1.0, 2.0, 3.0), [0.0, 0.0, 0.0],
            "literature", "X² + Y² has no first order part on the Heisenberg group"
        ),
        Golden(
            "div_grad_h(τ=1).first", "divgrad.first", (1.0, 2.0, 3.0), [0.0, 0.0, 0.0],
            "literature", "div^μ grad_H = X² + Y² for the Lebesgue measure", tau = "1"
        ),
        Golden(
            "lv.first at (1,2,3)", "lv.first", (1.0, 2.0, 3.0), [0.0, 0.0, 0.0],
            "literature", "L^V = ½(X² + Y²)"
        ),
        Golden(
            "lv.second at (2,-1,0)", "lv.second", (2.0, -1.0, 0.0),
            [[0.5, 0.0, 0.25], [0.0, 0.5, 0.5], [0.25, 0.5, 0.625]],
            "literature", "L^V = ½(X² + Y²), second order part B/2"
        ),
        Golden(
            "residual(τ=1) at (2,-1,0)", "residual", (2.0, -1.0, 0.0), [0.0, 0.0, 0.0],
            "literature", "L^V = ½ div^μ grad_H with the Lebesgue measure", tau = "1"
        ),
        Golden(
            "hamiltonian at origin, p=(1,0,0)", "hamiltonian", (0.0, 0.0, 0.0), 0.5,
            "derived", "H = ½((p_x - y/2 p_z)² + (p_y + x/2 p_z)²)", momentum = (1.0, 0.0, 0.0)
        ),
        Golden(
            "hamiltonian at origin, p=(0,0,1)", "hamiltonian", (0.0, 0.0, 0.0), 0.0,
            "derived", "p_z alone is annihilated by the cometric at the origin",
            momentum = (0.0, 0.0, 1.0)
        ),
        Golden(
            "haar_left.frame_first", "haar_left.frame_first", (1.0, 2.0, 3.0), [0.0, 0.0],
            "literature", "the Heisenberg group is unimodular, X_Δ = 0"
        ),
        Golden(
            "haar_left.density at (1,2,3)", "haar_left.density", (1.0, 2.0, 3.0), 1.0,
            "literature", "the Haar measure is the Lebesgue measure", tolerance = 1e-12
        ),
        Golden(
            "hormander_rank at (1,2,3)", "hormander_rank", (1.0, 2.0, 3.0), [3, 2],
            "literature", "[X, Y] = Z, step two"
        )
    )


def _su2_goldens() -> Tuple[Golden, ...]:
    third_pi = (math.pi / 3.0, 0.2, -0.4)
    cot = math.cos(math.pi / 3.0) / math.sin(math.pi / 3.0)

    return (
        Golden(
            "beta at θ=π/2", "beta", (math.pi / 2.0, 0.3, 0.1),
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]],
            "derived", "at θ = π/2 the frame X, Y spans ∂θ and ∂φ"
        ),
        Golden(
            "extension_metric at θ=π/3", "extension_metric", third_pi,
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.5], [0.0, 0.5, 1.0]],
            "literature", "G = dθ² + (sin²θ + λcos²θ)dφ² + 2λcosθ dφdψ + λdψ² with λ = 1"
        ),
        Golden(
            "g_vertical at θ=π/3", "g_vertical", third_pi,
            [[1.0, 0.0, 0.0], [0.0, 0.75, 0.0], [0.0, 0.0, 0.0]],
            "literature", "g^V = dθ² + sin²θ dφ²"
        ),
        Golden(
            "projection at θ=π/3", "projection", third_pi,
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -0.5, 0.0]],
            "derived", "P = BG with P∂φ = ∂φ - cosθ ∂ψ"
        ),
        Golden(
            "lv.first at θ=π/3", "lv.first", third_pi, [0.5 * cot, 0.0, 0.0],
            "literature", "L^V = ½(X² + Y²) + ½ cot θ ∂θ"
        ),
        Golden(
            "residual(τ=sinθ) at θ=π/4", "residual", (math.pi / 4.0, 1.0, -0.5), [0.0, 0.0, 0.0],
            "literature", "the criterion is satisfied with τ = sin θ", tau = "sin(theta)"
        ),
        Golden(
            "lv.first invariant under λ=10", "lv.first", third_pi, [0.5 * cot, 0.0, 0.0],
            "literature", "L^V does not depend on the vertical scaling", vertical_scaling = 10.0
        ),
        Golden(
            "hamiltonian at (π/2,0,0), p=(0,1,1)", "hamiltonian", (math.pi / 2.0, 0.0, 0.0), 0.5,
            "derived", "X, Y = ∂θ, ∂φ at (π/2, 0, 0), so H = ½ p_φ²", momentum = (0.0, 1.0, 1.0)
        ),
        Golden(
            "haar_left.frame_first", "haar_left.frame_first", third_pi, [0.0, 0.0],
            "literature", "SU(2) is compact and unimodular"
        ),
        Golden(
            "haar_left.density at θ=π/6", "haar_left.density", (math.pi / 6.0, 0.3, 0.1), 0.5,
            "literature", "the Haar density in Euler angles is sin θ", tolerance = 1e-12
        ),
        Golden(
            "hormander_rank at θ=π/4", "hormander_rank", (math.pi / 4.0, 1.0, -0.5), [3, 2],
            "literature", "[X, Y] = Z"
        )
    )


def _affine_goldens() -> Tuple[Golden, ...]:
    point = (2.0, -1.0, 1.5)

    return (
        Golden(
            "beta at identity", "beta", (1.0, 0.0, 0.0),
            [[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 1.0, 1.0]],
            "derived", "X = ∂x and Y = ∂y + ∂z at x = 1"
        ),
        Golden(
            "extension_metric at x=2", "extension_metric", point,
            [[0.25, 0.0, 0.0], [0.0, 0.25, -0.5], [0.0, -0.5, 2.0]],
            "derived", "dual frame dx/x, dz, (dy - x dz)/x"
        ),
        Golden(
            "g_vertical at x=2", "g_vertical", point,
            [[0.25, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
            "literature", "g^V = dx²/x² + dz²"
        ),
        Golden(
            "projection at x=2", "projection", point,
            [[1.0, 0.0, 0.0], [0.0, 0.0, 2.0], [0.0, 0.0, 1.0]],
            "derived", "P∂y = 0 and P∂z = Y"
        ),
        Golden(
            "sum_of_squares.first at x=2", "sos.first", point, [2.0, 0.0, 0.0],
            "derived", "X² = x²∂x² + x∂x"
        ),
        Golden(
            "lv.first at x=2", "lv.first", point, [1.0, 0.0, 0.0],
            "literature", "L^V = ½(X² + Y²)"
        ),
        Golden(
            "div_grad_h(τ=x^-1).first at x=1/2", "divgrad.first", (0.5, 0.3, -0.2), [0.5, 0.0, 0.0],
            "literature", "div^{μR} grad_H = X² + Y²", tau = "x^-1"
        ),
        Golden(
            "div_grad_h(τ=x^-2).first at x=2", "divgrad.first", point, [0.0, 0.0, 0.0],
            "literature", "div^{μL} grad_H = X² + Y² - X", tau = "x^-2"
        ),
        Golden(
            "residual(τ=x^-1) at x=2", "residual", point, [0.0, 0.0, 0.0],
            "literature", "L^V = ½ div^{μR} grad_H", tau = "x^-1"
        ),
        Golden(
            "residual(τ=x^-2) at x=2", "residual", point, [-2.0, 0.0, 0.0],
            "derived", "B^11·(∂x τ/τ) differs by -1/x from the right Haar density", tau = "x^-2"
        ),
        Golden(
            "haar_left.frame_first", "haar_left.frame_first", point, [-1.0, 0.0],
            "literature", "X_{Δ^L} = -X"
        ),
        Golden(
            "haar_right.frame_first", "haar_right.frame_first", point, [0.0, 0.0],
            "literature", "X_{Δ^R} = 0"
        ),
        Golden(
            "haar_left.density at x=2", "haar_left.density", point, 0.25,
            "literature", "left Haar density x^-2", tolerance = 1e-12
        ),
        Golden(
            "haar_right.density at x=2", "haar_right.density", point, 0.5,
            "literature", "right Haar density x^-1", tolerance = 1e-12
        ),
        Golden(
            "hormander_rank at identity", "hormander_rank", (1.0, 0.0, 0.0), [3, 2],
            "literature", "[X, Y] = Z"
        )
    )


def _heisenberg_rotated_goldens() -> Tuple[Golden, ...]:
    return (
        Golden(
            "sum_of_squares.first at (1,2,3)", "sos.first", (1.0, 2.0, 3.0), [0.5, 1.0, 0.0],
            "literature", "(X')² + (Y')² = X² + Y² + ½x∂x + ½y∂y"
        ),
        Golden(
            "sum_of_squares.first at (2,-1,0)", "sos.first", (2.0, -1.0, 0.0), [1.0, -0.5, 0.0],
            "literature", "(X')² + (Y')² = X² + Y² + ½x∂x + ½y∂y"
        ),
        Golden(
            "lv.first at (1,2,3)", "lv.first", (1.0, 2.0, 3.0), [0.0, 0.0, 0.0],
            "derived", "L^V depends only on the distribution and the metric"
        ),
        Golden(
            "beta at (2,-1,0)", "beta", (2.0, -1.0, 0.0),
            [[1.0, 0.0, 0.5], [0.0, 1.0, 1.0], [0.5, 1.0, 1.25]],
            "derived", "a pointwise rotation of an orthonormal frame keeps the cometric"
        )
    )


def _euclidean3_goldens() -> Tuple[Golden, ...]:
    identity = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]

    return (
        Golden(
            "lv.second", "lv.second", (1.0, -2.0, 0.5),
            [[THIRD, 0.0, 0.0], [0.0, THIRD, 0.0], [0.0, 0.0, THIRD]],
            "trivial", "constant B = I, L^V is a third of the Laplacian"
        ),
        Golden(
            "lv.first", "lv.first", (1.0, -2.0, 0.5), [0.0, 0.0, 0.0],
            "trivial", "constant B = I makes every Christoffel symbol vanish"
        ),
        Golden(
            "sum_of_squares.second", "sos.second", (3.0, 1.0, -1.0), identity,
            "trivial", "the coordinate frame squares to the Laplacian"
        ),
        Golden(
            "g_vertical", "g_vertical", (3.0, 1.0, -1.0), identity,
            "trivial", "with H = TM the vertical metric is the metric"
        ),
        Golden(
            "hormander_rank", "hormander_rank", (0.0, 0.0, 0.0), [3, 1],
            "trivial", "the frame already spans"
        )
    )


def load_catalog() -> List[CatalogEntry]:
    """
    Build the built-in entries.

    Returns:
        List[CatalogEntry]: heisenberg, su2, affine, heisenberg-rotated
                            and euclidean3, in that order.
    """

    return [
        CatalogEntry(from_document(HEISENBERG_DOCUMENT), _heisenberg_goldens()),
        CatalogEntry(from_document(SU2_DOCUMENT), _su2_goldens()),
        CatalogEntry(from_document(AFFINE_DOCUMENT), _affine_goldens()),
        CatalogEntry(from_document(HEISENBERG_ROTATED_DOCUMENT), _heisenberg_rotated_goldens()),
        CatalogEntry(from_document(EUCLIDEAN3_DOCUMENT), _euclidean3_goldens())
    ]


def get_entry(name: str) -> CatalogEntry:
    """
    Look up a built-in entry by spec name.

    Raises:
        KeyError: If there is no such entry.
    """

    for entry in load_catalog():
        if entry.name == name:
            return entry

    raise KeyError(name)


def evaluate_golden(spec: ManifoldSpec, golden: Golden) -> np.ndarray:
    """
    Compute the quantity a golden value pins.

    Args:
        spec (ManifoldSpec): The spec of the entry.
        golden (Golden): The golden value.

    Returns:
        np.ndarray: The computed value, shaped like `golden.expected`.
    """

    if golden.vertical_scaling is not None:
        spec = with_vertical_scaling(spec, golden.vertical_scaling)

    x = golden.point
    tau = spec.parse(golden.tau) if golden.tau is not None else None
    quantity = golden.quantity

    if quantity == "beta":
        value = beta_matrix(spec, x).value
    elif quantity == "extension_metric":
        value = extension_metric(spec, x).value
    elif quantity == "g_vertical":
        value = g_vertical(spec, x)
    elif quantity == "projection":
        value = horizontal_projection(spec, x).P
    elif quantity.startswith("sos."):
        value = getattr(sum_of_squares(spec, x), quantity.split(".")[1])
    elif quantity.startswith("lv."):
        value = getattr(lv_coefficients(spec, x), quantity.split(".")[1])
    elif quantity.startswith("divgrad."):
        value = getattr(div_grad_h(spec, tau, x), quantity.split(".")[1])
    elif quantity == "residual":
        value = equality_residual(spec, tau, x).residual
    elif quantity == "hamiltonian":
        value = hamiltonian(spec, x, golden.momentum)
    elif quantity == "haar_left.frame_first":
        value = HaarOperator(spec, "left").frame_first(x)
    elif quantity == "haar_right.frame_first":
        value = HaarOperator(spec, "right").frame_first(x)
    elif quantity == "haar_left.density":
        value = haar_left_density(spec, x)
    elif quantity == "haar_right.density":
        value = haar_right_density(spec, x)
    else:
        value = hormander_rank(spec, x, 2)

    return np.asarray(value, dtype = float)


def golden_error(spec: ManifoldSpec, golden: Golden) -> float:
    """
    Largest absolute difference between computed and expected values.
    """

    expected = np.asarray(golden.expected, dtype = float)
    return max_abs(evaluate_golden(spec, golden) - expected)


def export_specs(directory: str) -> List[str]:
    """
    Write every built-in spec as a spec file `<name>.json`.

    Args:
        directory (str): The target directory, created when missing.

    Returns:
        List[str]: The written file paths, in catalog order.
    """

    os.makedirs(directory, exist_ok = True)

    file_paths = []
    for entry in load_catalog():
        file_path = os.path.join(directory, entry.name + ".json")
        JSON.dump(file_path, dumps(to_document(entry.spec)) + "\n")
        file_paths.append(file_path)

    return file_paths


if __name__ == "__main__":
    print("catalog.py: This file is not designed to be executed.")
