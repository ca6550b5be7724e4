"""
--- Lie Groups ---

Analysis of a frame that the spec declares left-invariant on a Lie group:
structure constants at the identity, the trace of ad X_k, the sub-Laplacians
built from the left and right Haar measures and the unimodularity report.

The left Haar density of a left-invariant frame is 1/|det F| and the right
one is 𝔪_i/|det F|; comparing the operators they define with the
trace corrected sums of squares is the numerical form of the divergence
identity for left-invariant frames.

License:  Apache-2.0 license
"""

from dataclasses import dataclass
from typing import Final, Optional, Sequence, Tuple

import numpy as np

try:
    from src.SubRiem.expr import ExprNode, binary, call, constant, eval_jet1, eval_value
    from src.SubRiem.manifold import ManifoldSpec, Point
    from src.SubRiem.geometry import (
        CoefField, point_frame, bracket, sum_of_squares, div_grad_h, density_jet,
        frame_determinant_expression, x_delta, frame_components
    )
    from src.SubRiem.utils.cons import MATRIX_TOLERANCE
    from src.SubRiem.utils.errors import (
        MissingInputError, SpecError, DomainError, NonPositiveDensityError
    )
    from src.SubRiem.utils.utils import max_abs, point_key
except ImportError:
    from expr import ExprNode, binary, call, constant, eval_jet1, eval_value
    from manifold import ManifoldSpec, Point
    from geometry import (
        CoefField, point_frame, bracket, sum_of_squares, div_grad_h, density_jet,
        frame_determinant_expression, x_delta, frame_components
    )
    from utils.cons import MATRIX_TOLERANCE
    from utils.errors import MissingInputError, SpecError, DomainError, NonPositiveDensityError
    from utils.utils import max_abs, point_key


IDENTITY_TOLERANCE: Final[float] = 1e-12
INVARIANCE_PERTURBATION: Final[float] = 0.1
MAX_INVARIANCE_ATTEMPTS: Final[int] = 100


def structure_constants(spec: ManifoldSpec, identity: Sequence[float]) -> np.ndarray:
    """
    c[i, j, k] = c^k_{ij}, the frame components of [X_i, X_j] at a point.

    Args:
        spec (ManifoldSpec): The spec.
        identity (Sequence[float]): The point, normally the group identity.

    Returns:
        np.ndarray: Array of shape (d, d, d), antisymmetric in i and j.

    Raises:
        SingularFrameError: If the frame is not invertible at the point.
    """

    dimension = spec.dimension
    Finv = point_frame(spec, identity).Finv

    constants = np.zeros((dimension, dimension, dimension))
    for i in range(dimension):
        for j in range(i + 1, dimension):
            components = Finv @ bracket(spec, i, j, identity)
            constants[i, j] = components
            constants[j, i] = -components

    return constants


def trace_ad(constants: np.ndarray) -> np.ndarray:
    """
    Tr(ad X_i) = Σ_k c^k_{ik}.
    """

    return np.einsum("ikk->i", constants)


def jacobi_defect(constants: np.ndarray) -> float:
    """
    Largest entry of Σ_cyclic Σ_l c^l_{ij} c^m_{lk}, zero for a Lie algebra.
    """

    term = np.einsum("ijl,lkm->ijkm", constants, constants)
    cyclic = term + term.transpose(1, 2, 0, 3) + term.transpose(2, 0, 1, 3)

    return max_abs(cyclic)


def haar_left_density_expression(spec: ManifoldSpec) -> ExprNode:
    """
    τ_L = 1 / |det F|.
    """

    return binary("/", constant(1.0), call("abs", frame_determinant_expression(spec)))


def haar_right_density_expression(spec: ManifoldSpec) -> ExprNode:
    """
    τ_R = 𝔪_i / |det F|.

    Raises:
        MissingInputError: If the spec has no modular_inverse.
    """

    if spec.modular_inverse is None:
        raise MissingInputError(f"'{spec.name}' declares no modular_inverse")

    return binary("/", spec.modular_inverse, call("abs", frame_determinant_expression(spec)))


def haar_left_density(spec: ManifoldSpec, x: Sequence[float]) -> float:
    return 1.0 / abs(point_frame(spec, x).detF)


def haar_right_density(spec: ManifoldSpec, x: Sequence[float]) -> float:
    if spec.modular_inverse is None:
        raise MissingInputError(f"'{spec.name}' declares no modular_inverse")

    return density_jet(spec, spec.modular_inverse, x).value / abs(point_frame(spec, x).detF)


@dataclass(frozen = True, eq = False)
class LieData:
    """
    Group data computed once at the identity.
    """

    identity_point: Point
    structure_constants: np.ndarray
    trace_ad: np.ndarray
    modular_inverse: Optional[ExprNode]


def lie_data(spec: ManifoldSpec) -> LieData:
    """
    Compute the structure constants and trace vector at the identity.

    Args:
        spec (ManifoldSpec): A spec with a left-invariant frame and identity_point.

    Returns:
        LieData: The group data.

    Raises:
        MissingInputError: If the spec has no identity_point.
        SpecError: If the inverse modular function is not 1 at the identity.
    """

    if spec.identity_point is None:
        raise MissingInputError(f"'{spec.name}' declares no identity_point")

    identity = spec.identity_point

    if spec.modular_inverse is not None:
        value = eval_value(spec.modular_inverse, identity)
        if abs(value - 1.0) > IDENTITY_TOLERANCE:
            raise SpecError(f"modular_inverse: expected 1 at the identity, found {value!r}")

    constants = structure_constants(spec, identity)
    constants.setflags(write = False)
    traces = trace_ad(constants)
    traces.setflags(write = False)

    return LieData(identity, constants, traces, spec.modular_inverse)


def left_invariance_defect(spec: ManifoldSpec, count: int = 5, seed: int = 0,
                           data: Optional[LieData] = None) -> float:
    """
    Largest change of the structure constants between the identity and
    `count` random points near the sample points. Constant structure
    functions are what left-invariance of the frame looks like in a chart.

    Args:
        spec (ManifoldSpec): The spec.
        count (int): Number of random points.
        seed (int): Seed of numpy's default generator.
        data (Optional[LieData]): Precomputed group data.

    Returns:
        float: The largest absolute difference.
    """

    data = data if data is not None else lie_data(spec)
    anchors = list(spec.sample_points) or [data.identity_point]

    generator = np.random.default_rng(seed)
    defect, checked, attempts = 0.0, 0, 0

    while checked < count and attempts < MAX_INVARIANCE_ATTEMPTS:
        attempts += 1
        anchor = np.asarray(anchors[int(generator.integers(len(anchors)))])
        point = anchor + generator.uniform(
            -INVARIANCE_PERTURBATION, INVARIANCE_PERTURBATION, size = anchor.shape
        )

        try:
            constants = structure_constants(spec, point)
        except DomainError:
            continue

        defect = max(defect, max_abs(constants - data.structure_constants))
        checked += 1

    return defect


def _directional(spec: ManifoldSpec, node: ExprNode, x: Sequence[float]) -> Tuple[float, np.ndarray]:
    jet = eval_jet1(node, x)
    horizontal = point_frame(spec, x).F[:, :spec.horizontal_rank]

    return jet.value, horizontal.T @ jet.grad


class HaarOperator:
    """
    div grad_H against a Haar measure, in its trace corrected frame form

        left:  Σ X_k² - Σ_{k<m} Tr(ad X_k)·X_k
        right: Σ X_k² + Σ_{k<m} [𝔪·X_k(𝔪_i) - Tr(ad X_k)]·X_k

    with 𝔪 = 1/𝔪_i. Calling the operator on a point gives its coefficients.
    """


    def __init__(self, spec: ManifoldSpec, side: str, data: Optional[LieData] = None) -> None:
        """
        Args:
            spec (ManifoldSpec): The spec.
            side (str): "left" or "right".
            data (Optional[LieData]): Precomputed group data.

        Raises:
            MissingInputError: If side is "right" and the spec has no modular_inverse.
        """

        if side not in ("left", "right"):
            raise ValueError(f"unknown side '{side}'")

        if side == "right" and spec.modular_inverse is None:
            raise MissingInputError(f"'{spec.name}' declares no modular_inverse")

        self.spec = spec
        self.side = side
        self.data = data if data is not None else lie_data(spec)


    def frame_first(self, x: Sequence[float]) -> np.ndarray:
        """
        The m frame components of X_Δ at x.
        """

        rank = self.spec.horizontal_rank
        correction = -self.data.trace_ad[:rank]

        if self.side == "right":
            modular_inverse, derivatives = _directional(self.spec, self.spec.modular_inverse, x)
            if not modular_inverse > 0.0:
                raise NonPositiveDensityError(
                    f"modular_inverse is not positive at point {point_key(x)} in '{self.spec.name}'"
                )
            correction = correction + derivatives / modular_inverse

        return correction


    def coefficients(self, x: Sequence[float]) -> CoefField:
        """
        Coordinate coefficients at x.
        """

        squares = sum_of_squares(self.spec, x)
        horizontal = point_frame(self.spec, x).F[:, :self.spec.horizontal_rank]

        return CoefField(squares.second, squares.first + horizontal @ self.frame_first(x))


    def __call__(self, x: Sequence[float]) -> CoefField:
        return self.coefficients(x)


    def density(self) -> ExprNode:
        """
        The Haar density this operator is the divergence against.
        """

        if self.side == "left":
            return haar_left_density_expression(self.spec)

        return haar_right_density_expression(self.spec)


    def density_path(self, x: Sequence[float]) -> CoefField:
        """
        The same operator computed as div grad_H against the density.
        """

        return div_grad_h(self.spec, self.density(), x)


    def discrepancy(self, x: Sequence[float]) -> float:
        return self.coefficients(x).max_difference(self.density_path(x))


def haar_left_operator(spec: ManifoldSpec, data: Optional[LieData] = None) -> HaarOperator:
    """
    div^{μ_L} grad_H = Σ X_k² - Σ Tr(ad X_k(e))·X_k.
    """

    return HaarOperator(spec, "left", data)


def haar_right_operator(spec: ManifoldSpec, data: Optional[LieData] = None) -> HaarOperator:
    """
    div^{μ_R} grad_H = Σ X_k² + Σ [𝔪·X_k(𝔪_i) - Tr(ad X_k(e))]·X_k.

    Raises:
        MissingInputError: If the spec has no modular_inverse.
    """

    return HaarOperator(spec, "right", data)


def haar_path_discrepancy(spec: ManifoldSpec, side: str = "left",
                           data: Optional[LieData] = None) -> float:
    """
    Largest coefficient difference between the trace path and the density
    path of a Haar operator over the sample points.
    """

    operator = HaarOperator(spec, side, data)
    points = list(spec.sample_points) or [operator.data.identity_point]

    return max(operator.discrepancy(point) for point in points)


@dataclass(frozen = True, eq = False)
class UnimodularityReport:
    """
    Unimodularity diagnostics of a group.

    `unimodular` uses the full trace vector; `horizontal_unimodular` only
    the horizontal entries, the X_{Δ^L} ≡ 0 criterion. `asymmetry` is set
    when X_{Δ^R} vanishes but X_{Δ^L} does not.
    """

    trace_ad: np.ndarray
    x_delta_left_frame: np.ndarray
    x_delta_right_frame: Optional[np.ndarray]
    unimodular: bool
    horizontal_unimodular: bool
    asymmetry: bool


    def to_dict(self) -> dict:
        return {
            "trace_ad": self.trace_ad.tolist(),
            "x_delta_left_frame": self.x_delta_left_frame.tolist(),
            "x_delta_right_frame": None if self.x_delta_right_frame is None
                else self.x_delta_right_frame.tolist(),
            "unimodular": self.unimodular,
            "horizontal_unimodular": self.horizontal_unimodular,
            "asymmetry": self.asymmetry
        }


def unimodularity_report(spec: ManifoldSpec, data: Optional[LieData] = None) -> UnimodularityReport:
    """
    Report X_{Δ^L}, the trace vector, both unimodularity verdicts and the
    left/right asymmetry flag.

    Args:
        spec (ManifoldSpec): The spec.
        data (Optional[LieData]): Precomputed group data.

    Returns:
        UnimodularityReport: The diagnostics. x_delta_right_frame is the
                             largest magnitude over the sample points and the
                             identity, per component, or None without 𝔪_i.
    """

    data = data if data is not None else lie_data(spec)
    rank = spec.horizontal_rank

    left = -data.trace_ad[:rank]
    unimodular = max_abs(data.trace_ad) <= MATRIX_TOLERANCE
    horizontal_unimodular = max_abs(left) <= MATRIX_TOLERANCE

    right = None
    asymmetry = False
    if spec.modular_inverse is not None:
        operator = haar_right_operator(spec, data)
        points = [data.identity_point] + list(spec.sample_points)
        values = np.array([operator.frame_first(point) for point in points])
        right = values[np.argmax(np.abs(values), axis = 0), np.arange(rank)]

        asymmetry = max_abs(right) <= MATRIX_TOLERANCE and not horizontal_unimodular

    return UnimodularityReport(
        trace_ad = np.array(data.trace_ad),
        x_delta_left_frame = left,
        x_delta_right_frame = right,
        unimodular = bool(unimodular),
        horizontal_unimodular = bool(horizontal_unimodular),
        asymmetry = bool(asymmetry)
    )


def x_delta_frame(delta: CoefField, spec: ManifoldSpec, x: Sequence[float]) -> np.ndarray:
    """
    Frame components of X_Δ for an operator given by coefficients.
    """

    return frame_components(spec, x, x_delta(delta, spec, x))


if __name__ == "__main__":
    print("lie.py: This file is not designed to be executed.")
