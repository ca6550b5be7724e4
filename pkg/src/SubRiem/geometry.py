"""
--- Geometry ---

Pointwise sub-Riemannian geometry of a ManifoldSpec: the cometric β, the
frame-orthogonal extension metric, raised Christoffel symbols, g^V, the
horizontal projection and the local coefficients of the sub-Laplacians
built from them. Every derivative comes from exact dual number jets.

Index conventions: F[i, k] is component i of frame field X_k,
F_grad[i, k, l] is its partial along x^l and MatrixField.grad[i, j, l]
is the partial of entry (i, j) along x^l.

License:  Apache-2.0 license
"""

import math
from dataclasses import dataclass
from typing import Tuple, List, Optional, Sequence, Callable, NamedTuple

import numpy as np

try:
    from src.SubRiem.expr import (
        ExprNode, Jet2, Dual, eval_jet1, eval_jet2, evaluate, real_value,
        constant, binary, call, determinant_expression
    )
    from src.SubRiem.manifold import ManifoldSpec, Point
    from src.SubRiem.utils.cons import (
        MATRIX_TOLERANCE, OPERATOR_TOLERANCE, RANK_THRESHOLD, SINGULAR_FRAME_THRESHOLD
    )
    from src.SubRiem.utils.errors import (
        SingularFrameError, NonPositiveDensityError, NotASubLaplacianError
    )
    from src.SubRiem.utils.utils import memoize, max_abs, point_key
except ImportError:
    from expr import (
        ExprNode, Jet2, Dual, eval_jet1, eval_jet2, evaluate, real_value,
        constant, binary, call, determinant_expression
    )
    from manifold import ManifoldSpec, Point
    from utils.cons import (
        MATRIX_TOLERANCE, OPERATOR_TOLERANCE, RANK_THRESHOLD, SINGULAR_FRAME_THRESHOLD
    )
    from utils.errors import SingularFrameError, NonPositiveDensityError, NotASubLaplacianError
    from utils.utils import memoize, max_abs, point_key


def _symmetric_from_upper(matrix: np.ndarray) -> np.ndarray:
    return np.triu(matrix) + np.triu(matrix, 1).T


def _freeze(*arrays: np.ndarray) -> None:
    for array in arrays:
        array.setflags(write = False)


@dataclass(frozen = True, eq = False)
class PointFrame:
    """
    The frame matrix at a point with exact first and second partials of
    every entry, its inverse (rows are the dual frame χ^i) and determinant.
    """

    point: Point
    F: np.ndarray
    F_grad: np.ndarray
    F_hess: np.ndarray
    Finv: np.ndarray
    detF: float


    @property
    def F_jet(self) -> Tuple[Tuple[Jet2, ...], ...]:
        """
        Per-entry jets, F_jet[i][k] for entry F[i, k].
        """

        dimension = self.F.shape[0]
        return tuple(
            tuple(
                Jet2(float(self.F[i, k]), self.F_grad[i, k].copy(), self.F_hess[i, k].copy())
                for k in range(dimension)
            )
            for i in range(dimension)
        )


@dataclass(frozen = True, eq = False)
class MatrixField:
    """
    A symmetric matrix at a point with the jets of its entries.
    """

    value: np.ndarray
    grad: np.ndarray
    hess: np.ndarray


    def jet(self, row: int, column: int) -> Jet2:
        return Jet2(
            float(self.value[row, column]),
            self.grad[row, column].copy(),
            self.hess[row, column].copy()
        )


@dataclass(frozen = True, eq = False)
class CoefField:
    """
    Local coefficients of a second order operator
    Σ second[i, j] ∂²/∂x^i∂x^j + Σ first[k] ∂/∂x^k + zeroth.

    The second order part is built from its upper triangle, so it is
    symmetric exactly.
    """

    second: np.ndarray
    first: np.ndarray
    zeroth: float = 0.0


    def __post_init__(self) -> None:
        second = _symmetric_from_upper(np.array(self.second, dtype = float))
        first = np.array(self.first, dtype = float)
        _freeze(second, first)

        object.__setattr__(self, "second", second)
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "zeroth", float(self.zeroth))


    def scaled(self, factor: float) -> "CoefField":
        return CoefField(self.second * factor, self.first * factor, self.zeroth * factor)


    def minus(self, other: "CoefField") -> "CoefField":
        return CoefField(
            self.second - other.second, self.first - other.first, self.zeroth - other.zeroth
        )


    def max_difference(self, other: "CoefField") -> float:
        """
        Largest absolute coefficient difference to another operator.
        """

        difference = self.minus(other)
        return max(max_abs(difference.second), max_abs(difference.first), abs(difference.zeroth))


    def is_close(self, other: "CoefField", tolerance: float = OPERATOR_TOLERANCE) -> bool:
        return self.max_difference(other) <= tolerance


    def to_dict(self) -> dict:
        return {
            "second": self.second.tolist(),
            "first": self.first.tolist(),
            "zeroth": self.zeroth
        }


class Projections(NamedTuple):
    """
    P = BG projects onto the horizontal space along the vertical space;
    Q = GB is its transpose on covectors.
    """

    P: np.ndarray
    Q: np.ndarray


@dataclass(frozen = True, eq = False)
class EqualityResidual:
    """
    Both sides of the criterion for m·L^V = div^ω grad_H at a point,
    together with the two clauses of its sufficient pair.

    volume_clause[l] compares -½ Σ_ij [g^V]_ij ∂_l β^ij with ∂_l τ / τ
    coordinate by coordinate; volume_clause_summed compares their sums
    over l. projection_clause[k] compares Σ_jl P^l_j ∂_l β^jk with
    Σ_l ∂_l β^lk.
    """

    point: Point
    residual: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    volume_clause: np.ndarray
    volume_clause_summed: float
    projection_clause: np.ndarray


    def holds(self, tolerance: float = OPERATOR_TOLERANCE) -> bool:
        return max_abs(self.residual) <= tolerance


    def volume_clause_holds(self, tolerance: float = OPERATOR_TOLERANCE) -> bool:
        return max_abs(self.volume_clause) <= tolerance


    def volume_clause_summed_holds(self, tolerance: float = OPERATOR_TOLERANCE) -> bool:
        return abs(self.volume_clause_summed) <= tolerance


    def projection_clause_holds(self, tolerance: float = OPERATOR_TOLERANCE) -> bool:
        return max_abs(self.projection_clause) <= tolerance


    def sufficient_pair_holds(self, tolerance: float = OPERATOR_TOLERANCE) -> bool:
        return self.volume_clause_holds(tolerance) and self.projection_clause_holds(tolerance)


    def to_dict(self, tolerance: float = OPERATOR_TOLERANCE) -> dict:
        return {
            "point": list(self.point),
            "residual": self.residual.tolist(),
            "max_abs": max_abs(self.residual),
            "lhs": self.lhs.tolist(),
            "rhs": self.rhs.tolist(),
            "volume_clause": self.volume_clause.tolist(),
            "volume_clause_summed": self.volume_clause_summed,
            "projection_clause": self.projection_clause.tolist(),
            "volume_clause_holds": self.volume_clause_holds(tolerance),
            "volume_clause_summed_holds": self.volume_clause_summed_holds(tolerance),
            "projection_clause_holds": self.projection_clause_holds(tolerance),
            "sufficient_pair_holds": self.sufficient_pair_holds(tolerance)
        }


@memoize(max_entries = 2048)
def _point_frame(spec: ManifoldSpec, key: Point) -> PointFrame:
    dimension = spec.dimension

    F = np.zeros((dimension, dimension))
    F_grad = np.zeros((dimension, dimension, dimension))
    F_hess = np.zeros((dimension, dimension, dimension, dimension))

    for k, column in enumerate(spec.full_frame):
        for i, node in enumerate(column):
            jet = eval_jet2(node, key)
            F[i, k] = jet.value
            F_grad[i, k] = jet.grad
            F_hess[i, k] = jet.hess

    determinant = float(np.linalg.det(F))
    scale = max(1.0, max_abs(F)) ** dimension
    if not math.isfinite(determinant) or abs(determinant) <= SINGULAR_FRAME_THRESHOLD * scale:
        raise SingularFrameError(
            f"frame of '{spec.name}' is singular at point {key} (det F = {determinant!r})"
        )

    Finv = np.linalg.inv(F)
    _freeze(F, F_grad, F_hess, Finv)

    return PointFrame(key, F, F_grad, F_hess, Finv, determinant)


def point_frame(spec: ManifoldSpec, x: Sequence[float]) -> PointFrame:
    """
    Evaluate the frame and its jets at a point.

    Args:
        spec (ManifoldSpec): The spec.
        x (Sequence[float]): The point.

    Returns:
        PointFrame: The frame at x.

    Raises:
        ExpressionDomainError: If a frame entry cannot be evaluated at x.
        SingularFrameError: If the frame matrix is not invertible at x.
    """

    return _point_frame(spec, point_key(x))


def _frame_outer(frame: PointFrame, weights: np.ndarray) -> MatrixField:
    """
    Σ_k weights[k]·F[i, k]·F[j, k] with jets by the product rule.
    """

    F, F_grad, F_hess = frame.F, frame.F_grad, frame.F_hess

    value = _symmetric_from_upper((F * weights) @ F.T)

    outer_grad = np.einsum("ikl,jk->ijl", F_grad * weights[None, :, None], F)
    grad = outer_grad + outer_grad.transpose(1, 0, 2)

    outer_hess = np.einsum("ikln,jk->ijln", F_hess * weights[None, :, None, None], F)
    cross_hess = np.einsum("ikl,jkn->ijln", F_grad * weights[None, :, None], F_grad)
    hess = outer_hess + outer_hess.transpose(1, 0, 2, 3)\
        + cross_hess + cross_hess.transpose(1, 0, 2, 3)

    _freeze(value, grad, hess)
    return MatrixField(value, grad, hess)


def _vertical_weights(spec: ManifoldSpec, vertical: float) -> np.ndarray:
    weights = np.ones(spec.dimension)
    weights[spec.horizontal_rank:] = vertical
    return weights


@memoize(max_entries = 2048)
def _beta_field(spec: ManifoldSpec, key: Point) -> MatrixField:
    return _frame_outer(_point_frame(spec, key), _vertical_weights(spec, 0.0))


def beta_matrix(spec: ManifoldSpec, x: Sequence[float]) -> MatrixField:
    """
    The cometric β^{ij} = Σ_{k<m} F[i, k]·F[j, k] with its jets.

    Args:
        spec (ManifoldSpec): The spec.
        x (Sequence[float]): The point.

    Returns:
        MatrixField: The symmetric positive semi-definite cometric, rank m.
    """

    return _beta_field(spec, point_key(x))


def cometric_extension(spec: ManifoldSpec, x: Sequence[float]) -> MatrixField:
    """
    The Riemannian cometric g^{ij} = (F·D⁻¹·Fᵀ)^{ij} of the extension metric.
    """

    frame = point_frame(spec, x)
    return _frame_outer(frame, _vertical_weights(spec, 1.0 / spec.vertical_scaling))


@memoize(max_entries = 2048)
def _extension_field(spec: ManifoldSpec, key: Point) -> MatrixField:
    frame = _point_frame(spec, key)
    inverse = _frame_outer(frame, _vertical_weights(spec, 1.0 / spec.vertical_scaling))

    D = np.diag(_vertical_weights(spec, spec.vertical_scaling))
    G = _symmetric_from_upper(frame.Finv.T @ D @ frame.Finv)

    grad = -np.einsum("ia,abl,bj->ijl", G, inverse.grad, G)
    hess = -(
        np.einsum("ian,abl,bj->ijln", grad, inverse.grad, G)
        + np.einsum("ia,abln,bj->ijln", G, inverse.hess, G)
        + np.einsum("ia,abl,bjn->ijln", G, inverse.grad, grad)
    )
    grad = 0.5 * (grad + grad.transpose(1, 0, 2))
    hess = 0.5 * (hess + hess.transpose(1, 0, 2, 3))
    hess = 0.5 * (hess + hess.transpose(0, 1, 3, 2))

    _freeze(G, grad, hess)
    return MatrixField(G, grad, hess)


def extension_metric(spec: ManifoldSpec, x: Sequence[float]) -> MatrixField:
    """
    The extension metric G = F^{-T}·D·F^{-1}, D = diag(1, …, 1, λ, …, λ),
    which makes the declared frame orthogonal with unit horizontal vectors
    and vertical vectors of squared length λ. Jets are obtained by
    differentiating through the inversion of F·D⁻¹·Fᵀ.

    Args:
        spec (ManifoldSpec): The spec.
        x (Sequence[float]): The point.

    Returns:
        MatrixField: The symmetric positive definite metric with jets.

    Raises:
        SingularFrameError: If the frame is not invertible at x.
    """

    return _extension_field(spec, point_key(x))


def christoffel_raised(field: MatrixField) -> np.ndarray:
    """
    Raised Christoffel symbols of a (co)metric,
    Γ^{ijk} = -½ Σ_l [B^{il} ∂_l B^{jk} + B^{jl} ∂_l B^{ik} - B^{kl} ∂_l B^{ij}].

    Args:
        field (MatrixField): β or the Riemannian cometric g^{ij}, with jets.

    Returns:
        np.ndarray: Γ with shape (d, d, d), symmetric in its first two indices.
    """

    B, dB = field.value, field.grad

    first = np.einsum("il,jkl->ijk", B, dB)
    second = np.einsum("jl,ikl->ijk", B, dB)
    third = np.einsum("kl,ijl->ijk", B, dB)

    return -0.5 * (first + second - third)


def g_vertical(spec: ManifoldSpec, x: Sequence[float]) -> np.ndarray:
    """
    g^V = G·B·G. Independent of the vertical scaling.
    """

    G = extension_metric(spec, x).value
    B = beta_matrix(spec, x).value

    return _symmetric_from_upper(G @ B @ G)


def g_vertical_dual_frame(spec: ManifoldSpec, x: Sequence[float]) -> np.ndarray:
    """
    g^V = Σ_{k<m} χ^k ⊗ χ^k from the dual frame. Equals G·B·G.
    """

    horizontal_duals = point_frame(spec, x).Finv[:spec.horizontal_rank]
    return _symmetric_from_upper(horizontal_duals.T @ horizontal_duals)


def horizontal_projection(spec: ManifoldSpec, x: Sequence[float]) -> Projections:
    """
    The projection P = B·G onto H along V and the coprojection Q = G·B.

    Args:
        spec (ManifoldSpec): The spec.
        x (Sequence[float]): The point.

    Returns:
        Projections: P and Q, both idempotent.
    """

    G = extension_metric(spec, x).value
    B = beta_matrix(spec, x).value

    return Projections(B @ G, G @ B)


def sum_of_squares(spec: ManifoldSpec, x: Sequence[float]) -> CoefField:
    """
    Coefficients of X_1² + … + X_m²: second order part β, first order part
    Σ_{k<m} Σ_j F[j, k]·∂_j F[i, k].

    Args:
        spec (ManifoldSpec): The spec.
        x (Sequence[float]): The point.

    Returns:
        CoefField: The operator.
    """

    frame = point_frame(spec, x)
    m = spec.horizontal_rank

    first = np.einsum("jk,ikj->i", frame.F[:, :m], frame.F_grad[:, :m, :])
    return CoefField(beta_matrix(spec, x).value, first)


def lv_coefficients(spec: ManifoldSpec, x: Sequence[float]) -> CoefField:
    """
    Coefficients of L^V: second = β/m, first[k] = -(1/m) Σ_ij Γ^{ijk} [g^V]_ij.

    Args:
        spec (ManifoldSpec): The spec.
        x (Sequence[float]): The point.

    Returns:
        CoefField: The operator.
    """

    m = spec.horizontal_rank
    beta = beta_matrix(spec, x)
    christoffel = christoffel_raised(beta)

    first = -np.einsum("ijk,ij->k", christoffel, g_vertical(spec, x)) / m
    return CoefField(beta.value / m, first)


def density_jet(spec: ManifoldSpec, tau: ExprNode, x: Sequence[float]):
    """
    Value and gradient of a volume density, which must be positive at x.

    Raises:
        NonPositiveDensityError: If τ(x) <= 0.
    """

    jet = eval_jet1(tau, x)
    if not jet.value > 0.0:
        raise NonPositiveDensityError(
            f"density is not positive at point {point_key(x)} in '{spec.name}' "
            f"(value {jet.value!r})"
        )

    return jet


def div_grad_h(spec: ManifoldSpec, tau: ExprNode, x: Sequence[float]) -> CoefField:
    """
    Coefficients of div^ω grad_H for ω = τ dx¹∧…∧dx^d:
    first[j] = Σ_i [β^{ij}·∂_iτ/τ + ∂_i β^{ij}].

    Args:
        spec (ManifoldSpec): The spec.
        tau (ExprNode): The density τ.
        x (Sequence[float]): The point.

    Returns:
        CoefField: The operator.

    Raises:
        NonPositiveDensityError: If τ(x) <= 0.
    """

    jet = density_jet(spec, tau, x)
    beta = beta_matrix(spec, x)

    first = beta.value @ (jet.grad / jet.value) + np.einsum("iji->j", beta.grad)
    return CoefField(beta.value, first)


def div_grad_riemannian(spec: ManifoldSpec, x: Sequence[float]) -> CoefField:
    """
    div grad_H against the Riemannian volume of the extension metric,
    through the contraction ½ Σ_ij g_ij ∂_l g^{ij} = -∂_l log √det G.
    """

    beta = beta_matrix(spec, x)
    cometric = cometric_extension(spec, x)
    G = extension_metric(spec, x).value

    contraction = np.einsum("ij,ijl->l", G, cometric.grad)
    first = np.einsum("lkl->k", beta.grad) - 0.5 * (beta.value.T @ contraction)

    return CoefField(beta.value, first)


def laplace_beltrami(spec: ManifoldSpec, x: Sequence[float]) -> CoefField:
    """
    The Laplace-Beltrami operator of the extension metric,
    Σ g^{ij} ∂²_ij - Σ Γ_g^{ijk} g_ij ∂_k with Γ_g raised from g^{ij}.
    """

    cometric = cometric_extension(spec, x)
    G = extension_metric(spec, x).value

    first = -np.einsum("ijk,ij->k", christoffel_raised(cometric), G)
    return CoefField(cometric.value, first)


def equality_residual(spec: ManifoldSpec, tau: ExprNode, x: Sequence[float]) -> EqualityResidual:
    """
    Evaluate the criterion for L^V = (1/m) div^ω grad_H at a point,
    residual[k] = RHS_k - LHS_k with

        LHS_k = Σ_l [-½ β^{lk} Σ_ij [g^V]_ij ∂_l β^{ij} + Σ_j P^l_j ∂_l β^{jk}]
        RHS_k = Σ_l [β^{lk} ∂_l τ / τ + ∂_l β^{lk}]

    Args:
        spec (ManifoldSpec): The spec.
        tau (ExprNode): The density τ.
        x (Sequence[float]): The point.

    Returns:
        EqualityResidual: Residual, both sides and the clause diagnostics.

    Raises:
        NonPositiveDensityError: If τ(x) <= 0.
    """

    jet = density_jet(spec, tau, x)
    beta = beta_matrix(spec, x)
    B, dB = beta.value, beta.grad
    P = horizontal_projection(spec, x).P

    volume_terms = -0.5 * np.einsum("ij,ijl->l", g_vertical(spec, x), dB)
    log_density = jet.grad / jet.value
    projected = np.einsum("lj,jkl->k", P, dB)
    divergence = np.einsum("lkl->k", dB)

    lhs = B.T @ volume_terms + projected
    rhs = B.T @ log_density + divergence

    return EqualityResidual(
        point = point_key(x),
        residual = rhs - lhs,
        lhs = lhs,
        rhs = rhs,
        volume_clause = log_density - volume_terms,
        volume_clause_summed = float(np.sum(log_density) - np.sum(volume_terms)),
        projection_clause = divergence - projected
    )


def frame_components(spec: ManifoldSpec, x: Sequence[float], vector: Sequence[float]) -> np.ndarray:
    """
    Components of a coordinate vector in the frame, Finv·v.
    """

    return point_frame(spec, x).Finv @ np.asarray(vector, dtype = float)


def horizontal_frame_form(spec: ManifoldSpec, x: Sequence[float],
                          vector: Sequence[float]) -> Optional[np.ndarray]:
    """
    The first m frame components of a vector, or None when the vector has
    a vertical part.
    """

    components = frame_components(spec, x, vector)
    vertical = components[spec.horizontal_rank:]

    if max_abs(vertical) > OPERATOR_TOLERANCE * max(1.0, max_abs(components)):
        return None

    return components[:spec.horizontal_rank]


def x_delta(delta: CoefField, spec: ManifoldSpec, x: Sequence[float]) -> np.ndarray:
    """
    The vector field X_Δ with Δ = Σ X_k² + X_Δ, in coordinates.

    Args:
        delta (CoefField): The operator Δ at x.
        spec (ManifoldSpec): The spec.
        x (Sequence[float]): The point.

    Returns:
        np.ndarray: Coordinate components of X_Δ; frame_components gives its
                    frame form.

    Raises:
        NotASubLaplacianError: If the second order part of Δ is not β.
    """

    squares = sum_of_squares(spec, x)

    mismatch = max_abs(delta.second - squares.second)
    if mismatch > OPERATOR_TOLERANCE * max(1.0, max_abs(squares.second)):
        raise NotASubLaplacianError(
            f"not a sub-Laplacian: second order part differs from the cometric by {mismatch!r} "
            f"at point {point_key(x)}"
        )

    return delta.first - squares.first


def horizontal_gradient(spec: ManifoldSpec, f: ExprNode,
                        x: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """
    The horizontal gradient β(df) in coordinates and its frame form (X_k f).

    Args:
        spec (ManifoldSpec): The spec.
        f (ExprNode): The function.
        x (Sequence[float]): The point.

    Returns:
        Tuple[np.ndarray, np.ndarray]: β·∇f and the m values X_k f.
    """

    gradient = eval_jet1(f, x).grad
    frame = point_frame(spec, x)

    return beta_matrix(spec, x).value @ gradient, frame.F[:, :spec.horizontal_rank].T @ gradient


def apply_operator(coefficients: CoefField, f: ExprNode, x: Sequence[float]) -> float:
    """
    Apply an operator given by its coefficients at x to a function.

    Args:
        coefficients (CoefField): The operator at x.
        f (ExprNode): The function.
        x (Sequence[float]): The point.

    Returns:
        float: (Δf)(x).
    """

    jet = eval_jet2(f, x)
    return float(
        np.sum(coefficients.second * jet.hess)
        + coefficients.first @ jet.grad
        + coefficients.zeroth * jet.value
    )


def hamiltonian(spec: ManifoldSpec, x: Sequence[float], p: Sequence[float]) -> float:
    """
    H(x, p) = ½ pᵀ β(x) p, evaluated as ½ Σ_k p(X_k)² so that it is never negative.
    """

    horizontal = point_frame(spec, x).F[:, :spec.horizontal_rank]
    pairing = horizontal.T @ np.asarray(p, dtype = float)

    return 0.5 * float(pairing @ pairing)


def bracket(spec: ManifoldSpec, a: int, b: int, x: Sequence[float]) -> np.ndarray:
    """
    Coordinates of the Lie bracket [X_a, X_b] at x,
    Σ_j (F[j, a] ∂_j F[i, b] - F[j, b] ∂_j F[i, a]).
    """

    frame = point_frame(spec, x)
    F, F_grad = frame.F, frame.F_grad

    return F_grad[:, b, :] @ F[:, a] - F_grad[:, a, :] @ F[:, b]


VectorField = Callable[[Sequence], List]


def frame_field(spec: ManifoldSpec, column: int) -> VectorField:
    """
    Frame field X_column as a function on any number type.
    """

    nodes = spec.full_frame[column]

    def field(values: Sequence) -> List:
        return [evaluate(node, values) for node in nodes]

    return field


def _directional_derivative(field: VectorField, values: Sequence, direction: Sequence) -> List:
    seeds = [Dual(value, step) for value, step in zip(values, direction)]
    return [
        component.eps if isinstance(component, Dual) else 0.0
        for component in field(seeds)
    ]


def bracket_field(first: VectorField, second: VectorField) -> VectorField:
    """
    The Lie bracket [first, second] as a vector field. Brackets nest to any
    depth because the inputs may themselves be dual numbers.
    """

    def field(values: Sequence) -> List:
        along_first = _directional_derivative(second, values, first(values))
        along_second = _directional_derivative(first, values, second(values))
        return [a - b for a, b in zip(along_first, along_second)]

    return field


def numerical_rank(vectors: Sequence[Sequence[float]]) -> int:
    """
    Rank of a set of vectors; singular values below RANK_THRESHOLD times
    the largest one count as zero.
    """

    matrix = np.asarray(vectors, dtype = float)
    if matrix.size == 0:
        return 0

    singular_values = np.linalg.svd(matrix, compute_uv = False)
    if singular_values[0] == 0.0:
        return 0

    return int(np.sum(singular_values > RANK_THRESHOLD * singular_values[0]))


def hormander_rank(spec: ManifoldSpec, x: Sequence[float], max_depth: int) -> Tuple[int, int]:
    """
    Dimension of the span of the horizontal fields and their iterated
    brackets [X_a, [X_b, …]] up to max_depth nesting levels.

    Args:
        spec (ManifoldSpec): The spec.
        x (Sequence[float]): The point.
        max_depth (int): Maximum nesting level, 1 means the frame alone.

    Returns:
        Tuple[int, int]: The rank and the first depth at which it was reached.
    """

    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")

    point = [float(value) for value in x]
    horizontal = [frame_field(spec, k) for k in range(spec.horizontal_rank)]

    level = horizontal
    vectors = [[real_value(component) for component in field(point)] for field in level]
    rank = numerical_rank(vectors)
    depth_reached = 1

    for depth in range(2, max_depth + 1):
        if rank == spec.dimension:
            break

        level = [bracket_field(outer, inner) for outer in horizontal for inner in level]
        vectors.extend(
            [real_value(component) for component in field(point)] for field in level
        )

        new_rank = numerical_rank(vectors)
        if new_rank > rank:
            rank, depth_reached = new_rank, depth

    return rank, depth_reached


def psd_rank(matrix: np.ndarray) -> Tuple[bool, int]:
    """
    Whether a symmetric matrix is positive semi-definite and its rank, with
    eigenvalues below MATRIX_TOLERANCE times the largest magnitude counted as zero.
    """

    eigenvalues = np.linalg.eigvalsh(np.asarray(matrix, dtype = float))
    scale = max_abs(eigenvalues)
    if scale == 0.0:
        return True, 0

    threshold = MATRIX_TOLERANCE * scale
    return bool(eigenvalues.min() >= -threshold), int(np.sum(eigenvalues > threshold))


def frame_determinant_expression(spec: ManifoldSpec) -> ExprNode:
    """
    det F as an expression, so derived densities have exact jets.
    """

    grid = [
        [spec.frame_entry(row, column) for column in range(spec.dimension)]
        for row in range(spec.dimension)
    ]
    return determinant_expression(grid)


def riemannian_density_expression(spec: ManifoldSpec) -> ExprNode:
    """
    √det G = λ^{(d-m)/2} / |det F| as an expression.
    """

    factor = spec.vertical_scaling ** ((spec.dimension - spec.horizontal_rank) / 2.0)
    return binary("/", constant(factor), call("abs", frame_determinant_expression(spec)))


def validate_spec(spec: ManifoldSpec) -> None:
    """
    Check the declared guarantees at every sample point: the frame is
    invertible and every density and the inverse modular function are
    positive.

    Raises:
        DomainError: The first violation found.
    """

    for point in spec.sample_points:
        point_frame(spec, point)

        for _, density, _ in spec.volume_densities:
            density_jet(spec, density, point)

        if spec.modular_inverse is not None:
            density_jet(spec, spec.modular_inverse, point)


if __name__ == "__main__":
    print("geometry.py: This file is not designed to be executed.")
