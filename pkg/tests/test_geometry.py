import math

import numpy as np
import pytest

from src.SubRiem.geometry import (
    CoefField, point_frame, beta_matrix, extension_metric, cometric_extension,
    christoffel_raised, g_vertical, g_vertical_dual_frame, horizontal_projection,
    sum_of_squares, lv_coefficients, div_grad_h, div_grad_riemannian,
    laplace_beltrami, equality_residual, x_delta, horizontal_frame_form,
    horizontal_gradient, apply_operator, hamiltonian, bracket, hormander_rank,
    psd_rank, riemannian_density_expression, frame_determinant_expression,
    validate_spec
)
from src.SubRiem.expr import eval_value
from src.SubRiem.manifold import with_vertical_scaling, with_sample_points
from src.SubRiem.utils.errors import (
    SingularFrameError, NonPositiveDensityError, NotASubLaplacianError,
    ExpressionDomainError, DomainError
)


def random_points(name, count, seed = 5):
    generator = np.random.default_rng(seed)

    if name == "su2":
        return np.column_stack((
            generator.uniform(0.3, 2.8, count),
            generator.uniform(-math.pi, math.pi, count),
            generator.uniform(-math.pi, math.pi, count)
        ))
    if name == "affine":
        return np.column_stack((
            generator.uniform(0.3, 3.0, count),
            generator.uniform(-2.0, 2.0, count),
            generator.uniform(-2.0, 2.0, count)
        ))

    return generator.uniform(-3.0, 3.0, (count, 3))


@pytest.fixture
def groups(heisenberg, su2, affine):
    return {"heisenberg": heisenberg, "su2": su2, "affine": affine}


def test_coef_field_is_symmetric_and_frozen():
    field = CoefField([[1.0, 2.0], [5.0, 3.0]], [1.0, 0.0])

    assert field.second.tolist() == [[1.0, 2.0], [2.0, 3.0]]
    with pytest.raises(ValueError):
        field.first[0] = 4.0

    other = field.scaled(2.0)
    assert other.second[0, 1] == 4.0
    assert field.max_difference(other) == 3.0
    assert field.is_close(CoefField(field.second + 1e-12, field.first))
    assert field.minus(field).to_dict()["first"] == [0.0, 0.0]


def test_heisenberg_frame_and_brackets(heisenberg):
    frame = point_frame(heisenberg, (2.0, -1.0, 0.0))

    assert frame.detF == pytest.approx(1.0)
    assert frame.F[:, 0].tolist() == [1.0, 0.0, 0.5]
    assert frame.F_grad[2, 0].tolist() == [0.0, -0.5, 0.0]
    assert bracket(heisenberg, 0, 1, (1.0, 2.0, 3.0)).tolist() == pytest.approx([0.0, 0.0, 1.0])
    assert len(frame.F_jet) == 3


def test_singular_frames_are_rejected(affine, su2):
    with pytest.raises(SingularFrameError):
        point_frame(affine, (0.0, 1.0, 1.0))

    with pytest.raises(ExpressionDomainError):
        point_frame(su2, (0.0, 0.0, 0.0))

    with pytest.raises(DomainError):
        validate_spec(with_sample_points(affine, [[0.0, 0.0, 0.0]]))

    validate_spec(affine)


@pytest.mark.parametrize("name", ["heisenberg", "su2", "affine"])
def test_cometric_and_metric_structure(groups, name):
    spec = groups[name]
    rank = spec.horizontal_rank

    for point in random_points(name, 20):
        B = beta_matrix(spec, point).value
        G = extension_metric(spec, point).value
        gV = g_vertical(spec, point)
        P = horizontal_projection(spec, point).P

        assert psd_rank(B) == (True, rank)
        assert psd_rank(gV) == (True, rank)
        assert np.array_equal(B, B.T)
        assert np.max(np.abs(G @ cometric_extension(spec, point).value - np.eye(3))) <= 1e-10
        assert np.max(np.abs(P @ P - P)) <= 1e-10
        assert np.max(np.abs(B @ gV - P)) <= 1e-10
        assert np.max(np.abs(gV - g_vertical_dual_frame(spec, point))) <= 1e-10


@pytest.mark.parametrize("name", ["heisenberg", "su2", "affine"])
def test_vertical_metric_ignores_vertical_scaling(groups, name):
    spec = groups[name]

    for point in random_points(name, 5):
        base = g_vertical(spec, point)
        base_lv = lv_coefficients(spec, point)

        for scaling in (0.5, 2.0, 10.0):
            scaled = with_vertical_scaling(spec, scaling)
            assert np.max(np.abs(g_vertical(scaled, point) - base)) <= 1e-10
            assert lv_coefficients(scaled, point).max_difference(base_lv) <= 1e-10


def test_metric_jets_match_finite_differences(su2):
    point = np.array([0.9, 0.4, -0.3])
    field = extension_metric(su2, point)
    step = 1e-6

    for l in range(3):
        ahead, behind = point.copy(), point.copy()
        ahead[l] += step
        behind[l] -= step
        difference = (extension_metric(su2, ahead).value - extension_metric(su2, behind).value)

        assert np.max(np.abs(field.grad[:, :, l] - difference / (2.0 * step))) <= 1e-6


def test_christoffel_symbols_vanish_for_constant_cometric(euclidean3):
    assert not christoffel_raised(beta_matrix(euclidean3, (1.0, 2.0, 3.0))).any()


def christoffel_from_differences(spec, point, step = 1e-6):
    B = beta_matrix(spec, point).value
    derivative = np.zeros((3, 3, 3))

    for l in range(3):
        ahead, behind = np.array(point, dtype = float), np.array(point, dtype = float)
        ahead[l] += step
        behind[l] -= step
        difference = beta_matrix(spec, ahead).value - beta_matrix(spec, behind).value
        derivative[:, :, l] = difference / (2.0 * step)

    gamma = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                gamma[i, j, k] = -0.5 * sum(
                    B[i, l] * derivative[j, k, l] + B[j, l] * derivative[i, k, l]
                    - B[k, l] * derivative[i, j, l]
                    for l in range(3)
                )

    return gamma


@pytest.mark.parametrize("name", ["heisenberg", "su2", "affine"])
def test_christoffel_symbols_match_finite_differences(groups, name):
    spec = groups[name]

    for point in random_points(name, 8, seed = 31):
        gamma = christoffel_raised(beta_matrix(spec, point))
        estimate = christoffel_from_differences(spec, point)

        assert np.max(np.abs(gamma - estimate)) <= 1e-6 * max(1.0, np.max(np.abs(gamma)))
        assert np.max(np.abs(gamma - gamma.transpose(1, 0, 2))) <= 1e-12


@pytest.mark.parametrize("phi, psi", [(0.0, 0.0), (0.4, -1.1), (2.0, 3.0)])
def test_su2_christoffel_closed_form(su2, phi, psi):
    theta = math.pi / 6.0
    gamma = christoffel_raised(beta_matrix(su2, (theta, phi, psi)))
    closed_form = math.cos(theta) / math.sin(theta) ** 3

    assert gamma[1, 1, 0] == pytest.approx(-closed_form, rel = 1e-12)
    assert gamma[0, 1, 1] == pytest.approx(closed_form, rel = 1e-12)
    assert gamma[1, 0, 1] == pytest.approx(closed_form, rel = 1e-12)
    assert gamma[0, 0].tolist() == pytest.approx([0.0, 0.0, 0.0], abs = 1e-12)


def test_heisenberg_christoffel_symbols_at_the_origin(heisenberg):
    gamma = christoffel_raised(beta_matrix(heisenberg, (0.0, 0.0, 0.0)))

    expected = np.zeros((3, 3, 3))
    expected[0, 2, 1] = expected[2, 0, 1] = -0.5
    expected[1, 2, 0] = expected[2, 1, 0] = 0.5

    assert np.max(np.abs(gamma - expected)) <= 1e-14


def test_heisenberg_identity_chain(heisenberg):
    for point in heisenberg.sample_points:
        squares = sum_of_squares(heisenberg, point)
        divergence = div_grad_h(heisenberg, heisenberg.parse("1"), point)
        local = lv_coefficients(heisenberg, point)

        assert local.max_difference(squares.scaled(0.5)) <= 1e-10
        assert local.max_difference(divergence.scaled(0.5)) <= 1e-10


def test_euclidean_operators_agree(euclidean3):
    for point in euclidean3.sample_points:
        laplacian = laplace_beltrami(euclidean3, point)

        assert lv_coefficients(euclidean3, point).max_difference(laplacian.scaled(1.0 / 3.0)) <= 1e-12
        assert div_grad_riemannian(euclidean3, point).max_difference(laplacian) <= 1e-12
        assert np.allclose(laplacian.second, np.eye(3))


@pytest.mark.parametrize("name", ["heisenberg", "su2", "affine"])
def test_riemannian_divergence_matches_density_path(groups, name):
    spec = groups[name]
    density = riemannian_density_expression(spec)

    for point in random_points(name, 5):
        direct = div_grad_riemannian(spec, point)
        through_density = div_grad_h(spec, density, point)

        assert direct.max_difference(through_density) <= 1e-9


def test_frame_determinant_expression(affine, su2):
    assert eval_value(frame_determinant_expression(affine), (2.0, 0.0, 0.0)) == pytest.approx(-4.0)
    assert eval_value(frame_determinant_expression(su2), (math.pi / 6.0, 0.0, 0.0)) \
        == pytest.approx(2.0)


def test_affine_coefficients(affine):
    for point in affine.sample_points:
        x = point[0]

        assert sum_of_squares(affine, point).first.tolist() == pytest.approx([x, 0.0, 0.0], abs = 1e-12)
        assert lv_coefficients(affine, point).first.tolist() == pytest.approx([x / 2.0, 0.0, 0.0], abs = 1e-12)
        assert div_grad_h(affine, affine.parse("x^-1"), point).first.tolist() \
            == pytest.approx([x, 0.0, 0.0], abs = 1e-12)
        assert div_grad_h(affine, affine.parse("x^-2"), point).first.tolist() \
            == pytest.approx([0.0, 0.0, 0.0], abs = 1e-12)


def test_su2_lv_first_order_part(su2):
    for theta in (math.pi / 6.0, math.pi / 4.0, math.pi / 3.0, math.pi / 2.0):
        point = (theta, 0.4, -1.1)
        expected = [0.5 * math.cos(theta) / math.sin(theta), 0.0, 0.0]

        assert lv_coefficients(su2, point).first.tolist() == pytest.approx(expected, abs = 1e-10)


def test_equality_residual(su2, affine, heisenberg):
    residual = equality_residual(su2, su2.parse("sin(theta)"), (math.pi / 3.0, 0.2, 0.5))
    assert residual.holds(1e-10)
    assert residual.to_dict()["max_abs"] <= 1e-10

    for point in affine.sample_points:
        certified = equality_residual(affine, affine.parse("x^-1"), point)
        wrong = equality_residual(affine, affine.parse("x^-2"), point)

        assert certified.holds(1e-10)
        assert wrong.residual.tolist() == pytest.approx([-point[0], 0.0, 0.0], abs = 1e-10)
        assert not wrong.holds()
        assert wrong.lhs == pytest.approx(certified.lhs)

    flat = equality_residual(heisenberg, heisenberg.parse("1"), (1.0, 2.0, 3.0))
    assert flat.sufficient_pair_holds()
    assert flat.volume_clause_summed_holds()


def test_non_positive_density(affine):
    with pytest.raises(NonPositiveDensityError):
        div_grad_h(affine, affine.parse("-x"), (1.0, 0.0, 0.0))

    with pytest.raises(NonPositiveDensityError):
        equality_residual(affine, affine.parse("x - 1"), (1.0, 0.0, 0.0))


def test_x_delta(affine, heisenberg):
    point = (2.0, 0.0, 0.0)
    left = div_grad_h(affine, affine.parse("x^-2"), point)

    vector = x_delta(left, affine, point)
    assert vector.tolist() == pytest.approx([-2.0, 0.0, 0.0])
    assert horizontal_frame_form(affine, point, vector).tolist() == pytest.approx([-1.0, 0.0])
    assert horizontal_frame_form(affine, point, [0.0, 1.0, 0.0]) is None

    with pytest.raises(NotASubLaplacianError):
        x_delta(lv_coefficients(heisenberg, point), heisenberg, point)


def test_horizontal_gradient_and_apply_operator(heisenberg):
    point = (2.0, -1.0, 0.0)
    coordinate, frame = horizontal_gradient(heisenberg, heisenberg.parse("z"), point)

    assert coordinate.tolist() == pytest.approx([0.5, 1.0, 1.25])
    assert frame.tolist() == pytest.approx([0.5, 1.0])

    radial = heisenberg.parse("x^2 + y^2")
    assert apply_operator(sum_of_squares(heisenberg, point), radial, point) == pytest.approx(4.0)
    assert apply_operator(lv_coefficients(heisenberg, point), radial, point) == pytest.approx(2.0)


def test_hamiltonian(heisenberg):
    assert hamiltonian(heisenberg, (0.0, 0.0, 0.0), (1.0, 0.0, 0.0)) == 0.5
    assert hamiltonian(heisenberg, (2.0, 0.0, 0.0), (0.0, 0.0, 1.0)) == pytest.approx(0.5)

    generator = np.random.default_rng(3)
    for _ in range(20):
        point, momentum = generator.normal(size = 3), generator.normal(size = 3)
        assert hamiltonian(heisenberg, point, momentum) >= 0.0


@pytest.mark.parametrize("name", ["heisenberg", "su2", "affine"])
def test_hormander_rank(groups, name):
    spec = groups[name]

    for point in spec.sample_points:
        assert hormander_rank(spec, point, 2) == (3, 2)
        assert hormander_rank(spec, point, 1) == (2, 1)


def test_hormander_rank_edge_cases(euclidean3, heisenberg_rotated):
    assert hormander_rank(euclidean3, (0.0, 0.0, 0.0), 3) == (3, 1)
    assert hormander_rank(heisenberg_rotated, (1.0, 2.0, 3.0), 3) == (3, 2)

    with pytest.raises(ValueError):
        hormander_rank(euclidean3, (0.0, 0.0, 0.0), 0)


def test_psd_rank():
    assert psd_rank(np.diag([1.0, -1.0])) == (False, 1)
    assert psd_rank(np.zeros((2, 2))) == (True, 0)
    assert psd_rank(np.diag([2.0, 1e-14, 1.0])) == (True, 2)
