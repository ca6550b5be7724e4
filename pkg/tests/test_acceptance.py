"""
End to end checks of the catalog groups at their full trial counts: every
sample point, 1000 step flows and 100 randomized structural trials.
"""

import math

import numpy as np
import pytest

from src.SubRiem.expr import eval_value, eval_jet1, eval_jet2, constant, variable, binary, call
from src.SubRiem.flow import PhaseState, SphereSampler, flow, flow_trajectory, lv_definitional
from src.SubRiem.geometry import (
    beta_matrix, g_vertical, horizontal_projection, sum_of_squares, lv_coefficients,
    div_grad_h, equality_residual, apply_operator, hormander_rank, psd_rank
)
from src.SubRiem.lie import (
    haar_left_density, haar_right_density, haar_left_operator, haar_right_operator,
    haar_path_discrepancy
)
from src.SubRiem.manifold import with_vertical_scaling, with_horizontal_rotation


GROUPS = ("heisenberg", "su2", "affine")
DENSITIES = {"heisenberg": "haar", "su2": "haar", "affine": "left_haar"}


def random_points(name, count, seed):
    generator = np.random.default_rng(seed)

    if name == "su2":
        return np.column_stack((
            generator.uniform(0.8, 2.3, count),
            generator.uniform(-math.pi, math.pi, count),
            generator.uniform(-math.pi, math.pi, count)
        ))
    if name == "affine":
        return np.column_stack((
            generator.uniform(0.5, 2.0, count),
            generator.uniform(-2.0, 2.0, count),
            generator.uniform(-2.0, 2.0, count)
        ))

    return generator.uniform(-2.0, 2.0, (count, 3))


@pytest.fixture
def groups(heisenberg, su2, affine):
    return {"heisenberg": heisenberg, "su2": su2, "affine": affine}


def test_heisenberg_identity_chain(heisenberg):
    tau = heisenberg.parse("1")

    for point in heisenberg.sample_points:
        lv = lv_coefficients(heisenberg, point)
        assert lv.max_difference(sum_of_squares(heisenberg, point).scaled(0.5)) <= 1e-10
        assert lv.max_difference(div_grad_h(heisenberg, tau, point).scaled(0.5)) <= 1e-10


def test_rotated_frame_adds_a_radial_drift(heisenberg, heisenberg_rotated):
    for point in heisenberg_rotated.sample_points:
        difference = sum_of_squares(heisenberg_rotated, point).minus(
            sum_of_squares(heisenberg, point)
        )
        x, y, _ = point

        assert np.max(np.abs(difference.second)) <= 1e-10
        assert difference.first.tolist() == pytest.approx([x / 2.0, y / 2.0, 0.0], abs = 1e-10)


@pytest.mark.parametrize("theta", [math.pi / 6.0, math.pi / 4.0, math.pi / 3.0, math.pi / 2.0])
def test_su2_volume_and_vertical_scaling(su2, theta):
    point = (theta, 0.4, -1.1)
    reference = lv_coefficients(su2, point)

    assert np.max(np.abs(equality_residual(su2, su2.density("haar"), point).residual)) <= 1e-10
    assert reference.first.tolist() == pytest.approx(
        [0.5 / math.tan(theta), 0.0, 0.0], abs = 1e-10
    )

    for vertical_scaling in (0.5, 1.0, 2.0, 10.0):
        scaled = with_vertical_scaling(su2, vertical_scaling)
        assert lv_coefficients(scaled, point).max_difference(reference) <= 1e-10
        assert np.max(np.abs(equality_residual(scaled, su2.density("haar"), point).residual)) <= 1e-10


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_affine_haar_operators_and_residuals(affine, x):
    point = (x, 0.3, -0.2)
    left, right = haar_left_operator(affine), haar_right_operator(affine)

    assert left.frame_first(point).tolist() == pytest.approx([-1.0, 0.0])
    assert right.frame_first(point).tolist() == pytest.approx([0.0, 0.0], abs = 1e-12)
    assert lv_coefficients(affine, point).max_difference(right(point).scaled(0.5)) <= 1e-10

    right_residual = equality_residual(affine, affine.parse("x^-1"), point).residual
    left_residual = equality_residual(affine, affine.parse("x^-2"), point).residual

    assert np.max(np.abs(right_residual)) <= 1e-10
    assert left_residual.tolist() == pytest.approx([-x, 0.0, 0.0], abs = 1e-10)


def test_haar_densities(heisenberg, su2, affine):
    for point in random_points("heisenberg", 5, 1):
        assert haar_left_density(heisenberg, point) == pytest.approx(1.0, abs = 1e-12)

    for point in random_points("su2", 5, 2):
        assert haar_left_density(su2, point) == pytest.approx(abs(math.sin(point[0])), abs = 1e-12)

    for point in random_points("affine", 5, 3):
        assert haar_left_density(affine, point) == pytest.approx(point[0] ** -2, abs = 1e-12)
        assert haar_right_density(affine, point) == pytest.approx(1.0 / point[0], abs = 1e-12)


@pytest.mark.parametrize("name", GROUPS)
def test_trace_path_equals_density_path(groups, name):
    spec = groups[name]
    operator = haar_left_operator(spec)

    assert haar_path_discrepancy(spec, "left") <= 1e-9
    for point in spec.sample_points:
        assert operator.discrepancy(point) <= 1e-9


@pytest.mark.parametrize("name", ["heisenberg", "affine"])
@pytest.mark.parametrize("source", ["x^2", "y^2", "z", "x*y"])
def test_definitional_lv_agrees_with_local_formula(groups, name, source):
    spec = groups[name]
    f = spec.parse(source)
    sampler = SphereSampler(2, "exact-circle", 16)

    for point in spec.sample_points:
        estimate = lv_definitional(spec, point, f, sampler, 1e-3, 100, threads = 1)
        local_value = apply_operator(lv_coefficients(spec, point), f, point)

        assert abs(estimate - local_value) <= 1e-3


@pytest.mark.parametrize("name", GROUPS)
def test_energy_is_conserved(groups, name):
    spec = groups[name]
    generator = np.random.default_rng(17)

    for point in random_points(name, 20, 7):
        momentum = generator.standard_normal(3)
        trajectory = flow_trajectory(spec, PhaseState(point, momentum), 1.0, 1000, sample_every = 100)

        assert trajectory.max_drift <= 1e-8 * max(1.0, trajectory.energies[0])


@pytest.mark.parametrize("name", GROUPS)
@pytest.mark.parametrize("factor", [0.5, 2.0])
def test_momentum_scaling_is_time_scaling(groups, name, factor):
    spec = groups[name]
    point = random_points(name, 1, 9)[0]
    momentum = np.array([0.15, -0.1, 0.05])

    scaled_momentum = flow(spec, PhaseState(point, factor * momentum), 0.5, 100)
    scaled_time = flow(spec, PhaseState(point, momentum), 0.5 * factor, 100)

    assert np.max(np.abs(scaled_momentum.x - scaled_time.x)) <= 1e-7


@pytest.mark.parametrize("name", GROUPS)
def test_bracket_generating_at_every_sample(groups, name):
    spec = groups[name]

    for point in spec.sample_points:
        assert hormander_rank(spec, point, 2)[0] == 3


@pytest.mark.parametrize("name", GROUPS)
def test_structural_invariants(groups, name):
    spec = groups[name]
    tau = spec.density(DENSITIES[name])
    generator = np.random.default_rng(13)
    angles = generator.uniform(-math.pi, math.pi, 100)
    scalings = generator.uniform(0.1, 10.0, 100)

    for point, angle, vertical_scaling in zip(random_points(name, 100, 13), angles, scalings):
        rotation = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
        rotated = with_horizontal_rotation(spec, rotation)
        stretched = with_vertical_scaling(spec, vertical_scaling)

        B = beta_matrix(spec, point).value
        vertical = g_vertical(spec, point)
        projections = horizontal_projection(spec, point)
        P, Q = projections.P, projections.Q

        assert psd_rank(B) == (True, 2)
        assert psd_rank(vertical) == (True, 2)
        assert np.max(np.abs(P @ P - P)) <= 1e-10
        assert np.max(np.abs(Q @ Q - Q)) <= 1e-10
        assert np.max(np.abs(P @ B - B)) <= 1e-10
        assert np.max(np.abs(B @ vertical - P)) <= 1e-10
        assert np.max(np.abs(g_vertical(stretched, point) - vertical)) <= 1e-10
        assert lv_coefficients(stretched, point).max_difference(lv_coefficients(spec, point)) <= 1e-10
        assert np.max(np.abs(
            equality_residual(stretched, tau, point).residual - equality_residual(spec, tau, point).residual
        )) <= 1e-10
        assert sum_of_squares(rotated, point).max_difference(sum_of_squares(spec, point)) <= 1e-10


def random_expression(generator, depth):
    """
    A random smooth expression in x, y, z that is defined on all of R^3.
    """

    if depth == 0 or generator.random() < 0.2:
        if generator.random() < 0.7:
            index = int(generator.integers(3))
            return variable("xyz"[index], index)
        return constant(float(generator.uniform(0.5, 2.0)))

    left = random_expression(generator, depth - 1)
    choice = int(generator.integers(9))

    if choice < 3:
        return binary("+-*"[choice], left, random_expression(generator, depth - 1))
    if choice == 3:
        right = random_expression(generator, depth - 1)
        return binary("/", left, binary("+", constant(1.0), binary("*", right, right)))
    if choice == 4:
        return binary("^", left, constant(2.0))
    if choice == 5:
        return call("sin" if generator.random() < 0.5 else "cos", left)
    if choice == 6:
        return call("exp", call("sin", left))
    if choice == 7:
        return call("log", binary("+", constant(2.0), call("cos", left)))

    radicand = binary("+", constant(1.0), binary("*", left, left))
    return binary("^", call("sqrt", radicand), constant(1.5))


def test_jets_match_central_differences_on_random_expressions():
    generator = np.random.default_rng(21)
    step = 1e-5
    pairs = 0

    for _ in range(200):
        node = random_expression(generator, 3)

        for point in generator.uniform(0.3, 1.5, (5, 3)):
            jet = eval_jet2(node, point)
            gradient = np.zeros(3)
            hessian = np.zeros((3, 3))

            for k, unit in enumerate(np.eye(3)):
                ahead, behind = point + step * unit, point - step * unit
                gradient[k] = (eval_value(node, ahead) - eval_value(node, behind)) / (2.0 * step)
                hessian[:, k] = (eval_jet1(node, ahead).grad - eval_jet1(node, behind).grad) / (2.0 * step)

            assert np.max(np.abs(jet.grad - gradient) / np.maximum(1.0, np.abs(jet.grad))) <= 1e-6
            assert np.max(np.abs(jet.hess - hessian) / np.maximum(1.0, np.abs(jet.hess))) <= 1e-6
            pairs += 1

    assert pairs == 1000
