import math

import numpy as np
import pytest

from src.SubRiem.flow import (
    PhaseState, SphereSampler, default_sampler, hj_rhs, flow_trajectory, flow,
    initial_momentum, sample_second_differences, lv_definitional
)
from src.SubRiem.expr import eval_value
from src.SubRiem.geometry import lv_coefficients, apply_operator, hamiltonian
from src.SubRiem.manifold import from_document
from src.SubRiem.utils.errors import FlowDomainError


def random_states(count, seed = 7):
    generator = np.random.default_rng(seed)
    return [
        PhaseState(generator.uniform(-2.0, 2.0, 3), generator.uniform(-1.0, 1.0, 3))
        for _ in range(count)
    ]


def test_phase_state_converts_to_arrays():
    state = PhaseState([1, 2, 3], (0, 0, 1))

    assert state.x.dtype == float
    assert state.to_dict() == {"x": [1.0, 2.0, 3.0], "p": [0.0, 0.0, 1.0]}
    assert state.is_finite()
    assert not PhaseState([math.nan, 0.0], [0.0, 0.0]).is_finite()


def test_hamilton_jacobi_right_hand_side(heisenberg):
    tangent = hj_rhs(heisenberg, PhaseState((2.0, -1.0, 0.0), (0.0, 0.0, 1.0)))

    assert tangent.x.tolist() == pytest.approx([0.5, 1.0, 1.25])
    assert tangent.p.tolist() == pytest.approx([-0.5, 0.25, 0.0])


def test_heisenberg_straight_line(heisenberg):
    final = flow(heisenberg, PhaseState((0.0, 0.0, 0.0), (1.0, 0.0, 0.0)), 1.0, 10)

    assert final.x.tolist() == pytest.approx([1.0, 0.0, 0.0], abs = 1e-12)
    assert final.p.tolist() == pytest.approx([1.0, 0.0, 0.0], abs = 1e-12)


def test_zero_momentum_is_stationary(su2):
    start = PhaseState((1.0, 0.5, -0.2), (0.0, 0.0, 0.0))
    final = flow(su2, start, 3.0, 20)

    assert np.array_equal(final.x, start.x)
    assert not final.p.any()


def test_vertical_momentum_is_conserved_on_heisenberg(heisenberg):
    for state in random_states(5):
        final = flow(heisenberg, state, 1.0, 50)
        assert final.p[2] == state.p[2]


def test_energy_drift_is_small(heisenberg, su2):
    for state in random_states(5):
        trajectory = flow_trajectory(heisenberg, state, 1.0, 200, sample_every = 20)

        assert len(trajectory.states) == 11
        assert trajectory.times[-1] == pytest.approx(1.0)
        assert trajectory.energies[0] == pytest.approx(hamiltonian(heisenberg, state.x, state.p))
        assert trajectory.max_drift <= 1e-8 * max(1.0, trajectory.energies[0])

    start = PhaseState((1.0, 0.3, 0.1), (0.2, -0.4, 0.3))
    trajectory = flow_trajectory(su2, start, 1.0, 200)
    assert len(trajectory.states) == 2
    assert trajectory.max_drift <= 1e-8


def test_negative_time_flows_the_negated_momentum(heisenberg):
    x0, p0 = np.array([0.5, -1.0, 2.0]), np.array([0.3, 0.7, -0.4])

    backward = flow(heisenberg, PhaseState(x0, p0), -0.5, 50)
    forward = flow(heisenberg, PhaseState(x0, -p0), 0.5, 50)

    assert np.array_equal(backward.x, forward.x)
    assert np.array_equal(backward.p, -forward.p)

    trajectory = flow_trajectory(heisenberg, PhaseState(x0, p0), -0.5, 10)
    assert trajectory.times == pytest.approx([0.0, -0.5])
    assert np.array_equal(trajectory.states[0].p, p0)


def test_flow_is_reversible(su2):
    start = PhaseState((1.2, 0.4, -0.8), (0.5, -0.3, 0.2))
    there = flow(su2, start, 0.8, 200)
    back = flow(su2, PhaseState(there.x, -there.p), 0.8, 200)

    assert np.max(np.abs(back.x - start.x)) <= 1e-8
    assert np.max(np.abs(back.p + start.p)) <= 1e-8


def test_steps_must_be_positive(heisenberg):
    with pytest.raises(ValueError):
        flow(heisenberg, PhaseState((0.0, 0.0, 0.0), (1.0, 0.0, 0.0)), 1.0, 0)


def test_leaving_the_domain_names_the_step():
    spec = from_document({
        "name": "half-plane",
        "dimension": 2,
        "horizontal_rank": 1,
        "coordinates": ["x", "y"],
        "full_frame": [["1", "sqrt(x)"], ["0", "1"]],
        "sample_points": [[1.0, 0.0]]
    })

    with pytest.raises(FlowDomainError) as exc_info:
        flow(spec, PhaseState((1.0, 0.0), (-1.0, 0.0)), 2.0, 20)

    assert exc_info.value.step >= 10
    assert exc_info.value.exit_code == 3


@pytest.mark.parametrize("m, rule, count", [
    (3, "exact-circle", 8),
    (2, "antithetic-uniform", 7),
    (2, "gauss", 8),
    (0, "antithetic-uniform", 8)
])
def test_sampler_rejects_bad_settings(m, rule, count):
    with pytest.raises(ValueError):
        SphereSampler(m, rule, count)


def test_exact_circle_sampler():
    sampler = SphereSampler(2, "exact-circle", 8)
    samples = sampler.samples()

    assert samples.shape == (8, 2)
    assert np.allclose(np.linalg.norm(samples, axis = 1), 1.0)
    assert np.array_equal(samples[4:], -samples[:4])
    assert sampler.antipode(0) == 4
    assert sampler.antipode(5) == 1
    assert SphereSampler(2, "exact-circle", 5).antipode(0) is None


def test_antithetic_sampler_is_seeded():
    first = SphereSampler(3, "antithetic-uniform", 6, seed = 4).samples()
    again = SphereSampler(3, "antithetic-uniform", 6, seed = 4).samples()
    other = SphereSampler(3, "antithetic-uniform", 6, seed = 5).samples()

    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)
    assert np.array_equal(first[3:], -first[:3])


def test_default_sampler(heisenberg, euclidean3):
    assert default_sampler(heisenberg).rule == "exact-circle"

    sampler = default_sampler(euclidean3, 5)
    assert (sampler.rule, sampler.count, sampler.m) == ("antithetic-uniform", 6, 3)


def test_initial_momentum_pairs_to_the_direction(heisenberg):
    point = (2.0, -1.0, 0.0)
    momentum = initial_momentum(heisenberg, point, (0.6, 0.8))

    assert momentum.tolist() == pytest.approx([0.6, 0.8, 0.0])
    assert hamiltonian(heisenberg, point, momentum) == pytest.approx(0.5)


@pytest.mark.parametrize("source, expected", [("x^2 + y^2", 2.0), ("z", 0.0), ("1", 0.0)])
def test_definitional_lv_on_heisenberg(heisenberg, source, expected):
    sampler = default_sampler(heisenberg, 16)
    f = heisenberg.parse(source)

    value = lv_definitional(heisenberg, (1.0, 2.0, 3.0), f, sampler, 1e-3, 10, threads = 1)
    assert value == pytest.approx(expected, abs = 1e-5)


def test_definitional_lv_matches_coefficients_on_su2(su2):
    sampler = default_sampler(su2, 16)
    point = (math.pi / 3.0, 0.2, 0.5)
    f = su2.parse("cos(theta) + sin(phi)*cos(psi)")

    expected = apply_operator(lv_coefficients(su2, point), f, point)
    value = lv_definitional(su2, point, f, sampler, 1e-3, 20, richardson = True, threads = 2)

    assert value == pytest.approx(expected, abs = 1e-5)


def test_second_differences_per_sample(heisenberg):
    sampler = SphereSampler(2, "exact-circle", 4)
    f = heisenberg.parse("x^2")

    estimates = sample_second_differences(heisenberg, (0.0, 0.0, 0.0), f, sampler, 1e-2, 5)
    assert estimates.tolist() == pytest.approx([2.0, 0.0, 2.0, 0.0], abs = 1e-8)

    with pytest.raises(ValueError):
        sample_second_differences(heisenberg, (0.0, 0.0, 0.0), f, sampler, 0.0, 5)


@pytest.fixture
def groups(heisenberg, su2, affine):
    return {"heisenberg": heisenberg, "su2": su2, "affine": affine}


def second_differences_from_flows(spec, point, f, sampler, h, t_steps):
    point = np.asarray(point, dtype = float)
    centre = f(point)
    estimates = []

    for direction in sampler.samples():
        momentum = initial_momentum(spec, point, direction)
        ahead = flow(spec, PhaseState(point, momentum), h, t_steps).x
        behind = flow(spec, PhaseState(point, -momentum), h, t_steps).x
        estimates.append((f(ahead) - 2.0 * centre + f(behind)) / (h * h))

    return np.array(estimates)


@pytest.mark.parametrize("name, point, source", [
    ("heisenberg", (1.0, 2.0, 3.0), "x^2*y + z"),
    ("su2", (math.pi / 3.0, 0.2, 0.5), "cos(theta) + sin(phi)*cos(psi)"),
    ("affine", (1.0, 0.3, -0.2), "x^2 + y*z")
])
@pytest.mark.parametrize("count", [8, 5])
def test_second_differences_match_separate_backward_flows(groups, name, point, source, count):
    spec = groups[name]
    node = spec.parse(source)
    sampler = SphereSampler(2, "exact-circle", count)

    expected = second_differences_from_flows(
        spec, point, lambda x: eval_value(node, x), sampler, 1e-2, 10
    )
    estimates = sample_second_differences(spec, point, node, sampler, 1e-2, 10, threads = 1)

    assert estimates.tolist() == pytest.approx(expected.tolist(), rel = 1e-9, abs = 1e-9)


def test_odd_sampler_has_no_antipodes(heisenberg):
    sampler = SphereSampler(2, "exact-circle", 5)
    angles = 2.0 * math.pi * np.arange(5) / 5.0

    assert [sampler.antipode(index) for index in range(5)] == [None] * 5

    estimates = sample_second_differences(
        heisenberg, (0.0, 0.0, 0.0), heisenberg.parse("x^2"), sampler, 1e-2, 5, threads = 1
    )
    assert estimates.tolist() == pytest.approx((2.0 * np.cos(angles) ** 2).tolist(), abs = 1e-8)
    assert float(np.mean(estimates)) == pytest.approx(1.0, abs = 1e-8)


@pytest.mark.parametrize("name, point", [
    ("heisenberg", (1.0, 2.0, 3.0)),
    ("su2", (math.pi / 3.0, 0.2, 0.5)),
    ("affine", (1.0, 0.3, -0.2))
])
def test_flow_retraces_itself_with_reversed_momentum(groups, name, point):
    spec = groups[name]

    for direction in SphereSampler(2, "exact-circle", 6).samples():
        start = PhaseState(point, initial_momentum(spec, point, direction))
        end = flow(spec, start, 0.1, 50)
        back = flow(spec, PhaseState(end.x, -end.p), 0.1, 50)

        assert np.max(np.abs(back.x - start.x)) <= 1e-9
        assert np.max(np.abs(back.p + start.p)) <= 1e-9
