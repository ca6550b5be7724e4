"""
--- Hamilton-Jacobi Flow ---

Integrates the Hamilton-Jacobi equations of H(x, p) = ½ pᵀβ(x)p with a
fixed step classical Runge-Kutta scheme and estimates L^V f(x) from its
definition as the sphere average of second time derivatives of f along
normal geodesics.

License:  Apache-2.0 license
"""

import math
from dataclasses import dataclass, field
from typing import Final, List, Optional, Sequence, Tuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np

try:
    from src.SubRiem.expr import (
        ExprNode, evaluate, eval_value, gradient_seeds, gradient_of, real_value
    )
    from src.SubRiem.manifold import ManifoldSpec
    from src.SubRiem.geometry import point_frame, g_vertical
    from src.SubRiem.utils.cons import (
        SAMPLER_RULES, DEFAULT_SAMPLE_COUNT, DEFAULT_SEED, DEFAULT_STEP_SIZE, DEFAULT_FLOW_STEPS
    )
    from src.SubRiem.utils.errors import FlowDomainError, DomainError
    from src.SubRiem.utils.utils import memoize, point_key, get_thread_count, max_abs
except ImportError:
    from expr import ExprNode, evaluate, eval_value, gradient_seeds, gradient_of, real_value
    from manifold import ManifoldSpec
    from geometry import point_frame, g_vertical
    from utils.cons import (
        SAMPLER_RULES, DEFAULT_SAMPLE_COUNT, DEFAULT_SEED, DEFAULT_STEP_SIZE, DEFAULT_FLOW_STEPS
    )
    from utils.errors import FlowDomainError, DomainError
    from utils.utils import memoize, point_key, get_thread_count, max_abs


BLOW_UP_BOUND: Final[float] = 1e150


@dataclass(frozen = True, eq = False)
class PhaseState:
    """
    A point x with a covector p. Also used for tangents (ẋ, ṗ).
    """

    x: np.ndarray
    p: np.ndarray


    def __post_init__(self) -> None:
        object.__setattr__(self, "x", np.array(self.x, dtype = float))
        object.__setattr__(self, "p", np.array(self.p, dtype = float))


    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.p)))


    def to_dict(self) -> dict:
        return {"x": self.x.tolist(), "p": self.p.tolist()}


@dataclass(frozen = True)
class SphereSampler:
    """
    Deterministic unit vectors on S^{m-1}.

    "exact-circle" (m = 2) uses equally spaced angles; "antithetic-uniform"
    draws uniform directions from numpy's default generator seeded with
    `seed` and emits each together with its negative. With an even count
    both rules return the second half as the negatives of the first half.
    """

    m: int
    rule: str = "exact-circle"
    count: int = DEFAULT_SAMPLE_COUNT
    seed: int = DEFAULT_SEED


    def __post_init__(self) -> None:
        if self.rule not in SAMPLER_RULES:
            raise ValueError(f"unknown sampler rule '{self.rule}'")
        if self.m < 1 or self.count < 1:
            raise ValueError("m and count must be positive")
        if self.rule == "exact-circle" and self.m != 2:
            raise ValueError("the exact-circle rule needs m = 2")
        if self.rule == "antithetic-uniform" and self.count % 2 != 0:
            raise ValueError("the antithetic-uniform rule needs an even count")


    def samples(self) -> np.ndarray:
        """
        The unit vectors, shape (count, m).
        """

        return _sphere_samples(self)


    def antipode(self, index: int) -> Optional[int]:
        """
        Index of the sample equal to minus sample `index`, if there is one.
        """

        if self.count % 2 != 0:
            return None

        half = self.count // 2
        return index + half if index < half else index - half


@memoize(max_entries = 64)
def _sphere_samples(sampler: SphereSampler) -> np.ndarray:
    if sampler.rule == "exact-circle":
        if sampler.count % 2 == 0:
            half = sampler.count // 2
            angles = 2.0 * math.pi * np.arange(half) / sampler.count
            first = np.column_stack((np.cos(angles), np.sin(angles)))
        else:
            angles = 2.0 * math.pi * np.arange(sampler.count) / sampler.count
            samples = np.column_stack((np.cos(angles), np.sin(angles)))
            samples.setflags(write = False)
            return samples
    else:
        generator = np.random.default_rng(sampler.seed)
        first = generator.standard_normal((sampler.count // 2, sampler.m))
        first /= np.linalg.norm(first, axis = 1)[:, None]

    samples = np.vstack((first, -first))
    samples.setflags(write = False)
    return samples


def default_sampler(spec: ManifoldSpec, count: int = DEFAULT_SAMPLE_COUNT,
                    seed: int = DEFAULT_SEED) -> SphereSampler:
    """
    exact-circle for m = 2, antithetic-uniform otherwise.
    """

    if spec.horizontal_rank == 2:
        return SphereSampler(2, "exact-circle", count, seed)

    return SphereSampler(spec.horizontal_rank, "antithetic-uniform", count + count % 2, seed)


def _horizontal_jets(spec: ManifoldSpec, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    dimension, rank = spec.dimension, spec.horizontal_rank
    seeds = gradient_seeds(x)

    values = np.zeros((dimension, rank))
    gradients = np.zeros((dimension, rank, dimension))

    for k in range(rank):
        for i, node in enumerate(spec.full_frame[k]):
            result = evaluate(node, seeds)
            values[i, k] = real_value(result)
            gradients[i, k] = gradient_of(result, dimension)

    return values, gradients


def hj_rhs(spec: ManifoldSpec, state: PhaseState) -> PhaseState:
    """
    Right hand side of the Hamilton-Jacobi equations,
    ẋ = β(x)p and ṗ_i = -½ Σ_ab p_a p_b ∂_i β^{ab}.

    Args:
        spec (ManifoldSpec): The spec.
        state (PhaseState): The current (x, p).

    Returns:
        PhaseState: The tangent (ẋ, ṗ).
    """

    values, gradients = _horizontal_jets(spec, state.x)
    pairing = values.T @ state.p

    x_dot = values @ pairing
    p_dot = -np.einsum("k,a,aki->i", pairing, state.p, gradients)

    return PhaseState(x_dot, p_dot)


def _energy(spec: ManifoldSpec, state: PhaseState) -> float:
    values = np.array([
        [eval_value(node, state.x) for node in spec.full_frame[k]]
        for k in range(spec.horizontal_rank)
    ])
    pairing = values @ state.p
    return 0.5 * float(pairing @ pairing)


def _rk4_step(spec: ManifoldSpec, state: PhaseState, step: float) -> PhaseState:
    def shifted(base: PhaseState, tangent: PhaseState, factor: float) -> PhaseState:
        return PhaseState(base.x + factor * tangent.x, base.p + factor * tangent.p)

    k1 = hj_rhs(spec, state)
    k2 = hj_rhs(spec, shifted(state, k1, 0.5 * step))
    k3 = hj_rhs(spec, shifted(state, k2, 0.5 * step))
    k4 = hj_rhs(spec, shifted(state, k3, step))

    return PhaseState(
        state.x + step / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
        state.p + step / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p)
    )


@dataclass(frozen = True, eq = False)
class Trajectory:
    """
    Sampled states of a flow with their Hamiltonian values.
    """

    times: List[float]
    states: List[PhaseState]
    energies: List[float] = field(default_factory = list)


    @property
    def final(self) -> PhaseState:
        return self.states[-1]


    @property
    def max_drift(self) -> float:
        if not self.energies:
            return 0.0

        return max(abs(energy - self.energies[0]) for energy in self.energies)


def flow_trajectory(spec: ManifoldSpec, initial: PhaseState, t: float, steps: int,
                    sample_every: Optional[int] = None, track_energy: bool = True) -> Trajectory:
    """
    Integrate the flow for time t with `steps` fixed RK4 steps.

    Args:
        spec (ManifoldSpec): The spec.
        initial (PhaseState): The initial (x, p).
        t (float): The flow time, negative values flow the negated momentum.
        steps (int): Number of steps, at least 1.
        sample_every (Optional[int]): Keep every n-th state, only the
                                      endpoints when omitted.
        track_energy (bool): Record H at every kept state.

    Returns:
        Trajectory: The kept states, always including the first and last.

    Raises:
        FlowDomainError: If the trajectory leaves the domain or blows up.
    """

    if steps < 1:
        raise ValueError("steps must be at least 1")

    state = PhaseState(initial.x, initial.p)
    sign = 1.0
    if t < 0:
        t, sign, state = -t, -1.0, PhaseState(state.x, -state.p)

    step = t / steps

    def kept(current: PhaseState) -> PhaseState:
        return current if sign > 0 else PhaseState(current.x, -current.p)

    times, states, energies = [0.0], [kept(state)], []

    def energy_of(current: PhaseState, index: int) -> float:
        try:
            return _energy(spec, current)
        except DomainError as exc:
            raise FlowDomainError(str(exc), index) from exc

    if track_energy:
        energies.append(energy_of(state, 0))

    for index in range(1, steps + 1):
        try:
            state = _rk4_step(spec, state, step)
        except DomainError as exc:
            raise FlowDomainError(f"trajectory left the domain: {exc}", index) from exc

        if not state.is_finite() or max_abs(state.x) > BLOW_UP_BOUND\
            or max_abs(state.p) > BLOW_UP_BOUND:

            raise FlowDomainError("non-finite state", index)

        if index == steps or (sample_every is not None and index % sample_every == 0):
            times.append(sign * index * step)
            states.append(kept(state))
            if track_energy:
                energies.append(energy_of(state, index))

    return Trajectory(times, states, energies)


def flow(spec: ManifoldSpec, initial: PhaseState, t: float, steps: int) -> PhaseState:
    """
    The time t flow Φ_t(x, p), fixed step RK4 with step t / steps.

    Args:
        spec (ManifoldSpec): The spec.
        initial (PhaseState): The initial (x, p).
        t (float): The flow time.
        steps (int): Number of steps, at least 1.

    Returns:
        PhaseState: The final state.

    Raises:
        FlowDomainError: If the trajectory leaves the domain; carries the step index.
    """

    return flow_trajectory(spec, initial, t, steps, track_energy = False).final


def initial_momentum(spec: ManifoldSpec, x: Sequence[float], direction: Sequence[float]) -> np.ndarray:
    """
    The covector g^V(X) for the horizontal vector X = Σ u^k X_k(x).
    """

    frame = point_frame(spec, x)
    vector = frame.F[:, :spec.horizontal_rank] @ np.asarray(direction, dtype = float)

    return g_vertical(spec, x) @ vector


@memoize(max_entries = 256)
def _leg_endpoints(spec: ManifoldSpec, key: Tuple[float, ...], sampler: SphereSampler,
                   h: float, t_steps: int, threads: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Endpoints x(h) of the forward leg and x(-h) of the backward leg for
    every sample; a backward leg reuses the forward leg of the antipode.
    """

    samples = sampler.samples()
    momenta = [initial_momentum(spec, key, direction) for direction in samples]
    origin = np.array(key)

    def leg(momentum: np.ndarray) -> np.ndarray:
        return flow(spec, PhaseState(origin, momentum), h, t_steps).x

    with ThreadPoolExecutor(max_workers = threads) as executor:
        forward = list(executor.map(leg, momenta))

        missing = [
            index for index in range(len(samples)) if sampler.antipode(index) is None
        ]
        extra = dict(zip(missing, executor.map(lambda index: leg(-momenta[index]), missing)))

    backward = [
        forward[sampler.antipode(index)] if index not in extra else extra[index]
        for index in range(len(samples))
    ]

    forward_array, backward_array = np.array(forward), np.array(backward)
    forward_array.setflags(write = False)
    backward_array.setflags(write = False)

    return forward_array, backward_array


def _second_differences(spec: ManifoldSpec, x: Sequence[float], f: ExprNode,
                        sampler: SphereSampler, h: float, t_steps: int,
                        threads: int) -> np.ndarray:
    key = point_key(x)
    forward, backward = _leg_endpoints(spec, key, sampler, float(h), int(t_steps), threads)

    centre = eval_value(f, key)
    return np.array([
        (eval_value(f, ahead) - 2.0 * centre + eval_value(f, behind)) / (h * h)
        for ahead, behind in zip(forward, backward)
    ])


def sample_second_differences(spec: ManifoldSpec, x: Sequence[float], f: ExprNode,
                              sampler: SphereSampler, h: float = DEFAULT_STEP_SIZE,
                              t_steps: int = DEFAULT_FLOW_STEPS, richardson: bool = False,
                              threads: Optional[int] = None) -> np.ndarray:
    """
    Per-sample estimates of d²/dt² f(Φ_t(x, g^V(X))) at t = 0.

    Args:
        spec (ManifoldSpec): The spec.
        x (Sequence[float]): The base point.
        f (ExprNode): The test function.
        sampler (SphereSampler): The unit directions u, X = Σ u^k X_k(x).
        h (float): Time step of the central difference.
        t_steps (int): RK4 steps per leg.
        richardson (bool): Combine step sizes h and h/2 as (4·D(h/2) - D(h)) / 3.
        threads (Optional[int]): Worker threads, capped by SUBRIEM_THREADS.

    Returns:
        np.ndarray: One estimate per sample, in sampler order.
    """

    if not h > 0:
        raise ValueError("h must be positive")

    threads = get_thread_count(threads)
    coarse = _second_differences(spec, x, f, sampler, h, t_steps, threads)
    if not richardson:
        return coarse

    fine = _second_differences(spec, x, f, sampler, h / 2.0, t_steps, threads)
    return (4.0 * fine - coarse) / 3.0


def lv_definitional(spec: ManifoldSpec, x: Sequence[float], f: ExprNode,
                    sampler: SphereSampler, h: float = DEFAULT_STEP_SIZE,
                    t_steps: int = DEFAULT_FLOW_STEPS, richardson: bool = False,
                    threads: Optional[int] = None) -> float:
    """
    L^V f(x) from its definition: the average over unit horizontal vectors
    X of d²/dt²|₀ f(Φ_t(x, g^V(X))), with the sphere measure normalized to
    a probability measure. Flow for negative time uses the negated momentum.

    Args:
        spec (ManifoldSpec): The spec.
        x (Sequence[float]): The base point.
        f (ExprNode): The test function.
        sampler (SphereSampler): Sphere quadrature.
        h (float): Time step of the central difference.
        t_steps (int): RK4 steps per leg.
        richardson (bool): Use Richardson extrapolation over h and h/2.
        threads (Optional[int]): Worker threads.

    Returns:
        float: The estimate of L^V f(x).

    Raises:
        FlowDomainError: If a trajectory leaves the domain.
    """

    estimates = sample_second_differences(spec, x, f, sampler, h, t_steps, richardson, threads)
    return float(np.mean(estimates))


if __name__ == "__main__":
    print("flow.py: This file is not designed to be executed.")
