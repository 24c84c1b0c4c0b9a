"""Nonunitary collapse evolution and the stochastic record process B(t).

The evolution multiplies each energy amplitude by a Gaussian centered on
B/(2*lambda*t); the record increment over a step of length dt is drawn from
the exact Gaussian-mixture transition kernel, so the sampler is exact at any
step size (no SDE discretization error) and step refinement leaves all
finite-time marginals invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import (
    DiscreteSpectrum,
    DomainError,
    SpectralState,
    energy_distribution,
    squared_norm,
)

__all__ = [
    "CollapseParams",
    "TrajectoryPoint",
    "Trajectory",
    "evolve",
    "evolve_from",
    "record_marginal_density",
    "sample_step",
    "simulate_trajectory",
    "collapse_diagnostic",
]


@dataclass(frozen=True)
class CollapseParams:
    """Collapse rate lambda, units energy^-2 time^-1 (hbar = 1)."""

    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise DomainError(f"lambda must be finite and positive, got {self.lam}")


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    B: float


@dataclass(frozen=True)
class Trajectory:
    """One realized record path; reproducible from (seed, step schedule)."""

    points: tuple[TrajectoryPoint, ...]
    seed: int

    def __post_init__(self):
        ts = [p.t for p in self.points]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise DomainError("trajectory times must be strictly increasing")

    def times(self) -> np.ndarray:
        return np.array([p.t for p in self.points])

    def records(self) -> np.ndarray:
        return np.array([p.B for p in self.points])


def _apply_increment(
    state: SpectralState, params: CollapseParams, dt: float, dB: float
) -> SpectralState:
    """Apply one collapse step of duration dt with record increment dB.

    The exponent -(1/(4*lambda*dt))*(dB - 2*lambda*dt*E)^2 is expanded so the
    E-independent dB^2 term is a single scalar subtraction: the per-component
    pieces (-lambda*dt*E^2 + dB*E) stay well-scaled even when |dB| is huge.
    """
    lam = params.lam
    e = state.energies()
    const = dB * dB / (4.0 * lam * dt)
    dlog = -lam * dt * e * e + dB * e - const
    lm = np.asarray(state.log_magnitudes) + dlog
    ph = np.asarray(state.phases) - e * dt
    return SpectralState(
        state.levels,
        tuple(float(x) for x in lm),
        tuple(float(x) for x in ph),
        normalized_flag=False,
    )


def evolve(
    state0: SpectralState, params: CollapseParams, t: float, B: float
) -> SpectralState:
    """Evolve from time 0 (with B(0) = 0 by convention) to time t at record B.

    Returns the unnormalized state; t = 0 is the identity.
    """
    if t < 0:
        raise DomainError("t must be >= 0")
    if t == 0:
        return state0
    return _apply_increment(state0, params, t, B)


def evolve_from(
    state_t0: SpectralState,
    params: CollapseParams,
    t0: float,
    t: float,
    B_t0: float,
    B_t: float,
) -> SpectralState:
    """Evolve an already-collapsed state from (t0, B_t0) to (t, B_t).

    Composition with `evolve` reproduces the one-shot evolution after
    normalization: the t0/B_t0 dependence cancels.
    """
    if not t > t0 >= 0:
        raise DomainError("need t > t0 >= 0")
    return _apply_increment(state_t0, params, t - t0, B_t - B_t0)


def record_marginal_density(
    state_t0: SpectralState,
    params: CollapseParams,
    dt: float,
    dB_grid: np.ndarray,
) -> np.ndarray:
    """Density of the record increment dB over a step of length dt.

    A Gaussian mixture: one component per energy in the state's spectrum,
    mean 2*lambda*dt*E, variance lambda*dt, weighted by the energy
    distribution.  Integrates to 1 over the real line.
    """
    if dt <= 0:
        raise DomainError("dt must be positive")
    e, w = energy_distribution(state_t0).as_arrays()
    dB = np.asarray(dB_grid, float)
    var = params.lam * dt
    means = 2.0 * var * e
    z = (dB[..., None] - means) ** 2 / (2.0 * var)
    dens = (w * np.exp(-z)).sum(axis=-1) / math.sqrt(2.0 * math.pi * var)
    return dens


def sample_step(
    state_t0: SpectralState,
    params: CollapseParams,
    dt: float,
    rng: np.random.Generator,
) -> tuple[float, SpectralState]:
    """Draw one exact record increment and return (dB, evolved state).

    Mixture sampling: pick an energy from the state's spectrum, then
    dB ~ Normal(2*lambda*dt*E, lambda*dt).  This realizes exactly the
    density of `record_marginal_density`.
    """
    if dt <= 0:
        raise DomainError("dt must be positive")
    e, w = energy_distribution(state_t0).as_arrays()
    idx = rng.choice(len(e), p=w)
    var = params.lam * dt
    dB = 2.0 * var * e[idx] + math.sqrt(var) * rng.standard_normal()
    return float(dB), _apply_increment(state_t0, params, dt, dB)


def simulate_trajectory(
    state0: SpectralState,
    params: CollapseParams,
    times: np.ndarray,
    rng: np.random.Generator,
    seed: int = 0,
) -> tuple[Trajectory, SpectralState]:
    """Sample B(t) on a strictly increasing time grid starting from t = 0."""
    times = np.asarray(times, float)
    if times.size == 0 or times[0] <= 0 or np.any(np.diff(times) <= 0):
        raise DomainError("times must be strictly increasing and positive")
    points = [TrajectoryPoint(0.0, 0.0)]
    state = state0
    t_prev, b_prev = 0.0, 0.0
    for t in times:
        dB, state = sample_step(state, params, t - t_prev, rng)
        b_prev += dB
        t_prev = t
        points.append(TrajectoryPoint(float(t), b_prev))
    return Trajectory(tuple(points), seed), state


def collapse_diagnostic(
    state: SpectralState, threshold: float = 0.999
) -> tuple[bool, float | None]:
    """Report whether a single energy carries at least `threshold` weight."""
    if not 0.0 < threshold < 1.0:
        raise DomainError("threshold must lie in (0, 1)")
    e, w = energy_distribution(state).as_arrays()
    i = int(np.argmax(w))
    if w[i] >= threshold:
        return True, float(e[i])
    return False, None
