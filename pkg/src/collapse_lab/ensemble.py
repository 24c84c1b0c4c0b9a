"""Ensemble-level statistics: Gaussian time smearing, Monte Carlo ensemble
expectations, and the damped ensemble density matrix.

The smearing operator averages a Schrodinger-picture expectation over a
Gaussian time window of width T_cal = sqrt(lambda*t); it is the ensemble
signature of energy-driven collapse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import _kernels
from .hilbert import DomainError, ObservableMatrix, SpectralState, squared_norm
from .engine import CollapseParams
from .rng import trajectory_rng

__all__ = [
    "SmearingKernel",
    "TimeSeries",
    "smear",
    "draw_traj_variates",
    "ensemble_expectation_mc",
    "ensemble_density_matrix",
    "subsystem_expectation",
]

#: the Gaussian window is truncated at 8 widths (mass beyond < 1e-14)
WINDOW_HALF_WIDTH = 8.0


@dataclass(frozen=True)
class SmearingKernel:
    """Gaussian smearing window of width T_cal (time units)."""

    T_cal: float
    quadrature_order: int = 64

    def __post_init__(self):
        if not (math.isfinite(self.T_cal) and self.T_cal >= 0):
            raise DomainError("T_cal must be finite and >= 0")
        if self.quadrature_order < 8 or self.quadrature_order % 2:
            raise DomainError("quadrature_order must be even and >= 8")

    @classmethod
    def from_collapse(cls, params: CollapseParams, t: float, order: int = 64):
        return cls(math.sqrt(params.lam * t), order)


@dataclass(frozen=True)
class TimeSeries:
    """Sampled function of time; linear interpolation, no extrapolation."""

    times: tuple[float, ...]
    values: tuple
    uniform_step: float | None = None

    def __post_init__(self):
        t = np.asarray(self.times, float)
        if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
            raise DomainError("times must be strictly increasing, length >= 2")
        if len(self.values) != t.size:
            raise DomainError("times and values length mismatch")

    def __call__(self, t):
        ts = np.asarray(self.times, float)
        vs = np.asarray(self.values)
        t = np.asarray(t, float)
        if np.any(t < ts[0]) or np.any(t > ts[-1]):
            raise DomainError("TimeSeries evaluated outside its domain")
        if np.iscomplexobj(vs):
            return np.interp(t, ts, vs.real) + 1j * np.interp(t, ts, vs.imag)
        return np.interp(t, ts, vs)


def smear(f, t: float, kernel: SmearingKernel, adaptive: bool = False):
    """Gaussian time-smear of f at t:
    (2*pi)**-0.5 * integral deta exp(-eta^2/2) f(t - T_cal*eta).

    Gauss-Hermite quadrature by default (spectral accuracy for smooth f);
    pass adaptive=True for integrands with steps or kinks, which uses
    adaptive quadrature on the truncated window (tolerance 1e-8).
    For T_cal = 0 this returns f(t) exactly.
    """
    tcal = kernel.T_cal
    if isinstance(f, TimeSeries):
        series = f
        if tcal > 0:
            lo, hi = t - WINDOW_HALF_WIDTH * tcal, t + WINDOW_HALF_WIDTH * tcal
            if lo < series.times[0] or hi > series.times[-1]:
                raise DomainError(
                    "TimeSeries domain too short for the smear window "
                    f"[{lo}, {hi}]"
                )
        f = series
    if tcal == 0.0:
        return f(t)
    if adaptive:
        inv = 1.0 / math.sqrt(2.0 * math.pi)

        def integrand(eta):
            return inv * math.exp(-0.5 * eta * eta) * f(t - tcal * eta)

        val, _ = quad(
            integrand,
            -WINDOW_HALF_WIDTH,
            WINDOW_HALF_WIDTH,
            epsabs=1e-10,
            epsrel=1e-10,
            limit=400,
        )
        return val
    # Gauss-Hermite for weight exp(-x^2); substitute eta = sqrt(2)*x.
    x, w = np.polynomial.hermite.hermgauss(kernel.quadrature_order)
    pts = t - tcal * math.sqrt(2.0) * x
    vals = np.array([f(p) for p in pts])
    return float(np.dot(w, vals) / math.sqrt(math.pi))


def draw_traj_variates(master_seed: int, n_traj: int, n_steps: int):
    """Per-trajectory (uniform, normal) variates from counter-based streams.

    Trajectory i consumes only its own Philox stream keyed by
    (master_seed, i), so the draw is independent of batching or ordering.
    """
    uniforms = np.empty((n_traj, n_steps))
    normals = np.empty((n_traj, n_steps))
    for i in range(n_traj):
        rng = trajectory_rng(master_seed, i)
        uniforms[i] = rng.random(n_steps)
        normals[i] = rng.standard_normal(n_steps)
    return uniforms, normals


def _final_amplitudes(state0: SpectralState, params, t, n_traj, master_seed, n_steps=1):
    """Batched collapse sampling; returns per-trajectory normalized amplitudes.

    The collapse factor is real and positive, so the phase of every component
    is the deterministic -E*t; only the magnitudes are stochastic.
    """
    log_n2, _ = squared_norm(state0)
    energies = state0.energies()
    log_w0 = np.asarray(state0.log_magnitudes) - 0.5 * log_n2
    dts = np.full(n_steps, t / n_steps)
    uniforms, normals = draw_traj_variates(master_seed, n_traj, n_steps)
    weights, b_path = _kernels.traj_collapse_paths(
        energies, log_w0, params.lam, dts, uniforms, normals
    )
    phases = np.asarray(state0.phases) - energies * t
    amps = np.sqrt(weights) * np.exp(1j * phases)
    return amps, b_path[:, -1]


def ensemble_expectation_mc(
    state0: SpectralState,
    params: CollapseParams,
    t: float,
    obs: ObservableMatrix,
    n_traj: int,
    master_seed: int,
    n_steps: int = 1,
) -> tuple[float, float]:
    """Monte Carlo ensemble expectation of obs at time t, with standard error.

    Trajectories are sampled with the exact transition kernel (one step by
    default; the marginal law is step-schedule invariant).  Deterministic
    given master_seed.
    """
    if n_traj < 2:
        raise DomainError("n_traj must be >= 2")
    if obs.basis != state0.levels:
        raise DomainError("observable basis does not match state levels")
    amps, _ = _final_amplitudes(state0, params, t, n_traj, master_seed, n_steps)
    vals = np.einsum("ti,ij,tj->t", amps.conj(), obs.entries, amps).real
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(n_traj))
    return mean, se


def ensemble_density_matrix(
    state0: SpectralState, params: CollapseParams, t: float
) -> ObservableMatrix:
    """Closed-form ensemble density matrix in the energy basis at time t.

    The pure unitary projector is damped entrywise by
    exp(-lambda*t*(E'-E)^2/2); diagonals (the energy distribution) are
    untouched for all t.
    """
    if t < 0:
        raise DomainError("t must be >= 0")
    log_n2, _ = squared_norm(state0)
    e = state0.energies()
    amps = state0.amplitudes(log_shift=0.5 * log_n2) * np.exp(-1j * e * t)
    rho = np.outer(amps, amps.conj())
    damp = np.exp(-0.5 * params.lam * t * (e[:, None] - e[None, :]) ** 2)
    rho = rho * damp
    # set the diagonal phase-free so it is exactly time-invariant, not
    # merely invariant up to rounding of |a*exp(-iEt)|^2
    weights = np.exp(2.0 * (np.asarray(state0.log_magnitudes) - 0.5 * log_n2))
    np.fill_diagonal(rho, weights)
    return ObservableMatrix(state0.levels, rho)


def ensemble_density_matrix_mc(
    state0: SpectralState,
    params: CollapseParams,
    t: float,
    n_traj: int,
    master_seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo density matrix (mean of normalized projectors) and the
    entrywise standard error (complex: SE of real and imag parts in
    quadrature).  Cross-check for `ensemble_density_matrix`.
    """
    amps, _ = _final_amplitudes(state0, params, t, n_traj, master_seed)
    projs = amps[:, :, None] * amps.conj()[:, None, :]
    mean = projs.mean(axis=0)
    se = np.sqrt(
        np.var(projs.real, axis=0, ddof=1) + np.var(projs.imag, axis=0, ddof=1)
    ) / math.sqrt(n_traj)
    return mean, se


def subsystem_expectation(
    state1_fn, obs1: ObservableMatrix, t: float, kernel: SmearingKernel,
    adaptive: bool = False,
):
    """Smeared expectation of a noninteracting subsystem observable.

    ``state1_fn`` maps a time to the subsystem's unitary Schrodinger state;
    the result is the smear of tau -> <psi1,tau|V1|psi1,tau> at t.
    """
    from .hilbert import expectation

    return smear(lambda tau: expectation(state1_fn(tau), obs1), t, kernel,
                 adaptive=adaptive)
