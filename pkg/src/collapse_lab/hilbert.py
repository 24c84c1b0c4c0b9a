"""Spectral data model: states over labeled energy levels and the
numerically safe norm / expectation primitives shared by every other module.

Amplitudes are stored as (log-magnitude, phase) pairs.  The collapse
Gaussian suppresses off-resonant levels by factors like exp(-lambda*t*dE^2),
which underflows double precision long before the physics gets boring, so
all norms go through log-sum-exp and ratios are formed after subtracting a
common log offset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

__all__ = [
    "EnergyLevel",
    "SpectralState",
    "ObservableMatrix",
    "DiscreteSpectrum",
    "squared_norm",
    "expectation",
    "energy_distribution",
]

NEG_INF = float("-inf")


class DomainError(ValueError):
    """Raised when an operation's precondition is violated."""


@dataclass(frozen=True, order=True)
class EnergyLevel:
    """One energy eigenvalue together with its degeneracy label."""

    energy: float
    degeneracy_index: int = 0

    def __post_init__(self):
        if not math.isfinite(self.energy):
            raise DomainError(f"energy must be finite, got {self.energy}")
        if self.degeneracy_index < 0:
            raise DomainError("degeneracy_index must be >= 0")


@dataclass(frozen=True)
class SpectralState:
    """Complex amplitudes over energy levels, in log-magnitude/phase form.

    Components are kept in canonical order (energy, then degeneracy index)
    so that equality and golden-file comparisons are deterministic.
    """

    levels: tuple[EnergyLevel, ...]
    log_magnitudes: tuple[float, ...]
    phases: tuple[float, ...]
    normalized_flag: bool = False

    def __post_init__(self):
        n = len(self.levels)
        if n == 0:
            raise DomainError("state must have at least one component")
        if len(self.log_magnitudes) != n or len(self.phases) != n:
            raise DomainError("levels, log_magnitudes, phases must have equal length")
        if len(set(self.levels)) != n:
            raise DomainError("(energy, degeneracy_index) pairs must be unique")
        order = sorted(range(n), key=lambda i: self.levels[i])
        if order != list(range(n)):
            object.__setattr__(self, "levels", tuple(self.levels[i] for i in order))
            object.__setattr__(
                self, "log_magnitudes", tuple(self.log_magnitudes[i] for i in order)
            )
            object.__setattr__(self, "phases", tuple(self.phases[i] for i in order))
        if all(lm == NEG_INF for lm in self.log_magnitudes):
            raise DomainError("state must have at least one nonzero amplitude")
        if self.normalized_flag:
            log_n2, _ = squared_norm(self)
            if abs(log_n2) > 1e-12 * max(1.0, abs(log_n2)) and abs(log_n2) > 1e-12:
                raise DomainError(
                    f"normalized_flag set but squared norm is exp({log_n2})"
                )

    @classmethod
    def from_amplitudes(cls, levels, amplitudes, normalized_flag=False):
        """Build from ordinary complex amplitudes (convenience path)."""
        amplitudes = np.asarray(amplitudes, dtype=complex)
        log_mags = np.full(amplitudes.shape, NEG_INF)
        nonzero = amplitudes != 0
        log_mags[nonzero] = np.log(np.abs(amplitudes[nonzero]))
        phases = np.angle(amplitudes)
        return cls(
            tuple(levels),
            tuple(float(x) for x in log_mags),
            tuple(float(x) for x in phases),
            normalized_flag,
        )

    def energies(self) -> np.ndarray:
        return np.array([lv.energy for lv in self.levels])

    def amplitudes(self, log_shift: float = 0.0) -> np.ndarray:
        """Complex amplitudes scaled by exp(-log_shift).

        Pass the log norm (or the max log magnitude) as ``log_shift`` when
        the raw amplitudes would underflow.
        """
        lm = np.asarray(self.log_magnitudes) - log_shift
        return np.exp(lm) * np.exp(1j * np.asarray(self.phases))

    def normalized(self) -> "SpectralState":
        log_n2, _ = squared_norm(self)
        lm = tuple(x - 0.5 * log_n2 for x in self.log_magnitudes)
        return SpectralState(self.levels, lm, self.phases, normalized_flag=True)


@dataclass(frozen=True)
class ObservableMatrix:
    """Hermitian matrix over a list of energy levels."""

    basis: tuple[EnergyLevel, ...]
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "basis", tuple(self.basis))
        n = len(self.basis)
        if entries.shape != (n, n):
            raise DomainError(f"entries must be {n}x{n}, got {entries.shape}")
        scale = max(1.0, float(np.abs(entries).max()))
        if np.abs(entries - entries.conj().T).max() > 1e-12 * scale:
            raise DomainError("entries must be Hermitian to 1e-12")

    @classmethod
    def identity(cls, basis):
        return cls(tuple(basis), np.eye(len(tuple(basis))))

    @classmethod
    def hamiltonian(cls, basis):
        basis = tuple(basis)
        return cls(basis, np.diag([lv.energy for lv in basis]).astype(complex))

    @classmethod
    def energy_projector(cls, basis, energy):
        basis = tuple(basis)
        diag = [1.0 if lv.energy == energy else 0.0 for lv in basis]
        return cls(basis, np.diag(diag).astype(complex))


@dataclass(frozen=True)
class DiscreteSpectrum:
    """Unity-normalized probability weights over strictly increasing energies."""

    energies: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        e = np.asarray(self.energies, float)
        w = np.asarray(self.weights, float)
        if e.shape != w.shape or e.ndim != 1 or e.size == 0:
            raise DomainError("energies and weights must be equal-length 1-d")
        if np.any(np.diff(e) <= 0):
            raise DomainError("energies must be strictly increasing")
        if np.any(w < 0):
            raise DomainError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise DomainError(f"weights must sum to 1, got {w.sum()!r}")

    def as_arrays(self):
        return np.asarray(self.energies, float), np.asarray(self.weights, float)


def squared_norm(state: SpectralState) -> tuple[float, float]:
    """Squared norm of a state, returned as (log value, linear value).

    The log value is a log-sum-exp over twice the component log magnitudes
    and stays finite when the linear value underflows to zero.
    """
    two_lm = 2.0 * np.asarray(state.log_magnitudes)
    log_n2 = float(logsumexp(two_lm))
    linear = math.exp(log_n2) if log_n2 < 709.0 else math.inf
    return log_n2, linear


def expectation(state: SpectralState, obs: ObservableMatrix) -> float:
    """Normalized expectation value <psi|A|psi>/<psi|psi>.

    The imaginary part must vanish (A is Hermitian); it is asserted below
    1e-10 relative and dropped.
    """
    if obs.basis != state.levels:
        raise DomainError("observable basis does not match state levels")
    log_n2, _ = squared_norm(state)
    if log_n2 == NEG_INF:
        raise DomainError("zero-norm state")
    # Shift by half the log norm: amplitudes of the normalized state.
    amps = state.amplitudes(log_shift=0.5 * log_n2)
    val = complex(amps.conj() @ (obs.entries @ amps))
    scale = max(1.0, abs(val))
    if abs(val.imag) > 1e-10 * scale:
        raise AssertionError(f"Hermitian expectation has imaginary part {val.imag}")
    return val.real


def energy_distribution(state: SpectralState) -> DiscreteSpectrum:
    """Degeneracy-summed, unity-normalized energy spectrum of a state."""
    log_n2, _ = squared_norm(state)
    if log_n2 == NEG_INF:
        raise DomainError("zero-norm state")
    weights: dict[float, float] = {}
    for lv, lm in zip(state.levels, state.log_magnitudes):
        w = math.exp(2.0 * lm - log_n2)
        weights[lv.energy] = weights.get(lv.energy, 0.0) + w
    energies = sorted(weights)
    w = np.array([weights[e] for e in energies])
    w = w / w.sum()  # renormalize away rounding from the per-level exps
    return DiscreteSpectrum(tuple(energies), tuple(float(x) for x in w))
