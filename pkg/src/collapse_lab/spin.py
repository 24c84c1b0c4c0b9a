"""Closed forms for the switched spin-precession experiment.

A narrow "photon" packet of width sigma crosses a switch at s = 0 and turns
on a level splitting epsilon; the transverse spin expectation then precesses.
Under collapse that has run to smearing width T_cal, the switchover widens
from sigma to T_cal and the precession amplitude is damped by
exp(-epsilon^2*T_cal^2/2).

Evaluation is by the analytic expressions (complex-argument normal
distribution function), not by simulating the switch Hamiltonian.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, ndtr

from .hilbert import DomainError

__all__ = [
    "SpinModelParams",
    "normal_cdf",
    "sigma1_standard",
    "sigma1_collapsed",
    "spin_density_matrix",
]

#: documented domain bound for the complex normal CDF
MAX_IMAG = 30.0


@dataclass(frozen=True)
class SpinModelParams:
    """Spin amplitudes (a, b), splitting epsilon, packet width sigma, T_cal.

    The shortcut (b)-forms of the printed results assume sigma*epsilon << 1
    and sigma << T_cal; the exact (a)-forms hold regardless.
    """

    a: complex
    b: complex
    epsilon: float
    sigma: float
    T_cal: float = 0.0

    def __post_init__(self):
        if abs(abs(self.a) ** 2 + abs(self.b) ** 2 - 1.0) > 1e-12:
            raise DomainError("|a|^2 + |b|^2 must equal 1")
        if self.epsilon <= 0 or self.sigma <= 0:
            raise DomainError("epsilon and sigma must be positive")
        if self.T_cal < 0:
            raise DomainError("T_cal must be >= 0")

    @property
    def envelope(self) -> float:
        """Precession damping factor exp(-epsilon^2*T_cal^2/2)."""
        return math.exp(-0.5 * (self.epsilon * self.T_cal) ** 2)


def normal_cdf(z):
    """Normal distribution function Phi(z), analytically continued.

    Real arguments reduce to the standard CDF; Phi(z) + Phi(-z) = 1
    identically.  Domain: |Im z| <= 30.
    """
    z = complex(z)
    if abs(z.imag) > MAX_IMAG:
        raise DomainError(f"|Im z| must be <= {MAX_IMAG}, got {z.imag}")
    if z.imag == 0.0:
        return complex(ndtr(z.real))
    return 0.5 * (1.0 + erf(z / math.sqrt(2.0)))


def sigma1_standard(s: float, p: SpinModelParams) -> float:
    """<sigma_1> under ordinary Schrodinger evolution (exact closed form).

    For real a, b and sigma*epsilon << 1 this reduces to
    2ab*[Phi(-s/sigma) + cos(eps*s)*Phi(s/sigma)].
    """
    a, b, eps, sig = complex(p.a), complex(p.b), p.epsilon, p.sigma
    cross = a.conjugate() * b
    val = (
        2.0 * cross.real * normal_cdf(-s / sig).real
        + math.exp(-0.5 * (eps * sig) ** 2)
        * 2.0
        * (
            cross * cmath.exp(1j * eps * s) * normal_cdf(s / sig + 1j * eps * sig)
        ).real
    )
    return float(val)


def sigma1_collapsed(s: float, p: SpinModelParams) -> float:
    """<sigma_1> under collapse smearing of width T_cal (closed form).

    For real a, b, sigma*epsilon << 1, sigma << T_cal this reduces to
    2ab*[Phi(-s/T) + exp(-eps^2 T^2/2)*cos(eps*s)*Phi(s/T)].
    T_cal = 0 recovers `sigma1_standard` exactly.
    """
    a, b, eps, sig, tcal = complex(p.a), complex(p.b), p.epsilon, p.sigma, p.T_cal
    width = math.hypot(sig, tcal)
    cross = a.conjugate() * b
    arg = (s + 1j * eps * sig * (sig + tcal)) / width
    val = (
        2.0 * cross.real * normal_cdf(-s / width).real
        + math.exp(-0.5 * eps**2 * (sig**2 + tcal**2))
        * 2.0
        * (cross * cmath.exp(1j * eps * s) * normal_cdf(arg)).real
    )
    return float(val)


def spin_density_matrix(s: float, p: SpinModelParams) -> np.ndarray:
    """2x2 spin density matrix in the (+, -) basis, valid after switchover.

    A mixture of spin up, spin down and a precessing pure part weighted by
    the damping envelope; trace 1 and positive semidefinite.  Raises inside
    the switchover window |s| <= 2*sqrt(sigma^2 + T_cal^2), where the
    closed form does not apply.
    """
    width = math.hypot(p.sigma, p.T_cal)
    if s <= 2.0 * width:
        raise DomainError("density matrix form only valid for s > 2*width")
    env = p.envelope
    a, b, eps = complex(p.a), complex(p.b), p.epsilon
    v = np.array([a * cmath.exp(-0.5j * eps * s), b * cmath.exp(0.5j * eps * s)])
    precessing = np.outer(v, v.conj())
    mixed = np.diag([abs(a) ** 2, abs(b) ** 2]).astype(complex)
    return (1.0 - env) * mixed + env * precessing
