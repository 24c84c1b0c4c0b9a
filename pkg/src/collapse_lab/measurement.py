"""Two-branch superpositions with identical energy spectra.

A position-type measurement leaves the macroscopic branches with exactly the
same energy spectrum (only the phases differ), so the collapse dynamics,
which weights amplitudes by a phase-blind Gaussian in energy, can never
change the branch weight ratio.  The fixture files encode the shared
magnitudes and the per-branch phases; a control fixture with unequal
magnitudes shows what collapse sensitivity would look like.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .engine import CollapseParams, evolve
from .hilbert import DomainError, EnergyLevel, SpectralState, squared_norm

__all__ = [
    "BranchSpec",
    "build_branches",
    "branch_weight_ratio",
    "load_branch_fixture",
    "fixture_path",
]


@dataclass(frozen=True)
class BranchSpec:
    """Levels and per-branch phases of a two-branch superposition.

    ``magnitudes`` is shared by both branches (the no-collapse hypothesis);
    a control spec may supply ``magnitudes_2`` to break it deliberately.
    """

    energies: tuple[float, ...]
    magnitudes: tuple[float, ...]
    phases_1: tuple[float, ...]
    phases_2: tuple[float, ...]
    beta_1: complex
    beta_2: complex
    magnitudes_2: tuple[float, ...] | None = None

    def __post_init__(self):
        n = len(self.energies)
        if not (len(self.magnitudes) == len(self.phases_1) == len(self.phases_2) == n):
            raise DomainError("energies, magnitudes and phase lists must align")
        if self.magnitudes_2 is not None and len(self.magnitudes_2) != n:
            raise DomainError("magnitudes_2 length mismatch")
        if any(m < 0 for m in self.magnitudes):
            raise DomainError("magnitudes must be nonnegative")
        if abs(abs(self.beta_1) ** 2 + abs(self.beta_2) ** 2 - 1.0) > 1e-12:
            raise DomainError("|beta_1|^2 + |beta_2|^2 must equal 1")

    @property
    def shared_spectrum(self) -> bool:
        return self.magnitudes_2 is None


def _levels(energies):
    # repeated energies get consecutive degeneracy labels
    counts: dict[float, int] = {}
    levels = []
    for e in energies:
        j = counts.get(e, 0)
        counts[e] = j + 1
        levels.append(EnergyLevel(float(e), j))
    return tuple(levels)


def build_branches(spec: BranchSpec) -> tuple[SpectralState, SpectralState]:
    """States of the two branches (unnormalized, amplitudes m*exp(i*theta))."""
    levels = _levels(spec.energies)
    mags_2 = spec.magnitudes_2 if spec.magnitudes_2 is not None else spec.magnitudes
    amps_1 = np.asarray(spec.magnitudes) * np.exp(1j * np.asarray(spec.phases_1))
    amps_2 = np.asarray(mags_2) * np.exp(1j * np.asarray(spec.phases_2))
    return (
        SpectralState.from_amplitudes(levels, amps_1),
        SpectralState.from_amplitudes(levels, amps_2),
    )


def branch_weight_ratio(
    spec: BranchSpec, params: CollapseParams, t: float, B: float
) -> float:
    """|beta_2|^2 ||Psi2_B||^2 / (|beta_1|^2 ||Psi1_B||^2) after collapse.

    For shared-spectrum branches this equals |beta_2|^2/|beta_1|^2 for every
    (t, B): there is no collapse between the branches.
    """
    if spec.beta_1 == 0:
        raise DomainError("beta_1 = 0: ratio undefined")
    if t < 0:
        raise DomainError("t must be >= 0")
    state_1, state_2 = build_branches(spec)
    log_n1, _ = squared_norm(evolve(state_1, params, t, B))
    log_n2, _ = squared_norm(evolve(state_2, params, t, B))
    w = abs(spec.beta_2) ** 2 / abs(spec.beta_1) ** 2
    return w * math.exp(log_n2 - log_n1)


# --- fixture files ---------------------------------------------------------
#
# Text format, one line per level, whitespace separated:
#     energy  magnitude  theta_1  theta_2  [magnitude_2]
# Header lines starting with '#' may carry beta weights as
#     # beta2_1 <float>   /  # beta2_2 <float>
# (squared moduli; phases of beta are irrelevant to every ratio).


def load_branch_fixture(path) -> BranchSpec:
    energies, mags, th1, th2, mags2 = [], [], [], [], []
    beta2_1 = beta2_2 = 0.5
    has_m2 = False
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "beta2_1":
                beta2_1 = float(parts[1])
            elif len(parts) == 2 and parts[0] == "beta2_2":
                beta2_2 = float(parts[1])
            continue
        cols = [float(x) for x in line.split()]
        if len(cols) not in (4, 5):
            raise DomainError(f"fixture line needs 4 or 5 columns: {raw!r}")
        energies.append(cols[0])
        mags.append(cols[1])
        th1.append(cols[2])
        th2.append(cols[3])
        if len(cols) == 5:
            has_m2 = True
            mags2.append(cols[4])
    if has_m2 and len(mags2) != len(mags):
        raise DomainError("magnitude_2 column must be present on every line")
    total = beta2_1 + beta2_2
    return BranchSpec(
        tuple(energies),
        tuple(mags),
        tuple(th1),
        tuple(th2),
        complex(math.sqrt(beta2_1 / total)),
        complex(math.sqrt(beta2_2 / total)),
        tuple(mags2) if has_m2 else None,
    )


def fixture_path(name: str) -> Path:
    """Path of a packaged fixture, e.g. 'branch_shared.txt'."""
    return Path(resources.files("collapse_lab").joinpath("fixtures", name))
