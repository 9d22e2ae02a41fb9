"""Atomic-unit system, physical constants, and the beam/orbit parameter record.

Internally everything is in Hartree atomic units (hbar = |e| = m_e = 1,
c = 137.035999).  The CLI boundary converts from GeV / meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

# Speed of light in atomic units.
C_AU = 137.035999
# CODATA 2018 conversion constants.
BOHR_PER_METER = 1.8897261e10
ELECTRON_REST_GEV = 0.00051099895
AU_TIME_SECONDS = 2.4188843265857e-17


@dataclass(frozen=True)
class LabInput:
    """Laboratory-frame machine parameters."""

    energy_GeV: float
    radius_m: float
    Z: float = 1.0

    def __post_init__(self):
        if self.energy_GeV < ELECTRON_REST_GEV:
            raise DomainError(
                f"total energy {self.energy_GeV} GeV below electron rest energy"
            )
        if self.radius_m <= 0:
            raise DomainError("orbit radius must be positive")


@dataclass(frozen=True)
class BeamParams:
    """Beam and orbit parameters in atomic units.

    Derived fields (beta, v0, omega0, H0) satisfy
    beta = sqrt(1 - 1/gamma^2), v0 = beta*c, omega0 = v0/R, H0 = gamma*c*omega0,
    so omega0 = H0/(gamma*m*c) holds identically (e = m = 1).
    """

    Z: float
    gamma: float
    R: float
    beta: float
    v0: float
    omega0: float
    H0: float

    @classmethod
    def from_gamma_radius(cls, gamma: float, R: float, Z: float = 1.0) -> "BeamParams":
        if gamma < 1.0:
            raise DomainError(f"gamma must be >= 1, got {gamma}")
        if R <= 0:
            raise DomainError("orbit radius must be positive")
        beta = math.sqrt(max(0.0, 1.0 - 1.0 / gamma**2))
        v0 = beta * C_AU
        omega0 = v0 / R
        H0 = gamma * C_AU * omega0
        return cls(Z=Z, gamma=gamma, R=R, beta=beta, v0=v0, omega0=omega0, H0=H0)


def beam_from_lab(inp: LabInput) -> BeamParams:
    """Convert laboratory GeV / meter inputs to an atomic-unit beam record."""
    gamma = inp.energy_GeV / ELECTRON_REST_GEV
    R = inp.radius_m * BOHR_PER_METER
    return BeamParams.from_gamma_radius(gamma=gamma, R=R, Z=inp.Z)


def beam_to_lab(beam: BeamParams) -> LabInput:
    """Inverse of beam_from_lab (round trips to 1e-10 relative)."""
    return LabInput(
        energy_GeV=beam.gamma * ELECTRON_REST_GEV,
        radius_m=beam.R / BOHR_PER_METER,
        Z=beam.Z,
    )


def critical_harmonic(beam: BeamParams) -> int:
    """Spectral scale hint: the harmonic number round(gamma^3) where the
    emitted spectrum peaks."""
    return round(beam.gamma**3)


FIAN_60 = LabInput(energy_GeV=0.68, radius_m=2.0, Z=1.0)
