"""Velocity-jump emitter: the radiative level shift that regularizes the
infrared divergence, and the resulting soft-photon spectra.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numerics import gauss_nodes
from .semiclassical import PhotonMode
from .units import C_AU

__all__ = [
    "VelocityJump",
    "delta_shift",
    "delta_shift_closed_form",
    "soft_photon_number",
    "soft_spectral_density",
    "total_soft_count",
    "shifted_pole_photon_number",
]


@dataclass(frozen=True)
class VelocityJump:
    """A particle moving at v1 that suddenly switches to v2 at time t_jump.

    tau_in is the adiabatic switch-on time of the interaction (must be short
    compared to t_jump); q_c is the ultraviolet cutoff momentum.
    """

    v1: np.ndarray
    v2: np.ndarray
    t_jump: float = 1.0
    tau_in: float = 1e-3
    q_c: float = C_AU
    Z: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "v1", np.asarray(self.v1, dtype=float))
        object.__setattr__(self, "v2", np.asarray(self.v2, dtype=float))
        if np.linalg.norm(self.v1) >= C_AU or np.linalg.norm(self.v2) >= C_AU:
            raise DomainError("speeds must be below c")
        if self.t_jump <= 0:
            raise DomainError("jump time must be positive")
        if self.q_c <= 0:
            raise DomainError("cutoff momentum must be positive")
        v1n = np.linalg.norm(self.v1)
        dv = np.linalg.norm(self.v2 - self.v1)
        if v1n > 0 and dv > 0.3 * v1n:
            warnings.warn(
                f"velocity jump |dv|/|v1| = {dv / v1n:.2f} exceeds 0.3; the "
                "small-jump expansion is unreliable",
                stacklevel=2,
            )
        if self.tau_in >= self.t_jump:
            warnings.warn(
                "switch-on time should be short compared to the jump time",
                stacklevel=2,
            )

    @property
    def delta_v(self) -> np.ndarray:
        return self.v2 - self.v1

    @property
    def smallness(self) -> float:
        """The expansion parameter lambda = v1 . dv / v1^2."""
        v1sq = float(self.v1 @ self.v1)
        if v1sq == 0:
            return math.inf
        return float(self.v1 @ self.delta_v) / v1sq


def _angular_shift_integral(va, vb, v_denom, n_polar=64, n_azimuth=48) -> float:
    """int dOmega [n' x va].[n' x vb] / (c - n'.v_denom)."""
    cu, wu = gauss_nodes(-1.0, 1.0, n_polar)
    phi = (np.arange(n_azimuth) + 0.5) * (2.0 * math.pi / n_azimuth)
    wphi = 2.0 * math.pi / n_azimuth
    CU, PH = np.meshgrid(cu, phi, indexing="ij")
    S = np.sqrt(1.0 - CU**2)
    nvec = np.stack([S * np.cos(PH), S * np.sin(PH), CU], axis=-1)
    cross = float(np.dot(va, vb)) - (nvec @ va) * (nvec @ vb)
    denom = C_AU - nvec @ v_denom
    return float(np.sum(wu[:, None] * wphi * cross / denom))


def _delta(jump: VelocityJump, va, vb) -> float:
    """Mode-sum level shift with [n' x va].[n' x vb] in the numerator and the
    v1-pole in the denominator, integrated up to the cutoff q_c."""
    if np.allclose(va, 0.0) or np.allclose(vb, 0.0):
        return 0.0
    ang = _angular_shift_integral(va, vb, jump.v1)
    return jump.Z**2 * jump.q_c / (2.0 * math.pi**2 * C_AU) * ang


def delta_shift(jump: VelocityJump) -> float:
    """Radiative energy shift that displaces the soft-photon poles:
    numeric evaluation of the mode sum up to q_c."""
    return _delta(jump, jump.v1, jump.v1)


def delta_shift_closed_form(jump: VelocityJump) -> float:
    """Nonrelativistic closed form 4 Z^2 v1^2 q_c / (3 pi c^2)."""
    v1sq = float(jump.v1 @ jump.v1)
    return 4.0 * jump.Z**2 * v1sq * jump.q_c / (3.0 * math.pi * C_AU**2)


def soft_photon_number(
    jump: VelocityJump, mode: PhotonMode, delta_override: float | None = None
) -> float:
    """Infrared-finite per-mode photon number for the velocity jump:

        Z^2 g_q^2 / c^2 * | e.v2/(omega - q.v2 + Delta)
                            - e.v1/(omega - q.v1 + Delta) |^2

    Passing delta_override = 0 recovers the classical two-pole expression.
    """
    delta = delta_shift(jump) if delta_override is None else delta_override
    omega = mode.omega
    if delta == 0.0 and omega > 0:
        pass  # classical form; poles possible at omega = q.v
    mdv = float(np.linalg.norm(jump.delta_v))
    if mdv > 0 and omega > mdv * C_AU:
        warnings.warn(
            "soft_photon_number: omega above the soft regime m|dv|c",
            stacklevel=2,
        )
    e = mode.e_vec
    q = mode.q
    a2 = float(e @ jump.v2) / (omega - float(q @ jump.v2) + delta)
    a1 = float(e @ jump.v1) / (omega - float(q @ jump.v1) + delta)
    return jump.Z**2 * mode.g_squared / C_AU**2 * abs(a2 - a1) ** 2


def shifted_pole_photon_number(
    jump: VelocityJump, mode: PhotonMode, drop_derivatives: bool = False
) -> float:
    """Per-mode photon number with the full complex pole displacements: the
    v2 term carries the mixed shift built from [n' x v1].[n' x v2], the v1
    term the pure v1 shift.  Small-q corrections of first order in q are
    dropped.  With drop_derivatives, both shifts are zeroed (classical
    two-pole formula)."""
    if drop_derivatives:
        d12 = d11 = 0.0
    else:
        d12 = _delta(jump, jump.v1, jump.v2)
        d11 = _delta(jump, jump.v1, jump.v1)
    omega = mode.omega
    e = mode.e_vec
    q = mode.q
    a2 = float(e @ jump.v2) / (omega - float(q @ jump.v2) + d12)
    a1 = float(e @ jump.v1) / (omega - float(q @ jump.v1) + d11)
    return jump.Z**2 * mode.g_squared / C_AU**2 * abs(a2 - a1) ** 2


def soft_spectral_density(
    jump: VelocityJump,
    omega: float,
    delta_override: float | None = None,
    n_polar: int = 48,
    n_azimuth: int = 32,
) -> float:
    """Photon count per unit frequency, integrated over directions and
    summed over polarizations:

        dN/domega = int dOmega sum_alpha q^2/((2 pi)^3 c) n_{alpha q}
    """
    if omega <= 0:
        raise DomainError("soft_spectral_density requires omega > 0")
    delta = delta_shift(jump) if delta_override is None else delta_override
    qmag = omega / C_AU

    cu, wu = gauss_nodes(-1.0, 1.0, n_polar)
    phi = (np.arange(n_azimuth) + 0.5) * (2.0 * math.pi / n_azimuth)
    wphi = 2.0 * math.pi / n_azimuth
    CU, PH = np.meshgrid(cu, phi, indexing="ij")
    S = np.sqrt(1.0 - CU**2)
    nvec = np.stack([S * np.cos(PH), S * np.sin(PH), CU], axis=-1)
    qv = qmag * nvec

    # explicit transverse polarization pair per direction
    e1 = np.cross(np.array([0.0, 0.0, 1.0]), nvec)
    norms = np.linalg.norm(e1, axis=-1, keepdims=True)
    polar = norms[..., 0] < 1e-14
    e1 = np.where(polar[..., None], np.array([1.0, 0.0, 0.0]), e1 / np.where(norms == 0, 1.0, norms))
    e2 = np.cross(nvec, e1)

    g2 = 2.0 * math.pi * C_AU**2 / omega
    d2 = omega - qv @ jump.v2 + delta
    d1 = omega - qv @ jump.v1 + delta
    total = np.zeros_like(CU)
    for e in (e1, e2):
        amp = (e @ jump.v2) / d2 - (e @ jump.v1) / d1
        total += np.abs(amp) ** 2
    n_ang = jump.Z**2 * g2 / C_AU**2 * total
    dens = qmag**2 / ((2.0 * math.pi) ** 3 * C_AU)
    return float(np.sum(wu[:, None] * wphi * dens * n_ang))


def total_soft_count(
    jump: VelocityJump,
    omega_min: float,
    omega_max: float | None = None,
    delta_override: float | None = None,
    points_per_decade: int = 24,
) -> float:
    """Integral of the spectral density from omega_min up to omega_max
    (default c q_c), on a logarithmic frequency grid."""
    if omega_max is None:
        omega_max = C_AU * jump.q_c
    if not (0 < omega_min < omega_max):
        raise DomainError("need 0 < omega_min < omega_max")
    m = max(16, int(points_per_decade * math.log10(omega_max / omega_min)))
    grid = np.exp(np.linspace(math.log(omega_min), math.log(omega_max), m))
    vals = np.array(
        [soft_spectral_density(jump, w, delta_override=delta_override) for w in grid]
    )
    return float(np.trapezoid(vals * grid, np.log(grid)))
