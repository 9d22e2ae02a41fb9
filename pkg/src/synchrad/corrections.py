"""Modified-perturbation-theory corrections: the complex photon-interaction
exponent P(t1, t2), its constant-velocity and nonrelativistic reductions,
and the corrected photon number with the exp(-P) damping kernel.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.special

from .errors import ConvergenceError, DomainError
from .numerics import EULER_GAMMA, Tolerance, gauss_nodes
from .semiclassical import PhotonMode, transverse_polarization_basis
from .units import C_AU

__all__ = [
    "ModeSum",
    "PExponent",
    "mu_coupling",
    "UniformVelocityAmplitudes",
    "p_general",
    "p_const_velocity",
    "p_nonrel_asymptotic",
    "PiecewiseConstantVelocity",
    "corrected_photon_number",
]

# Default ultraviolet cutoff momentum, of order m*c.
DEFAULT_QC = C_AU

# Phase threshold beyond which the fast-oscillating single-time exponentials
# in the mode-sum bracket are dropped (stationary-phase regime).
FAST_PHASE_THRESHOLD = 20.0


@dataclass(frozen=True)
class PExponent:
    """Value of the photon-interaction exponent P(t1, t2) with its context.

    Satisfies P(t, t) = 0 and P(t1, t2) = conj(P(t2, t1)).
    """

    value: complex
    t1: float
    t2: float
    context: str = ""
    uv_sensitive: bool = False


@dataclass(frozen=True)
class ModeSum:
    """Quadrature rule over photon momenta q' up to the cutoff q_c, plus the
    polarization sum.  Node arrays carry the (2 pi)^-3 continuum measure."""

    q_c: float = DEFAULT_QC
    n_radial: int = 32
    n_polar: int = 24
    n_azimuth: int = 24

    def __post_init__(self):
        if self.q_c <= 0:
            raise DomainError("cutoff momentum must be positive")

    def nodes(self):
        """Returns (q_vecs[N,3], weights[N], e1[N,3], e2[N,3]) with weights
        absorbing q'^2 dq' dOmega / (2 pi)^3."""
        qr, wr = gauss_nodes(0.0, self.q_c, self.n_radial)
        cu, wu = gauss_nodes(-1.0, 1.0, self.n_polar)
        phi = (np.arange(self.n_azimuth) + 0.5) * (2.0 * math.pi / self.n_azimuth)
        wphi = 2.0 * math.pi / self.n_azimuth

        Q, CU, PH = np.meshgrid(qr, cu, phi, indexing="ij")
        WQ, WCU, _ = np.meshgrid(wr, wu, phi, indexing="ij")
        s = np.sqrt(1.0 - CU**2)
        q_vecs = np.stack(
            [Q * s * np.cos(PH), Q * s * np.sin(PH), Q * CU], axis=-1
        ).reshape(-1, 3)
        weights = (WQ * Q**2 * WCU * wphi / (2.0 * math.pi) ** 3).reshape(-1)

        # deterministic transverse basis, vectorized; tie-break q || z
        n = q_vecs / np.linalg.norm(q_vecs, axis=1, keepdims=True)
        e1 = np.cross(np.array([0.0, 0.0, 1.0]), n)
        norms = np.linalg.norm(e1, axis=1, keepdims=True)
        polar = norms[:, 0] < 1e-14
        e1 = np.where(polar[:, None], np.array([1.0, 0.0, 0.0]), e1 / np.where(norms == 0, 1.0, norms))
        e2 = np.cross(n, e1)
        return q_vecs, weights, e1, e2


def mu_coupling(q: np.ndarray, q_prime: np.ndarray, gamma: float) -> float:
    """Frequency shift coupling a soft mode q to an emitted mode q':
    -(q . q')/(m gamma) with m = 1, linearized in the momentum transfer."""
    if gamma < 1.0:
        raise DomainError(f"gamma must be >= 1, got {gamma}")
    return -float(np.dot(q, q_prime)) / gamma


class UniformVelocityAmplitudes:
    """Closed-form coupling amplitudes for motion at constant velocity with
    adiabatic switch-on: Q(t) = (Z/c) g_q (e* . v0)/(omega - q.v0)
    * exp(i (omega - q.v0) t)."""

    def __init__(self, v0: np.ndarray, Z: float = 1.0):
        self.v0 = np.asarray(v0, dtype=float)
        if np.linalg.norm(self.v0) >= C_AU:
            raise DomainError("speed must be below c")
        self.Z = Z

    def amplitude(self, q_vecs: np.ndarray, e_vecs: np.ndarray, t: float) -> np.ndarray:
        qmag = np.linalg.norm(q_vecs, axis=1)
        omega = C_AU * qmag
        g = np.sqrt(2.0 * math.pi * C_AU**2 / omega)
        dqv = omega - q_vecs @ self.v0
        ev = e_vecs @ self.v0
        return (self.Z / C_AU) * g * ev / dqv * np.exp(1j * dqv * t)


def p_general(
    mode_q: np.ndarray,
    amplitudes,
    gamma: float,
    t1: float,
    t2: float,
    mode_sum: Optional[ModeSum] = None,
    drop_fast_terms: bool = True,
) -> PExponent:
    """Photon-interaction exponent from the three-term mode-sum bracket:

        sum_{beta, q'} [ |Q(t1)|^2 (1 - exp(-i mu t1))
                       + |Q(t2)|^2 (1 - exp(+i mu t2))
                       - Q*(t1) Q(t2) (1 - exp(-i mu t1)) (1 - exp(+i mu t2)) ]

    with mu = mu_coupling(mode_q, q').  When drop_fast_terms is set, the
    single-time exponentials are zeroed where |mu| * t exceeds the
    stationary-phase threshold; the mu cap at q' = q_c large-q' saturation is
    applied throughout.
    """
    mode_q = np.asarray(mode_q, dtype=float)
    ms = mode_sum or ModeSum()
    q_vecs, weights, e1, e2 = ms.nodes()

    mu = -(q_vecs @ mode_q) / gamma
    # saturate mu at its value for |q'| = q_c (large-q' flattening)
    qmag = np.linalg.norm(q_vecs, axis=1)
    mu_cap = np.abs(np.linalg.norm(mode_q) * ms.q_c / gamma)
    if mu_cap > 0:
        mu = np.clip(mu, -mu_cap, mu_cap)

    total = 0.0 + 0.0j
    tail = 0.0 + 0.0j
    tail_mask = qmag > 0.9 * ms.q_c
    for e in (e1, e2):
        Q1 = amplitudes.amplitude(q_vecs, e, t1)
        Q2 = amplitudes.amplitude(q_vecs, e, t2)
        f1 = 1.0 - np.exp(-1j * mu * t1)
        f2 = 1.0 - np.exp(1j * mu * t2)
        if drop_fast_terms:
            f1 = np.where(np.abs(mu * t1) > FAST_PHASE_THRESHOLD, 1.0, f1)
            f2 = np.where(np.abs(mu * t2) > FAST_PHASE_THRESHOLD, 1.0, f2)
        bracket = (
            np.abs(Q1) ** 2 * f1 + np.abs(Q2) ** 2 * f2 - np.conj(Q1) * Q2 * f1 * f2
        )
        total += np.sum(weights * bracket)
        tail += np.sum(weights[tail_mask] * bracket[tail_mask])

    uv_sensitive = abs(total) > 0 and abs(tail) > 0.1 * abs(total)
    if uv_sensitive:
        warnings.warn(
            "p_general: outer 10% of the q' range contributes more than 10% "
            "of |P|; result is logarithmically sensitive to the cutoff q_c",
            stacklevel=2,
        )
    return PExponent(
        value=complex(total), t1=t1, t2=t2, context="mode-sum", uv_sensitive=uv_sensitive
    )


def p_const_velocity(
    v0: np.ndarray,
    q: np.ndarray,
    q_c: float = DEFAULT_QC,
    gamma: float = 1.0,
    Z: float = 1.0,
    t1: float = 0.0,
    t2: float = 0.0,
    n_polar: int = 48,
    n_azimuth: int = 32,
) -> PExponent:
    """Constant-velocity exponent with the radial q' integral done in closed
    form (Si/Ci/log bracket), leaving the angular integral over emission
    directions n':

        P = Z^2/(4 pi^2 c^3) int do' [n' x v0]^2 / (1 - n'.v0/c)^2
            * ( i Si(w2 dt) + i Si((w2+w1) dt) + 2 C - Ci(w2 |dt|)
                - Ci(|w2+w1| |dt|) + ln(w2 |w2+w1| dt^2) )

    with w1 = q_c (n'.q)/(m gamma), w2 = (c - n'.v0) q_c, dt = t1 - t2.
    """
    v0 = np.asarray(v0, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.linalg.norm(v0) >= C_AU:
        raise DomainError("speed must be below c")
    dt = t1 - t2
    if dt == 0.0 or np.allclose(v0, 0.0):
        return PExponent(0.0 + 0.0j, t1, t2, context="const-velocity")

    cu, wu = gauss_nodes(-1.0, 1.0, n_polar)
    phi = (np.arange(n_azimuth) + 0.5) * (2.0 * math.pi / n_azimuth)
    wphi = 2.0 * math.pi / n_azimuth
    CU, PH = np.meshgrid(cu, phi, indexing="ij")
    S = np.sqrt(1.0 - CU**2)
    nvec = np.stack([S * np.cos(PH), S * np.sin(PH), CU], axis=-1)

    ndotv = nvec @ v0
    cross2 = np.maximum(np.dot(v0, v0) - ndotv**2, 0.0)  # [n' x v0]^2
    w1 = q_c * (nvec @ q) / gamma
    w2 = (C_AU - ndotv) * q_c

    si2 = scipy.special.sici(w2 * dt)[0]
    si12 = scipy.special.sici((w2 + w1) * dt)[0]
    # Ci enters with |.| arguments; Si is odd and keeps the sign of dt
    ci2a = scipy.special.sici(np.abs(w2 * dt))[1]
    ci12a = scipy.special.sici(np.abs((w2 + w1) * dt))[1]
    bracket = (
        1j * si2
        + 1j * si12
        + 2.0 * EULER_GAMMA
        - ci2a
        - ci12a
        + np.log(w2 * np.abs(w2 + w1) * dt**2)
    )
    integrand = cross2 / (1.0 - ndotv / C_AU) ** 2 * bracket
    do_integral = np.sum(wu[:, None] * wphi * integrand)
    value = Z**2 / (4.0 * math.pi**2 * C_AU**3) * do_integral
    return PExponent(complex(value), t1, t2, context="const-velocity")


def p_nonrel_asymptotic(
    v0_mag: float, Z: float, q_c: float, dt: float
) -> complex:
    """Nonrelativistic large-|dt| asymptote of the constant-velocity exponent:
    (2 Z^2 v0^2 / 3 pi c^3) [i pi sign(dt) + 2 (C + ln(c q_c) + ln|dt|)]."""
    if dt == 0.0:
        raise DomainError("asymptotic form invalid at dt = 0")
    if v0_mag == 0.0:
        return 0.0 + 0.0j
    pref = 2.0 * Z**2 * v0_mag**2 / (3.0 * math.pi * C_AU**3)
    return pref * complex(
        2.0 * (EULER_GAMMA + math.log(C_AU * q_c) + math.log(abs(dt))),
        math.pi * math.copysign(1.0, dt),
    )


# ---------------------------------------------------------------------------
# Corrected photon number
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PiecewiseConstantVelocity:
    """Velocity law for the jump benchmark: v1 for t < t_jump, v2 after."""

    v1: np.ndarray
    v2: np.ndarray
    t_jump: float

    def __post_init__(self):
        object.__setattr__(self, "v1", np.asarray(self.v1, dtype=float))
        object.__setattr__(self, "v2", np.asarray(self.v2, dtype=float))

    def velocity(self, t: float) -> np.ndarray:
        return self.v1 if t < self.t_jump else self.v2

    def position(self, t: float) -> np.ndarray:
        if t < self.t_jump:
            return self.v1 * t
        return self.v1 * self.t_jump + self.v2 * (t - self.t_jump)

    def breakpoints(self, t_end: float):
        if 0.0 < self.t_jump < t_end:
            return [0.0, self.t_jump, t_end]
        return [0.0, t_end]


@dataclass(frozen=True)
class ConstantVelocity:
    """Trivial velocity law for factorization tests."""

    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))

    def velocity(self, t: float) -> np.ndarray:
        return self.v

    def position(self, t: float) -> np.ndarray:
        return self.v * t

    def breakpoints(self, t_end: float):
        return [0.0, t_end]


@dataclass(frozen=True)
class GaussianPacket:
    """Gaussian momentum distribution |C_k|^2 around k0 with longitudinal and
    transverse position-space widths delta_l, delta_perp (z is longitudinal)."""

    k0: np.ndarray
    delta_l: float
    delta_perp: float
    n_nodes: int = 5

    def momentum_nodes(self):
        """Gauss-Hermite nodes/weights for the 3-D Gaussian |C_k|^2 with
        momentum-space standard deviations 1/delta along each axis."""
        x, w = np.polynomial.hermite.hermgauss(self.n_nodes)
        w = w / math.sqrt(math.pi)
        k0 = np.asarray(self.k0, dtype=float)
        sig = np.array(
            [1.0 / self.delta_perp, 1.0 / self.delta_perp, 1.0 / self.delta_l]
        )
        nodes, weights = [], []
        for ix in range(self.n_nodes):
            for iy in range(self.n_nodes):
                for iz in range(self.n_nodes):
                    dk = math.sqrt(2.0) * sig * np.array([x[ix], x[iy], x[iz]])
                    nodes.append(k0 + dk)
                    weights.append(w[ix] * w[iy] * w[iz])
        return nodes, weights


def _qdot(velocity_law, mode: PhotonMode, Z: float, times: np.ndarray) -> np.ndarray:
    omega = mode.omega
    e = mode.e_vec
    g = math.sqrt(mode.g_squared)
    vals = np.empty(len(times), dtype=complex)
    for i, tp in enumerate(times):
        v = velocity_law.velocity(tp)
        r = velocity_law.position(tp)
        phase = omega * tp - float(mode.q @ r)
        vals[i] = 1j * (Z / C_AU) * g * float(e @ v) * np.exp(1j * phase)
    return vals


def corrected_photon_number(
    velocity_law,
    mode: PhotonMode,
    t: float,
    Z: float = 1.0,
    p_provider: Optional[Callable[[float, float], complex]] = None,
    nodes_per_piece: int = 64,
    imag_tol: float = 1e-8,
    packet: Optional[GaussianPacket] = None,
    velocity_law_factory: Optional[Callable[[np.ndarray], object]] = None,
) -> float:
    """Photon number with mutual photon interaction:

        n = int_0^t int_0^t Qdot*(t1) Qdot(t2) exp(-P(t1, t2)) dt1 dt2

    p_provider(t1, t2) supplies the exponent (None means semiclassical,
    P = 0).  With a GaussianPacket and a velocity_law_factory, the result is
    averaged over the packet's momentum distribution.
    """
    if packet is not None:
        if velocity_law_factory is None:
            raise DomainError("packet averaging requires a velocity_law_factory")
        nodes, weights = packet.momentum_nodes()
        acc = 0.0
        for k, w in zip(nodes, weights):
            acc += w * corrected_photon_number(
                velocity_law_factory(k),
                mode,
                t,
                Z,
                p_provider,
                nodes_per_piece=nodes_per_piece,
                imag_tol=imag_tol,
            )
        return acc

    pieces = velocity_law.breakpoints(t)
    times = []
    weights = []
    for a, b in zip(pieces[:-1], pieces[1:]):
        x, w = gauss_nodes(a, b, nodes_per_piece)
        times.append(x)
        weights.append(w)
    times = np.concatenate(times)
    weights = np.concatenate(weights)

    qdot = _qdot(velocity_law, mode, Z, times)
    if p_provider is None:
        amp = np.sum(weights * qdot)
        return float(abs(amp) ** 2)

    P = np.empty((len(times), len(times)), dtype=complex)
    for i, t1 in enumerate(times):
        for j, t2 in enumerate(times):
            if j < i:
                P[i, j] = np.conj(P[j, i])
            else:
                P[i, j] = p_provider(float(t1), float(t2))
    kern = np.conj(qdot)[:, None] * qdot[None, :] * np.exp(-P)
    val = complex(weights @ kern @ weights)
    if abs(val.imag) > imag_tol * max(abs(val.real), 1e-300):
        warnings.warn(
            f"corrected_photon_number: imaginary residual {val.imag:.3e} "
            f"relative to {val.real:.3e}",
            stacklevel=2,
        )
    return float(val.real)
