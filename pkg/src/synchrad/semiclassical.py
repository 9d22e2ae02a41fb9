"""Photon numbers and rates from the exact coherent-state solution for a
classical current: coupling amplitudes, the correlation-integral rate, the
Schott per-harmonic angular distribution, and radiated totals.

Angle convention: theta is the polar angle measured from the magnetic-field
axis, so cos(Theta) = sin(theta) relative to the orbital-plane inclination
Theta used in the underlying per-harmonic distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.integrate
import scipy.special

from .errors import ConvergenceError, DomainError
from .numerics import Tolerance, gauss_nodes
from .units import C_AU, BeamParams

__all__ = [
    "Trajectory",
    "PhotonMode",
    "SpectralTable",
    "circular_trajectory",
    "transverse_polarization_basis",
    "coupling_amplitude",
    "mean_photon_number",
    "rate_integrand",
    "rate_general",
    "schott_angular_rate",
    "schott_harmonic_rate",
    "spectral_sum",
    "total_power",
    "total_photon_rate",
    "momentum_loss_rate",
    "classical_power",
]


@dataclass(frozen=True)
class Trajectory:
    """Prescribed classical path: position and velocity callbacks over a
    time interval.  Velocities must stay below c on the domain."""

    r0: Callable[[float], np.ndarray]
    v0: Callable[[float], np.ndarray]
    domain: tuple[float, float] = (0.0, math.inf)


def circular_trajectory(beam: BeamParams, t0: float = 0.0) -> Trajectory:
    """Circular orbit of radius R in the xy plane, field along z.

    Parameterized so that a photon momentum in the xz plane reproduces the
    standard period-averaged correlation integrand.
    """
    R, w = beam.R, beam.omega0

    def r0(t):
        return np.array([R * math.sin(w * t), -R * math.cos(w * t), 0.0])

    def v0(t):
        return np.array([R * w * math.cos(w * t), R * w * math.sin(w * t), 0.0])

    return Trajectory(r0=r0, v0=v0, domain=(t0, math.inf))


def transverse_polarization_basis(q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two orthonormal vectors transverse to q, built deterministically.

    Tie-break when q is (anti)parallel to z: returns (x_hat, y_hat).
    """
    q = np.asarray(q, dtype=float)
    qn = np.linalg.norm(q)
    if qn == 0:
        raise DomainError("polarization basis undefined for q = 0")
    n = q / qn
    if abs(n[0]) < 1e-14 and abs(n[1]) < 1e-14:
        return np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
    e1 = np.cross([0.0, 0.0, 1.0], n)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2


@dataclass(frozen=True)
class PhotonMode:
    """Photon mode: polarization index (1 or 2) and momentum 3-vector."""

    alpha: int
    q: np.ndarray

    def __post_init__(self):
        if self.alpha not in (1, 2):
            raise DomainError(f"polarization index must be 1 or 2, got {self.alpha}")
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))
        if self.omega <= 0:
            raise DomainError("photon mode requires |q| > 0")

    @property
    def omega(self) -> float:
        return C_AU * float(np.linalg.norm(self.q))

    @property
    def g_squared(self) -> float:
        # g_q^2 = 2 pi c^2 / omega with unit normalization volume
        return 2.0 * math.pi * C_AU**2 / self.omega

    @property
    def e_vec(self) -> np.ndarray:
        return transverse_polarization_basis(self.q)[self.alpha - 1]


def mode_from_harmonic(
    beam: BeamParams, n: int, theta: float, phi: float = 0.0, alpha: int = 1
) -> PhotonMode:
    """Mode at harmonic n of the orbital frequency, polar angle theta from
    the field axis."""
    qmag = n * beam.omega0 / C_AU
    q = qmag * np.array(
        [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
    )
    return PhotonMode(alpha=alpha, q=q)


@dataclass
class SpectralTable:
    """Rows of (harmonic n, theta_rad, rate per atomic time per steradian)."""

    rows: list = field(default_factory=list)

    def add(self, n: int, theta: float, rate: float) -> None:
        if rate < 0:
            raise DomainError(f"negative rate {rate} for n={n}, theta={theta}")
        self.rows.append((n, theta, rate))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="\n") as f:
            f.write("n,theta_rad,rate_au\n")
            for n, theta, rate in self.rows:
                f.write(f"{n},{theta:.16e},{rate:.16e}\n")


# ---------------------------------------------------------------------------
# Coupling amplitudes
# ---------------------------------------------------------------------------


def coupling_amplitude(
    traj: Trajectory,
    mode: PhotonMode,
    t: float,
    Z: float = 1.0,
    tol: Tolerance = Tolerance(1e-9, 1e-12),
) -> complex:
    """Photon coupling amplitude: i (Z/c) g_q int_{t0}^{t} e* . v0(t')
    exp(i omega t' - i q . r0(t')) dt'."""
    t0 = traj.domain[0]
    if t < t0:
        raise DomainError(f"time {t} before trajectory domain start {t0}")
    if t == t0:
        return 0.0 + 0.0j
    omega = mode.omega
    e = mode.e_vec
    q = mode.q

    def integrand(tp):
        phase = omega * tp - float(q @ traj.r0(tp))
        return float(e @ traj.v0(tp)) * complex(math.cos(phase), math.sin(phase))

    re, re_err = scipy.integrate.quad(
        lambda tp: integrand(tp).real, t0, t, epsabs=tol.abs, epsrel=tol.rel, limit=500
    )
    im, im_err = scipy.integrate.quad(
        lambda tp: integrand(tp).imag, t0, t, epsabs=tol.abs, epsrel=tol.rel, limit=500
    )
    val = complex(re, im)
    scale = max(abs(val), 1.0)
    if re_err + im_err > 100 * (tol.abs + tol.rel * scale):
        raise ConvergenceError(
            "coupling amplitude quadrature did not converge",
            best_estimate=val,
            error_estimate=re_err + im_err,
        )
    g_q = math.sqrt(mode.g_squared)
    return 1j * (Z / C_AU) * g_q * val


def mean_photon_number(
    traj: Trajectory, mode: PhotonMode, t: float, Z: float = 1.0
) -> float:
    """Semiclassical mean photon number |Q(t)|^2 in the given mode."""
    return abs(coupling_amplitude(traj, mode, t, Z)) ** 2


# ---------------------------------------------------------------------------
# Correlation-integral rate
# ---------------------------------------------------------------------------


def rate_integrand(
    traj: Trajectory, q: np.ndarray, t: float, Z: float, tau: float
) -> complex:
    """Integrand of the polarization-summed rate correlation integral at lag tau."""
    q = np.asarray(q, dtype=float)
    q2 = float(q @ q)
    if q2 <= 0:
        raise DomainError("rate integrand requires |q| > 0")
    omega = C_AU * math.sqrt(q2)
    a = t - abs(tau) / 2.0 + tau / 2.0
    b = t - abs(tau) / 2.0 - tau / 2.0
    va, vb = traj.v0(a), traj.v0(b)
    bracket = float(va @ vb) - float(q @ va) * float(q @ vb) / q2
    phase = omega * tau - float(q @ (traj.r0(a) - traj.r0(b)))
    g2 = 2.0 * math.pi * C_AU**2 / omega
    return (Z**2 / C_AU**2) * g2 * bracket * complex(math.cos(phase), math.sin(phase))


def _tapered_rate(traj, q, t, Z, window, n_samples):
    tau = np.linspace(-window, window, n_samples)
    vals = np.array([rate_integrand(traj, q, t, Z, tk) for tk in tau])
    # cosine taper on the outer quarter of each side suppresses the
    # truncation oscillation of non-decaying integrands
    at = np.abs(tau)
    w = np.ones_like(at)
    edge = at > 0.75 * window
    w[edge] = 0.5 * (1.0 + np.cos(np.pi * (at[edge] / window - 0.75) / 0.25))
    return float(np.real(np.trapezoid(vals * w, tau)))


def rate_general(
    traj: Trajectory,
    q: np.ndarray,
    t: float,
    Z: float = 1.0,
    window: float = 100.0,
    tol: Tolerance = Tolerance(1e-3, 1e-12),
) -> float:
    """d/dt of the polarization-summed photon number via the correlation
    integral, truncated (with a smooth taper) at +/- window."""
    omega = C_AU * float(np.linalg.norm(q))
    n = int(max(4097, min(2**20 + 1, 16 * omega * window / math.pi)))
    if n % 2 == 0:
        n += 1
    full = _tapered_rate(traj, q, t, Z, window, n)
    half = _tapered_rate(traj, q, t, Z, window / 2.0, n // 2 + 1)
    err = abs(full - half)
    if err > tol.abs + tol.rel * max(abs(full), 1e-300):
        raise ConvergenceError(
            "rate correlation integral: truncation error estimate above tolerance",
            best_estimate=full,
            error_estimate=err,
        )
    return full


# ---------------------------------------------------------------------------
# Schott per-harmonic distribution and totals
# ---------------------------------------------------------------------------


def schott_angular_rate(n: int, theta: float, beam: BeamParams) -> float:
    """Photons per atomic time per steradian emitted into harmonic n at polar
    angle theta from the field axis:

        dN_n/(dt dOmega) = Z^2 n omega0 / (2 pi c)
                           * [cot^2(theta) J_n^2(n beta sin theta)
                              + beta^2 J_n'^2(n beta sin theta)]
    """
    if n < 1:
        raise DomainError(f"harmonic must be >= 1, got {n}")
    pref = beam.Z**2 * n * beam.omega0 / (2.0 * math.pi * C_AU)
    s = math.sin(theta)
    if abs(s) < 1e-12:
        # small-argument limit: only n = 1 survives, bracket -> beta^2 / 2
        return pref * beam.beta**2 / 2.0 if n == 1 else 0.0
    x = n * beam.beta * s
    jn = float(scipy.special.jv(n, x))
    jnp = float(scipy.special.jvp(n, x, 1))
    c2 = math.cos(theta) ** 2
    bracket = (c2 / s**2) * jn**2 + beam.beta**2 * jnp**2
    return pref * bracket


def _bracket_integral(n: float, beam: BeamParams, sin_weight: bool = False) -> float:
    """int_0^pi sin(theta) [cot^2 J_n^2 + beta^2 J_n'^2] dtheta, evaluated in
    u = cos(theta) with node placement adapted to the 1/gamma beaming width.
    With sin_weight, an extra sin(theta) factor is included (momentum moment).
    Accepts continuous n for the smooth spectral envelope."""
    w = math.sqrt(1.0 / beam.gamma**2 + (2.0 / n) ** (2.0 / 3.0))
    umax = min(1.0, 8.0 * w)
    u, wt = gauss_nodes(0.0, umax, 64)
    s2 = 1.0 - u**2
    s = np.sqrt(s2)
    x = n * beam.beta * s
    jn = scipy.special.jv(n, x)
    jnp = scipy.special.jvp(n, x, 1)
    bracket = (u**2 / s2) * jn**2 + beam.beta**2 * jnp**2
    if sin_weight:
        bracket = bracket * s
    return 2.0 * float(np.sum(wt * bracket))  # symmetric in u -> 2x half-range


def schott_harmonic_rate(n: int, beam: BeamParams) -> float:
    """Photons per atomic time emitted into harmonic n, integrated over solid
    angle: 2 pi int_0^pi sin(theta) dN_n/(dt dOmega) dtheta."""
    if beam.beta == 0.0:
        return 0.0
    return beam.Z**2 * n * beam.omega0 / C_AU * _bracket_integral(n, beam)


def spectral_sum(
    per_n: Callable[[float], float],
    n_cap: int,
    n_exact: int = 512,
    per_decade: int = 48,
) -> float:
    """Sum per_n(n) over harmonics n = 1..n_cap.

    Harmonics up to n_exact are summed exactly; the smooth tail is converted
    to an integral on a log grid (midpoint-matched at n_exact + 1/2), which
    keeps ultrarelativistic sums over ~gamma^3 harmonics tractable.
    """
    n_exact = min(n_exact, n_cap)
    total = math.fsum(per_n(float(k)) for k in range(1, n_exact + 1))
    if n_cap > n_exact:
        lo, hi = n_exact + 0.5, n_cap + 0.5
        m = max(8, int(per_decade * math.log10(hi / lo)))
        grid = np.exp(np.linspace(math.log(lo), math.log(hi), m))
        vals = np.array([per_n(float(g)) for g in grid]) * grid
        total += float(np.trapezoid(vals, np.log(grid)))
    return total


def _default_cap(beam: BeamParams) -> int:
    return max(64, int(50 * beam.gamma**3))


def classical_power(beam: BeamParams) -> float:
    """Classical synchrotron power (2/3) Z^2 c beta^4 gamma^4 / R^2 (a.u.)."""
    return (2.0 / 3.0) * beam.Z**2 * C_AU * beam.beta**4 * beam.gamma**4 / beam.R**2


def total_power(beam: BeamParams, tol: Tolerance = Tolerance(1e-4, 0.0)) -> float:
    """Radiated power: sum over harmonics of n omega0 times the harmonic rate."""
    if beam.beta == 0.0:
        return 0.0
    pref = beam.Z**2 * beam.omega0**2 / C_AU
    return spectral_sum(
        lambda n: pref * n * n * _bracket_integral(n, beam), _default_cap(beam)
    )


def total_photon_rate(beam: BeamParams, tol: Tolerance = Tolerance(1e-4, 0.0)) -> float:
    """Total photons per atomic time, summed over harmonics."""
    if beam.beta == 0.0:
        return 0.0
    pref = beam.Z**2 * beam.omega0 / C_AU
    return spectral_sum(
        lambda n: pref * n * _bracket_integral(n, beam), _default_cap(beam)
    )


def momentum_loss_rate(
    beam: BeamParams, tol: Tolerance = Tolerance(1e-4, 0.0)
) -> np.ndarray:
    """Period-averaged momentum radiated per atomic time, in the co-rotating
    basis (longitudinal along the instantaneous velocity, radial, field axis).

    The radial and axial components vanish by the symmetry of the averaged
    circular-orbit distribution; the longitudinal component approaches
    total_power/c as beta -> 1 (forward beaming).
    """
    if beam.beta == 0.0:
        return np.zeros(3)
    pref = beam.Z**2 * beam.omega0**2 / C_AU**2
    longitudinal = spectral_sum(
        lambda n: pref * n * n * _bracket_integral(n, beam, sin_weight=True),
        _default_cap(beam),
    )
    return np.array([-longitudinal, 0.0, 0.0])


def build_spectral_table(
    beam: BeamParams, harmonics: Sequence[int], thetas: Sequence[float]
) -> SpectralTable:
    table = SpectralTable()
    for n in harmonics:
        for theta in thetas:
            table.add(n, theta, schott_angular_rate(n, theta, beam))
    return table
