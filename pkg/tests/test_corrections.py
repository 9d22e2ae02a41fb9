"""Photon-interaction exponent P and the exp(-P)-damped photon number."""

import math
import warnings

import numpy as np
import pytest

from synchrad.corrections import (
    ConstantVelocity,
    GaussianPacket,
    ModeSum,
    PiecewiseConstantVelocity,
    UniformVelocityAmplitudes,
    corrected_photon_number,
    mu_coupling,
    p_const_velocity,
    p_general,
    p_nonrel_asymptotic,
)
from synchrad.errors import DomainError
from synchrad.numerics import EULER_GAMMA
from synchrad.semiclassical import PhotonMode
from synchrad.units import C_AU

V01 = 0.1 * C_AU


def small_mode_sum():
    return ModeSum(q_c=0.5, n_radial=12, n_polar=10, n_azimuth=10)


def test_mode_sum_weights_integrate_momentum_ball():
    # sum of weights = int q^2 dq dOmega / (2 pi)^3 = q_c^3 / (6 pi^2)
    ms = small_mode_sum()
    _, weights, e1, e2 = ms.nodes()
    assert float(np.sum(weights)) == pytest.approx(ms.q_c**3 / (6 * math.pi**2), rel=1e-10)
    q_vecs = ms.nodes()[0]
    n = q_vecs / np.linalg.norm(q_vecs, axis=1, keepdims=True)
    assert np.max(np.abs(np.sum(e1 * n, axis=1))) < 1e-12
    assert np.max(np.abs(np.sum(e2 * n, axis=1))) < 1e-12
    assert np.max(np.abs(np.sum(e1 * e2, axis=1))) < 1e-12


def test_mu_coupling_sign_and_scale():
    q = np.array([0.0, 0.0, 2.0])
    qp = np.array([0.0, 0.0, 3.0])
    assert mu_coupling(q, qp, gamma=2.0) == pytest.approx(-3.0)
    with pytest.raises(DomainError):
        mu_coupling(q, qp, gamma=0.5)


def test_p_diagonal_and_hermitian():
    v0 = np.array([V01, 0.0, 0.0])
    amps = UniformVelocityAmplitudes(v0)
    q = np.array([0.0, 0.0, 0.01])
    ms = small_mode_sum()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        diag = p_general(q, amps, 1.005, 2.0, 2.0, mode_sum=ms).value
        p12 = p_general(q, amps, 1.005, 1.0, 2.0, mode_sum=ms).value
        p21 = p_general(q, amps, 1.005, 2.0, 1.0, mode_sum=ms).value
    assert abs(diag) <= 1e-12
    assert abs(p12 - np.conj(p21)) <= 1e-12
    const = p_const_velocity(v0, q, t1=1.0, t2=2.0)
    const_swap = p_const_velocity(v0, q, t1=2.0, t2=1.0)
    assert const.value == pytest.approx(np.conj(const_swap.value), rel=1e-13)
    assert p_const_velocity(v0, q, t1=3.0, t2=3.0).value == 0.0


def test_p_vanishing_momentum_limit():
    v0 = np.array([V01, 0.0, 0.0])
    amps = UniformVelocityAmplitudes(v0)
    ms = small_mode_sum()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        tiny = p_general(np.array([0.0, 0.0, 1e-10]), amps, 1.005, 1.0, 2.0, mode_sum=ms).value
        ref = p_general(np.array([0.0, 0.0, 0.01]), amps, 1.005, 1.0, 2.0, mode_sum=ms).value
    assert abs(tiny) < 1e-6 * abs(ref)


def test_const_velocity_matches_nonrel_asymptote():
    # c q_c dt >= 100 at beta = 0.1: closed angular form vs asymptote within 5%
    v0 = np.array([V01, 0.0, 0.0])
    q = np.array([0.0, 0.0, 1e-4])
    for dt in (100.0 / (C_AU * C_AU), 1.0):
        got = p_const_velocity(v0, q, t1=dt, t2=0.0).value
        ref = p_nonrel_asymptotic(V01, 1.0, C_AU, dt)
        assert abs(got - ref) <= 0.05 * abs(ref)
        assert got.real >= 0.0


def test_nonrel_asymptote_properties():
    # real part grows as ln|dt|; imaginary part is +/- pi * prefactor
    pref = 2 * V01**2 / (3 * math.pi * C_AU**3)
    p1 = p_nonrel_asymptotic(V01, 1.0, C_AU, 1.0)
    p2 = p_nonrel_asymptotic(V01, 1.0, C_AU, math.e)
    assert p2.real - p1.real == pytest.approx(2 * pref, rel=1e-12)
    assert p1.imag == pytest.approx(math.pi * pref, rel=1e-12)
    assert p_nonrel_asymptotic(V01, 1.0, C_AU, -1.0).imag == pytest.approx(
        -math.pi * pref, rel=1e-12
    )
    assert p1.real == pytest.approx(
        2 * pref * (EULER_GAMMA + math.log(C_AU * C_AU)), rel=1e-12
    )
    with pytest.raises(DomainError):
        p_nonrel_asymptotic(V01, 1.0, C_AU, 0.0)


def test_cutoff_sensitivity_is_logarithmic():
    # doubling q_c shifts Re P by the 2 * pref * ln 2 ultraviolet logarithm
    v0 = np.array([V01, 0.0, 0.0])
    q = np.array([0.0, 0.0, 1e-4])
    dt = 5.0
    p1 = p_const_velocity(v0, q, q_c=C_AU, t1=dt, t2=0.0).value
    p2 = p_const_velocity(v0, q, q_c=2 * C_AU, t1=dt, t2=0.0).value
    pref = 2 * V01**2 / (3 * math.pi * C_AU**3)
    assert p2.real - p1.real == pytest.approx(2 * pref * math.log(2.0), rel=0.05)


def test_corrected_number_semiclassical_path():
    # with no exponent the double integral factorizes into |int Qdot|^2
    v = np.array([0.05 * C_AU, 0.0, 0.0])
    law = ConstantVelocity(v)
    mode = PhotonMode(alpha=1, q=np.array([0.0, 0.0, 0.02]))
    T = 4.0
    got = corrected_photon_number(law, mode, T)
    dqv = mode.omega - float(mode.q @ v)
    ev = float(mode.e_vec @ v)
    expect = (1.0 / C_AU) ** 2 * mode.g_squared * ev**2 * 4 * math.sin(dqv * T / 2) ** 2 / dqv**2
    assert got == pytest.approx(expect, rel=1e-8)


def test_constant_exponent_factorizes():
    # P(t1, t2) = const real p multiplies the number by exp(-p) exactly
    law = ConstantVelocity(np.array([0.05 * C_AU, 0.0, 0.0]))
    mode = PhotonMode(alpha=1, q=np.array([0.0, 0.0, 0.02]))
    base = corrected_photon_number(law, mode, 2.0)
    for p in (0.3, 1.0, 2.5):
        got = corrected_photon_number(law, mode, 2.0, p_provider=lambda a, b: complex(p))
        assert got == pytest.approx(math.exp(-p) * base, rel=1e-10)
    # monotone damping in the exponent
    vals = [
        corrected_photon_number(law, mode, 2.0, p_provider=lambda a, b: complex(p))
        for p in (0.1, 0.5, 1.5)
    ]
    assert vals[0] > vals[1] > vals[2]


def test_jump_law_kinematics():
    law = PiecewiseConstantVelocity(
        np.array([1.0, 0.0, 0.0]), np.array([0.0, 2.0, 0.0]), t_jump=1.5
    )
    assert np.allclose(law.velocity(1.0), [1.0, 0.0, 0.0])
    assert np.allclose(law.velocity(2.0), [0.0, 2.0, 0.0])
    assert np.allclose(law.position(1.5), [1.5, 0.0, 0.0])
    assert np.allclose(law.position(2.5), [1.5, 2.0, 0.0])
    assert law.breakpoints(3.0) == [0.0, 1.5, 3.0]
    assert law.breakpoints(1.0) == [0.0, 1.0]


def test_gaussian_packet_nodes_normalized():
    packet = GaussianPacket(k0=np.array([0.0, 0.0, 5.0]), delta_l=2.0, delta_perp=1.0, n_nodes=4)
    nodes, weights = packet.momentum_nodes()
    assert len(nodes) == 64
    assert math.fsum(weights) == pytest.approx(1.0, rel=1e-12)
    mean = np.sum([w * k for w, k in zip(weights, nodes)], axis=0)
    assert np.allclose(mean, packet.k0, atol=1e-12)


def test_packet_averaging_reduces_to_plain_at_zero_width():
    mode = PhotonMode(alpha=1, q=np.array([0.0, 0.0, 0.02]))
    v = np.array([0.05 * C_AU, 0.0, 0.0])
    plain = corrected_photon_number(ConstantVelocity(v), mode, 2.0)
    packet = GaussianPacket(k0=v, delta_l=1e6, delta_perp=1e6, n_nodes=3)
    averaged = corrected_photon_number(
        ConstantVelocity(v),
        mode,
        2.0,
        packet=packet,
        velocity_law_factory=lambda k: ConstantVelocity(k),
    )
    assert averaged == pytest.approx(plain, rel=1e-6)
    with pytest.raises(DomainError):
        corrected_photon_number(ConstantVelocity(v), mode, 2.0, packet=packet)
