import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import erfc

from georestrict import special_functions as sf
from georestrict.quadfield import quad_field


@pytest.mark.parametrize("z", [0.5, 1.0, 3 + 4j, 0.1 - 20j, 7.25 + 100j])
def test_log_gamma_oracle(z):
    assert abs(sf.log_gamma_complex(z) - complex(mp.loggamma(z))) < 1e-13


def test_log_gamma_pole():
    with pytest.raises(sf.PoleError):
        sf.log_gamma_complex(-2.0)
    with pytest.raises(sf.PoleError):
        sf.log_gamma_complex(np.array([1.0, 0.0]))


def gamma_oracle(s, t, r):
    with mp.workdps(30):
        out = mp.pi ** (-2 * s)
        for w in (t + r, t - r):
            out *= mp.gamma((s + 1j * w) / 2) * mp.gamma((s - 1j * w) / 2)
        return complex(out)


def test_gamma_s_f_x_oracle():
    p = sf.GammaFactorParams(10.0, 5, 3.0)
    ref = gamma_oracle(0.5, 10.0, p.r)
    assert abs(sf.gamma_s_f_x(0.5, p) - ref) < 1e-12 * abs(ref)
    assert abs(p.r - math.pi * 3 / float(quad_field(5).log_eps)) < 1e-15


@given(st.floats(0.5, 40), st.floats(-30, 30), st.floats(-3, 3), st.floats(0.2, 3))
def test_gamma_symmetries(t, x, v, sig):
    r = float(sf.spectral_r(x, 5))
    rm = float(sf.spectral_r(-x, 5))
    s = sig + 1j * v
    a = sf.log_gamma_s_f_x(s, t, r)
    assert abs(np.exp(a - sf.log_gamma_s_f_x(s, t, rm)) - 1) < 1e-10
    assert abs(np.exp(np.conj(a) - sf.log_gamma_s_f_x(np.conj(s), t, r)) - 1) < 1e-10
    assert abs(np.imag(sf.log_gamma_s_f_x(0.5, t, r))) < 1e-9


def test_gamma_adjoint_1():
    ts = np.linspace(0.5, 30, 60)
    vals = np.array([sf.gamma_adjoint_1(t) for t in ts])
    assert np.all(vals > 0) and np.all(np.diff(vals) < 0)
    assert np.all(vals >= np.exp(-np.pi * ts) / np.pi)
    for t in (1.0, 9.53, 13.78):
        with mp.workdps(30):
            gr = lambda s: mp.pi ** (-s / 2) * mp.gamma(s / 2)
            ref = gr(2) * gr(1 + 2j * t) * gr(1 - 2j * t)
        assert abs(sf.gamma_adjoint_1(t) - float(mp.re(ref))) < 1e-13 * float(mp.re(ref))
        assert abs(sf.log_gamma_adjoint_1(t) - math.log(sf.gamma_adjoint_1(t))) < 1e-12
    assert math.isfinite(sf.log_gamma_adjoint_1(500.0))


def test_log_gamma_adjoint_at_1():
    for t in (2.0, 9.53):
        with mp.workdps(30):
            gr = lambda s: mp.pi ** (-s / 2) * mp.gamma(s / 2)
            ref = complex(mp.log(gr(1) * gr(1 + 2j * t) * gr(1 - 2j * t)))
        assert abs(complex(sf.log_gamma_adjoint(1.0, t)) - ref) < 1e-12


def test_analytic_conductor():
    assert sf.analytic_conductor(0.5, 10.0, 0.0) == 10201.0
    assert sf.analytic_conductor(0.5, 10.0, 3.0) == (1 + 13 ** 2) * (1 + 7 ** 2)


def test_G_symmetry_and_positivity():
    n = np.arange(-60, 61)
    G = sf.G_ratio(n, 13.78, 5)
    assert np.all(G > 0)
    assert np.allclose(G, G[::-1], rtol=1e-12)


@pytest.mark.parametrize("D, t", [(5, 10.0), (5, 13.78), (12, 9.53)])
def test_G_tail_decay(D, t):
    cD = quad_field(D).c_D_f
    n0 = int(4 * cD * t + 10)
    n = np.arange(n0, n0 + 60)
    lg = sf.log_G_ratio(n, t, D)
    assert np.all(lg[2:] - lg[:-2] <= -math.pi / cD)


def test_G_oracle():
    t, D, n = 13.78, 5, 7
    r = float(sf.spectral_r(n, D))
    ref = gamma_oracle(0.5, t, r).real / sf.gamma_adjoint_1(t)
    assert abs(sf.G_ratio(n, t, D) / ref - 1) < 1e-10


def test_gamma_tail_sum():
    s10, s20 = sf.gamma_tail_sum(10.0, 5), sf.gamma_tail_sum(20.0, 5)
    assert s10 > 0 and s20 > 0
    cD = quad_field(5).c_D_f
    n = np.arange(math.floor(cD * 10) + 1, 400)
    direct = 2 * np.sum(sf.G_ratio(n, 10.0, 5) * sf.analytic_conductor(0.5, 10.0, sf.spectral_r(n, 5)) ** 0.26)
    assert abs(s10 - direct) < 1e-12 * direct


@pytest.mark.parametrize("gauss", [1.0, 0.1])
def test_afe_weight_closed_form(gauss):
    y = np.logspace(-4, 4, 41)
    got = sf.afe_weight(y, lambda u: np.zeros_like(u), sf.VConfig(gauss=gauss), pole_gap=10.0)
    ref = 0.5 * erfc(np.log(y) / (2 * math.sqrt(gauss)))
    assert np.max(np.abs(got - ref)) < 1e-13


def V_oracle(y, x, t, D, sigma=2.0):
    """Independent mpmath quadrature on Re u = sigma."""
    r = float(sf.spectral_r(x, D))
    with mp.workdps(25):
        g = lambda s: mp.pi ** (-2 * s) * mp.gamma((s + 1j * (t + r)) / 2) * mp.gamma((s - 1j * (t + r)) / 2) \
            * mp.gamma((s + 1j * (t - r)) / 2) * mp.gamma((s - 1j * (t - r)) / 2)
        g0 = g(mp.mpf(0.5))
        f = lambda v: mp.re(g(0.5 + sigma + 1j * v) / g0 * mp.exp((sigma + 1j * v) ** 2)
                            * mp.power(y, -(sigma + 1j * v)) / (sigma + 1j * v))
        return float(mp.quad(f, [0, 2, 4, 8]) / mp.pi)


@pytest.mark.parametrize("y, x", [(30.0, 0.0), (300.0, 3.0), (5000.0, -6.0)])
def test_V_oracle(y, x):
    ref = V_oracle(y, x, 13.78, 5)
    assert abs(sf.V(y, x, 13.78, 5) - ref) < 1e-11
    assert abs(sf.V(y, x, 13.78, 5, sf.VConfig(sigma=3.0)) - ref) < 1e-11


@given(st.floats(-2, 7), st.floats(-8, 8))
def test_V_two_rules(logy, x):
    y = 10 ** logy
    assert abs(sf.V(y, x, 13.78, 5) - sf.V_quad(y, x, 13.78, 5)) < 1e-10


def test_V_limits():
    assert abs(sf.V(1e-6, 0.0, 13.78, 5) - 1) < 1e-3
    assert abs(sf.V(1e-3, 0.0, 5.0, 5) - 1) < 1e-5
    assert abs(sf.V(1e9, 0.0, 13.78, 5)) < 1e-12
    y = np.logspace(-3, 8, 30)
    v = sf.V(y, 0.0, 13.78, 5)
    assert np.all(np.diff(v) < 1e-12)


def test_V_rejects_bad_input():
    with pytest.raises(ValueError):
        sf.V(0.0, 0.0, 13.78, 5)
    with pytest.raises(sf.ContourError):
        sf.V(10.0, 0.0, 13.78, 5, sf.VConfig(sigma=0.0))
    with pytest.raises(sf.ContourError):
        sf.V(10.0, 0.0, 13.78, 5, sf.VConfig(sigma=-0.7))


def test_V_derivative():
    y = np.array([10.0, 1000.0])
    assert np.allclose(sf.V_derivative(y, 2.0, 20.0, 5, 0), sf.V(y, 2.0, 20.0, 5))
    h = 1e-3
    fd = (sf.V(100.0, 2.0 + h, 20.0, 5) - sf.V(100.0, 2.0 - h, 20.0, 5)) / (2 * h)
    assert abs(sf.V_derivative(100.0, 2.0, 20.0, 5, 1) - fd) < 1e-5
    assert sf.V_derivative_sup(2.0, 20.0, 5, 1) >= abs(sf.V_derivative(100.0, 2.0, 20.0, 5, 1)) - 1e-12
    with pytest.raises(ValueError):
        sf.V_derivative_check(10.0, 0.0, 20.0, 5, 1, T=1.0)
    rep = sf.V_derivative_check(10.0, 0.0, 20.0, 5, 1, T=6.0, C=1e6)
    assert rep.passed and rep.value >= 0
