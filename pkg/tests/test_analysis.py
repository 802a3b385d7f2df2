import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from georestrict import analysis as an
from georestrict import special_functions as sf
from georestrict.quadfield import FieldElement, quad_field
from georestrict.verify import representative_alpha

CD5 = quad_field(5).c_D_f


# --- smooth steps and partitions of unity ----------------------------------------------------

def test_smooth_step_shape():
    s = an.SmoothStep(1.0, 2.0)
    x = np.linspace(-3, 5, 2001)
    v = s(x)
    assert np.all(v[x <= 1] == 1) and np.all(v[x >= 2] == 0)
    assert np.all(np.diff(v) <= 0)
    assert abs(s(1.5) - 0.5) < 1e-14  # the mollifier is symmetric
    r = an.SmoothStep(-0.5, 0.0, rising=True)
    assert r(-1.0) == 0 and r(0.0) == 1


@pytest.mark.parametrize("j", [1, 2, 3])
def test_smooth_step_derivatives(j):
    s = np.linspace(0.05, 0.95, 19)
    h = 1e-5
    lower = lambda u: an.smooth_rise_deriv(u, j - 1)
    fd = (lower(s + h) - lower(s - h)) / (2 * h)
    assert np.max(np.abs(an.smooth_rise_deriv(s, j) - fd)) < 1e-6 * max(1, np.max(np.abs(fd)))
    assert np.all(an.smooth_rise_deriv(np.array([-0.5, 0.0, 1.0, 1.5]), j) == 0)


def test_dyadic_support_and_partition():
    x = np.linspace(-1, 5, 6001)
    w = an.dyadic_W(x)
    assert np.all(w[(x < 0.5) | (x > 2)] == 0) and np.all(w >= 0)
    assert an.partition_sum_check(np.logspace(0, 7, 5000)) < 1e-14
    assert abs(an.partition_sum(1.0)[0] - 1) < 1e-15
    assert an.partition_sum(0.3)[0] == 1 - an.ETA(0.6) == 0.0


@given(st.floats(0.01, 1e5), st.integers(0, 25))
def test_telescoping(x, K):
    lhs = an.partition_sum(x, K)[0]
    rhs = an.ETA(x / 2.0 ** K) - an.ETA(2 * x)
    assert abs(lhs - rhs) < 1e-14
    if x >= 1 and 2 ** K >= x:
        assert abs(lhs - 1) < 1e-14


# --- windows -------------------------------------------------------------------------------------

def test_bump_U():
    t = 20.0
    assert an.bump_U(0.0, t, 5) == 1 and an.bump_U(50.0, t, 5) == 1
    assert an.bump_U(-CD5 * t, t, 5) == 0 and an.bump_U(-CD5 * t / 2, t, 5) == 0
    x = np.linspace(0, 3 * CD5 * t, 3001)
    assert np.all(an.bump_U(x, t, 5) + an.bump_U(-x, t, 5) >= 1)
    with pytest.raises(ValueError):
        an.bump_U(0.0, 1.5, 5)


@pytest.mark.parametrize("t", [10.0, 20.0, 80.0])
def test_window_support_and_kD(t):
    for k in range(0, 12):
        lo, hi = an.window_support(k, t, 5)
        x = np.linspace(lo - 5, hi + 5, 4001)
        w = an.window_W_k(x, k, t, 5)
        assert np.all(w[(x < lo) | (x > hi)] == 0)
        if k >= an.k_D(t, 5):
            n = np.arange(math.floor(lo) - 1, math.ceil(hi) + 2)
            assert np.all(an.window_W_k(n, k, t, 5) * an.bump_U(n, t, 5) == 0)


def test_window_derivative_chain_rule():
    x = np.linspace(2.0, 5.0, 13)
    h = 1e-4
    fd = (an.window_W_k(x + h, 1, 20.0, 5) - an.window_W_k(x - h, 1, 20.0, 5)) / (2 * h)
    assert np.max(np.abs(an.window_W_k_deriv(x, 1, 20.0, 5, 1) - fd)) < 1e-6


@pytest.mark.xfail(strict=True, reason="constant fitted at one point is exceeded by ~15% elsewhere; see the ledger")
def test_G_window_estimate_fit_at_smallest_point():
    def ratio(t, k):
        lo, hi = an.window_support(k, t, 5)
        n = np.arange(math.ceil(lo), math.floor(hi) + 1)
        w = an.window_W_k(n, k, t, 5) * an.bump_U(n, t, 5)
        return float(np.max(w * sf.G_ratio(n, t, 5))) * (2.0 ** k * t) ** 0.5
    C = ratio(10.0, 0)
    assert all(ratio(t, k) <= C for t in (10.0, 20.0, 40.0, 80.0) for k in range(int(an.k_D(t, 5)) + 1))


@pytest.mark.parametrize("t", [10.0, 20.0, 40.0, 80.0])
def test_conductor_on_windows(t):
    """q_infty / (Tt)^2 lies in [1/(16 c_D^2), 5 (1 + 4/c_D^2)] on the support of W_k U."""
    lo_c, hi_c = 1 / (16 * CD5 ** 2), 5 * (1 + 4 / CD5 ** 2)
    for k in range(int(an.k_D(t, 5)) + 1):
        lo, hi = an.window_support(k, t, 5)
        n = np.arange(math.ceil(lo), math.floor(hi) + 1)
        n = n[an.window_W_k(n, k, t, 5) * an.bump_U(n, t, 5) > 0]
        q = sf.analytic_conductor(0.5, t, sf.spectral_r(n, 5)) / (2.0 ** k * t) ** 2
        assert np.all((q >= lo_c) & (q <= hi_c))


# --- H_A, Pi_alpha and Poisson -------------------------------------------------------------------

def test_character_exponent_identity():
    F = quad_field(5)
    for alpha in [FieldElement(1, 0, 5), FieldElement(2, 1, 5), FieldElement(4, 1, 5), FieldElement(7, 3, 5)]:
        if not F.fundamental_domain_contains(alpha):
            continue
        ratio = float(F.ratio_exponent(alpha))
        assert 0 <= ratio < 2
        x = np.linspace(-10, 10, 41)
        lhs = an.character_exponential(alpha, x)
        rhs = np.exp(2j * np.pi * x * an.theta_alpha(alpha))
        assert np.max(np.abs(lhs - rhs)) < 1e-13


def test_theta_range_over_region():
    F = quad_field(5)
    for alpha in an.S_region_enumerate(an.LatticeRegion(1, 1.0, 200, 5)):
        assert 0 <= 2 * an.theta_alpha(alpha, F) < 2


def test_H_A_support():
    p = an.HParams(2, 3, 20.0, 5)
    alpha = representative_alpha(5, p.A)
    lo, hi = an.window_support(2, 20.0, 5)
    xs = np.array([lo - 1, lo - 0.01, hi + 0.01, hi + 3])
    assert np.all(an.H_A(alpha, 1, xs, p) == 0)
    assert np.any(an.H_A(alpha, 1, np.linspace(lo, hi, 20), p) != 0)
    far = next(e for e in an.S_region_enumerate(an.LatticeRegion(1, 1.0, 64, 5)) if e.norm() > 2 * p.A)
    assert np.all(an.H_A(far, 1, np.linspace(lo, hi, 20), p) == 0)


def test_H_A_function_matches_direct():
    p = an.HParams(1, 2, 20.0, 5)
    alpha = representative_alpha(5, p.A)
    h, (lo, hi) = an.H_A_function(alpha, 2, p)
    x = np.linspace(lo, hi, 17)
    assert np.max(np.abs(h(x) - an.H_A(alpha, 2, x, p))) < 1e-12


def test_Pi_alpha_is_the_sum_of_H():
    p = an.HParams(2, 3, 20.0, 5)
    alpha = representative_alpha(5, p.A)
    lo, hi = an.window_support(2, 20.0, 5)
    n = np.arange(math.ceil(lo), math.floor(hi) + 1)
    wa = an._alpha_weight(abs(alpha.norm()), p)
    direct = np.sum(an.H_A(alpha, 1, n, p) * an.character_exponential(alpha, n)) * (p.T * p.t) ** -0.5 / wa
    assert abs(an.Pi_alpha(alpha, 1, p) - direct) < 1e-12


def bulk_derivative_ratios(t, j):
    out = []
    for a in (2, 3):
        alpha = representative_alpha(5, 2 ** a)
        k = 0
        while 2.0 ** k <= CD5 * t / 2:
            p = an.HParams(k, a, t, 5)
            h, (lo, hi) = an.H_A_function(alpha, 1, p)
            x = np.linspace(lo, hi, 4001)
            d = h(x)
            for _ in range(j):
                d = np.gradient(d, x[1] - x[0])
            unit = t ** 0.05 * p.T ** -j * (t * p.T * p.A) ** -0.5
            out.append(float(np.max(np.abs(d))) / unit)
            k += 1
    return out


@pytest.mark.parametrize("j", [1, 2])
def test_H_A_derivative_bound(j):
    """C fitted on windows inside the plateau of U at t = 20, 40 and asserted at t = 80."""
    C = max(bulk_derivative_ratios(20.0, j) + bulk_derivative_ratios(40.0, j))
    assert max(bulk_derivative_ratios(80.0, j)) <= C


@pytest.mark.parametrize("xi", [0.0, 0.3, 1.0, 2.5])
def test_fourier_transform_gaussian(xi):
    h = lambda x: math.exp(-math.pi * x * x)
    assert abs(an.fourier_transform(h, (-8.0, 8.0), xi) - math.exp(-math.pi * xi * xi)) < 1e-12


def test_fourier_transform_shifted_gaussian():
    h = lambda x: math.exp(-math.pi * (x - 1.5) ** 2)
    for xi in (0.5, 2.0):
        ref = np.exp(-math.pi * xi * xi) * np.exp(-2j * math.pi * 1.5 * xi)
        assert abs(an.fourier_transform(h, (-7.0, 10.0), xi) - ref) < 1e-12


def test_poisson_residual():
    p = an.HParams(2, 3, 20.0, 5)
    res = an.poisson_identity_residual(representative_alpha(5, p.A), 1, p)
    assert res.residual < 1e-8 and res.tail < 1e-8 and abs(res.lhs) > 1e-6


def test_hat_H_decay():
    p = an.HParams(2, 3, 20.0, 5)
    alpha = representative_alpha(5, p.A)
    xs = np.arange(1, 11)
    vals = np.array([abs(an.hat_H_A(alpha, 1, float(x), p)) for x in xs])
    shape = p.T * 20.0 ** 0.05 * (p.T * xs) ** -2.0 * (20.0 * p.T * p.A) ** -0.5
    C = vals[0] / shape[0]
    assert np.all(vals <= C * shape * (1 + 1e-9))


# --- lattice regions --------------------------------------------------------------------------

def test_region_matches_bruteforce_example():
    reg = an.LatticeRegion(0, 2.0, 50, 5)
    got = sorted((e.a, e.b) for e in an.S_region_enumerate(reg))
    assert got == an.S_region_bruteforce(reg) and len(got) > 0


@given(st.integers(-1, 3), st.floats(0.05, 2.0), st.floats(1, 400), st.sampled_from([5, 12, 13]))
def test_region_properties(xi, R, A, D):
    reg = an.LatticeRegion(xi, R, A, D)
    F = quad_field(D)
    got = an.S_region_enumerate(reg)
    assert sorted((e.a, e.b) for e in got) == an.S_region_bruteforce(reg)
    assert all(F.fundamental_domain_contains(e) for e in got)
    smaller = an.S_region_enumerate(an.LatticeRegion(xi, R / 2, A, D))
    assert set(smaller) <= set(got)


def test_count_monotone_in_R():
    counts = [len(an.S_region_enumerate(an.LatticeRegion(1, R, 300, 5))) for R in (2.0, 1.0, 0.5, 0.25, 0.1, 0.01)]
    assert counts == sorted(counts, reverse=True)


def test_containment_and_count_bound():
    xis, R = (-1, 0, 1, 2), 0.5
    for A in (16, 64, 256):
        for xi in xis:
            assert an.parallelogram_check(an.LatticeRegion(xi, R, A, 5))
    shape = lambda A: R * A + math.sqrt(A)
    C = max(len(an.S_region_enumerate(an.LatticeRegion(xi, R, 16, 5))) for xi in xis) / shape(16)
    for A in (64, 256):
        for xi in xis:
            reg = an.LatticeRegion(xi, R, A, 5)
            cnt, bound = an.lipschitz_count_bound(reg, C)
            assert cnt <= bound
            assert cnt <= an.lattice_convex_bound(reg)


def test_parallelogram_hypotheses():
    with pytest.raises(ValueError):
        an.parallelogram_check(an.LatticeRegion(-2, 0.5, 16, 5))
    with pytest.raises(ValueError):
        an.LatticeRegion(0, 0.0, 16, 5)


@given(st.floats(0.5, 30), st.floats(-5, 5), st.floats(-5, 5))
def test_unit_square_lipschitz(L, x0, y0):
    xs = np.arange(math.ceil(x0), math.floor(x0 + L) + 1)
    ys = np.arange(math.ceil(y0), math.floor(y0 + L) + 1)
    assert len(xs) * len(ys) <= (L + 1) ** 2
