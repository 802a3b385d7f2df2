import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import primerange

from georestrict import hecke as hk
from georestrict import quadfield as qf


def legendre_oracle(D, p):
    r = pow(D % p, (p - 1) // 2, p)
    return 0 if r == 0 else (1 if r == 1 else -1)


@pytest.mark.parametrize("D", [5, 12, 13, 40, 229])
def test_kronecker_odd_primes(D):
    for p in primerange(3, 400):
        assert hk.kronecker(D, int(p)) == legendre_oracle(D, int(p))
    assert hk.kronecker(5, 2) == -1 and hk.kronecker(17, 2) == 1 and hk.kronecker(12, 2) == 0


def test_kronecker_table():
    t = hk.kronecker_table(5, 10)
    assert t.tolist() == [0, 1, -1, -1, 1, 0, 1, -1, -1, 1, 0]


def test_ideal_count_table():
    for D in (5, 12, 40):
        t = hk.ideal_count_table(D, 200)
        assert all(t[m] == len(qf.ideals_of_norm(D, m)) for m in range(1, 201))


def chars(D, ns=(0, 1, -2)):
    return [hk.HeckeCharacter(psi, n) for psi in hk.class_characters(D) for n in ns]


@pytest.mark.parametrize("D", [5, 12, 40, 136])
def test_unit_ideal(D):
    for chi in chars(D):
        assert abs(chi(qf.IdealRep.unit(D)) - 1) < 1e-14


def test_norm_11_matches_direct_value():
    F = qf.quad_field(5)
    chi = hk.HeckeCharacter(hk.ClassCharacter(5, ()), 2)
    for I in qf.ideals_of_norm(5, 11):
        g = qf.totally_positive_generator(I, F)
        assert abs(chi(I) - hk.direct_character_value(5, g, 2)) < 1e-12
        assert abs(abs(chi(I)) - 1) < 1e-14


@given(st.integers(-30, 30), st.integers(-30, 30), st.integers(-4, 4))
def test_h1_character_is_the_archimedean_factor(a, b, n):
    alpha = qf.FieldElement(a, b, 5)
    if not alpha.is_totally_positive():
        return
    chi = hk.HeckeCharacter(hk.ClassCharacter(5, ()), n)
    assert abs(chi(qf.principal_ideal(alpha)) - hk.direct_character_value(5, alpha, n)) < 1e-12


@given(st.sampled_from([5, 12, 40, 60]), st.integers(1, 60), st.integers(1, 60), st.integers(-3, 3), st.data())
def test_character_is_multiplicative(D, m1, m2, n, data):
    I1s, I2s = qf.ideals_of_norm(D, m1), qf.ideals_of_norm(D, m2)
    if not I1s or not I2s:
        return
    I1, I2 = data.draw(st.sampled_from(I1s)), data.draw(st.sampled_from(I2s))
    psi = data.draw(st.sampled_from(hk.class_characters(D)))
    chi = hk.HeckeCharacter(psi, n)
    assert abs(chi(I1 * I2) - chi(I1) * chi(I2)) < 1e-12


@given(st.sampled_from([5, 12, 40]), st.integers(1, 80), st.integers(-3, 3), st.data())
def test_conjugation(D, m, n, data):
    Is = qf.ideals_of_norm(D, m)
    if not Is:
        return
    I = data.draw(st.sampled_from(Is))
    chi = hk.HeckeCharacter(data.draw(st.sampled_from(hk.class_characters(D))), n)
    assert abs(chi.conj()(I) - chi(I).conjugate()) < 1e-12


def test_theta_examples():
    chi = hk.HeckeCharacter(hk.ClassCharacter(5, ()), 0)
    assert hk.theta_coefficient(chi, "plain", 1) == 0.5
    assert hk.theta_coefficient(chi, "plain", 2) == 0
    assert abs(hk.theta_coefficient(chi, "plain", 11) - 1) < 1e-15
    assert abs(hk.theta_coefficient(chi, "sign-weighted", -1) - (-0.5 / 1j)) < 1e-15
    with pytest.raises(ValueError):
        hk.theta_coefficient(chi, "plain", 0)
    with pytest.raises(ValueError):
        hk.theta_coefficient(chi, "other", 1)


@pytest.mark.parametrize("D", [5, 12, 40])
def test_theta_table_matches_direct(D):
    for chi in chars(D):
        tab = hk.theta_table(chi, 150)
        for variant in ("plain", "sign-weighted"):
            tv = hk.theta_table(chi, 150, variant)
            for m in range(1, 151):
                assert abs(tv[m] - hk.theta_coefficient(chi, variant, m)) < 1e-13
        assert tab.dtype == complex


def test_trivial_theta_is_half_ideal_count():
    chi = hk.HeckeCharacter(hk.ClassCharacter(12, (0,)), 0)
    assert np.allclose(hk.theta_table(chi, 300)[1:], 0.5 * hk.ideal_count_table(12, 300)[1:], atol=1e-15)


@pytest.mark.parametrize("D", [5, 13])
def test_real_character_n_symmetry(D):
    psi = hk.class_characters(D)[0]
    for n in (1, 2, 3):
        a = hk.theta_table(hk.HeckeCharacter(psi, n), 200)
        b = hk.theta_table(hk.HeckeCharacter(psi, -n), 200)
        assert np.max(np.abs(a - b)) < 1e-13
        assert np.max(np.abs(a.imag)) < 1e-13


def test_theta_multiplicative():
    chi = hk.HeckeCharacter(hk.class_characters(40)[1], 3)
    a = hk.theta_table(chi, 400, extended=True) * 2
    for m in range(1, 21):
        for k in range(1, 21):
            if math.gcd(m, k) == 1:
                assert abs(a[m * k] - a[m] * a[k]) < 1e-17


def test_orthogonality_sum_examples():
    assert hk.character_orthogonality_sum(12, qf.IdealRep.unit(12)) == pytest.approx(2)
    (p2,) = qf.ideals_of_norm(12, 2)
    assert abs(hk.character_orthogonality_sum(12, p2)) < 1e-14
    G = qf.narrow_class_group(136)
    for m in range(1, 40):
        for I in qf.ideals_of_norm(136, m):
            principal = all(t == 0 for t in qf.ideal_class_index(I, G))
            assert hk.character_orthogonality_sum(136, I) == pytest.approx(4 if principal else 0, abs=1e-12)


def test_class_character_validation():
    with pytest.raises(ValueError):
        hk.ClassCharacter(12, (0, 1))
    psi = hk.ClassCharacter(229, (1,))
    assert abs(psi.of_class(1) * psi.inverse().of_class(1) - 1) < 1e-15
    assert cmath.isclose(psi.of_exponents((3,)), 1)
