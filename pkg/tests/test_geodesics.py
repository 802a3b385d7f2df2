import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from georestrict import geodesics as gd
from georestrict import quadfield as qf

SL2_GENS = [((1, 1), (0, 1)), ((0, -1), (1, 0)), ((1, 0), (1, 1))]


def mat(A):
    return np.array(A, dtype=object)


def inv(A):
    (a, b), (c, d) = A
    return mat([[d, -b], [-c, a]])


def test_matrix_of_form_example():
    M = gd.matrix_of_form(gd.QuadraticForm(1, 1, -1), 5)
    assert M.tolist() == [[1, 1], [1, 2]]


@pytest.mark.parametrize("D", qf.fundamental_discriminants(120))
def test_stabiliser_properties(D):
    xD, _ = qf.pell_fundamental(D)
    for g in gd.geodesics_for_discriminant(D):
        M = g.M
        assert M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0] == 1
        assert M[0, 0] + M[1, 1] == xD
        for w in (g.omega, g.omega_conj):
            with mp.workdps(50):
                assert abs(gd.mobius(M, w) - w) < mp.mpf(10) ** -45 * xD ** 2
        assert g.form.act(M) == g.form


@given(st.sampled_from([5, 12, 13, 21, 40]), st.lists(st.sampled_from(SL2_GENS), min_size=1, max_size=6))
def test_equivariance(D, word):
    q = gd.QuadraticForm(*qf.narrow_class_group(D).reps[0])
    A = mat([[1, 0], [0, 1]])
    for W in word:
        A = A.dot(mat(W))
    q2 = q.act(A)
    assert q2.disc == D
    M = gd.matrix_of_form(q, D)
    assert (gd.matrix_of_form(q2, D) == inv(A).dot(M).dot(A)).all()
    assert gd.class_of_form(q2) == gd.class_of_form(q)


def test_equivariance_example():
    q = gd.QuadraticForm(1, 1, -1)
    A = mat([[1, 1], [0, 1]])
    assert gd.matrix_of_form(q.act(A), 5).tolist() == inv(A).dot(gd.matrix_of_form(q, 5)).dot(A).tolist()


def test_matrix_norm_examples():
    with mp.workdps(50):
        assert abs(gd.matrix_norm([[2, 1], [1, 1]]) - ((3 + mp.sqrt(5)) / 2) ** 2) < mp.mpf(10) ** -40
        F = qf.quad_field(5)
        assert abs(gd.matrix_norm(gd.matrix_of_form(gd.QuadraticForm(1, 1, -1))) - F.eps ** 2) < mp.mpf(10) ** -40
    with pytest.raises(ValueError):
        gd.matrix_norm([[1, 1], [0, 1]])
    with pytest.raises(ValueError):
        gd.matrix_norm([[2, 1], [1, 2]])


def test_lengths_and_counts():
    (g,) = gd.geodesics_for_discriminant(5)
    assert abs(float(g.length) - 1.9248473002384139) < 1e-14
    assert len(gd.geodesics_for_discriminant(12)) == 2
    assert len(gd.geodesics_for_discriminant(136)) == 4


def test_invalid_forms():
    with pytest.raises(ValueError):
        gd.QuadraticForm(2, 2, -2)
    with pytest.raises(ValueError):
        gd.QuadraticForm(1, 0, 1)
    with pytest.raises(ValueError):
        gd.QuadraticForm(1, 0, -4)


@pytest.mark.parametrize("D", [5, 12, 13, 40, 229])
def test_semicircle_and_kappa(D):
    for g in gd.geodesics_for_discriminant(D):
        a, b, _ = g.form.as_tuple()
        with mp.workdps(50):
            assert abs(g.omega + g.omega_conj + mp.mpf(b) / a) < mp.mpf(10) ** -40
            assert abs(mp.det(g.kappa) - 1) < mp.mpf(10) ** -40
            centre, rad = (g.omega + g.omega_conj) / 2, (g.omega - g.omega_conj) / 2
            for x in np.linspace(0, 1, 9):
                z = gd.geodesic_point(g, x, 50)
                assert abs(abs(z - centre) - rad) < 1e-15
                assert mp.im(z) > 0
        zf = gd.geodesic_points_float(g, np.linspace(0, 1, 9))
        zm = np.array([complex(gd.geodesic_point(g, x)) for x in np.linspace(0, 1, 9)])
        assert np.max(np.abs(zf - zm)) < 1e-10 * max(1, np.max(np.abs(zm)))


@pytest.mark.parametrize("D", [5, 12, 21])
def test_arclength(D):
    for g in gd.geodesics_for_discriminant(D):
        with mp.workdps(30):
            h = mp.mpf(10) ** -12
            z = lambda u: gd.geodesic_point(g, u, 30)
            speed = lambda x: abs(z(x + h) - z(x - h)) / (2 * h) / mp.im(z(x))
            L = mp.quad(speed, [0, 0.5, 1])
            assert abs(L - 2 * qf.quad_field(D).log_eps) < 1e-8


@pytest.mark.parametrize("D", [5, 12, 40])
def test_period_is_the_stabiliser(D):
    for g in gd.geodesics_for_discriminant(D):
        with mp.workdps(50):
            z0, z1 = gd.geodesic_point(g, 0.25, 50), gd.geodesic_point(g, 1.25, 50)
            hits = [abs(gd.mobius(M, z0) - z1) for M in (g.M, inv(g.M))]
            assert min(hits) < mp.mpf(10) ** -30


def test_forms_of_discriminant_cover_classes():
    for D in (5, 12, 40, 60):
        classes = {gd.class_of_form(q) for q in gd.forms_of_discriminant(D, 10)}
        assert classes == set(range(qf.narrow_class_group(D).h_plus))
