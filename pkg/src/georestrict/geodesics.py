"""Quadratic forms, hyperbolic matrices and closed geodesics on SL2(Z)\\H."""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .quadfield import (
    DEFAULT_PREC,
    canonical_form,
    narrow_class_group,
    pell_fundamental,
    quad_field,
)


@dataclass(frozen=True)
class QuadraticForm:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if math.gcd(math.gcd(self.a, self.b), self.c) != 1:
            raise ValueError(f"form {self} is not primitive")
        if self.disc <= 0 or math.isqrt(self.disc) ** 2 == self.disc:
            raise ValueError(f"form {self} is not indefinite with irrational roots")

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def act(self, A) -> "QuadraticForm":
        """The form q(A(x, y)) for an integer matrix A = [[p, q], [r, s]]."""
        (p, q), (r, s) = A
        a, b, c = self.a, self.b, self.c
        return QuadraticForm(
            a * p * p + b * p * r + c * r * r,
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            a * q * q + b * q * s + c * s * s,
        )

    def roots(self, prec: int = DEFAULT_PREC) -> tuple[mp.mpf, mp.mpf]:
        """(omega, omega*) with omega > omega*."""
        with mp.workdps(prec):
            r = mp.sqrt(self.disc)
            w1 = (-self.b + r) / (2 * self.a)
            w2 = (-self.b - r) / (2 * self.a)
        return (w1, w2) if w1 > w2 else (w2, w1)


def matrix_of_form(q: QuadraticForm, D: int | None = None) -> np.ndarray:
    """Generator of the stabiliser of q with trace x_D (an integer matrix)."""
    D = q.disc if D is None else D
    if q.disc != D:
        raise ValueError("form discriminant does not match D")
    xD, yD = pell_fundamental(D)
    if (xD - q.b * yD) % 2:
        raise ValueError("parity failure: bad discriminant")
    return np.array(
        [[(xD - q.b * yD) // 2, -q.c * yD], [q.a * yD, (xD + q.b * yD) // 2]],
        dtype=object,
    )


def mobius(M, z, prec: int = DEFAULT_PREC):
    """(a z + b)/(c z + d) at the working precision; the repelling fixed point needs the extra digits."""
    (a, b), (c, d) = M
    with mp.workdps(prec):
        den = c * z + d
        if den == 0:
            return mp.inf
        return (a * z + b) / den


def matrix_norm(M) -> mp.mpf:
    """lambda^2 for the eigenvalue |lambda| > 1 of a hyperbolic matrix."""
    (a, b), (c, d) = M
    tr = mp.mpf(a + d)
    det = mp.mpf(a * d - b * c)
    if abs(det - 1) > mp.mpf(10) ** (-mp.mp.dps + 5):
        raise ValueError("matrix does not have determinant 1")
    if abs(tr) <= 2:
        raise ValueError("matrix is not hyperbolic")
    lam = (abs(tr) + mp.sqrt(tr * tr - 4)) / 2
    return lam * lam


@dataclass(frozen=True)
class ClosedGeodesic:
    D: int
    form: QuadraticForm
    M: np.ndarray
    omega: mp.mpf
    omega_conj: mp.mpf
    kappa: mp.matrix
    kappa_inv: mp.matrix
    length: mp.mpf


def _kappa(omega, omega_conj):
    s = 1 / mp.sqrt(omega - omega_conj)
    k = mp.matrix([[s, -s * omega], [s, -s * omega_conj]])
    kinv = mp.matrix([[-s * omega_conj, s * omega], [-s, s]])
    return k, kinv


def closed_geodesic(q: QuadraticForm, prec: int = DEFAULT_PREC) -> ClosedGeodesic:
    D = q.disc
    F = quad_field(D, prec)
    with mp.workdps(prec):
        w, ws = q.roots(prec)
        k, kinv = _kappa(w, ws)
        length = 2 * F.log_eps
    return ClosedGeodesic(D, q, matrix_of_form(q, D), w, ws, k, kinv, length)


def geodesics_for_discriminant(D: int, prec: int = DEFAULT_PREC) -> list[ClosedGeodesic]:
    """One geodesic per narrow class, in the order of the class group's representatives."""
    G = narrow_class_group(D)
    return [closed_geodesic(QuadraticForm(*f), prec) for f in G.reps]


def geodesic_point(g: ClosedGeodesic, x, prec: int | None = None) -> mp.mpc:
    """kappa^{-1} (i eps^{2x}); x in [0, 1) sweeps the geodesic once."""
    with mp.workdps(prec or mp.mp.dps):
        w = 1j * mp.exp(g.length * x)
        (a, b), (c, d) = (g.kappa_inv[0, 0], g.kappa_inv[0, 1]), (g.kappa_inv[1, 0], g.kappa_inv[1, 1])
        return (a * w + b) / (c * w + d)


def geodesic_points_float(g: ClosedGeodesic, x: np.ndarray) -> np.ndarray:
    """Vectorised float version of geodesic_point."""
    w = 1j * np.exp(float(g.length) * np.asarray(x, dtype=float))
    om, oms = float(g.omega), float(g.omega_conj)
    # scalars of kappa^{-1} cancel in the Mobius action
    return (-oms * w + om) / (-w + 1)


def forms_of_discriminant(D: int, bound: int | None = None) -> list[QuadraticForm]:
    """All primitive forms of discriminant D with |a|, |c| <= bound (default: reduced-size box)."""
    bound = bound or D
    out = []
    for b in range(-bound, bound + 1):
        if (b - D) % 2:
            continue
        ac = (b * b - D) // 4
        for a in range(-bound, bound + 1):
            if a == 0 or ac % a:
                continue
            c = ac // a
            if abs(c) <= bound and math.gcd(math.gcd(a, b), c) == 1:
                out.append(QuadraticForm(a, b, c))
    return out


def class_of_form(q: QuadraticForm) -> int:
    G = narrow_class_group(q.disc)
    return G.reps.index(canonical_form(q.as_tuple(), q.disc))
