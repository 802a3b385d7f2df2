"""Hecke characters chi_{psi,n} of Q(sqrt D) and the Fourier coefficients of their theta series."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import mpmath as mp
import numpy as np
from sympy import primerange
from sympy.functions.combinatorial.numbers import kronecker_symbol

from .quadfield import (
    FieldElement,
    IdealRep,
    NarrowClassGroup,
    ideal_class_index,
    ideals_of_norm,
    narrow_class_group,
    quad_field,
    totally_positive_generator,
)

Variant = Literal["plain", "sign-weighted"]


def kronecker(D: int, m: int) -> int:
    return int(kronecker_symbol(D, m))


@lru_cache(maxsize=None)
def _kronecker_period(D: int) -> np.ndarray:
    # chi_D is a primitive character mod D for fundamental D
    return np.array([kronecker(D, a) for a in range(D)], dtype=np.int8)


def kronecker_table(D: int, M: int) -> np.ndarray:
    """chi_D(m) for m = 0..M."""
    per = _kronecker_period(D)
    return per[np.arange(M + 1) % D].astype(float)


@dataclass(frozen=True)
class ClassCharacter:
    """psi([J_i]) = exp(2 pi i e_i / h_i)."""

    D: int
    e: tuple[int, ...]

    @property
    def group(self) -> NarrowClassGroup:
        return narrow_class_group(self.D)

    def __post_init__(self):
        orders = narrow_class_group(self.D).orders
        if len(self.e) != len(orders):
            raise ValueError("exponent vector has wrong length")
        object.__setattr__(self, "e", tuple(ei % hi for ei, hi in zip(self.e, orders)))

    def of_exponents(self, t) -> complex:
        orders = self.group.orders
        ph = sum(ei * ti / hi for ei, ti, hi in zip(self.e, t, orders))
        return cmath.exp(2j * math.pi * ph)

    def of_class(self, idx: int) -> complex:
        return self.of_exponents(self.group.exponents[idx])

    def inverse(self) -> "ClassCharacter":
        return ClassCharacter(self.D, tuple(-x for x in self.e))

    def is_trivial(self) -> bool:
        return not any(self.e)


def class_characters(D: int) -> list[ClassCharacter]:
    G = narrow_class_group(D)
    return [ClassCharacter(D, t) for t in G.exponents]


def _log_ratio(x: FieldElement, prec: int) -> mp.mpf:
    with mp.workdps(prec):
        a, b = x.embed(prec)
        return mp.log(abs(a / b))


@lru_cache(maxsize=None)
def _generator_log_ratios(D: int, prec: int) -> tuple:
    """log|g_i/g_i*| for the F_D generator g_i of J_i^{h_i}."""
    G = narrow_class_group(D)
    F = quad_field(D)
    out = []
    for J, h in zip(G.generators, G.orders):
        g = totally_positive_generator(J ** h, F)
        out.append(_log_ratio(g, prec))
    return tuple(out)


@dataclass(frozen=True)
class HeckeCharacter:
    """chi_{psi,n}: class character psi times the archimedean factor |x/x*|^{i r}, r = pi n / log eps."""

    psi: ClassCharacter
    n: int
    prec: int = 50

    @property
    def D(self) -> int:
        return self.psi.D

    @property
    def r(self) -> float:
        return math.pi * self.n / quad_field(self.D).log_eps_f

    def r_mp(self) -> mp.mpf:
        F = quad_field(self.D, self.prec)
        with mp.workdps(self.prec):
            return mp.pi * self.n / F.log_eps

    def conj(self) -> "HeckeCharacter":
        return HeckeCharacter(self.psi.inverse(), -self.n, self.prec)

    def archimedean_phase(self, I: IdealRep) -> mp.mpf:
        """Phase theta with chi(I) = psi([I]) exp(i theta)."""
        G = narrow_class_group(self.D)
        t = ideal_class_index(I, G)
        B = I
        for J, h, ti in zip(G.generators, G.orders, t):
            B = B * J ** ((h - ti) % h)
        y = totally_positive_generator(B, quad_field(self.D))
        logs = _generator_log_ratios(self.D, self.prec)
        with mp.workdps(self.prec):
            ph = _log_ratio(y, self.prec)
            for li, h, ti in zip(logs, G.orders, t):
                if ti:
                    ph -= mp.mpf(h - ti) / h * li
            return self.r_mp() * ph

    def __call__(self, I: IdealRep) -> complex:
        return eval_hecke_character(self, I)


def eval_hecke_character(chi: HeckeCharacter, I: IdealRep) -> complex:
    G = narrow_class_group(chi.D)
    t = ideal_class_index(I, G)
    if chi.n == 0:
        return chi.psi.of_exponents(t)
    with mp.workdps(chi.prec):
        ph = chi.archimedean_phase(I)
        v = complex(mp.expj(ph))
    return chi.psi.of_exponents(t) * v


def direct_character_value(D: int, x: FieldElement, n: int, prec: int = 100) -> complex:
    """|x/x*|^{pi i n / log eps} for a totally positive generator x (any representative)."""
    F = quad_field(D, prec)
    with mp.workdps(prec):
        a, b = x.embed(prec)
        return complex(mp.expj(mp.pi * n / F.log_eps * mp.log(abs(a / b))))


def theta_coefficient(chi: HeckeCharacter, variant: Variant, m: int) -> complex:
    """Direct ideal sum: (1/2) sum_{N a = |m|} chi(a), or sgn(m)/(2i) times the sum."""
    if m == 0:
        raise ValueError("m must be nonzero")
    s = sum(eval_hecke_character(chi, I) for I in ideals_of_norm(chi.D, abs(m)))
    if variant == "plain":
        return 0.5 * s
    if variant == "sign-weighted":
        return (1 if m > 0 else -1) * s / 2j
    raise ValueError(f"unknown variant {variant!r}")


def _prime_ideal_values(chi: HeckeCharacter, p: int) -> tuple[str, list[complex]]:
    ideals = ideals_of_norm(chi.D, p)
    if not ideals:
        return "inert", []
    vals = [eval_hecke_character(chi, I) for I in ideals]
    return ("split" if len(vals) == 2 else "ramified"), vals


@lru_cache(maxsize=256)
def _theta_table_cached(D: int, e: tuple, n: int, M: int, prec: int) -> np.ndarray:
    chi = HeckeCharacter(ClassCharacter(D, e), n, prec)
    # extended precision keeps the products of local factors exact to ~1e-19
    a = np.zeros(M + 1, dtype=np.clongdouble)
    a[1] = 1.0
    for p in primerange(2, M + 1):
        kind, vals = _prime_ideal_values(chi, int(p))
        vals = [np.clongdouble(v) for v in vals]
        # local coefficients a(p^k), k = 0..K
        K = int(math.log(M) / math.log(p) + 1e-9)
        loc = np.zeros(K + 1, dtype=np.clongdouble)
        loc[0] = 1.0
        for k in range(1, K + 1):
            if kind == "split":
                u, v = vals
                loc[k] = sum(u ** j * v ** (k - j) for j in range(k + 1))
            elif kind == "ramified":
                loc[k] = vals[0] ** k
            else:
                loc[k] = 1.0 if k % 2 == 0 else 0.0
        # multiply into every m coprime to p
        pk = p
        base = np.arange(1, M // p + 1)
        cop = base[base % p != 0]
        for k in range(1, K + 1):
            if pk > M:
                break
            idx = cop[cop * pk <= M]
            a[idx * pk] = a[idx] * loc[k]
            pk *= p
        # entries with the p-part still pending were zero before; the loop over primes in
        # increasing order fills a[m] once all prime factors have been processed
    return a


def theta_table(chi: HeckeCharacter, M: int, variant: Variant = "plain", extended: bool = False) -> np.ndarray:
    """lambda_theta(m) for m = 0..M (index 0 unused) built from prime-ideal values.

    extended=True returns the long-double table used to build the float one.
    """
    a = _theta_table_cached(chi.D, chi.psi.e, chi.n, M, chi.prec)
    if not extended:
        a = a.astype(complex)
    if variant == "plain":
        return 0.5 * a
    if variant == "sign-weighted":
        return a / 2j
    raise ValueError(f"unknown variant {variant!r}")


def ideal_count_table(D: int, M: int) -> np.ndarray:
    """Number of ideals of norm m, m = 0..M: the Dirichlet convolution 1 * chi_D."""
    chi = kronecker_table(D, M)
    out = np.zeros(M + 1)
    for d in range(1, M + 1):
        out[d::d] += chi[d]
    out[0] = 0
    return out


def character_orthogonality_sum(D: int, I: IdealRep) -> float:
    """Omega_I = sum over class characters of psi([I]); h+ if I is narrowly principal, else 0."""
    G = narrow_class_group(D)
    t = ideal_class_index(I, G)
    return sum(psi.of_exponents(t) for psi in class_characters(D)).real
