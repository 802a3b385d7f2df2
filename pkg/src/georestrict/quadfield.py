"""Arithmetic of the real quadratic field K = Q(sqrt(D)).

Elements of the maximal order are stored exactly as integer coordinates
(a, b) with respect to the basis {1, beta_D}.  Real embeddings are only
produced on demand, at a configurable mpmath precision.

The narrow class group is realised through primitive indefinite binary
quadratic forms of discriminant D: reduced forms are grouped into
reduction cycles (one cycle per proper equivalence class) and the group
law is ideal multiplication, carried out on Hermite normal forms.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath as mp
from sympy.ntheory import sqrt_mod

DEFAULT_PREC = 50
BRUTE_FORCE_Y_LIMIT = 10 ** 6  # exhaustive search is only attempted below this


class NotFundamentalError(ValueError):
    pass


class ClassGroupError(RuntimeError):
    """Raised when class-group data turns out to be inconsistent."""


def _squarefree(n: int) -> bool:
    if n == 0:
        return False
    n = abs(n)
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def is_fundamental(D: int) -> bool:
    """True iff D > 1 is the discriminant of a real quadratic field."""
    if D <= 1 or math.isqrt(D) ** 2 == D:
        return False
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def check_fundamental(D: int) -> int:
    if not isinstance(D, int) or not is_fundamental(D):
        raise NotFundamentalError(f"{D!r} is not a positive fundamental discriminant")
    return D


def fundamental_discriminants(dmax: int) -> list[int]:
    return [D for D in range(5, dmax + 1) if is_fundamental(D)]


def _sign_surd(p: int, q: int, D: int) -> int:
    """Exact sign of p + q*sqrt(D) for integers p, q."""
    if q == 0:
        return (p > 0) - (p < 0)
    if p == 0:
        return (q > 0) - (q < 0)
    if p > 0 and q > 0:
        return 1
    if p < 0 and q < 0:
        return -1
    # opposite signs: compare p^2 with q^2 D
    lhs, rhs = p * p, q * q * D
    if lhs == rhs:
        return 0
    return (1 if p > 0 else -1) if lhs > rhs else (1 if q > 0 else -1)


# ---------------------------------------------------------------------------
# Pell equation x^2 - D y^2 = 4
# ---------------------------------------------------------------------------

def pell_bruteforce(D: int, ymax: int | None = None) -> tuple[int, int]:
    """Minimal positive solution of x^2 - D y^2 = 4 by ascending search in y."""
    y = 1
    while ymax is None or y <= ymax:
        x2 = 4 + D * y * y
        x = math.isqrt(x2)
        if x * x == x2:
            return x, y
        y += 1
    raise ValueError(f"no solution with y <= {ymax}")


def pell_continued_fraction(D: int) -> tuple[int, int]:
    """Minimal positive solution of x^2 - D y^2 = 4 via the continued fraction of w_D.

    The fundamental unit eps_0 = (u + v sqrt(D))/2 is read off the first
    period of the expansion of w = (s + sqrt(D))/2 (s = D mod 2); if its
    norm is -1 the totally positive generator is eps_0^2.
    """
    s = D % 2
    # expansion of (P + sqrt(D)) / Q with Q | D - P^2
    P, Q = s, 2
    a0 = (P + math.isqrt(D)) // Q
    # convergents h/k of w; element h - k*w' ... track units directly
    h_prev, h = 1, a0
    k_prev, k = 0, 1
    while True:
        # unit candidate: h - k * w_conj where w = (s + sqrt D)/2
        # h + k*(s - sqrt D)/2 ... use e = h*2 - k*s + k*sqrt(D) scaled by 1/2
        X = 2 * h - k * s
        Y = k
        nrm = (X * X - D * Y * Y) // 4
        if (X * X - D * Y * Y) % 4 == 0 and abs(nrm) == 1:
            if nrm == 1:
                return X, Y
            # square of (X + Y sqrt D)/2
            X2 = (X * X + D * Y * Y) // 2
            Y2 = X * Y
            return X2, Y2
        P = a0 * Q - P
        Q = (D - P * P) // Q
        a0 = (P + math.isqrt(D)) // Q
        h_prev, h = h, a0 * h + h_prev
        k_prev, k = k, a0 * k + k_prev


def pell_fundamental(D: int) -> tuple[int, int]:
    """(x_D, y_D): minimal positive solution of x^2 - D y^2 = 4."""
    check_fundamental(D)
    return pell_continued_fraction(D)


# ---------------------------------------------------------------------------
# Field elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class FieldElement:
    """a + b*beta_D with beta_D = (1+sqrt D)/2 (D = 1 mod 4) or sqrt(D)/2."""

    a: int
    b: int
    D: int = field(compare=False)

    @classmethod
    def from_half(cls, X: int, Y: int, D: int) -> "FieldElement":
        """Element (X + Y sqrt D)/2; requires X = D*Y (mod 2)."""
        if (X - D * Y) % 2:
            raise ValueError("(X + Y sqrt D)/2 is not integral")
        if D % 4 == 1:
            return cls((X - Y) // 2, Y, D)
        return cls(X // 2, Y, D)

    @property
    def X(self) -> int:
        return 2 * self.a + self.b if self.D % 4 == 1 else 2 * self.a

    @property
    def Y(self) -> int:
        return self.b

    def norm(self) -> int:
        X, Y = self.X, self.Y
        return (X * X - self.D * Y * Y) // 4

    def trace(self) -> int:
        return self.X

    def conj(self) -> "FieldElement":
        return FieldElement.from_half(self.X, -self.Y, self.D)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        X1, Y1, X2, Y2 = self.X, self.Y, other.X, other.Y
        X = X1 * X2 + self.D * Y1 * Y2
        Y = X1 * Y2 + X2 * Y1
        return FieldElement.from_half(X // 2, Y // 2, self.D)

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.a + other.a, self.b + other.b, self.D)

    def __neg__(self) -> "FieldElement":
        return FieldElement(-self.a, -self.b, self.D)

    def __pow__(self, k: int) -> "FieldElement":
        if k < 0:
            raise ValueError("negative powers leave the order; use unit_power")
        out = FieldElement(1, 0, self.D)
        for _ in range(k):
            out = out * self
        return out

    def sign(self) -> int:
        return _sign_surd(self.X, self.Y, self.D)

    def sign_conj(self) -> int:
        return _sign_surd(self.X, -self.Y, self.D)

    def is_totally_positive(self) -> bool:
        return self.sign() > 0 and self.sign_conj() > 0

    def embed(self, prec: int = DEFAULT_PREC) -> tuple[mp.mpf, mp.mpf]:
        with mp.workdps(prec):
            r = mp.sqrt(self.D)
            x = (mp.mpf(self.X) + self.Y * r) / 2
            y = (mp.mpf(self.X) - self.Y * r) / 2
        return x, y

    def embed_float(self) -> tuple[float, float]:
        x, y = self.embed(30)
        return float(x), float(y)


def embed(e: FieldElement, prec: int = DEFAULT_PREC) -> tuple[mp.mpf, mp.mpf]:
    return e.embed(prec)


# ---------------------------------------------------------------------------
# The field
# ---------------------------------------------------------------------------

class QuadField:
    """Q(sqrt D) with its totally positive fundamental unit eps_D > 1."""

    def __init__(self, D: int, prec: int = DEFAULT_PREC):
        self.D = check_fundamental(D)
        self.prec = prec
        self.xD, self.yD = pell_fundamental(D)
        self.eps_element = FieldElement.from_half(self.xD, self.yD, D)
        self.eps_conj_element = self.eps_element.conj()
        with mp.workdps(prec):
            self.eps = (self.xD + self.yD * mp.sqrt(D)) / 2
            self.log_eps = mp.log(self.eps)
            self.c_D = self.log_eps / mp.pi
            self.beta, self.beta_conj = FieldElement(0, 1, D).embed(prec)
        self.eps_f = float(self.eps)
        self.log_eps_f = float(self.log_eps)
        self.c_D_f = float(self.c_D)

    def __repr__(self) -> str:
        return f"QuadField(D={self.D})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QuadField) and other.D == self.D

    def __hash__(self) -> int:
        return hash(("QuadField", self.D))

    def element(self, a: int, b: int) -> FieldElement:
        return FieldElement(a, b, self.D)

    def one(self) -> FieldElement:
        return FieldElement(1, 0, self.D)

    def ratio_exponent(self, alpha: FieldElement, prec: int | None = None) -> mp.mpf:
        """log(alpha/alpha*) / log(eps_D), for alpha totally positive."""
        with mp.workdps(prec or self.prec):
            x, y = alpha.embed(prec or self.prec)
            return mp.log(x / y) / mp.log((self.xD + self.yD * mp.sqrt(self.D)) / 2)

    def ratio_cmp(self, alpha: FieldElement, k: int) -> int:
        """Exact sign of alpha/alpha* - eps^k for totally positive alpha."""
        # alpha/alpha* <= eps^k  <=>  alpha^2 (eps*)^k <= N(alpha)
        w = alpha * alpha
        u = self.eps_conj_element if k >= 0 else self.eps_element
        for _ in range(abs(k)):
            w = w * u
        return _sign_surd(w.X - 2 * alpha.norm(), w.Y, self.D)

    def fundamental_domain_contains(self, alpha: FieldElement) -> bool:
        """alpha in F_D: totally positive, alpha* <= alpha < eps^2 alpha*."""
        if alpha.D != self.D or not alpha.is_totally_positive():
            return False
        return alpha.Y >= 0 and self.ratio_cmp(alpha, 2) < 0

    def reduce_to_fundamental_domain(self, alpha: FieldElement) -> FieldElement:
        """The unique eps^k * alpha (k in Z) lying in F_D."""
        if not alpha.is_totally_positive():
            raise ValueError("element is not totally positive")
        while self.ratio_cmp(alpha, 2) >= 0:
            alpha = alpha * self.eps_conj_element
        while alpha.Y < 0:
            alpha = alpha * self.eps_element
        return alpha


def fundamental_domain_contains(e: FieldElement, F: QuadField) -> bool:
    return F.fundamental_domain_contains(e)


@lru_cache(maxsize=None)
def quad_field(D: int, prec: int = DEFAULT_PREC) -> QuadField:
    return QuadField(D, prec)


def _ratio_in_cone(F: QuadField, alpha: FieldElement, lo, hi) -> bool:
    """lo <= log_eps(alpha/alpha*) <= hi, exactly for integer bounds."""
    for bound, want in ((lo, 1), (hi, -1)):
        if bound is None:
            continue
        if float(bound).is_integer():
            s = F.ratio_cmp(alpha, int(bound))
            if s * want < 0:
                return False
        else:
            rho = F.ratio_exponent(alpha)
            if (rho - mp.mpf(bound)) * want < 0:
                return False
    return True


def elements_in_region(
    F: QuadField | int,
    norm_range: tuple[float, float],
    cone_bounds: tuple[float, float] | None = None,
) -> list[FieldElement]:
    """Lattice points of F_D with N1 <= N(alpha) <= N2 and lo <= log_eps(alpha/alpha*) <= hi.

    The result is sorted lexicographically in (a, b).
    """
    if not isinstance(F, QuadField):
        F = quad_field(F)
    D = F.D
    N1, N2 = norm_range
    N1 = max(1, math.ceil(N1))
    N2 = math.floor(N2)
    lo, hi = cone_bounds if cone_bounds is not None else (None, None)
    if N2 < N1 or (lo is not None and hi is not None and lo > hi):
        return []
    if hi is not None and hi < 0:
        return []
    if lo is not None and lo >= 2:
        return []
    # alpha - alpha* = Y sqrt(D) < (eps - 1/eps) sqrt(N2)
    ymax = math.floor((F.eps_f - 1.0 / F.eps_f) * math.sqrt(N2 / D)) + 1
    out = []
    for Y in range(0, ymax + 1):
        xlo = math.isqrt(4 * N1 + D * Y * Y - 1) + 1 if 4 * N1 + D * Y * Y > 0 else 0
        xhi = math.isqrt(4 * N2 + D * Y * Y)
        for X in range(xlo, xhi + 1):
            if (X - D * Y) % 2:
                continue
            alpha = FieldElement.from_half(X, Y, D)
            if not F.fundamental_domain_contains(alpha):
                continue
            if not _ratio_in_cone(F, alpha, lo, hi):
                continue
            out.append(alpha)
    out.sort(key=lambda e: (e.a, e.b))
    return out


def elements_in_region_bruteforce(F: QuadField, norm_range, cone_bounds=None, box: int | None = None):
    """Exhaustive (a, b) double loop; test oracle for elements_in_region."""
    N1, N2 = norm_range
    lo, hi = cone_bounds if cone_bounds is not None else (None, None)
    if box is None:
        box = int(F.eps_f * math.sqrt(2 * N2) + 2) + 2
    out = []
    for a in range(-box, box + 1):
        for b in range(-box, box + 1):
            alpha = FieldElement(a, b, F.D)
            n = alpha.norm()
            if not (N1 <= n <= N2):
                continue
            if not F.fundamental_domain_contains(alpha):
                continue
            if lo is not None or hi is not None:
                rho = F.ratio_exponent(alpha)
                if lo is not None and rho < lo:
                    continue
                if hi is not None and rho > hi:
                    continue
            out.append(alpha)
    out.sort(key=lambda e: (e.a, e.b))
    return out


# ---------------------------------------------------------------------------
# Ideals
# ---------------------------------------------------------------------------

def _mul_omega(u1, v1, u2, v2, D):
    """(u1 + v1 w)(u2 + v2 w) in the basis {1, w}, w = beta_D."""
    if D % 4 == 1:
        # w^2 = w + (D-1)/4
        k = (D - 1) // 4
        return u1 * u2 + v1 * v2 * k, u1 * v2 + u2 * v1 + v1 * v2
    k = D // 4
    return u1 * u2 + v1 * v2 * k, u1 * v2 + u2 * v1


def _hnf(vectors: Iterable[tuple[int, int]]) -> tuple[int, int, int]:
    """Hermite normal form basis {(A, 0), (B, C)} of the lattice spanned by vectors."""
    vecs = [tuple(v) for v in vectors if v != (0, 0)]
    # column 2: gcd of second coordinates via extended gcd combination
    C = 0
    pivot = (0, 0)
    rest = []
    for u, v in vecs:
        if v == 0:
            rest.append(u)
            continue
        if C == 0:
            pivot = (u, v)
            C = v
            continue
        g, s, t = _xgcd(C, v)
        new_pivot = (s * pivot[0] + t * u, g)
        # the combination orthogonal to the new pivot lands on the first axis
        rest.append((v // g) * pivot[0] - (C // g) * u)
        pivot, C = new_pivot, g
    if C < 0:
        pivot, C = (-pivot[0], -C), -C
    A = 0
    for u in rest:
        A = math.gcd(A, u)
    if A == 0 or C == 0:
        raise ValueError("vectors do not span a full-rank lattice")
    B = pivot[0] % A
    return A, B, C


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


@dataclass(frozen=True, order=True)
class IdealRep:
    """The ideal d * [n0, (b + sqrt D)/2] with b^2 = D (mod 4 n0), b taken mod 2 n0."""

    d: int
    n0: int
    b: int
    D: int = field(compare=False)

    def __post_init__(self):
        if self.d < 1 or self.n0 < 1:
            raise ValueError("content and primitive norm must be positive")
        if (self.b * self.b - self.D) % (4 * self.n0):
            raise ValueError(f"b^2 != D mod 4n0 for {self}")
        object.__setattr__(self, "b", self.b % (2 * self.n0))

    @property
    def norm(self) -> int:
        return self.d * self.d * self.n0

    @classmethod
    def unit(cls, D: int) -> "IdealRep":
        return cls(1, 1, D % 2, D)

    def basis(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """Z-basis in {1, beta_D} coordinates."""
        d, n0, b, D = self.d, self.n0, self.b, self.D
        if D % 4 == 1:
            second = (d * (b - 1) // 2, d)
        else:
            second = (d * b // 2, d)
        return (d * n0, 0), second

    @classmethod
    def from_hnf(cls, A: int, B: int, C: int, D: int) -> "IdealRep":
        n0 = A // C
        u = B // C
        b = 2 * u + 1 if D % 4 == 1 else 2 * u
        return cls(C, n0, b, D)

    def __mul__(self, other: "IdealRep") -> "IdealRep":
        gens = []
        for u1, v1 in self.basis():
            for u2, v2 in other.basis():
                gens.append(_mul_omega(u1, v1, u2, v2, self.D))
        return IdealRep.from_hnf(*_hnf(gens), self.D)

    def __pow__(self, k: int) -> "IdealRep":
        out = IdealRep.unit(self.D)
        for _ in range(k):
            out = out * self
        return out

    def conj(self) -> "IdealRep":
        return IdealRep(self.d, self.n0, -self.b, self.D)

    def contains(self, alpha: FieldElement) -> bool:
        # alpha/d = u n0 + v (b + sqrt D)/2
        X, Y = alpha.X, alpha.Y
        if Y % self.d or X % self.d:
            return False
        v = Y // self.d
        return (X // self.d - v * self.b) % (2 * self.n0) == 0

    def form(self) -> tuple[int, int, int]:
        """Quadratic form [n0, b, (b^2 - D)/(4 n0)] of the primitive part."""
        return (self.n0, self.b, (self.b * self.b - self.D) // (4 * self.n0))


def principal_ideal(alpha: FieldElement) -> IdealRep:
    (u1, v1), (u2, v2) = (alpha.a, alpha.b), _mul_omega(alpha.a, alpha.b, 0, 1, alpha.D)
    return IdealRep.from_hnf(*_hnf([(u1, v1), (u2, v2)]), alpha.D)


def ideals_of_norm(D: int, n: int) -> list[IdealRep]:
    """All ideals of O_K of norm n, as content times primitive part."""
    if n < 1:
        raise ValueError("norm must be >= 1")
    out = []
    d = 1
    while d * d <= n:
        if n % (d * d) == 0:
            n0 = n // (d * d)
            out.extend(IdealRep(d, n0, b, D) for b in _ideal_roots(D, n0))
        d += 1
    return sorted(out)


@lru_cache(maxsize=65536)
def _ideal_roots(D: int, n0: int) -> tuple[int, ...]:
    if n0 == 1:
        return (D % 2,)
    roots = sqrt_mod(D % (4 * n0), 4 * n0, all_roots=True) or []
    return tuple(sorted({r % (2 * n0) for r in roots}))


def ideals_of_norm_bruteforce(D: int, n: int) -> list[IdealRep]:
    out = []
    for d in range(1, n + 1):
        if n % (d * d):
            continue
        n0 = n // (d * d)
        for b in range(2 * n0):
            if (b * b - D) % (4 * n0) == 0:
                out.append(IdealRep(d, n0, b, D))
    return sorted(out)


# ---------------------------------------------------------------------------
# Indefinite binary quadratic forms
# ---------------------------------------------------------------------------

Form = tuple[int, int, int]


def _lt_sqrt(m: int, D: int) -> bool:
    return m < 0 or m * m < D


def _gt_sqrt(m: int, D: int) -> bool:
    return m > 0 and m * m > D


def is_reduced(f: Form, D: int) -> bool:
    a, b, c = f
    # |sqrt D - 2|a|| < b < sqrt D
    return _lt_sqrt(b, D) and b > 0 and _lt_sqrt(2 * abs(a) - b, D) and _gt_sqrt(2 * abs(a) + b, D)


def _r(b: int, a: int, D: int) -> int:
    m = 2 * abs(a)
    if _gt_sqrt(abs(a), D):
        r = b % m
        if r > abs(a):
            r -= m
        return r
    s = math.isqrt(D)
    return s - ((s - b) % m)


def rho(f: Form, D: int) -> Form:
    """One reduction step; properly equivalent via [[0, -1], [1, k]]."""
    a, b, c = f
    r = _r(-b, c, D)
    return (c, r, (r * r - D) // (4 * c))


def reduce_form(f: Form, D: int) -> Form:
    for _ in range(10_000):
        if is_reduced(f, D):
            return f
        f = rho(f, D)
    raise ClassGroupError(f"reduction of {f} did not terminate")


def form_cycle(f: Form, D: int) -> list[Form]:
    f = reduce_form(f, D)
    cyc = [f]
    g = rho(f, D)
    while g != f:
        cyc.append(g)
        g = rho(g, D)
        if len(cyc) > 10 * D:
            raise ClassGroupError("cycle too long")
    return cyc


def canonical_form(f: Form, D: int) -> Form:
    """Lexicographically minimal reduced form with a > 0 in the class of f."""
    return min(g for g in form_cycle(f, D) if g[0] > 0)


def reduced_forms(D: int) -> list[Form]:
    out = []
    s = math.isqrt(D)
    for b in range(1, s + 1):
        if (b - D) % 2:
            continue
        ac = (b * b - D) // 4
        for a in range(1, abs(ac) + 1):
            if ac % a:
                continue
            for sa in (a, -a):
                f = (sa, b, ac // sa)
                if is_reduced(f, D) and math.gcd(math.gcd(*f[:2]), f[2]) == 1:
                    out.append(f)
    return sorted(out)


def form_classes_by_cycles(D: int) -> list[Form]:
    """One canonical form per proper class, found by partitioning reduced forms into cycles."""
    seen: set[Form] = set()
    reps = []
    for f in reduced_forms(D):
        if f in seen:
            continue
        cyc = form_cycle(f, D)
        seen.update(cyc)
        reps.append(min(g for g in cyc if g[0] > 0))
    return sorted(reps)


def form_to_ideal(f: Form, D: int) -> IdealRep:
    a, b, c = f
    if a <= 0:
        raise ValueError("need a > 0 to read off an ideal")
    return IdealRep(1, a, b, D)


def compose_forms(f: Form, g: Form, D: int) -> Form:
    """Composition through the product of the associated ideals."""
    prod = form_to_ideal(canonical_form(f, D), D) * form_to_ideal(canonical_form(g, D), D)
    return canonical_form(prod.form(), D)


# ---------------------------------------------------------------------------
# Narrow class group
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NarrowClassGroup:
    D: int
    reps: tuple[Form, ...]              # canonical forms, index 0 = principal class
    table: tuple[tuple[int, ...], ...]  # composition table on indices
    orders: tuple[int, ...]             # cyclic factor orders h_1..h_s
    generator_indices: tuple[int, ...]
    generators: tuple[IdealRep, ...]    # J_1..J_s
    exponents: tuple[tuple[int, ...], ...]  # exponent vector of each element index

    @property
    def h_plus(self) -> int:
        return len(self.reps)

    def index_of_form(self, f: Form) -> int:
        return self.reps.index(canonical_form(f, self.D))

    def index_of_ideal(self, I: IdealRep) -> int:
        return self.index_of_form(I.form())

    def element_order(self, i: int) -> int:
        k, j = 1, i
        while j != 0:
            j = self.table[j][i]
            k += 1
        return k

    def inverse(self, i: int) -> int:
        return next(j for j in range(self.h_plus) if self.table[i][j] == 0)

    def element_of_exponents(self, t: Sequence[int]) -> int:
        return self.exponents.index(tuple(ti % hi for ti, hi in zip(t, self.orders)))


def _decompose(table, h) -> tuple[tuple[int, ...], tuple[int, ...]]:
    orders = []
    for i in range(h):
        k, j = 1, i
        while j != 0:
            j = table[j][i]
            k += 1
        orders.append(k)
    if h == 1:
        return (), ()
    for s in range(1, h.bit_length() + 1):
        for combo in itertools.product(range(1, h), repeat=s):
            hs = [orders[i] for i in combo]
            if any(hs[k] < hs[k + 1] for k in range(s - 1)) or math.prod(hs) != h:
                continue
            seen = set()
            for t in itertools.product(*(range(x) for x in hs)):
                e = 0
                for gi, ti in zip(combo, t):
                    for _ in range(ti):
                        e = table[e][gi]
                seen.add(e)
            if len(seen) == h:
                return tuple(hs), tuple(combo)
    raise ClassGroupError("no cyclic decomposition found")


@lru_cache(maxsize=None)
def narrow_class_group(D: int) -> NarrowClassGroup:
    check_fundamental(D)
    reps = form_classes_by_cycles(D)
    principal = canonical_form((1, D % 2, (D % 2 - D) // 4), D)
    reps.remove(principal)
    reps = [principal] + reps
    h = len(reps)
    index = {f: i for i, f in enumerate(reps)}
    table = tuple(
        tuple(index[compose_forms(reps[i], reps[j], D)] for j in range(h)) for i in range(h)
    )
    orders, gens = _decompose(table, h)
    exps: list[tuple[int, ...] | None] = [None] * h
    for t in itertools.product(*(range(x) for x in orders)):
        e = 0
        for gi, ti in zip(gens, t):
            for _ in range(ti):
                e = table[e][gi]
        exps[e] = tuple(t)
    if any(x is None for x in exps):
        raise ClassGroupError("decomposition does not cover the group")
    return NarrowClassGroup(
        D=D,
        reps=tuple(reps),
        table=table,
        orders=orders,
        generator_indices=gens,
        generators=tuple(form_to_ideal(reps[g], D) for g in gens),
        exponents=tuple(exps),  # type: ignore[arg-type]
    )


def ideal_class_index(I: IdealRep, G: NarrowClassGroup) -> tuple[int, ...]:
    """Exponent vector (t_1..t_s) with I * prod J_i^(-t_i) narrowly principal."""
    try:
        return G.exponents[G.index_of_ideal(I)]
    except ValueError as exc:
        raise ClassGroupError(f"{I} does not reduce to a known class") from exc


def totally_positive_generator(I: IdealRep, F: QuadField | None = None) -> FieldElement:
    """The generator of a narrowly principal ideal lying in F_D."""
    F = F or quad_field(I.D)
    N = I.norm
    D = F.D
    ymax = math.floor((F.eps_f - 1.0 / F.eps_f) * math.sqrt(N / D)) + 1
    for Y in range(0, ymax + 1):
        x2 = 4 * N + D * Y * Y
        X = math.isqrt(x2)
        if X * X != x2 or (X - D * Y) % 2:
            continue
        alpha = FieldElement.from_half(X, Y, D)
        if F.fundamental_domain_contains(alpha) and I.contains(alpha):
            return alpha
    raise ClassGroupError(f"no totally positive generator of {I} in F_D")


def class_number_analytic(D: int) -> float:
    """h+(K) from h+ log(eps_D) = sqrt(D) L(1, chi_D); independent oracle."""
    from .hecke import kronecker

    F = quad_field(D)
    s = -sum(kronecker(D, a) * math.log(math.sin(math.pi * a / D)) for a in range(1, D))
    return s / F.log_eps_f
