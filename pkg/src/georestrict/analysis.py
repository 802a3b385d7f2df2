"""Smooth partitions of unity, the test weight H_A, Poisson summation and lattice counting."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

from .quadfield import FieldElement, QuadField, elements_in_region, quad_field
from .special_functions import V, spectral_r

# ---------------------------------------------------------------------------
# Smooth step built from the mollifier exp(-1/(1-u^2))
# ---------------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(40)
_PIECES = 64
_EDGES = np.linspace(0.0, 1.0, _PIECES + 1)


def _bump(s):
    """psi(s) = exp(-1/(4 s (1 - s))) on (0, 1), i.e. the mollifier on [-1, 1] rescaled to [0, 1]."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = (s > 0) & (s < 1)
    out[m] = np.exp(-1.0 / (4 * s[m] * (1 - s[m])))
    return out


def _gl(a, b):
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    x = a + (b - a) * (_GL_X + 1) / 2
    return ((b - a)[..., 0] / 2) * (_bump(x) @ _GL_W)


@lru_cache(maxsize=1)
def _cumulative():
    pieces = _gl(_EDGES[:-1], _EDGES[1:])
    cum = np.concatenate([[0.0], np.cumsum(pieces)])
    return cum, cum[-1]


def smooth_rise(s):
    """Phi(s): 0 for s <= 0, 1 for s >= 1, C-infinity and increasing in between."""
    s = np.asarray(s, dtype=float)
    cum, Z = _cumulative()
    sc = np.clip(s, 0.0, 1.0)
    j = np.minimum((sc * _PIECES).astype(int), _PIECES - 1)
    val = (cum[j] + _gl(_EDGES[j], sc)) / Z
    val = np.where(s <= 0, 0.0, np.where(s >= 1, 1.0, val))
    return val if val.ndim else float(val)


@lru_cache(maxsize=None)
def _bump_deriv_poly(k: int) -> Polynomial:
    """P_k with psi^{(k)} = P_k / q^{2k} psi, q = 4 s (1 - s)."""
    q = Polynomial([0.0, 4.0, -4.0])
    dq = q.deriv()
    if k == 0:
        return Polynomial([1.0])
    P = _bump_deriv_poly(k - 1)
    j = k - 1
    return P.deriv() * q * q - 2 * j * q * dq * P + dq * P


def smooth_rise_deriv(s, j: int):
    """j-th derivative of Phi."""
    if j == 0:
        return smooth_rise(s)
    s = np.asarray(s, dtype=float)
    _, Z = _cumulative()
    out = np.zeros_like(s)
    m = (s > 0) & (s < 1)
    sm = s[m]
    q = 4 * sm * (1 - sm)
    k = j - 1
    with np.errstate(over="ignore", invalid="ignore"):
        val = _bump_deriv_poly(k)(sm) / q ** (2 * k) * np.exp(-1.0 / q)
    out[m] = np.nan_to_num(val, nan=0.0, posinf=0.0, neginf=0.0) / Z
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SmoothStep:
    """1 on (-inf, p], 0 on [q, inf) (or the mirror image when rising=True)."""

    p: float
    q: float
    rising: bool = False

    def __call__(self, x):
        s = (np.asarray(x, dtype=float) - self.p) / (self.q - self.p)
        v = smooth_rise(s)
        return v if self.rising else 1.0 - v

    def deriv(self, x, j: int):
        if j == 0:
            return self(x)
        L = self.q - self.p
        s = (np.asarray(x, dtype=float) - self.p) / L
        d = smooth_rise_deriv(s, j) / L ** j
        return d if self.rising else -d


ETA = SmoothStep(1.0, 2.0)


def dyadic_W(x):
    """W(x) = eta(x) - eta(2x), supported on [1/2, 2]."""
    x = np.asarray(x, dtype=float)
    return ETA(x) - ETA(2 * x)


def dyadic_W_deriv(x, j: int):
    x = np.asarray(x, dtype=float)
    return ETA.deriv(x, j) - 2.0 ** j * ETA.deriv(2 * x, j)


def partition_sum(x, K: int | None = None):
    """sum_{k=0}^{K} W(x / 2^k)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if K is None:
        K = int(max(1.0, math.ceil(math.log2(max(np.max(x), 1.0))))) + 2
    return sum(dyadic_W(x / 2.0 ** k) for k in range(K + 1))


def partition_sum_check(x_grid) -> float:
    """max |sum_k W(x/2^k) - 1| over grid points x >= 1."""
    x = np.asarray(x_grid, dtype=float)
    x = x[x >= 1]
    return float(np.max(np.abs(partition_sum(x) - 1.0))) if x.size else 0.0


# ---------------------------------------------------------------------------
# Windows in the spectral variable
# ---------------------------------------------------------------------------

U_TILDE = SmoothStep(-0.5, 0.0, rising=True)


def bump_U(x, t: float, D: int):
    """U(x) = U~(x / (c_D t)); 1 on [0, inf), 0 on (-inf, -c_D t / 2]."""
    if t < 2:
        raise ValueError("t >= 2 required")
    cD = quad_field(D).c_D_f
    return U_TILDE(np.asarray(x, dtype=float) / (cD * t))


def bump_U_deriv(x, t: float, D: int, j: int):
    s = quad_field(D).c_D_f * t
    return U_TILDE.deriv(np.asarray(x, dtype=float) / s, j) / s ** j


def window_W_k(x, k: int, t: float, D: int):
    """W_k(x) = W((c_D t - x) / 2^k)."""
    cD = quad_field(D).c_D_f
    return dyadic_W((cD * t - np.asarray(x, dtype=float)) / 2.0 ** k)


def window_W_k_deriv(x, k: int, t: float, D: int, j: int):
    cD = quad_field(D).c_D_f
    T = 2.0 ** k
    return (-1.0 / T) ** j * dyadic_W_deriv((cD * t - np.asarray(x, dtype=float)) / T, j)


def window_support(k: int, t: float, D: int) -> tuple[float, float]:
    cD = quad_field(D).c_D_f
    return cD * t - 2.0 ** (k + 1), cD * t - 2.0 ** (k - 1)


def k_D(t: float, D: int) -> float:
    """Windows with k >= k_D never meet the support of U."""
    return math.log2(1.5 * quad_field(D).c_D_f * t) + 1


def a_T(T: float, t: float, delta: float) -> int:
    """Smallest integer exceeding (Tt)^{1+delta}."""
    return math.floor((T * t) ** (1 + delta)) + 1


def bump_U_T(N, T: float, t: float, delta: float):
    """Smooth bump: 1 on [1, (Tt)^{1+delta}], 0 outside [0, a_T]."""
    top = (T * t) ** (1 + delta)
    up = SmoothStep(0.0, 1.0, rising=True)
    down = SmoothStep(top, float(a_T(T, t, delta)))
    N = np.asarray(N, dtype=float)
    return up(N) * down(N)


def W_prime_a(N, a: int):
    """W'_a(alpha) = W(|N(alpha)| / 2^a)."""
    return dyadic_W(np.abs(np.asarray(N, dtype=float)) / 2.0 ** a)


# ---------------------------------------------------------------------------
# H_A and Pi_alpha
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HParams:
    k: int
    a: int
    t: float
    D: int
    delta: float = 0.1

    @property
    def T(self) -> float:
        return 2.0 ** self.k

    @property
    def A(self) -> float:
        return 2.0 ** self.a


def theta_alpha(alpha: FieldElement, F: QuadField | None = None) -> float:
    """log(alpha/alpha*) / (2 log eps): the Poisson shift attached to alpha."""
    F = F or quad_field(alpha.D)
    return float(F.ratio_exponent(alpha)) / 2


def character_exponential(alpha: FieldElement, x) -> np.ndarray:
    """|alpha/alpha*|^{pi i x / log eps}."""
    F = quad_field(alpha.D)
    a, b = alpha.embed_float()
    return np.exp(1j * math.pi * np.asarray(x, dtype=float) / F.log_eps_f * math.log(abs(a / b)))


def _alpha_weight(N: int, p: HParams) -> float:
    return float((p.T * p.t) ** -0.5 / math.sqrt(abs(N)) * W_prime_a(N, p.a)
                 * bump_U_T(abs(N), p.T, p.t, p.delta))


def H_A(alpha: FieldElement, m: int, x, p: HParams):
    """(Tt)^{-1/2} |N|^{-1/2} W'_a U_T W_k(x) U(x) V(m^2 |N| / D, x)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    N = abs(alpha.norm())
    wa = _alpha_weight(N, p)
    out = np.zeros_like(x)
    win = window_W_k(x, p.k, p.t, p.D) * bump_U(x, p.t, p.D)
    nz = (win != 0) & (wa != 0)
    y = m * m * N / p.D
    for i in np.nonzero(nz)[0]:
        out[i] = wa * win[i] * V(y, x[i], p.t, p.D)
    return out if out.size > 1 else float(out[0])


class _VInterp:
    """Chebyshev interpolant of x -> V(y, x) on an interval (V is analytic in x)."""

    def __init__(self, y, lo, hi, t, D, deg=80):
        self.lo, self.hi = lo, hi
        nodes = np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1))
        xs = lo + (hi - lo) * (nodes + 1) / 2
        vals = np.array([V(y, xi, t, D) for xi in xs])
        self.cheb = np.polynomial.chebyshev.Chebyshev.fit(nodes, vals, deg)

    def __call__(self, x):
        s = 2 * (np.asarray(x, dtype=float) - self.lo) / (self.hi - self.lo) - 1
        return self.cheb(s)


def H_A_function(alpha: FieldElement, m: int, p: HParams, deg: int = 80):
    """Fast vectorised x -> H_A(alpha, m, x) using a Chebyshev model of V in x."""
    lo, hi = window_support(p.k, p.t, p.D)
    N = abs(alpha.norm())
    wa = _alpha_weight(N, p)
    if wa == 0:
        return (lambda x: np.zeros_like(np.asarray(x, dtype=float))), (lo, hi)
    vi = _VInterp(m * m * N / p.D, lo, hi, p.t, p.D, deg)

    def h(x):
        x = np.asarray(x, dtype=float)
        xs = np.clip(x, lo, hi)
        return wa * window_W_k(x, p.k, p.t, p.D) * bump_U(x, p.t, p.D) * vi(xs)

    return h, (lo, hi)


def Pi_alpha(alpha: FieldElement, m: int, p: HParams, n_values=None) -> complex:
    """(Tt)^{-1/2} sum_n W_k(n) U(n) V(m^2|N|/D, n) |alpha/alpha*|^{pi i n / log eps}."""
    lo, hi = window_support(p.k, p.t, p.D)
    if n_values is None:
        n_values = np.arange(math.ceil(lo), math.floor(hi) + 1)
    n = np.asarray(n_values, dtype=float)
    w = window_W_k(n, p.k, p.t, p.D) * bump_U(n, p.t, p.D)
    keep = w != 0
    if not np.any(keep):
        return 0j
    y = m * m * abs(alpha.norm()) / p.D
    vals = np.array([V(y, ni, p.t, p.D) for ni in n[keep]])
    return complex((p.T * p.t) ** -0.5 * np.sum(w[keep] * vals * character_exponential(alpha, n[keep])))


def fourier_transform(h, support: tuple[float, float], xi: float) -> complex:
    """int h(x) e(-x xi) dx by adaptive (QAWO) quadrature over the compact support."""
    lo, hi = support
    f = lambda x: float(h(x))
    if xi == 0:
        return complex(integrate.quad(f, lo, hi, epsabs=1e-15, epsrel=1e-13, limit=500)[0])
    w = 2 * math.pi * xi
    c = integrate.quad(f, lo, hi, weight="cos", wvar=w, epsabs=1e-15, limit=1000)[0]
    s = integrate.quad(f, lo, hi, weight="sin", wvar=w, epsabs=1e-15, limit=1000)[0]
    return complex(c, -s)


def hat_H_A(alpha: FieldElement, m: int, xi_shift: float, p: HParams) -> complex:
    h, sup = H_A_function(alpha, m, p)
    return fourier_transform(h, sup, xi_shift)


@dataclass
class PoissonResult:
    lhs: complex
    rhs: complex
    residual: float
    xi_max: int
    tail: float


def poisson_identity_residual(alpha: FieldElement, m: int, p: HParams, xi_max: int = 40) -> PoissonResult:
    """|sum_n H_A(n) e(n theta) - sum_xi hat H_A(xi - theta)| with theta the alpha shift."""
    h, (lo, hi) = H_A_function(alpha, m, p)
    th = theta_alpha(alpha)
    n = np.arange(math.ceil(lo), math.floor(hi) + 1)
    lhs = complex(np.sum(h(n) * np.exp(2j * math.pi * n * th)))
    terms = [fourier_transform(h, (lo, hi), xi - th) for xi in range(-xi_max, xi_max + 1)]
    rhs = complex(sum(terms))
    tail = abs(terms[0]) + abs(terms[-1])
    return PoissonResult(lhs, rhs, abs(lhs - rhs), xi_max, tail)


# ---------------------------------------------------------------------------
# Lattice regions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeRegion:
    xi: int
    R: float
    A: float
    D: int

    def __post_init__(self):
        if not (self.R > 0) or self.A < 1:
            raise ValueError("need R > 0 and A >= 1")


def S_region_enumerate(region: LatticeRegion) -> list[FieldElement]:
    """S_{xi,R}: alpha in F_D, eps^{xi-R} alpha* <= alpha <= eps^{xi+R} alpha*, A/2 <= N <= 2A."""
    F = quad_field(region.D)
    return elements_in_region(F, (region.A / 2, 2 * region.A), (region.xi - region.R, region.xi + region.R))


def S_region_bruteforce(region: LatticeRegion) -> list[tuple[int, int]]:
    """Vectorised exhaustive scan over (a, b) in a box; returns sorted (a, b) pairs."""
    F = quad_field(region.D)
    box = int(F.eps_f * math.sqrt(4 * region.A)) + 3
    a, b = np.meshgrid(np.arange(-box, box + 1), np.arange(-box, box + 1), indexing="ij")
    a, b = a.ravel().astype(np.int64), b.ravel().astype(np.int64)
    bc = F.beta_conj
    x = a + b * float(F.beta)
    y = a + b * float(bc)
    if region.D % 4 == 1:
        N = a * a + a * b - b * b * ((region.D - 1) // 4)
    else:
        N = a * a - b * b * (region.D // 4)
    m = (x > 0) & (y > 0) & (N * 2 >= region.A) & (N <= 2 * region.A)
    rho = np.full(x.shape, np.nan)
    rho[m] = np.log(x[m] / y[m]) / F.log_eps_f
    lo = max(region.xi - region.R, 0.0)
    hi = region.xi + region.R
    tol = 1e-12
    m &= (rho >= lo - tol) & (rho <= hi + tol) & (rho < 2 - tol)
    return sorted(zip(a[m].tolist(), b[m].tolist()))


@dataclass(frozen=True)
class Parallelogram:
    v1: tuple[float, float]
    v2: tuple[float, float]
    slope: float
    xmax: float
    height: float

    @classmethod
    def of(cls, region: LatticeRegion) -> "Parallelogram":
        F = quad_field(region.D)
        e = F.eps_f
        s = math.sqrt(2 * region.A)
        v1 = (e * s, e ** (1 - region.xi - region.R) * s)
        v2 = (0.0, 2 * e ** 5 * region.R * s)
        return cls(v1, v2, e ** (-region.xi - region.R), e * s, v2[1])

    def contains(self, x: float, y: float, tol: float = 1e-9) -> bool:
        return (-tol <= x <= self.xmax * (1 + tol)
                and self.slope * x * (1 - tol) - tol <= y <= self.slope * x + self.height * (1 + tol) + tol)

    @property
    def area(self) -> float:
        return abs(self.v1[0] * self.v2[1] - self.v1[1] * self.v2[0])


def parallelogram_check(region: LatticeRegion) -> bool:
    """Every point of S_{xi,R} lies in P_{xi,R}; a violation is a hard failure."""
    if region.xi < -1 or not (0 < region.R <= 2):
        raise ValueError("containment is only claimed for xi >= -1, 0 < R <= 2")
    P = Parallelogram.of(region)
    for alpha in S_region_enumerate(region):
        x, y = alpha.embed_float()
        if not P.contains(x, y):
            raise AssertionError(f"{alpha} lies outside the parallelogram for {region}")
    return True


def lattice_convex_bound(region: LatticeRegion) -> float:
    """Rigorous count bound for P cap L_D: area + perimeter/2 + 1 in lattice coordinates."""
    P = Parallelogram.of(region)
    F = quad_field(region.D)
    B = np.array([[1.0, float(F.beta)], [1.0, float(F.beta_conj)]])
    Binv = np.linalg.inv(B)
    w1 = Binv @ np.array(P.v1)
    w2 = Binv @ np.array(P.v2)
    area = abs(w1[0] * w2[1] - w1[1] * w2[0])
    perim = 2 * (np.linalg.norm(w1) + np.linalg.norm(w2))
    return float(area + perim / 2 + 1)


def lipschitz_count_bound(region: LatticeRegion, C_D: float) -> tuple[int, float]:
    """(|S_{xi,R}|, C_D (R A + sqrt A))."""
    count = len(S_region_enumerate(region))
    return count, C_D * (region.R * region.A + math.sqrt(region.A))


def lattice_main_term(region: LatticeRegion) -> float:
    """Heuristic area/covolume count: (log eps / 2)(3A/2)|cone|/sqrt D."""
    F = quad_field(region.D)
    lo = max(region.xi - region.R, 0.0)
    hi = min(region.xi + region.R, 2.0)
    width = max(hi - lo, 0.0)
    return F.log_eps_f / 2 * 1.5 * region.A * width / math.sqrt(region.D)
