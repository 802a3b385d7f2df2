"""Geodesic side: K-Bessel kernel, Maass form evaluation, periods I(g, chi) and the restriction norm."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy import integrate

from .geodesics import ClosedGeodesic, geodesic_points_float, geodesics_for_discriminant
from .hecke import ClassCharacter, HeckeCharacter, class_characters
from .quadfield import narrow_class_group, quad_field

# ---------------------------------------------------------------------------
# K_{it}(x)
# ---------------------------------------------------------------------------

_LOG_TARGET = 39.0  # trapezoid error target ~ e^{-39}
X_MAX = 700.0


def _kbessel_scaled(nu: float, x: float) -> float:
    """e^{pi nu / 2} K_{i nu}(x) by the trapezoid rule on the shifted line Im u = phi.

    K_{i nu}(x) = (1/2) int_R exp(-x cosh w + i nu w) dw and the line is moved to
    w = u + i phi, phi chosen near the saddle so the integrand does not oscillate.
    """
    if x >= nu:
        phi = math.asin(nu / x) if x > 0 else 0.0
    else:
        phi = math.pi / 2 - min(math.pi / 2, 1.0 / (nu - x))
    phi = min(phi, math.pi / 2 - 1.0 / (nu + 2.0))
    c = x * math.cos(phi)
    dmax = math.pi / 2 - phi
    ds = np.linspace(dmax / 200, dmax * 0.999, 200)
    hs = 2 * np.pi * ds / (_LOG_TARGET + c * (1 - np.cos(ds)) + abs(nu - x * math.sin(phi)) * ds)
    h = float(hs.max())
    umax = math.acosh(1 + (_LOG_TARGET + 5) / c)
    n = int(math.ceil(umax / h))
    w = h * np.arange(-n, n + 1) + 1j * phi
    f = np.exp(-x * np.cosh(w) + 1j * nu * w + math.pi * nu / 2)
    return float(0.5 * h * f.sum().real)


@dataclass(frozen=True)
class BesselValue:
    value: float
    underflow: bool = False


def bessel_K_imag_flagged(t: float, x: float, scaled: bool = False) -> BesselValue:
    if x <= 0:
        raise ValueError("x must be positive")
    if t < 0:
        t = -t
    if x - math.pi * t / 2 > X_MAX:
        return BesselValue(0.0, True)
    v = _kbessel_scaled(t, x)
    if not scaled:
        v *= math.exp(-math.pi * t / 2)
    return BesselValue(v, False)


def bessel_K_imag(t: float, x: float, scaled: bool = False) -> float:
    """K_{it}(x) (times e^{pi t/2} when scaled); real for real t, x > 0."""
    return bessel_K_imag_flagged(t, x, scaled).value


def bessel_K_quad(t: float, x: float) -> float:
    """int_0^inf e^{-x cosh u} cos(t u) du by adaptive quadrature (oracle; fine for moderate t)."""
    umax = math.acosh(1 + 60.0 / x)
    return integrate.quad(lambda u: math.exp(-x * math.cosh(u)), 0, umax,
                          weight="cos", wvar=t, limit=2000, epsabs=1e-16)[0]


class KTable:
    """Piecewise Chebyshev table of e^{pi t/2} K_{it}(x) for x in [a, b]."""

    def __init__(self, t: float, a: float, b: float, width: float = 1.0, deg: int = 40):
        self.t, self.a, self.b, self.w = t, a, b, width
        self.edges = np.arange(a, b + width, width)
        nodes = np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1))
        coefs = []
        for lo, hi in zip(self.edges[:-1], self.edges[1:]):
            xx = lo + (hi - lo) * (nodes + 1) / 2
            coefs.append(C.chebfit(nodes, [_kbessel_scaled(t, v) for v in xx], deg))
        self.coefs = np.array(coefs)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < self.a):
            raise ValueError("argument below table range")
        out = np.zeros_like(x)
        idx = np.floor((x - self.a) / self.w).astype(int)
        ok = idx < len(self.coefs)
        for i in np.unique(idx[ok]):
            m = ok & (idx == i)
            lo, hi = self.edges[i], self.edges[i + 1]
            out[m] = C.chebval(2 * (x[m] - lo) / (hi - lo) - 1, self.coefs[i])
        return out


# ---------------------------------------------------------------------------
# Maass forms for SL2(Z)
# ---------------------------------------------------------------------------

Y_FLOOR = math.sqrt(3) / 2 - 1e-12


def pullback(x, y, max_iter: int = 1000):
    """Map points of H into the standard fundamental domain of SL2(Z)."""
    x = np.array(x, dtype=float, ndmin=1)
    y = np.array(y, dtype=float, ndmin=1)
    for _ in range(max_iter):
        x = x - np.round(x)
        r2 = x * x + y * y
        m = r2 < 1 - 1e-15
        if not m.any():
            break
        x[m], y[m] = -x[m] / r2[m], y[m] / r2[m]
    return x, y


class MaassEvaluator:
    """Vectorised evaluation of f(z) = sum lambda(n) sqrt(y) K(2 pi n y) {2cos | 2sin}(2 pi n x).

    The K-Bessel factor is the scaled one, so values are e^{pi t/2} f(z).
    """

    def __init__(self, form, y_floor: float = Y_FLOOR, reduce: bool = True, tail: float = 45.0):
        self.f = form
        self.y_floor = y_floor
        self.reduce = reduce
        self.tail = tail
        nmax = int(math.ceil((form.t + tail) / (2 * math.pi * y_floor))) + 1
        if nmax > len(form.coefficients) - 1:
            nmax = len(form.coefficients) - 1
        self.nmax = nmax
        self.table = KTable(form.t, 2 * math.pi * y_floor * 0.999, form.t + tail + 2)
        self.trig = np.cos if form.parity == "even" else np.sin

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        x, y = z.real.ravel(), z.imag.ravel()
        if self.reduce:
            x, y = pullback(x, y)
        if np.any(y < self.y_floor):
            raise ValueError("point below the y-floor: the Fourier series would be too long")
        out = np.zeros_like(x)
        lam = self.f.coefficients
        for n in range(1, self.nmax + 1):
            arg = 2 * math.pi * n * y
            live = arg < self.f.t + self.tail  # K decays like e^{-x} beyond the turning point
            if not live.any():
                break
            out[live] += lam[n] * np.sqrt(y[live]) * self.table(arg[live]) * 2 * self.trig(2 * math.pi * n * x[live])
        return out.reshape(np.shape(z))


def maass_value(form, z, scaled: bool = False, reduce: bool = True) -> float:
    """f(z) for a level-one Maass form (one-off evaluation; use MaassEvaluator in loops)."""
    ev = MaassEvaluator(form, reduce=reduce)
    v = float(ev(np.array([z]))[0])
    return v if scaled else v * math.exp(-math.pi * form.t / 2)


# ---------------------------------------------------------------------------
# Functions on C_D and their periods
# ---------------------------------------------------------------------------

@dataclass
class GeodesicFunction:
    """g on C_D, given per geodesic in the chart x in [0, 1): callback(index, x) -> values."""

    D: int
    callback: Callable[[int, np.ndarray], np.ndarray]
    smoothness: str = "analytic"
    band_limit: int | None = None

    def __call__(self, j: int, x) -> np.ndarray:
        return np.asarray(self.callback(j, np.asarray(x, dtype=float)))


def constant_function(D: int, c: complex = 1.0) -> GeodesicFunction:
    return GeodesicFunction(D, lambda j, x: np.full(np.shape(x), c, dtype=complex), band_limit=0)


def trigonometric_function(D: int, coeffs: dict[tuple[int, int], complex]) -> GeodesicFunction:
    """sum over (geodesic j, frequency n) of coeffs * e(n x) on geodesic j."""
    nb = max((abs(n) for (_, n) in coeffs), default=0)

    def cb(j, x):
        out = np.zeros(np.shape(x), dtype=complex)
        for (jj, n), c in coeffs.items():
            if jj == j:
                out += c * np.exp(2j * math.pi * n * x)
        return out

    return GeodesicFunction(D, cb, band_limit=nb)


def maass_on_geodesics(form, D: int, scaled: bool = True) -> GeodesicFunction:
    geos = geodesics_for_discriminant(D)
    ev = MaassEvaluator(form)
    s = 1.0 if scaled else math.exp(-math.pi * form.t / 2)

    def cb(j, x):
        return s * ev(geodesic_points_float(geos[j], x))

    return GeodesicFunction(D, cb)


@dataclass(frozen=True)
class QuadratureConfig:
    nodes: int = 64
    max_nodes: int = 1 << 14
    tol: float = 1e-12

    def __post_init__(self):
        if self.nodes & (self.nodes - 1) or self.nodes < 1:
            raise ValueError("node count must be a power of two")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")


DEFAULT_QCFG = QuadratureConfig()


@dataclass
class FourierData:
    """Fourier coefficients c_j(n) = int_0^1 g_j(x) e(-n x) dx for each geodesic j."""

    coeffs: list[np.ndarray]
    nodes: int
    converged: bool
    change: float

    def coefficient(self, j: int, n: int) -> complex:
        N = self.nodes
        if abs(n) >= N // 2:
            return 0j
        return complex(self.coeffs[j][n % N])


def geodesic_fourier(g: GeodesicFunction, cfg: QuadratureConfig = DEFAULT_QCFG,
                     n_needed: int = 0) -> FourierData:
    """Periodic trapezoid rule (FFT), doubling the node count until the coefficients settle."""
    h = narrow_class_group(g.D).h_plus
    N = max(cfg.nodes, 1 << int(math.ceil(math.log2(4 * n_needed + 4))))
    prev = None
    change = math.inf
    while True:
        x = np.arange(N) / N
        cs = [np.fft.fft(g(j, x)) / N for j in range(h)]
        if prev is not None:
            M = len(prev[0])
            k = np.r_[0:M // 2, -(M // 2) + 1:0]
            change = max(float(np.max(np.abs(c[k % N] - p[k % M]))) for c, p in zip(cs, prev))
            scale = max(1.0, max(float(np.max(np.abs(c))) for c in cs))
            if change <= cfg.tol * scale:
                return FourierData(cs, N, True, change)
        if N >= cfg.max_nodes:
            return FourierData(cs, N, False, change)
        prev = cs
        N *= 2


def _period(g_fourier: FourierData, psi: ClassCharacter, n: int, L: float) -> complex:
    G = narrow_class_group(psi.D)
    s = 0j
    for j in range(G.h_plus):
        s += np.conj(psi.of_class(j)) * L * g_fourier.coefficient(j, n)
    return s


def total_length(D: int) -> float:
    """|C_D| = h+ log(eps_D^2)."""
    return narrow_class_group(D).h_plus * 2 * quad_field(D).log_eps_f


def geodesic_integral_I(g: GeodesicFunction, psi: ClassCharacter, n: int,
                        cfg: QuadratureConfig = DEFAULT_QCFG, fourier: FourierData | None = None) -> float:
    """|sum_classes psi^{-1}([a]) int_1^{eps^2} g(kappa^{-1} i y) y^{-pi i n/log eps} dy/y|^2."""
    fd = fourier or geodesic_fourier(g, cfg, abs(n))
    if not fd.converged:
        raise RuntimeError(f"geodesic quadrature did not converge (change {fd.change:.2e})")
    L = 2 * quad_field(g.D).log_eps_f
    return abs(_period(fd, psi, n, L)) ** 2


def geodesic_integral_I_ychart(g: GeodesicFunction, psi: ClassCharacter, n: int) -> float:
    """Same period computed with adaptive quadrature in the y-chart; independent check."""
    F = quad_field(g.D)
    G = narrow_class_group(g.D)
    L = 2 * F.log_eps_f
    r = math.pi * n / F.log_eps_f
    total = 0j
    for j in range(G.h_plus):
        def f(y, part):
            x = math.log(y) / L
            v = complex(g(j, np.array([x]))[0]) * complex(math.cos(r * math.log(y)), -math.sin(r * math.log(y))) / y
            return v.real if part == 0 else v.imag
        e2 = F.eps_f ** 2
        re = integrate.quad(f, 1.0, e2, args=(0,), epsabs=1e-14, epsrel=1e-13, limit=500)[0]
        im = integrate.quad(f, 1.0, e2, args=(1,), epsabs=1e-14, epsrel=1e-13, limit=500)[0]
        total += np.conj(psi.of_class(j)) * complex(re, im)
    return abs(total) ** 2


@dataclass
class NormResult:
    norm_sq: float          # |C_D|^{-1} sum I  (equals the integral of |g|^2 ds)
    mean_square: float      # norm_sq / |C_D|   (1 for g = 1)
    direct: float           # int |g|^2 ds by direct quadrature
    partial_sums: list[float]
    tail_flag: bool


def restriction_norm(g: GeodesicFunction, n_max: int, cfg: QuadratureConfig = DEFAULT_QCFG) -> NormResult:
    """Spectral side of the restriction norm: |C_D|^{-1} sum_psi sum_{|n|<=n_max} I(g, chi_{psi,n})."""
    D = g.D
    fd = geodesic_fourier(g, cfg, n_max)
    CD = total_length(D)
    chars = class_characters(D)
    partial = []
    acc = 0.0
    for nn in range(0, n_max + 1):
        for n in ({0} if nn == 0 else {nn, -nn}):
            for psi in chars:
                acc += geodesic_integral_I(g, psi, n, cfg, fd)
        partial.append(acc / CD)
    L = 2 * quad_field(D).log_eps_f
    direct = L * sum(float(np.sum(np.abs(c) ** 2)) for c in fd.coeffs)  # Parseval on the trapezoid grid
    norm_sq = partial[-1]
    tail = abs(norm_sq - direct) > 1e-8 * max(1.0, direct)
    return NormResult(norm_sq, norm_sq / CD, direct, partial, tail)


def direct_norm_sq(g: GeodesicFunction, nodes: int = 4096) -> float:
    """int_{C_D} |g|^2 ds with the periodic trapezoid rule on each geodesic."""
    h = narrow_class_group(g.D).h_plus
    L = 2 * quad_field(g.D).log_eps_f
    x = np.arange(nodes) / nodes
    return L * sum(float(np.mean(np.abs(g(j, x)) ** 2)) for j in range(h))


def inner_product(g1: GeodesicFunction, g2: GeodesicFunction, nodes: int = 4096) -> complex:
    """<g1, g2> = int_{C_D} g1 conj(g2) ds."""
    h = narrow_class_group(g1.D).h_plus
    L = 2 * quad_field(g1.D).log_eps_f
    x = np.arange(nodes) / nodes
    return L * sum(complex(np.mean(g1(j, x) * np.conj(g2(j, x)))) for j in range(h))


# ---------------------------------------------------------------------------
# Waldspurger constancy
# ---------------------------------------------------------------------------

@dataclass
class WaldspurgerEntry:
    n: int
    I_value: float | None
    L_side: float | None
    ratio: float | None
    flag: str = ""


def waldspurger_ratio(form, D: int, n_list: Sequence[int], psi: ClassCharacter | None = None,
                      cfg: QuadratureConfig = DEFAULT_QCFG, afe_cfg=None,
                      noise_floor: float = 1e-10) -> list[WaldspurgerEntry]:
    """I(f, chi_{psi,n}) / completed_ratio(f, chi_{psi,n}) for each requested n of matching parity."""
    from .lfunctions import AFEConfig, completed_ratio

    afe_cfg = afe_cfg or AFEConfig()
    psi = psi or ClassCharacter(D, (0,) * len(narrow_class_group(D).orders))
    g = maass_on_geodesics(form, D, scaled=True)
    fd = geodesic_fourier(g, cfg, max(abs(n) for n in n_list))
    want = 0 if form.parity == "even" else 1
    out = []
    for n in n_list:
        if n % 2 != want:
            out.append(WaldspurgerEntry(n, None, None, None, "parity-mismatch"))
            continue
        I = geodesic_integral_I(g, psi, n, cfg, fd)
        Lside = completed_ratio(form, HeckeCharacter(psi, n), afe_cfg).value
        if Lside <= noise_floor:
            out.append(WaldspurgerEntry(n, I, Lside, None, "below-noise-floor"))
            continue
        out.append(WaldspurgerEntry(n, I, Lside, I / Lside))
    return out
