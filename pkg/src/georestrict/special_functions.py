"""Gamma factors, analytic conductor, the quotient G(n) and the AFE weight V(y, x)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .quadfield import quad_field


class PoleError(ValueError):
    pass


class ContourError(ValueError):
    pass


def log_gamma_complex(z):
    """Principal branch of log Gamma(z); raises at nonpositive integers."""
    za = np.asarray(z, dtype=complex)
    bad = (za.imag == 0) & (za.real <= 0) & (za.real == np.round(za.real))
    if np.any(bad):
        raise PoleError(f"Gamma has a pole at {za[bad].ravel()[0]}")
    out = special.loggamma(za)
    return out if np.ndim(z) else complex(out)


def spectral_r(x, D: int):
    """r = pi x / log eps_D."""
    return math.pi * np.asarray(x, dtype=float) / quad_field(D).log_eps_f


@dataclass(frozen=True)
class GammaFactorParams:
    t: float
    D: int
    x: float

    @property
    def r(self) -> float:
        return float(spectral_r(self.x, self.D))


def log_gamma_s_f_x(s, t: float, r):
    """log of pi^{-2s} prod_{+-} Gamma((s + i(t +- r))/2) Gamma((s - i(t +- r))/2)."""
    s = np.asarray(s, dtype=complex)
    r = np.asarray(r, dtype=float)
    out = -2 * s * math.log(math.pi)
    for sgn in (1, -1):
        w = t + sgn * r
        out = out + log_gamma_complex((s + 1j * w) / 2) + log_gamma_complex((s - 1j * w) / 2)
    return out


def gamma_s_f_x(s, p: GammaFactorParams) -> complex:
    return complex(np.exp(log_gamma_s_f_x(s, p.t, p.r)))


def gamma_adjoint_1(t: float) -> float:
    """Gamma_R(2) Gamma_R(1 + 2it) Gamma_R(1 - 2it) = 1 / (pi cosh(pi t))."""
    return 1.0 / (math.pi * math.cosh(math.pi * t))


def log_gamma_adjoint_1(t: float) -> float:
    a = math.pi * abs(t)
    return -math.log(math.pi) - a - math.log1p(math.exp(-2 * a)) + math.log(2.0)


def log_gamma_R(s):
    """log Gamma_R(s) = -(s/2) log pi + log Gamma(s/2)."""
    s = np.asarray(s, dtype=complex)
    return -s / 2 * math.log(math.pi) + log_gamma_complex(s / 2)


def log_gamma_adjoint(s, t: float):
    """log of Gamma_R(s) Gamma_R(s + 2it) Gamma_R(s - 2it), the factor in the functional equation of L(s, Ad f)."""
    return log_gamma_R(np.asarray(s)) + log_gamma_R(np.asarray(s) + 2j * t) + log_gamma_R(np.asarray(s) - 2j * t)


def analytic_conductor(s, t, r):
    """(1 + (t + r)^2)(1 + (t - r)^2); the s-dependence is dropped (canonical representative)."""
    return (1 + (t + r) ** 2) * (1 + (t - r) ** 2)


def log_G_ratio(n, t: float, D: int):
    r = spectral_r(n, D)
    return np.real(log_gamma_s_f_x(0.5, t, r)) - log_gamma_adjoint_1(t)


def G_ratio(n, t: float, D: int):
    """gamma(1/2, f, n) / gamma(1, Ad f), evaluated in log space."""
    return np.exp(log_G_ratio(n, t, D))


# ---------------------------------------------------------------------------
# V(y, x)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VConfig:
    """Contour parameters for V.

    sigma = None picks a contour per y near the saddle of y^{-u} e^{u^2} gamma-ratio;
    a float pins the line Re u = sigma (the classical choice is 3).
    """

    sigma: float | None = None
    step: float | None = None
    tol: float = 1e-16
    sigma_grid: float = 0.25
    sigma_max: float = 8.0
    gauss: float = 1.0          # test function exp(gauss * u^2); 1 is the classical choice
    extra: dict = field(default_factory=dict, compare=False, hash=False)


DEFAULT_VCONFIG = VConfig()


def _log_F(u, t, r):
    return log_gamma_s_f_x(0.5 + u, t, r) - log_gamma_s_f_x(0.5, t, r)


def _log_X_of(logF) -> float:
    """Real derivative near u = 0 (taken at u = 1, away from poles) of log(gamma(s0 + u)/gamma(s0)): the natural scale of the weight."""
    h = 1e-5
    return float(np.real(logF(1 + h) - logF(1 - h)) / (2 * h))


def _log_X(t, r):
    return _log_X_of(lambda u: _log_F(u, t, r))


def _choose_sigma_lx(y, lx, cfg: VConfig):
    if cfg.sigma is not None:
        return np.full(np.shape(y), float(cfg.sigma))
    s = (np.log(y) - lx) / (2.0 * cfg.gauss)
    s = np.round(s / cfg.sigma_grid) * cfg.sigma_grid
    s = np.clip(s, cfg.sigma_grid, cfg.sigma_max)
    # small y: use the strip (-pole_gap, 0) and add the residue at u = 0
    return np.where(np.log(y) - lx < 0.5, -0.25, s)


def _choose_sigma(y, t, r, cfg: VConfig):
    return _choose_sigma_lx(y, _log_X(t, r), cfg)


def _check_sigma(sigma, pole_gap=0.5):
    if sigma == 0 or sigma <= -pole_gap or (pole_gap <= 0 and sigma < 0):
        raise ContourError(f"contour Re u = {sigma} meets a pole")


def _nodes(sigma, logF, cfg: VConfig, logy_max, pole_gap=0.5):
    """Trapezoid nodes v_j >= 0 and complex weights for the line Re u = sigma."""
    d = abs(sigma) if pole_gap <= 0 else min(abs(sigma), sigma + pole_gap)
    a = cfg.gauss
    h = cfg.step or min(0.05, 2 * math.pi * d / 45.0)
    # integrand modulus ~ exp(a (sigma^2 - v^2)) |F| y^{-sigma}: extend until negligible
    vmax = math.sqrt((a * sigma * sigma + 45.0 + 2 * abs(sigma) * abs(logy_max)) / a) + 2.0
    while True:
        v = np.arange(0.0, vmax + h, h)
        u = sigma + 1j * v
        lw = logF(u) + a * u * u
        tail = np.max(np.real(lw[-max(1, len(v) // 20):]))
        if tail < min(np.max(np.real(lw)) - 45.0, -45.0 - abs(sigma) * abs(logy_max)) or vmax > 1e4:
            break
        vmax *= 1.5
    w = np.exp(lw) / u
    w = w * h / math.pi
    w[0] *= 0.5
    return u, w


def afe_weight(y, logF, cfg: VConfig = None, pole_gap: float = 0.5, chunk: int = 8192):
    """(2 pi i)^{-1} int F(u) y^{-u} e^{u^2} du/u for a conjugate-symmetric log-ratio logF.

    logF(u) = log gamma(s0 + u) - log gamma(s0); its poles must satisfy Re u <= -pole_gap.
    Vectorised over y; returns a real array.
    """
    cfg = cfg or DEFAULT_VCONFIG
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y <= 0):
        raise ValueError("y must be positive")
    lx = _log_X_of(logF)
    sig = _choose_sigma_lx(y, lx, cfg)
    if cfg.sigma is None:
        if pole_gap <= 0:
            # poles on the imaginary axis: stay to the right of them
            sig = np.maximum(sig, cfg.sigma_grid)
        else:
            sig = np.where(sig < 0, -min(0.25, pole_gap / 2), sig)
    out = np.empty_like(y)
    ly = np.log(y)
    for s in np.unique(sig):
        _check_sigma(s, pole_gap)
        idx = np.nonzero(sig == s)[0]
        u, w = _nodes(s, logF, cfg, np.max(np.abs(ly[idx])), pole_gap)
        for c0 in range(0, idx.size, chunk):
            part = idx[c0:c0 + chunk]
            vals = np.real(np.exp(-np.outer(ly[part], u)) @ w)
            out[part] = vals + 1.0 if s < 0 else vals
    return out


def V(y, x, t: float, D: int, cfg: VConfig = DEFAULT_VCONFIG):
    """V_{1/2}(y, x) = (2 pi i)^{-1} int gamma(1/2+u, f, x)/gamma(1/2, f, x) y^{-u} e^{u^2} du/u.

    The integrand is conjugate-symmetric in Im u, so V is real.  Vectorised over y.
    """
    r = float(spectral_r(x, D))
    out = afe_weight(y, lambda u: _log_F(u, t, r), cfg)
    return out if out.size > 1 else float(out[0])


def V_quad(y: float, x, t: float, D: int, sigma: float | None = None) -> float:
    """Second rule: adaptive Gauss-Kronrod on the same contour (independent of the trapezoid grid)."""
    r = float(spectral_r(x, D))
    if sigma is None:
        sigma = float(_choose_sigma(np.array([y]), t, r, DEFAULT_VCONFIG)[0])
    _check_sigma(sigma)
    ly = math.log(y)

    def f(v):
        u = sigma + 1j * v
        return float(np.real(np.exp(_log_F(u, t, r) + u * u - u * ly) / u))

    vmax = math.sqrt(sigma * sigma + 45.0 + 2 * abs(sigma) * abs(ly)) + 2.0
    pts = np.linspace(0, vmax, 17)
    tot = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        tot += integrate.quad(f, a, b, epsabs=1e-15, epsrel=1e-13, limit=400)[0]
    val = tot / math.pi
    return val + 1.0 if sigma < 0 else val


def V_derivative(y, x: float, t: float, D: int, j: int, h: float | None = None,
                 cfg: VConfig = DEFAULT_VCONFIG):
    """j-th derivative of V(y, x) in x by central finite differences; vectorised over y."""
    if j == 0:
        return V(y, x, t, D, cfg)
    h = h or 0.05 * max(1.0, abs(quad_field(D).c_D_f * t - x)) ** 0.5
    if h < 1e-8:
        raise ValueError("finite-difference step underflow")
    ks = np.arange(-j, j + 1, 2)
    coeff = np.array([math.comb(j, (k + j) // 2) * (-1) ** ((j - k) // 2) for k in ks], dtype=float)
    vals = np.array([np.atleast_1d(V(y, x + k * h / 2, t, D, cfg)) for k in ks])
    out = coeff @ vals / h ** j
    return out if out.size > 1 else float(out[0])


def V_derivative_sup(x: float, t: float, D: int, j: int, y_grid=None) -> float:
    """sup over a logarithmic y-grid of |d^j V / dx^j|: the quantity the uniform-in-y bound controls."""
    y_grid = np.logspace(-1, 6, 36) if y_grid is None else np.asarray(y_grid, dtype=float)
    return float(np.max(np.abs(np.atleast_1d(V_derivative(y_grid, x, t, D, j)))))


@dataclass
class DerivativeReport:
    j: int
    T: float
    value: float
    bound_unit: float
    ratio: float
    passed: bool | None = None


def V_derivative_check(y: float, x: float, t: float, D: int, j: int, T: float,
                       eps: float = 0.1, C: float | None = None) -> DerivativeReport:
    """Compare |d^j V / dx^j| against y^{-eps/4} t^eps T^{-j}; ratio = measured / bound shape."""
    cD = quad_field(D).c_D_f
    if not (T / 2 <= abs(cD * t - x) <= 2 * T):
        raise ValueError("need T/2 <= |c_D t - x| <= 2T")
    val = abs(V_derivative(y, x, t, D, j))
    unit = y ** (-eps / 4) * t ** eps * T ** (-j) if j else 1.0
    ratio = val / unit
    return DerivativeReport(j, T, val, unit, ratio, None if C is None else ratio <= C)


def gamma_tail_sum(t: float, D: int, exponent: float = 0.26, rel_tol: float = 1e-18) -> float:
    """sum_{|n| > c_D t} G(n) q_infty(n)^exponent, summed until the terms are negligible."""
    cD = quad_field(D).c_D_f
    n0 = math.floor(cD * t) + 1
    total = 0.0
    block = max(64, int(4 * cD * t))
    while True:
        n = np.arange(n0, n0 + block)
        r = spectral_r(n, D)
        lt = log_G_ratio(n, t, D) + exponent * np.log(analytic_conductor(0.5, t, r))
        terms = 2 * np.exp(lt)  # n and -n contribute equally
        total += float(terms.sum())
        if terms[-1] < rel_tol * total:
            return total
        n0 += block
