"""Maass form data, central values L(1/2, f x theta_chi) and L(1, Ad f) by approximate functional equations."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Literal

import numpy as np
from sympy import primerange

from .hecke import ClassCharacter, HeckeCharacter, class_characters, kronecker_table, theta_table
from .quadfield import elements_in_region, narrow_class_group, quad_field
from .special_functions import (
    VConfig,
    afe_weight,
    analytic_conductor,
    log_G_ratio,
    log_gamma_adjoint,
    log_gamma_s_f_x,
    spectral_r,
)


class SchemaError(ValueError):
    pass


class HeckeRelationError(ValueError):
    pass


class InsufficientCoefficients(ValueError):
    def __init__(self, required: int, available: int):
        super().__init__(f"need coefficients up to N = {required}, file provides {available}")
        self.required = required
        self.available = available


# ---------------------------------------------------------------------------
# Maass form data
# ---------------------------------------------------------------------------

@dataclass
class MaassForm:
    t: float
    parity: Literal["even", "odd"]
    coefficients: np.ndarray  # coefficients[n] = lambda_f(n); index 0 unused
    level: int = 1
    source: str = ""
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def N(self) -> int:
        return len(self.coefficients) - 1

    def truncated(self, N: int) -> "MaassForm":
        return MaassForm(self.t, self.parity, self.coefficients[: N + 1].copy(), self.level, self.source)


def hecke_defect(lam: np.ndarray, m: int, n: int) -> float:
    """|lambda(m) lambda(n) - sum_{d | (m, n)} lambda(mn/d^2)|."""
    g = math.gcd(m, n)
    rhs = sum(lam[m * n // (d * d)] for d in range(1, g + 1) if g % d == 0)
    return abs(lam[m] * lam[n] - rhs)


def validate_coefficients(lam: np.ndarray, tol: float = 1e-8, pairs: int = 100, seed: int = 0) -> float:
    if abs(lam[1] - 1) > 1e-12:
        raise HeckeRelationError(f"lambda(1) = {lam[1]} is not 1")
    N = len(lam) - 1
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(pairs):
        m = int(rng.integers(1, max(2, int(math.isqrt(N))) + 1))
        n = int(rng.integers(1, max(2, N // m) + 1))
        if m * n > N:
            continue
        worst = max(worst, hecke_defect(lam, m, n))
    if worst > tol:
        raise HeckeRelationError(f"Hecke relations fail: defect {worst:.2e} > {tol:.0e}")
    return worst


def form_from_coefficients(t: float, parity: str, coeffs, source: str = "", level: int = 1,
                           validate: bool = True) -> MaassForm:
    lam = np.concatenate([[0.0], np.asarray(coeffs, dtype=float)])
    if validate:
        validate_coefficients(lam)
    return MaassForm(float(t), parity, lam, level, source)


def load_maass_form(path, validate: bool = True) -> MaassForm:
    """Read {level, spectral_parameter, parity, coefficients, provenance} and validate it."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON") from exc
    for key, typ in (("level", int), ("spectral_parameter", (int, float)), ("parity", str),
                     ("coefficients", list), ("provenance", str)):
        if key not in doc or not isinstance(doc[key], typ):
            raise SchemaError(f"{path}: missing or malformed field {key!r}")
    if doc["level"] != 1:
        raise SchemaError("only level-one forms are supported")
    if doc["parity"] not in ("even", "odd"):
        raise SchemaError("parity must be 'even' or 'odd'")
    if not doc["provenance"].strip():
        raise SchemaError("provenance string is mandatory")
    if doc["spectral_parameter"] <= 0 or len(doc["coefficients"]) < 2:
        raise SchemaError("need t > 0 and at least two coefficients")
    return form_from_coefficients(doc["spectral_parameter"], doc["parity"], doc["coefficients"],
                                  doc["provenance"], doc["level"], validate)


def save_maass_form(form: MaassForm, path) -> None:
    doc = {"level": form.level, "spectral_parameter": form.t, "parity": form.parity,
           "coefficients": [float(x) for x in form.coefficients[1:]], "provenance": form.source}
    Path(path).write_text(json.dumps(doc))


# ---------------------------------------------------------------------------
# Configuration and results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AFEConfig:
    delta: float = 0.1
    c: float = 1.0
    v_tol: float = 1e-13        # use coefficients until the weight drops below this
    vcfg: VConfig = field(default_factory=VConfig)


@dataclass(frozen=True)
class VerificationConfig:
    theta: float = 7 / 64
    eps: float = 0.05
    delta: float = 0.1
    fitted: dict = field(default_factory=dict, hash=False, compare=False)


@dataclass
class LValueResult:
    value: float
    truncation: int
    error: float
    q_infty: float
    imag: float = 0.0
    meta: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _V_table(t: float, D: int, x: float, K: int, vcfg: VConfig) -> np.ndarray:
    """V(k/D, x) for k = 0..K (entry 0 unused)."""
    r = float(spectral_r(x, D))
    y = np.arange(1, K + 1) / D
    out = np.zeros(K + 1)
    out[1:] = afe_weight(y, lambda u: log_gamma_s_f_x(0.5 + u, t, r) - log_gamma_s_f_x(0.5, t, r), vcfg)
    return out


def weight_cutoff(t: float, D: int, x: float, tol: float, vcfg: VConfig, kmax: int = 10 ** 9) -> int:
    """Smallest K (on a geometric grid) with |V(k/D, x)| < tol for all k >= K."""
    r = float(spectral_r(x, D))
    ks = np.unique(np.geomspace(1, kmax, 400).astype(np.int64))
    v = np.abs(afe_weight(ks / D, lambda u: log_gamma_s_f_x(0.5 + u, t, r) - log_gamma_s_f_x(0.5, t, r), vcfg))
    above = np.nonzero(v >= tol)[0]
    return int(ks[min(above[-1] + 1, len(ks) - 1)]) if above.size else 1


def _tail_estimate(t, D, x, K, rms, vcfg) -> float:
    """2 zeta(2) rms int_K^inf |V(k/D)| k^{-1/2} dk: size of the neglected m^2 n > K terms."""
    r = float(spectral_r(x, D))
    ks = np.geomspace(K, K * 1e6, 600)
    v = np.abs(afe_weight(ks / D, lambda u: log_gamma_s_f_x(0.5 + u, t, r) - log_gamma_s_f_x(0.5, t, r), vcfg))
    integral = float(np.trapezoid(v / np.sqrt(ks), ks))
    return 2 * (math.pi ** 2 / 6) * rms * integral


# ---------------------------------------------------------------------------
# L(1/2, f x theta)
# ---------------------------------------------------------------------------

def rankin_selberg_sum(lam_f: np.ndarray, lam_theta: np.ndarray, D: int, Vtab: np.ndarray) -> complex:
    """2 sum_m chi_D(m)/m sum_n lam_f(n) lam_theta(n)/sqrt(n) V(m^2 n / D), over m^2 n <= K."""
    K = len(Vtab) - 1
    K = min(K, len(lam_f) - 1, len(lam_theta) - 1)
    chi = kronecker_table(D, math.isqrt(K))
    a = np.zeros(K + 1, dtype=complex)
    n = np.arange(1, K + 1)
    a[1:] = lam_f[1:K + 1] * lam_theta[1:K + 1] / np.sqrt(n)
    total = 0j
    for m in range(1, math.isqrt(K) + 1):
        if chi[m] == 0:
            continue
        nn = np.arange(1, K // (m * m) + 1)
        total += chi[m] / m * np.sum(a[nn] * Vtab[m * m * nn])
    return 2 * total


def _required_M(t: float, r: float, cfg: AFEConfig) -> int:
    q = analytic_conductor(0.5, t, r)
    return int(math.ceil(cfg.c * q ** (0.5 + cfg.delta)))


def rankin_selberg_central(f: MaassForm, chi: HeckeCharacter, variant: str = "plain",
                           cfg: AFEConfig = AFEConfig(), K: int | None = None) -> LValueResult:
    """L(1/2, f x theta_chi) with the theta coefficients of the given variant.

    The sign-weighted coefficients equal the plain ones divided by i on m > 0; the Hecke
    eigenvalue entering the Dirichlet series is i times them, i.e. the plain coefficient.
    """
    if variant not in ("plain", "sign-weighted"):
        raise ValueError(f"unknown variant {variant!r}")
    D, t, x = chi.D, f.t, chi.n
    r = float(spectral_r(x, D))
    q = analytic_conductor(0.5, t, r)
    need = _required_M(t, r, cfg)
    if f.N < need:
        raise InsufficientCoefficients(need, f.N)
    if K is None:
        K = min(f.N, weight_cutoff(t, D, x, cfg.v_tol, cfg.vcfg))
    K = max(K, 1)
    Vtab = _V_table(float(t), D, float(x), K, cfg.vcfg)
    lt = theta_table(chi, K, "plain")
    if variant == "sign-weighted":
        lt = 1j * theta_table(chi, K, "sign-weighted")
    val = rankin_selberg_sum(f.coefficients, lt, D, Vtab)
    prod = f.coefficients[1:K + 1] * np.abs(lt[1:K + 1])
    rms = float(np.sqrt(np.mean(prod ** 2)))
    err = _tail_estimate(t, D, x, K, rms, cfg.vcfg) + 1e-13 * max(1.0, abs(val))
    return LValueResult(float(val.real), K, err, float(q), float(val.imag),
                        {"D": D, "n": x, "psi": chi.psi.e, "variant": variant})


# ---------------------------------------------------------------------------
# Generic self-dual AFE and L(1, Ad f)
# ---------------------------------------------------------------------------

# a narrow Gaussian makes the weights decay quickly in n; sigma_max is raised to follow the saddle
GENERIC_VCONFIG = VConfig(gauss=0.1, sigma_max=40.0)


def afe_L_value(a: np.ndarray, log_gamma: Callable, Q: float, s: float = 1.0, X: float = 1.0,
                gap_s: float = 0.5, gap_dual: float = 0.0, vcfg: VConfig = None) -> float:
    """L(s) for Lambda(s) = Q^{s/2} gamma(s) L(s) = Lambda(1 - s) with real coefficients a[1..N].

    L(s) = sum a(n) n^{-s} W_s(n/(X sqrt Q)) + Q^{1/2-s} sum a(n) n^{s-1} K(n X / sqrt Q), where
    W_s uses gamma(s+u)/gamma(s) and K uses gamma(1-s+u)/gamma(s).  X is a free balancing parameter.
    """
    vcfg = vcfg or GENERIC_VCONFIG
    N = len(a) - 1
    n = np.arange(1, N + 1, dtype=float)
    sq = math.sqrt(Q)
    ls = complex(log_gamma(s)).real
    W = afe_weight(n / (X * sq), lambda u: log_gamma(s + u) - log_gamma(s), vcfg, pole_gap=gap_s)
    Kd = afe_weight(n * X / sq, lambda u: log_gamma(1 - s + u) - ls, vcfg, pole_gap=gap_dual)
    first = np.sum(a[1:] * n ** (-s) * W)
    second = Q ** (0.5 - s) * np.sum(a[1:] * n ** (s - 1) * Kd)
    return float(first + second)


def multiplicative_table(N: int, local: Callable[[int, int], np.ndarray]) -> np.ndarray:
    """Multiplicative a(n), n <= N, from local(p, K) = [a(p^0), ..., a(p^K)]."""
    a = np.zeros(N + 1)
    a[1] = 1.0
    for p in primerange(2, N + 1):
        p = int(p)
        K = int(math.log(N) / math.log(p) + 1e-9)
        loc = local(p, K)
        base = np.arange(1, N // p + 1)
        cop = base[base % p != 0]
        pk = p
        for k in range(1, K + 1):
            if pk > N:
                break
            idx = cop[cop * pk <= N]
            a[idx * pk] = a[idx] * loc[k]
            pk *= p
    return a


def adjoint_coefficients(lam: np.ndarray, N: int | None = None) -> np.ndarray:
    """Dirichlet coefficients of L(s, Ad f) = L(s, sym^2 f) for level one."""
    N = N or len(lam) - 1

    def local(p, K):
        e = lam[p] ** 2 - 1
        out = np.zeros(K + 1)
        out[0] = 1.0
        for k in range(1, K + 1):
            out[k] = e * (out[k - 1] - (out[k - 2] if k >= 2 else 0.0)) + (out[k - 3] if k >= 3 else 0.0)
        return out

    return multiplicative_table(N, local)


ADJOINT_TERMS = 20000  # the weights are below 1e-16 well before this for t < 50


def adjoint_L_1(f: MaassForm, X: float = 1.0, N: int | None = None) -> float:
    """L(1, Ad f) from its approximate functional equation (conductor 1, root number 1)."""
    N = min(N or ADJOINT_TERMS, f.N)
    key = ("adjoint", float(X), N)
    if key not in f.cache:
        a = adjoint_coefficients(f.coefficients, N)
        val = afe_L_value(a, lambda s: log_gamma_adjoint(s, f.t), 1.0, 1.0, X, gap_s=1.0, gap_dual=0.0)
        if not val > 0:
            raise ArithmeticError(f"non-positive L(1, Ad f) = {val}: coefficient data or truncation problem")
        f.cache[key] = val
    return f.cache[key]


def completed_ratio(f: MaassForm, chi: HeckeCharacter, cfg: AFEConfig = AFEConfig()) -> LValueResult:
    """sqrt(D) G(n) L(1/2, f x theta_chi) / L(1, Ad f)."""
    L = rankin_selberg_central(f, chi, "plain", cfg)
    G = float(np.exp(log_G_ratio(chi.n, f.t, chi.D)))
    A = adjoint_L_1(f)
    s = math.sqrt(chi.D) * G / A
    return LValueResult(s * L.value, L.truncation, s * L.error, L.q_infty,
                        meta={**L.meta, "G": G, "L_half": L.value, "L_ad": A,
                              "gamma_adjoint": "Gamma_R(s)Gamma_R(s+2it)Gamma_R(s-2it)"})


# ---------------------------------------------------------------------------
# The windowed sums on both sides of the character-orthogonality identity
# ---------------------------------------------------------------------------

def window_n_values(k: int, t: float, D: int) -> tuple[np.ndarray, np.ndarray]:
    """Integers n with W_k(n) U(n) != 0 and the weights W_k(n) U(n)."""
    from .analysis import bump_U, window_W_k, window_support

    lo, hi = window_support(k, t, D)
    n = np.arange(math.ceil(lo), math.floor(hi) + 1)
    w = window_W_k(n, k, t, D) * bump_U(n, t, D)
    keep = w != 0
    return n[keep], w[keep]


@dataclass
class WindowedSums:
    lhs: float
    rhs: float
    lhs_error: float
    K: int
    n_values: list
    terms: dict


def windowed_lvalue_sum(f: MaassForm, D: int, k: int, K: int, cfg: AFEConfig = AFEConfig()):
    """(Tt)^{-1/2} sum_psi sum_n W_k(n) U(n) L(1/2, f x theta_{psi,n}), each L truncated at m^2 n <= K."""
    T = 2.0 ** k
    ns, ws = window_n_values(k, f.t, D)
    total = 0.0
    err = 0.0
    terms = {}
    for n, w in zip(ns, ws):
        for psi in class_characters(D):
            res = rankin_selberg_central(f, HeckeCharacter(psi, int(n)), "plain", cfg, K=K)
            terms[(psi.e, int(n))] = res.value
            total += w * res.value
            err += w * res.error
    s = (T * f.t) ** -0.5
    return s * total, s * err, [int(n) for n in ns], terms


def reduced_afe_sum(f: MaassForm, D: int, k: int, K: int | None = None, cfg: AFEConfig = AFEConfig(),
                    lam_override: np.ndarray | None = None) -> float:
    """2 |H+| sum_m chi_D(m)/m sum_{alpha in F_D, m^2 |N alpha| <= K} lambda_f(|N|)/sqrt|N| Pi_alpha(m).

    The default K = (Tt)^{1+delta} is the natural truncation of the reduced sum;
    passing the K used on the L-value side makes both sides share one truncation.
    """
    T = 2.0 ** k
    if K is None:
        K = int((T * f.t) ** (1 + cfg.delta))
    lam = f.coefficients if lam_override is None else lam_override
    if K > len(lam) - 1:
        raise InsufficientCoefficients(K, len(lam) - 1)
    F = quad_field(D)
    G = narrow_class_group(D)
    alphas = elements_in_region(F, (1, K))
    N = np.array([a.norm() for a in alphas], dtype=np.int64)
    theta = np.array([float(F.ratio_exponent(a, 30)) for a in alphas]) * F.log_eps_f  # log(alpha/alpha*)
    ns, ws = window_n_values(k, f.t, D)
    chi = kronecker_table(D, math.isqrt(K))
    total = 0j
    for n, w in zip(ns, ws):
        Vtab = _V_table(float(f.t), D, float(n), K, cfg.vcfg)
        ph = np.exp(1j * math.pi * n / F.log_eps_f * theta)
        base = lam[N] / np.sqrt(N) * ph
        for m in range(1, math.isqrt(K) + 1):
            if chi[m] == 0:
                continue
            sel = N * m * m <= K
            total += w * chi[m] / m * np.sum(base[sel] * Vtab[m * m * N[sel]])
    return float((2 * G.h_plus * (T * f.t) ** -0.5 * total).real)


def character_orthogonality_check(f: MaassForm, D: int, k: int, K: int | None = None,
                                  cfg: AFEConfig = AFEConfig()) -> WindowedSums:
    """Both sides of the identity with a common truncation m^2 n <= K.

    With theta coefficients normalised by lambda_theta(1) = 1/2 the left side equals half the right.
    """
    if K is None:
        ns, _ = window_n_values(k, f.t, D)
        K = min(f.N, max(weight_cutoff(f.t, D, float(n), cfg.v_tol, cfg.vcfg) for n in ns))
    lhs, err, ns, terms = windowed_lvalue_sum(f, D, k, K, cfg)
    rhs = reduced_afe_sum(f, D, k, K, cfg)
    return WindowedSums(lhs, rhs, err, K, ns, terms)
