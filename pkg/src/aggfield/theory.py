"""Covariances of the finite field and of its Gaussian limits.

Finite-n quantities are computed exactly up to quadrature over the
persistence law: given ``U = u`` a walk with ``rho = 1 - u`` has
``Cov(e_i, e_j) = rho**|i-j|``, so the field covariance factorises into
one-dimensional pieces (:func:`axis_cov`) that are then averaged with
:func:`aggfield.persistence.expect_product`.

Limit quantities at the critical speed are built from the spectral density

    Psi(theta) = E_{r, w} prod_k 2 lam_k / (lam_k**2 + theta_k**2),
    lam_k = (r w_k)**(-1/alpha_k),

against ``r**-2 dr`` times the angular measure. :func:`cov_G` integrates
it in frequency, :func:`cov_G_kernel` uses the equivalent time-domain
kernel and serves as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from . import persistence as ps
from ._quadrature import DEFAULT_ORDER, dyadic_edges, panel_rule
from .angular import AngularMeasure
from .errors import ConfigError, QuadratureError

# --- fractional Brownian motion and sheet -----------------------------------


def fbm_cov(H: float, s: float, t: float) -> float:
    if not 0.0 < H <= 1.0:
        raise ConfigError(f"Hurst index H={H!r} must lie in (0, 1]")
    if s < 0 or t < 0:
        raise ConfigError(f"fbm_cov needs s, t >= 0, got {s!r}, {t!r}")
    if H == 1.0:
        return float(s * t)
    h2 = 2.0 * H
    return 0.5 * (s**h2 + t**h2 - abs(s - t) ** h2)


def fbs_cov(H1: float, H2: float, s, t) -> float:
    """Covariance of the fractional Brownian sheet; ``H = 1`` gives ``s * t``."""
    return fbm_cov(H1, s[0], t[0]) * fbm_cov(H2, s[1], t[1])


def sigma_independent(H1: float, H2: float) -> float:
    """Scale ``sigma`` (not squared) of the limit sheet for independent persistence."""
    out = 1.0
    for H in (H1, H2):
        if not 0.5 < H < 1.0:
            raise ConfigError(f"H={H!r} must lie in (1/2, 1)")
        out *= special.gamma(3.0 - 2.0 * H) / (H * (2.0 * H - 1.0))
    return math.sqrt(out)


def harmonizable_constant(H: float) -> float:
    """``C_H = pi / (H Gamma(2H) sin(H pi))``."""
    if not 0.0 < H < 1.0:
        raise ConfigError(f"H={H!r} must lie in (0, 1)")
    return math.pi / (H * special.gamma(2.0 * H) * math.sin(H * math.pi))


def c_frak(H: float) -> float:
    """``B(H - 1/2, 3/2 - H) * C_H``."""
    if not 0.5 < H < 1.0:
        raise ConfigError(f"H={H!r} must lie in (1/2, 1)")
    return special.beta(H - 0.5, 1.5 - H) * harmonizable_constant(H)


# --- one axis given the persistence ------------------------------------------


def _series_F(a, u):
    # F(a) = -a + 2 sum_j (-u)^j C(a+1, j+2), exact polynomial in u
    term = 0.5 * a * (a + 1.0)
    total = term.copy()
    for j in range(60):
        term = term * (-u) * (a - 1.0 - j) / (j + 3.0)
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return 2.0 * total - a


def axis_var(a, u):
    """``Var(e_1 + ... + e_a)`` for a stationary walk with ``rho = 1 - u``.

    Broadcasts ``a`` (integers >= 0) against ``u`` in ``(0, 1]``.
    """
    a, u = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(u, dtype=float))
    out = np.empty(a.shape)
    small = a * u < 0.1
    if np.any(~small):
        aa, uu = a[~small], u[~small]
        with np.errstate(divide="ignore"):
            rho_a = np.exp(aa * np.log1p(-uu))
        out[~small] = aa * (2.0 - uu) / uu - 2.0 * (1.0 - uu) * (1.0 - rho_a) / uu**2
    if np.any(small):
        out[small] = _series_F(a[small], u[small])
    return out


def axis_cov(a, b, u):
    """``Cov(S_a, S_b)`` of one walk given ``U = u``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return 0.5 * (axis_var(a, u) + axis_var(b, u) - axis_var(np.abs(a - b), u))


def _floor_index(n, s):
    return int(math.floor(n * s * (1.0 + 1e-12)))


def _index_pairs(n, s, t):
    for x in (*s, *t):
        if not 0.0 <= x <= 1.0:
            raise ConfigError(f"time point {x!r} lies outside [0, 1]")
    n1, n2 = int(n[0]), int(n[1])
    if n1 < 1 or n2 < 1:
        raise ConfigError(f"lengths n={n!r} must be positive")
    return ((_floor_index(n1, s[0]), _floor_index(n1, t[0])),
            (_floor_index(n2, s[1]), _floor_index(n2, t[1])))


def exact_cov_Sn(n, s, t, law: ps.PersistenceLaw, rtol: float = 1e-8) -> float:
    """Exact ``Cov(S_n(s), S_n(t))`` of one copy of the field.

    Given ``U`` the covariance is a product of :func:`axis_cov` factors;
    those are averaged over the persistence law. Cost does not grow with
    ``n``. Empty index ranges give 0.
    """
    (a1, b1), (a2, b2) = _index_pairs(n, s, t)
    if min(a1, b1, a2, b2) == 0:
        return 0.0
    value, _ = ps.expect_product(
        law,
        lambda u: axis_cov(a1, b1, u),
        lambda u: axis_cov(a2, b2, u),
        u_floor=1.0 / max(a1, b1, a2, b2),
        rtol=rtol,
    )
    return float(value)


def exact_cov_Sn_given_q(n, s, t, q) -> float:
    """Covariance conditional on a pinned persistence pair ``q``."""
    (a1, b1), (a2, b2) = _index_pairs(n, s, t)
    u1, u2 = 2.0 * (1.0 - q[0]), 2.0 * (1.0 - q[1])
    if not (0.0 < u1 <= 1.0 and 0.0 < u2 <= 1.0):
        raise ConfigError(f"q={q!r} must lie in [1/2, 1)^2")
    return float(axis_cov(a1, b1, u1) * axis_cov(a2, b2, u2))


# --- spectral side of the finite field ----------------------------------------


def spectral_kernel(u, theta):
    """Spectral density of ``rho**|l|`` at ``theta``, with ``rho = 1 - u``."""
    u = np.asarray(u, dtype=float)
    half = np.sin(0.5 * np.asarray(theta, dtype=float))
    return u * (2.0 - u) / (u * u + 4.0 * (1.0 - u) * half * half)


def r_hat(theta, law: ps.PersistenceLaw, rtol: float = 1e-8) -> float:
    """Spectral density of the single-copy field at ``theta``; both entries nonzero."""
    th1, th2 = abs(float(theta[0])), abs(float(theta[1]))
    if th1 == 0.0 or th2 == 0.0:
        raise ConfigError(f"r_hat is defined off the axes, got theta={theta!r}")
    value, _ = ps.expect_product(
        law,
        lambda u: spectral_kernel(u, th1),
        lambda u: spectral_kernel(u, th2),
        u_floor=min(th1, th2, 1.0),
        rtol=rtol,
    )
    return float(value)


def _re_dirichlet(a, b, theta):
    # Re(D_a conj D_b) with D_a = sum_{j=1}^a exp(i j theta)
    half = 0.5 * theta
    return (np.sin(a * half) * np.sin(b * half) * np.cos((a - b) * half)
            / np.sin(half) ** 2)


def _axis_spectral_once(a, b, u, order):
    top = max(a, b)
    width = math.pi / top
    count = max(int(math.ceil((math.pi - width) / width)), 1)
    upper = np.linspace(width, math.pi, count + 1)
    lower = dyadic_edges(1e-4 / top, width, include_zero=False)
    edges = np.concatenate([upper, lower])
    theta, wt = panel_rule(edges, order)
    floor = float(edges.min())
    weights = wt * _re_dirichlet(a, b, theta)
    body = np.empty(u.shape)
    step = max(1, (1 << 22) // theta.size)
    for lo in range(0, u.size, step):
        chunk = u[lo:lo + step]
        body[lo:lo + step] = spectral_kernel(chunk[:, None], theta[None, :]) @ weights
    # below the floor D is flat at a*b and the kernel integrates in closed form
    with np.errstate(divide="ignore"):
        head = a * b * 2.0 * np.arctan((2.0 - u) / u * math.tan(0.5 * floor))
    return (body + head) / math.pi


def axis_cov_spectral(a: int, b: int, u, rtol: float = 1e-9):
    """:func:`axis_cov` recomputed as a frequency integral over ``(0, pi)``."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if a == 0 or b == 0:
        return np.zeros(u.shape)
    coarse = _axis_spectral_once(a, b, u, 24)
    fine = _axis_spectral_once(a, b, u, 48)
    err = np.abs(fine - coarse)
    if np.any(err > rtol * np.abs(fine) + 1e-12 * a * b):
        raise QuadratureError("frequency integral of the axis covariance missed tolerance",
                              value=fine, error=err)
    return fine


def parseval_cov_Sn(n, s, t, law: ps.PersistenceLaw, rtol: float = 1e-8) -> float:
    """``Cov(S_n(s), S_n(t))`` from the frequency-domain representation.

    Integrates ``D_s conj D_t * r_hat`` over ``(-pi, pi)^2``. Only the real
    parts survive the symmetry ``theta_k -> -theta_k``; the frequency
    integral is carried out per axis inside the expectation over ``U``.
    """
    (a1, b1), (a2, b2) = _index_pairs(n, s, t)
    if min(a1, b1, a2, b2) == 0:
        return 0.0
    value, _ = ps.expect_product(
        law,
        lambda u: axis_cov_spectral(a1, b1, u),
        lambda u: axis_cov_spectral(a2, b2, u),
        u_floor=1.0 / max(a1, b1, a2, b2),
        rtol=rtol,
    )
    return float(value)


# --- limit field at the critical speed ----------------------------------------


def _check_alpha(alpha):
    a1, a2 = float(alpha[0]), float(alpha[1])
    for a in (a1, a2):
        if not 0.0 < a < 2.0:
            raise ConfigError(f"alpha={alpha!r} must lie in (0, 2)^2")
    return a1, a2


def psi(theta, alpha, angular: AngularMeasure, rtol: float = 1e-6) -> float:
    """Spectral density ``Psi`` of the critical-speed limit field.

    The ``r``-integral is done in ``x = log r`` by adaptive quadrature,
    split at the crossovers ``lam_k(r) = |theta_k|`` of each factor.
    """
    a1, a2 = _check_alpha(alpha)
    th1, th2 = abs(float(theta[0])), abs(float(theta[1]))
    if th1 == 0.0 or th2 == 0.0:
        raise ConfigError(f"psi needs both frequencies nonzero, got {theta!r}")
    w1s, weights = angular.nodes()
    total, err_total = 0.0, 0.0
    for w1, p in zip(w1s, weights):
        w2 = 1.0 - w1
        l1w, l2w = math.log(w1), math.log(w2)
        lt1, lt2 = 2.0 * math.log(th1), 2.0 * math.log(th2)

        def f(x):
            # log of 2 lam / (lam^2 + theta^2) = log 2 - logaddexp(l, log theta^2 - l)
            l1 = -(x + l1w) / a1
            l2 = -(x + l2w) / a2
            return math.exp(math.log(4.0) - x - np.logaddexp(l1, lt1 - l1)
                            - np.logaddexp(l2, lt2 - l2))

        cross = sorted((-a1 * math.log(th1) - l1w, -a2 * math.log(th2) - l2w))
        pieces = [(-np.inf, cross[0]), (cross[0], cross[1]), (cross[1], np.inf)]
        for lo, hi in pieces:
            if lo == hi:
                continue
            val, err = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=0.1 * rtol, limit=200)
            total += p * val
            err_total += p * err
    if not err_total <= rtol * abs(total):
        raise QuadratureError(f"psi{tuple(theta)} missed rtol={rtol}", value=total,
                              error=err_total)
    return total


@lru_cache(maxsize=32)
def psi_envelope(alpha, angular: AngularMeasure, margin: float = 1.1):
    """Fit ``C`` in ``Psi(theta) <= C |theta1 theta2|**beta``, ``beta = 1/p - 1``.

    Both sides scale alike along ``theta -> (c**(1/alpha1) theta1,
    c**(1/alpha2) theta2)``, and every orbit crosses ``theta1 = 1``, so the
    supremum is taken over ``Psi(1, t) / t**beta`` on a log-grid in ``t``
    (``2**-12 .. 2**12``) and inflated by ``margin``. Returns ``(C, beta)``.
    """
    a1, a2 = _check_alpha(alpha)
    beta = 1.0 / (1.0 / a1 + 1.0 / a2) - 1.0
    ts = 2.0 ** np.arange(-12.0, 12.5, 1.0)
    ratios = [psi((1.0, t), alpha, angular, rtol=1e-4) / t**beta for t in ts]
    return margin * max(ratios), beta


def _lam_value(lam, a):
    # F_lam(a) = 2a/lam - 2(1 - exp(-lam a))/lam^2 = a^2 phi(lam a)
    x = lam * a
    out = np.empty(np.shape(x))
    small = x < 0.1
    xs = x[small]
    coef = [2.0 / math.factorial(j + 2) * (-1) ** j for j in range(10)]
    out[small] = np.polyval(coef[::-1], xs)
    xl = x[~small]
    out[~small] = 2.0 * (xl + np.expm1(-xl)) / (xl * xl)
    return a * a * out


def limit_kernel(lam, s, t):
    """Time-domain kernel ``K_lam(s, t)`` of one axis (``Cov`` of an OU-type integral)."""
    lam = np.asarray(lam, dtype=float)
    return 0.5 * (_lam_value(lam, s) + _lam_value(lam, t) - _lam_value(lam, abs(s - t)))


def _log_limit_kernel(log_lam, s, t):
    # for huge lam the kernel is 2 min(s, t) / lam up to a relative 1e-13
    lo = min(s, t)
    if log_lam > math.log(1e13 / lo):
        return math.log(2.0 * lo) - log_lam
    value = float(limit_kernel(np.array([math.exp(log_lam)]), s, t)[0])
    return math.log(value) if value > 0 else -math.inf


def cov_G_kernel(s, t, alpha, angular: AngularMeasure, rtol: float = 1e-8) -> float:
    """``Cov(G_s, G_t)`` by the time-domain route.

    Each frequency integral against ``2 lam / (lam**2 + theta**2)`` has a
    closed form, leaving
    ``int int prod_k K_{lam_k}(s_k, t_k) r**-2 dr Lambda(dw)``.
    """
    a1, a2 = _check_alpha(alpha)
    s = tuple(float(x) for x in s)
    t = tuple(float(x) for x in t)
    if min(s[0], t[0], s[1], t[1]) == 0.0:
        return 0.0
    w1s, weights = angular.nodes()
    total, err_total = 0.0, 0.0
    for w1, p in zip(w1s, weights):
        w2 = 1.0 - w1

        def f(x):
            return math.exp(_log_limit_kernel(-(x + math.log(w1)) / a1, s[0], t[0])
                            + _log_limit_kernel(-(x + math.log(w2)) / a2, s[1], t[1]) - x)

        mid = -math.log(min(w1, w2))
        val = 0.0
        for lo, hi in ((-np.inf, mid), (mid, np.inf)):
            v, e = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=0.1 * rtol, limit=400)
            val += v
            err_total += p * e
        total += p * val
    if not err_total <= rtol * abs(total):
        raise QuadratureError(f"cov_G_kernel missed rtol={rtol}", value=total, error=err_total)
    return total


_CHUNK = 2**22
_MAX_THETA_PANELS = 20_000


@dataclass(frozen=True)
class CovGResult:
    value: float
    error: float
    tail_bound: float
    theta_max: tuple[float, float]
    envelope: float


def _axis_theta_rule(s, t, theta_max, order):
    top = max(s, t)
    width = math.pi / top
    upper = np.arange(width, theta_max + 0.5 * width, width)
    upper = upper if upper.size > 1 else np.array([width, max(theta_max, 2 * width)])
    lower = dyadic_edges(1e-4 / top, width, include_zero=False)
    edges = np.concatenate([upper, lower])
    theta, wt = panel_rule(edges, order)
    re_d = (4.0 * np.sin(0.5 * s * theta) * np.sin(0.5 * t * theta)
            * np.cos(0.5 * (s - t) * theta) / theta**2)
    return theta, wt * re_d, float(edges.min()), float(edges.max())


def _radial_rule(w1, alpha, lam_lo, lam_hi, order):
    # x = log r over the range where both lam_k lie in [lam_lo_k, lam_hi_k]
    xs = []
    for k, w in enumerate((w1, 1.0 - w1)):
        a = alpha[k]
        xs.append(-a * math.log(lam_hi[k]) - math.log(w))   # lam = lam_hi
        xs.append(-a * math.log(lam_lo[k]) - math.log(w))   # lam = lam_lo
    x0 = min(xs[0], xs[2])
    x1 = max(xs[1], xs[3])
    count = int(math.ceil(x1 - x0))
    edges = np.linspace(x0, x1, count + 1)
    x, wt = panel_rule(edges, order)
    return x, wt, x0, x1


def _cov_G_once(s, t, alpha, angular, theta_max, order):
    rules = [_axis_theta_rule(s[k], t[k], theta_max[k], order) for k in range(2)]
    # per-axis integrals at the extremes of lam: lam -> inf gives c_k / lam * 2,
    # lam -> 0 gives pi * s_k * t_k
    big = [2.0 * float(np.sum(r[1])) for r in rules]
    lam_hi = [1e4 * r[3] for r in rules]
    lam_lo = [1e-6 / max(s[k], t[k]) for k in range(2)]
    w1s, pw = angular.nodes()
    total = 0.0
    for w1, p in zip(w1s, pw):
        w = (w1, 1.0 - w1)
        x, xw, x0, x1 = _radial_rule(w1, alpha, lam_lo, lam_hi, order)
        prod = np.exp(-x)
        for k in range(2):
            theta, weights, floor, _ = rules[k]
            lam = np.exp(-(x + math.log(w[k])) / alpha[k])
            axis = np.empty_like(lam)
            rows = max(1, _CHUNK // theta.size)
            for i in range(0, lam.size, rows):
                lc = lam[i:i + rows, None]
                axis[i:i + rows] = (2.0 * lc / (lc**2 + theta[None, :] ** 2)) @ weights
            head = s[k] * t[k] * 2.0 * np.arctan(floor / lam)
            prod = prod * (axis + head)
        body = float(np.dot(xw, prod))
        # r below exp(x0): both factors ~ big_k / lam_k
        lower = (big[0] * big[1] * w[0] ** (1 / alpha[0]) * w[1] ** (1 / alpha[1])
                 * math.exp((1.0 / alpha[0] + 1.0 / alpha[1] - 1.0) * x0)
                 / (1.0 / alpha[0] + 1.0 / alpha[1] - 1.0))
        # r above exp(x1): both factors ~ pi s_k t_k
        upper = math.pi**2 * s[0] * t[0] * s[1] * t[1] * math.exp(-x1)
        total += p * (body + lower + upper)
    return total / math.pi**2


def _tail_bound(s, t, theta_max, C, beta):
    # |Re part| <= min(st, 4/theta^2); Psi <= C |theta1 theta2|^beta
    parts = []
    for k in range(2):
        st = s[k] * t[k]
        tc = 2.0 / math.sqrt(st)
        full = st * tc ** (beta + 1) / (beta + 1) + 4.0 * tc ** (beta - 1) / (1 - beta)
        tail = 4.0 * max(theta_max[k], tc) ** (beta - 1) / (1 - beta)
        parts.append((full, tail))
    (i1, j1), (i2, j2) = parts
    return C * (i1 * j2 + j1 * i2) / math.pi**2


def _cov_G_adaptive(s, t, alpha, angular, rtol, atol, order):
    C, beta = psi_envelope(alpha, angular)
    theta_max = [64.0 * math.pi / max(s[k], t[k]) for k in range(2)]
    for _ in range(6):
        coarse = _cov_G_once(s, t, alpha, angular, theta_max, order)
        bound = _tail_bound(s, t, theta_max, C, beta)
        budget = 0.5 * (rtol * abs(coarse) + atol)
        if bound <= budget:
            break
        grow = (bound / budget) ** (1.0 / (1.0 - beta)) * 1.2
        theta_max = [x * grow for x in theta_max]
        panels = max(theta_max[k] * max(s[k], t[k]) / math.pi for k in range(2))
        if panels > _MAX_THETA_PANELS:
            raise QuadratureError(
                f"cov_G: rtol={rtol} needs {panels:.3g} frequency panels per axis "
                f"(limit {_MAX_THETA_PANELS}); use cov_G_kernel for tighter tolerances",
                value=coarse, error=bound)
    fine = _cov_G_once(s, t, alpha, angular, theta_max, 2 * order)
    error = bound + abs(fine - coarse)
    if error > rtol * abs(fine) + atol:
        raise QuadratureError(
            f"cov_G missed rtol={rtol}: error estimate {error:.3e} on {fine:.6g}",
            value=fine, error=error)
    return CovGResult(fine, error, bound, tuple(theta_max), C)


def cov_G_detailed(s, t, alpha, angular: AngularMeasure, rtol: float = 1e-3,
                   atol: float = 0.0, order: int = DEFAULT_ORDER) -> CovGResult:
    """Frequency-domain ``Cov(G_s, G_t)`` with its error budget.

    The integrand is reduced to its real part on the positive quadrant
    and truncated to ``[0, T1] x [0, T2]``; the truncation is bounded with
    the fitted ``Psi`` envelope and ``T`` grows until that bound is below
    half the tolerance. ``Psi`` itself is never tabulated: the frequency
    integrals are done per axis inside the radial/angular quadrature. The
    reported error is the tail bound plus a node-doubling estimate.
    """
    a = _check_alpha(alpha)
    s = (float(s[0]), float(s[1]))
    t = (float(t[0]), float(t[1]))
    for x in (*s, *t):
        if not 0.0 <= x <= 1.0:
            raise ConfigError(f"time point {x!r} lies outside [0, 1]")
    if min(s[0], t[0], s[1], t[1]) == 0.0:
        return CovGResult(0.0, 0.0, 0.0, (0.0, 0.0), 0.0)
    return _cov_G_adaptive(s, t, a, angular, rtol, atol, order)


def cov_G(s, t, alpha, angular: AngularMeasure, rtol: float = 1e-3) -> float:
    """``Cov(G_s, G_t)`` of the critical-speed limit field."""
    return cov_G_detailed(s, t, alpha, angular, rtol=rtol).value


def scaling_exponent(alpha) -> float:
    a1, a2 = _check_alpha(alpha)
    return 2.0 / a1 + 2.0 / a2 - 1.0


def scaling_check(alpha, angular: AngularMeasure, lam: float, s, t, rtol: float = 1e-3):
    """Both sides of the operator-scaling relation of ``cov_G``.

    ``lhs = cov_G(lam**E s, lam**E t)`` with ``E = diag(1/alpha)``,
    ``rhs = lam**(2/alpha1 + 2/alpha2 - 1) cov_G(s, t)``. The scaled points
    may leave the unit square; the covariance is defined there too.
    """
    a = _check_alpha(alpha)
    if not lam > 0:
        raise ConfigError(f"lambda={lam!r} must be positive")
    base = cov_G_detailed(s, t, alpha, angular, rtol=rtol).value
    if lam == 1.0:
        return base, base
    scale = (lam ** (1.0 / a[0]), lam ** (1.0 / a[1]))
    s2 = (scale[0] * s[0], scale[1] * s[1])
    t2 = (scale[0] * t[0], scale[1] * t[1])
    lhs = _cov_G_adaptive(s2, t2, a, angular, rtol, 0.0, DEFAULT_ORDER).value
    return lhs, lam ** scaling_exponent(alpha) * base


# --- closed-form identities -------------------------------------------------


def check_integrate_r(alpha: float, gamma: float, w: float, theta: float):
    """Numeric and closed form of ``int_0^inf r**-gamma / ((r w)**(-2/alpha) + theta**2) dr``.

    The closed form is ``(alpha/2) B(H - 1/2, 3/2 - H) w**(gamma-1) / |theta|**(2H-1)``
    with ``H = (3 - alpha (gamma - 1)) / 2``; outside ``1/2 < H < 3/2`` the
    integral diverges and the call is rejected.
    """
    if not 0.0 < alpha < 2.0 or not 0.0 < w < 1.0 or theta == 0.0:
        raise ConfigError("need alpha in (0, 2), w in (0, 1) and theta != 0")
    H = 0.5 * (3.0 - alpha * (gamma - 1.0))
    if not 0.5 < H < 1.5:
        raise ConfigError(f"integral diverges: H={H!r} is outside (1/2, 3/2)")
    log_th2 = 2.0 * math.log(abs(theta))
    log_w = math.log(w)

    def f(x):
        # r = exp(x), dr = r dx
        return math.exp((1.0 - gamma) * x
                        - np.logaddexp(-2.0 * (x + log_w) / alpha, log_th2))

    cross = -alpha * math.log(abs(theta)) - math.log(w)
    numeric = 0.0
    for lo, hi in ((-np.inf, cross), (cross, np.inf)):
        v, _ = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-12, limit=200)
        numeric += v
    closed = (0.5 * alpha * special.beta(H - 0.5, 1.5 - H) * w ** (gamma - 1.0)
              / abs(theta) ** (2.0 * H - 1.0))
    return numeric, closed


def check_cov_fbm(H: float, s: float, t: float, rtol: float = 1e-6):
    """Harmonizable integral of fractional Brownian motion.

    Returns ``(numeric, error_bound, closed_form)`` where ``numeric`` is
    ``int_R Re[(e^{i s x} - 1) conj(e^{i t x} - 1)] |x|**(-1-2H) dx`` and
    ``closed_form = C_H * fbm_cov(H, s, t)``. The integral is truncated at
    ``T``: the non-oscillating part of the tail is added exactly and the
    three cosine tails are bounded by ``2 T**(-1-2H) / frequency`` each.
    """
    if not 0.0 < H < 1.0:
        raise ConfigError(f"H={H!r} must lie in (0, 1)")
    if s <= 0 or t <= 0:
        return 0.0, 0.0, harmonizable_constant(H) * fbm_cov(H, max(s, 0), max(t, 0))
    freqs = [f for f in (s, t, abs(s - t)) if f > 0]
    top = max(s, t)
    x_max = 1e4 / min(freqs)
    width = math.pi / top
    upper = np.arange(width, x_max + 0.5 * width, width)
    edges = np.concatenate([upper, dyadic_edges(1e-5 / top, width, include_zero=False)])
    floor = float(edges.min())

    def body(order):
        x, wt = panel_rule(edges, order)
        num = 4.0 * np.sin(0.5 * s * x) * np.sin(0.5 * t * x) * np.cos(0.5 * (s - t) * x)
        return float(np.dot(wt, num * x ** (-1.0 - 2.0 * H)))

    coarse, fine = body(DEFAULT_ORDER), body(2 * DEFAULT_ORDER)
    x_top = float(edges.max())
    # near zero the numerator is s t x^2; beyond x_top its constant part
    # (1, or 2 when s == t) integrates exactly
    head = s * t * floor ** (2.0 - 2.0 * H) / (2.0 - 2.0 * H)
    constant = 2.0 if s == t else 1.0
    tail = constant * x_top ** (-2.0 * H) / (2.0 * H)
    bound = sum(2.0 * x_top ** (-1.0 - 2.0 * H) / f for f in freqs)
    numeric = 2.0 * (fine + head + tail)
    error = 2.0 * (bound + abs(fine - coarse))
    if error > rtol * abs(numeric):
        raise QuadratureError("harmonizable fBm integral missed tolerance", value=numeric,
                              error=error)
    return numeric, error, harmonizable_constant(H) * fbm_cov(H, s, t)
