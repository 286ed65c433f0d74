"""Laws of the persistence pair q = (q1, q2) and exact functionals of them.

Both laws are parametrised through ``U = 2 * (1 - q)`` in ``(0, 1]^2``:

* :class:`Independent` -- ``U1``, ``U2`` independent, ``Uk`` with density
  ``(2 - 2Hk) u**(1 - 2Hk)`` (the image of the law with that Hurst index).
* :class:`Dependent` -- ``Uk = (R * Wk)**(-1/alpha_k)`` with ``R`` of
  density ``r**-2`` on ``(1, inf)`` and ``W`` drawn from an angular
  measure; when that point leaves ``(0, 1)^2`` it is replaced by the
  atom ``U = (1, 1)``.

Expectations of products ``f1(U1) * f2(U2)`` are computed by
:func:`expect_product`, which everything else in the package builds on
(lag correlations, spectral kernel, exact partial-sum covariances).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import angular as am
from ._quadrature import DEFAULT_ORDER, dyadic_edges, panel_rule
from .errors import ConfigError, QuadratureError

# extra decades below the finest feature scale handed to expect_product
_FLOOR_MARGIN = 1e-3
# Gauss-Jacobi nodes per half-simplex for the clamp-atom mass (densities only)
_W_NODES = 24


@dataclass(frozen=True)
class Independent:
    H1: float
    H2: float

    def __post_init__(self):
        for name in ("H1", "H2"):
            h = getattr(self, name)
            if not 0.5 < h < 1.0:
                raise ConfigError(f"Independent law: {name}={h!r} must lie in (1/2, 1)")

    def to_dict(self):
        return {"variant": "Independent", "H1": self.H1, "H2": self.H2}


@dataclass(frozen=True)
class Dependent:
    alpha1: float
    alpha2: float
    angular: am.AngularMeasure

    def __post_init__(self):
        for name in ("alpha1", "alpha2"):
            a = getattr(self, name)
            if not 0.0 < a < 2.0:
                raise ConfigError(f"Dependent law: {name}={a!r} must lie in (0, 2)")
        if not isinstance(self.angular, am.AngularMeasure):
            raise ConfigError(f"Dependent law: angular={self.angular!r} is not an AngularMeasure")

    @property
    def alpha(self) -> tuple[float, float]:
        return (self.alpha1, self.alpha2)

    @property
    def p(self) -> float:
        """``1/alpha1 + 1/alpha2``, always above 1."""
        return 1.0 / self.alpha1 + 1.0 / self.alpha2

    def to_dict(self):
        return {
            "variant": "Dependent",
            "alpha1": self.alpha1,
            "alpha2": self.alpha2,
            "angular": self.angular.to_dict(),
        }


PersistenceLaw = Union[Independent, Dependent]


def law_from_dict(record: dict) -> PersistenceLaw:
    kind = record.get("variant")
    try:
        if kind == "Independent":
            return Independent(float(record["H1"]), float(record["H2"]))
        if kind == "Dependent":
            return Dependent(
                float(record["alpha1"]),
                float(record["alpha2"]),
                am.from_dict(record["angular"]),
            )
    except KeyError as exc:
        raise ConfigError(f"persistence law record {record!r} is missing {exc}") from None
    raise ConfigError(f"unknown persistence law variant {kind!r}")


@dataclass(frozen=True)
class PersistenceSample:
    q1: float
    q2: float
    u1: float
    u2: float

    @classmethod
    def from_u(cls, u1, u2):
        return cls(1.0 - 0.5 * float(u1), 1.0 - 0.5 * float(u2), float(u1), float(u2))


# --- samplers ---------------------------------------------------------------


def sample_q_independent(H: float, uniform):
    """Inverse distribution function of the one-dimensional persistence law."""
    if not 0.5 < H < 1.0:
        raise ConfigError(f"H={H!r} must lie in (1/2, 1)")
    q = 1.0 - 0.5 * (1.0 - np.asarray(uniform, dtype=float)) ** (1.0 / (2.0 - 2.0 * H))
    return q if np.ndim(uniform) else float(q)


def sample_R(uniform):
    """Radial variable with ``P(R > r) = 1/r`` on ``(1, inf)``."""
    r = 1.0 / (1.0 - np.asarray(uniform, dtype=float))
    return r if np.ndim(uniform) else float(r)


def u_from_rw(law: Dependent, R, w1):
    """Clamped ``U`` for given radius(es) and direction(s)."""
    R = np.asarray(R, dtype=float)
    w1 = np.asarray(w1, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        u1 = (R * w1) ** (-1.0 / law.alpha1)
        u2 = (R * (1.0 - w1)) ** (-1.0 / law.alpha2)
    inside = (u1 < 1.0) & (u2 < 1.0)
    return np.where(inside, u1, 1.0), np.where(inside, u2, 1.0)


def u_from_uniforms(law: PersistenceLaw, ua, ub):
    """Map two uniforms per draw to ``(U1, U2)``; vectorised.

    Independent: one uniform per axis. Dependent: ``ua`` drives ``R``,
    ``ub`` drives the direction ``W``.
    """
    ua = np.asarray(ua, dtype=float)
    ub = np.asarray(ub, dtype=float)
    if isinstance(law, Independent):
        u1 = (1.0 - ua) ** (1.0 / (2.0 - 2.0 * law.H1))
        u2 = (1.0 - ub) ** (1.0 / (2.0 - 2.0 * law.H2))
        return u1, u2
    w1 = law.angular.w1_from_uniform(ub)
    return u_from_rw(law, sample_R(ua), w1)


def sample_q(law: PersistenceLaw, rng: np.random.Generator) -> PersistenceSample:
    ua, ub = rng.random(2)
    u1, u2 = u_from_uniforms(law, ua, ub)
    return PersistenceSample.from_u(u1, u2)


def persistence_from_rw(law: Dependent, R: float, w1: float) -> PersistenceSample:
    """Forced-randomness entry point for the dependent construction."""
    u1, u2 = u_from_rw(law, R, w1)
    return PersistenceSample.from_u(u1, u2)


def persistence_from_uniforms(law: PersistenceLaw, ua: float, ub: float) -> PersistenceSample:
    u1, u2 = u_from_uniforms(law, ua, ub)
    return PersistenceSample.from_u(u1, u2)


# --- exact functionals ------------------------------------------------------


def atom_mass(law: Dependent) -> float:
    """Probability of the clamp atom ``U = (1, 1)``.

    ``U`` stays inside ``(0,1)^2`` iff ``R > max(1/w1, 1/w2)``, which has
    probability ``min(w1, w2)``.
    """
    if not isinstance(law, Dependent):
        raise ConfigError("atom_mass is defined for the dependent law only")
    w1, wt = law.angular.split_nodes(2 * _W_NODES)
    return 1.0 - float(np.dot(wt, np.minimum(w1, 1.0 - w1)))


def _independent_axis_rule(H, u_floor, order):
    # u = x**(1/(2-2H)) with x uniform on (0, 1]
    kappa = 2.0 - 2.0 * H
    x_floor = (_FLOOR_MARGIN * u_floor) ** kappa
    x, wt = panel_rule(dyadic_edges(min(x_floor, 0.25), 1.0), order)
    return x ** (1.0 / kappa), wt


def _dependent_rule(law, u_floor, order):
    # where w1 -> 0 the factor f2 sees u2 ~ (w1 y / w2)^(1/alpha2), which
    # reaches the scale u_floor at w1 ~ u_floor^alpha2; mirrored for w2
    w1s, pw = law.angular.graded_nodes(
        order,
        (_FLOOR_MARGIN * u_floor) ** law.alpha2,
        (_FLOOR_MARGIN * u_floor) ** law.alpha1,
    )
    us1, us2, wts = [], [], []
    for w1, p in zip(w1s, pw):
        w2 = 1.0 - w1
        top = min(w1, w2)
        v_floor = min(w1 * (_FLOOR_MARGIN * u_floor) ** law.alpha1,
                      w2 * (_FLOOR_MARGIN * u_floor) ** law.alpha2)
        v, wt = panel_rule(dyadic_edges(min(v_floor, 0.25 * top), top), order)
        us1.append((v / w1) ** (1.0 / law.alpha1))
        us2.append((v / w2) ** (1.0 / law.alpha2))
        wts.append(p * wt)
    return np.concatenate(us1), np.concatenate(us2), np.concatenate(wts)


def _expect_once(law, f1, f2, u_floor, order):
    if isinstance(law, Independent):
        u1, w1 = _independent_axis_rule(law.H1, u_floor, order)
        u2, w2 = _independent_axis_rule(law.H2, u_floor, order)
        return np.tensordot(w1, f1(u1), axes=1) * np.tensordot(w2, f2(u2), axes=1)
    u1, u2, wt = _dependent_rule(law, u_floor, order)
    cont = np.tensordot(wt, f1(u1) * f2(u2), axes=1)
    one = np.ones(1)
    atom = atom_mass(law) * (f1(one) * f2(one))[0]
    return cont + atom


def expect_product(law: PersistenceLaw, f1, f2, u_floor: float = 1e-3,
                   rtol: float = 1e-8, atol: float = 0.0, order: int = DEFAULT_ORDER):
    """``E[f1(U1) * f2(U2)]`` under the law, with a node-doubling error estimate.

    ``f1``/``f2`` map an array of ``u`` values of shape ``(N,)`` to shape
    ``(N,)`` or ``(N, M)``; the result then has shape ``()`` or ``(M,)``.
    ``u_floor`` is the smallest scale in ``u`` on which the integrand
    still varies (e.g. ``1/n`` for walks of length ``n``); panels extend
    three decades below it. Returns ``(value, error_estimate)`` and raises
    :class:`QuadratureError` when the estimate exceeds the tolerance.
    """
    coarse = _expect_once(law, f1, f2, u_floor, order)
    fine = _expect_once(law, f1, f2, u_floor, 2 * order)
    err = np.abs(fine - coarse)
    bound = rtol * np.abs(fine) + atol
    if np.any(err > bound):
        worst = float(np.max(err - bound))
        raise QuadratureError(
            f"persistence-law quadrature missed tolerance (rtol={rtol}, atol={atol}); "
            f"excess error {worst:.3e}",
            value=fine,
            error=err,
        )
    return fine, err


def correlation_rho(law: PersistenceLaw, l1: int, l2: int, rtol: float = 1e-8) -> float:
    """Lag correlation ``E[(2q1-1)**|l1| * (2q2-1)**|l2|]`` of the ±1 field.

    At the clamp atom ``2q - 1 = 0`` and ``0**0 = 1``.
    """
    l1, l2 = abs(int(l1)), abs(int(l2))
    u_floor = 1.0 / (1.0 + max(l1, l2))
    value, _ = expect_product(
        law,
        lambda u: (1.0 - u) ** l1,
        lambda u: (1.0 - u) ** l2,
        u_floor=u_floor,
        rtol=rtol,
        atol=1e-15,
    )
    return float(value)

