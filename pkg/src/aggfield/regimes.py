"""Scaling regimes: Hurst pairs, variance constants and normalisations.

Five regimes are distinguished:

``independent``     independent persistence, fractional Brownian sheet limit
``critical``        dependent persistence with ``n1**alpha1 ~ n2**alpha2``,
                    limit field G with covariance :func:`aggfield.theory.cov_G`
``noncritical_i``   ``n1**alpha1 >> n2**alpha2`` and ``alpha1 > 1``
``noncritical_ii``  ``n1**alpha1 >> n2**alpha2`` and ``alpha1 < 1``
``boundary``        ``n1**alpha1 >> n2**alpha2`` and ``alpha1 = 1``

Grid growth is ``n2 = round(n1**gamma)``; the critical regime fixes
``gamma = alpha1 / alpha2``, the others need ``gamma < alpha1 / alpha2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from . import persistence as ps
from . import theory as th
from .errors import ConfigError

KINDS = ("independent", "critical", "noncritical_i", "noncritical_ii", "boundary")
_DEPENDENT_KINDS = KINDS[1:]


class RegimeConstants(NamedTuple):
    H1: Optional[float]
    H2: Optional[float]
    sigma2: Optional[float]


@dataclass(frozen=True)
class RegimeSpec:
    kind: str
    law: ps.PersistenceLaw
    gamma: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown regime {self.kind!r}; expected one of {KINDS}")
        law = self.law
        if self.kind == "independent":
            if not isinstance(law, ps.Independent):
                raise ConfigError("regime 'independent' needs an Independent persistence law")
            gamma = 1.0 if self.gamma is None else float(self.gamma)
            if not gamma > 0:
                raise ConfigError(f"growth exponent gamma={gamma!r} must be positive")
            object.__setattr__(self, "gamma", gamma)
            return
        if not isinstance(law, ps.Dependent):
            raise ConfigError(f"regime {self.kind!r} needs a Dependent persistence law")
        a1, a2 = law.alpha
        ratio = a1 / a2
        if self.kind == "critical":
            if self.gamma is not None and not math.isclose(self.gamma, ratio, rel_tol=1e-12):
                raise ConfigError(
                    f"critical speed n1^alpha1 ~ n2^alpha2 fixes gamma = alpha1/alpha2 = {ratio!r}, "
                    f"got {self.gamma!r}")
            object.__setattr__(self, "gamma", ratio)
            return
        gamma = 0.5 * ratio if self.gamma is None else float(self.gamma)
        if not 0.0 < gamma < ratio:
            raise ConfigError(
                f"non-critical speed n1^alpha1 >> n2^alpha2 needs 0 < gamma < alpha1/alpha2 "
                f"= {ratio!r}, got gamma={gamma!r}")
        object.__setattr__(self, "gamma", gamma)
        if self.kind == "noncritical_i":
            if not a1 > 1.0:
                raise ConfigError(f"non-critical case (i) needs alpha1 > 1, got alpha1={a1!r}")
            d = 0.5 * a2 * (1.0 - 1.0 / a1)
            if not d < 0.5:
                raise ConfigError(
                    "non-critical case (i) needs (alpha2/2)(1 - 1/alpha1) < 1/2 so that "
                    f"H2 > 1/2, got {d!r}")
        elif self.kind == "noncritical_ii":
            if not a1 < 1.0:
                raise ConfigError(f"non-critical case (ii) needs alpha1 < 1, got alpha1={a1!r}")
        elif self.kind == "boundary":
            if not math.isclose(a1, 1.0, rel_tol=0.0, abs_tol=1e-12):
                raise ConfigError(f"boundary case needs alpha1 = 1, got alpha1={a1!r}")
            if not math.isfinite(law.angular.log_moment()):
                raise ConfigError("boundary case needs a finite logarithmic moment of Lambda")

    @property
    def is_dependent(self) -> bool:
        return self.kind in _DEPENDENT_KINDS

    def n2(self, n1: int) -> int:
        """Second-axis length paired with ``n1``."""
        return max(1, int(round(int(n1) ** self.gamma)))

    def gap(self, n) -> float:
        """The ratio that the number of copies must dominate."""
        n1, n2 = int(n[0]), int(n[1])
        if self.kind == "critical":
            return n1 ** self.law.alpha1
        H1, H2, _ = regime_constants(self)
        return n1 ** (2.0 - 2.0 * H1) * n2 ** (2.0 - 2.0 * H2)

    def to_dict(self):
        return {"kind": self.kind, "law": self.law.to_dict(), "gamma": self.gamma}

    @classmethod
    def from_dict(cls, record):
        try:
            return cls(record["kind"], ps.law_from_dict(record["law"]), record.get("gamma"))
        except KeyError as exc:
            raise ConfigError(f"regime record is missing {exc}") from None


def regime_constants(spec: RegimeSpec) -> RegimeConstants:
    """Hurst pair and variance constant of the limit sheet.

    The critical regime has no sheet limit and returns ``(None, None, None)``.
    """
    law = spec.law
    if spec.kind == "independent":
        sigma = th.sigma_independent(law.H1, law.H2)
        return RegimeConstants(law.H1, law.H2, sigma * sigma)
    if spec.kind == "critical":
        return RegimeConstants(None, None, None)
    a1, a2 = law.alpha
    lam = law.angular
    if spec.kind == "noncritical_i":
        H2 = 1.0 - 0.5 * a2 * (1.0 - 1.0 / a1)
        return RegimeConstants(0.5, H2, 2.0 * a2 * th.c_frak(H2) * lam.moment(1.0 / a1, 1.0 - 1.0 / a1))
    if spec.kind == "noncritical_ii":
        H1 = 1.0 - 0.5 * a1
        return RegimeConstants(H1, 1.0, a1 * th.c_frak(H1) * lam.moment(1.0, 0.0))
    return RegimeConstants(0.5, 1.0, 4.0 * math.pi * lam.moment(1.0, 0.0))


def _check_n(n, m):
    n1, n2 = n
    for x in (n1, n2):
        if isinstance(x, float) and not x.is_integer() or int(x) < 1:
            raise ConfigError(f"lengths must be positive integers, got n={n!r}")
    if isinstance(m, float) and not m.is_integer() or int(m) < 1:
        raise ConfigError(f"number of copies must be a positive integer, got m={m!r}")
    return int(n1), int(n2), int(m)


def normalization_from_hurst(H, n, m) -> float:
    """``n1**H1 * n2**H2 * sqrt(m)``."""
    n1, n2, m = _check_n(n, m)
    return n1 ** H[0] * n2 ** H[1] * math.sqrt(m)


def normalization(spec: RegimeSpec, n, m) -> float:
    """Divisor turning the aggregated partial sums into the limit statistic."""
    n1, n2, m = _check_n(n, m)
    if spec.kind == "critical":
        return n1 * n2 * math.sqrt(m) / n1 ** (0.5 * spec.law.alpha1)
    if spec.kind == "boundary":
        if n1 < 2:
            raise ConfigError(f"boundary normalisation needs n1 >= 2 so that log n1 > 0, got {n1}")
        return math.sqrt(n1 * math.log(n1)) * n2 * math.sqrt(m)
    H1, H2, _ = regime_constants(spec)
    return normalization_from_hurst((H1, H2), (n1, n2), m)


def stated_limit_cov(spec: RegimeSpec, s, t) -> float:
    """``sigma**2 * fbs_cov`` with the constants of :func:`regime_constants` (``cov_G`` if critical)."""
    if spec.kind == "critical":
        return th.cov_G(s, t, spec.law.alpha, spec.law.angular)
    H1, H2, sigma2 = regime_constants(spec)
    return sigma2 * th.fbs_cov(H1, H2, s, t)


def limit_cov(spec: RegimeSpec, s, t) -> float:
    """Limit of ``Cov`` of the normalised statistic, as reached by the model.

    Independent and critical regimes agree with :func:`stated_limit_cov`.
    In the non-critical cases (i) and (ii) the limit is ``sigma**2 / (2 pi)``
    times the sheet covariance. In the boundary case the logarithmic
    normalisation captures ``log(n1 / n2**alpha2) = (1 - alpha2 gamma) log n1``
    and the constant is ``2 (1 - alpha2 gamma) int w1 Lambda(dw)``.
    """
    if spec.kind in ("independent", "critical"):
        return stated_limit_cov(spec, s, t)
    H1, H2, sigma2 = regime_constants(spec)
    if spec.kind == "boundary":
        const = 2.0 * (1.0 - spec.law.alpha2 * spec.gamma) * spec.law.angular.moment(1.0, 0.0)
        return const * th.fbs_cov(H1, H2, s, t)
    return sigma2 / (2.0 * math.pi) * th.fbs_cov(H1, H2, s, t)
