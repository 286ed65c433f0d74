"""Angular measures on the open simplex {w in (0,1)^2 : w1 + w2 = 1}.

Three representations are supported: a point mass, a finite mixture of
atoms and a Beta density for ``w1``. Each measure is immutable, samples
``w1`` by inverting its distribution function (one uniform per draw, so a
forced uniform reproduces a forced direction) and integrates functions of
``(w1, w2)`` exactly on atoms or by Gauss-Jacobi quadrature for the
density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import ConfigError, EvaluationError

DEFAULT_JACOBI_NODES = 64


@lru_cache(maxsize=64)
def _jacobi_rule(a: float, b: float, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    # weight w1^(a-1) (1-w1)^(b-1) on (0,1), normalised to total mass 1
    x, wt = special.roots_jacobi(nodes, b - 1.0, a - 1.0)
    w1 = 0.5 * (1.0 + x)
    wt = wt / wt.sum()
    w1.setflags(write=False)
    wt.setflags(write=False)
    return w1, wt


@lru_cache(maxsize=64)
def _split_jacobi_rule(a, b, n):
    # lower half: w1 = x/2 with Jacobi weight x^(a-1) on (0,1); the factor
    # (1-w1)^(b-1) is smooth there. Upper half mirrored with b.
    log_norm = special.betaln(a, b)
    halves = []
    for own, other, flip in ((a, b, False), (b, a, True)):
        t, wt = special.roots_jacobi(n, 0.0, own - 1.0)
        x = 0.5 * (1.0 + t)
        near = 0.5 * x
        weights = wt * np.exp(-own * np.log(2.0) - own * np.log(2.0) - log_norm) \
            * (1.0 - near) ** (other - 1.0)
        w1 = 1.0 - near if flip else near
        halves.append((w1, weights))
    w1 = np.concatenate([h[0] for h in halves])
    weights = np.concatenate([h[1] for h in halves])
    w1.setflags(write=False)
    weights.setflags(write=False)
    return w1, weights


@lru_cache(maxsize=256)
def _graded_rule(a, b, order, floor_lo, floor_hi):
    # each half of (0, 1) is cut into dyadic panels towards its end point;
    # the innermost panel [0, e] carries a Jacobi rule for the singular
    # factor, the others plain Gauss-Legendre on the full density
    from ._quadrature import dyadic_edges, panel_rule

    log_norm = special.betaln(a, b)
    w1_parts, wt_parts = [], []
    for own, other, floor, flip in ((a, b, floor_lo, False), (b, a, floor_hi, True)):
        edges = dyadic_edges(min(floor, 0.25), 0.5, include_zero=False)
        e = float(edges.min())
        x, wx = panel_rule(edges, order)
        dens = np.exp((own - 1.0) * np.log(x) + (other - 1.0) * np.log1p(-x) - log_norm)
        t, wj = special.roots_jacobi(order, 0.0, own - 1.0)
        y = 0.5 * e * (1.0 + t)
        # int_0^e x^(own-1) g(x) dx = (e/2)^own int (1+t)^(own-1) g dt
        wy = wj * (0.5 * e) ** own * np.exp((other - 1.0) * np.log1p(-y) - log_norm)
        near = np.concatenate([x, y])
        w1_parts.append(1.0 - near if flip else near)
        wt_parts.append(np.concatenate([wx * dens, wy]))
    w1 = np.concatenate(w1_parts)
    wt = np.concatenate(wt_parts)
    w1.setflags(write=False)
    wt.setflags(write=False)
    return w1, wt


def _check_open(w1, what):
    if not (0.0 < w1 < 1.0) or not math.isfinite(w1):
        raise ConfigError(f"{what}: w1={w1!r} must lie strictly inside (0, 1)")


class AngularMeasure:
    """Common interface; use :class:`PointMass`, :class:`DiscreteMixture` or :class:`BetaDensity`."""

    def nodes(self, n_nodes: int = DEFAULT_JACOBI_NODES) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(w1, weights)`` such that sum(weights * f(w1)) integrates f."""
        raise NotImplementedError

    def split_nodes(self, n_per_half: int) -> tuple[np.ndarray, np.ndarray]:
        """Like :meth:`nodes`, but with separate rules on ``w1 < 1/2`` and ``w1 > 1/2``.

        Integrands built from ``min(w1, w2)`` have a kink at the midpoint;
        splitting there keeps the quadrature spectrally accurate.
        """
        return self.nodes()

    def graded_nodes(self, order: int, floor_lo: float, floor_hi: float):
        """Rule resolving features down to ``w1 ~ floor_lo`` and ``w2 ~ floor_hi``.

        Atomic measures return their atoms.
        """
        return self.nodes()

    def w1_from_uniform(self, u):
        raise NotImplementedError

    @property
    def is_atomic(self) -> bool:
        return True

    def sample_w(self, rng: np.random.Generator) -> tuple[float, float]:
        w1 = float(self.w1_from_uniform(rng.random()))
        return w1, 1.0 - w1

    def integrate(self, f, n_nodes: int = DEFAULT_JACOBI_NODES) -> float:
        w1, wt = self.nodes(n_nodes)
        vals = np.asarray(f(w1, 1.0 - w1), dtype=float)
        vals = np.broadcast_to(vals, w1.shape)
        bad = ~np.isfinite(vals)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            kind = "atom" if self.is_atomic else "quadrature node"
            raise EvaluationError(
                f"integrand is {vals[i]!r} at {kind} w1={w1[i]!r} of {self!r}"
            )
        return float(np.dot(wt, vals))

    def moment(self, p1: float, p2: float) -> float:
        return self.integrate(lambda w1, w2: w1**p1 * w2**p2)

    def log_moment(self) -> float:
        """Integral of ``|log w2|``; ``inf`` when it diverges."""
        return self.integrate(lambda w1, w2: -np.log(w2))

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PointMass(AngularMeasure):
    w1: float

    def __post_init__(self):
        _check_open(self.w1, "PointMass")

    def nodes(self, n_nodes=DEFAULT_JACOBI_NODES):
        return np.array([self.w1]), np.array([1.0])

    def w1_from_uniform(self, u):
        return np.full(np.shape(u), self.w1) if np.ndim(u) else self.w1

    def to_dict(self):
        return {"variant": "PointMass", "w1": self.w1}


@dataclass(frozen=True)
class DiscreteMixture(AngularMeasure):
    """Finitely many atoms ``(weight, w1)``; weights must sum to one."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        atoms = tuple((float(p), float(w)) for p, w in self.atoms)
        if not atoms:
            raise ConfigError("DiscreteMixture needs at least one atom")
        for p, w in atoms:
            if not p > 0:
                raise ConfigError(f"DiscreteMixture: atom weight {p!r} must be positive")
            _check_open(w, "DiscreteMixture")
        total = math.fsum(p for p, _ in atoms)
        if abs(total - 1.0) > 1e-12:
            raise ConfigError(f"DiscreteMixture: weights sum to {total!r}, not 1")
        object.__setattr__(self, "atoms", atoms)

    def nodes(self, n_nodes=DEFAULT_JACOBI_NODES):
        p = np.array([a[0] for a in self.atoms])
        w = np.array([a[1] for a in self.atoms])
        return w, p

    def w1_from_uniform(self, u):
        p = np.array([a[0] for a in self.atoms])
        w = np.array([a[1] for a in self.atoms])
        cdf = np.cumsum(p)
        cdf[-1] = 1.0
        idx = np.searchsorted(cdf, u, side="right")
        idx = np.minimum(idx, len(w) - 1)
        return w[idx] if np.ndim(u) else float(w[idx])

    def to_dict(self):
        return {"variant": "DiscreteMixture", "atoms": [list(a) for a in self.atoms]}


@dataclass(frozen=True)
class BetaDensity(AngularMeasure):
    """``w1`` with density proportional to ``w1**(a-1) * (1-w1)**(b-1)``."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0) or not math.isfinite(self.a + self.b):
            raise ConfigError(f"BetaDensity: need a, b > 0, got a={self.a!r}, b={self.b!r}")

    @property
    def is_atomic(self):
        return False

    def nodes(self, n_nodes=DEFAULT_JACOBI_NODES):
        return _jacobi_rule(float(self.a), float(self.b), int(n_nodes))

    def split_nodes(self, n_per_half):
        return _split_jacobi_rule(float(self.a), float(self.b), int(n_per_half))

    def graded_nodes(self, order, floor_lo, floor_hi):
        return _graded_rule(float(self.a), float(self.b), int(order), float(floor_lo),
                            float(floor_hi))

    def w1_from_uniform(self, u):
        w = special.betaincinv(self.a, self.b, u)
        # keep draws inside the open simplex when the inverse saturates
        tiny = np.finfo(float).tiny
        w = np.clip(w, tiny, np.nextafter(1.0, 0.0))
        return w if np.ndim(u) else float(w)

    def moment(self, p1, p2):
        # powers folded into the Jacobi weight: the integrand left over is 1,
        # so the rule is exact and only the normalising constant remains
        a, b = self.a + p1, self.b + p2
        if not (a > 0 and b > 0):
            raise EvaluationError(
                f"moment ({p1}, {p2}) diverges for BetaDensity(a={self.a}, b={self.b})"
            )
        return math.exp(special.betaln(a, b) - special.betaln(self.a, self.b))

    def log_moment(self):
        # E|log(1 - w1)| = digamma(a + b) - digamma(b) for w1 ~ Beta(a, b)
        return float(special.digamma(self.a + self.b) - special.digamma(self.b))

    def to_dict(self):
        return {"variant": "BetaDensity", "a": self.a, "b": self.b}


def from_dict(record: dict) -> AngularMeasure:
    """Rebuild a measure from its tagged record."""
    kind = record.get("variant")
    try:
        if kind == "PointMass":
            return PointMass(float(record["w1"]))
        if kind == "DiscreteMixture":
            return DiscreteMixture(tuple(tuple(a) for a in record["atoms"]))
        if kind == "BetaDensity":
            return BetaDensity(float(record["a"]), float(record["b"]))
    except KeyError as exc:
        raise ConfigError(f"angular measure record {record!r} is missing {exc}") from None
    raise ConfigError(f"unknown angular measure variant {kind!r}")


def sample_w(measure: AngularMeasure, rng: np.random.Generator) -> tuple[float, float]:
    return measure.sample_w(rng)


def integrate(measure: AngularMeasure, f, n_nodes: int = DEFAULT_JACOBI_NODES) -> float:
    """Integrate ``f(w1, w2)`` against the measure (``f`` must accept arrays)."""
    return measure.integrate(f, n_nodes)


def moment(measure: AngularMeasure, p1: float, p2: float) -> float:
    """``∫ w1**p1 * w2**p2`` against the measure."""
    return measure.moment(p1, p2)


def log_moment_finite(measure: AngularMeasure) -> float:
    """``∫ |log w2|``; a precondition gate for boundary-case runs."""
    value = measure.log_moment()
    return value if math.isfinite(value) else math.inf
