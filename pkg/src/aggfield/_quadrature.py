"""Composite Gauss-Legendre rules on dyadic and uniform panels.

Every integral in the package that has to resolve features spread over
many decades (walk lengths up to a few thousand, frequencies close to
the origin) is computed on panels whose edges are geometric towards the
singular end. Each panel carries a fixed-order Gauss-Legendre rule, so
results are reproducible and node doubling gives an error estimate.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

DEFAULT_ORDER = 16


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(edges, order: int = DEFAULT_ORDER) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the composite rule over consecutive ``edges``.

    ``edges`` may be increasing or decreasing; zero-width panels are dropped.
    """
    edges = np.sort(np.unique(np.asarray(edges, dtype=float)))
    lo, hi = edges[:-1], edges[1:]
    x, w = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def dyadic_edges(lo: float, hi: float, ratio: float = 2.0, include_zero: bool = True) -> np.ndarray:
    """Edges ``hi, hi/ratio, hi/ratio**2, ...`` down to below ``lo`` (and 0)."""
    if not 0 < lo < hi:
        raise ValueError(f"need 0 < lo < hi, got lo={lo!r}, hi={hi!r}")
    count = int(np.ceil(np.log(hi / lo) / np.log(ratio)))
    edges = hi / ratio ** np.arange(count + 1)
    if include_zero:
        edges = np.append(edges, 0.0)
    return edges


def oscillatory_edges(hi: float, width: float, lo: float) -> np.ndarray:
    """Uniform panels of ``width`` on ``[width, hi]``, dyadic panels on ``(0, width]``."""
    if width >= hi:
        return dyadic_edges(min(lo, 0.5 * hi), hi)
    count = max(int(np.ceil((hi - width) / width)), 1)
    upper = np.linspace(width, hi, count + 1)
    return np.concatenate([upper[::-1], dyadic_edges(min(lo, 0.5 * width), width)[1:]])
