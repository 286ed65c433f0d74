"""Correlated ±1 walks, product fields and their aggregation over copies.

A single copy of the field is ``X_j = e1[j1] * e2[j2]`` where ``e1``, ``e2``
are two persistent sign walks sharing one draw of the persistence pair.
Its partial sum over the box ``[1, a] x [1, b]`` factorises into the
product of the two one-dimensional partial sums, so a copy costs
``O(n1 + n2)`` and the lattice is never built.

Random numbers
--------------
Copy ``i`` consumes a fixed block of ``block_width(n)`` uniforms from a
single Philox stream keyed by the master seed. The block holds, in order,
two uniforms for the persistence pair, one start-sign uniform per axis,
the ``n1 - 1`` flip uniforms of axis 1 and the ``n2 - 1`` flip uniforms
of axis 2, padded to a multiple of four. Philox produces four 64-bit
words per counter step, so copy ``i`` starts exactly ``i * width / 4``
counter steps in and any range of copies can be generated on its own.
Because every copy sum is an integer, the aggregate does not depend on
how copies are split between workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import persistence as ps
from .errors import ConfigError

# uniforms generated per batch in the vectorised simulator
_BATCH_UNIFORMS = 1 << 20


@dataclass(frozen=True)
class WalkPartialSums:
    n: int
    cumulative: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.cumulative)
        if c.shape != (self.n + 1,) or c[0] != 0:
            raise ValueError("cumulative must have length n + 1 and start at 0")


@dataclass
class FieldRun:
    """Aggregated partial sums on a grid, with everything needed to redo them."""

    n: tuple[int, int]
    grid: np.ndarray
    values: np.ndarray
    m: int
    master_seed: int
    law: ps.PersistenceLaw
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "n": list(self.n),
            "grid": np.asarray(self.grid).tolist(),
            "values": [int(v) for v in self.values],
            "m": int(self.m),
            "master_seed": int(self.master_seed),
            "law": self.law.to_dict(),
        }

    @classmethod
    def from_dict(cls, record):
        return cls(
            n=tuple(int(k) for k in record["n"]),
            grid=np.asarray(record["grid"], dtype=float),
            values=np.asarray(record["values"], dtype=np.int64),
            m=int(record["m"]),
            master_seed=int(record["master_seed"]),
            law=ps.law_from_dict(record["law"]),
        )


# --- one walk ---------------------------------------------------------------


def signs_from_uniforms(start, flips, q):
    """Sign paths from a start uniform and flip uniforms; vectorised over rows.

    ``start`` has shape ``(B,)``, ``flips`` ``(B, n-1)`` and ``q`` ``(B,)``.
    The walk keeps its sign when the flip uniform is below ``q``.
    """
    start = np.atleast_1d(start)
    flips = np.atleast_2d(flips)
    q = np.atleast_1d(q)
    s0 = np.where(start < 0.5, 1, -1).astype(np.int8)
    changed = flips >= q[:, None]
    parity = np.cumsum(changed, axis=1, dtype=np.int32) & 1
    eps = np.empty((flips.shape[0], flips.shape[1] + 1), dtype=np.int8)
    eps[:, 0] = 1
    eps[:, 1:] = 1 - 2 * parity
    eps *= s0[:, None]
    return eps


def partial_sums(eps):
    """Cumulative sums along the last axis with a leading zero."""
    eps = np.atleast_2d(eps)
    out = np.zeros((eps.shape[0], eps.shape[1] + 1), dtype=np.int32)
    np.cumsum(eps, axis=1, out=out[:, 1:])
    return out


def simulate_walk(n: int, q: float, rng: np.random.Generator | None = None,
                  uniforms=None) -> WalkPartialSums:
    """Persistent sign walk of length ``n``.

    Uses ``n`` uniforms: the first fixes the starting sign (``+1`` below
    one half), the rest are flip uniforms. Pass ``uniforms`` to force a path.
    """
    n = int(n)
    if n < 1:
        raise ConfigError(f"walk length must be positive, got {n!r}")
    if not 0.5 <= q < 1.0:
        raise ConfigError(f"persistence q={q!r} must lie in [1/2, 1)")
    if uniforms is None:
        if rng is None:
            raise ConfigError("simulate_walk needs either rng or uniforms")
        uniforms = rng.random(n)
    uniforms = np.asarray(uniforms, dtype=float)
    if uniforms.shape != (n,):
        raise ConfigError(f"need {n} uniforms, got shape {uniforms.shape}")
    eps = signs_from_uniforms(uniforms[:1], uniforms[None, 1:], np.array([q]))
    return WalkPartialSums(n, partial_sums(eps)[0].astype(np.int64))


# --- grids and streams ------------------------------------------------------


def grid_indices(n, grid) -> tuple[np.ndarray, np.ndarray]:
    """Validate a grid of t-points and return the floored indices per axis.

    A relative slack of 1e-12 keeps products such as ``0.29 * 100`` on the
    intended integer.
    """
    g = np.asarray(grid, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(g)) or np.any(g < 0.0) or np.any(g > 1.0):
        bad = g[~np.all(np.isfinite(g) & (g >= 0.0) & (g <= 1.0), axis=1)][0]
        raise ConfigError(f"grid point {tuple(bad)} lies outside [0, 1]^2")
    n1, n2 = int(n[0]), int(n[1])
    a = np.floor(g[:, 0] * n1 * (1.0 + 1e-12)).astype(np.int64)
    b = np.floor(g[:, 1] * n2 * (1.0 + 1e-12)).astype(np.int64)
    return np.minimum(a, n1), np.minimum(b, n2)


def block_width(n) -> int:
    """Uniforms consumed per copy for lengths ``n``, padded to a multiple of 4."""
    raw = 4 + (int(n[0]) - 1) + (int(n[1]) - 1)
    return 4 * math.ceil(raw / 4)


def copy_stream(master_seed: int, first_copy: int, n) -> np.random.Generator:
    """Generator positioned at the start of the block of ``first_copy``."""
    bitgen = np.random.Philox(np.random.SeedSequence(int(master_seed)))
    bitgen = bitgen.advance(int(first_copy) * (block_width(n) // 4))
    return np.random.Generator(bitgen)


def philox_uniforms(master_seed, n, first_copy, count):
    """Uniform blocks of copies ``first_copy .. first_copy+count-1``, shape ``(count, width)``."""
    width = block_width(n)
    return copy_stream(master_seed, first_copy, n).random((count, width))


# --- field values -----------------------------------------------------------


def _copy_values(law, n, a, b, blocks):
    n1, n2 = int(n[0]), int(n[1])
    u1, u2 = ps.u_from_uniforms(law, blocks[:, 0], blocks[:, 1])
    q1, q2 = 1.0 - 0.5 * u1, 1.0 - 0.5 * u2
    flips1 = blocks[:, 4:4 + n1 - 1]
    flips2 = blocks[:, 4 + n1 - 1:4 + n1 + n2 - 2]
    p1 = partial_sums(signs_from_uniforms(blocks[:, 2], flips1, q1))
    p2 = partial_sums(signs_from_uniforms(blocks[:, 3], flips2, q2))
    return p1[:, a].astype(np.int64) * p2[:, b]


def field_from_steps(eps1, eps2, grid):
    """Product-form partial sums for explicit sign sequences."""
    eps1 = np.asarray(eps1, dtype=np.int64)
    eps2 = np.asarray(eps2, dtype=np.int64)
    a, b = grid_indices((len(eps1), len(eps2)), grid)
    c1 = np.concatenate([[0], np.cumsum(eps1)])
    c2 = np.concatenate([[0], np.cumsum(eps2)])
    return c1[a] * c2[b]


def single_field_values(n, grid, law: ps.PersistenceLaw,
                        rng: np.random.Generator | None = None, uniforms=None):
    """Partial sums of one copy at each grid point.

    Draws one block of ``block_width(n)`` uniforms (layout in the module
    docstring) from ``rng`` unless the block is given as ``uniforms``.
    """
    a, b = grid_indices(n, grid)
    width = block_width(n)
    if uniforms is None:
        if rng is None:
            raise ConfigError("single_field_values needs either rng or uniforms")
        uniforms = rng.random(width)
    block = np.asarray(uniforms, dtype=float).reshape(1, -1)
    if block.shape[1] != width:
        raise ConfigError(f"need {width} uniforms per copy, got {block.shape[1]}")
    return _copy_values(law, n, a, b, block)[0]


def simulate_copies(n, grid, law: ps.PersistenceLaw, count: int, master_seed: int,
                    first_copy: int = 0) -> np.ndarray:
    """Values of copies ``first_copy ..`` individually, shape ``(count, len(grid))``.

    Copy ``i`` uses the same uniforms as in :func:`aggregate_field`, so the
    rows sum to the aggregated field of the same seed.
    """
    n = (int(n[0]), int(n[1]))
    a, b = grid_indices(n, grid)
    width = block_width(n)
    batch = max(1, _BATCH_UNIFORMS // width)
    gen = copy_stream(master_seed, first_copy, n)
    out = np.empty((int(count), len(a)), dtype=np.int64)
    for start in range(0, int(count), batch):
        k = min(batch, int(count) - start)
        out[start:start + k] = _copy_values(law, n, a, b, gen.random((k, width)))
    return out


def _sum_copies(law, n, a, b, master_seed, first, count, uniform_source):
    width = block_width(n)
    batch = max(1, _BATCH_UNIFORMS // width)
    total = np.zeros(len(a), dtype=np.int64)
    gen = None
    for start in range(first, first + count, batch):
        k = min(batch, first + count - start)
        if uniform_source is not None:
            blocks = np.asarray(uniform_source(start, k, width), dtype=float)
        else:
            # one generator walks through consecutive blocks
            gen = gen or copy_stream(master_seed, first, n)
            blocks = gen.random((k, width))
        total += _copy_values(law, n, a, b, blocks).sum(axis=0)
    return total


def _split(m, parts):
    edges = np.linspace(0, m, parts + 1).round().astype(int)
    return [(int(lo), int(hi - lo)) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]


def aggregate_field(n, grid, law: ps.PersistenceLaw, m: int, master_seed: int,
                    workers: int = 1, uniform_source=None) -> FieldRun:
    """Sum of ``m`` independent copies evaluated on ``grid``.

    ``uniform_source(first_copy, count, width)``, if given, replaces the
    Philox stream and must return the ``(count, width)`` uniform blocks.
    The result is identical for every ``workers`` value.
    """
    m = int(m)
    if m < 1:
        raise ConfigError(f"number of copies m must be at least 1, got {m!r}")
    n = (int(n[0]), int(n[1]))
    if min(n) < 1:
        raise ConfigError(f"lengths n={n!r} must be positive")
    a, b = grid_indices(n, grid)
    workers = max(1, int(workers))
    if workers == 1 or uniform_source is not None:
        values = _sum_copies(law, n, a, b, master_seed, 0, m, uniform_source)
    else:
        chunks = _split(m, workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                _sum_copies,
                *zip(*[(law, n, a, b, master_seed, lo, k, None) for lo, k in chunks]),
            ))
        values = np.sum(parts, axis=0, dtype=np.int64)
    return FieldRun(n, np.asarray(grid, dtype=float).reshape(-1, 2), values, m,
                    int(master_seed), law)


def empirical_cov(runs, pairs):
    """Mean and standard error of ``Y(s) * Y(t)`` across runs.

    ``runs`` has one row per run and one column per grid point; ``pairs``
    lists ``(s, t)`` column indices. Returns arrays ``(estimate, stderr)``.
    """
    y = np.asarray(runs, dtype=float)
    if y.ndim != 2 or y.shape[0] < 2:
        raise ConfigError("empirical_cov needs at least two runs")
    pairs = np.asarray(pairs, dtype=int).reshape(-1, 2)
    prod = y[:, pairs[:, 0]] * y[:, pairs[:, 1]]
    est = prod.mean(axis=0)
    err = prod.std(axis=0, ddof=1) / math.sqrt(y.shape[0])
    return est, err
