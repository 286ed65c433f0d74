"""Monte Carlo experiments and exact-covariance convergence tables."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy import stats

from .. import fields
from .. import persistence as ps
from .. import regimes
from .. import theory as th
from ..errors import ConfigError
from .config import ExperimentConfig
from .report import CovReport


def replicate_seed(master_seed: int, replicate: int) -> int:
    """64-bit seed of one replicate, derived from ``(master_seed, replicate)``."""
    state = np.random.SeedSequence([int(master_seed), int(replicate)]).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def _replicate_block(law, n, m, grid, master_seed, first, count):
    out = np.empty((count, len(grid)), dtype=np.int64)
    for i in range(count):
        seed = replicate_seed(master_seed, first + i)
        out[i] = fields.aggregate_field(n, grid, law, m, seed).values
    return out


def simulate_replicates(law, n, m, grid, replicates, master_seed, workers=1):
    """Aggregated sums for each replicate, shape ``(replicates, len(grid))``.

    Replicates are split into contiguous blocks across ``workers`` processes
    and reassembled in replicate order, so the result does not depend on
    ``workers``.
    """
    grid = [tuple(p) for p in grid]
    workers = max(1, int(workers))
    if workers == 1 or replicates < 2:
        return _replicate_block(law, n, m, grid, master_seed, 0, replicates)
    edges = np.linspace(0, replicates, min(workers, replicates) + 1).round().astype(int)
    jobs = [(int(lo), int(hi - lo)) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_replicate_block, law, n, m, grid, master_seed, lo, k)
                   for lo, k in jobs]
        blocks = [f.result() for f in futures]
    return np.concatenate(blocks, axis=0)


def gaussianity(y):
    """Sample skewness and excess kurtosis with their standard errors under normality."""
    y = np.asarray(y, dtype=float)
    N = y.size
    if N < 4:
        raise ConfigError("gaussianity diagnostics need at least 4 samples")
    ses = math.sqrt(6.0 * N * (N - 1) / ((N - 2) * (N + 1) * (N + 3)))
    sek = 2.0 * ses * math.sqrt((N * N - 1.0) / ((N - 3) * (N + 5)))
    return {
        "skewness": float(stats.skew(y, bias=False)),
        "skewness_se": ses,
        "excess_kurtosis": float(stats.kurtosis(y, fisher=True, bias=False)),
        "excess_kurtosis_se": sek,
    }


def _theory(config: ExperimentConfig, s, t):
    if config.theory == "stated":
        return regimes.stated_limit_cov(config.spec, s, t)
    if config.spec.kind == "critical":
        law = config.spec.law
        return th.cov_G(s, t, law.alpha, law.angular, rtol=config.tolerances["cov_G_rtol"])
    return regimes.limit_cov(config.spec, s, t)


def _metadata(config: ExperimentConfig, timing):
    spec = config.spec
    meta = {"config": config.to_dict(), "seed": int(config.master_seed),
            "seed_rule": "derive(a, b) = SeedSequence([a, b]) as 64 bits; row n1 uses "
                         "derive(seed, n1), replicate r of it derive(that, r); copy i "
                         "starts i * block_width / 4 Philox counter steps into its stream"}
    consts = regimes.regime_constants(spec)
    meta["hurst"] = [consts.H1, consts.H2]
    meta["sigma2_stated"] = consts.sigma2
    if spec.is_dependent:
        meta["atom_mass"] = ps.atom_mass(spec.law)
    if timing is not None:
        meta["wall_clock_seconds"] = timing
    return meta


def _exact_normalised(config, n, s, t):
    limit = int(config.tolerances["exact_max_n"])
    if max(n) > limit:
        raise ConfigError(f"exact covariance at n={n} exceeds the per-axis limit exact_max_n={limit}")
    norm = regimes.normalization(config.spec, n, 1)
    cov = th.exact_cov_Sn(n, s, t, config.spec.law, rtol=config.tolerances["exact_rtol"])
    return cov / norm**2


def run_mc_experiment(config: ExperimentConfig, workers: int = 1, timing: bool = False,
                      exact: bool = True) -> CovReport:
    """Simulate ``replicates`` aggregated fields per ``n`` and estimate covariances.

    Rows report the limit covariance (``theory``), the exact finite-n
    covariance of the normalised statistic (``exact``, when ``exact`` is set
    and ``n`` is within ``exact_max_n``), the Monte Carlo ``estimate`` with
    its ``stderr`` and ``ratio = estimate / theory``. Diagonal pairs also
    carry skewness and excess kurtosis of the statistic.
    """
    started = time.perf_counter()
    spec = config.spec
    grid = config.grid()
    index = {p: i for i, p in enumerate(grid)}
    pairs_idx = [(index[s], index[t]) for s, t in config.pairs]
    theory = [_theory(config, s, t) for s, t in config.pairs]
    rows = []
    for n1 in config.n1_sequence:
        n = config.n_for(n1)
        m = config.m_for(n)
        values = simulate_replicates(spec.law, n, m, grid, config.replicates,
                                     replicate_seed(config.master_seed, n1), workers)
        y = values / regimes.normalization(spec, n, m)
        if config.replicates >= 2 and pairs_idx:
            est, err = fields.empirical_cov(y, pairs_idx)
        else:
            est = np.full(len(pairs_idx), math.nan)
            err = np.full(len(pairs_idx), math.nan)
        for k, (s, t) in enumerate(config.pairs):
            row = {"n1": n[0], "n2": n[1], "m": m, "s1": s[0], "s2": s[1], "t1": t[0],
                   "t2": t[1], "theory": theory[k], "estimate": float(est[k]),
                   "stderr": float(err[k]), "ratio": float(est[k]) / theory[k]}
            if exact and max(n) <= int(config.tolerances["exact_max_n"]):
                row["exact"] = _exact_normalised(config, n, s, t)
            else:
                row["exact"] = math.nan
            if s == t and config.replicates >= 4:
                row.update(gaussianity(y[:, index[s]]))
            rows.append(row)
    elapsed = time.perf_counter() - started if timing else None
    return CovReport("monte_carlo", rows, _metadata(config, elapsed))


def run_convergence_table(config: ExperimentConfig, use_exact: bool = True,
                          workers: int = 1, timing: bool = False) -> CovReport:
    """Normalised covariance against the limit across the ``n`` sequence.

    With ``use_exact`` the rows hold the exact finite-n value; otherwise a
    Monte Carlo estimate. ``error`` is value minus theory, ``error_ratio``
    the ratio of successive errors for the same pair.
    """
    started = time.perf_counter()
    if not use_exact:
        mc = run_mc_experiment(config, workers=workers, exact=False)
        rows = mc.rows
        key = "estimate"
    else:
        rows = []
        theory = [_theory(config, s, t) for s, t in config.pairs]
        for n1 in config.n1_sequence:
            n = config.n_for(n1)
            for k, (s, t) in enumerate(config.pairs):
                value = _exact_normalised(config, n, s, t)
                rows.append({"n1": n[0], "n2": n[1], "m": config.m_for(n), "s1": s[0],
                             "s2": s[1], "t1": t[0], "t2": t[1], "theory": theory[k],
                             "exact": value, "estimate": math.nan, "stderr": math.nan,
                             "ratio": value / theory[k]})
        key = "exact"
    previous = {}
    for row in rows:
        pair = (row["s1"], row["s2"], row["t1"], row["t2"])
        row["error"] = row[key] - row["theory"]
        prev = previous.get(pair)
        row["error_ratio"] = abs(row["error"] / prev) if prev else math.nan
        previous[pair] = row["error"]
    elapsed = time.perf_counter() - started if timing else None
    return CovReport("convergence_table", rows, _metadata(config, elapsed))
