"""Experiment configuration: a TOML file with nested tables.

Example::

    [regime]
    kind = "critical"          # independent | critical | noncritical_i | noncritical_ii | boundary
    # gamma = 0.4              # n2 = round(n1**gamma); fixed for the critical regime

    [law]
    variant = "Dependent"      # or "Independent" with H1, H2
    alpha1 = 1.0
    alpha2 = 1.0
    angular = { variant = "PointMass", w1 = 0.5 }

    [run]
    n1 = [32, 64, 128]
    m_factor = 4.0             # m = ceil(m_factor * gap(n)), m_factor >= 4
    # m = 100                  # fixed number of copies instead of the rule
    replicates = 400
    seed = 20240601
    pairs = [[[1.0, 1.0], [1.0, 1.0]], [[0.5, 1.0], [1.0, 1.0]]]
    theory = "effective"       # or "stated"

    [tolerances]
    exact_rtol = 1e-8
    cov_G_rtol = 1e-3
    exact_max_n = 4096

``gap(n)`` is ``n1**(2-2H1) * n2**(2-2H2)`` for sheet limits and
``n1**alpha1`` at the critical speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import tomli

from .. import persistence as ps
from ..errors import ConfigError
from ..regimes import RegimeSpec

DEFAULT_TOLERANCES = {"exact_rtol": 1e-8, "cov_G_rtol": 1e-3, "exact_max_n": 4096}
THEORY_FORMS = ("effective", "stated")


def _point(p):
    p = tuple(float(x) for x in p)
    if len(p) != 2 or not all(0.0 <= x <= 1.0 for x in p):
        raise ConfigError(f"time point {p!r} must be a pair in [0, 1]^2")
    return p


@dataclass(frozen=True)
class ExperimentConfig:
    spec: RegimeSpec
    n1_sequence: tuple[int, ...]
    pairs: tuple[tuple[tuple[float, float], tuple[float, float]], ...]
    replicates: int = 400
    master_seed: int = 0
    m_factor: float = 4.0
    m_fixed: Optional[int] = None
    theory: str = "effective"
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        seq = tuple(int(n) for n in self.n1_sequence)
        if not seq or min(seq) < 1:
            raise ConfigError(f"n1 sequence {self.n1_sequence!r} must be non-empty and positive")
        object.__setattr__(self, "n1_sequence", seq)
        pairs = tuple((_point(s), _point(t)) for s, t in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if int(self.replicates) < 1:
            raise ConfigError("replicates must be at least 1")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.m_fixed is None and not self.m_factor >= 4.0:
            raise ConfigError(f"m_factor={self.m_factor!r} must be at least 4")
        if self.m_fixed is not None and int(self.m_fixed) < 1:
            raise ConfigError("m must be at least 1")
        if self.theory not in THEORY_FORMS:
            raise ConfigError(f"theory must be one of {THEORY_FORMS}, got {self.theory!r}")
        tol = dict(DEFAULT_TOLERANCES)
        tol.update(self.tolerances or {})
        object.__setattr__(self, "tolerances", tol)
        # every pair must hit at least one lattice point at the smallest n
        n = self.n_for(min(seq))
        for s, t in pairs:
            for p in (s, t):
                if any(math.floor(n[k] * p[k] * (1 + 1e-12)) < 1 for k in range(2)):
                    raise ConfigError(
                        f"time point {p!r} covers no lattice point at the smallest n={n!r}")

    def n_for(self, n1: int) -> tuple[int, int]:
        return int(n1), self.spec.n2(n1)

    def m_for(self, n) -> int:
        if self.m_fixed is not None:
            return int(self.m_fixed)
        return int(math.ceil(self.m_factor * self.spec.gap(n)))

    def grid(self):
        """Distinct time points used by the pairs, in first-seen order."""
        seen = []
        for s, t in self.pairs:
            for p in (s, t):
                if p not in seen:
                    seen.append(p)
        return seen

    def to_dict(self):
        run = {
            "n1": list(self.n1_sequence),
            "replicates": int(self.replicates),
            "seed": int(self.master_seed),
            "pairs": [[list(s), list(t)] for s, t in self.pairs],
            "theory": self.theory,
        }
        if self.m_fixed is None:
            run["m_factor"] = float(self.m_factor)
        else:
            run["m"] = int(self.m_fixed)
        regime = {"kind": self.spec.kind}
        if self.spec.gamma is not None:
            regime["gamma"] = float(self.spec.gamma)
        return {
            "regime": regime,
            "law": self.spec.law.to_dict(),
            "run": run,
            "tolerances": dict(self.tolerances),
        }

    def with_seed(self, seed: int) -> "ExperimentConfig":
        d = self.to_dict()
        d["run"]["seed"] = int(seed)
        return config_from_dict(d)


def config_from_dict(record: dict) -> ExperimentConfig:
    try:
        regime = record["regime"]
        law = ps.law_from_dict(record["law"])
        run = record["run"]
        spec = RegimeSpec(regime["kind"], law, regime.get("gamma"))
        return ExperimentConfig(
            spec=spec,
            n1_sequence=run["n1"],
            pairs=run.get("pairs", [[[1.0, 1.0], [1.0, 1.0]]]),
            replicates=run.get("replicates", 400),
            master_seed=run.get("seed", 0),
            m_factor=run.get("m_factor", 4.0),
            m_fixed=run.get("m"),
            theory=run.get("theory", "effective"),
            tolerances=record.get("tolerances", {}),
        )
    except KeyError as exc:
        raise ConfigError(f"config is missing the key {exc}") from None
    except TypeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            record = tomli.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: invalid TOML: {exc}") from None
    return config_from_dict(record)
