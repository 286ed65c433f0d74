"""Deterministic self-checks of the whole toolkit.

Every check compares a library value with an independently computed
one (closed form, brute force or a second quadrature route) and records
the discrepancy against a tolerance. Tolerance profiles scale all
tolerances at once.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .. import angular as am
from .. import fields
from .. import persistence as ps
from .. import regimes
from .. import theory as th

PROFILES = {"default": 1.0, "strict": 0.1, "loose": 10.0}


@dataclass
class CheckResult:
    name: str
    passed: bool
    error: float
    tolerance: float
    detail: str = ""


@dataclass
class ValidationReport:
    profile: str
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self):
        return [r for r in self.results if not r.passed]

    def lines(self):
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            yield f"{status}  {r.name}: error {r.error:.3e} (tol {r.tolerance:.1e}) {r.detail}"

    def to_dict(self):
        return {
            "profile": self.profile,
            "passed": self.passed,
            "results": [
                {"name": r.name, "passed": r.passed, "error": r.error,
                 "tolerance": r.tolerance, "detail": r.detail}
                for r in self.results
            ],
        }


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _beta_numeric(a, b):
    # weight='alg' integrates x^(a-1) (1-x)^(b-1) exactly
    val, _ = integrate.quad(lambda x: 1.0, 0.0, 1.0, weight="alg", wvar=(a - 1.0, b - 1.0),
                            epsabs=0.0, epsrel=1e-13)
    return val


def _overlap_cov(n, s, t, law):
    a1, b1 = int(n[0] * s[0]), int(n[0] * t[0])
    a2, b2 = int(n[1] * s[1]), int(n[1] * t[1])

    def counts(a, b, size):
        return {l: sum(1 for j in range(1, a + 1) if 1 <= j + l <= b)
                for l in range(-size, size + 1)}

    c1, c2 = counts(a1, b1, n[0]), counts(a2, b2, n[1])
    return sum(c1[l1] * c2[l2] * ps.correlation_rho(law, l1, l2)
               for l1 in c1 if c1[l1] for l2 in c2 if c2[l2])


# each check returns (error, detail); the error is compared with tol * scale


def _c_frak_examples(fn):
    exact = 16.0 * math.pi**1.5 / 3.0
    return _rel(fn["c_frak"](0.75), exact), f"c_frak(0.75) vs 16 pi^1.5 / 3 = {exact:.6f}"


def _c_frak_identity(fn):
    worst = 0.0
    for H in (0.6, 0.75, 0.9):
        numeric_C = th.check_cov_fbm(H, 1.0, 1.0)[0]
        ref = _beta_numeric(H - 0.5, 1.5 - H) * numeric_C
        worst = max(worst, _rel(fn["c_frak"](H), ref))
    return worst, "c_frak vs numeric Beta integral times numeric harmonizable constant"


def _fbm_examples(fn):
    errs = [
        abs(th.fbm_cov(0.5, 0.3, 0.7) - 0.3),
        abs(th.fbm_cov(0.8, 1.0, 1.0) - 1.0),
        abs(th.fbm_cov(0.75, 0.5, 1.0) - 0.5),
        abs(th.fbs_cov(0.5, 1.0, (0.3, 0.4), (0.7, 0.9)) - 0.108),
        abs(th.sigma_independent(0.75, 0.75) - math.sqrt(math.pi) / 2 / 0.375),
    ]
    return max(errs), "fbm/fbs covariances and sigma at reference points"


def _integrate_r_grid(fn):
    worst = 0.0
    for alpha, H, w, theta in itertools.product((0.5, 1.0, 1.5), (0.6, 1.0, 1.4),
                                                (0.2, 0.5, 0.8), (0.3, 1.0, 4.0)):
        gamma = 1.0 + (3.0 - 2.0 * H) / alpha
        num, closed = th.check_integrate_r(alpha, gamma, w, theta)
        worst = max(worst, _rel(num, closed))
    return worst, "radial integral vs Beta closed form on 81 points"


def _cov_fbm_grid(fn):
    worst = 0.0
    for H in (0.6, 0.75, 0.9):
        for s, t in itertools.product((0.3, 0.7, 1.0), repeat=2):
            num, _, closed = th.check_cov_fbm(H, s, t)
            worst = max(worst, _rel(num, closed))
    return worst, "harmonizable integral vs C_H * fbm_cov"


def _psi_closed_form(fn):
    pm = am.PointMass(0.5)
    grid = (0.25, 0.5, 1.0, 2.0, 4.0)
    worst = max(_rel(th.psi((a, b), (1.0, 1.0), pm), math.pi / (a + b))
                for a in grid for b in grid)
    return worst, "Psi vs pi / (|theta1| + |theta2|) for alpha = (1, 1), w1 = 1/2"


def _cov_G_routes(fn):
    worst = 0.0
    cases = [((1.0, 1.0), (1.0, 1.0), (1.0, 1.0), am.PointMass(0.5)),
             ((0.3, 0.8), (0.7, 0.4), (1.0, 1.0), am.PointMass(0.5)),
             ((1.0, 0.5), (0.6, 1.0), (1.3, 0.7), am.BetaDensity(2.0, 3.0))]
    for s, t, alpha, lam in cases:
        worst = max(worst, _rel(th.cov_G(s, t, alpha, lam), th.cov_G_kernel(s, t, alpha, lam)))
    return worst, "frequency-domain cov_G vs time-domain kernel route"


def _scaling(fn):
    worst = 0.0
    for lam in (0.5, 2.0, 4.0):
        lhs, rhs = th.scaling_check((1.0, 1.0), am.PointMass(0.5), lam, (0.25, 0.25), (0.25, 0.25))
        worst = max(worst, abs(lhs / rhs - 1.0))
    return worst, "operator scaling of cov_G, lambda in {0.5, 2, 4}"


def _parseval(fn):
    worst = 0.0
    for law in (ps.Independent(0.7, 0.6), ps.Dependent(1.0, 1.0, am.PointMass(0.5))):
        a = th.exact_cov_Sn((16, 16), (1.0, 1.0), (1.0, 1.0), law)
        b = th.parseval_cov_Sn((16, 16), (1.0, 1.0), (1.0, 1.0), law)
        worst = max(worst, _rel(b, a))
    return worst, "frequency-domain vs conditional closed-form covariance at n = (16, 16)"


def _overlap(fn):
    worst = 0.0
    for law in (ps.Independent(0.7, 0.6), ps.Dependent(1.5, 0.8, am.PointMass(0.3))):
        s, t = (0.5, 1.0), (1.0, 0.6)
        worst = max(worst, _rel(th.exact_cov_Sn((6, 5), s, t, law), _overlap_cov((6, 5), s, t, law)))
    return worst, "exact covariance vs overlap-count lag sum at n = (6, 5)"


def _pinned(fn):
    errs = [abs(th.exact_cov_Sn_given_q((2, 2), (1, 1), (1, 1), (0.5, 0.5)) - 4.0),
            abs(th.exact_cov_Sn_given_q((3, 3), (1, 1), (1, 1), (1 - 1e-14, 1 - 1e-14)) - 81.0)]
    return max(errs), "conditional covariance with i.i.d. and frozen signs"


def _rho_closed(fn):
    worst = 0.0
    law = ps.Independent(0.75, 0.6)
    for l1, l2 in ((1, 0), (3, 7), (20, 5)):
        k1, k2 = 2 - 2 * law.H1, 2 - 2 * law.H2
        exact = k1 * special.beta(k1, l1 + 1) * k2 * special.beta(k2, l2 + 1)
        worst = max(worst, _rel(ps.correlation_rho(law, l1, l2), exact))
    return worst, "lag correlation vs Beta closed form"


def _atom(fn):
    errs = [abs(ps.atom_mass(ps.Dependent(1.0, 1.0, am.PointMass(0.5))) - 0.5),
            abs(ps.atom_mass(ps.Dependent(1.0, 1.0, am.PointMass(0.9))) - 0.9),
            abs(ps.atom_mass(ps.Dependent(1.0, 1.0, am.BetaDensity(1.0, 1.0))) - 0.75)]
    return max(errs), "clamp-atom mass 1 - E min(w1, w2)"


def _angular(fn):
    b = am.BetaDensity(2.0, 3.0)
    num = _beta_numeric(2.0 + 1.0, 3.0 + 0.5) / special.beta(2.0, 3.0)
    logm = integrate.quad(lambda x: -math.log1p(-x) * x * (1 - x) ** 2 / special.beta(2.0, 3.0),
                          0, 1, epsabs=0, epsrel=1e-12)[0]
    errs = [_rel(b.moment(1.0, 0.5), num), _rel(b.log_moment(), logm),
            abs(am.BetaDensity(2.0, 2.0).moment(1.0, 1.0) - 0.2)]
    return max(errs), "Beta-density moments vs numeric integrals"


def _walks(fn):
    errs = [
        np.abs(fields.simulate_walk(4, 0.7, uniforms=[0.1, 0, 0, 0]).cumulative - [0, 1, 2, 3, 4]).max(),
        np.abs(fields.simulate_walk(4, 0.7, uniforms=[0.1, .9, .9, .9]).cumulative - [0, 1, 0, 1, 0]).max(),
    ]
    rng = np.random.default_rng(0)
    for _ in range(20):
        e1, e2 = rng.choice([-1, 1], 7), rng.choice([-1, 1], 5)
        grid = rng.random((6, 2))
        got = fields.field_from_steps(e1, e2, grid)
        a, b = fields.grid_indices((7, 5), grid)
        lattice = np.outer(e1, e2)
        want = [lattice[:i, :j].sum() for i, j in zip(a, b)]
        errs.append(np.abs(got - want).max())
    return float(max(errs)), "forced walks and product form vs lattice sums"


def _normalizations(fn):
    crit = regimes.RegimeSpec("critical", ps.Dependent(1.0, 1.0, am.PointMass(0.5)))
    errs = [abs(regimes.normalization_from_hurst((0.5, 0.5), (4, 9), 16) - 24.0),
            abs(regimes.normalization(crit, (8, 8), 4) - 128.0 / math.sqrt(8.0))]
    return max(errs), "normalisation divisors"


CHECKS = [
    ("fbm_fbs_sigma_examples", _fbm_examples, 1e-12),
    ("c_frak_example", _c_frak_examples, 1e-10),
    ("c_frak_identity", _c_frak_identity, 1e-6),
    ("integrate_r_identity", _integrate_r_grid, 1e-6),
    ("harmonizable_fbm_identity", _cov_fbm_grid, 1e-3),
    ("psi_closed_form", _psi_closed_form, 1e-4),
    ("cov_G_two_routes", _cov_G_routes, 2e-3),
    ("operator_scaling", _scaling, 5e-3),
    ("parseval_closure", _parseval, 1e-6),
    ("overlap_count_oracle", _overlap, 1e-8),
    ("pinned_persistence", _pinned, 1e-9),
    ("lag_correlation_closed_form", _rho_closed, 1e-8),
    ("atom_mass", _atom, 1e-12),
    ("angular_moments", _angular, 1e-10),
    ("walks_and_product_form", _walks, 0.5),
    ("normalizations", _normalizations, 1e-9),
]


def run_validation_suite(profile: str = "default", overrides: dict | None = None,
                         only=None) -> ValidationReport:
    """Run all checks with tolerances scaled by the profile.

    ``overrides`` replaces library functions seen by the checks (keys:
    ``"c_frak"``), which lets a test plant a faulty constant and watch the
    corresponding check fail. ``only`` restricts the run to named checks.
    """
    if profile not in PROFILES:
        raise ValueError(f"unknown tolerance profile {profile!r}; choose from {sorted(PROFILES)}")
    scale = PROFILES[profile]
    fn = {"c_frak": th.c_frak}
    fn.update(overrides or {})
    report = ValidationReport(profile)
    for name, check, tol in CHECKS:
        if only is not None and name not in only:
            continue
        started = time.perf_counter()
        try:
            err, detail = check(fn)
            err = float(err)
            passed = bool(err <= tol * scale)
        except Exception as exc:  # failures are report content
            err, detail, passed = math.inf, f"raised {type(exc).__name__}: {exc}", False
        detail = f"{detail} [{time.perf_counter() - started:.2f}s]"
        report.results.append(CheckResult(name, passed, err, tol * scale, detail))
    return report
