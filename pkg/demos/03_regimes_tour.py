"""A tour of the growth regimes.

For each regime the normalised exact covariance at (1, 1) is compared
with the limit covariance along a sequence of grid sizes. The
non-critical and boundary regimes converge slowly; the boundary case
only at a logarithmic rate.

Run: python demos/03_regimes_tour.py
"""

from aggfield import regimes, theory as th
from aggfield.angular import PointMass
from aggfield.persistence import Dependent, Independent

PM = PointMass(0.5)
specs = [
    regimes.RegimeSpec("independent", Independent(0.8, 0.9)),
    regimes.RegimeSpec("critical", Dependent(1.0, 1.0, PM)),
    regimes.RegimeSpec("noncritical_i", Dependent(1.5, 1.0, PM), gamma=0.4),
    regimes.RegimeSpec("noncritical_ii", Dependent(0.6, 1.0, PM), gamma=0.3),
    regimes.RegimeSpec("boundary", Dependent(1.0, 1.2, PM), gamma=0.4),
]

s = t = (1.0, 1.0)
for spec in specs:
    H1, H2, _ = regimes.regime_constants(spec)
    limit = regimes.limit_cov(spec, s, t)
    hurst = "non-sheet limit" if H1 is None else f"H = ({H1:.3f}, {H2:.3f})"
    print(f"{spec.kind:<15} {hurst:<20} limit Var = {limit:.5f}")
    for n1 in (64, 512, 4096):
        n = (n1, spec.n2(n1))
        exact = th.exact_cov_Sn(n, s, t, spec.law) / regimes.normalization(spec, n, 1) ** 2
        print(f"    n = {str(n):<12} exact / limit = {exact / limit:.4f}")
