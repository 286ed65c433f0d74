"""The limit field at the critical speed.

When n1**alpha1 and n2**alpha2 grow together the normalised aggregated
field converges to a Gaussian field G whose covariance does not factor
over the two axes. This demo evaluates that covariance two ways, shows
the exact finite-n covariance approaching it and checks a Monte Carlo run.

Run: python demos/02_critical_limit.py
"""

import math

import numpy as np

from aggfield import fields, regimes, theory as th
from aggfield.angular import PointMass
from aggfield.persistence import Dependent

lam = PointMass(0.5)
alpha = (1.0, 1.0)
law = Dependent(*alpha, lam)
spec = regimes.RegimeSpec("critical", law)

print("Spectral density: with alpha = (1, 1) and a symmetric point mass it is pi / (|t1| + |t2|)")
for theta in [(0.5, 0.5), (1.0, 3.0), (10.0, 0.1)]:
    print(f"  psi{theta} = {th.psi(theta, alpha, lam):.8f}   pi/(|t1|+|t2|) = {math.pi / sum(theta):.8f}")

res = th.cov_G_detailed((1, 1), (1, 1), alpha, lam, rtol=1e-6)
kern = th.cov_G_kernel((1, 1), (1, 1), alpha, lam)
print(f"\nVar G(1,1): frequency route {res.value:.10f} (error bound {res.error:.1e}),"
      f" time-domain route {kern:.10f}")

print("\nExact covariance of one copy, normalised, against the limit:")
for n in (16, 64, 256, 1024):
    exact = th.exact_cov_Sn((n, n), (1, 1), (1, 1), law) / regimes.normalization(spec, (n, n), 1) ** 2
    print(f"  n = {n:5d}: {exact:.6f}  relative gap {exact / kern - 1:+.4f}")

print("\nOperator scaling: Cov G(lam^E s, lam^E t) = lam^(2/a1 + 2/a2 - 1) Cov G(s, t)")
for l in (0.5, 2.0, 4.0):
    lhs, rhs = th.scaling_check(alpha, lam, l, (0.25, 0.25), (0.25, 0.25))
    print(f"  lam = {l}: ratio {lhs / rhs:.8f}")

n, reps = (32, 32), 300
m = math.ceil(4 * spec.gap(n))
y = np.array([fields.aggregate_field(n, [(1, 1)], law, m, seed).values[0] for seed in range(reps)])
y = y / regimes.normalization(spec, n, m)
print(f"\nMonte Carlo at n = {n}, m = {m}, {reps} replicates: Var = {y.var():.4f} "
      f"+/- {np.std(y**2) / math.sqrt(reps):.4f}; exact finite-n value "
      f"{th.exact_cov_Sn(n, (1, 1), (1, 1), law) / regimes.normalization(spec, n, 1) ** 2:.4f}")
