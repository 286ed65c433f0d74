"""Persistent sign walks and the random persistence pair.

Run: python demos/01_persistence_and_walks.py
"""

import numpy as np

from aggfield import fields, persistence as ps
from aggfield.angular import BetaDensity, PointMass

rng = np.random.default_rng(2024)

print("A walk keeps its sign with probability q. Larger q means longer runs:")
for q in (0.5, 0.9, 0.99):
    walk = fields.simulate_walk(40, q, rng)
    steps = np.diff(walk.cumulative)
    print(f"  q={q:<5} " + "".join("+" if s > 0 else "-" for s in steps))

print("\nIndependent persistence: U = 2(1 - q) is Beta(2 - 2H, 1). Heavier mass near 0 as H -> 1:")
for H in (0.6, 0.8, 0.95):
    q = ps.sample_q_independent(H, rng.random(100_000))
    print(f"  H={H}: P(1 - q < 1e-3) = {np.mean(1 - q < 1e-3):.4f}")

print("\nDependent persistence couples the two axes through a radius and a direction.")
for lam in (PointMass(0.5), PointMass(0.1), BetaDensity(2.0, 2.0)):
    law = ps.Dependent(1.2, 0.8, lam)
    u1, u2 = ps.u_from_uniforms(law, rng.random(200_000), rng.random(200_000))
    inside = u1 < 1
    corr = np.corrcoef(np.log(u1[inside]), np.log(u2[inside]))[0, 1]
    print(f"  {lam!r:<32} clamp atom {ps.atom_mass(law):.3f} (MC {1 - inside.mean():.3f}),"
          f" corr(log U1, log U2) off the atom {corr:.3f}")

law = ps.Dependent(1.0, 1.0, PointMass(0.5))
print("\nLag correlations E[(1-U1)^l1 (1-U2)^l2] decay slowly:")
for lag in (1, 10, 100, 1000):
    print(f"  lag ({lag}, {lag}): {ps.correlation_rho(law, lag, lag):.5f}")
