"""The fractional-operator facts behind the stability analysis, checked numerically.

For random piecewise-linear functions on random meshes we check that
I^mu undoes the Riemann-Liouville derivative, that the derivative is
coercive with its explicit constant, and the continuity bound for I^alpha.
"""

import numpy as np

from fracdg.harness.lemmas import continuity_case, identity_case, positivity_case, positivity_constant, random_dg

rng = np.random.default_rng(2024)

v = random_dg(rng, N=6)
print("mesh:", np.array2string(v.nodes, precision=3))
for mu in (0.2, 0.5, 0.8):
    dev = identity_case(v, mu, np.linspace(0.01, 1.0, 25))
    print(f"mu={mu}: max |I^mu D^mu v - v| = {dev:.2e}")

print("\ncoercivity  int (D^a v) v  >=  c(a) t^-a int v^2")
for alpha in (0.3, 0.5, 0.7):
    w = random_dg(rng, N=5, continuous=True)
    lhs, rhs = positivity_case(w, alpha)
    print(f"alpha={alpha}: c={positivity_constant(alpha):.4f}  lhs={lhs:.5f}  rhs={rhs:.5f}  ratio={lhs / rhs:.2f}")

print("\ncontinuity  |int (I^a v) w|^2 <= sec^2(a pi/2) int (I^a v) v int (I^a w) w")
for alpha in (0.3, 0.5, 0.7):
    a = random_dg(rng, N=4, continuous=True)
    b = random_dg(rng, N=4, continuous=True)
    b = type(b)(a.nodes, b.right, b.left)
    lhs, rhs = continuity_case(a, b, alpha)
    print(f"alpha={alpha}: lhs={lhs:.5f}  rhs={rhs:.5f}  ratio={lhs / rhs:.2f}")
