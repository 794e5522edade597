"""Closed-form kernel moments next to the graded quadrature oracle.

The history term of the scheme needs integrals of the basis functions
against omega_beta(t - a). For a at the left end of the interval the
integrand is singular, which is exactly where plain Gauss rules struggle.
"""

import numpy as np

from fracdg.frackernel import kernel_moment, omega, quadrature_oracle
from fracdg.fem1d import gauss_points

interval = (0.2, 0.25)
tl, tr = interval
k = tr - tl

print(f"moments over {interval}, q = 0,1,2")
print(f"{'a':>6} {'beta':>5} {'q':>2} {'closed form':>22} {'oracle':>22} {'rel diff':>10}")
for a in (tl, 0.1, 0.0):
    for beta in (0.3, 1.4):
        for q in range(3):
            exact = kernel_moment(interval, a, beta, q)
            f = lambda r: omega(beta, (tl - a) + r) * (r / k) ** q
            sing = "left" if a == tl else None
            ref = quadrature_oracle(f, interval, sing, beta - 1.0 if sing else 0.0, local=True)
            print(f"{a:6.2f} {beta:5.2f} {q:2d} {exact:22.15e} {ref:22.15e} {abs(exact - ref) / ref:10.1e}")

# a single 8-point Gauss rule on the singular case, for contrast
s, w = gauss_points(8)
naive = k * np.sum(w * omega(0.3, k * s))
exact = kernel_moment(interval, tl, 0.3, 0)
print(f"\nplain 8-point Gauss for beta=0.3, a=t_left: relative error {abs(naive - exact) / exact:.1e}")
