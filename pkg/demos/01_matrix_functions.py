"""Matrix functions through the eigenbasis.

A univariate map f acts on an SPD matrix through its eigenvalues. Its
differential is a Hadamard product with the first divided differences, and
its Hessian uses the second divided differences. This script checks both
against finite differences and shows the coincident-eigenvalue branch.
"""

import numpy as np

from spdgeom import (
    divided_diff_1,
    log_map,
    power,
    random_spd,
    random_symmetric,
    univariate_apply,
    univariate_differential,
    univariate_hessian,
)

rng = np.random.default_rng(0)
S = random_spd(3, rng)
X = random_symmetric(3, rng)
Y = random_symmetric(3, rng)
f = log_map()

print("eigenvalues of S:", np.linalg.eigvalsh(S).round(4))
print("log S is symmetric:", np.allclose(univariate_apply(f, S), univariate_apply(f, S).T))

h = 1e-6
fd = (univariate_apply(f, S + h * X) - univariate_apply(f, S - h * X)) / (2 * h)
exact = univariate_differential(f, S, X)
print(f"differential vs central difference: {np.linalg.norm(fd - exact):.2e}")

h = 1e-4
fd2 = (univariate_differential(f, S + h * Y, X) - univariate_differential(f, S - h * Y, X)) / (2 * h)
print(f"Hessian vs difference of differentials: {np.linalg.norm(fd2 - univariate_hessian(f, S, X, Y)):.2e}")

# Near-coincident eigenvalues switch to the derivative at the midpoint.
for gap in (1e-3, 1e-8, 0.0):
    print(f"log[1](2, 2+{gap:g}) = {divided_diff_1(f, 2.0, 2.0 + gap):.12f}")

sqrt = power(0.5)
R = univariate_apply(sqrt, S)
print(f"sqrt(S) squared equals S: {np.linalg.norm(R @ R - S):.2e}")
