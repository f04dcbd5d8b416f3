"""Curvature of mixed-Euclidean metrics.

ME(u, v) pairs two maps, and the mixed-power-Euclidean family MPE(alpha, beta)
uses two powers. Diagonal alpha = beta gives the flat power-Euclidean metric,
while beta = -alpha gives the power-affine metric, with curvature bounded
below by -alpha^2/2. At the identity every ME curvature is a multiple of the
affine-invariant one.
"""

import numpy as np

from spdgeom import (
    MixedEuclideanMetric,
    affine_curvature_at_identity,
    exp_map,
    identity_curvature_factor,
    log_map,
    me_curvature,
    random_spd,
    random_symmetric,
    sectional_curvature,
)

rng = np.random.default_rng(3)
S = random_spd(3, rng)
X, Y, Z, T = (random_symmetric(3, rng) for _ in range(4))

for ab in [(1, 1), (1, 0), (1, -1), (2, -2), (0.5, 1.5)]:
    m = MixedEuclideanMetric.mpe(*ab)
    print(f"MPE{ab}: sectional curvature of span(X, Y) = {sectional_curvature(m, S, X, Y):+.6f}")

m = MixedEuclideanMetric(exp_map(), log_map())
lhs = me_curvature(m, np.eye(3), X, Y, Z, T)
rhs = identity_curvature_factor(m) * affine_curvature_at_identity(X, Y, Z, T)
print(f"ME(exp, log) at I: R = {lhs:.10f}, factor * R_affine = {rhs:.10f}")

# Scaling law for MPE: kappa at lambda*S is lambda^-(alpha+beta) times kappa at S.
m = MixedEuclideanMetric.mpe(2, 0.5)
k = sectional_curvature(m, S, X, Y)
for lam in (0.5, 2.0, 10.0):
    print(f"lambda = {lam:>4}: ratio {sectional_curvature(m, lam * S, X, Y) / k:.6f} vs {lam ** -2.5:.6f}")
