"""A small sectional-curvature grid over MPE(alpha, beta).

All cells share one sample of unit-determinant diagonal base points and
random symmetric planes. Diagonal cells are flat, and on the anti-diagonal
the minimum approaches -alpha^2/2. The full study lives in the command
``spd-geom curvature-grid``.
"""

from spdgeom import GridConfig, curvature_grid, grid_csv

cfg = GridConfig(alpha_range=(-1.0, 1.0), beta_range=(-1.0, 1.0), step=0.5, n_matrices=200, n_planes=200)
rows = curvature_grid(cfg)
print(grid_csv(rows))

for r in rows:
    if r.alpha == -r.beta and r.alpha > 0:
        print(f"power-affine alpha={r.alpha}: kappa_min {r.kappa_min:.4f}, bound {-r.alpha ** 2 / 2:.4f}")
