"""Kernel metrics and the power-Wasserstein mean-kernel boundary.

Every metric in the catalog is written as g(X, Y) = sum X'_ij Y'_ij / phi(d_i, d_j)
in the eigenbasis. The power-Wasserstein family is a mean-kernel metric
for p <= 1 and again from a threshold p0 a little above 2.6 on. The scan
below locates p0 by bisection.
"""

import numpy as np

from spdgeom import builtin_kernels, kernel_metric_eval, mean_kernel_check, mean_kernel_scan, power_wasserstein_mean

rng = np.random.default_rng(1)
S = np.diag([0.5, 1.0, 3.0])
A = rng.standard_normal((3, 3))
X = (A + A.T) / 2

print("squared norms of one tangent vector under each catalog metric:")
for name, entry in sorted(builtin_kernels().items()):
    print(f"  {name:20s} {kernel_metric_eval(entry.kernel, S, X, X):.6f}")

for p in (0.5, 1.5, 3.0):
    report = mean_kernel_check(power_wasserstein_mean(p).mean)
    worst = report.violations[0] if report.violations else None
    print(f"p = {p}: mean kernel = {report.is_mean}" + (f", first violation {worst.axiom} at ({worst.x:.3g}, {worst.y:.3g})" if worst else ""))

result = mean_kernel_scan(2.5, 2.7, 0.05)
print("p0 bracket:", result.bracket)
