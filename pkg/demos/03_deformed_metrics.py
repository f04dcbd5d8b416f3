"""Deformed metrics: pulling a base metric back through a power map.

The power-Euclidean metric is the Euclidean metric pulled back by
x -> x^p / p, so it is flat. Geodesics, logarithms and distances follow from
straight lines in the image. As p -> 0 it tends to the log-Euclidean metric.
"""

import numpy as np

from spdgeom import deformed_distance, deformed_geodesic, deformed_log, log_euclidean, power_euclidean, random_spd

rng = np.random.default_rng(2)
S, L = random_spd(3, rng), random_spd(3, rng)

for p in (1.0, 0.5, 0.1, 0.01):
    print(f"power-Euclidean p={p:<5}: d(S, L) = {deformed_distance(power_euclidean(p), S, L):.6f}")
print(f"log-Euclidean           : d(S, L) = {deformed_distance(log_euclidean(), S, L):.6f}")

m = power_euclidean(0.5)
V = deformed_log(m, S, L)
curve = deformed_geodesic(m, S, V)
print(f"geodesic reaches L at t = 1: {np.linalg.norm(curve(1.0) - L):.2e}")
print("geodesic domain:", curve.domain)
