import numpy as np

from spdgeom.linalg import random_spd, random_symmetric


def spd(rng, n=3, spread=1.0):
    return random_spd(n, rng, spread)


def sym(rng, n=3):
    return random_symmetric(n, rng)


def rel(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / max(1e-300, np.max(np.abs(b))))


def fd_curvature(m, sigma, X, Y, Z, T, h=1e-4):
    """``R(X, Y, Z, T) = -g(R(X, Y) Z, T)`` from the connection by finite differences.

    With constant fields, ``nabla_X nabla_Y Z = d_X Gamma(Y, Z) + Gamma(X, Gamma(Y, Z))``.
    """
    from spdgeom.mixed import me_connection, me_metric_eval

    def dgamma(V, A, B):
        # five-point central difference: O(h^4) truncation at the same step
        G = lambda s: me_connection(m, sigma + s * h * V, A, B)  # noqa: E731
        return (8 * (G(1) - G(-1)) - (G(2) - G(-2))) / (12 * h)

    def nn(A, B, C):
        return dgamma(A, B, C) + me_connection(m, sigma, A, me_connection(m, sigma, B, C))

    RZ = nn(X, Y, Z) - nn(Y, X, Z)
    return -me_metric_eval(m, sigma, RZ, T)


ACCEPTANCE_LINES: list[str] = []
