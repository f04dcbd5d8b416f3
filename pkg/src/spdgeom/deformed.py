"""Deformed metrics: pullbacks of metrics by univariate diffeomorphisms.

Distance, geodesics, logarithm and parallel transport are implemented for
deformations of the Euclidean metric, where they are pulled back from
straight lines in ``Sym(n)``. Other bases participate through their kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainExitError, NotDiffeomorphismError, UnsupportedBaseError
from .kernels import KernelMap, builtin_kernels, kernel_metric_eval
from .linalg import (
    ScalarFunction,
    as_eigh,
    divided_diff_1,
    identity,
    log_map,
    power,
    sym_eigendecompose,
    to_eigenbasis,
    univariate_apply,
    univariate_differential,
    univariate_differential_inverse,
)


@dataclass(frozen=True)
class MetricHandle:
    """A realized O(n)-invariant metric.

    ``kind`` is one of ``"euclidean"``, ``"kernel"``, ``"deformed-euclidean"``
    or ``"deformed"``. For deformed kinds, ``base`` and ``deformation`` record
    the pullback and ``scale`` its constant factor; ``kernel`` always holds
    the resulting kernel.
    """

    kind: str
    kernel: KernelMap
    deformation: ScalarFunction | None = None
    scale: float = 1.0
    base: MetricHandle | None = None
    name: str = ""

    def inner(self, sigma, X, Y) -> float:
        if self.kind == "euclidean":
            return self.scale * float(np.sum(np.asarray(X) * np.asarray(Y)))
        return kernel_metric_eval(self.kernel, sigma, X, Y)

    def pullback_inner(self, sigma, X, Y) -> float:
        """Evaluate through the base metric, ``scale * g_{f(S)}(d_S f(X), d_S f(Y))``."""
        if self.deformation is None:
            return self.inner(sigma, X, Y)
        f = self.deformation
        eig = as_eigh(sigma)
        fs = univariate_apply(f, eig)
        return self.scale * self.base.inner(
            fs, univariate_differential(f, eig, X), univariate_differential(f, eig, Y)
        )

    def norm(self, sigma, X) -> float:
        return float(np.sqrt(self.inner(sigma, X, X)))

    @property
    def flat_map(self) -> ScalarFunction:
        """The deformation of a deformed-Euclidean metric (identity for Euclidean)."""
        if self.kind == "euclidean":
            return identity()
        if self.kind == "deformed-euclidean":
            return self.deformation
        raise UnsupportedBaseError(
            f"{self.name or self.kind}: closed-form operations need a Euclidean base"
        )


def euclidean() -> MetricHandle:
    return MetricHandle("euclidean", builtin_kernels()["euclidean"].kernel, name="euclidean")


def kernel_metric(kernel: KernelMap) -> MetricHandle:
    return MetricHandle("kernel", kernel, name=kernel.name)


def pullback_kernel(kernel: KernelMap, f: ScalarFunction, scale: float = 1.0) -> KernelMap:
    """Kernel of ``scale * f^* g``: ``phi(f(x), f(y)) / (scale * f[1](x, y)^2)``."""
    phi = kernel.phi

    def pulled(x, y):
        return phi(f(x), f(y)) / (scale * divided_diff_1(f, x, y) ** 2)

    return KernelMap(f"{kernel.name}@{f.name}", pulled)


def deform_metric(base: MetricHandle, f: ScalarFunction, scale: float = 1.0, name: str = "") -> MetricHandle:
    """Pullback ``scale * f^* g`` of ``base`` by a univariate diffeomorphism."""
    if not f.is_diffeomorphism:
        raise NotDiffeomorphismError(f"{f.name} is not flagged as a diffeomorphism")
    if base.kind == "euclidean":
        e_scale = base.scale
        kernel = KernelMap(
            f"euclidean@{f.name}",
            lambda x, y: 1.0 / (scale * e_scale * divided_diff_1(f, x, y) ** 2),
        )
        kind = "deformed-euclidean"
        scale = scale * e_scale
        base = euclidean()
    else:
        kernel = pullback_kernel(base.kernel, f, scale)
        kind = "deformed"
    return MetricHandle(kind, kernel, f, scale, base, name or kernel.name)


def log_euclidean() -> MetricHandle:
    return deform_metric(euclidean(), log_map(), name="log-euclidean")


def power_euclidean(p: float) -> MetricHandle:
    """``(1/p^2) pow_p^* g^E``; ``p = 0`` gives log-Euclidean."""
    if p == 0:
        return log_euclidean()
    return deform_metric(euclidean(), power(p), 1.0 / p**2, name=f"power-euclidean({p:g})")


def affine_invariant() -> MetricHandle:
    return kernel_metric(builtin_kernels()["affine-invariant"].kernel)


def power_affine(p: float) -> MetricHandle:
    if p == 0:
        return log_euclidean()
    return deform_metric(affine_invariant(), power(p), 1.0 / p**2, name=f"power-affine({p:g})")


def bures_wasserstein() -> MetricHandle:
    return kernel_metric(builtin_kernels()["bures-wasserstein"].kernel)


def bkm() -> MetricHandle:
    return kernel_metric(builtin_kernels()["bkm"].kernel)


def power_wasserstein(p: float) -> MetricHandle:
    """``(1/p^2) pow_p^* g^BW``; ``p = 0`` is taken as log-Euclidean scaled by 1/4."""
    if p == 0:
        return deform_metric(euclidean(), log_map(), 0.25, name="power-wasserstein(0)")
    return deform_metric(bures_wasserstein(), power(p), 1.0 / p**2, name=f"power-wasserstein({p:g})")


def alpha_procrustes(alpha: float) -> MetricHandle:
    """Alpha-Procrustes metric, i.e. power-Wasserstein with ``p = 2 alpha``."""
    return power_wasserstein(2.0 * alpha)


def deformed_distance(handle: MetricHandle, sigma, lam) -> float:
    """``sqrt(scale) * ||u(sigma) - u(lam)||_F`` for deformed-Euclidean metrics."""
    f = handle.flat_map
    diff = univariate_apply(f, sigma) - univariate_apply(f, lam)
    return float(np.sqrt(handle.scale) * np.linalg.norm(diff))


def _interval_end(valid: Callable[[float], bool], direction: float, t_max: float = 1e12) -> float:
    t = 1.0
    while valid(direction * t):
        t *= 2.0
        if t > t_max:
            return direction * np.inf
    good, bad = t / 2.0 if t > 1.0 else 0.0, t
    for _ in range(200):
        mid = 0.5 * (good + bad)
        if mid in (good, bad):
            break
        if valid(direction * mid):
            good = mid
        else:
            bad = mid
    return direction * good


@dataclass(frozen=True)
class GeodesicCurve:
    """Callable ``t -> gamma(t)`` defined on the closed interval ``domain``."""

    evaluator: Callable[[float], np.ndarray]
    domain: tuple[float, float]

    def __call__(self, t: float) -> np.ndarray:
        lo, hi = self.domain
        if not lo <= t <= hi:
            raise DomainExitError(f"t={t} outside geodesic domain [{lo}, {hi}]")
        return self.evaluator(t)


def flat_geodesic(f: ScalarFunction, sigma, X) -> GeodesicCurve:
    """``gamma(t) = f^{-1}(f(sigma) + t d_sigma f(X))`` with its validity interval.

    The interval is where every eigenvalue of ``f(sigma) + t d_sigma f(X)``
    lies in the image of ``f``, found by bisection in each direction.
    """
    if f.inverse is None:
        raise NotDiffeomorphismError(f"{f.name} has no inverse")
    eig = as_eigh(sigma)
    A = univariate_apply(f, eig)
    V = univariate_differential(f, eig, X)
    lo, hi = f.image

    def valid(t):
        d = np.linalg.eigvalsh(A + t * V)
        return bool(d[0] > lo and d[-1] < hi)

    domain = (_interval_end(valid, -1.0), _interval_end(valid, 1.0))
    finv = f.inverse
    sigma0 = eig.matrix

    def evaluator(t):
        if t == 0:
            return sigma0
        e = sym_eigendecompose(A + t * V)
        out = (e.P * finv(e.d)) @ e.P.T
        return 0.5 * (out + out.T)

    return GeodesicCurve(evaluator, domain)


def deformed_geodesic(handle: MetricHandle, sigma, X) -> GeodesicCurve:
    return flat_geodesic(handle.flat_map, sigma, X)


def deformed_log(handle: MetricHandle, sigma, lam) -> np.ndarray:
    """``(d_sigma f)^{-1}(f(lam) - f(sigma))``."""
    f = handle.flat_map
    eig = as_eigh(sigma)
    return univariate_differential_inverse(f, eig, univariate_apply(f, lam) - univariate_apply(f, eig))


def deformed_parallel_transport(handle: MetricHandle, sigma, lam, X) -> np.ndarray:
    """Curve-independent transport ``(d_lam f)^{-1}(d_sigma f(X))`` of a flat metric."""
    f = handle.flat_map
    return univariate_differential_inverse(f, lam, univariate_differential(f, sigma, X))


class LimitRow(NamedTuple):
    p: float
    value: float
    error: float


@dataclass
class LimitReport:
    rows: list[LimitRow]
    limit: float
    rate: float


def power_family_limit_check(base: MetricHandle, sigma, X, p_sequence) -> LimitReport:
    """Compare ``(1/p^2) g_{sigma^p}(d pow_p(X), d pow_p(X))`` with its ``p -> 0`` limit.

    The limit is ``g_I(d_sigma log(X), d_sigma log(X))``. ``rate`` is the
    least-squares slope of ``log(error)`` against ``log(|p|)``; nan when
    fewer than two errors are positive.
    """
    eig = as_eigh(sigma)
    n = eig.n
    L = univariate_differential(log_map(), eig, X)
    limit = base.inner(np.eye(n), L, L)
    rows = []
    for p in p_sequence:
        f = power(p)
        dX = univariate_differential(f, eig, X)
        value = base.inner(univariate_apply(f, eig), dX, dX) / p**2
        rows.append(LimitRow(float(p), float(value), abs(value - limit)))
    pos = [(abs(r.p), r.error) for r in rows if r.error > 0 and r.p != 0]
    rate = float("nan")
    if len(pos) >= 2:
        lp, le = np.log(np.array(pos)).T
        if np.ptp(lp) > 0:
            rate = float(np.polyfit(lp, le, 1)[0])
    return LimitReport(rows, float(limit), rate)


def sylvester_solve(sigma, X) -> np.ndarray:
    """Solve ``sigma S + S sigma = X``; in the eigenbasis ``S'_ij = X'_ij / (d_i + d_j)``."""
    eig = as_eigh(sigma)
    Xp = to_eigenbasis(eig, X)
    S = eig.P @ (Xp / (eig.d[:, None] + eig.d[None, :])) @ eig.P.T
    return 0.5 * (S + S.T)


def bures_wasserstein_inner(sigma, X, Y) -> float:
    """``tr(sigma S(X) S(Y))`` with ``S`` the Sylvester solution."""
    sigma = np.asarray(as_eigh(sigma).matrix)
    return float(np.trace(sigma @ sylvester_solve(sigma, X) @ sylvester_solve(sigma, Y)))
