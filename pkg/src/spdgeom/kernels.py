"""Kernel metrics, mean kernel metrics and the power-Wasserstein means.

A kernel metric is the O(n)-invariant metric whose coefficients in the
eigenbasis of the base point are ``1 / phi(d_i, d_j)``. A mean kernel
metric has ``phi = a * m**theta`` for a symmetric homogeneous mean ``m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import EvaluationError, InvalidPowerError
from .linalg import as_eigh, divided_diff_1, log_map, power, to_eigenbasis

AXIOMS = ("symmetry", "homogeneity", "monotonicity", "betweenness")


@dataclass(frozen=True)
class KernelMap:
    """Symmetric positive bivariate function ``phi(x, y)``, vectorized."""

    name: str
    phi: Callable

    def __call__(self, x, y):
        return self.phi(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def matrix(self, d: np.ndarray) -> np.ndarray:
        """``[phi(d_i, d_j)]_{ij}``, batched over leading axes of ``d``."""
        return self(d[..., :, None], d[..., None, :])


@dataclass(frozen=True)
class MeanKernelSpec:
    """``phi(x, y) = a * m(x, y) ** theta``."""

    name: str
    mean: Callable
    a: float
    theta: float
    kernel: KernelMap = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mean, a, theta = self.mean, self.a, self.theta
        object.__setattr__(
            self, "kernel", KernelMap(self.name, lambda x, y: a * np.power(mean(x, y), theta))
        )


class CatalogEntry(NamedTuple):
    kernel: KernelMap
    spec: MeanKernelSpec


class Violation(NamedTuple):
    axiom: str
    x: float
    y: float
    magnitude: float


@dataclass
class MeanCheckReport:
    """Outcome of :func:`mean_kernel_check`; one worst violation per failed axiom."""

    violations: list[Violation]

    @property
    def is_mean(self) -> bool:
        return not self.violations

    def worst(self) -> Violation | None:
        if not self.violations:
            return None
        return max(self.violations, key=lambda v: v.magnitude)


def arithmetic_mean(x, y):
    return 0.5 * (np.asarray(x, dtype=float) + y)


def geometric_mean(x, y):
    return np.sqrt(np.asarray(x, dtype=float) * y)


def logarithmic_mean(x, y):
    """``(x - y) / (log x - log y)``, equal to ``x`` on the diagonal."""
    return 1.0 / divided_diff_1(log_map(), x, y)


def builtin_kernels() -> dict[str, CatalogEntry]:
    """Euclidean, log-Euclidean, affine-invariant, Bures-Wasserstein and BKM.

    Kernels are given in closed form; ``spec.kernel`` rebuilds each one
    from its mean decomposition.
    """

    def entry(name, phi, mean, a, theta):
        return CatalogEntry(KernelMap(name, phi), MeanKernelSpec(name, mean, a, theta))

    return {
        "euclidean": entry(
            "euclidean", lambda x, y: np.ones(np.broadcast(x, y).shape), arithmetic_mean, 1.0, 0.0
        ),
        "log-euclidean": entry(
            "log-euclidean", lambda x, y: logarithmic_mean(x, y) ** 2, logarithmic_mean, 1.0, 2.0
        ),
        "affine-invariant": entry(
            "affine-invariant", lambda x, y: x * y, geometric_mean, 1.0, 2.0
        ),
        "bures-wasserstein": entry(
            "bures-wasserstein", lambda x, y: 4.0 * (x + y) / 2.0, arithmetic_mean, 4.0, 1.0
        ),
        "bkm": entry("bkm", logarithmic_mean, logarithmic_mean, 1.0, 1.0),
    }


def kernel_metric_eval(kernel: KernelMap, sigma, X, Y) -> float:
    """``g_sigma(X, Y) = sum_ij X'_ij Y'_ij / phi(d_i, d_j)`` in the eigenbasis."""
    eig = as_eigh(sigma)
    Xp = to_eigenbasis(eig, X)
    Yp = to_eigenbasis(eig, Y)
    return float(np.sum(Xp * Yp / kernel.matrix(eig.d)))


def cometric_kernel(kernel: KernelMap) -> KernelMap:
    """Kernel of the cometric, ``1 / phi``."""
    phi = kernel.phi
    name = kernel.name[len("co-"):] if kernel.name.startswith("co-") else f"co-{kernel.name}"
    inner = getattr(phi, "_cometric_of", None)
    if inner is not None:
        return KernelMap(name, inner)

    def co_phi(x, y):
        return 1.0 / phi(x, y)

    co_phi._cometric_of = phi
    return KernelMap(name, co_phi)


def validate_kernel(kernel: KernelMap, n_points: int = 50, lo: float = 1e-3, hi: float = 1e3):
    """Check symmetry (1e-12 relative) and positivity on a log-spaced grid."""
    g = np.logspace(np.log10(lo), np.log10(hi), n_points)
    X, Y = np.meshgrid(g, g, indexing="ij")
    v, vt = kernel(X, Y), kernel(Y, X)
    if not (np.all(np.isfinite(v)) and np.all(v > 0)):
        raise EvaluationError(f"kernel {kernel.name} is not finite and positive on the grid")
    if np.max(np.abs(v - vt) / v) > 1e-12:
        raise EvaluationError(f"kernel {kernel.name} is not symmetric")


def completeness_of(spec: MeanKernelSpec) -> bool:
    """Mean kernel metrics are geodesically complete iff ``theta == 2``."""
    return abs(spec.theta - 2.0) <= 1e-12


def _worst(axiom, excess, X, Y):
    # first index of the max in C order: ties go to smaller x, then smaller y
    i = int(np.argmax(excess))
    if excess.flat[i] <= 0:
        return None
    return Violation(axiom, float(X.flat[i]), float(Y.flat[i]), float(excess.flat[i]))


def mean_kernel_check(
    m: Callable,
    n_points: int = 400,
    lo: float = 1e-3,
    hi: float = 1e3,
    scales=(0.1, 7.0, 100.0),
    mono_tol: float = 1e-9,
    sym_tol: float = 1e-12,
    hom_tol: float = 1e-9,
    between_tol: float = 1e-9,
) -> MeanCheckReport:
    """Numerically test the four axioms of a symmetric homogeneous mean.

    Symmetry and betweenness are tested pointwise on an ``n_points`` square
    log-spaced grid over ``[lo, hi]``; homogeneity via ``m(cx, cy) = c m(x, y)``
    for each ``c`` in ``scales``; monotonicity via one-sided steps
    ``m(x + 1e-4 x, y) >= m(x, y) - mono_tol * m(x, y)`` (and likewise in ``y``).
    Magnitudes are relative. Returns the worst violation per failing axiom.
    """
    g = np.logspace(np.log10(lo), np.log10(hi), n_points)
    X, Y = np.meshgrid(g, g, indexing="ij")

    def ev(a, b):
        with np.errstate(all="ignore"):
            out = np.asarray(m(a, b), dtype=float)
        if not np.all(np.isfinite(out)):
            raise EvaluationError("mean returned non-finite values on the grid")
        return np.broadcast_to(out, a.shape)

    base = ev(X, Y)
    if np.any(base <= 0):
        raise EvaluationError("mean returned non-positive values on the grid")
    found = []

    found.append(_worst("symmetry", np.abs(base - ev(Y, X)) / base - sym_tol, X, Y))

    hom = np.zeros_like(base)
    for c in scales:
        hom = np.maximum(hom, np.abs(ev(c * X, c * Y) - c * base) / (c * base))
    found.append(_worst("homogeneity", hom - hom_tol, X, Y))

    up_x = ev(X * (1 + 1e-4), Y)
    up_y = ev(X, Y * (1 + 1e-4))
    drop = np.maximum(base - up_x, base - up_y) / base
    found.append(_worst("monotonicity", drop - mono_tol, X, Y))

    lo_v = np.minimum(X, Y)
    hi_v = np.maximum(X, Y)
    outside = np.maximum(lo_v - base, base - hi_v) / hi_v
    found.append(_worst("betweenness", outside - between_tol, X, Y))

    return MeanCheckReport([v for v in found if v is not None])


def _check_power(p: float) -> float:
    p = float(p)
    if p == 0 or p == 2:
        raise InvalidPowerError(f"power-Wasserstein mean undefined for p={p:g}")
    return p


def power_wasserstein_kernel(p: float) -> KernelMap:
    """``phi(x, y) = 2 p^2 (x^p + y^p) ((x - y) / (x^p - y^p))^2``.

    Kernel of the Bures-Wasserstein metric pulled back by ``pow_p`` and
    scaled by ``1 / p^2``.
    """
    p = float(p)
    if p == 0:
        raise InvalidPowerError("p = 0 is the log-Euclidean limit, not a power map")
    f = power(p)

    def phi(x, y):
        return 2.0 * p * p * (np.power(x, p) + np.power(y, p)) / divided_diff_1(f, x, y) ** 2

    return KernelMap(f"power-wasserstein({p:g})", phi)


def power_wasserstein_mean(p: float) -> MeanKernelSpec:
    """Candidate mean decomposition of the power-Wasserstein kernel.

    ``m(x, y) = [((x^p + y^p) / 2) (p (x - y) / (x^p - y^p))^2]^(1 / (2 - p))``
    with ``a = 4`` and ``theta = 2 - p``, so ``m(x, x) = x`` and ``p = 1``
    gives the arithmetic mean of Bures-Wasserstein.
    """
    p = _check_power(p)
    f = power(p)

    def m(x, y):
        ratio = p / divided_diff_1(f, x, y)
        return np.power(0.5 * (np.power(x, p) + np.power(y, p)) * ratio * ratio, 1.0 / (2.0 - p))

    return MeanKernelSpec(f"power-wasserstein({p:g})", m, 4.0, 2.0 - p)


class ScanRow(NamedTuple):
    p: float
    is_mean: bool | None
    worst_axiom: str
    worst_violation: float


@dataclass
class ScanResult:
    rows: list[ScanRow]
    bracket: tuple[float, float] | None


def _is_mean_at(p: float, **kw) -> bool:
    return mean_kernel_check(power_wasserstein_mean(p).mean, **kw).is_mean


def mean_kernel_scan(
    p_lo: float, p_hi: float, step: float, bisect_iters: int = 30, **check_kw
) -> ScanResult:
    """Classify power-Wasserstein metrics as mean kernel metrics over a range of ``p``.

    ``p = 0`` and ``p = 2`` are reported as undefined (``is_mean=None``). The
    first non-mean -> mean transition is refined by bisection and returned as
    the ``p0`` bracket.
    """
    if step <= 0 or p_hi < p_lo:
        raise ValueError("need step > 0 and p_hi >= p_lo")
    count = int(np.floor((p_hi - p_lo) / step + 1e-9)) + 1
    rows = []
    for k in range(count):
        p = round(p_lo + k * step, 12)
        if abs(p) < 1e-12 or abs(p - 2.0) < 1e-12:
            rows.append(ScanRow(p, None, "undefined", float("nan")))
            continue
        report = mean_kernel_check(power_wasserstein_mean(p).mean, **check_kw)
        worst = report.worst()
        rows.append(
            ScanRow(p, report.is_mean, worst.axiom if worst else "", worst.magnitude if worst else 0.0)
        )

    bracket = None
    defined = [r for r in rows if r.is_mean is not None]
    for prev, cur in zip(defined, defined[1:]):
        if prev.is_mean is False and cur.is_mean is True and not (prev.p < 2.0 < cur.p):
            lo, hi = prev.p, cur.p
            for _ in range(bisect_iters):
                mid = 0.5 * (lo + hi)
                if _is_mean_at(mid, **check_kw):
                    hi = mid
                else:
                    lo = mid
            bracket = (lo, hi)
            break
    return ScanResult(rows, bracket)
