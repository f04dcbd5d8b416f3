"""Monte-Carlo sectional-curvature grid over MPE(alpha, beta) and the p0 scan.

Random draws use numpy's counter-based Philox bit generator, whose output
stream is fixed for a given seed across platforms.
"""

from __future__ import annotations

import csv
import io
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .kernels import ScanResult, mean_kernel_scan
from .mixed import MixedEuclideanMetric, plane_tensor, sectional_curvature_diagonal

log = logging.getLogger(__name__)

GRID_HEADER = ("alpha", "beta", "kappa_min", "kappa_max", "n_skipped")
SCAN_HEADER = ("p", "is_mean", "worst_axiom", "worst_violation")


def parse_range(text: str) -> tuple[float, float, float]:
    """Parse ``lo:hi:step`` (or ``lo:hi`` / a single value) into floats."""
    parts = [float(s) for s in text.split(":")]
    if len(parts) == 1:
        return parts[0], parts[0], 1.0
    if len(parts) == 2:
        return parts[0], parts[1], 1.0
    if len(parts) != 3:
        raise ValueError(f"bad range {text!r}; expected lo:hi:step")
    return parts[0], parts[1], parts[2]


def grid_values(lo: float, hi: float, step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError("step must be positive")
    k = (hi - lo) / step
    if hi < lo or abs(k - round(k)) > 1e-9 * max(1.0, abs(k)):
        raise ValueError(f"step {step} does not divide [{lo}, {hi}]")
    return np.round(lo + step * np.arange(int(round(k)) + 1), 12)


@dataclass(frozen=True)
class GridConfig:
    alpha_range: tuple[float, float] = (-2.0, 2.0)
    beta_range: tuple[float, float] = (-2.0, 2.0)
    step: float = 0.05
    dim: int = 3
    n_matrices: int = 1000
    n_planes: int = 1000
    seed: int = 42
    out_path: str | None = None

    def __post_init__(self):
        if self.dim < 2 or self.n_matrices < 1 or self.n_planes < 1:
            raise ValueError("need dim >= 2 and at least one matrix and plane")
        grid_values(*self.alpha_range, self.step)
        grid_values(*self.beta_range, self.step)

    @classmethod
    def fast(cls, **kw) -> GridConfig:
        kw = {"step": 0.25, "n_matrices": 100, "n_planes": 100, **kw}
        return cls(**kw)

    @property
    def alphas(self) -> np.ndarray:
        return grid_values(*self.alpha_range, self.step)

    @property
    def betas(self) -> np.ndarray:
        return grid_values(*self.beta_range, self.step)


class CurvatureSample(NamedTuple):
    d: np.ndarray  # (M, n) eigenvalues, each row with product 1
    X: np.ndarray  # (P, n, n)
    Y: np.ndarray  # (P, n, n)


class GridCell(NamedTuple):
    alpha: float
    beta: float
    kappa_min: float
    kappa_max: float
    argmin: tuple[int, int]
    argmax: tuple[int, int]
    n_skipped: int


def draw_sample(dim: int, n_matrices: int, n_planes: int, seed: int) -> CurvatureSample:
    """Diagonal ``D = diag(exp(g - mean(g)))`` and symmetric ``(A + A^T)/2`` planes."""
    rng = np.random.Generator(np.random.Philox(seed))
    g = rng.standard_normal((n_matrices, dim))
    d = np.exp(g - g.mean(axis=1, keepdims=True))
    A = rng.standard_normal((n_planes, dim, dim))
    B = rng.standard_normal((n_planes, dim, dim))
    X = 0.5 * (A + np.swapaxes(A, 1, 2))
    Y = 0.5 * (B + np.swapaxes(B, 1, 2))
    return CurvatureSample(d, X, Y)


def curvature_cell(alpha: float, beta: float, sample: CurvatureSample, planes=None) -> GridCell:
    m = MixedEuclideanMetric.mpe(alpha, beta)
    kappa = sectional_curvature_diagonal(m, sample.d, sample.X, sample.Y, planes)
    ok = np.isfinite(kappa)
    n_skipped = int(kappa.size - ok.sum())
    if not ok.any():
        nan = float("nan")
        return GridCell(alpha, beta, nan, nan, (-1, -1), (-1, -1), n_skipped)
    lo = np.where(ok, kappa, np.inf)
    hi = np.where(ok, kappa, -np.inf)
    imin = np.unravel_index(int(np.argmin(lo)), kappa.shape)
    imax = np.unravel_index(int(np.argmax(hi)), kappa.shape)
    return GridCell(
        float(alpha), float(beta), float(kappa[imin]), float(kappa[imax]),
        tuple(int(i) for i in imin), tuple(int(i) for i in imax), n_skipped,
    )


def _workers() -> int:
    env = os.environ.get("SPD_GEOM_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


def curvature_grid(cfg: GridConfig, cells=None) -> list[GridCell]:
    """Sectional-curvature bounds over the (alpha, beta) grid.

    All cells share one sample of base points and planes. ``cells`` may
    restrict the run to an explicit list of ``(alpha, beta)`` pairs. Rows come
    back in (alpha, then beta) order whatever the worker count.
    """
    sample = draw_sample(cfg.dim, cfg.n_matrices, cfg.n_planes, cfg.seed)
    planes = plane_tensor(sample.X, sample.Y)
    if cells is None:
        cells = [(a, b) for a in cfg.alphas for b in cfg.betas]
    cells = sorted((float(a), float(b)) for a, b in cells)
    log.info("curvature grid: %d cells, %d x %d samples", len(cells), cfg.n_matrices, cfg.n_planes)
    workers = _workers()
    if workers == 1:
        return [curvature_cell(a, b, sample, planes) for a, b in cells]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(lambda ab: curvature_cell(ab[0], ab[1], sample, planes), cells))


def _fmt(x: float) -> str:
    return repr(float(x))


def grid_csv(rows: list[GridCell]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GRID_HEADER)
    for r in rows:
        w.writerow([_fmt(r.alpha), _fmt(r.beta), _fmt(r.kappa_min), _fmt(r.kappa_max), r.n_skipped])
    return buf.getvalue()


def scan_csv(result: ScanResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_HEADER)
    for r in result.rows:
        is_mean = "undefined" if r.is_mean is None else str(r.is_mean).lower()
        w.writerow([_fmt(r.p), is_mean, r.worst_axiom, _fmt(r.worst_violation)])
    return buf.getvalue()


def bracket_line(result: ScanResult) -> str:
    if result.bracket is None:
        return "p0 bracket: none (range does not straddle a non-mean -> mean transition)"
    lo, hi = result.bracket
    return f"p0 bracket: ({lo!r}, {hi!r})"


def write_text(path: str | os.PathLike, text: str) -> None:
    Path(path).write_bytes(text.encode("utf-8"))


def run_mean_kernel_scan(p_lo: float, p_hi: float, step: float, **kw) -> ScanResult:
    return mean_kernel_scan(p_lo, p_hi, step, **kw)
