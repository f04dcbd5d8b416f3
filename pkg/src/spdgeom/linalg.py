"""Eigendecompositions, divided differences and univariate matrix maps.

A univariate map acts on an SPD matrix through its eigenvalues,
``f(P diag(d) P^T) = P diag(f(d)) P^T``. Its differential and Hessian are
diagonal-free in the eigenbasis: they multiply entries by the first and
second divided differences of the scalar function.

Every function taking a base point accepts either an ndarray or a
precomputed :class:`Eigh`, so callers that reuse a point can skip the
repeated decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    DimensionError,
    DomainError,
    NotDiffeomorphismError,
    NotPositiveDefiniteError,
    NotSymmetricError,
)

SYM_TOL = 1e-12
EIG_FLOOR = 1e-12
# relative gap below which f[1] switches to f' at the midpoint
DD_SWITCH = 1e-7
# relative spread below which f[2] switches to f''(mean) / 2
DD2_SWITCH = 1e-4


@dataclass(frozen=True)
class ScalarFunction:
    """Smooth real function on (0, inf) with its first two derivatives.

    ``image`` is the open interval ``f((0, inf))``; it bounds where the
    inverse may be evaluated and is only meaningful for diffeomorphisms.
    """

    name: str
    f: Callable
    df: Callable
    d2f: Callable
    inverse: Callable | None = None
    image: tuple[float, float] = (-np.inf, np.inf)
    is_diffeomorphism: bool = True
    extras: dict = field(default_factory=dict, compare=False, repr=False)

    def __call__(self, x):
        return self.f(x)

    def scaled(self, c: float) -> ScalarFunction:
        """Return ``c * f``."""
        c = float(c)
        if c == 0:
            raise ValueError("scale must be nonzero")
        lo, hi = (c * self.image[0], c * self.image[1])
        inv = None
        if self.inverse is not None:
            base_inv = self.inverse
            inv = lambda y: base_inv(np.asarray(y) / c)  # noqa: E731
        return replace(
            self,
            name=f"{c:g}*{self.name}",
            f=lambda x: c * self.f(x),
            df=lambda x: c * self.df(x),
            d2f=lambda x: c * self.d2f(x),
            inverse=inv,
            image=(min(lo, hi), max(lo, hi)),
            extras={},
        )


def power(p: float) -> ScalarFunction:
    """The power map ``x -> x**p`` for ``p != 0``."""
    p = float(p)
    if p == 0:
        raise ValueError("pow_0 is constant; use log_map() for the p -> 0 limit")
    if p == 1:
        return identity()
    return ScalarFunction(
        name=f"pow{p:g}",
        f=lambda x: np.power(x, p),
        df=lambda x: p * np.power(x, p - 1),
        d2f=lambda x: p * (p - 1) * np.power(x, p - 2),
        inverse=lambda y: np.power(y, 1.0 / p),
        image=(0.0, np.inf),
        extras={"power": p},
    )


def identity() -> ScalarFunction:
    return ScalarFunction(
        name="id",
        f=lambda x: np.asarray(x, dtype=float) * 1.0,
        df=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        d2f=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        inverse=lambda y: np.asarray(y, dtype=float) * 1.0,
        image=(0.0, np.inf),
        extras={"power": 1.0},
    )


def log_map() -> ScalarFunction:
    return ScalarFunction(
        name="log",
        f=np.log,
        df=lambda x: 1.0 / np.asarray(x, dtype=float),
        d2f=lambda x: -1.0 / np.square(x),
        inverse=np.exp,
        image=(-np.inf, np.inf),
        extras={"power": 0.0},
    )


def exp_map() -> ScalarFunction:
    return ScalarFunction(
        name="exp",
        f=np.exp,
        df=np.exp,
        d2f=np.exp,
        inverse=np.log,
        image=(1.0, np.inf),
    )


def mpe_map(alpha: float) -> ScalarFunction:
    """``pow_alpha`` for ``alpha != 0`` and ``log`` at ``alpha == 0``."""
    return log_map() if alpha == 0 else power(alpha)


def compose_with_inverse(v: ScalarFunction, u: ScalarFunction) -> ScalarFunction:
    """Return ``w = v o u^{-1}`` as a function on the image of ``u``.

    Only the derivative values are used (through divided differences), so
    ``w`` is evaluated at points ``u(d)``.
    """
    if u.inverse is None:
        raise NotDiffeomorphismError(f"{u.name} has no inverse")
    ui = u.inverse

    def dw(y):
        x = ui(y)
        return v.df(x) / u.df(x)

    def d2w(y):
        x = ui(y)
        du = u.df(x)
        return (v.d2f(x) * du - v.df(x) * u.d2f(x)) / du**3

    return ScalarFunction(
        name=f"{v.name}o{u.name}^-1",
        f=lambda y: v.f(ui(y)),
        df=dw,
        d2f=d2w,
    )


class Eigh(NamedTuple):
    """Symmetric eigendecomposition ``S = P diag(d) P^T``.

    Eigenvalues are in descending order and each eigenvector has its
    largest-magnitude component positive.
    """

    P: np.ndarray
    d: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return (self.P * self.d) @ self.P.T

    @property
    def n(self) -> int:
        return self.d.shape[0]


def check_symmetric(S) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {S.shape}")
    scale = np.max(np.abs(S)) if S.size else 0.0
    if np.max(np.abs(S - S.T), initial=0.0) > SYM_TOL * scale:
        raise NotSymmetricError("matrix is not symmetric")
    return S


def sym_eigendecompose(S, spd: bool = False) -> Eigh:
    """Deterministic eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    S : array_like, shape (n, n)
        Symmetric matrix (checked to ``SYM_TOL`` relative to its largest entry).
    spd : bool
        Also require every eigenvalue to exceed ``EIG_FLOOR * max(d)``.

    Returns
    -------
    Eigh
    """
    S = check_symmetric(S)
    d, P = np.linalg.eigh(0.5 * (S + S.T))
    # stable descending sort: tied eigenvalues keep the solver's order
    order = np.argsort(-d, kind="stable")
    d = d[order]
    P = P[:, order]
    lead = np.argmax(np.abs(P), axis=0)
    signs = np.sign(P[lead, np.arange(P.shape[1])])
    signs[signs == 0] = 1.0
    P *= signs
    if spd and (d.size == 0 or d[-1] <= EIG_FLOOR * max(d[0], 0.0) or d[-1] <= 0):
        raise NotPositiveDefiniteError(
            f"smallest eigenvalue {d[-1] if d.size else float('nan'):.3e} is not positive"
        )
    return Eigh(P, d)


def as_eigh(sigma) -> Eigh:
    if isinstance(sigma, Eigh):
        return sigma
    return sym_eigendecompose(sigma, spd=True)


def divided_diff_1(f: ScalarFunction, x, y):
    """First divided difference ``f[1](x, y)``, elementwise over arrays.

    Pairs closer than ``DD_SWITCH`` (relative to the larger magnitude) use
    ``f'`` at the midpoint. Arguments may be any reals in the domain of ``f``,
    which matters for maps such as ``v o u^{-1}`` evaluated on ``u(d)``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    close = (hi - lo) <= DD_SWITCH * np.maximum(np.abs(lo), np.abs(hi))
    with np.errstate(divide="ignore", invalid="ignore"):
        quot = (f(hi) - f(lo)) / (hi - lo)
    out = np.where(close, f.df(0.5 * (lo + hi)), quot)
    return out[()] if out.ndim == 0 else out


def divided_diff_2(f: ScalarFunction, x, y, z):
    """Second divided difference ``f[2](x, y, z)``, elementwise over arrays.

    Arguments are sorted first, so the result is exactly symmetric. The
    quotient divides by the widest gap; triples whose spread is below
    ``DD2_SWITCH`` (relative) use ``f''(mean) / 2``, which is second-order
    accurate about the mean.
    """
    a, b, c = np.sort(np.stack(np.broadcast_arrays(
        np.asarray(x, dtype=float), np.asarray(y, dtype=float), np.asarray(z, dtype=float)
    )), axis=0)
    close = (c - a) <= DD2_SWITCH * np.maximum(np.abs(a), np.abs(c))
    with np.errstate(divide="ignore", invalid="ignore"):
        quot = (divided_diff_1(f, b, c) - divided_diff_1(f, a, b)) / (c - a)
    out = np.where(close, 0.5 * f.d2f((a + b + c) / 3.0), quot)
    return out[()] if out.ndim == 0 else out


def first_dd_matrix(f: ScalarFunction, d: np.ndarray) -> np.ndarray:
    """``[f[1](d_i, d_j)]_{ij}``; batched over leading axes of ``d``."""
    return divided_diff_1(f, d[..., :, None], d[..., None, :])


def second_dd_tensor(f: ScalarFunction, d: np.ndarray) -> np.ndarray:
    """``[f[2](d_i, d_j, d_k)]_{ijk}``; batched over leading axes of ``d``."""
    return divided_diff_2(f, d[..., :, None, None], d[..., None, :, None], d[..., None, None, :])


def to_eigenbasis(eig: Eigh, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape != (eig.n, eig.n):
        raise DimensionError(f"tangent vector shape {X.shape} does not match n={eig.n}")
    return eig.P.T @ X @ eig.P


def from_eigenbasis(eig: Eigh, Xp: np.ndarray) -> np.ndarray:
    out = eig.P @ Xp @ eig.P.T
    return 0.5 * (out + out.T)


def univariate_apply(f: ScalarFunction, sigma) -> np.ndarray:
    """``f(sigma) = P diag(f(d)) P^T``."""
    eig = as_eigh(sigma)
    with np.errstate(all="ignore"):
        fd = np.asarray(f(eig.d), dtype=float)
    if not np.all(np.isfinite(fd)):
        raise DomainError(f"{f.name} is undefined at eigenvalues {eig.d}")
    out = (eig.P * fd) @ eig.P.T
    return 0.5 * (out + out.T)


def univariate_differential(f: ScalarFunction, sigma, X) -> np.ndarray:
    """Differential ``d_sigma f(X)``: entries scaled by ``f[1](d_i, d_j)``."""
    eig = as_eigh(sigma)
    Xp = to_eigenbasis(eig, X)
    return from_eigenbasis(eig, first_dd_matrix(f, eig.d) * Xp)


def univariate_differential_inverse(f: ScalarFunction, sigma, W) -> np.ndarray:
    """Solve ``d_sigma f(X) = W`` for ``X``."""
    if not f.is_diffeomorphism:
        raise NotDiffeomorphismError(f"{f.name} is not flagged as a diffeomorphism")
    eig = as_eigh(sigma)
    Wp = to_eigenbasis(eig, W)
    return from_eigenbasis(eig, Wp / first_dd_matrix(f, eig.d))


def _hessian_eigenbasis(w: np.ndarray, Xp: np.ndarray, Yp: np.ndarray) -> np.ndarray:
    # T(X,Y)_ij = sum_k w_ijk X_ik Y_jk and T(Y,X) = T(X,Y)^T; summing both
    # keeps the result bitwise symmetric in (X, Y).
    S = np.einsum("ijk,ik,jk->ij", w, Xp, Yp) + np.einsum("ijk,ik,jk->ij", w, Yp, Xp)
    return 0.5 * (S + S.T)


def univariate_hessian(f: ScalarFunction, sigma, X, Y) -> np.ndarray:
    """Symmetric bilinear Hessian ``H_sigma f(X, Y)``.

    In the eigenbasis, ``H_ij = sum_k f[2](d_i, d_j, d_k) (X_ik Y_jk + X_jk Y_ik)``.
    """
    eig = as_eigh(sigma)
    Xp = to_eigenbasis(eig, X)
    Yp = to_eigenbasis(eig, Y)
    w = second_dd_tensor(f, eig.d)
    return from_eigenbasis(eig, _hessian_eigenbasis(w, Xp, Yp))


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def random_symmetric(n: int, rng: np.random.Generator, size=None) -> np.ndarray:
    shape = (n, n) if size is None else (size, n, n)
    A = rng.standard_normal(shape)
    return 0.5 * (A + np.swapaxes(A, -1, -2))


def random_spd(n: int, rng: np.random.Generator, spread: float = 1.0) -> np.ndarray:
    Q = random_orthogonal(n, rng)
    d = np.exp(spread * rng.standard_normal(n))
    return (Q * d) @ Q.T
