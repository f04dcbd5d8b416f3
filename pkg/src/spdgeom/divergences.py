"""(alpha, beta)- and (u, v)-divergences on SPD matrices.

A pair of univariate diffeomorphisms ``(u, v)`` gives the canonical
divergence ``D(S, S') = psi(S) + phi(S') - tr(u(S) v(S'))`` with potentials
``d psi = tr(v du)`` and ``psi + phi = tr(u v)``. Its Hessian recovers the
mixed-Euclidean metric ME(u, v). The (alpha, beta) family uses the
normalized coordinates ``u = F_alpha / F_alpha'(1)`` and
``v = F_beta / F_beta'(1)``, i.e. ``pow_a / a`` or ``log``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate

from .errors import (
    DimensionError,
    InvalidPairError,
    NotDiffeomorphismError,
    NotPositiveDefiniteError,
    QuadratureError,
    StepUnderflowError,
)
from .linalg import (
    Eigh,
    ScalarFunction,
    as_eigh,
    check_symmetric,
    log_map,
    mpe_map,
    univariate_apply,
)

QUAD_EPSABS = 1e-12
FD_BASE_STEP = 3e-3
FD_MIN_STEP = 1e-14


@dataclass(frozen=True)
class DivergenceSpec:
    """Either an ``ab`` divergence (``alpha``, ``beta``) or a ``uv`` divergence.

    For ``uv``, ``h`` is an optional antiderivative of ``v * u'``; when it is
    omitted, ``h(t) = int_1^t v(s) u'(s) ds`` is computed by quadrature.
    """

    kind: str
    alpha: float | None = None
    beta: float | None = None
    u: ScalarFunction | None = None
    v: ScalarFunction | None = None
    h: Callable | None = None

    def __post_init__(self):
        if self.kind == "ab":
            if self.alpha is None or self.beta is None:
                raise InvalidPairError("ab divergence needs alpha and beta")
            object.__setattr__(self, "alpha", float(self.alpha))
            object.__setattr__(self, "beta", float(self.beta))
        elif self.kind == "uv":
            if self.u is None or self.v is None:
                raise InvalidPairError("uv divergence needs u and v")
            for f in (self.u, self.v):
                if not f.is_diffeomorphism:
                    raise NotDiffeomorphismError(f"{f.name} is not flagged as a diffeomorphism")
            if self.h is not None:
                _check_antiderivative(self.u, self.v, self.h)
        else:
            raise ValueError(f"unknown divergence kind {self.kind!r}")

    @classmethod
    def ab(cls, alpha: float, beta: float) -> DivergenceSpec:
        return cls("ab", alpha=alpha, beta=beta)

    @classmethod
    def uv(cls, u: ScalarFunction, v: ScalarFunction, h: Callable | None = None) -> DivergenceSpec:
        return cls("uv", u=u, v=v, h=h)

    def coordinates(self) -> tuple[ScalarFunction, ScalarFunction]:
        """The affine coordinate maps ``(u, v)``."""
        if self.kind == "uv":
            return self.u, self.v
        return normalized_mpe_map(self.alpha), normalized_mpe_map(self.beta)


class PotentialValue(NamedTuple):
    psi: float
    phi: float


def normalized_mpe_map(a: float) -> ScalarFunction:
    """``pow_a / a`` for ``a != 0`` and ``log`` for ``a == 0``."""
    return log_map() if a == 0 else mpe_map(a).scaled(1.0 / a)


def mpe_divergence_spec(alpha: float, beta: float) -> DivergenceSpec:
    """The (alpha, beta)-divergence written as a uv divergence."""
    return DivergenceSpec.uv(normalized_mpe_map(alpha), normalized_mpe_map(beta))


def _check_antiderivative(u, v, h, n_points: int = 25) -> None:
    x = np.logspace(-2, 2, n_points)
    step = 1e-3 * x
    # fourth-order central difference
    dh = (8 * (h(x + step) - h(x - step)) - (h(x + 2 * step) - h(x - 2 * step))) / (12 * step)
    target = v(x) * u.df(x)
    if np.any(np.abs(dh - target) > 1e-8 * (1 + np.abs(target))):
        raise InvalidPairError("h is not an antiderivative of v * u'")


def _pair(sigma, sigma_p) -> tuple[Eigh, Eigh]:
    a, b = as_eigh(sigma), as_eigh(sigma_p)
    if a.n != b.n:
        raise DimensionError(f"dimension mismatch: {a.n} vs {b.n}")
    return a, b


def _tr_apply(eig: Eigh, g) -> float:
    return float(np.sum(g(eig.d)))


def _cross(eig: Eigh, eig_p: Eigh, f, g) -> float:
    """``tr(f(S) g(S'))`` in the eigenbases of both arguments."""
    C = eig.P.T @ eig_p.P
    return float(np.einsum("i,ij,j->", f(eig.d), C * C, g(eig_p.d)))


def _ab_case(alpha: float, beta: float) -> str:
    if alpha == 0 and beta == 0:
        return "log"
    if alpha == beta:
        return "equal"
    if alpha == -beta:
        return "opposite"
    if beta == 0:
        return "beta0"
    if alpha == 0:
        return "alpha0"
    return "general"


def ab_divergence(alpha: float, beta: float, sigma, sigma_p) -> float:
    """The (alpha, beta)-divergence ``D(sigma | sigma_p)``.

    Examples
    --------
    >>> round(ab_divergence(1, 1, [[1.0]], [[3.0]]), 12)
    2.0
    >>> round(ab_divergence(1, -1, [[2.0]], [[1.0]]), 9)
    0.306852819
    """
    alpha, beta = float(alpha), float(beta)
    S, Sp = _pair(sigma, sigma_p)
    case = _ab_case(alpha, beta)
    if case == "log":
        diff = univariate_apply(log_map(), S) - univariate_apply(log_map(), Sp)
        return 0.5 * float(np.sum(diff * diff))
    if case == "equal":
        a = alpha
        diff = univariate_apply(mpe_map(a), S) - univariate_apply(mpe_map(a), Sp)
        return float(np.sum(diff * diff)) / (2 * a * a)
    if case == "opposite":
        a = alpha
        n = S.n
        inner = (
            n
            + a * _tr_apply(S, np.log)
            - a * _tr_apply(Sp, np.log)
            - _cross(S, Sp, lambda d: d**a, lambda d: d ** (-a))
        )
        return -inner / (a * a)
    if case == "beta0":
        a = alpha
        t1 = _tr_apply(S, lambda d: d**a * np.log(d) - d**a / a)
        t2 = _tr_apply(Sp, lambda d: d**a) / a
        t3 = _cross(S, Sp, lambda d: d**a, np.log)
        return (t1 + t2 - t3) / a
    if case == "alpha0":
        return ab_divergence(beta, alpha, Sp, S)
    a, b = alpha, beta
    s = a + b
    t1 = a / s * _tr_apply(S, lambda d: d**s)
    t2 = b / s * _tr_apply(Sp, lambda d: d**s)
    t3 = _cross(S, Sp, lambda d: d**a, lambda d: d**b)
    return (t1 + t2 - t3) / (a * b)


def ab_divergence_scale(alpha: float, beta: float, sigma, sigma_p) -> float:
    """Magnitude of the terms summed in :func:`ab_divergence` (for tolerances)."""
    u, v = DivergenceSpec.ab(alpha, beta).coordinates()
    S, Sp = _pair(sigma, sigma_p)
    tot = 0.0
    for e in (S, Sp):
        tot += abs(_cross(e, e, u, v)) + np.sum(np.abs(u(e.d))) + np.sum(np.abs(v(e.d)))
    return float(tot)


def ab_potential(alpha: float, beta: float, sigma) -> PotentialValue:
    """Potentials ``(psi, phi)`` of the (alpha, beta)-divergence at ``sigma``.

    ``phi`` is fixed by ``psi + phi = tr(u(sigma) v(sigma))`` in the
    normalized coordinates.
    """
    alpha, beta = float(alpha), float(beta)
    S = as_eigh(sigma)
    d = S.d
    case = _ab_case(alpha, beta)
    if case == "log":
        psi = 0.5 * float(np.sum(np.log(d) ** 2))
    elif case == "equal":
        psi = float(np.sum(d ** (2 * alpha))) / (2 * alpha * alpha)
    elif case == "opposite":
        psi = -float(np.sum(np.log(d))) / alpha
    elif case == "beta0":
        a = alpha
        psi = float(np.sum(d**a * np.log(d) - d**a / a)) / a
    elif case == "alpha0":
        # d psi = tr(v du) with u = log, v = pow_b / b
        b = beta
        psi = float(np.sum(d**b)) / (b * b)
    else:
        s = alpha + beta
        psi = float(np.sum(d**s)) / (beta * s)
    u, v = DivergenceSpec.ab(alpha, beta).coordinates()
    phi = float(np.sum(u(d) * v(d))) - psi
    return PotentialValue(psi, phi)


def _antiderivative(spec: DivergenceSpec) -> Callable:
    if spec.h is not None:
        return spec.h
    u, v = spec.u, spec.v

    def integrand(s):
        return float(v(s) * u.df(s))

    def h(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t)
        for i, ti in enumerate(t):
            val, err, *_ = integrate.quad(
                integrand, 1.0, ti, epsabs=QUAD_EPSABS, epsrel=1e-13, limit=200, full_output=1
            )
            if not np.isfinite(val) or err > max(1e-9, 1e-9 * abs(val)):
                raise QuadratureError(f"integral of v u' on [1, {ti:g}] did not converge (err {err:.2e})")
            out[i] = val
        return out

    return h


def uv_potential(spec: DivergenceSpec, sigma) -> PotentialValue:
    """``psi = sum_i h(d_i)`` with ``h' = v u'``, and ``phi = tr(u v) - psi``."""
    if spec.kind == "ab":
        return ab_potential(spec.alpha, spec.beta, sigma)
    S = as_eigh(sigma)
    psi = float(np.sum(_antiderivative(spec)(S.d)))
    phi = float(np.sum(spec.u(S.d) * spec.v(S.d))) - psi
    return PotentialValue(psi, phi)


def uv_divergence(spec: DivergenceSpec, sigma, sigma_p) -> float:
    """Canonical divergence ``psi(S) + phi(S') - tr(u(S) v(S'))``."""
    if spec.kind == "ab":
        return ab_divergence(spec.alpha, spec.beta, sigma, sigma_p)
    S, Sp = _pair(sigma, sigma_p)
    psi = uv_potential(spec, S).psi
    phi = uv_potential(spec, Sp).phi
    return psi + phi - _cross(S, Sp, spec.u, spec.v)


def divergence(spec: DivergenceSpec, sigma, sigma_p) -> float:
    return uv_divergence(spec, sigma, sigma_p)


def dual_divergence(spec: DivergenceSpec, sigma, sigma_p) -> float:
    """``D*(S, S') = D(S', S)``."""
    return divergence(spec, sigma_p, sigma)


def _is_spd(S) -> bool:
    try:
        as_eigh(S)
    except NotPositiveDefiniteError:
        return False
    return True


def induced_metric_fd(spec: DivergenceSpec, sigma, X, Y, h: float | None = None) -> float:
    """Metric induced by the divergence, ``-d_x d_y D`` at ``x = y = sigma``.

    Central mixed second difference with step
    ``h = 3e-3 * lambda_min / (1 + ||X|| + ||Y||)``, halved while any of
    ``sigma +- h X``, ``sigma +- h Y`` leaves the SPD cone.
    """
    S = as_eigh(sigma)
    sig = S.matrix
    X = check_symmetric(X)
    Y = check_symmetric(Y)
    if X.shape != sig.shape or Y.shape != sig.shape:
        raise DimensionError("tangent vectors must match the base point")
    if h is None:
        h = FD_BASE_STEP * S.d[-1] / (1.0 + np.linalg.norm(X) + np.linalg.norm(Y))
    floor = FD_MIN_STEP * S.d[0]
    while not all(_is_spd(sig + s * h * Z) for s in (1, -1) for Z in (X, Y)):
        h *= 0.5
        if h < floor:
            break
    if h < floor:
        raise StepUnderflowError("no usable finite-difference step inside the SPD cone")
    xp, xm = sig + h * X, sig - h * X
    yp, ym = sig + h * Y, sig - h * Y
    D = lambda a, b: divergence(spec, a, b)  # noqa: E731
    return -(D(xp, yp) - D(xp, ym) - D(xm, yp) + D(xm, ym)) / (4 * h * h)
