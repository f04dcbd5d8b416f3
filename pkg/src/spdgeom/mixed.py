"""Mixed-Euclidean metrics ME(u, v) and their Riemannian geometry.

ME(u, v) is the balanced metric of the u- and v-deformed Euclidean metrics:
in the eigenbasis of ``sigma`` its coefficients are
``u[1](d_i, d_j) v[1](d_i, d_j) / (u'(1) v'(1))``. The mixed-power-Euclidean
family MPE(alpha, beta) takes ``u = F_alpha``, ``v = F_beta`` with
``F_a = pow_a`` and ``F_0 = log``.

Curvature follows the convention ``R(X, Y, Z, T) = -g(R(X, Y) Z, T)`` with
``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X, Y]``, so that
``R(X, Y, X, Y)`` has the sign of the sectional curvature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .deformed import GeodesicCurve, flat_geodesic
from .errors import (
    DegeneratePlaneError,
    DimensionError,
    InvalidPairError,
    NotCommutingError,
    NotDiffeomorphismError,
)
from .kernels import KernelMap
from .linalg import (
    Eigh,
    ScalarFunction,
    _hessian_eigenbasis,
    as_eigh,
    compose_with_inverse,
    divided_diff_1,
    first_dd_matrix,
    from_eigenbasis,
    mpe_map,
    power,
    second_dd_tensor,
    to_eigenbasis,
    univariate_apply,
    univariate_differential,
    univariate_differential_inverse,
)

COMMUTE_TOL = 1e-10
SEC_DENOM_FLOOR = 1e-12


@dataclass(frozen=True)
class MixedEuclideanMetric:
    u: ScalarFunction
    v: ScalarFunction
    pair: tuple[float, float] | None = None

    def __post_init__(self):
        for f in (self.u, self.v):
            if not f.is_diffeomorphism:
                raise NotDiffeomorphismError(f"{f.name} is not flagged as a diffeomorphism")
        prod = float(self.u.df(1.0) * self.v.df(1.0))
        if not np.isfinite(prod) or prod == 0:
            raise NotDiffeomorphismError("u'(1) v'(1) must be finite and nonzero")

    @classmethod
    def mpe(cls, alpha: float, beta: float) -> MixedEuclideanMetric:
        return cls(mpe_map(alpha), mpe_map(beta), (float(alpha), float(beta)))

    @property
    def normalizer(self) -> float:
        return float(1.0 / (self.u.df(1.0) * self.v.df(1.0)))

    @property
    def name(self) -> str:
        if self.pair is not None:
            return "MPE({:g},{:g})".format(*self.pair)
        return f"ME({self.u.name},{self.v.name})"

    def coefficients(self, d: np.ndarray) -> np.ndarray:
        """Eigenbasis coefficients ``u_ij v_ij / (u'(1) v'(1))``, batched over ``d``."""
        return first_dd_matrix(self.u, d) * first_dd_matrix(self.v, d) * self.normalizer

    def inner(self, sigma, X, Y) -> float:
        return me_metric_eval(self, sigma, X, Y)

    def swapped(self) -> MixedEuclideanMetric:
        pair = None if self.pair is None else self.pair[::-1]
        return MixedEuclideanMetric(self.v, self.u, pair)


def balanced_form(u: ScalarFunction, v: ScalarFunction, sigma, X, Y) -> float:
    """Frobenius product of the flat transports of ``X`` (by u) and ``Y`` (by v) to ``I``.

    The transport of a deformed-Euclidean metric is
    ``(d_I u)^{-1}(d_sigma u(X)) = d_sigma u(X) / u'(1)``.
    """
    for f in (u, v):
        if not f.is_diffeomorphism:
            raise NotDiffeomorphismError(f"{f.name} is not flagged as a diffeomorphism")
    eig = as_eigh(sigma)
    n = eig.n
    I = np.eye(n)
    tx = univariate_differential_inverse(u, I, univariate_differential(u, eig, X))
    ty = univariate_differential_inverse(v, I, univariate_differential(v, eig, Y))
    return float(np.sum(tx * ty))


def me_metric_eval(m: MixedEuclideanMetric, sigma, X, Y) -> float:
    eig = as_eigh(sigma)
    Xp = to_eigenbasis(eig, X)
    Yp = to_eigenbasis(eig, Y)
    return float(np.sum(m.coefficients(eig.d) * Xp * Yp))


def me_kernel(m: MixedEuclideanMetric) -> KernelMap:
    """Kernel ``sqrt(phi_u phi_v)`` with ``phi_u = (u'(1) / u[1])^2``."""
    u, v = m.u, m.v
    cu, cv = float(u.df(1.0)), float(v.df(1.0))

    def phi(x, y):
        phi_u = (cu / divided_diff_1(u, x, y)) ** 2
        phi_v = (cv / divided_diff_1(v, x, y)) ** 2
        return np.sqrt(phi_u * phi_v)

    return KernelMap(m.name, phi)


def me_connection(m: MixedEuclideanMetric, sigma, X, Y) -> np.ndarray:
    """Christoffel term ``(1/2)((d u)^{-1} H u(X, Y) + (d v)^{-1} H v(X, Y))``.

    The Levi-Civita connection on constant fields is ``nabla_X Y = Gamma(X, Y)``.
    """
    eig = as_eigh(sigma)
    Xp = to_eigenbasis(eig, X)
    Yp = to_eigenbasis(eig, Y)
    out = np.zeros_like(Xp)
    for f in (m.u, m.v):
        H = _hessian_eigenbasis(second_dd_tensor(f, eig.d), Xp, Yp)
        out += 0.5 * H / first_dd_matrix(f, eig.d)
    return from_eigenbasis(eig, out)


def _a_tensor(m: MixedEuclideanMetric, d: np.ndarray):
    """``A_ijl = u_ij v_ijl - v_ij u_ijl`` and ``2 u_jl v_jl``, batched over ``d``."""
    u1 = first_dd_matrix(m.u, d)
    v1 = first_dd_matrix(m.v, d)
    u2 = second_dd_tensor(m.u, d)
    v2 = second_dd_tensor(m.v, d)
    A = u1[..., :, :, None] * v2 - v1[..., :, :, None] * u2
    return A, 2.0 * u1 * v1


@dataclass(frozen=True)
class CurvatureCoefficients:
    """``rho[i, j, k, l]`` at eigenvalues ``d``."""

    rho: np.ndarray
    d: np.ndarray


def curvature_coefficients(m: MixedEuclideanMetric, d) -> CurvatureCoefficients:
    """``rho_ijkl = (u_ij v_ijl - v_ij u_ijl)(u_jk v_jkl - v_jk u_jkl) / (2 u_jl v_jl)``.

    This form stays finite when ``d_j = d_l``. Batched over leading axes of ``d``.
    """
    d = np.asarray(d, dtype=float)
    A, den = _a_tensor(m, d)
    # A[..., i, j, l] * A[..., k, j, l] placed at [..., i, j, k, l]
    rho = A[..., :, :, None, :] * np.swapaxes(A, -3, -2)[..., None, :, :, :] / den[..., None, :, None, :]
    return CurvatureCoefficients(rho, d)


def curvature_coefficients_quotient_form(m: MixedEuclideanMetric, d) -> np.ndarray:
    """``rho_ijkl = m_ijl m_jlk u_ij u_jk u_kl u_li / (2 m_jl)`` through ``w = v o u^{-1}``.

    ``m_ij = w[1](u(d_i), u(d_j))`` and ``m_ijk = w[2](u(d_i), u(d_j), u(d_k))``.
    Needs an invertible ``u``; used to cross-check the default form.
    """
    d = np.asarray(d, dtype=float)
    w = compose_with_inverse(m.v, m.u)
    ud = m.u(d)
    mm = first_dd_matrix(w, ud)
    m3 = second_dd_tensor(w, ud)
    u1 = first_dd_matrix(m.u, d)
    # m_ijl m_jlk / (2 m_jl) at [i, j, k, l]
    num = m3[:, :, None, :] * np.transpose(m3, (0, 2, 1))[None, :, :, :]
    uu = u1[:, :, None, None] * u1[None, :, :, None] * u1[None, None, :, :] * u1.T[:, None, None, :]
    return num / (2.0 * mm[None, :, None, :]) * uu


def _contract(A, den, P, Q, R, S):
    # sum_ijkl rho_ijkl P_ij Q_jk R_kl S_li with rho rank-one in (i, k) for fixed (j, l)
    B = np.einsum("ijl,ij,li->jl", A, P, S)
    C = np.einsum("kjl,jk,kl->jl", A, Q, R)
    return np.sum(B * C / den)


def me_curvature(m: MixedEuclideanMetric, sigma, X, Y, Z, T) -> float:
    """Riemann curvature ``R(X, Y, Z, T)`` of ME(u, v).

    ``(1/(u'(1)v'(1))) sum rho_ijkl (X_ij Y_jk Z_kl T_li - Y_ij X_jk Z_kl T_li
    + X_ij Z_jk Y_kl T_li - Y_ij Z_jk X_kl T_li)`` in the eigenbasis. The
    ``n^4`` array of rho is never formed: for fixed ``(j, l)`` it factorizes
    over ``(i, k)``, so the sum costs ``O(n^3)`` time and memory.
    """
    eig = as_eigh(sigma)
    Xp, Yp, Zp, Tp = (to_eigenbasis(eig, V) for V in (X, Y, Z, T))
    A, den = _a_tensor(m, eig.d)
    total = (
        _contract(A, den, Xp, Yp, Zp, Tp)
        - _contract(A, den, Yp, Xp, Zp, Tp)
        + _contract(A, den, Xp, Zp, Yp, Tp)
        - _contract(A, den, Yp, Zp, Xp, Tp)
    )
    return float(m.normalizer * total)


def affine_curvature_at_identity(X, Y, Z, T) -> float:
    """``R^A_I(X, Y, Z, T) = tr(XYZT - YXZT) / 2``."""
    return 0.5 * float(np.trace(X @ Y @ Z @ T - Y @ X @ Z @ T))


def identity_curvature_factor(m: MixedEuclideanMetric) -> float:
    """``[(ln|v'/u'|)'(1)]^2 / 4``, the ratio of ``R^ME_I`` to ``R^A_I``."""
    c = m.v.d2f(1.0) / m.v.df(1.0) - m.u.d2f(1.0) / m.u.df(1.0)
    return 0.25 * float(c) ** 2


def sectional_curvature(m: MixedEuclideanMetric, sigma, X, Y) -> float:
    """``R(X, Y, X, Y) / (g(X, X) g(Y, Y) - g(X, Y)^2)``."""
    eig = as_eigh(sigma)
    gxx = me_metric_eval(m, eig, X, X)
    gyy = me_metric_eval(m, eig, Y, Y)
    gxy = me_metric_eval(m, eig, X, Y)
    den = gxx * gyy - gxy**2
    if den <= SEC_DENOM_FLOOR * gxx * gyy:
        raise DegeneratePlaneError("X and Y span a degenerate plane")
    return me_curvature(m, eig, X, Y, X, Y) / den


def plane_tensor(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Index pattern of ``R(X, Y, X, Y)``, batched over planes, shape ``(P, n, n, n, n)``.

    ``R(X, Y, X, Y) = (1/(u'(1)v'(1))) <rho, plane_tensor>``.
    """
    def t(P, Q, R, S):
        return np.einsum("pij,pjk,pkl,pli->pijkl", P, Q, R, S)

    return t(X, Y, X, Y) - t(Y, X, X, Y) + t(X, X, Y, Y) - t(Y, X, X, Y)


def sectional_curvature_diagonal(m: MixedEuclideanMetric, d, X, Y, planes=None):
    """Sectional curvatures at diagonal points for a batch of planes.

    Parameters
    ----------
    d : ndarray, shape (M, n)
        Eigenvalues of M positive diagonal base points.
    X, Y : ndarray, shape (P, n, n)
        Symmetric tangent vectors spanning P planes.
    planes : ndarray, optional
        Precomputed ``plane_tensor(X, Y)``, reusable across metrics.

    Returns
    -------
    kappa : ndarray, shape (M, P)
        Sectional curvatures; nan where the plane is degenerate.
    """
    d = np.atleast_2d(np.asarray(d, dtype=float))
    M, n = d.shape
    if planes is None:
        planes = plane_tensor(X, Y)
    rho = curvature_coefficients(m, d).rho.reshape(M, -1)
    num = m.normalizer * (rho @ planes.reshape(planes.shape[0], -1).T)
    c = m.coefficients(d).reshape(M, -1)
    gxx = c @ (X * X).reshape(X.shape[0], -1).T
    gyy = c @ (Y * Y).reshape(Y.shape[0], -1).T
    gxy = c @ (X * Y).reshape(X.shape[0], -1).T
    den = gxx * gyy - gxy**2
    with np.errstate(invalid="ignore", divide="ignore"):
        kappa = num / den
    kappa[den <= SEC_DENOM_FLOOR * gxx * gyy] = np.nan
    return kappa


def _mpe_alpha0(pair) -> float:
    if isinstance(pair, MixedEuclideanMetric):
        if pair.pair is None:
            raise InvalidPairError("commuting-case formulas need an MPE pair")
        pair = pair.pair
    alpha, beta = pair
    if alpha + beta == 0:
        raise InvalidPairError("alpha + beta = 0 (log-Euclidean or power-affine) is excluded")
    return 0.5 * (alpha + beta)


def _check_commute(A, B):
    A = np.asarray(A.matrix if isinstance(A, Eigh) else A, dtype=float)
    B = np.asarray(B.matrix if isinstance(B, Eigh) else B, dtype=float)
    if A.shape != B.shape:
        raise DimensionError("shape mismatch")
    if np.linalg.norm(A @ B - B @ A) > COMMUTE_TOL * np.linalg.norm(A) * np.linalg.norm(B):
        raise NotCommutingError("matrices do not commute")


def mpe_geodesic_commuting(pair, sigma, V) -> GeodesicCurve:
    """``gamma(t) = (sigma^a0 + t d_sigma pow_a0(V))^(1/a0)``, ``a0 = (alpha + beta)/2``."""
    a0 = _mpe_alpha0(pair)
    _check_commute(sigma, V)
    return flat_geodesic(power(a0), sigma, V)


def mpe_log_commuting(pair, sigma, lam) -> np.ndarray:
    """``(d_sigma pow_a0)^{-1}(lam^a0 - sigma^a0)``."""
    a0 = _mpe_alpha0(pair)
    _check_commute(sigma, lam)
    f = power(a0)
    eig = as_eigh(sigma)
    return univariate_differential_inverse(f, eig, univariate_apply(f, lam) - univariate_apply(f, eig))


def mpe_distance_commuting(pair, sigma, lam) -> float:
    """``||lam^a0 - sigma^a0||_F / |a0|``."""
    a0 = _mpe_alpha0(pair)
    _check_commute(sigma, lam)
    f = power(a0)
    return float(np.linalg.norm(univariate_apply(f, lam) - univariate_apply(f, sigma)) / abs(a0))
