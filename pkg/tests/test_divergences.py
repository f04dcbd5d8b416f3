import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spdgeom.deformed import bkm
from spdgeom.divergences import (
    DivergenceSpec,
    ab_divergence,
    ab_divergence_scale,
    ab_potential,
    divergence,
    dual_divergence,
    induced_metric_fd,
    mpe_divergence_spec,
    normalized_mpe_map,
    uv_divergence,
    uv_potential,
)
from spdgeom.errors import DimensionError, InvalidPairError, QuadratureError, StepUnderflowError
from spdgeom.linalg import ScalarFunction, exp_map, identity, log_map, power, random_orthogonal, univariate_apply
from spdgeom.mixed import MixedEuclideanMetric, me_metric_eval

from helpers import spd, sym

CASES = [(0, 0), (1, 1), (-0.5, -0.5), (1, -1), (0.5, -0.5), (1, 0), (-2, 0), (0, 1), (0.5, 1.5), (-0.7, 0.3)]


def sqrt_shift():
    return ScalarFunction(
        "sqrt1p",
        lambda x: np.sqrt(x + 1.0),
        lambda x: 0.5 / np.sqrt(x + 1.0),
        lambda x: -0.25 * (x + 1.0) ** -1.5,
        inverse=lambda y: y * y - 1.0,
        image=(1.0, np.inf),
    )


UV_SPECS = [
    DivergenceSpec.uv(identity(), log_map()),
    DivergenceSpec.uv(sqrt_shift(), power(2)),
    DivergenceSpec.uv(exp_map(), log_map()),
    DivergenceSpec.uv(power(0.5), sqrt_shift()),
    DivergenceSpec.uv(log_map(), power(3)),
]


def trace(A, B):
    return float(np.sum(A * B))


class TestAbDivergence:
    def test_examples(self):
        assert ab_divergence(1, 1, [[1.0]], [[3.0]]) == pytest.approx(2.0, abs=1e-14)
        assert ab_divergence(1, -1, [[2.0]], [[1.0]]) == pytest.approx(2 - np.log(2) - 1, abs=1e-14)
        assert ab_divergence(1, -1, [[2.0]], [[1.0]]) == pytest.approx(0.306853, abs=1e-6)

    @pytest.mark.parametrize("ab", CASES)
    def test_separation(self, rng, ab):
        worst = np.inf
        for _ in range(200):
            S, L = spd(rng), spd(rng)
            scale = ab_divergence_scale(*ab, S, L)
            assert abs(ab_divergence(*ab, S, S)) <= 1e-12 * ab_divergence_scale(*ab, S, S)
            worst = min(worst, ab_divergence(*ab, S, L) / scale)
        assert worst > 1e-10

    @pytest.mark.parametrize("ab", CASES)
    def test_potential_identity(self, rng, ab):
        u, v = DivergenceSpec.ab(*ab).coordinates()
        for _ in range(10):
            S, L = spd(rng), spd(rng)
            pS, pL = ab_potential(*ab, S), ab_potential(*ab, L)
            cross = trace(univariate_apply(u, S), univariate_apply(v, L))
            D = ab_divergence(*ab, S, L)
            assert pS.psi + pL.phi - cross == pytest.approx(D, rel=1e-9, abs=1e-12 * ab_divergence_scale(*ab, S, L))
            assert pS.psi + pS.phi == pytest.approx(trace(univariate_apply(u, S), univariate_apply(v, S)), rel=1e-9)

    def test_potential_examples(self):
        assert ab_potential(0, 0, np.eye(3)).psi == 0.0
        assert ab_potential(1, -1, np.diag([np.e, 1.0])).psi == pytest.approx(-1.0, abs=1e-15)
        assert ab_potential(1, 1, np.diag([1.0, 2.0])).psi == pytest.approx(2.5, abs=1e-15)

    def test_potential_gradient(self, rng):
        # d psi(S)[X] = tr(v(S) d_S u(X))
        from spdgeom.linalg import univariate_differential

        for ab in CASES:
            u, v = DivergenceSpec.ab(*ab).coordinates()
            S, X = spd(rng), sym(rng)
            h = 1e-5
            fd = (ab_potential(*ab, S + h * X).psi - ab_potential(*ab, S - h * X).psi) / (2 * h)
            exact = trace(univariate_apply(v, S), univariate_differential(u, S, X))
            assert fd == pytest.approx(exact, rel=1e-6, abs=1e-9)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, -1.5])
    def test_case_boundaries(self, rng, alpha):
        S, L = spd(rng), spd(rng)
        for beta0 in (0.0, -alpha, alpha):
            target = ab_divergence(alpha, beta0, S, L)
            errs = [abs(ab_divergence(alpha, beta0 + e, S, L) - target) for e in (1e-2, 1e-3, 1e-4)]
            assert errs[2] <= 1e-3 * max(1.0, abs(target))
            assert errs[0] > errs[1] > errs[2]
            rates = np.log10(np.array(errs[:-1]) / np.array(errs[1:]))
            assert np.all(np.abs(rates - 1.0) < 0.1)
        # alpha -> 0 with beta fixed, through the dual case
        target = ab_divergence(0.0, 0.7, S, L)
        assert ab_divergence(1e-4, 0.7, S, L) == pytest.approx(target, abs=1e-3 * max(1, abs(target)))

    def test_zero_alpha_is_dual(self, rng):
        S, L = spd(rng), spd(rng)
        assert ab_divergence(0, 0.8, S, L) == pytest.approx(ab_divergence(0.8, 0, L, S), rel=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            ab_divergence(1, 0, np.eye(2), np.eye(3))

    def test_invariance(self, rng):
        S, L = spd(rng), spd(rng)
        R = random_orthogonal(3, rng)
        for ab in CASES:
            assert ab_divergence(*ab, R @ S @ R.T, R @ L @ R.T) == pytest.approx(ab_divergence(*ab, S, L), rel=1e-9)


class TestUvDivergence:
    def test_examples(self, rng):
        S, L = spd(rng), spd(rng)
        spec = DivergenceSpec.uv(identity(), identity())
        assert uv_divergence(spec, S, S) == pytest.approx(0.0, abs=1e-12)
        assert uv_divergence(spec, S, L) == pytest.approx(0.5 * np.linalg.norm(S - L) ** 2, rel=1e-10)
        assert uv_divergence(spec, S, L) == pytest.approx(ab_divergence(1, 1, S, L), rel=1e-10)

    def test_pow1_log_matches_bkm_divergence(self, rng):
        spec = DivergenceSpec.uv(identity(), log_map())
        for i in range(20):
            if i % 2:
                Q = random_orthogonal(3, rng)
                S = (Q * np.exp(rng.standard_normal(3))) @ Q.T
                L = (Q * np.exp(rng.standard_normal(3))) @ Q.T
            else:
                S, L = spd(rng), spd(rng)
            assert uv_divergence(spec, S, L) == pytest.approx(ab_divergence(1, 0, S, L), rel=1e-8)

    @pytest.mark.parametrize("ab", CASES)
    def test_mpe_specs_match_closed_forms(self, rng, ab):
        spec = mpe_divergence_spec(*ab)
        S, L = spd(rng), spd(rng)
        assert uv_divergence(spec, S, L) == pytest.approx(ab_divergence(*ab, S, L), rel=1e-8)

    def test_supplied_antiderivative(self, rng):
        h = lambda t: t**2 / 2  # noqa: E731
        spec = DivergenceSpec.uv(identity(), identity(), h=h)
        S, L = spd(rng), spd(rng)
        assert uv_divergence(spec, S, L) == pytest.approx(0.5 * np.linalg.norm(S - L) ** 2, rel=1e-10)
        with pytest.raises(InvalidPairError):
            DivergenceSpec.uv(identity(), identity(), h=lambda t: t**2)

    @pytest.mark.parametrize("spec", UV_SPECS, ids=lambda s: f"{s.u.name},{s.v.name}")
    def test_separation_and_potentials(self, rng, spec):
        worst = np.inf
        for _ in range(200):
            S, L = spd(rng), spd(rng)
            D = uv_divergence(spec, S, L)
            scale = sum(abs(uv_potential(spec, M).psi) + abs(uv_potential(spec, M).phi) for M in (S, L))
            worst = min(worst, D / scale)
            assert abs(uv_divergence(spec, S, S)) <= 1e-10 * scale
        assert worst > 1e-10
        S = spd(rng)
        p = uv_potential(spec, S)
        assert p.psi + p.phi == pytest.approx(trace(univariate_apply(spec.u, S), univariate_apply(spec.v, S)), rel=1e-9)

    def test_quadrature_failure(self):
        # v u' = 1 / (x - 1)^2 has a non-integrable pole at 1
        blow = ScalarFunction("blow", lambda x: -1 / (x - 1.0), lambda x: 1 / (x - 1.0) ** 2, lambda x: x)
        spec = DivergenceSpec.uv(blow, identity())
        with pytest.raises(QuadratureError):
            uv_potential(spec, np.diag([2.0, 3.0]))


class TestDual:
    def test_examples(self, rng):
        S, L = spd(rng), spd(rng)
        for ab in CASES:
            spec = DivergenceSpec.ab(*ab)
            assert dual_divergence(spec, S, S) == pytest.approx(0.0, abs=1e-12 * ab_divergence_scale(*ab, S, S))
            assert dual_divergence(spec, S, L) == divergence(spec, L, S)
        for a in (0.5, 1.0, 0.0):
            spec = DivergenceSpec.ab(a, a)
            assert dual_divergence(spec, S, L) == pytest.approx(divergence(spec, S, L), rel=1e-12)

    @pytest.mark.parametrize("ab", CASES)
    def test_dual_swaps_parameters(self, rng, ab):
        for _ in range(10):
            S, L = spd(rng), spd(rng)
            assert dual_divergence(DivergenceSpec.ab(*ab), S, L) == pytest.approx(
                ab_divergence(ab[1], ab[0], S, L), rel=1e-10, abs=1e-13
            )


class TestInducedMetric:
    def test_examples(self, rng):
        S, X, Y = spd(rng), sym(rng), sym(rng)
        assert induced_metric_fd(DivergenceSpec.ab(1, 1), S, X, Y) == pytest.approx(np.trace(X @ Y), rel=1e-4)
        assert induced_metric_fd(DivergenceSpec.ab(1, -1), np.eye(3), X, Y) == pytest.approx(np.trace(X @ Y), rel=1e-4)
        S = np.diag([1.0, 2.0])
        X, Y = sym(rng, 2), sym(rng, 2)
        assert induced_metric_fd(DivergenceSpec.ab(1, 0), S, X, Y) == pytest.approx(bkm().inner(S, X, Y), rel=1e-4)

    @pytest.mark.parametrize("ab", CASES)
    def test_matches_mixed_metric(self, rng, ab):
        m = MixedEuclideanMetric.mpe(*ab)
        for n in (2, 3):
            S, X, Y = spd(rng, n), sym(rng, n), sym(rng, n)
            assert induced_metric_fd(DivergenceSpec.ab(*ab), S, X, Y) == pytest.approx(me_metric_eval(m, S, X, Y), rel=1e-4)

    @pytest.mark.parametrize("spec", UV_SPECS[:3], ids=lambda s: f"{s.u.name},{s.v.name}")
    def test_uv_matches_unnormalized_metric(self, rng, spec):
        m = MixedEuclideanMetric(spec.u, spec.v)
        S, X, Y = spd(rng, 2), sym(rng, 2), sym(rng, 2)
        expected = me_metric_eval(m, S, X, Y) / m.normalizer
        assert induced_metric_fd(spec, S, X, Y) == pytest.approx(expected, rel=1e-4)

    def test_step_shrinks_and_underflows(self):
        S = np.diag([1.0, 1e-3])
        X = np.diag([0.0, -1e6])
        g = induced_metric_fd(DivergenceSpec.ab(1, 1), S, X, X)
        assert g == pytest.approx(1e12, rel=1e-4)
        with pytest.raises(StepUnderflowError):
            induced_metric_fd(DivergenceSpec.ab(1, 1), S, np.diag([0.0, -1e12]), X)


@given(st.floats(-2, 2), st.floats(-2, 2), st.integers(0, 2**31))
@settings(max_examples=60, deadline=None)
def test_nonnegative(alpha, beta, seed):
    rng = np.random.default_rng(seed)
    S, L = spd(rng, 3, 0.7), spd(rng, 3, 0.7)
    alpha, beta = round(alpha, 2), round(beta, 2)
    D = ab_divergence(alpha, beta, S, L)
    assert D >= -1e-12 * ab_divergence_scale(alpha, beta, S, L)


def test_normalized_maps():
    assert normalized_mpe_map(0).name == "log"
    f = normalized_mpe_map(-2.0)
    assert f.df(1.0) == pytest.approx(1.0)
