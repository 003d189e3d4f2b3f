import math

import numpy as np
import pytest
import scipy.special
import scipy.stats

from tpca import (
    center,
    sic_gaussian_1d,
    sic_gaussian_rd,
    sic_t_1d,
    sic_t_rd,
    stretched_sic_objective,
    tpca_objective,
)
from tpca.data import SicParams
from tpca.sic import resolve_nu

TWO_POINTS = np.array([[1.0, 0.0], [-1.0, 0.0]])
E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])


def random_unit(rng, d):
    v = rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_rotation(rng, r):
    Q, _ = np.linalg.qr(rng.normal(size=(r, r)))
    return Q


class TestGaussianSic:
    def test_origin_point(self):
        val = sic_gaussian_1d(np.zeros((1, 2)), E1, 1.0, 1.0)
        assert val.total == pytest.approx(0.5 * math.log(2.0 * math.pi), abs=1e-12)
        assert val.data_term == 0.0

    def test_two_points(self):
        val = sic_gaussian_1d(TWO_POINTS, E1, 1.0, 1.0)
        assert val.total == pytest.approx(math.log(2.0 * math.pi) + 1.0, abs=1e-12)

    def test_direction_difference(self):
        a = sic_gaussian_1d(TWO_POINTS, E1, 1.0, 1.0)
        b = sic_gaussian_1d(TWO_POINTS, E2, 1.0, 1.0)
        assert a.total - b.total == pytest.approx(1.0, abs=1e-12)

    def test_rejects_non_unit_w(self):
        with pytest.raises(ValueError, match="unit"):
            sic_gaussian_1d(TWO_POINTS, [1.0, 1.0], 1.0, 1.0)

    def test_rd_reduces_to_1d(self):
        rng = np.random.default_rng(2)
        X = center(rng.normal(size=(12, 3))).values
        w = random_unit(rng, 3)
        a = sic_gaussian_rd(X, w[:, None], 0.8, [0.3])
        b = sic_gaussian_1d(X, w, 0.8, 0.3)
        assert a.total == pytest.approx(b.total, abs=1e-10)

    def test_rd_full_basis_trace(self):
        rng = np.random.default_rng(3)
        X = center(rng.normal(size=(9, 3))).values
        val = sic_gaussian_rd(X, np.eye(3), 1.0, [1.0, 1.0, 1.0])
        assert val.data_term == pytest.approx(0.5 * np.sum(X**2), abs=1e-10)

    def test_rd_rotation_invariant(self):
        rng = np.random.default_rng(4)
        X = center(rng.normal(size=(15, 4))).values
        W, _ = np.linalg.qr(rng.normal(size=(4, 2)))
        Q = random_rotation(rng, 2)
        a = sic_gaussian_rd(X, W, 1.2, [1.0, 1.0])
        b = sic_gaussian_rd(X, W @ Q, 1.2, [1.0, 1.0])
        assert a.total == pytest.approx(b.total, abs=1e-10)

    def test_rd_rejects_wrong_delta_count(self):
        with pytest.raises(ValueError, match="resolutions"):
            sic_gaussian_rd(TWO_POINTS, np.eye(2), 1.0, [1.0])


class TestHeavyTailedSic:
    def test_cauchy_at_zero(self):
        # standard Cauchy density at 0 is 1/pi
        val = sic_t_1d(np.zeros((1, 2)), E1, 1.0, 1.0, 1.0)
        assert val.total == pytest.approx(math.log(math.pi), abs=1e-12)

    def test_cauchy_at_one(self):
        # standard Cauchy density at 1 is 1/(2 pi)
        val = sic_t_1d(np.array([[1.0, 0.0]]), E1, 1.0, 1.0, 1.0)
        assert val.total == pytest.approx(math.log(2.0 * math.pi), abs=1e-12)

    def test_matches_density_oracle(self):
        # total must be -sum log p(x'w) - n log delta with p the t marginal
        rng = np.random.default_rng(5)
        X = rng.normal(size=(8, 3))
        w = random_unit(rng, 3)
        nu, rho, delta = 2.5, 1.7, 0.4
        proj = X @ w
        width = math.sqrt(rho / nu)
        oracle = -float(
            np.sum(scipy.stats.t.logpdf(proj / width, df=nu) - math.log(width))
        ) - len(X) * math.log(delta)
        val = sic_t_1d(X, w, rho, nu, delta)
        assert val.total == pytest.approx(oracle, abs=1e-10)

    def test_rejects_rho_zero(self):
        with pytest.raises(ValueError, match="rho"):
            sic_t_1d(TWO_POINTS, E1, 0.0, 1.0, 1.0)

    def test_rd_agrees_with_1d(self):
        rng = np.random.default_rng(6)
        X = rng.normal(size=(10, 4))
        w = random_unit(rng, 4)
        a = sic_t_rd(X, w[:, None], 0.9, 3.0, [0.7])
        b = sic_t_1d(X, w, 0.9, 3.0, 0.7)
        assert a.total == pytest.approx(b.total, abs=1e-10)

    def test_rd_rotation_invariant(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(11, 4))
        W, _ = np.linalg.qr(rng.normal(size=(4, 2)))
        Q = random_rotation(rng, 2)
        a = sic_t_rd(X, W, 1.1, 2.0, [1.0, 1.0])
        b = sic_t_rd(X, W @ Q, 1.1, 2.0, [1.0, 1.0])
        assert a.total == pytest.approx(b.total, abs=1e-10)

    def test_rd_normalization_plugin(self):
        # n=1 at the origin, r=2, nu=1, rho=1: the multivariate t
        # normalization Gamma(1.5) / (pi Gamma(0.5)) equals 1/(2 pi)
        val = sic_t_rd(np.zeros((1, 3)), np.eye(3)[:, :2], 1.0, 1.0, [1.0, 1.0])
        expect = -(
            scipy.special.gammaln(1.5)
            - scipy.special.gammaln(0.5)
            - math.log(math.pi)
        )
        assert val.total == pytest.approx(expect, abs=1e-10)


class TestTpcaObjective:
    def test_rho_zero_two_points(self):
        assert tpca_objective(TWO_POINTS, E1, 0.0) == 0.0

    def test_rho_one_two_points(self):
        assert tpca_objective(TWO_POINTS, E1, 1.0) == pytest.approx(2.0 * math.log(2.0))

    def test_diamond_diagonal_beats_axis(self):
        diamond = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        diag = np.array([1.0, 1.0]) / math.sqrt(2.0)
        at_diag = tpca_objective(diamond, diag, 1.0)
        at_axis = tpca_objective(diamond, E1, 1.0)
        assert at_diag == pytest.approx(4.0 * math.log(1.5), abs=1e-12)
        assert at_diag > at_axis

    def test_minus_inf_signaled(self):
        assert tpca_objective(TWO_POINTS, E2, 0.0) == -math.inf

    def test_rejects_negative_rho(self):
        with pytest.raises(ValueError):
            tpca_objective(TWO_POINTS, E1, -0.1)


class TestStretchedObjective:
    def test_plugin(self):
        got = stretched_sic_objective(TWO_POINTS, E1, 1.0)
        assert got == pytest.approx(2.0 - 4.0 * math.log(2.0), abs=1e-12)

    def test_scaling_identity(self):
        rng = np.random.default_rng(8)
        X = center(rng.normal(size=(10, 2))).values
        w = random_unit(rng, 2)
        proj = X @ w
        quad = float(proj @ proj)
        spread = float(proj.max() - proj.min())
        expect = 4.0 * quad - 2.0 * 1.0 * len(X) * math.log(2.0 * spread)
        assert stretched_sic_objective(2.0 * X, w, 1.0) == pytest.approx(expect, abs=1e-9)

    def test_sign_invariant(self):
        rng = np.random.default_rng(9)
        X = center(rng.normal(size=(6, 2))).values
        w = random_unit(rng, 2)
        assert stretched_sic_objective(X, w, 1.0) == pytest.approx(
            stretched_sic_objective(X, -w, 1.0), abs=1e-12
        )

    def test_constant_projection(self):
        X = np.array([[0.0, 1.0], [0.0, -1.0]])
        assert stretched_sic_objective(X, E1, 1.0) == -math.inf


class TestRankingInvariances:
    def test_sigma_does_not_change_argmax(self):
        rng = np.random.default_rng(10)
        X = center(rng.normal(size=(25, 3)) * np.array([2.0, 1.0, 0.5])).values
        candidates = [random_unit(rng, 3) for _ in range(50)]
        argmaxes = set()
        for sigma in (0.1, 1.0, 10.0, 100.0):
            scores = [sic_gaussian_1d(X, w, sigma, 1.0).total for w in candidates]
            argmaxes.add(int(np.argmax(scores)))
        assert len(argmaxes) == 1

    def test_nu_does_not_change_argmax(self):
        rng = np.random.default_rng(11)
        X = center(rng.normal(size=(25, 3))).values
        candidates = [random_unit(rng, 3) for _ in range(50)]
        argmaxes = set()
        for nu in (0.5, 1.0, 5.0, 50.0):
            scores = [sic_t_1d(X, w, 1.0, nu, 1.0).total for w in candidates]
            argmaxes.add(int(np.argmax(scores)))
        assert len(argmaxes) == 1

    def test_geometric_mean_limit(self):
        rng = np.random.default_rng(12)
        X = rng.normal(size=(20, 2))
        w = random_unit(rng, 2)
        obj = tpca_objective(X, w, 0.0)
        geo = float(np.prod((X @ w) ** 2) ** (1.0 / len(X)))
        assert math.exp(obj / len(X)) == pytest.approx(geo, rel=1e-10)

    def test_arithmetic_mean_limit(self):
        rng = np.random.default_rng(13)
        X = rng.normal(size=(30, 2))
        w = random_unit(rng, 2)
        proj_sq = (X @ w) ** 2
        rho = 1e6 * float(proj_sq.max())
        lhs = (rho / len(X)) * tpca_objective(X, w, rho) - rho * math.log(rho)
        assert lhs == pytest.approx(float(np.mean(proj_sq)), rel=1e-3)

    def test_additive_decomposition(self):
        rng = np.random.default_rng(14)
        X = center(rng.normal(size=(9, 3))).values
        w = random_unit(rng, 3)
        for val in (
            sic_gaussian_1d(X, w, 1.3, 0.7),
            sic_t_1d(X, w, 0.9, 2.0, 0.7),
        ):
            assert val.total == pytest.approx(
                val.data_term + val.resolution_term + val.constant_term, abs=1e-10
            )


class TestResolveNu:
    def test_direct_nu(self):
        assert resolve_nu(SicParams(nu=3.0), 2) == 3.0

    def test_via_c(self):
        # kappa(nu, 2) = 2/nu, so c = 0.5 implies nu = 4
        assert resolve_nu(SicParams(c=0.5), 2) == pytest.approx(4.0, abs=1e-8)

    def test_neither_given(self):
        with pytest.raises(ValueError):
            resolve_nu(SicParams(), 2)
