import math

import numpy as np
import pytest

from tpca import (
    center,
    cover_count,
    enumerate_dichotomies_2d,
    grid_best_w,
    solve_relaxation,
    top_components,
)


class TestCoverCount:
    def test_single_point(self):
        for d in (1, 2, 7):
            assert cover_count(1, d) == 2

    def test_small_planar_cases(self):
        assert cover_count(3, 2) == 6
        assert cover_count(4, 2) == 8

    def test_saturates_at_2_to_n(self):
        # with d >= n every dichotomy is realizable
        assert cover_count(5, 5) == 2**5

    def test_exact_large_values(self):
        # arbitrary-precision integers: no overflow for large n
        assert cover_count(80, 3) == 2 * (1 + 79 + math.comb(79, 2))

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            cover_count(0, 2)


class TestEnumerateDichotomies:
    def test_single_point(self):
        result = enumerate_dichotomies_2d(np.array([[1.0, 0.0]]))
        assert sorted(tuple(s) for s in result.signs) == [(-1,), (1,)]
        assert not result.degenerate

    def test_matches_cover_count_on_generic_points(self):
        rng = np.random.default_rng(0)
        for n in range(2, 11):
            X = rng.normal(size=(n, 2))
            result = enumerate_dichotomies_2d(X)
            assert len(result.signs) == cover_count(n, 2)
            assert not result.degenerate

    def test_every_sign_vector_has_witness(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(6, 2))
        result = enumerate_dichotomies_2d(X)
        for signs, w in zip(result.signs, result.witnesses):
            assert np.array_equal(np.sign(X @ w), signs)

    def test_duplicated_point_degenerate(self):
        X = np.array([[1.0, 1.0], [1.0, 1.0], [0.0, 1.0]])
        result = enumerate_dichotomies_2d(X)
        assert result.degenerate
        assert len(result.signs) < cover_count(3, 2)

    def test_antiparallel_rows_degenerate(self):
        X = np.array([[1.0, 0.5], [-2.0, -1.0], [0.0, 1.0]])
        result = enumerate_dichotomies_2d(X)
        assert result.degenerate

    def test_rejects_zero_row(self):
        with pytest.raises(ValueError, match="zero"):
            enumerate_dichotomies_2d(np.array([[0.0, 0.0], [1.0, 0.0]]))

    def test_rejects_other_dimensions(self):
        with pytest.raises(ValueError, match="d=2"):
            enumerate_dichotomies_2d(np.ones((3, 3)))


class TestGridBestW:
    def test_line_data_rho_zero(self):
        X = np.array([[1.0, 0.0], [-1.0, 0.0]])
        w, obj = grid_best_w(X, 0.0, 2000)
        assert abs(abs(w[0]) - 1.0) <= 1e-9
        assert obj == pytest.approx(0.0, abs=1e-9)

    def test_diamond_diagonal(self):
        X = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        w, obj = grid_best_w(X, 1.0, 100000)
        assert obj == pytest.approx(4.0 * math.log(1.5), rel=1e-8)
        assert abs(abs(w[0]) - abs(w[1])) <= 1e-4

    def test_large_rho_matches_pca(self):
        rng = np.random.default_rng(2)
        X = center(rng.normal(size=(40, 2)) @ np.array([[2.0, 0.3], [0.3, 0.5]])).values
        w, _ = grid_best_w(X, 1e6, 20000)
        W, _ = top_components(X, 1)
        cosine = abs(float(w @ W[:, 0]))
        assert math.acos(min(1.0, cosine)) <= math.pi / 20000 + 1e-9

    def test_three_dimensional_support(self):
        rng = np.random.default_rng(3)
        u = np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0)
        X = np.outer(rng.normal(size=30), u)
        w, _ = grid_best_w(X, 1.0, 5000)
        cosine = abs(float(w @ u))
        assert math.acos(min(1.0, cosine)) <= 0.1

    def test_doubling_resolution_never_hurts(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(10, 2))
        _, obj1 = grid_best_w(X, 0.5, 1000)
        _, obj2 = grid_best_w(X, 0.5, 2000)
        _, obj4 = grid_best_w(X, 0.5, 4000)
        assert obj2 >= obj1 and obj4 >= obj2

    def test_grid_below_relaxation_bound(self):
        rng = np.random.default_rng(5)
        X = center(rng.normal(size=(25, 2))).values
        _, obj = grid_best_w(X, 0.8, 20000)
        _, report = solve_relaxation(X, 0.8, 1)
        assert obj <= report.upper_bound + 1e-6

    def test_rejects_unsupported_inputs(self):
        with pytest.raises(ValueError, match="resolution"):
            grid_best_w(np.ones((2, 2)), 1.0, 10)
        with pytest.raises(ValueError, match="d in"):
            grid_best_w(np.ones((2, 4)), 1.0, 2000)
