import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tpca import (
    DataMatrix,
    SicParams,
    center,
    scale_measure,
    validate_orthonormal,
)
from tpca.data import check_orthonormal, check_unit_vector


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


class TestCenter:
    def test_mean_subtraction(self):
        out = center(np.array([[1.0, 0.0], [3.0, 0.0]]))
        np.testing.assert_allclose(out.values, [[-1.0, 0.0], [1.0, 0.0]])
        assert out.centered

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(20, 3)) * 100.0
        once = center(X)
        twice = center(once)
        np.testing.assert_allclose(twice.values, once.values, atol=1e-12)

    def test_single_row(self):
        out = center(np.array([[5.0, 2.0]]))
        np.testing.assert_allclose(out.values, [[0.0, 0.0]])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="non-finite"):
            center(np.array([[1.0, np.nan]]))

    @given(
        arrays(
            np.float64,
            st.tuples(st.integers(1, 8), st.integers(1, 4)),
            elements=st.floats(-1e6, 1e6),
        )
    )
    @settings(max_examples=50, deadline=None)
    def test_idempotence_property(self, X):
        once = center(X)
        twice = center(once)
        assert np.max(np.abs(twice.values - once.values)) <= 1e-12 * max(
            1.0, np.max(np.abs(once.values))
        )


class TestScaleMeasure:
    def test_single_point(self):
        assert scale_measure(np.array([[3.0, 4.0]])) == pytest.approx(5.0)

    def test_unit_rows(self):
        assert scale_measure(np.array([[1.0, 0.0], [0.0, 1.0]])) == pytest.approx(1.0)

    def test_mixed_rows(self):
        got = scale_measure(np.array([[2.0, 0.0], [0.0, 0.0]]))
        assert got == pytest.approx(np.sqrt(2.0))

    def test_zero_matrix(self):
        assert scale_measure(np.zeros((3, 2))) == 0.0

    def test_rotation_invariant(self):
        rng = np.random.default_rng(1)
        X = center(rng.normal(size=(30, 2))).values
        for theta in (0.3, 1.1, 2.7):
            assert scale_measure(X @ rotation(theta)) == pytest.approx(
                scale_measure(X), abs=1e-10
            )

    @given(st.floats(-100.0, 100.0))
    @settings(max_examples=50, deadline=None)
    def test_scales_linearly(self, a):
        X = np.array([[1.0, 2.0], [-3.0, 0.5], [0.1, -0.2]])
        assert scale_measure(a * X) == pytest.approx(abs(a) * scale_measure(X), abs=1e-10)


class TestValidateOrthonormal:
    def test_identity_columns(self):
        ok, dev = validate_orthonormal(np.eye(3)[:, :2], 1e-9)
        assert ok and dev == 0.0

    def test_repeated_column(self):
        W = np.array([[1.0, 1.0], [0.0, 0.0]])
        ok, dev = validate_orthonormal(W, 1e-9)
        assert not ok and dev == pytest.approx(1.0)

    def test_rotation_preserves(self):
        W = np.eye(2) @ rotation(np.pi / 6)
        ok, _ = validate_orthonormal(W, 1e-9)
        assert ok

    def test_too_many_columns(self):
        with pytest.raises(ValueError, match="orthonormal columns"):
            validate_orthonormal(np.ones((2, 3)), 1e-9)


class TestDataMatrix:
    def test_invariants(self):
        with pytest.raises(ValueError):
            DataMatrix(np.zeros((0, 2)))
        with pytest.raises(ValueError):
            DataMatrix(np.array([[np.inf, 0.0]]))

    def test_centered_flag_is_checked(self):
        with pytest.raises(ValueError, match="centered"):
            DataMatrix(np.array([[1.0, 0.0], [3.0, 0.0]]), centered=True)

    def test_values_read_only(self):
        dm = DataMatrix(np.array([[1.0, 2.0]]))
        with pytest.raises(ValueError):
            dm.values[0, 0] = 7.0

    def test_shape_properties(self):
        dm = DataMatrix(np.zeros((4, 3)))
        assert (dm.n, dm.d) == (4, 3)


class TestSicParams:
    def test_defaults_valid(self):
        p = SicParams()
        assert p.sigma == 1.0 and p.deltas == (1.0,)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"sigma": 0.0},
            {"rho": -1.0},
            {"nu": 1.0, "c": 1.0},
            {"nu": -2.0},
            {"c": 0.0},
            {"deltas": (1.0, -1.0)},
        ],
    )
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(ValueError):
            SicParams(**kwargs)


class TestCheckHelpers:
    def test_unit_vector_accepts_unit(self):
        w = check_unit_vector([0.6, 0.8])
        np.testing.assert_allclose(w, [0.6, 0.8])

    def test_unit_vector_rejects_non_unit(self):
        with pytest.raises(ValueError, match="unit norm"):
            check_unit_vector([1.0, 1.0])

    def test_orthonormal_check_raises(self):
        with pytest.raises(ValueError, match="not orthonormal"):
            check_orthonormal(np.ones((3, 2)))
