"""Estimator-contract checks: parameter handling, cloning, pipelines."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import Pipeline

from tpca import PCA, RelaxedTPCA, TPCA

ESTIMATORS = [
    PCA(n_components=2),
    TPCA(n_components=2, rho=0.5, restarts=1, seed=0),
    RelaxedTPCA(n_components=2, rho=0.5, max_iter=2000),
]


@pytest.fixture(scope="module")
def data():
    rng = np.random.default_rng(0)
    return rng.normal(size=(60, 4)) @ np.diag([3.0, 2.0, 1.0, 0.5]) + 1.5


@pytest.mark.parametrize("estimator", ESTIMATORS, ids=lambda e: type(e).__name__)
def test_get_set_params_round_trip(estimator):
    params = estimator.get_params()
    rebuilt = type(estimator)().set_params(**params)
    assert rebuilt.get_params() == params


@pytest.mark.parametrize("estimator", ESTIMATORS, ids=lambda e: type(e).__name__)
def test_clone_then_fit(estimator, data):
    est = clone(estimator).fit(data)
    proj = est.transform(data)
    assert proj.shape == (60, 2)
    gram = est.components_ @ est.components_.T
    assert np.max(np.abs(gram - np.eye(2))) <= 1e-8


@pytest.mark.parametrize("estimator", ESTIMATORS, ids=lambda e: type(e).__name__)
def test_fit_transform_consistent(estimator, data):
    a = clone(estimator).fit_transform(data)
    b = clone(estimator).fit(data).transform(data)
    np.testing.assert_allclose(a, b)


def test_pipeline_composition(data):
    pipe = Pipeline([("tpca", TPCA(n_components=2, rho=1.0, restarts=0))])
    out = pipe.fit_transform(data)
    assert out.shape == (60, 2)


def test_transform_rejects_wrong_width(data):
    est = PCA(n_components=1).fit(data)
    with pytest.raises(ValueError, match="features"):
        est.transform(data[:, :2])


@pytest.mark.parametrize("estimator", ESTIMATORS, ids=lambda e: type(e).__name__)
def test_constant_column_fits(estimator):
    # a constant column that is not exactly representable centers to
    # rounding noise; fitting must still satisfy the centered invariant
    X = np.column_stack([np.full(12, 1.9), np.arange(12.0), np.ones(12)])
    est = clone(estimator).set_params(n_components=1).fit(X)
    assert est.transform(X).shape == (12, 1)
