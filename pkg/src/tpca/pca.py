"""Classical PCA on the scatter matrix, plus shared eigen utilities.

Under Gaussian beliefs the most informative projection is exactly the
dominant principal component, so this module doubles as the baseline solver
and as initialization infrastructure for the heavy-tailed solvers.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .data import DataMatrix, _center_with_offset, as_matrix


def scatter(X) -> np.ndarray:
    """Scatter matrix X'X of centered data (sum of row outer products)."""
    values = as_matrix(X)
    return values.T @ values


def apply_sign_convention(W: np.ndarray) -> np.ndarray:
    """Flip column signs so each column's largest-magnitude entry is positive.

    Makes eigenvector output deterministic; ties in magnitude break on the
    first occurrence.
    """
    W = np.array(W, dtype=float)
    for j in range(W.shape[1]):
        i = int(np.argmax(np.abs(W[:, j])))
        if W[i, j] < 0.0:
            W[:, j] = -W[:, j]
    return W


def top_eigenvectors(S: np.ndarray, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors of symmetric S for the r largest eigenvalues, descending.

    Equal eigenvalues keep the LAPACK output order (stable sort), so repeated
    calls are bit-identical.
    """
    S = np.asarray(S, dtype=float)
    sym = 0.5 * (S + S.T)
    vals, vecs = np.linalg.eigh(sym)
    order = np.argsort(-vals, kind="stable")[:r]
    return vecs[:, order], vals[order]


def top_components(X, r: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Top-r principal directions of centered data with their eigenvalues.

    Returns a (d, r) orthonormal basis W (deterministic sign convention) and
    the r largest eigenvalues of the scatter matrix in descending order;
    trace(W'SW) equals their sum.
    """
    values = as_matrix(X)
    d = values.shape[1]
    r = int(r)
    if not 1 <= r <= d:
        raise ValueError(f"need 1 <= r <= d, got r={r} with d={d}")
    W, vals = top_eigenvectors(scatter(values), r)
    return apply_sign_convention(W), vals


class PCA(BaseEstimator, TransformerMixin):
    """Principal component analysis via eigendecomposition of the scatter.

    Parameters
    ----------
    n_components : int
        Number of directions to keep.
    center : bool
        Subtract column means in ``fit``. With ``center=False`` the data
        must already be centered.

    Attributes
    ----------
    components_ : ndarray of shape (n_components, n_features)
        Principal directions, rows orthonormal, eigenvalue-descending.
    eigenvalues_ : ndarray of shape (n_components,)
        Corresponding eigenvalues of the scatter matrix.
    mean_ : ndarray of shape (n_features,)
        Column means subtracted before fitting (zeros if ``center=False``).
    """

    def __init__(self, n_components: int = 1, center: bool = True):
        self.n_components = n_components
        self.center = center

    def fit(self, X, y=None):
        values = as_matrix(X)
        d = values.shape[1]
        if self.center:
            centered, mean = _center_with_offset(values)
            data = DataMatrix(centered, centered=True)
        else:
            mean = np.zeros(d)
            data = values
        W, vals = top_components(data, self.n_components)
        self.mean_ = mean
        self.components_ = W.T
        self.eigenvalues_ = vals
        self.n_features_in_ = d
        return self

    def transform(self, X):
        if not hasattr(self, "components_"):
            raise NotFittedError("this PCA instance is not fitted yet; call fit first")
        values = as_matrix(X)
        if values.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {values.shape[1]} features, expected {self.n_features_in_}"
            )
        return (values - self.mean_) @ self.components_.T
