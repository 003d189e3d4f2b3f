"""Dataset container, centering, scale statistics, and orthonormality checks.

Rows are data points throughout the package: a dataset is an (n, d) array of
n observations in d dimensions. All containers are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Column means count as zero when below CENTERED_RTOL times the column RMS,
# or below CENTERED_ATOL for columns that are identically zero.
CENTERED_RTOL = 1e-9
CENTERED_ATOL = 1e-12
UNIT_NORM_TOL = 1e-10
ORTHONORMAL_TOL = 1e-9


def as_matrix(X) -> np.ndarray:
    """Coerce ``X`` to a finite 2-d float array with n >= 1 rows and d >= 1 columns."""
    if isinstance(X, DataMatrix):
        return X.values
    values = np.asarray(X, dtype=float)
    if values.ndim != 2:
        raise ValueError(f"expected a 2-d data matrix, got ndim={values.ndim}")
    n, d = values.shape
    if n < 1 or d < 1:
        raise ValueError(f"data matrix must be at least 1x1, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("data matrix contains non-finite entries")
    return values


def _means_within_tolerance(values: np.ndarray) -> bool:
    means = values.mean(axis=0)
    rms = np.sqrt(np.mean(values**2, axis=0))
    bound = np.where(rms > 0.0, CENTERED_RTOL * rms, CENTERED_ATOL)
    return bool(np.all(np.abs(means) <= bound))


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """An (n, d) matrix of observations with an explicit centering flag.

    The wrapped array is copied and made read-only. When ``centered`` is
    true, construction verifies that every column mean is negligible
    relative to the column RMS.
    """

    values: np.ndarray
    centered: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError(f"expected a 2-d data matrix, got ndim={values.ndim}")
        n, d = values.shape
        if n < 1 or d < 1:
            raise ValueError(f"data matrix must be at least 1x1, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("data matrix contains non-finite entries")
        if self.centered and not _means_within_tolerance(values):
            raise ValueError("centered=True but column means are not negligible")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def __repr__(self) -> str:
        return f"DataMatrix(n={self.n}, d={self.d}, centered={self.centered})"


def _center_with_offset(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Centered copy of ``values`` plus the total offset subtracted per column.

    A second (tiny) subtraction pass runs when one pass leaves residual
    means at the rounding level, as happens for columns that are constant
    but not exactly representable.
    """
    offset = values.mean(axis=0)
    centered = values - offset
    for _ in range(2):
        if _means_within_tolerance(centered):
            break
        shift = centered.mean(axis=0)
        offset = offset + shift
        centered = centered - shift
    return centered, offset


def center(X) -> DataMatrix:
    """Subtract column means; the only change to the data.

    Idempotent: re-centering an already centered matrix changes entries by
    at most rounding error.
    """
    centered, _ = _center_with_offset(as_matrix(X))
    return DataMatrix(centered, centered=True)


def scale_measure(X) -> float:
    """Root mean squared point norm, sqrt(mean_i ||x_i||^2).

    Meant for centered data (see :func:`center`). Returns 0.0 for an
    all-zero matrix; callers dividing by the scale must guard that case
    themselves.
    """
    values = as_matrix(X)
    return float(np.sqrt(np.mean(np.sum(values**2, axis=1))))


def validate_orthonormal(W, tol: float = ORTHONORMAL_TOL) -> tuple[bool, float]:
    """Check W'W = I entrywise within ``tol``; also return the max deviation."""
    W = as_matrix(W)
    d, r = W.shape
    if r > d:
        raise ValueError(f"cannot have {r} orthonormal columns in dimension {d}")
    gram = W.T @ W
    deviation = float(np.max(np.abs(gram - np.eye(r))))
    return deviation <= tol, deviation


def check_unit_vector(w, tol: float = UNIT_NORM_TOL) -> np.ndarray:
    """Coerce ``w`` to a finite 1-d unit vector, raising if its norm is off by more than ``tol``."""
    w = np.asarray(w, dtype=float).ravel()
    if w.size < 1 or not np.all(np.isfinite(w)):
        raise ValueError("weight vector must be a finite, non-empty vector")
    norm = float(np.linalg.norm(w))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"weight vector must have unit norm, got ||w|| = {norm!r}")
    return w


def check_orthonormal(W, tol: float = ORTHONORMAL_TOL) -> np.ndarray:
    """Coerce ``W`` to a (d, r) matrix with orthonormal columns or raise."""
    W = as_matrix(W)
    ok, deviation = validate_orthonormal(W, tol)
    if not ok:
        raise ValueError(f"columns are not orthonormal (max |W'W - I| = {deviation:.3e})")
    return W


@dataclass(frozen=True, eq=False)
class SicParams:
    """Prior-belief and display parameters shared by the projection scores.

    ``sigma`` is the Gaussian prior scale, ``rho`` the heavy-tailed prior
    scale, and ``deltas`` the per-axis plotting resolutions. The degrees of
    freedom may be given directly (``nu``) or implied by the user's expected
    spread ``c``; supplying both is an error because either determines the
    other.
    """

    sigma: float = 1.0
    rho: float = 0.0
    nu: float | None = None
    c: float | None = None
    deltas: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")
        if self.rho < 0.0:
            raise ValueError(f"rho must be nonnegative, got {self.rho!r}")
        if self.nu is not None and self.c is not None:
            raise ValueError("give at most one of nu and c; they determine each other")
        if self.nu is not None and not self.nu > 0.0:
            raise ValueError(f"nu must be positive, got {self.nu!r}")
        if self.c is not None and not self.c > 0.0:
            raise ValueError(f"c must be positive, got {self.c!r}")
        deltas = tuple(float(x) for x in np.atleast_1d(np.asarray(self.deltas, dtype=float)))
        if len(deltas) < 1 or any(not x > 0.0 for x in deltas):
            raise ValueError("all plot resolutions must be positive")
        object.__setattr__(self, "deltas", deltas)
