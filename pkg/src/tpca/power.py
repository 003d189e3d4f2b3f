"""Modified power method for the heavy-tailed projection objective.

Maximizes sum_i log(rho + (x_i'w)^2) over unit vectors w. The stationarity
condition says w must be an eigenvector of a weighted scatter matrix whose
weights shrink the influence of points that already project far out, which
suggests the fixed-point iteration implemented here: repeatedly apply
(I + alpha * A(w)) and renormalize. Subsequent directions come from deflating
the data onto the orthogonal complement of those already found.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .data import DataMatrix, _center_with_offset, as_matrix, check_unit_vector, scale_measure
from .pca import apply_sign_convention, top_eigenvectors

# Relative substitute for rho = 0 inside the update, where exact zeros in the
# projection would otherwise divide by zero; reported objectives still use
# the requested rho.
RHO_ZERO_SUBSTITUTE = 1e-12


class SingularityError(ValueError):
    """A data point projects to exactly zero while rho = 0."""

    def __init__(self, row: int):
        self.row = row
        super().__init__(
            f"row {row} projects to exactly 0 with rho = 0; the weighted scatter is singular"
        )


@dataclass(frozen=True)
class PowerOptions:
    """Controls for the power iteration.

    ``alpha=None`` selects the automatic step size 1/lambda_max of the
    weighted scatter at the initial iterate, halved whenever a step would
    decrease the objective. ``restarts`` adds that many random unit-vector
    initializations (from a generator seeded with ``seed``) on top of the
    deterministic one; the best final objective wins. ``w0`` overrides the
    deterministic initialization of the first component, mainly for testing.
    """

    alpha: float | None = None
    max_iter: int = 10000
    tol: float = 1e-8
    restarts: int = 4
    seed: int = 0
    w0: np.ndarray | None = None

    def __post_init__(self):
        if self.alpha is not None and not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        if int(self.max_iter) < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter!r}")
        if not self.tol > 0.0:
            raise ValueError(f"tol must be positive, got {self.tol!r}")
        if int(self.restarts) < 0:
            raise ValueError(f"restarts must be nonnegative, got {self.restarts!r}")


@dataclass(frozen=True, eq=False)
class FitReport:
    """Outcome of an iterative fit.

    ``objectives`` holds one value per fitted component, evaluated at the
    requested rho on the (deflated) data that component was fitted to;
    ``objective_trace`` holds the per-component iteration traces of the
    winning runs (at the internal rho substitute when rho = 0).
    ``kkt_residual`` is the stationarity residual for the power method and
    the final gradient-mapping norm for the relaxation solver, which also
    fills ``upper_bound`` and ``bound_label``.
    """

    basis: np.ndarray
    objectives: tuple[float, ...]
    objective_trace: tuple[tuple[float, ...], ...]
    iterations: int
    converged: bool
    kkt_residual: float
    upper_bound: float | None = None
    bound_label: str | None = None
    backtracked: bool = False
    rank_tie: bool = False

    @property
    def objective(self) -> float:
        return self.objectives[0]

    @property
    def direction(self) -> np.ndarray:
        return self.basis[:, 0]


def _projection_weights(values: np.ndarray, w: np.ndarray, rho: float) -> np.ndarray:
    shifted = rho + (values @ w) ** 2
    zero = np.flatnonzero(shifted == 0.0)
    if zero.size:
        raise SingularityError(int(zero[0]))
    return 1.0 / shifted


def weighted_scatter(X, w, rho: float) -> np.ndarray:
    """Weighted scatter sum_i x_i x_i' / (rho + (x_i'w)^2), symmetric PSD."""
    values = as_matrix(X)
    w = check_unit_vector(w)
    if rho < 0.0:
        raise ValueError(f"rho must be nonnegative, got {rho!r}")
    weights = _projection_weights(values, w, float(rho))
    A = values.T @ (values * weights[:, None])
    return 0.5 * (A + A.T)


def _scatter_apply(values: np.ndarray, w: np.ndarray, rho: float) -> np.ndarray:
    """A(w) @ w without forming the d x d matrix."""
    weights = _projection_weights(values, w, rho)
    return values.T @ ((values @ w) * weights)


def _objective(values: np.ndarray, w: np.ndarray, rho: float) -> float:
    shifted = rho + (values @ w) ** 2
    with np.errstate(divide="ignore"):
        return float(np.sum(np.log(shifted)))


def power_init(X, rho: float) -> np.ndarray:
    """Deterministic starting direction for the power iteration.

    Dominant eigenvector of sum_i x_i x_i' / (rho + x_i'x_i), equivalent to
    maximizing the objective with each (x_i'w)^2 replaced by x_i'x_i. Rows
    that are exactly zero contribute nothing; ties break deterministically.
    """
    values = as_matrix(X)
    if rho < 0.0:
        raise ValueError(f"rho must be nonnegative, got {rho!r}")
    norms_sq = np.sum(values**2, axis=1)
    keep = norms_sq > 0.0 if rho == 0.0 else np.ones(len(norms_sq), dtype=bool)
    if not np.any(norms_sq > 0.0):
        raise ValueError("cannot initialize on an all-zero data matrix")
    rows = values[keep]
    weights = 1.0 / (float(rho) + norms_sq[keep])
    M = rows.T @ (rows * weights[:, None])
    W, _ = top_eigenvectors(0.5 * (M + M.T), 1)
    return apply_sign_convention(W)[:, 0]


def power_step(X, w, rho: float, alpha: float) -> np.ndarray:
    """One update: normalize (I + alpha * A(w)) w.

    For alpha > 0 the applied matrix is positive definite, so the result is
    well defined; alpha = 0 returns w unchanged.
    """
    values = as_matrix(X)
    w = check_unit_vector(w)
    if rho < 0.0:
        raise ValueError(f"rho must be nonnegative, got {rho!r}")
    alpha = float(alpha)
    if alpha < 0.0:
        raise ValueError(f"alpha must be nonnegative, got {alpha!r}")
    v = w + alpha * _scatter_apply(values, w, float(rho))
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ArithmeticError("degenerate power step: (I + alpha A) w vanished")
    return v / norm


def kkt_residual(X, w, rho: float) -> float:
    """Stationarity residual ||A(w) w - (w'A(w)w) w||; zero iff w is an eigenvector of A(w).

    A zero residual certifies a stationary point only, not a maximum:
    saddle directions are eigenvectors too.
    """
    values = as_matrix(X)
    w = check_unit_vector(w)
    Aw = _scatter_apply(values, w, float(rho))
    lam = float(w @ Aw)
    return float(np.linalg.norm(Aw - lam * w))


def deflate(values: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Project every row onto the orthogonal complement of w."""
    values = as_matrix(values)
    w = check_unit_vector(w)
    return values - np.outer(values @ w, w)


def _random_unit(rng: np.random.Generator, d: int) -> np.ndarray:
    while True:
        v = rng.standard_normal(d)
        norm = np.linalg.norm(v)
        if norm > 1e-12:
            return v / norm


def _complement_direction(found: list[np.ndarray], d: int) -> np.ndarray:
    """Deterministic unit vector orthogonal to all previously found directions."""
    if not found:
        return np.eye(d)[:, 0]
    B = np.column_stack(found)
    residuals = np.eye(d) - B @ (B.T @ np.eye(d))
    norms = np.linalg.norm(residuals, axis=0)
    v = residuals[:, int(np.argmax(norms))]
    return v / np.linalg.norm(v)


def _power_run(
    values: np.ndarray, w0: np.ndarray, rho_iter: float, opts: PowerOptions
) -> tuple[np.ndarray, list[float], int, bool, bool]:
    """Iterate from one initialization; returns (w, trace, iters, converged, backtracked)."""
    w = w0
    obj = _objective(values, w, rho_iter)
    trace = [obj]
    if opts.alpha is not None:
        alpha = float(opts.alpha)
    else:
        weights = _projection_weights(values, w, rho_iter)
        A0 = values.T @ (values * weights[:, None])
        lam_max = float(np.linalg.eigvalsh(0.5 * (A0 + A0.T))[-1])
        alpha = 1.0 / lam_max if lam_max > 0.0 else 1.0
    converged = False
    backtracked = False
    iters = 0
    for _ in range(int(opts.max_iter)):
        Aw = _scatter_apply(values, w, rho_iter)
        candidate = w + alpha * Aw
        candidate /= np.linalg.norm(candidate)
        obj_new = _objective(values, candidate, rho_iter)
        halvings = 0
        while obj_new < obj and halvings < 60:
            alpha *= 0.5
            backtracked = True
            halvings += 1
            candidate = w + alpha * Aw
            candidate /= np.linalg.norm(candidate)
            obj_new = _objective(values, candidate, rho_iter)
        if obj_new < obj:
            # step size exhausted at a stationary point; the iterate is as
            # converged as floating point allows
            converged = True
            break
        iters += 1
        delta = float(np.linalg.norm(candidate - w))
        w = candidate
        obj = obj_new
        trace.append(obj)
        if delta <= opts.tol:
            converged = True
            break
    return w, trace, iters, converged, backtracked


def fit_tpca_power(X, rho: float, r: int = 1, opts: PowerOptions | None = None) -> FitReport:
    """Fit r directions by the modified power method with deflation.

    Parameters
    ----------
    X : DataMatrix or array
        Centered data, rows are points.
    rho : float
        Heavy-tailed scale. rho = 0 is accepted: the update then substitutes
        a tiny positive value internally while reported objectives keep
        rho = 0 (and may be -inf on rank-deficient projections).
    r : int
        Number of directions; each is found on data deflated against the
        previous ones, and the final basis is re-orthonormalized.
    opts : PowerOptions
        Iteration controls; see :class:`PowerOptions`.

    Returns
    -------
    FitReport
        Non-convergence is reported in ``converged``, never raised.
    """
    opts = opts or PowerOptions()
    values = np.array(as_matrix(X))
    d = values.shape[1]
    r = int(r)
    if not 1 <= r <= d:
        raise ValueError(f"need 1 <= r <= d, got r={r} with d={d}")
    rho = float(rho)
    if rho < 0.0:
        raise ValueError(f"rho must be nonnegative, got {rho!r}")
    mean_sq = float(np.mean(np.sum(values**2, axis=1)))
    if mean_sq == 0.0:
        raise ValueError("cannot fit an all-zero data matrix")
    rho_iter = rho if rho > 0.0 else RHO_ZERO_SUBSTITUTE * mean_sq
    rng = np.random.default_rng(opts.seed)

    found: list[np.ndarray] = []
    traces: list[tuple[float, ...]] = []
    total_iters = 0
    all_converged = True
    worst_kkt = 0.0
    any_backtrack = False
    work = values
    for j in range(r):
        exhausted = not np.any(np.sum(work**2, axis=1) > 1e-24 * mean_sq)
        if exhausted:
            w_best = _complement_direction(found, d)
            found.append(w_best)
            traces.append(())
            work = deflate(work, w_best)
            continue
        if j == 0 and opts.w0 is not None:
            w_first = np.asarray(opts.w0, dtype=float).ravel()
            norm = float(np.linalg.norm(w_first))
            if w_first.shape != (d,) or norm == 0.0:
                raise ValueError(f"w0 must be a nonzero vector of length {d}")
            w_first = w_first / norm
        else:
            w_first = power_init(work, rho)
        inits = [w_first] + [_random_unit(rng, d) for _ in range(int(opts.restarts))]
        best = None
        for w0 in inits:
            w, trace, iters, converged, backtracked = _power_run(work, w0, rho_iter, opts)
            any_backtrack |= backtracked
            if best is None or trace[-1] > best[1][-1]:
                best = (w, trace, iters, converged)
        w_best, trace, iters, converged = best
        found.append(w_best)
        traces.append(tuple(trace))
        total_iters += iters
        all_converged &= converged
        worst_kkt = max(worst_kkt, kkt_residual(work, w_best, rho_iter))
        work = deflate(work, w_best)

    basis = np.column_stack(found)
    Q, R = np.linalg.qr(basis)
    signs = np.sign(np.diag(R))
    signs[signs == 0.0] = 1.0
    basis = apply_sign_convention(Q * signs)
    # report objectives against the re-orthonormalized columns so the basis
    # and the numbers refer to the same vectors
    objectives: list[float] = []
    work = values
    for j in range(r):
        w = basis[:, j]
        objectives.append(_objective(work, w, rho))
        work = deflate(work, w)
    return FitReport(
        basis=basis,
        objectives=tuple(objectives),
        objective_trace=tuple(traces),
        iterations=total_iters,
        converged=all_converged,
        kkt_residual=worst_kkt,
        backtracked=any_backtrack,
    )


class TPCA(BaseEstimator, TransformerMixin):
    """Outlier-robust projection finder built on the modified power method.

    Maximizes sum_i log(rho + (x_i'w)^2) per component. Small rho favors
    directions along which no point projects to nearly zero (geometric-mean
    behavior, robust to heavy tails); large rho recovers classical PCA.

    Parameters
    ----------
    n_components : int
        Number of directions.
    rho : float or None
        Absolute scale. When None, ``rho_rel`` times the root mean squared
        point norm of the fitted data is used.
    rho_rel : float
        Relative scale factor used when ``rho`` is None.
    alpha, tol, max_iter, restarts, seed :
        Forwarded to :class:`PowerOptions`.
    center : bool
        Subtract column means in ``fit``.

    Attributes
    ----------
    components_ : ndarray of shape (n_components, n_features)
    report_ : FitReport
    rho_ : float
        The scale actually used.
    mean_ : ndarray of shape (n_features,)
    """

    def __init__(
        self,
        n_components: int = 1,
        rho: float | None = None,
        rho_rel: float = 1e-5,
        alpha: float | None = None,
        tol: float = 1e-8,
        max_iter: int = 10000,
        restarts: int = 4,
        seed: int = 0,
        center: bool = True,
    ):
        self.n_components = n_components
        self.rho = rho
        self.rho_rel = rho_rel
        self.alpha = alpha
        self.tol = tol
        self.max_iter = max_iter
        self.restarts = restarts
        self.seed = seed
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
        rho = self.rho if self.rho is not None else self.rho_rel * scale_measure(data)
        opts = PowerOptions(
            alpha=self.alpha,
            max_iter=self.max_iter,
            tol=self.tol,
            restarts=self.restarts,
            seed=self.seed,
        )
        report = fit_tpca_power(data, rho, self.n_components, opts)
        self.mean_ = mean
        self.rho_ = float(rho)
        self.report_ = report
        self.components_ = report.basis.T
        self.n_features_in_ = d
        return self

    def transform(self, X):
        if not hasattr(self, "components_"):
            raise NotFittedError("this TPCA instance is not fitted yet; call fit first")
        values = as_matrix(X)
        if values.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {values.shape[1]} features, expected {self.n_features_in_}"
            )
        return (values - self.mean_) @ self.components_.T
