"""Convex relaxation of the heavy-tailed projection problem.

Writing the rank-r projector as M = WW' turns the objective into
sum_i log(rho + x_i'M x_i), concave in M. Dropping the (non-convex) rank
constraint leaves the Fantope {0 <= M <= I, trace M = r}, over which
projected gradient ascent finds the global optimum; its value upper-bounds
the objective of every genuine rank-r basis, and the dominant eigenvectors
of the solution give a feasible basis back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .data import DataMatrix, _center_with_offset, as_matrix, scale_measure
from .pca import apply_sign_convention, top_eigenvectors
from .power import FitReport

# Gradient-mapping norm below which the final objective is reported as a
# trustworthy bound rather than a heuristic one.
CONVERGED_GMAP_TOL = 1e-6


@dataclass(frozen=True)
class RelaxOptions:
    """Projected-gradient controls; ``step=None`` starts from a crude 1/L estimate."""

    step: float | None = None
    tol: float = 1e-10
    max_iter: int = 20000

    def __post_init__(self):
        if self.step is not None and not self.step > 0.0:
            raise ValueError(f"step must be positive, got {self.step!r}")
        if not self.tol > 0.0:
            raise ValueError(f"tol must be positive, got {self.tol!r}")
        if int(self.max_iter) < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter!r}")


@dataclass(frozen=True)
class FantopeDiagnostics:
    """Constraint violation magnitudes for a candidate matrix.

    ``feasible`` covers the relaxed set (symmetry, trace, eigenvalues in
    [0, 1]); ``rank_spectrum_ok`` additionally demands r eigenvalues at 1
    and the rest at 0, i.e. that M is an orthonormal projector.
    """

    symmetry_error: float
    trace_error: float
    min_eigenvalue: float
    max_eigenvalue: float
    eigenvalues: tuple[float, ...]
    feasible: bool
    rank_spectrum_ok: bool


def _check_square_symmetric(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains non-finite entries")
    scale = max(1.0, float(np.max(np.abs(A))))
    if float(np.max(np.abs(A - A.T))) > 1e-9 * scale:
        raise ValueError("matrix is not symmetric")
    return 0.5 * (A + A.T)


def fantope_project(A, r: int, cap: bool = True) -> np.ndarray:
    """Frobenius-nearest point of the Fantope {0 <= M <= I, trace M = r}.

    Eigenvalues of A are shifted by a scalar theta and clipped to [0, 1]
    (to [0, inf) with ``cap=False``, the simplex-style variant that is
    equivalent for r = 1); theta is found by bisection so the clipped values
    sum to r. Eigenvectors are untouched.
    """
    A = _check_square_symmetric(A)
    d = A.shape[0]
    r = int(r)
    if not 1 <= r <= d:
        raise ValueError(f"need 1 <= r <= d, got r={r} with d={d}")
    vals, vecs = np.linalg.eigh(A)
    upper = 1.0 if cap else np.inf

    def clipped_sum(theta: float) -> float:
        return float(np.sum(np.clip(vals - theta, 0.0, upper)))

    lo = float(vals.min()) - max(1.0, float(r))
    hi = float(vals.max())
    # clipped_sum is continuous and nonincreasing, >= r at lo and 0 at hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if clipped_sum(mid) >= r:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(lo) + abs(hi)):
            break
    theta = 0.5 * (lo + hi)
    new_vals = np.clip(vals - theta, 0.0, upper)
    M = (vecs * new_vals) @ vecs.T
    return 0.5 * (M + M.T)


def _quad_forms(values: np.ndarray, M: np.ndarray) -> np.ndarray:
    return np.sum((values @ M) * values, axis=1)


def relax_objective(X, M, rho: float) -> float:
    """sum_i log(rho + x_i'M x_i); equals the vector objective at M = ww'."""
    values = as_matrix(X)
    M = _check_square_symmetric(M)
    rho = float(rho)
    if rho < 0.0:
        raise ValueError(f"rho must be nonnegative, got {rho!r}")
    shifted = rho + _quad_forms(values, M)
    if np.any(shifted <= 0.0):
        return float("-inf")
    return float(np.sum(np.log(shifted)))


def relax_gradient(X, M, rho: float) -> np.ndarray:
    """Gradient sum_i x_i x_i' / (rho + x_i'M x_i) of :func:`relax_objective`."""
    values = as_matrix(X)
    M = _check_square_symmetric(M)
    rho = float(rho)
    shifted = rho + _quad_forms(values, M)
    if np.any(shifted <= 0.0):
        raise ValueError("gradient undefined: rho + x'Mx vanishes for some row")
    G = values.T @ (values / shifted[:, None])
    return 0.5 * (G + G.T)


def extract_basis(M, r: int, tie_tol: float = 1e-8) -> tuple[np.ndarray, bool]:
    """Top-r eigenvectors of M as an orthonormal basis, plus an eigenvalue-tie flag.

    The flag is set when the r-th and (r+1)-th eigenvalues are within
    ``tie_tol``, in which case the selected subspace is determined by the
    deterministic ordering convention rather than by the data.
    """
    M = _check_square_symmetric(M)
    d = M.shape[0]
    r = int(r)
    if not 1 <= r <= d:
        raise ValueError(f"need 1 <= r <= d, got r={r} with d={d}")
    vecs, vals = top_eigenvectors(M, d)
    tie = r < d and (vals[r - 1] - vals[r]) <= tie_tol
    return apply_sign_convention(vecs[:, :r]), bool(tie)


def feasibility_check(M, r: int, tol: float = 1e-8) -> FantopeDiagnostics:
    """Violation magnitudes for every Fantope constraint plus the rank-r spectrum test.

    The spectrum test passes when exactly r eigenvalues are within ``tol``
    of 1 and the remaining d - r within ``tol`` of 0, which certifies that
    M is WW' for some orthonormal W.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    d = M.shape[0]
    r = int(r)
    if not 1 <= r <= d:
        raise ValueError(f"need 1 <= r <= d, got r={r} with d={d}")
    symmetry_error = float(np.max(np.abs(M - M.T)))
    vals = np.linalg.eigvalsh(0.5 * (M + M.T))
    trace_error = float(abs(np.trace(M) - r))
    min_eig = float(vals.min())
    max_eig = float(vals.max())
    feasible = (
        symmetry_error <= tol
        and trace_error <= tol
        and min_eig >= -tol
        and max_eig <= 1.0 + tol
    )
    descending = np.sort(vals)[::-1]
    rank_ok = bool(
        np.all(np.abs(descending[:r] - 1.0) <= tol)
        and np.all(np.abs(descending[r:]) <= tol)
    )
    return FantopeDiagnostics(
        symmetry_error=symmetry_error,
        trace_error=trace_error,
        min_eigenvalue=min_eig,
        max_eigenvalue=max_eig,
        eigenvalues=tuple(float(v) for v in vals),
        feasible=feasible,
        rank_spectrum_ok=rank_ok,
    )


def solve_relaxation(
    X, rho: float, r: int = 1, opts: RelaxOptions | None = None, use_cap: bool = True
) -> tuple[np.ndarray, FitReport]:
    """Maximize the relaxed objective over the Fantope by projected gradient ascent.

    Starts from the rotation-neutral interior point (r/d) I. The step grows
    after accepted iterations and halves whenever a trial step would lower
    the objective, so the trace is nondecreasing. Because the problem is
    concave over a convex set, the converged objective is the relaxation
    optimum and hence an upper bound for every orthonormal rank-r basis; the
    report labels it "converged bound" when the final gradient-mapping norm
    is below ``CONVERGED_GMAP_TOL`` and "heuristic bound" otherwise.

    Returns the Fantope matrix and a :class:`FitReport` whose basis holds
    the dominant eigenvectors of M.
    """
    values = as_matrix(X)
    d = values.shape[1]
    r = int(r)
    if not 1 <= r <= d:
        raise ValueError(f"need 1 <= r <= d, got r={r} with d={d}")
    rho = float(rho)
    if not rho > 0.0:
        raise ValueError(f"the relaxation requires rho > 0, got {rho!r}")
    norms_sq = np.sum(values**2, axis=1)
    if not np.any(norms_sq > 0.0):
        raise ValueError("cannot fit an all-zero data matrix")
    opts = opts or RelaxOptions()

    lipschitz = float(np.sum(norms_sq**2)) / rho**2
    eta = float(opts.step) if opts.step is not None else 1.0 / lipschitz
    M = (r / d) * np.eye(d)
    obj = relax_objective(values, M, rho)
    trace = [obj]
    converged = False
    backtracked = False
    small_steps = 0
    iterations = 0
    for _ in range(int(opts.max_iter)):
        G = relax_gradient(values, M, rho)
        shrinks = 0
        while True:
            candidate = fantope_project(M + eta * G, r, cap=use_cap)
            obj_new = relax_objective(values, candidate, rho)
            if obj_new >= obj or shrinks >= 60:
                break
            eta *= 0.5
            backtracked = True
            shrinks += 1
        if obj_new < obj:
            converged = True
            break
        iterations += 1
        delta = obj_new - obj
        M = candidate
        obj = obj_new
        trace.append(obj)
        if delta <= opts.tol:
            small_steps += 1
            if small_steps >= 2:
                converged = True
                break
        else:
            small_steps = 0
        if shrinks == 0:
            eta *= 1.25

    # stationarity measured at the fixed reference step: the adaptive eta can
    # grow large, which would deflate the mapping norm and overstate
    # convergence
    eta_ref = float(opts.step) if opts.step is not None else 1.0 / lipschitz
    gmap_step = fantope_project(
        M + eta_ref * relax_gradient(values, M, rho), r, cap=use_cap
    )
    gmap = float(np.linalg.norm(gmap_step - M, "fro")) / eta_ref
    label = "converged bound" if gmap <= CONVERGED_GMAP_TOL else "heuristic bound"
    basis, tie = extract_basis(M, r)
    report = FitReport(
        basis=basis,
        objectives=(obj,),
        objective_trace=(tuple(trace),),
        iterations=iterations,
        converged=converged,
        kkt_residual=gmap,
        upper_bound=obj,
        bound_label=label,
        backtracked=backtracked,
        rank_tie=tie,
    )
    return M, report


class RelaxedTPCA(BaseEstimator, TransformerMixin):
    """t-PCA via the Fantope relaxation.

    Fits the relaxed problem, keeps the dominant eigenvectors of the solution
    as ``components_``, and exposes the relaxation optimum as ``upper_bound_``
    (an upper bound on the objective of any orthonormal rank-r basis).

    Parameters mirror :class:`tpca.power.TPCA` where they overlap; ``step``,
    ``tol`` and ``max_iter`` control the projected gradient loop.
    """

    def __init__(
        self,
        n_components: int = 1,
        rho: float | None = None,
        rho_rel: float = 1e-5,
        step: float | None = None,
        tol: float = 1e-10,
        max_iter: int = 20000,
        center: bool = True,
    ):
        self.n_components = n_components
        self.rho = rho
        self.rho_rel = rho_rel
        self.step = step
        self.tol = tol
        self.max_iter = max_iter
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
        opts = RelaxOptions(step=self.step, tol=self.tol, max_iter=self.max_iter)
        M, report = solve_relaxation(data, rho, self.n_components, opts)
        self.mean_ = mean
        self.rho_ = float(rho)
        self.fantope_ = M
        self.report_ = report
        self.upper_bound_ = report.upper_bound
        self.components_ = report.basis.T
        self.n_features_in_ = d
        return self

    def transform(self, X):
        if not hasattr(self, "components_"):
            raise NotFittedError("this RelaxedTPCA instance is not fitted yet; call fit first")
        values = as_matrix(X)
        if values.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {values.shape[1]} features, expected {self.n_features_in_}"
            )
        return (values - self.mean_) @ self.components_.T
