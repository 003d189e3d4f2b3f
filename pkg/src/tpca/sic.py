"""Projection scores: how much a linear projection would surprise a user.

Each score is the negative log probability, under the user's prior beliefs
about the data, of the projected points landing where they actually land at
the given plotting resolution. Gaussian beliefs make the score a shifted,
scaled variance; heavy-tailed (multivariate-t) beliefs make it robust to a
few large points. All values are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import (
    SicParams,
    as_matrix,
    check_orthonormal,
    check_unit_vector,
)
from .special import kappa_inverse, log_gamma


@dataclass(frozen=True)
class SicValue:
    """Additive decomposition of a projection score.

    ``data_term`` depends on the projected data, ``resolution_term`` on the
    plotting resolutions only, and ``constant_term`` collects the density
    normalization constants, so ``total`` is an absolute negative
    log probability rather than a merely comparable quantity.
    """

    data_term: float
    resolution_term: float
    constant_term: float

    @property
    def total(self) -> float:
        return self.data_term + self.resolution_term + self.constant_term


def _require_positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0.0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    return value


def _check_deltas(deltas, r: int) -> np.ndarray:
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    if deltas.shape != (r,):
        raise ValueError(f"expected {r} resolutions, got shape {deltas.shape}")
    if not np.all(deltas > 0.0):
        raise ValueError("all plot resolutions must be positive")
    return deltas


def sic_gaussian_1d(X, w, sigma: float, delta: float) -> SicValue:
    """Score of a 1-d projection under Gaussian beliefs with scale ``sigma``.

    total = (n/2) log(2 pi sigma^2) - n log(delta) + w'X'Xw / (2 sigma^2).
    """
    values = as_matrix(X)
    w = check_unit_vector(w)
    sigma = _require_positive("sigma", sigma)
    delta = _require_positive("delta", delta)
    n = values.shape[0]
    proj = values @ w
    data = float(proj @ proj) / (2.0 * sigma**2)
    resolution = -n * math.log(delta)
    constant = 0.5 * n * math.log(2.0 * math.pi * sigma**2)
    return SicValue(data, resolution, constant)


def sic_gaussian_rd(X, W, sigma: float, deltas) -> SicValue:
    """Score of an r-dimensional projection under Gaussian beliefs.

    Reduces exactly to :func:`sic_gaussian_1d` at r = 1 and is invariant to
    right-rotation of the basis.
    """
    values = as_matrix(X)
    W = check_orthonormal(W)
    sigma = _require_positive("sigma", sigma)
    n = values.shape[0]
    r = W.shape[1]
    deltas = _check_deltas(deltas, r)
    proj = values @ W
    data = float(np.sum(proj**2)) / (2.0 * sigma**2)
    resolution = -n * float(np.sum(np.log(deltas)))
    constant = 0.5 * n * r * math.log(2.0 * math.pi * sigma**2)
    return SicValue(data, resolution, constant)


def sic_t_1d(X, w, rho: float, nu: float, delta: float) -> SicValue:
    """Score of a 1-d projection under heavy-tailed beliefs.

    The data term is ((nu+1)/2) sum_i log(1 + (x_i'w)^2 / rho); the constant
    term makes the total equal to the exact negative log density of the
    projections under the implied univariate t marginal, minus n log(delta).
    Requires rho > 0: the normalization diverges at rho = 0 (use
    :func:`tpca_objective` to rank projections in that regime).
    """
    values = as_matrix(X)
    w = check_unit_vector(w)
    rho = _require_positive("rho", rho)
    nu = _require_positive("nu", nu)
    delta = _require_positive("delta", delta)
    n = values.shape[0]
    proj = values @ w
    data = 0.5 * (nu + 1.0) * float(np.sum(np.log1p(proj**2 / rho)))
    resolution = -n * math.log(delta)
    constant = n * (
        log_gamma(nu / 2.0) - log_gamma((nu + 1.0) / 2.0) + 0.5 * math.log(math.pi * rho)
    )
    return SicValue(data, resolution, constant)


def sic_t_rd(X, W, rho: float, nu: float, deltas) -> SicValue:
    """Score of an r-dimensional projection under heavy-tailed beliefs.

    Agrees with :func:`sic_t_1d` at r = 1 and depends on the basis only
    through the projector WW'.
    """
    values = as_matrix(X)
    W = check_orthonormal(W)
    rho = _require_positive("rho", rho)
    nu = _require_positive("nu", nu)
    n = values.shape[0]
    r = W.shape[1]
    deltas = _check_deltas(deltas, r)
    quad = np.sum((values @ W) ** 2, axis=1)
    data = 0.5 * (nu + r) * float(np.sum(np.log1p(quad / rho)))
    resolution = -n * float(np.sum(np.log(deltas)))
    constant = n * (
        log_gamma(nu / 2.0)
        - log_gamma((nu + r) / 2.0)
        + 0.5 * r * math.log(math.pi * rho)
    )
    return SicValue(data, resolution, constant)


def tpca_objective(X, w, rho: float) -> float:
    """Ranking objective sum_i log(rho + (x_i'w)^2).

    This is the part of the heavy-tailed score that depends on the
    direction; maximizing it over unit vectors is the t-PCA problem. At
    rho = 0 a projection with any exactly-zero component scores -inf.
    """
    values = as_matrix(X)
    w = check_unit_vector(w)
    rho = float(rho)
    if rho < 0.0:
        raise ValueError(f"rho must be nonnegative, got {rho!r}")
    shifted = rho + (values @ w) ** 2
    with np.errstate(divide="ignore"):
        return float(np.sum(np.log(shifted)))


def stretched_sic_objective(X, w, sigma: float) -> float:
    """Gaussian score variant when axes are stretched to fill the plot.

    Evaluates w'X'Xw - 2 sigma^2 n log(max(Xw) - min(Xw)). A constant
    projection (zero range) scores -inf. Evaluation only; no optimizer is
    provided for this nonsmooth objective.
    """
    values = as_matrix(X)
    w = check_unit_vector(w)
    sigma = _require_positive("sigma", sigma)
    n = values.shape[0]
    if n < 2:
        raise ValueError("stretched objective needs at least two data points")
    proj = values @ w
    spread = float(proj.max() - proj.min())
    if spread <= 0.0:
        return float("-inf")
    return float(proj @ proj) - 2.0 * sigma**2 * n * math.log(spread)


def resolve_nu(params: SicParams, d: int) -> float:
    """Degrees of freedom from ``params``: taken directly or implied by ``c``."""
    if params.nu is not None:
        return float(params.nu)
    if params.c is not None:
        return kappa_inverse(params.c, d)
    raise ValueError("SicParams must carry nu or c to determine degrees of freedom")
