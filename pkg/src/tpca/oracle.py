"""Exact and brute-force references for small instances.

These are ground-truth companions for the iterative solvers: the closed-form
count of achievable sign patterns, their exhaustive enumeration in 2-d via
an angular sweep, and a dense grid search over the unit sphere. Enumeration
beyond 2-d grows like (n-1)^(d-1) and is deliberately out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import as_matrix

_ANGLE_TOL = 1e-12


def cover_count(n: int, d: int) -> int:
    """Number of sign patterns of X w achievable by linear separation: 2 * sum_{k<d} C(n-1, k).

    Exact for points in general position. Python integers keep the count
    exact for any n, d.
    """
    n = int(n)
    d = int(d)
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    return 2 * sum(math.comb(n - 1, k) for k in range(d))


@dataclass(frozen=True, eq=False)
class DichotomyResult:
    """All achievable sign patterns with one witness direction per pattern.

    ``degenerate`` is set when some rows are parallel, in which case fewer
    than the general-position count of patterns exist.
    """

    signs: np.ndarray  # (m, n) entries in {-1, +1}
    witnesses: np.ndarray  # (m, 2) unit vectors with sign(X w) = signs row
    degenerate: bool


def enumerate_dichotomies_2d(X) -> DichotomyResult:
    """Exhaustive sign patterns sign(X w) over unit w in 2-d, by angular sweep.

    Each row contributes two critical angles where its projection vanishes;
    between consecutive critical angles the sign pattern is constant, so the
    midpoint of each arc is a witness. Rows of all zeros are rejected.
    """
    values = as_matrix(X)
    n, d = values.shape
    if d != 2:
        raise ValueError(f"enumeration is implemented for d=2 only, got d={d}")
    norms = np.linalg.norm(values, axis=1)
    if np.any(norms == 0.0):
        raise ValueError(f"row {int(np.argmin(norms))} is zero; its sign is undefined")

    phi = np.arctan2(values[:, 1], values[:, 0])
    criticals = np.sort(np.concatenate([phi + 0.5 * np.pi, phi - 0.5 * np.pi]) % (2.0 * np.pi))
    keep = np.concatenate([[True], np.diff(criticals) > _ANGLE_TOL])
    unique = criticals[keep]
    if len(unique) > 1 and (unique[0] + 2.0 * np.pi) - unique[-1] <= _ANGLE_TOL:
        unique = unique[:-1]
    degenerate = len(unique) < 2 * n

    boundaries = np.append(unique, unique[0] + 2.0 * np.pi)
    midpoints = 0.5 * (boundaries[:-1] + boundaries[1:])
    seen: dict[tuple[int, ...], np.ndarray] = {}
    for theta in midpoints:
        w = np.array([math.cos(theta), math.sin(theta)])
        proj = values @ w
        if np.any(np.abs(proj) <= _ANGLE_TOL * norms):
            # midpoint fell on a merged boundary; the adjacent cells cover it
            degenerate = True
            continue
        key = tuple(int(s) for s in np.sign(proj))
        if key not in seen:
            seen[key] = w
    signs = np.array(list(seen.keys()), dtype=int)
    witnesses = np.array(list(seen.values()))
    return DichotomyResult(signs=signs, witnesses=witnesses, degenerate=degenerate)


def _grid_directions(d: int, resolution: int) -> np.ndarray:
    if d == 2:
        thetas = np.arange(resolution) * (np.pi / resolution)
        return np.vstack([np.cos(thetas), np.sin(thetas)])
    # Fibonacci hemisphere: objective is sign-invariant, so half the sphere
    # suffices
    k = np.arange(resolution)
    z = (k + 0.5) / resolution
    radius = np.sqrt(1.0 - z**2)
    golden = math.pi * (3.0 - math.sqrt(5.0))
    theta = k * golden
    return np.vstack([radius * np.cos(theta), radius * np.sin(theta), z])


def grid_best_w(X, rho: float, resolution: int) -> tuple[np.ndarray, float]:
    """Best direction on a dense deterministic grid, with its objective.

    d = 2 uses ``resolution`` evenly spaced angles in [0, pi) (doubling the
    resolution refines the same grid); d = 3 uses a Fibonacci hemisphere.
    Ties break on the first grid index.
    """
    values = as_matrix(X)
    d = values.shape[1]
    if d not in (2, 3):
        raise ValueError(f"grid search supports d in {{2, 3}}, got d={d}")
    resolution = int(resolution)
    if resolution < 1000:
        raise ValueError(f"resolution must be at least 1000, got {resolution}")
    rho = float(rho)
    if rho < 0.0:
        raise ValueError(f"rho must be nonnegative, got {rho!r}")

    W = _grid_directions(d, resolution)
    best_value = -np.inf
    best_index = -1
    chunk = 8192
    with np.errstate(divide="ignore"):
        for start in range(0, resolution, chunk):
            block = W[:, start : start + chunk]
            proj = values @ block
            objective = np.sum(np.log(rho + proj**2), axis=0)
            i = int(np.argmax(objective))
            if objective[i] > best_value:
                best_value = float(objective[i])
                best_index = start + i
    return W[:, best_index].copy(), best_value
