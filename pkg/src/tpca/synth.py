"""Seeded synthetic datasets with planted outlier structure.

Two designs: a high-dimensional mixture of two zero-mean Gaussian
populations whose spreads differ by a large factor, and a small 2-d mixture
of a dominant population plus correlated outliers. Sampling uses an
explicit Box-Muller transform on top of the seeded uniform stream, so
matrices are byte-reproducible for a given seed across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DataMatrix, center

_OUTLIER_INLIER_COV = np.array([[4.0, 0.0], [0.0, 1.0]])
_OUTLIER_OUTLIER_COV = np.array([[16.0, 12.0], [12.0, 13.0]])


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic dataset.

    ``n_large`` counts the majority population, ``n_small`` the minority
    one. For the two-scale variant, ``scale_factor`` multiplies the
    covariance of the minority population when ``scale_minority`` is true
    (the default: the few points are the wide ones), else the majority's.
    """

    variant: str
    seed: int = 0
    n_large: int = 8000
    n_small: int = 2000
    d: int = 100
    scale_factor: float = 100.0
    scale_minority: bool = True

    def __post_init__(self):
        if self.variant not in ("two_scale", "outlier_pair"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if int(self.n_large) < 1 or int(self.n_small) < 1:
            raise ValueError("population counts must be at least 1")
        if int(self.d) < 1:
            raise ValueError(f"d must be at least 1, got {self.d!r}")
        if not self.scale_factor > 0.0:
            raise ValueError(f"scale_factor must be positive, got {self.scale_factor!r}")
        if self.variant == "outlier_pair" and int(self.d) != 2:
            raise ValueError("the outlier_pair variant is 2-dimensional")

    @classmethod
    def two_scale(cls, seed: int = 0, n_large: int = 8000, n_small: int = 2000,
                  d: int = 100, scale_factor: float = 100.0,
                  scale_minority: bool = True) -> "SynthSpec":
        return cls("two_scale", seed, n_large, n_small, d, scale_factor, scale_minority)

    @classmethod
    def outlier_pair(cls, seed: int = 0, n_inliers: int = 1000,
                     n_outliers: int = 100) -> "SynthSpec":
        return cls("outlier_pair", seed, n_inliers, n_outliers, d=2)


def _standard_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Box-Muller draws from the seeded uniform stream (frozen algorithm)."""
    count = int(np.prod(shape))
    pairs = (count + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # in (0, 1]
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([radius * np.cos(2.0 * np.pi * u2),
                        radius * np.sin(2.0 * np.pi * u2)])
    return z[:count].reshape(shape)


def gen_two_scale_gaussians(spec: SynthSpec) -> tuple[DataMatrix, np.ndarray]:
    """Two zero-mean diagonal-covariance Gaussian populations, one scaled wide.

    Per-dimension variances are independent chi-squared draws with one
    degree of freedom (squared standard normals); one population's
    covariance is then multiplied by ``scale_factor``. Labels: 0 for the
    majority population, 1 for the minority. Output is centered.
    """
    if spec.variant != "two_scale":
        raise ValueError(f"expected a two_scale spec, got {spec.variant!r}")
    rng = np.random.default_rng(spec.seed)
    d = int(spec.d)
    var_large = _standard_normal(rng, d) ** 2
    var_small = _standard_normal(rng, d) ** 2
    if spec.scale_minority:
        var_small = var_small * spec.scale_factor
    else:
        var_large = var_large * spec.scale_factor
    points_large = _standard_normal(rng, (int(spec.n_large), d)) * np.sqrt(var_large)
    points_small = _standard_normal(rng, (int(spec.n_small), d)) * np.sqrt(var_small)
    values = np.vstack([points_large, points_small])
    labels = np.concatenate([np.zeros(int(spec.n_large), dtype=int),
                             np.ones(int(spec.n_small), dtype=int)])
    return center(values), labels


def gen_outlier_pair(spec: SynthSpec) -> tuple[DataMatrix, np.ndarray]:
    """2-d mixture: axis-aligned inliers plus correlated wide outliers.

    Inliers are N(0, diag(4, 1)); outliers are zero-mean with covariance
    [[16, 12], [12, 13]]. Labels: 0 inlier, 1 outlier. Output is centered.
    """
    if spec.variant != "outlier_pair":
        raise ValueError(f"expected an outlier_pair spec, got {spec.variant!r}")
    rng = np.random.default_rng(spec.seed)
    chol_in = np.linalg.cholesky(_OUTLIER_INLIER_COV)
    chol_out = np.linalg.cholesky(_OUTLIER_OUTLIER_COV)
    inliers = _standard_normal(rng, (int(spec.n_large), 2)) @ chol_in.T
    outliers = _standard_normal(rng, (int(spec.n_small), 2)) @ chol_out.T
    values = np.vstack([inliers, outliers])
    labels = np.concatenate([np.zeros(int(spec.n_large), dtype=int),
                             np.ones(int(spec.n_small), dtype=int)])
    return center(values), labels
