"""Informative linear projections under prior beliefs.

Scores a projection by how surprising the projected data would be to a user
holding a given prior belief about the dataset, then finds the projections
that maximize that score. Gaussian beliefs recover classical PCA;
heavy-tailed beliefs give t-PCA, an outlier-robust variant solved either by
a modified power method or through a convex Fantope relaxation that also
certifies an upper bound.
"""

from .data import (
    DataMatrix,
    SicParams,
    center,
    check_orthonormal,
    check_unit_vector,
    scale_measure,
    validate_orthonormal,
)
from .oracle import DichotomyResult, cover_count, enumerate_dichotomies_2d, grid_best_w
from .pca import PCA, scatter, top_components
from .power import (
    FitReport,
    PowerOptions,
    SingularityError,
    TPCA,
    deflate,
    fit_tpca_power,
    kkt_residual,
    power_init,
    power_step,
    weighted_scatter,
)
from .relaxation import (
    FantopeDiagnostics,
    RelaxedTPCA,
    RelaxOptions,
    extract_basis,
    fantope_project,
    feasibility_check,
    relax_gradient,
    relax_objective,
    solve_relaxation,
)
from .sic import (
    SicValue,
    resolve_nu,
    sic_gaussian_1d,
    sic_gaussian_rd,
    sic_t_1d,
    sic_t_rd,
    stretched_sic_objective,
    tpca_objective,
)
from .special import digamma, kappa, kappa_inverse, log_gamma
from .synth import SynthSpec, gen_outlier_pair, gen_two_scale_gaussians

__version__ = "0.1.0"

__all__ = [
    "DataMatrix",
    "SicParams",
    "center",
    "check_orthonormal",
    "check_unit_vector",
    "scale_measure",
    "validate_orthonormal",
    "DichotomyResult",
    "cover_count",
    "enumerate_dichotomies_2d",
    "grid_best_w",
    "PCA",
    "scatter",
    "top_components",
    "FitReport",
    "PowerOptions",
    "SingularityError",
    "TPCA",
    "deflate",
    "fit_tpca_power",
    "kkt_residual",
    "power_init",
    "power_step",
    "weighted_scatter",
    "FantopeDiagnostics",
    "RelaxedTPCA",
    "RelaxOptions",
    "extract_basis",
    "fantope_project",
    "feasibility_check",
    "relax_gradient",
    "relax_objective",
    "solve_relaxation",
    "SicValue",
    "resolve_nu",
    "sic_gaussian_1d",
    "sic_gaussian_rd",
    "sic_t_1d",
    "sic_t_rd",
    "stretched_sic_objective",
    "tpca_objective",
    "digamma",
    "kappa",
    "kappa_inverse",
    "log_gamma",
    "SynthSpec",
    "gen_outlier_pair",
    "gen_two_scale_gaussians",
    "__version__",
]
