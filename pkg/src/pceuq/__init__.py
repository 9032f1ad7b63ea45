"""Sparse polynomial chaos expansions trained on data, with KDE marginals and
vine-copula input models."""
from .basis import MultiIndexSet, design_matrix, eval_design_row, total_degree_set, truncated_set
from .copula import CvineModel, PairCopula, RvineSpec, fit_cvine, fit_pair
from .marginals import BoundedUniformMarginal, KdeMarginal, fit_kde, inverse_pit, pit
from .metrics import ErrorReport, kl_divergence, mae, rel_moment_errors, rmae
from .orthopoly import OrthonormalBasis1D, eval_basis, legendre_basis, stieltjes_basis
from .pce import Mode, PceConfig, PceModel, StatisticsReport, fit, fit_table, resample_statistics
from .regression import DesignMatrix, SparseSolution, lar_select, loo_error, ols_solve, select_hyperparams
from .sobol import sobol_points

__version__ = "0.1.0"

__all__ = [
    "MultiIndexSet", "design_matrix", "eval_design_row", "total_degree_set", "truncated_set",
    "CvineModel", "PairCopula", "RvineSpec", "fit_cvine", "fit_pair",
    "BoundedUniformMarginal", "KdeMarginal", "fit_kde", "inverse_pit", "pit",
    "ErrorReport", "kl_divergence", "mae", "rel_moment_errors", "rmae",
    "OrthonormalBasis1D", "eval_basis", "legendre_basis", "stieltjes_basis",
    "Mode", "PceConfig", "PceModel", "StatisticsReport", "fit", "fit_table", "resample_statistics",
    "DesignMatrix", "SparseSolution", "lar_select", "loo_error", "ols_solve", "select_hyperparams",
    "sobol_points",
]
