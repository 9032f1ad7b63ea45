"""Pair copulas and vine copula models."""
from .families import (
    Family,
    PairCopula,
    PairFit,
    fit_pair,
    independence_pvalue,
    kendall_tau_empirical,
    kendall_tau_integral,
    kendall_tau_model,
)
from .rvine import RvineSpec, VineEdge, fit_dvine, select_dvine_order
from .vine import CvineModel, fit_cvine, inverse_rosenblatt, rosenblatt, select_cvine_order, tau_matrix

__all__ = [
    "Family", "PairCopula", "PairFit", "fit_pair", "independence_pvalue", "kendall_tau_empirical", "kendall_tau_integral",
    "kendall_tau_model", "CvineModel", "fit_cvine", "inverse_rosenblatt", "rosenblatt",
    "select_cvine_order", "tau_matrix", "RvineSpec", "VineEdge", "fit_dvine", "select_dvine_order",
]
